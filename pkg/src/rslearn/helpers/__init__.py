"""
Helper functions shared by the learner modules.
"""

from .helpers import *
