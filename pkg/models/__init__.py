"""
Models package for the fixed-space analysis toolkit.
"""

from .channel_models import *
from .report_models import *
