"""
Configuration package for the fixed-space analysis toolkit.
"""

from .fixedspace_config import *
