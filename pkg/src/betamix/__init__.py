"""Empirical processes of beta-mixing sequences and a series-based Hausman test."""
from .classes import *  # noqa: F401,F403
from .empirical import *  # noqa: F401,F403
from .hausman import *  # noqa: F401,F403
from .mixing import *  # noqa: F401,F403
from .norms import *  # noqa: F401,F403
from . import classes, empirical, harness, hausman, mixing, norms  # noqa: F401

__version__ = "0.1.0"
