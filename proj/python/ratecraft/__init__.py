"""Optimal rating-system design."""

from ._ratecraft import *  # noqa: F401,F403
from ._ratecraft import ValidationError, ConvergenceError, __doc__  # noqa: F401
