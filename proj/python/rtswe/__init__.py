"""Rotating thermal shallow water solver with POD and POD-DEIM reduced models."""

from ._core import *  # noqa: F401,F403
from ._core import (  # noqa: F401
    ConfigError,
    Error,
    FormatError,
    IoError,
    NewtonError,
    NumericError,
)

__version__ = "0.1.0"
