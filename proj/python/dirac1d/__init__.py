"""Exactly causal 1+1D Dirac tunnelling laboratory (pybind11 wrapper)."""

from ._dirac1d import *  # noqa: F401,F403
from ._dirac1d import __doc__  # noqa: F401
