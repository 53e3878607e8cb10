"""Horospherical Radon transforms and zonal spherical analysis on homogeneous trees."""

from .tree_core import E0, F0, V0, Edge, Flag, TreeError, TreeParams, TruncationError
from .horospheres import EDGE, FLAG, VERTEX, FiniteFn, HoroFn, RadialSeq, delta, radon

__version__ = "0.1.0"
