"""Semilog convergence figures from waverelax CSV output."""

from .render import ERROR_FLOOR, METHOD_MARKERS, FigureSpec, render

__version__ = "0.1.0"
