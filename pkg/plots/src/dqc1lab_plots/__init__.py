"""Presentation-only figure regeneration for dqc1lab CSV artifacts."""

from .render import FigureSpec, SchemaError, build_figure, render

__version__ = "0.1.0"
