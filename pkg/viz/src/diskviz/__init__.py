"""Figure rendering for diskmin CSV/JSON outputs."""

from .render import FIGURE_KINDS, FigureSpec, SchemaError, render

__version__ = "0.1.0"
