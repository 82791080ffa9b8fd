"""Figure rendering for optimizer sweep CSVs; consumes only the CSV contract."""

from .figures import FIGURE_KINDS, FigureError, FigureSpec, RenderResult, render

__version__ = "0.1.0"
