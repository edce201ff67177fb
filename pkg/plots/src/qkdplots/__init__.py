"""Figure rendering for hybridqkd CSV sweeps."""

from .render import FigureSpec, MissingColumnError, NoDataError, main, render

__all__ = ["FigureSpec", "MissingColumnError", "NoDataError", "main", "render"]
