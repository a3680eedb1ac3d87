"""Figure rendering for spin-network reservoir sweep CSVs."""

from .figures import FIGURES, FigureSpec, NoDataError, SchemaError, render

__version__ = "0.1.0"
