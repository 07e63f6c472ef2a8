"""Publication-style figures from becscatter spectrum/Bragg/permittivity
tables, consuming only the CSV/JSON file contract."""

from .figures import LAYOUTS, FigureSpec, build_figure, render
from .tables import Table, check_compatible, read_table

__version__ = "0.1.0"

__all__ = ["LAYOUTS", "FigureSpec", "build_figure", "render", "Table",
           "check_compatible", "read_table"]
