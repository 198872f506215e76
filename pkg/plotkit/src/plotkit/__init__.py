"""Figure rendering for embedding result tables."""

__version__ = "0.1.0"

from .figures import (EmptySeries, FigureSpec, MissingColumn, PlotkitError,
                      RenderInfo, read_table, render)

__all__ = ["EmptySeries", "FigureSpec", "MissingColumn", "PlotkitError",
           "RenderInfo", "read_table", "render", "__version__"]
