"""Publication figures from archived CSV runs.

Display only: nothing here recomputes a wave profile or a constant.
The renderers read the frozen CSV schemas emitted by the simulation
CLI and draw them with a pinned matplotlib configuration so that
identical inputs give byte-identical SVG output.
"""

from .io import EmptyDataError, SchemaError
from .render import PINNED_RC, FigureSpec, plot_constants, plot_ensemble

__version__ = "0.1.0"

__all__ = [
    "EmptyDataError",
    "FigureSpec",
    "PINNED_RC",
    "SchemaError",
    "plot_constants",
    "plot_ensemble",
    "__version__",
]
