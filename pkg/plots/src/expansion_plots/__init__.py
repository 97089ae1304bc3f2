"""Offline figures from expansion-sampling CSV logs.

Reads the experiment runner's per-seed CSV files (and, optionally, its dense
prediction-grid files) and renders F1-vs-iteration curves or query scatter
plots. Completely independent of the sampling library: everything it needs
arrives through the CSV schema.
"""
from .figures import f1_curve_figure, query_scatter_figure, save_figure
from .schema import GridData, RunData, SchemaError, load_grid_csv, load_run_csv
from .truth import truth_mask

__version__ = "0.1.0"

__all__ = [
    "GridData",
    "RunData",
    "SchemaError",
    "f1_curve_figure",
    "load_grid_csv",
    "load_run_csv",
    "query_scatter_figure",
    "save_figure",
    "truth_mask",
]
