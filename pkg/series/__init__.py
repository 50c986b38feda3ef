from .models import GridKind, Grid, SampledSeries, CosineBasis
from .ops import quad_inner, eval_cosine_basis, difference, cumulative_sum
from .io import load_csv, save_csv

__all__ = [
    "GridKind",
    "Grid",
    "SampledSeries",
    "CosineBasis",
    "quad_inner",
    "eval_cosine_basis",
    "difference",
    "cumulative_sum",
    "load_csv",
    "save_csv",
]
