from .rkhs import (
    FitReport,
    KernelDesign,
    OperatorEstimate,
    assemble_problem,
    fit,
    evaluate_operator,
    predict_next,
    predict_curve,
    prediction_routes,
    lambda_vector,
)
from .tuning import FoldScheme, CvCell, TuningChoice, cross_validate, default_lambda_grid
from .metrics import mise
from .smoothing import SplineBasis, SmoothedCurves, smooth_bsplines, bspline_design
from .fpca import FpcaResult, fpca, select_p_threshold, explained_ratios
from .baselines import (
    BaselineKind,
    BaselineFit,
    bosq_fit,
    bosq_coefficients,
    anh_fit,
    fit_var_least_squares,
    ffpe,
    baseline_predict,
)
from .persistence import save_model, load_model

__all__ = [
    "FitReport",
    "KernelDesign",
    "OperatorEstimate",
    "assemble_problem",
    "fit",
    "evaluate_operator",
    "predict_next",
    "predict_curve",
    "prediction_routes",
    "lambda_vector",
    "FoldScheme",
    "CvCell",
    "TuningChoice",
    "cross_validate",
    "default_lambda_grid",
    "mise",
    "SplineBasis",
    "SmoothedCurves",
    "smooth_bsplines",
    "bspline_design",
    "FpcaResult",
    "fpca",
    "select_p_threshold",
    "explained_ratios",
    "BaselineKind",
    "BaselineFit",
    "bosq_fit",
    "bosq_coefficients",
    "anh_fit",
    "fit_var_least_squares",
    "ffpe",
    "baseline_predict",
    "save_model",
    "load_model",
]
