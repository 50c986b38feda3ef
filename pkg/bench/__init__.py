from .config import ExperimentConfig, load_experiment_config, METHODS
from .metrics import prediction_error, step_rmse, step_mae
from .results import (
    MethodRecord,
    MethodSummary,
    ExperimentSummary,
    ExperimentResult,
    OutputFormat,
    summarize,
    emit_results,
    read_records_csv,
    load_result_json,
    format_summary,
)
from .runner import run_experiment, run_replication, build_truth
from .forecast import ForecastOptions, ForecastReport, prepare_forecast_split, forecast_eval

__all__ = [
    "ExperimentConfig",
    "load_experiment_config",
    "METHODS",
    "prediction_error",
    "step_rmse",
    "step_mae",
    "MethodRecord",
    "MethodSummary",
    "ExperimentSummary",
    "ExperimentResult",
    "OutputFormat",
    "summarize",
    "emit_results",
    "read_records_csv",
    "load_result_json",
    "format_summary",
    "run_experiment",
    "run_replication",
    "build_truth",
    "ForecastOptions",
    "ForecastReport",
    "prepare_forecast_split",
    "forecast_eval",
]
