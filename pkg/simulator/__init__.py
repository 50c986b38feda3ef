from .scenarios import (
    Scenario,
    NoiseKind,
    NoiseSpec,
    FarGroundTruth,
    make_scenario,
    companion_spectral_radius,
    eval_true_operator,
)
from .process import SimOutput, simulate, oracle_predict, recursion_step

__all__ = [
    "Scenario",
    "NoiseKind",
    "NoiseSpec",
    "FarGroundTruth",
    "make_scenario",
    "companion_spectral_radius",
    "eval_true_operator",
    "SimOutput",
    "simulate",
    "oracle_predict",
    "recursion_step",
]
