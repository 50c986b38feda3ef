from .tracenorm import (
    TraceNormProblem,
    AgmOptions,
    AgmState,
    objective,
    gradient_block,
    svt_prox,
    agm_minimize,
)

__all__ = [
    "TraceNormProblem",
    "AgmOptions",
    "AgmState",
    "objective",
    "gradient_block",
    "svt_prox",
    "agm_minimize",
]
