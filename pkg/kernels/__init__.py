from .bernoulli import KernelName, KernelSpec, eval_kernel, kernel_matrix, gram_matrix
from .spectral import SpectralFactor, spectral_sqrt, operator_nuclear_norm

__all__ = [
    "KernelName",
    "KernelSpec",
    "eval_kernel",
    "kernel_matrix",
    "gram_matrix",
    "SpectralFactor",
    "spectral_sqrt",
    "operator_nuclear_norm",
]
