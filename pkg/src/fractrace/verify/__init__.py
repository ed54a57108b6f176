"""Numerical checks of the trace, extension and kernel inequalities."""

from .common import (HarnessParams, InequalityReport, Member, lift, lift_member, parallel_map,
                     solution_space_norm)
from .ensembles import KINDS, band_modes, bandlimited, ensemble_generate, initial_data
from .extension import (decay_envelope, extension_constant, kernel_convolution, kernel_decay_envelope,
                        mixed_kernel_constant)
from .regimes import besov_necessity, single_shell, subcritical_counterexample
from .trace import (MollifierSpec, decomposition_error, trace_constant, trace_constant_div,
                    trace_decomposition)

__all__ = [
    "HarnessParams", "InequalityReport", "Member", "lift", "lift_member", "parallel_map",
    "solution_space_norm", "KINDS", "band_modes", "bandlimited", "ensemble_generate", "initial_data",
    "decay_envelope", "extension_constant", "kernel_convolution", "kernel_decay_envelope",
    "mixed_kernel_constant", "besov_necessity", "single_shell", "subcritical_counterexample",
    "MollifierSpec", "decomposition_error", "trace_constant", "trace_constant_div",
    "trace_decomposition",
]
