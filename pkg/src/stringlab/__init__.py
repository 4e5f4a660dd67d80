"""Old-covariant free bosonic string at desk scale.

Exact oscillator algebra and physical-state counting, Lorentz-invariant
shell measures, the Klein-Gordon commutator function, and a discretized
second-quantized string field.
"""

from .fock import FockVector, apply_alpha, inner_definite, inner_indefinite, level_basis
from .lorentz import LorentzTransform, gamma_lift, is_lorentz, rational_boost, standard_boost
from .metric_linalg import Inertia, inertia, quotient_gram, radical_basis
from .spectrum import physical_gram, spectrum_table, transverse_count
from .virasoro import Momentum, apply_L, rational_shell_point, virasoro_bracket

__version__ = "0.1.0"

__all__ = [
    "FockVector", "apply_alpha", "inner_definite", "inner_indefinite", "level_basis",
    "LorentzTransform", "gamma_lift", "is_lorentz", "rational_boost", "standard_boost",
    "Inertia", "inertia", "quotient_gram", "radical_basis",
    "physical_gram", "spectrum_table", "transverse_count",
    "Momentum", "apply_L", "rational_shell_point", "virasoro_bracket",
]
