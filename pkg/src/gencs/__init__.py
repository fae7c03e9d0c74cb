"""Generalized coherent states: families, Fock expansions, truncated operators
and a verification harness."""

from .duality import (GKLabel, dual_generalized_gk_state, dual_gk_state, generalized_gk_state,
                      gk_state, stabilize)
from .families import (Family, convergence_radius, dimension, dual_family, format_family,
                       nonlinearity, parse_family, spectrum, weight)
from .fock import (FockExpansion, TruncationPolicy, build_state, cat_superposition,
                   normalization_value, overlap, photon_statistics)

__version__ = "0.1.0"
