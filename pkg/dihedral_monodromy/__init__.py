__version__ = "0.1.0"

from .certificate import Certificate
from .curve import BranchConfig, ConfigError, config_from_json, local_system, preset_config
from .density import (
    build_factor,
    component_separation,
    irreducibility_certificate,
    lie_closure,
    no_characters_proxy,
    noncompactness_search,
    open_orbit_certificate,
)
from .exactmath import CycMatrix, CycScalar
from .heisenberg import DihedralElement, HeisenbergElement, dh_mul
from .homology import build_basis, dimension_oracle, span_certificate
from .reps import CharOrbit, all_orbits, heisenberg_comparison_certificate, w_u_matrices
from .twist import braid_generators, dehn_twist_matrix
