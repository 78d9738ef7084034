"""Spin-coherent P representation and separability certification for
symmetric N-qubit states."""

from .errors import SymSepError
from .estimators import ClassicalityCertifier, PFunctionTransformer, check_states
from .phasespace import calibrate_lambda, p_min, pfunc, state_multipoles, verify_inverse
from .separability import (
    Certificate,
    CertifyConfig,
    certify,
    certify_classical_nnls,
    concurrence,
    factor_purity_report,
    ppt_min_eigenvalue,
    reduce_two_qubit,
)
from .symstate import (
    DickeVector,
    Direction,
    SymDensity,
    dicke_state,
    ghz_state,
    maximally_mixed,
    one_axis_twist,
    random_density,
    rotate,
    scs_amplitudes,
    scs_mixture,
)
from .witnesses import spin_matrices, squeezing_xi2

__version__ = "0.1.0"

__all__ = [
    "Certificate",
    "CertifyConfig",
    "ClassicalityCertifier",
    "DickeVector",
    "Direction",
    "PFunctionTransformer",
    "SymDensity",
    "SymSepError",
    "calibrate_lambda",
    "certify",
    "certify_classical_nnls",
    "check_states",
    "concurrence",
    "dicke_state",
    "factor_purity_report",
    "ghz_state",
    "maximally_mixed",
    "one_axis_twist",
    "p_min",
    "pfunc",
    "ppt_min_eigenvalue",
    "random_density",
    "reduce_two_qubit",
    "rotate",
    "scs_amplitudes",
    "scs_mixture",
    "spin_matrices",
    "squeezing_xi2",
    "state_multipoles",
    "verify_inverse",
]
