"""Numerical verification of sharp zero modes of D psi = i A.psi on R^n."""

from .clifford import CliffordRep, build_representation, clifford_apply
from .fields import ZeroModeParams, admissible_spinor_basis, eval_potential, eval_zero_mode, sharp_params
from .grid import GridSpec, SpinorField, sample_field
from .identities import EqualityLedger, IdentityReport, equality_ledger, integral_identity_report
from .reports import VerificationReport
from .yamabe import sobolev_constant, sphere_volume, yamabe_sphere

__version__ = "0.1.0"

__all__ = [
    "CliffordRep",
    "build_representation",
    "clifford_apply",
    "ZeroModeParams",
    "admissible_spinor_basis",
    "eval_potential",
    "eval_zero_mode",
    "sharp_params",
    "GridSpec",
    "SpinorField",
    "sample_field",
    "EqualityLedger",
    "IdentityReport",
    "equality_ledger",
    "integral_identity_report",
    "VerificationReport",
    "sobolev_constant",
    "sphere_volume",
    "yamabe_sphere",
]
