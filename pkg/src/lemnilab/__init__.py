"""Choreographic n-body motion on Bernoulli's lemniscate."""
from ._core import BACKEND
from .choreography import BodyState, Choreography, center_of_mass, cm_defect, find_moduli
from .dynamics import DriftReport, SystemState, drift_report, integrate, verify_choreography
from .elliptic import EllipticModulus, JacobiTriple, complete_K, jacobi, period
from .errors import (
    ConvergenceError,
    DegeneratePointError,
    DomainError,
    IllPosedFitError,
    PreconditionError,
    SingularityError,
    StiffnessError,
)
from .invariants import PairSet, canonical_set, constancy_report, distance_extrema, subset_scan
from .lemniscate import LemniscateCurve, PlaneVec, on_curve_residual
from .potential import FitResult, PotentialParams, fit_params, potential_energy

__version__ = "0.1.0"
