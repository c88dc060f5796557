"""Faltings heights, canonical heights and Mordell-Weil regulators of
elliptic curves over Q, with certified checks of explicit height inequalities."""

from .bounds import (RankBoundInputs, TowerMagnitude, all_constants, headline_rank_constant,
                     jacobian_rank_bound, rank_bound, tower_compare)
from .curve import (ConductorNorms, MinimalModelResult, ReductionKind, WeierstrassCurve,
                    classify_reduction, conductor_norms, invariants, minimal_model)
from .errreal import ErrComplex, ErrReal
from .faltings import (FaltingsReport, discriminant_identity_residual, faltings_height,
                       height_conductor_check, matrix_lemma_check)
from .heights import (CanonicalHeight, canonical_height, canonical_height_doubling_oracle,
                      height_pairing, naive_height)
from .lattice import (HeightLattice, RegulatorReport, build_lattice, determinant, hadamard_check,
                      minkowski_check, regulator, successive_minima)
from .modular import TauPoint, log_modular_discriminant, reduce_tau
from .periods import PeriodLattice, elliptic_log, period_lattice
from .points import CurvePoint, point_add, point_mul, torsion_points
from .verdict import Status, Verdict

__version__ = "0.1.0"

__all__ = [
    "CanonicalHeight", "ConductorNorms", "CurvePoint", "ErrComplex", "ErrReal", "FaltingsReport",
    "HeightLattice", "MinimalModelResult", "PeriodLattice", "RankBoundInputs", "ReductionKind",
    "RegulatorReport", "Status", "TauPoint", "TowerMagnitude", "Verdict", "WeierstrassCurve",
    "all_constants", "build_lattice", "canonical_height", "canonical_height_doubling_oracle",
    "classify_reduction", "conductor_norms", "determinant", "discriminant_identity_residual",
    "elliptic_log", "faltings_height", "hadamard_check", "headline_rank_constant",
    "height_conductor_check", "height_pairing", "invariants", "jacobian_rank_bound",
    "log_modular_discriminant", "matrix_lemma_check", "minimal_model", "minkowski_check",
    "naive_height", "period_lattice", "point_add", "point_mul", "rank_bound", "reduce_tau",
    "regulator", "successive_minima", "torsion_points", "tower_compare",
]
