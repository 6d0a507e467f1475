"""Exact algebra for orbit Hamiltonians: Weyl and Poisson algebras, the
dispersionless KdV hierarchy and its degree-filtered versions, and branched
cover counts."""

from .algebra import BadOrbitError, OrbitVariable, Polynomial, degree, mul, partial, winding
from .hierarchy import (CommuteReport, FilteredSeries, HierarchySpec, KdVSeries, filtered, kdv,
                        sign_search, verify_commute)
from .hurwitz import (BranchingProfile, FactorizationSpec, branching_hamiltonian, count,
                      solve_rho)
from .orbits import CIRCLE, Circle, Elliptic, Hyperbolic, OrbitModel, Table
from .poisson import bracket, bracket_coefficient
from .weyl import (DElement, WeylElement, apply_action, check_master, cobordism_differential,
                   commutator, star)

__version__ = "0.1.0"

__all__ = [
    "BadOrbitError", "OrbitVariable", "Polynomial", "degree", "mul", "partial", "winding",
    "CommuteReport", "FilteredSeries", "HierarchySpec", "KdVSeries", "filtered", "kdv",
    "sign_search", "verify_commute", "BranchingProfile", "FactorizationSpec",
    "branching_hamiltonian", "count", "solve_rho", "CIRCLE", "Circle", "Elliptic",
    "Hyperbolic", "OrbitModel", "Table", "bracket", "bracket_coefficient", "DElement",
    "WeylElement", "apply_action", "check_master", "cobordism_differential", "commutator",
    "star",
]
