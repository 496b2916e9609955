"""Tolerance configuration shared by every module."""

import os
from dataclasses import dataclass, replace

__all__ = ["Tolerances", "DEFAULT_TOLERANCES", "tolerances_from_env"]


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds used throughout the package.

    Attributes
    ----------
    residual : float
        Relative bound on Riccati and Lyapunov residuals.
    symmetry : float
        Relative asymmetry accepted before a matrix is called non-symmetric.
    v1_ratio : float
        Subspace bases with ``sigma_min(V1) <= v1_ratio * sigma_max(V1)``
        are treated as solutions at infinity and skipped.
    dedup : float
        Relative distance under which two Riccati solutions coincide.
    cluster : float
        Relative distance used to group numerically repeated eigenvalues.
    rank : float
        Relative singular value threshold for rank decisions.
    stability : float
        Margin for the Hurwitz test, ``Re(lambda) < -stability``.
    zero_cutoff : float
        Generalized eigenvalues above this magnitude are treated as infinite.
    pd : float
        Minimum eigenvalue for positive definiteness.
    structure : float
        Relative tolerance for structural zero tests (diagonality, hollowness).
    grid : float
        Relative tolerance for frequency grid comparisons.
    """

    residual: float = 1e-8
    symmetry: float = 1e-8
    v1_ratio: float = 1e-8
    dedup: float = 1e-6
    cluster: float = 1e-5
    rank: float = 1e-9
    stability: float = 1e-9
    zero_cutoff: float = 1e8
    pd: float = 1e-9
    structure: float = 1e-9
    grid: float = 1e-8

    def with_(self, **changes):
        """Return a copy with some fields replaced."""
        return replace(self, **changes)


DEFAULT_TOLERANCES = Tolerances()


def tolerances_from_env(base=DEFAULT_TOLERANCES):
    """Apply the ``NETFACTOR_TOL`` override to the residual and grid tolerances."""
    raw = os.environ.get("NETFACTOR_TOL")
    if not raw:
        return base
    value = float(raw)
    return replace(base, residual=value, grid=value)
