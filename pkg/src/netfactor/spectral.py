"""Output spectral densities and positive-real realizations.

For a stable system driven by unit white noise the output spectral
density is ``Phi(s) = G(s) G(-s)^T``. With ``R_c`` the controllability
gramian, ``Z(s) = C (sI - A)^-1 R_c C^T`` satisfies ``Z + Z^* = Phi``.
"""

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOLERANCES
from .errors import DimensionMismatch, SingularTransformation, Unstable
from .numerics import real_matrix, solve_lyapunov
from .statespace import StateSpace, apply_transformation, freqresp, is_hurwitz

__all__ = [
    "default_grid",
    "SpectralDensity",
    "PositiveRealSystem",
    "ResidualReport",
    "spectral_density_of",
    "positive_real_realization",
    "phi_equal",
    "verify_glover_willems",
    "relative_residual",
]


def default_grid(seed=0, n_log=50, n_random=10):
    """50 log-spaced frequencies in [1e-2, 1e2] plus 10 seeded uniform ones in [1e-3, 1e3]."""
    rng = np.random.default_rng(seed)
    return np.concatenate([np.logspace(-2, 2, n_log), rng.uniform(1e-3, 1e3, n_random)])


def _hermitian(x):
    return x @ np.conj(np.swapaxes(x, -1, -2))


@dataclass(frozen=True, eq=False)
class SpectralDensity:
    """Spectral density generated by a stable spectral factor."""

    generator: StateSpace

    @property
    def p_count(self):
        return self.generator.p

    def __call__(self, omega):
        g = freqresp(self.generator, [1j * float(omega)])[0]
        return g @ g.conj().T

    def on_grid(self, omegas):
        return _hermitian(freqresp(self.generator, 1j * np.asarray(omegas, dtype=float)))


@dataclass(frozen=True, eq=False)
class PositiveRealSystem:
    """Realization ``(A, B_z, C, D_z)`` of a positive-real ``Z`` with ``Z + Z^* = Phi``."""

    sys: StateSpace

    def __call__(self, s):
        return self.sys(s)

    def phi_on_grid(self, omegas):
        z = freqresp(self.sys, 1j * np.asarray(omegas, dtype=float))
        return z + np.conj(np.swapaxes(z, -1, -2))

    def hermitian_part_min_eig(self, omegas):
        phi = self.phi_on_grid(omegas)
        return float(min(np.linalg.eigvalsh(0.5 * x).min() for x in phi))


def spectral_density_of(sys):
    """Wrap a stable system as the generator of its output spectral density.

    Raises
    ------
    Unstable
        If ``sys.a`` is not Hurwitz.
    """
    if not is_hurwitz(sys.a):
        raise Unstable("spectral densities need a Hurwitz state matrix")
    return SpectralDensity(sys)


def positive_real_realization(sys, basis=None):
    """Positive-real ``Z`` with ``Z + Z^* = Phi`` for ``Phi`` generated by ``sys``.

    Parameters
    ----------
    sys : StateSpace
        Stable, with ``D = 0``.
    basis : (n, n) array_like, optional
        State transformation ``T`` applied to the result as
        ``(T A T^-1, T B_z, C T^-1, 0)``.

    Returns
    -------
    PositiveRealSystem
    """
    if not is_hurwitz(sys.a):
        raise Unstable("positive-real realization needs a Hurwitz state matrix")
    rc = solve_lyapunov(sys.a, sys.b @ sys.b.T)
    bz = rc @ sys.c.T + sys.b @ sys.d.T
    dz = 0.5 * sys.d @ sys.d.T
    z = StateSpace(sys.a, bz, sys.c, dz)
    if basis is not None:
        z = apply_transformation(z, basis)
    return PositiveRealSystem(z)


def phi_equal(s1, s2, grid=None, tol=None):
    """True iff both systems generate the same spectral density on ``grid``."""
    tol = DEFAULT_TOLERANCES.grid if tol is None else tol
    if s1.p != s2.p:
        raise DimensionMismatch("systems have different output counts")
    grid = default_grid() if grid is None else grid
    s = 1j * np.asarray(grid, dtype=float)
    phi1 = _hermitian(freqresp(s1, s))
    phi2 = _hermitian(freqresp(s2, s))
    diff = np.linalg.norm(phi1 - phi2, axis=(1, 2))
    ref = np.linalg.norm(phi1, axis=(1, 2))
    return bool(np.all(diff <= tol * (1.0 + ref)))


@dataclass(frozen=True)
class ResidualReport:
    """Named residuals with a pass flag.

    Each residual is ``||lhs - rhs||_F / (1 + sum of term norms)``, so
    rounded inputs are judged relative to the size of the quantities they
    approximate.
    """

    residuals: dict
    tol: float
    passed: bool
    notes: tuple = ()

    @property
    def worst(self):
        return max(self.residuals.values(), default=0.0)

    def __str__(self):
        lines = [f"{k:>12s}: {v:.3e}" for k, v in self.residuals.items()]
        lines.append(f"{'result':>12s}: {'PASS' if self.passed else 'FAIL'} (tol {self.tol:g})")
        return "\n".join(lines + list(self.notes))


def relative_residual(lhs_terms, rhs_terms):
    """``||sum(lhs) - sum(rhs)||_F / (1 + sum ||term||_F)``."""
    diff = sum(lhs_terms) - sum(rhs_terms)
    scale = 1.0 + sum(float(np.linalg.norm(t)) for t in list(lhs_terms) + list(rhs_terms))
    return float(np.linalg.norm(diff)) / scale


def verify_glover_willems(sys, sys2, s, t, tol=None):
    """Check that ``(S, T)`` certifies equal spectral densities.

    Relations checked, with ``T`` in the convention ``A' = T^-1 A T``:

    * ``state``: ``A' = T^-1 A T``
    * ``output``: ``C' = C T``
    * ``lyapunov``: ``S A^T + A S + B B^T - T B' B'^T T^T = 0``
    * ``cross``: ``S C^T + B D^T - T B' D'^T = 0``
    * ``feedthrough``: ``D D^T - D' D'^T = 0``

    Raises
    ------
    SingularTransformation
    DimensionMismatch
    """
    tol = DEFAULT_TOLERANCES.residual if tol is None else tol
    if (sys.n, sys.p, sys.m) != (sys2.n, sys2.p, sys2.m):
        raise DimensionMismatch("systems have different dimensions")
    n = sys.n
    s = real_matrix(s, "s", shape=(n, n))
    t = real_matrix(t, "t", shape=(n, n))
    sv = np.linalg.svd(t, compute_uv=False) if n else np.ones(1)
    if n and sv[-1] <= 1e-12 * sv[0]:
        raise SingularTransformation("certificate T is singular")
    a, b, c, d = sys.matrices()
    a2, b2, c2, d2 = sys2.matrices()
    tia = np.linalg.solve(t, a @ t) if n else a
    bbt = b @ b.T
    tb2 = t @ b2
    res = {
        "state": relative_residual([a2], [tia]),
        "output": relative_residual([c2], [c @ t]),
        "lyapunov": relative_residual([s @ a.T, a @ s, bbt], [tb2 @ tb2.T]),
        "cross": relative_residual([s @ c.T, b @ d.T], [tb2 @ d2.T]),
        "feedthrough": relative_residual([d @ d.T], [d2 @ d2.T]),
    }
    return ResidualReport(res, tol, all(v <= tol for v in res.values()))
