"""Continuous-time LTI systems in state-space form.

Includes the partition ``C = [I 0]`` into manifest and latent states,
assumption checks, similarity transformations, frequency response,
transmission zeros and SISO controllable canonical realizations.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import linalg

from .config import DEFAULT_TOLERANCES
from .errors import (
    DimensionMismatch,
    ImproperFraction,
    NonSquare,
    NotCoprime,
    PoleHit,
    ShapeViolation,
    SingularTransformation,
)
from .numerics import real_matrix

__all__ = [
    "StateSpace",
    "PartitionedSystem",
    "partition",
    "manifest_output",
    "permutation_matrix",
    "SisoRealization",
    "AssumptionReport",
    "validate_assumptions",
    "apply_transformation",
    "permute_channels",
    "frequency_response",
    "freqresp",
    "transmission_zeros",
    "is_minimum_phase",
    "realize_siso_controllable",
    "ctrb",
    "obsv",
    "controllable_dimension",
    "is_hurwitz",
    "is_minimal",
]


def _readonly(m):
    m.setflags(write=False)
    return m


@dataclass(frozen=True, eq=False)
class StateSpace:
    """Real LTI system ``(A, B, C, D)``.

    The state dimension may be zero, in which case the system is a static
    gain ``D``.
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray = None

    def __post_init__(self):
        a = real_matrix(self.a, "a") if np.size(self.a) else np.zeros((0, 0))
        n = a.shape[0]
        if a.shape != (n, n):
            raise ValueError("a must be square")
        b = np.array(self.b, dtype=float)
        c = np.array(self.c, dtype=float)
        if n == 0:
            if self.d is None:
                raise ValueError("a static system needs d")
            d = real_matrix(self.d, "d")
            b = b.reshape(0, d.shape[1])
            c = c.reshape(d.shape[0], 0)
        else:
            b = real_matrix(b, "b")
            c = real_matrix(c, "c")
            d = np.zeros((c.shape[0], b.shape[1])) if self.d is None else real_matrix(self.d, "d")
        if b.shape[0] != n or c.shape[1] != n or d.shape != (c.shape[0], b.shape[1]):
            raise DimensionMismatch(
                f"inconsistent shapes a{a.shape} b{b.shape} c{c.shape} d{d.shape}"
            )
        for name, m in (("a", a), ("b", b), ("c", c), ("d", d)):
            object.__setattr__(self, name, _readonly(m))

    @property
    def n(self):
        return self.a.shape[0]

    @property
    def m(self):
        return self.b.shape[1]

    @property
    def p(self):
        return self.c.shape[0]

    @cached_property
    def poles(self):
        return np.linalg.eigvals(self.a) if self.n else np.zeros(0, dtype=complex)

    def __call__(self, s):
        return frequency_response(self, s)

    def __repr__(self):
        return f"StateSpace(n={self.n}, m={self.m}, p={self.p})"

    def matrices(self):
        return self.a, self.b, self.c, self.d


@dataclass(frozen=True, eq=False)
class PartitionedSystem:
    """System with ``C = [I 0]``, ``D = 0`` split into manifest/latent blocks."""

    a11: np.ndarray
    a12: np.ndarray
    a21: np.ndarray
    a22: np.ndarray
    b1: np.ndarray
    b2: np.ndarray

    @property
    def p(self):
        return self.a11.shape[0]

    @property
    def l(self):
        return self.a22.shape[0]

    @property
    def m(self):
        return self.b1.shape[1]

    @classmethod
    def from_statespace(cls, sys, tol=0.0):
        """Split ``sys``; raises ShapeViolation unless ``C = [I 0]``, ``D = 0``."""
        p = sys.p
        expected = np.hstack([np.eye(p), np.zeros((p, sys.n - p))])
        if sys.n < p or np.abs(sys.c - expected).max(initial=0.0) > tol:
            raise ShapeViolation("C must equal [I 0]")
        if np.abs(sys.d).max(initial=0.0) > tol:
            raise ShapeViolation("D must be zero")
        a, b = sys.a, sys.b
        return cls(a[:p, :p], a[:p, p:], a[p:, :p], a[p:, p:], b[:p], b[p:])

    def to_statespace(self):
        p, l = self.p, self.l
        a = np.block([[self.a11, self.a12], [self.a21, self.a22]])
        b = np.vstack([self.b1, self.b2])
        c = np.hstack([np.eye(p), np.zeros((p, l))])
        return StateSpace(a, b, c, np.zeros((p, self.m)))


def partition(sys):
    return PartitionedSystem.from_statespace(sys)


def manifest_output(p, l):
    """The output matrix ``[I 0]``."""
    return np.hstack([np.eye(p), np.zeros((p, l))])


@dataclass(frozen=True, eq=False)
class SisoRealization:
    """Controllable canonical realization ``(alpha, beta, gamma, d)``.

    ``alpha`` is a companion matrix with the negated denominator
    coefficients in its last row, ``beta = e_r`` and ``gamma`` holds the
    numerator coefficients in ascending powers of s.
    """

    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray
    d: float = 0.0

    @property
    def r(self):
        return self.alpha.shape[0]

    def to_statespace(self):
        return StateSpace(self.alpha, self.beta, self.gamma, [[self.d]])


def ctrb(a, b):
    """Controllability matrix ``[B, AB, ..., A^{n-1}B]``."""
    n = a.shape[0]
    blocks = [b]
    for _ in range(1, n):
        blocks.append(a @ blocks[-1])
    return np.hstack(blocks) if n else np.zeros((0, b.shape[1]))


def obsv(a, c):
    """Observability matrix ``[C; CA; ...; CA^{n-1}]``."""
    return ctrb(a.T, c.T).T


def is_hurwitz(a, tol=None):
    tol = DEFAULT_TOLERANCES.stability if tol is None else tol
    if a.shape[0] == 0:
        return True
    return bool(np.linalg.eigvals(a).real.max() < -tol)


def controllable_dimension(a, b, tol=None):
    """Dimension of the reachable subspace of ``(a, b)``.

    Uses an orthogonal staircase (block Arnoldi with deflation), which
    stays well conditioned where powers of ``a`` in the Krylov matrix do
    not. New directions with singular value at most ``tol * max(||a||,
    ||b||)`` are dropped.
    """
    tol = DEFAULT_TOLERANCES.rank if tol is None else tol
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n = a.shape[0]
    if n == 0 or b.size == 0:
        return 0
    scale = max(np.linalg.norm(a, 2), np.linalg.norm(b, 2))
    if scale == 0:
        return 0
    u, sv, _ = np.linalg.svd(b, full_matrices=False)
    new = u[:, sv > tol * scale]
    basis = new
    while new.shape[1] and basis.shape[1] < n:
        w = a @ new
        for _ in range(2):
            w = w - basis @ (basis.T @ w)
        u, sv, _ = np.linalg.svd(w, full_matrices=False)
        new = u[:, sv > tol * scale]
        basis = np.hstack([basis, new])
    return min(basis.shape[1], n)


def is_minimal(sys, tol=None):
    """Controllable and observable, by orthogonal staircase reductions."""
    n = sys.n
    if n == 0:
        return True
    return controllable_dimension(sys.a, sys.b, tol) == n and controllable_dimension(sys.a.T, sys.c.T, tol) == n


@dataclass(frozen=True)
class AssumptionReport:
    """Outcome of :func:`validate_assumptions`."""

    hurwitz: bool
    minimal: bool
    c_is_identity_zero: bool
    d_is_zero: bool
    p_diagonal: bool
    details: tuple = ()

    @property
    def all_ok(self):
        return self.hurwitz and self.minimal and self.c_is_identity_zero and self.d_is_zero and self.p_diagonal

    def failures(self):
        names = ("hurwitz", "minimal", "c_is_identity_zero", "d_is_zero", "p_diagonal")
        return [k for k in names if not getattr(self, k)]


def validate_assumptions(sys, tol=None, config=None):
    """Check stability, minimality, output shape and diagonality of V.

    ``p_diagonal`` requires a square input, a diagonal V and no
    identically zero diagonal entry of V.
    """
    from .dsf import is_v_diagonal, relative_degrees

    cfg = config or DEFAULT_TOLERANCES
    tol = cfg.structure if tol is None else tol
    details = []
    hurwitz = is_hurwitz(sys.a, cfg.stability)
    minimal = is_minimal(sys, cfg.rank)
    p = sys.p
    c_ok = sys.n >= p and np.abs(sys.c - manifest_output(p, sys.n - p)).max(initial=0.0) <= tol
    d_ok = np.abs(sys.d).max(initial=0.0) <= tol
    p_diag = False
    if c_ok and d_ok:
        part = PartitionedSystem.from_statespace(sys, tol)
        if sys.m != p:
            details.append("input count differs from manifest count")
        elif not is_v_diagonal(part, tol):
            details.append("V is not diagonal")
        else:
            try:
                relative_degrees(part, tol)
                p_diag = True
            except Exception as exc:  # NonMinimalV
                details.append(str(exc))
    return AssumptionReport(hurwitz, minimal, bool(c_ok), bool(d_ok), p_diag, tuple(details))


def _check_invertible(t, tol=1e-12):
    sv = np.linalg.svd(t, compute_uv=False)
    if sv.size and sv[-1] <= tol * sv[0]:
        raise SingularTransformation("transformation is singular")


def apply_transformation(sys, t):
    """Return ``(T A T^-1, T B, C T^-1, D)``."""
    t = real_matrix(t, "t", shape=(sys.n, sys.n))
    if sys.n == 0:
        return sys
    _check_invertible(t)
    lu = linalg.lu_factor(t)
    a = linalg.lu_solve(lu, (t @ sys.a).T, trans=1).T
    c = linalg.lu_solve(lu, sys.c.T, trans=1).T
    return StateSpace(a, t @ sys.b, c, sys.d)


def permutation_matrix(perm):
    perm = np.asarray(perm, dtype=int)
    k = len(perm)
    pm = np.zeros((k, k))
    pm[np.arange(k), perm] = 1.0
    return pm


def permute_channels(sys, perm):
    """Reorder manifest states and inputs together: new channel k is old ``perm[k]``.

    Keeps ``C = [I 0]``; the DSF transforms to ``Pi Q Pi^T``, ``Pi P Pi^T``.
    """
    p, l = sys.p, sys.n - sys.p
    pi = permutation_matrix(perm)
    ps = linalg.block_diag(pi, np.eye(l))
    pin = pi if sys.m == p else np.eye(sys.m)
    return StateSpace(ps @ sys.a @ ps.T, ps @ sys.b @ pin.T, pi @ sys.c @ ps.T, pi @ sys.d @ pin.T)


def frequency_response(sys, s):
    """Evaluate ``G(s) = C (sI - A)^{-1} B + D`` by a linear solve.

    Raises
    ------
    PoleHit
        If ``s`` is numerically a pole.
    """
    s = complex(s)
    if sys.n == 0:
        return sys.d.astype(complex)
    poles = sys.poles
    scale = max(1.0, abs(s), float(np.abs(poles).max()))
    if np.abs(poles - s).min() <= 1e-12 * scale:
        raise PoleHit(f"s = {s} is a pole")
    x = np.linalg.solve(s * np.eye(sys.n) - sys.a, sys.b.astype(complex))
    return sys.c @ x + sys.d


def freqresp(sys, points):
    """Frequency response at each point of ``points``; shape ``(k, p, m)``."""
    points = np.atleast_1d(points)
    out = np.empty((len(points), sys.p, sys.m), dtype=complex)
    if sys.n == 0:
        out[:] = sys.d
        return out
    # one Hessenberg reduction shared by all points
    h, q = linalg.hessenberg(sys.a, calc_q=True)
    bq = q.T @ sys.b
    cq = sys.c @ q
    eye = np.eye(sys.n)
    poles = sys.poles
    for k, s in enumerate(points):
        s = complex(s)
        scale = max(1.0, abs(s), float(np.abs(poles).max()))
        if np.abs(poles - s).min() <= 1e-12 * scale:
            raise PoleHit(f"s = {s} is a pole")
        out[k] = cq @ np.linalg.solve(s * eye - h, bq) + sys.d
    return out


def transmission_zeros(sys, cutoff=None):
    """Finite generalized eigenvalues of the Rosenbrock pencil.

    Raises
    ------
    NonSquare
        If the transfer matrix is not square.
    """
    if sys.p != sys.m:
        raise NonSquare("transmission zeros need p == m")
    cutoff = DEFAULT_TOLERANCES.zero_cutoff if cutoff is None else cutoff
    n, p = sys.n, sys.p
    if n == 0:
        return np.zeros(0, dtype=complex)
    m = np.block([[sys.a, sys.b], [sys.c, sys.d]])
    e = linalg.block_diag(np.eye(n), np.zeros((p, p)))
    alpha, beta = linalg.eig(m, e, right=False, homogeneous_eigvals=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = alpha / beta
    keep = np.isfinite(z) & (np.abs(z) <= cutoff)
    return np.sort_complex(z[keep])


def is_minimum_phase(sys, tol=None):
    """True iff every transmission zero has real part below ``tol``."""
    tol = 1e-9 if tol is None else tol
    z = transmission_zeros(sys)
    return bool(np.all(z.real < tol))


def _strip(c, tol=0.0):
    c = np.atleast_1d(np.asarray(c, dtype=float))
    nz = np.flatnonzero(np.abs(c) > tol)
    return c[nz[0]:] if nz.size else np.zeros(1)


def _sylvester_matrix(f, g):
    """Sylvester resultant matrix for descending-coefficient polynomials."""
    df, dg = len(f) - 1, len(g) - 1
    size = df + dg
    s = np.zeros((size, size))
    for i in range(dg):
        s[i, i:i + df + 1] = f
    for i in range(df):
        s[dg + i, i:i + dg + 1] = g
    return s


def realize_siso_controllable(num, den, tol=1e-9):
    """Controllable canonical realization of ``num(s)/den(s)``.

    Parameters
    ----------
    num, den : array_like
        Polynomial coefficients in descending powers of s.
    tol : float
        Relative threshold for the coprimeness test.

    Returns
    -------
    SisoRealization

    Raises
    ------
    ImproperFraction
        If ``deg num > deg den``.
    NotCoprime
        If numerator and denominator share a root.
    """
    den = _strip(den)
    num = _strip(num)
    if not np.any(den):
        raise ValueError("denominator is zero")
    r = len(den) - 1
    if len(num) - 1 > r:
        raise ImproperFraction("numerator degree exceeds denominator degree")
    lead = den[0]
    den = den / lead
    num = num / lead
    d = 0.0
    if len(num) - 1 == r:
        d = num[0]
        num = num - d * den
    num = np.concatenate([np.zeros(r + 1 - len(num)), num])[1:] if r else np.zeros(0)
    if r and np.any(num):
        core = _strip(num)
        if len(core) > 1:
            s = _sylvester_matrix(den, core / np.abs(core).max())
            sv = np.linalg.svd(s, compute_uv=False)
            if sv[-1] <= tol * sv[0]:
                raise NotCoprime("numerator and denominator share a root")
    alpha = np.zeros((r, r))
    if r:
        alpha[:-1, 1:] = np.eye(r - 1)
        alpha[-1, :] = -den[::-1][:-1]
    beta = np.zeros((r, 1))
    if r:
        beta[-1, 0] = 1.0
    gamma = num[::-1].reshape(1, r)
    return SisoRealization(_readonly(alpha), _readonly(beta), _readonly(gamma), float(d))
