"""Dense linear-algebra kernels.

Lyapunov solving, positive-definiteness tests and exhaustive enumeration
of the real symmetric solutions of a continuous algebraic Riccati
equation through the invariant subspaces of its Hamiltonian matrix.
"""

import itertools
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import linalg

from .config import DEFAULT_TOLERANCES
from .errors import (
    DimensionTooLarge,
    EigensolverFailure,
    NonFiniteMatrix,
    NotSymmetric,
    SingularSylvester,
)

__all__ = [
    "real_matrix",
    "solve_lyapunov",
    "is_positive_definite",
    "AreProblem",
    "AreSolutionSet",
    "SolutionKind",
    "hamiltonian",
    "are_residual",
    "hamiltonian_structure",
    "enumerate_are_solutions",
]


def real_matrix(x, name="matrix", shape=None):
    """Convert to a finite 2-D float array, copying the data.

    Parameters
    ----------
    x : array_like
        Scalar, 2-D array or nested sequence.
    name : str
        Used in error messages.
    shape : tuple of int or None, optional
        Required shape; ``None`` entries are unconstrained.
    """
    m = np.array(x, dtype=float)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonFiniteMatrix(f"{name} has non-finite entries")
    if shape is not None:
        for want, got in zip(shape, m.shape):
            if want is not None and want != got:
                raise ValueError(f"{name} has shape {m.shape}, expected {shape}")
    return m


def _fro(m):
    return float(np.linalg.norm(m)) if m.size else 0.0


def _is_symmetric(m, tol):
    return _fro(m - m.T) <= tol * (1.0 + _fro(m))


def solve_lyapunov(a, q, tol=None):
    """Solve ``a X + X a^T + q = 0``.

    Parameters
    ----------
    a : (n, n) array_like
    q : (n, n) array_like
        Symmetric constant term.
    tol : float, optional
        Relative threshold on ``min |lambda_i + lambda_j|`` below which the
        operator is declared singular.

    Returns
    -------
    x : (n, n) ndarray
        Symmetric solution.

    Raises
    ------
    SingularSylvester
        If ``a`` has eigenvalues summing to zero.
    """
    a = real_matrix(a, "a")
    q = real_matrix(q, "q", shape=a.shape)
    n = a.shape[0]
    if n == 0:
        return np.zeros((0, 0))
    tol = DEFAULT_TOLERANCES.rank if tol is None else tol
    lam = np.linalg.eigvals(a)
    sums = np.abs(lam[:, None] + lam[None, :])
    if sums.min() <= tol * max(1.0, np.abs(lam).max()):
        raise SingularSylvester("a has a pair of eigenvalues summing to zero")
    x = linalg.solve_continuous_lyapunov(a, -q)
    if _is_symmetric(q, 1e-12):
        x = 0.5 * (x + x.T)
    return x


def is_positive_definite(m, tol=None):
    """Return True iff the symmetric matrix ``m`` has all eigenvalues > tol.

    Raises
    ------
    NotSymmetric
        If the asymmetry of ``m`` exceeds ``tol`` relative to its norm.
    """
    m = real_matrix(m, "m")
    tol = DEFAULT_TOLERANCES.pd if tol is None else tol
    if m.shape[0] != m.shape[1]:
        raise ValueError("m must be square")
    if m.size == 0:
        return True
    if _fro(m - m.T) > max(tol, 1e-12) * (1.0 + _fro(m)):
        raise NotSymmetric("matrix is not symmetric")
    return bool(np.linalg.eigvalsh(0.5 * (m + m.T)).min() > tol)


class SolutionKind(str, Enum):
    FINITE = "finite"
    CONTINUUM = "continuum"


@dataclass(frozen=True)
class AreProblem:
    """Symmetric Riccati equation ``XA + A^T X + sign XGX + Q = 0``.

    Attributes
    ----------
    a, g, q : ndarray
        Square coefficients; ``g`` and ``q`` symmetric.
    sign : int
        Sign of the quadratic term, +1 or -1.
    """

    a: np.ndarray
    g: np.ndarray
    q: np.ndarray
    sign: int = -1

    def __post_init__(self):
        a = real_matrix(self.a, "a")
        n = a.shape[0]
        if a.shape != (n, n):
            raise ValueError("a must be square")
        g = real_matrix(self.g, "g", shape=(n, n))
        q = real_matrix(self.q, "q", shape=(n, n))
        for name, m in (("g", g), ("q", q)):
            if not _is_symmetric(m, DEFAULT_TOLERANCES.symmetry):
                raise NotSymmetric(f"{name} is not symmetric")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        for name, m in (("a", a), ("g", 0.5 * (g + g.T)), ("q", 0.5 * (q + q.T))):
            m.setflags(write=False)
            object.__setattr__(self, name, m)

    @property
    def n(self):
        return self.a.shape[0]


@dataclass(frozen=True)
class AreSolutionSet:
    """Result of :func:`enumerate_are_solutions`.

    Attributes
    ----------
    kind : SolutionKind
    solutions : list of ndarray
        Real symmetric solutions, sorted by trace; empty for a continuum.
    hamiltonian_eigenvalues : ndarray
    diagnostics : list of str
        Notes on skipped or refined selections.
    """

    kind: SolutionKind
    solutions: list
    hamiltonian_eigenvalues: np.ndarray
    diagnostics: list = field(default_factory=list)

    @property
    def count(self):
        return len(self.solutions) if self.kind is SolutionKind.FINITE else None

    @property
    def is_continuum(self):
        return self.kind is SolutionKind.CONTINUUM


def hamiltonian(problem):
    """Hamiltonian matrix ``[[A, sign G], [-Q, -A^T]]``."""
    a, g, q = problem.a, problem.g, problem.q
    return np.block([[a, problem.sign * g], [-q, -a.T]])


def are_residual(problem, x):
    """Residual ``XA + A^T X + sign XGX + Q``."""
    return x @ problem.a + problem.a.T @ x + problem.sign * x @ problem.g @ x + problem.q


@dataclass
class _Unit:
    """A cluster of eigenvalues handled as one selectable block."""

    mu: complex
    mult: int
    complex_pair: bool
    vectors: np.ndarray = None  # eigenvector for simple eigenvalues

    @property
    def width(self):
        return 2 if self.complex_pair else 1


def _cluster(evals, radius):
    """Group eigenvalues closer than ``radius`` (single linkage)."""
    k = len(evals)
    parent = list(range(k))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(k):
        for j in range(i + 1, k):
            if abs(evals[i] - evals[j]) <= radius:
                parent[find(i)] = find(j)
    groups = {}
    for i in range(k):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _nullity(h, mu, tol):
    sv = np.linalg.svd(h - mu * np.eye(h.shape[0]), compute_uv=False)
    return int(np.sum(sv <= tol * max(1.0, sv[0])))


def hamiltonian_structure(problem, config=None):
    """Eigen-analysis of the Hamiltonian.

    Returns
    -------
    evals : ndarray
        Hamiltonian eigenvalues.
    continuum : bool
        True iff some eigenvalue has geometric multiplicity above one.
    units : list
        Internal selection units (used by the enumerator).
    """
    cfg = config or DEFAULT_TOLERANCES
    h = hamiltonian(problem)
    if h.size == 0:
        return np.zeros(0, dtype=complex), False, []
    try:
        evals, evecs = linalg.eig(h)
    except (linalg.LinAlgError, ValueError) as exc:
        raise EigensolverFailure(str(exc)) from exc
    scale = max(1.0, float(np.abs(evals).max()))
    groups = _cluster(evals, cfg.cluster * scale)
    continuum = False
    units = []
    for idx in groups:
        mu = complex(np.mean(evals[idx]))
        if len(idx) == 1:
            members = [(evals[idx[0]], 1, evecs[:, idx[0]])]
        else:
            g = _nullity(h, mu, cfg.rank)
            if g >= 2:
                continuum = True
                members = [(mu, len(idx), None)]
            elif g == 1:
                members = [(mu, len(idx), None)]
            else:
                # distinct eigenvalues that merely sit close together
                members = [(evals[i], 1, evecs[:, i]) for i in idx]
        for lam, mult, vec in members:
            if abs(lam.imag) <= cfg.cluster * scale:
                units.append(_Unit(complex(lam.real, 0.0), mult, False, vec))
            elif lam.imag > 0:
                units.append(_Unit(complex(lam), mult, True, vec))
    return evals, continuum, units


def _unit_basis(h, unit, j, cfg):
    """Real orthonormal basis of the ``j``-th chain prefix of a unit."""
    if j == 0:
        return np.zeros((h.shape[0], 0))
    if unit.mult == 1:
        v = unit.vectors.reshape(-1, 1)
    else:
        radius = cfg.cluster * max(1.0, abs(unit.mu)) * 10.0
        mu = unit.mu

        def select(x):
            return abs(x - mu) <= radius

        try:
            _, z, sdim = linalg.schur(h.astype(complex), output="complex", sort=select)
        except (linalg.LinAlgError, ValueError) as exc:
            raise EigensolverFailure(f"Schur reordering failed: {exc}") from exc
        if sdim < unit.mult:
            raise EigensolverFailure("Schur reordering lost part of a cluster")
        v = z[:, :j]
    if unit.complex_pair:
        stacked = np.hstack([v.real, v.imag])
        k = 2 * v.shape[1]
    else:
        # a real eigenvalue may still carry a complex phase in its vectors
        stacked = np.hstack([v.real, v.imag])
        k = v.shape[1]
    u, _, _ = np.linalg.svd(stacked, full_matrices=False)
    return u[:, :k]


def _mirror_pairs(units, cfg):
    """Pair each unit with its Hamiltonian mirror ``-conj(mu)``.

    Returns a list of tuples ``(i,)`` for self-mirrored units and ``(i, k)``
    for mirrored pairs, or None when pairing fails.
    """
    scale = max([1.0] + [abs(u.mu) for u in units])
    radius = 10 * cfg.cluster * scale
    used = set()
    pairs = []
    for i, u in enumerate(units):
        if i in used:
            continue
        target = -u.mu.conjugate()
        if abs(target - u.mu) <= radius:
            used.add(i)
            pairs.append((i,))
            continue
        match = None
        for k, w in enumerate(units):
            if k not in used and k != i and w.complex_pair == u.complex_pair:
                if abs(w.mu - target) <= radius and w.mult == u.mult:
                    match = k
                    break
        if match is None:
            return None
        used.update((i, match))
        pairs.append((i, match))
    return pairs


def _selections_pruned(units, pairs, n):
    """Chain-prefix selections whose subspace can be Lagrangian."""
    choices = []
    for pr in pairs:
        if len(pr) == 1:
            u = units[pr[0]]
            if u.mult % 2:
                return
            choices.append([((pr[0], u.mult // 2),)])
        else:
            i, k = pr
            m = units[i].mult
            choices.append([((i, j), (k, m - j)) for j in range(m + 1)])
    for combo in itertools.product(*choices):
        sel = [0] * len(units)
        for part in combo:
            for idx, j in part:
                sel[idx] = j
        if sum(s * units[i].width for i, s in enumerate(sel)) == n:
            yield tuple(sel)


def _selections_exhaustive(units, n):
    ranges = [range(u.mult + 1) for u in units]
    for sel in itertools.product(*ranges):
        if sum(s * units[i].width for i, s in enumerate(sel)) == n:
            yield sel


def _newton_refine(problem, x, steps=3):
    for _ in range(steps):
        res = are_residual(problem, x)
        ac = problem.a + problem.sign * problem.g @ x
        try:
            delta = linalg.solve_continuous_lyapunov(ac.T, -res)
        except (linalg.LinAlgError, ValueError):
            return x
        x = x + 0.5 * (delta + delta.T)
    return x


def enumerate_are_solutions(problem, tol=None, max_dim=12, *, config=None, exhaustive=False):
    """Enumerate every real symmetric solution of a Riccati equation.

    Solutions are read off from n-dimensional invariant subspaces of the
    Hamiltonian spanned by eigenvectors and Jordan-chain prefixes, with
    conjugate pairs selected jointly.

    Parameters
    ----------
    problem : AreProblem
    tol : float, optional
        Residual bound; a solution is kept when
        ``||res||_F <= tol (1 + ||X||_F)^2``.
    max_dim : int
        Largest admissible state dimension.
    config : Tolerances, optional
    exhaustive : bool
        Try every selection instead of only mirror-balanced ones. The
        result is the same; this mode exists for cross-checking.

    Returns
    -------
    AreSolutionSet

    Raises
    ------
    DimensionTooLarge
        If ``problem.n > max_dim``.
    EigensolverFailure
    """
    cfg = config or DEFAULT_TOLERANCES
    tol = cfg.residual if tol is None else tol
    n = problem.n
    if n > max_dim:
        raise DimensionTooLarge(f"ARE dimension {n} exceeds max_dim={max_dim}")
    if n == 0:
        return AreSolutionSet(SolutionKind.FINITE, [np.zeros((0, 0))], np.zeros(0, dtype=complex))

    evals, continuum, units = hamiltonian_structure(problem, cfg)
    if continuum:
        return AreSolutionSet(SolutionKind.CONTINUUM, [], evals, ["repeated eigenvalue with geometric multiplicity > 1"])

    h = hamiltonian(problem)
    diagnostics = []
    pairs = None if exhaustive else _mirror_pairs(units, cfg)
    if pairs is None:
        if not exhaustive:
            diagnostics.append("mirror pairing failed; using exhaustive selection")
        selections = _selections_exhaustive(units, n)
    else:
        selections = _selections_pruned(units, pairs, n)

    bases = {}
    found = []
    for sel in selections:
        cols = []
        for i, j in enumerate(sel):
            key = (i, j)
            if key not in bases:
                bases[key] = _unit_basis(h, units[i], j, cfg)
            cols.append(bases[key])
        v = np.hstack(cols)
        v1, v2 = v[:n], v[n:]
        sv = np.linalg.svd(v1, compute_uv=False)
        if sv[-1] <= cfg.v1_ratio * sv[0]:
            continue
        x = np.linalg.solve(v1.T, v2.T).T
        if _fro(x - x.T) > 1e-6 * (1.0 + _fro(x)):
            continue
        x = 0.5 * (x + x.T)
        bound = lambda m: tol * (1.0 + _fro(m)) ** 2
        if _fro(are_residual(problem, x)) > bound(x):
            x = _newton_refine(problem, x)
            if _fro(are_residual(problem, x)) > bound(x):
                diagnostics.append(f"selection {sel} dropped: residual above bound")
                continue
            diagnostics.append(f"selection {sel} refined by Newton steps")
        if any(_fro(x - y) <= cfg.dedup * (1.0 + _fro(y)) for y in found):
            continue
        found.append(x)
    found.sort(key=lambda m: (float(np.trace(m)), _fro(m)))
    return AreSolutionSet(SolutionKind.FINITE, found, evals, diagnostics)
