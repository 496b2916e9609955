"""Enumeration of networks that share an output spectral density.

Two entry points:

* :func:`enumerate_equivalent_networks` starts from a known system, puts
  it in P-diagonal form 2 and solves the homogeneous Riccati equation in
  the trailing latent block of ``S``.
* :func:`reconstruct_from_phi` starts from a positive-real ``Z`` when
  every noise channel has relative degree zero and solves for the state
  covariance directly.

The full-noise helpers treat systems where every state is driven.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, optimize

from .config import DEFAULT_TOLERANCES
from .dsf import (
    Dsf,
    compute_dsf,
    dsf_equal,
    is_v_diagonal,
    markov_parameters,
    relative_degrees,
    to_pdiag_form2,
)
from .errors import (
    AssumptionViolation,
    EmptyDomain,
    MultipleMinimumPhase,
    NoneMinimumPhase,
    NoPositiveDefiniteR,
    NotControllable,
    NotRelativeDegreeZero,
    ShapeViolation,
    SingularTransformation,
)
from .numerics import AreProblem, SolutionKind, enumerate_are_solutions, real_matrix
from .spectral import ResidualReport, default_grid, phi_equal, relative_residual, verify_glover_willems
from .statespace import (
    PartitionedSystem,
    StateSpace,
    apply_transformation,
    controllable_dimension,
    is_minimum_phase,
    manifest_output,
    permutation_matrix,
    permute_channels,
    validate_assumptions,
)

__all__ = [
    "EquivalenceCertificate",
    "NetworkSolution",
    "NetworkSolutionSet",
    "theorem3_problem",
    "enumerate_equivalent_networks",
    "reconstruct_from_phi",
    "classify_minimum_phase_solution",
    "canonical_signs",
    "s_block_deviation",
    "full_noise_verify",
    "full_noise_domain",
    "full_noise_scalar_family",
    "FullNoiseSample",
]


@dataclass(frozen=True, eq=False)
class EquivalenceCertificate:
    """Witnesses ``(S, T, J)`` relating a reference system to a solution.

    ``T`` follows the convention ``A' = T^-1 A T``; ``J`` is the signed
    identity applied to the solution's inputs.
    """

    s: np.ndarray
    t: np.ndarray
    j: np.ndarray
    residuals: ResidualReport


@dataclass(frozen=True, eq=False)
class NetworkSolution:
    """One network with the reference spectral density.

    Attributes
    ----------
    system : StateSpace
    dsf : Dsf
    certificate : EquivalenceCertificate
    parameter : ndarray
        The Riccati solution this network came from (``s22`` or ``R2``).
    minimum_phase : bool
    phi_ok : bool
        Spectral density matches the reference on the standard grid.
    extras : dict
    """

    system: StateSpace
    dsf: Dsf
    certificate: EquivalenceCertificate
    parameter: np.ndarray
    minimum_phase: bool
    phi_ok: bool
    extras: dict = field(default_factory=dict)

    def __iter__(self):
        return iter((self.system, self.dsf, self.certificate))


@dataclass(frozen=True, eq=False)
class NetworkSolutionSet:
    """Networks sharing one spectral density.

    ``are_count`` counts Riccati solutions, ``eq11_count`` those meeting
    the extra linear constraint on ``s22`` and ``pdiag_count`` those for
    which a diagonal-P representative was found. Counts are None when the
    Riccati equation has a continuum of solutions.
    """

    reference: StateSpace
    solutions: list
    kind: SolutionKind
    are_count: int = None
    eq11_count: int = None
    pdiag_count: int = None
    l2: int = 0
    dims: dict = field(default_factory=dict)
    diagnostics: list = field(default_factory=list)

    @property
    def is_continuum(self):
        return self.kind is SolutionKind.CONTINUUM

    def __len__(self):
        return len(self.solutions)


def canonical_signs(sys, tol=None):
    """Signed identity making every leading Markov parameter of ``V(i,i)`` positive."""
    part = PartitionedSystem.from_statespace(sys, tol=1e-9)
    degrees = relative_degrees(part, tol)
    mk = markov_parameters(part)
    signs = [1.0 if mk[d][i, i] > 0 else -1.0 for i, d in enumerate(degrees)]
    return np.diag(signs)


def _with_input_signs(sys, j):
    return StateSpace(sys.a, sys.b @ j, sys.c, sys.d @ j)


def s_block_deviation(s, p, l2):
    """Frobenius norm of ``S`` outside its trailing ``l2 x l2`` block."""
    s = np.array(s, dtype=float)
    n = s.shape[0]
    mask = np.ones_like(s, dtype=bool)
    if l2:
        mask[n - l2:, n - l2:] = False
    return float(np.linalg.norm(s[mask]))


def theorem3_problem(f2):
    """Homogeneous Riccati equation for the trailing block ``s22``.

    ``a = alpha44^T``, ``g = b b^T`` with
    ``b = [gamma34^T B22^-T, alpha14^T, alpha24^T, alpha34^T]``, ``q = 0``
    and quadratic sign -1.

    Raises
    ------
    NotControllable
        If ``(a, b)`` is not controllable, which signals a non-minimal input.
    """
    l2 = f2.l2
    if l2 == 0:
        z = np.zeros((0, 0))
        return AreProblem(z, z, z, -1)
    b22 = f2.b22
    bbar = np.hstack([
        f2.gamma34.T @ np.linalg.inv(b22).T if f2.p3 else np.zeros((l2, 0)),
        f2.alpha14.T,
        f2.alpha24.T,
        f2.alpha34.T,
    ])
    abar = f2.alpha44.T
    if controllable_dimension(abar, bbar, 1e-10) < l2:
        raise NotControllable("Riccati data pair is not controllable")
    return AreProblem(abar, bbar @ bbar.T, np.zeros((l2, l2)), -1)


def _candidate_transformation(f2, s22):
    """Certificate pair ``(S, T)`` for one Riccati solution, with ``t1 = I``."""
    part = f2.partition
    p, l, l2 = f2.p, f2.l, f2.l2
    p12 = f2.p1 + f2.p2
    s2 = np.zeros((l, l))
    if l2:
        s2[l - l2:, l - l2:] = s22
    t1 = np.zeros((l, p))
    if f2.p3:
        b22 = np.diag(f2.b22)
        t1[:, p12:] = s2 @ part.a12[p12:].T / b22**2
    t2 = np.eye(l)
    if l2 and p12:
        t2[l - l2:, :p12] = s22 @ np.hstack([f2.alpha14.T, f2.alpha24.T])
    t = np.block([[np.eye(p), np.zeros((p, l))], [t1, t2]])
    s = linalg.block_diag(np.zeros((p, p)), s2)
    return s, t


def _cayley(theta, q):
    """Rotation ``(I - W)^-1 (I + W)`` for skew ``W`` with upper entries ``theta``."""
    w = np.zeros((q, q))
    w[np.triu_indices(q, 1)] = theta
    w = w - w.T
    inv = np.linalg.inv(np.eye(q) - w)
    return inv @ (np.eye(q) + w), inv


class _OffDiagonalMarkov:
    """Scaled off-diagonal Markov entries of ``(A22 + K A12, B2 U + K B1)`` and their Jacobian.

    The parameters are ``K`` (row-major) followed by the Cayley coordinates of
    the rotation ``U`` acting on the first ``p12`` inputs.
    """

    def __init__(self, part, p12):
        self.part = part
        self.p, self.l, self.p12 = part.p, part.l, p12
        self.nk = self.l * self.p
        self.nq = p12 * (p12 - 1) // 2
        self.iu = np.triu_indices(p12, 1)
        ref = 1.0 + np.linalg.norm(part.a12, 2) * max(1.0, np.linalg.norm(part.b2, 2))
        growth = max(1.0, np.linalg.norm(part.a22, 2))
        self.scales = [ref * growth**k for k in range(self.l)]
        self.mask = ~np.eye(self.p, dtype=bool)

    @property
    def size(self):
        return self.nk + self.nq

    def unpack(self, x):
        k = x[:self.nk].reshape(self.l, self.p)
        u = np.eye(self.p)
        inv = None
        if self.nq:
            u[:self.p12, :self.p12], inv = _cayley(x[self.nk:], self.p12)
        return k, u, inv

    def _u_derivatives(self, u, inv):
        q = self.p12
        out = np.zeros((self.nq, self.p, self.p))
        right = np.eye(q) + u[:q, :q]
        for n, (i, j) in enumerate(zip(*self.iu)):
            dw = np.zeros((q, q))
            dw[i, j], dw[j, i] = 1.0, -1.0
            out[n, :q, :q] = inv @ dw @ right
        return out

    def residual(self, x):
        k, u, _ = self.unpack(x)
        part = self.part
        a = part.a22 + k @ part.a12
        y = part.b2 @ u + k @ part.b1
        out = []
        for scale in self.scales:
            out.append((part.a12 @ y)[self.mask] / scale)
            y = a @ y
        return np.concatenate(out) if out else np.zeros(0)

    def jacobian(self, x):
        k, u, inv = self.unpack(x)
        part = self.part
        l, p = self.l, self.p
        a = part.a22 + k @ part.a12
        y = part.b2 @ u + k @ part.b1
        diag = np.arange(l)
        # d[(i, j)] is the derivative of y with respect to K[i, j]
        dk = np.zeros((l, p, l, p))
        dk[diag, :, diag, :] = part.b1
        d = dk.reshape(self.nk, l, p)
        if self.nq:
            d = np.concatenate([d, np.matmul(part.b2, self._u_derivatives(u, inv))])
        rows = []
        for scale in self.scales:
            rows.append(np.matmul(part.a12, d)[:, self.mask] / scale)
            step = np.matmul(a, d)
            step[:self.nk].reshape(l, p, l, p)[diag, :, diag, :] += part.a12 @ y
            d = step
            y = a @ y
        return np.concatenate(rows, axis=1).T if rows else np.zeros((0, self.size))


def _least_squares(model, x0, tol):
    method = "lm" if model.residual(x0).size >= x0.size else "trf"
    return optimize.least_squares(model.residual, x0, jac=model.jacobian, method=method, xtol=tol,
                                  ftol=tol, gtol=tol, max_nfev=max(100, 10 * (x0.size + 1)))


def _search_diagonal_p(sys, p12, rng, restarts, patience=None):
    """Least-squares search for a C-preserving map that makes V diagonal.

    Parameters are an output injection ``K`` and a rotation of the first
    ``p12`` inputs. Returns ``(system, T_tilde, U, best_residual)`` with
    ``system = None`` when no diagonal representative was found. With
    ``patience`` set, the search stops early once that many restarts have
    ended at the current best (nonzero) cost to 1e-6 relative.
    """
    part = PartitionedSystem.from_statespace(sys, tol=1e-9)
    p, l = part.p, part.l
    model = _OffDiagonalMarkov(part, p12)
    unpack = model.unpack

    # first start: the injection that clears B2 on the degree-0 columns,
    # exact when every channel has relative degree 0
    k0 = np.zeros((l, p))
    b1 = np.diag(part.b1)
    k0[:, p12:] = -part.b2[:, p12:] / b1[p12:]
    best = (np.inf, None)
    repeats = 0
    for attempt in range(max(restarts, 1)):
        if attempt == 0:
            x0 = np.concatenate([k0.ravel(), np.zeros(model.nq)])
        else:
            x0 = 0.5 * rng.standard_normal(model.size)
        try:
            sol = _least_squares(model, x0, 1e-10)
            if np.linalg.norm(sol.fun) < 1e-4:
                # polish near-roots to the precision of the Markov test
                sol = _least_squares(model, sol.x, 1e-15)
        except (ValueError, np.linalg.LinAlgError):
            continue
        cost = float(np.linalg.norm(sol.fun))
        if abs(cost - best[0]) <= 1e-6 * max(cost, best[0]):
            repeats += 1
        elif cost < best[0]:
            best, repeats = (cost, sol.x), 1
        k, u, _ = unpack(sol.x)
        tt = np.block([[np.eye(p), np.zeros((p, l))], [k, np.eye(l)]])
        try:
            cand = apply_transformation(sys, tt)
        except SingularTransformation:
            # injection too large to apply reliably
            continue
        cand = StateSpace(cand.a, cand.b @ u, manifest_output(p, l), np.zeros((p, p)))
        if is_v_diagonal(PartitionedSystem.from_statespace(cand, tol=1e-9)):
            return cand, tt, u, cost
        if patience is not None and repeats >= patience:
            break
    return None, None, None, best[0]


def _build_solution(reference, sys, s, t, j, parameter, grid, tol_cert, extras):
    cert_report = verify_glover_willems(reference, sys, s, t, tol_cert)
    cert = EquivalenceCertificate(s, t, j, cert_report)
    try:
        mp = is_minimum_phase(sys)
    except Exception:
        mp = False
    return NetworkSolution(
        system=sys,
        dsf=compute_dsf(sys),
        certificate=cert,
        parameter=parameter,
        minimum_phase=mp,
        phi_ok=phi_equal(reference, sys, grid),
        extras=extras,
    )


def _dedup_networks(solutions, grid, tol=1e-6):
    kept = []
    for sol in solutions:
        if not any(dsf_equal(sol.dsf, k.dsf, grid, tol) for k in kept):
            kept.append(sol)
    return kept


def enumerate_equivalent_networks(
    sys,
    tol=None,
    *,
    config=None,
    grid=None,
    seed=0,
    restarts=20,
    patience=None,
    max_are_dim=12,
    require_minimum_phase=False,
):
    """All diagonal-P networks with the same spectral density as ``sys``.

    Parameters
    ----------
    sys : StateSpace
        Must satisfy the modelling assumptions.
    tol : float, optional
        Residual tolerance for the Riccati solutions, the linear constraint
        on ``s22`` and the emitted certificates.
    config : Tolerances, optional
    grid : ndarray, optional
        Frequencies for spectral checks (default :func:`default_grid`).
    seed : int
        Seed for the restarts of the diagonal-P search.
    restarts : int
        Number of least-squares starts per Riccati solution.
    patience : int, optional
        Stop restarting once this many starts agree on a nonzero minimum.
    max_are_dim : int
        Largest Riccati dimension enumerated.
    require_minimum_phase : bool
        Emit only networks whose transfer matrix is minimum phase.

    Returns
    -------
    NetworkSolutionSet
        Solutions are expressed in the channel order of ``sys``; the
        reference is the form-2 realization of ``sys`` in that order, and
        certificates relate the reference to each solution.
    """
    cfg = config or DEFAULT_TOLERANCES
    tol = cfg.residual if tol is None else tol
    grid = default_grid() if grid is None else grid
    report = validate_assumptions(sys, config=cfg)
    if not report.all_ok:
        raise AssumptionViolation("assumptions fail: " + ", ".join(report.failures()))
    f2 = to_pdiag_form2(sys)
    problem = theorem3_problem(f2)
    dims = {"p": f2.p, "l": f2.l, "l2": f2.l2, "p1": f2.p1, "p2": f2.p2, "p3": f2.p3}
    are = enumerate_are_solutions(problem, tol, max_are_dim, config=cfg)
    inv = np.argsort(f2.perm)
    reference = permute_channels(f2.sys, inv)
    if are.is_continuum:
        return NetworkSolutionSet(reference, [], SolutionKind.CONTINUUM, l2=f2.l2, dims=dims,
                                  diagnostics=list(are.diagnostics))

    rng = np.random.default_rng(seed)
    pm = linalg.block_diag(permutation_matrix(inv), np.eye(f2.l))
    a34 = f2.alpha34
    p12 = f2.p1 + f2.p2
    diagnostics = list(are.diagnostics)
    eq11 = 0
    found = []
    for idx, s22 in enumerate(are.solutions):
        bound = tol * (1.0 + np.linalg.norm(a34)) * (1.0 + np.linalg.norm(s22))
        if a34.size and np.linalg.norm(a34 @ s22) > bound:
            continue
        eq11 += 1
        s, t = _candidate_transformation(f2, s22)
        a_new = np.linalg.solve(t, f2.sys.a @ t)
        cand = StateSpace(a_new, f2.sys.b, f2.sys.c, f2.sys.d)
        method = "direct"
        if not is_v_diagonal(PartitionedSystem.from_statespace(cand, tol=1e-9)):
            found_sys, tt, u, best = _search_diagonal_p(cand, p12, rng, restarts, patience)
            if found_sys is None:
                diagnostics.append(f"solution {idx}: no diagonal-P representative (best residual {best:.2e})")
                continue
            cand = found_sys
            t = t @ np.linalg.inv(tt)
            method = "search"
        j = canonical_signs(cand)
        cand = _with_input_signs(cand, j)
        out_sys = permute_channels(cand, inv)
        s_o = pm @ s @ pm.T
        t_o = pm @ t @ pm.T
        j_o = permutation_matrix(inv) @ j @ permutation_matrix(inv).T
        sol = _build_solution(reference, out_sys, s_o, t_o, j_o, np.array(s22), grid,
                              max(tol, 1e-8), {"method": method, "index": idx})
        if not sol.phi_ok:
            diagnostics.append(f"solution {idx}: spectral density mismatch, dropped")
            continue
        found.append(sol)
    pdiag = len(found)
    emitted = _dedup_networks(found, grid)
    if require_minimum_phase:
        emitted = [x for x in emitted if x.minimum_phase]
    return NetworkSolutionSet(reference, emitted, SolutionKind.FINITE, are.count, eq11, pdiag,
                              f2.l2, dims, diagnostics)


def _c_block_realization(z):
    """Re-realize ``z`` so that its output matrix is ``[I 0]``."""
    c = z.c
    p, n = c.shape
    if np.allclose(c, manifest_output(p, n - p), atol=1e-12, rtol=0):
        return z
    sv = np.linalg.svd(c, compute_uv=False)
    if sv.size < p or sv[-1] <= 1e-10 * sv[0]:
        raise ShapeViolation("output matrix is not full row rank")
    n_c = linalg.null_space(c).T
    t = np.vstack([c, n_c])
    out = apply_transformation(z, t)
    return StateSpace(out.a, out.b, manifest_output(p, n - p), out.d)


def reconstruct_from_phi(z, tol=None, *, config=None, grid=None, max_are_dim=12):
    """All diagonal-P networks for ``Phi = Z + Z^*`` when ``B1`` is invertible.

    Parameters
    ----------
    z : PositiveRealSystem
        Strictly proper; re-realized with output ``[I 0]`` if needed.
    tol : float, optional

    Returns
    -------
    NetworkSolutionSet
        Solutions sorted by ``trace(R2)``, so the minimum-phase network
        comes first. Certificates relate solution 0 to each solution.

    Raises
    ------
    NotRelativeDegreeZero
        If the noise-gain equation does not give a diagonal positive matrix.
    NoPositiveDefiniteR
        If no Riccati solution gives a positive definite covariance.
    """
    cfg = config or DEFAULT_TOLERANCES
    tol = cfg.residual if tol is None else tol
    grid = default_grid() if grid is None else grid
    zs = _c_block_realization(z.sys)
    p, n = zs.p, zs.n
    l = n - p
    a, bz = zs.a, zs.b
    a11, a12, a21, a22 = a[:p, :p], a[:p, p:], a[p:, :p], a[p:, p:]
    b1, b2 = bz[:p], bz[p:]
    rhs = -(b1 @ a11.T + b2.T @ a12.T + a11 @ b1 + a12 @ b2)
    rhs = 0.5 * (rhs + rhs.T)
    off = np.abs(rhs - np.diag(np.diag(rhs))).max(initial=0.0)
    scale = 1.0 + np.abs(rhs).max(initial=0.0)
    if off > 1e-6 * scale or np.any(np.diag(rhs) <= cfg.pd * scale):
        raise NotRelativeDegreeZero("noise gain equation is not diagonal positive definite")
    b1p = np.diag(np.sqrt(np.diag(rhs)))
    b1p_inv2 = np.diag(1.0 / np.diag(rhs))
    f = b2 @ a11.T + a21 @ b1 + a22 @ b2
    abar = (a22 + f @ b1p_inv2 @ a12).T
    bbar = (np.linalg.inv(b1p) @ a12).T
    qbar = b2 @ a21.T + a21 @ b2.T + f @ b1p_inv2 @ f.T
    problem = AreProblem(abar, bbar @ bbar.T, 0.5 * (qbar + qbar.T), +1)
    are = enumerate_are_solutions(problem, tol, max_are_dim, config=cfg)
    dims = {"p": p, "l": l, "l2": l, "p1": 0, "p2": 0, "p3": p}
    if are.is_continuum:
        return NetworkSolutionSet(zs, [], SolutionKind.CONTINUUM, l2=l, dims=dims, diagnostics=list(are.diagnostics))

    diagnostics = list(are.diagnostics)
    admissible = []
    for r2 in are.solutions:
        r = np.block([[b1, b2.T], [b2, r2]])
        r = 0.5 * (r + r.T)
        lam = np.linalg.eigvalsh(r).min()
        if lam <= cfg.pd:
            if lam > -cfg.pd:
                diagnostics.append(f"borderline covariance (min eigenvalue {lam:.2e}) dropped")
            continue
        admissible.append((float(np.trace(r2)), r2, r))
    if not admissible:
        raise NoPositiveDefiniteR("no Riccati solution gives a positive definite covariance")
    admissible.sort(key=lambda x: x[0])

    systems = []
    for _, r2, r in admissible:
        b2p = -(r2 @ a12.T + f) @ np.linalg.inv(b1p)
        bp = np.vstack([b1p, b2p])
        base = StateSpace(a, bp, manifest_output(p, l), np.zeros((p, p)))
        step6 = np.block([[np.eye(p), np.zeros((p, l))], [-b2p @ np.linalg.inv(b1p), np.eye(l)]])
        moved = apply_transformation(base, step6)
        moved = StateSpace(moved.a, np.vstack([b1p, np.zeros((l, p))]), manifest_output(p, l), np.zeros((p, p)))
        systems.append((r2, r, b2p, step6, moved))

    ref_r2, _, _, ref_step, ref_sys = systems[0]
    solutions = []
    for idx, (r2, r, b2p, step6, moved) in enumerate(systems):
        s = linalg.block_diag(np.zeros((p, p)), ref_r2 - r2)
        t = ref_step @ np.linalg.inv(step6)
        sol = _build_solution(ref_sys, moved, s, t, np.eye(p), r2, grid, max(tol, 1e-8),
                              {"b2_prime": b2p, "r": r, "index": idx})
        if not sol.phi_ok:
            diagnostics.append(f"solution {idx}: spectral density mismatch, dropped")
            continue
        solutions.append(sol)
    return NetworkSolutionSet(ref_sys, solutions, SolutionKind.FINITE, are.count, are.count,
                              len(solutions), l, dims, diagnostics)


def classify_minimum_phase_solution(solution_set):
    """Index of the unique minimum-phase member.

    Raises
    ------
    NoneMinimumPhase, MultipleMinimumPhase
    """
    if solution_set.is_continuum or not solution_set.solutions:
        raise NoneMinimumPhase("solution set is empty or a continuum")
    hits = [i for i, s in enumerate(solution_set.solutions) if s.minimum_phase]
    if not hits:
        raise NoneMinimumPhase("no minimum-phase member")
    if len(hits) > 1:
        raise MultipleMinimumPhase(f"members {hits} are all minimum phase")
    return hits[0]


# full-noise case --------------------------------------------------------------

def _full_noise_blocks(sys, p):
    b = sys.b
    n = sys.n
    if b.shape != (n, n):
        raise AssumptionViolation("full-noise systems drive every state")
    b11, b22 = b[:p, :p], b[p:, p:]
    offblocks = np.abs(b[:p, p:]).max(initial=0.0) + np.abs(b[p:, :p]).max(initial=0.0)
    for blk in (b11, b22):
        if np.abs(blk - np.diag(np.diag(blk))).max(initial=0.0) > 1e-12 or np.any(np.abs(np.diag(blk)) < 1e-12):
            raise AssumptionViolation("noise gains must be diagonal and full rank")
    if offblocks > 1e-12:
        raise AssumptionViolation("noise gain must be block diagonal")
    return b11, b22


def full_noise_verify(sys_a, sys_b, s2, t, tol=None):
    """Check the full-noise equivalence relations for witnesses ``(S2, T)``.

    * ``state``: ``A' = T^-1 A T``
    * ``manifest_noise``: ``B11' B11'^T = B11 B11^T``
    * ``injection``: ``T1 = S2 A12^T B11^-2``
    * ``riccati``: ``S2 A22^T + A22 S2 + Qbar - T1 B11 B11^T T1^T = 0`` with
      ``Qbar = B22 B22^T - T2 B22' B22'^T T2^T``

    Raises
    ------
    AssumptionViolation
        If either system does not have diagonal, full-rank noise gains.
    """
    tol = DEFAULT_TOLERANCES.residual if tol is None else tol
    p = sys_a.p
    n = sys_a.n
    b11, b22 = _full_noise_blocks(sys_a, p)
    b11p, b22p = _full_noise_blocks(sys_b, p)
    s2 = real_matrix(s2, "s2", shape=(n - p, n - p))
    t = real_matrix(t, "t", shape=(n, n))
    t1, t2 = t[p:, :p], t[p:, p:]
    a = sys_a.a
    a12, a22 = a[:p, p:], a[p:, p:]
    w11 = b11 @ b11.T
    qbar = b22 @ b22.T - t2 @ b22p @ b22p.T @ t2.T
    res = {
        "state": relative_residual([sys_b.a], [np.linalg.solve(t, a @ t)]),
        "manifest_noise": relative_residual([b11p @ b11p.T], [w11]),
        "injection": relative_residual([t1], [s2 @ a12.T @ np.linalg.inv(w11)]),
        "riccati": relative_residual([s2 @ a22.T, a22 @ s2, qbar], [t1 @ w11 @ t1.T]),
    }
    return ResidualReport(res, tol, all(v <= tol for v in res.values()))


def full_noise_domain(sys):
    """Open interval of ``theta`` with a real, nonzero ``T2(theta)`` (one latent state).

    ``T2^2 = 1 + (2 a22 theta - beta theta^2) / b22^2`` with
    ``beta = ||B11^-1 A12||^2``.
    """
    p = sys.p
    if sys.n - p != 1:
        raise AssumptionViolation("the scalar family needs exactly one latent state")
    b11, b22 = _full_noise_blocks(sys, p)
    a12 = sys.a[:p, p:]
    a22 = float(sys.a[p, p])
    beta = float(np.sum((np.linalg.inv(b11) @ a12) ** 2))
    bb = float(b22[0, 0] ** 2)
    if beta == 0.0:
        return (-math.inf, math.inf) if a22 == 0 else ((-bb / (2 * a22), math.inf) if a22 > 0 else (-math.inf, -bb / (2 * a22)))
    disc = math.sqrt(a22 * a22 + beta * bb)
    return ((a22 - disc) / beta, (a22 + disc) / beta)


@dataclass(frozen=True, eq=False)
class FullNoiseSample:
    theta: float
    system: StateSpace
    dsf: Dsf
    certificate: EquivalenceCertificate
    phi_ok: bool


def full_noise_scalar_family(sys, theta_samples, tol=None, grid=None):
    """Members of the one-parameter family of a full-noise system with one latent state.

    For each admissible ``theta`` the certificate is ``S2 = theta``,
    ``T1 = theta A12^T B11^-2`` and ``T2 = sqrt(1 + (2 a22 theta - beta
    theta^2)/b22^2)``; the member system is ``(T^-1 A T, B)``.

    Parameters
    ----------
    sys : StateSpace
        Full-noise system (``B`` square, block diagonal, diagonal blocks).
    theta_samples : iterable of float
        Values outside the admissible interval are skipped.

    Returns
    -------
    list of FullNoiseSample

    Raises
    ------
    EmptyDomain
        If no nonzero theta is admissible.
    """
    tol = DEFAULT_TOLERANCES.residual if tol is None else tol
    grid = default_grid() if grid is None else grid
    lo, hi = full_noise_domain(sys)
    if not lo < hi or (lo >= 0 and hi <= 0):
        raise EmptyDomain("no admissible nonzero theta")
    p = sys.p
    b11, b22 = _full_noise_blocks(sys, p)
    a = sys.a
    a12, a22 = a[:p, p:], float(a[p, p])
    beta = float(np.sum((np.linalg.inv(b11) @ a12) ** 2))
    bb = float(b22[0, 0] ** 2)
    out = []
    for theta in theta_samples:
        theta = float(theta)
        if not lo < theta < hi:
            continue
        t2 = math.sqrt(1.0 + (2.0 * a22 * theta - beta * theta**2) / bb)
        t1 = theta * a12.T @ np.linalg.inv(b11 @ b11.T)
        t = np.block([[np.eye(p), np.zeros((p, 1))], [t1, np.array([[t2]])]])
        member = StateSpace(np.linalg.solve(t, a @ t), sys.b, sys.c, sys.d)
        s2 = np.array([[theta]])
        report = full_noise_verify(sys, member, s2, t, tol)
        cert = EquivalenceCertificate(linalg.block_diag(np.zeros((p, p)), s2), t, np.eye(sys.m), report)
        out.append(FullNoiseSample(theta, member, compute_dsf(member), cert, phi_equal(sys, member, grid)))
    return out
