"""Dynamical structure functions and P-diagonal canonical forms.

For a system with ``C = [I 0]`` and ``D = 0`` write

    W = A12 (sI - A22)^-1 A21 + A11,    V = A12 (sI - A22)^-1 B2 + B1,

and ``Q = (sI - W_D)^-1 (W - W_D)``, ``P = (sI - W_D)^-1 V`` where ``W_D``
is the diagonal of ``W``. Q and P are held as exact state-space
realizations; nothing is fitted.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .config import DEFAULT_TOLERANCES
from .errors import AssumptionViolation, DimensionMismatch, NonMinimalV, ShapeViolation
from .statespace import (
    PartitionedSystem,
    StateSpace,
    apply_transformation,
    ctrb,
    freqresp,
    permute_channels,
)

__all__ = [
    "Dsf",
    "compute_wv",
    "compute_dsf",
    "markov_parameters",
    "is_v_diagonal",
    "relative_degrees",
    "dsf_equal",
    "dsf_consistency",
    "PDiagForm1",
    "PDiagForm2",
    "to_pdiag_form1",
    "to_pdiag_form2",
    "c_preserving_transformation",
]


@dataclass(frozen=True, eq=False)
class Dsf:
    """Dynamical structure function ``(Q, P)``.

    Attributes
    ----------
    q_realization : StateSpace
        p inputs, p outputs.
    p_realization : StateSpace
        m inputs, p outputs.
    meta : dict
        Provenance notes.
    """

    q_realization: StateSpace
    p_realization: StateSpace
    meta: dict = field(default_factory=dict)

    @property
    def p_count(self):
        return self.q_realization.p

    @property
    def m_count(self):
        return self.p_realization.m

    def q(self, s):
        return self.q_realization(s)

    def p(self, s):
        return self.p_realization(s)

    def on_grid(self, omegas):
        """``(Q, P)`` sampled at ``s = i omega``; arrays of shape (k, p, .)."""
        s = 1j * np.asarray(omegas, dtype=float)
        return freqresp(self.q_realization, s), freqresp(self.p_realization, s)

    def with_input_signs(self, signs):
        """DSF ``(Q, P J)`` for the signed identity ``J = diag(signs)``."""
        pr = self.p_realization
        j = np.diag(np.asarray(signs, dtype=float))
        return Dsf(self.q_realization, StateSpace(pr.a, pr.b @ j, pr.c, pr.d @ j), dict(self.meta))

    def permuted(self, perm):
        """DSF of the channel-permuted system (new k is old ``perm[k]``)."""
        idx = np.asarray(perm, dtype=int)
        qr, pr = self.q_realization, self.p_realization
        q = StateSpace(qr.a, qr.b[:, idx], qr.c[idx], qr.d[np.ix_(idx, idx)])
        cols = idx if pr.m == len(idx) else np.arange(pr.m)
        p = StateSpace(pr.a, pr.b[:, cols], pr.c[idx], pr.d[np.ix_(idx, cols)])
        return Dsf(q, p, dict(self.meta))


def compute_wv(part):
    """Realizations ``(A22, A21, A12, A11)`` of W and ``(A22, B2, A12, B1)`` of V."""
    w = StateSpace(part.a22, part.a21, part.a12, part.a11)
    v = StateSpace(part.a22, part.b2, part.a12, part.b1)
    return w, v


def compute_dsf(sys):
    """Dynamical structure function of ``sys``.

    Row i of ``(Q, P)`` is the transfer function from the other manifest
    states and the inputs to ``y_i`` once ``y_i`` and the latent states are
    kept and all other manifest states are treated as inputs. Masking the
    ``y_i`` column of the coupling makes Q exactly hollow.

    Raises
    ------
    ShapeViolation
        Unless ``C = [I 0]`` and ``D = 0``.
    """
    part = PartitionedSystem.from_statespace(sys, tol=1e-9)
    p, l, m = part.p, part.l, part.m
    blocks_a, rows_q, rows_p = [], [], []
    for i in range(p):
        mask = np.ones(p)
        mask[i] = 0.0
        a_i = np.block([
            [part.a11[i:i + 1, i:i + 1], part.a12[i:i + 1]],
            [part.a21[:, i:i + 1], part.a22],
        ])
        bq = np.vstack([part.a11[i:i + 1] * mask, part.a21 * mask])
        bp = np.vstack([part.b1[i:i + 1], part.b2])
        blocks_a.append(a_i)
        rows_q.append(bq)
        rows_p.append(bp)
    a = linalg.block_diag(*blocks_a)
    c = linalg.block_diag(*[np.eye(1, l + 1) for _ in range(p)])
    q_real = StateSpace(a, np.vstack(rows_q), c, np.zeros((p, p)))
    p_real = StateSpace(a, np.vstack(rows_p), c, np.zeros((p, m)))
    return Dsf(q_real, p_real, {"source": "compute_dsf", "n": sys.n})


def markov_parameters(part, count=None):
    """``[B1, A12 B2, A12 A22 B2, ...]`` with ``count`` entries (default l+1)."""
    count = part.l + 1 if count is None else count
    out = [np.array(part.b1)]
    y = np.array(part.b2)
    for _ in range(count - 1):
        out.append(part.a12 @ y)
        y = part.a22 @ y
    return out


def _markov_scales(part, count):
    """Magnitude bounds used to decide whether a Markov entry is zero."""
    nb = np.linalg.norm(np.vstack([part.b1, part.b2]), 2) if part.m else 0.0
    n12 = np.linalg.norm(part.a12, 2) if part.a12.size else 0.0
    n22 = np.linalg.norm(part.a22, 2) if part.a22.size else 0.0
    scales = [max(1.0, nb)]
    for k in range(count - 1):
        scales.append(max(1.0, n12 * nb * max(1.0, n22) ** k))
    return scales


def _offdiag_max(m):
    if m.shape[0] != m.shape[1]:
        return np.inf
    return float(np.abs(m - np.diag(np.diag(m))).max(initial=0.0))


def is_v_diagonal(part, tol=None):
    """Diagonality of V from its first ``l + 1`` Markov parameters.

    V is diagonal iff ``B1`` and ``A12 A22^k B2`` for ``k < l`` are all
    diagonal; higher powers follow by Cayley-Hamilton.
    """
    tol = DEFAULT_TOLERANCES.structure if tol is None else tol
    if part.m != part.p:
        return False
    mk = markov_parameters(part)
    scales = _markov_scales(part, len(mk))
    return all(_offdiag_max(x) <= tol * s for x, s in zip(mk, scales))


def relative_degrees(part, tol=None):
    """Relative degree of each diagonal entry of V.

    Returns 0 when ``B1[i, i] != 0`` and otherwise ``k + 1`` for the first
    nonzero ``(A12 A22^k B2)[i, i]``.

    Raises
    ------
    NonMinimalV
        If some ``V(i, i)`` is identically zero.
    """
    tol = DEFAULT_TOLERANCES.structure if tol is None else tol
    mk = markov_parameters(part)
    scales = _markov_scales(part, len(mk))
    degrees = []
    for i in range(part.p):
        for k, (x, s) in enumerate(zip(mk, scales)):
            if abs(x[i, i]) > tol * s:
                degrees.append(k)
                break
        else:
            raise NonMinimalV(f"V({i},{i}) is identically zero")
    return degrees


def dsf_equal(d1, d2, grid=None, tol=None):
    """Compare two DSFs on a frequency grid.

    True iff ``||Q1 - Q2||_F <= tol (1 + ||Q1||_F)`` and likewise for P at
    every grid point.
    """
    from .spectral import default_grid

    tol = DEFAULT_TOLERANCES.grid if tol is None else tol
    if (d1.p_count, d1.m_count) != (d2.p_count, d2.m_count):
        raise DimensionMismatch("DSFs have different dimensions")
    grid = default_grid() if grid is None else grid
    q1, p1 = d1.on_grid(grid)
    q2, p2 = d2.on_grid(grid)
    for x1, x2 in ((q1, q2), (p1, p2)):
        diff = np.linalg.norm(x1 - x2, axis=(1, 2))
        ref = np.linalg.norm(x1, axis=(1, 2))
        if np.any(diff > tol * (1.0 + ref)):
            return False
    return True


def dsf_consistency(sys, dsf, grid=None):
    """Largest relative residual of ``(I - Q) G = P`` over a frequency grid."""
    from .spectral import default_grid

    grid = default_grid() if grid is None else grid
    s = 1j * np.asarray(grid, dtype=float)
    g = freqresp(sys, s)
    q, p = dsf.on_grid(grid)
    lhs = g - q @ g
    diff = np.linalg.norm(lhs - p, axis=(1, 2))
    ref = 1.0 + np.linalg.norm(g, axis=(1, 2)) + np.linalg.norm(p, axis=(1, 2))
    return float((diff / ref).max(initial=0.0))


def c_preserving_transformation(k, t2):
    """State map ``[[I, 0], [T2 K, T2]]``: output injection then latent basis change."""
    l, p = k.shape
    return np.block([[np.eye(p), np.zeros((p, l))], [t2 @ k, t2]])


def _injection(part, zero_degree):
    """Output injection K cancelling the B2 columns of degree-zero channels."""
    k = np.zeros((part.l, part.p))
    for j in zero_degree:
        k[:, j] = -part.b2[:, j] / part.b1[j, j]
    return k


def _check_assumptions(sys):
    from .statespace import validate_assumptions

    report = validate_assumptions(sys)
    if not (report.c_is_identity_zero and report.d_is_zero):
        raise ShapeViolation("system must have C = [I 0] and D = 0")
    if not report.p_diagonal:
        part = PartitionedSystem.from_statespace(sys, tol=1e-9)
        relative_degrees(part)  # raises NonMinimalV when appropriate
        raise AssumptionViolation("; ".join(report.details) or "V is not diagonal")
    return report


def _stable_order(degrees, key):
    return sorted(range(len(degrees)), key=lambda i: key(degrees[i]))


@dataclass(frozen=True, eq=False)
class PDiagForm1:
    """Realization in P-diagonal form 1.

    ``sys == apply_transformation(permute_channels(original, perm), t)``.
    Channels are ordered with nonzero relative degree first (``p11``),
    then relative degree zero (``p22``). The latent states start with the
    stacked companion blocks of orders ``orders``.
    """

    sys: StateSpace
    t: np.ndarray
    perm: tuple
    p11: int
    p22: int
    orders: tuple
    relative_degrees: tuple

    @property
    def partition(self):
        return PartitionedSystem.from_statespace(self.sys, tol=1e-9)

    @property
    def _r(self):
        return int(sum(self.orders))

    @property
    def a_hat(self):
        return self.partition.a22[:self._r, :self._r]

    @property
    def b_hat(self):
        return self.partition.b2[:self._r, :self.p11]

    @property
    def c_hat(self):
        return self.partition.a12[:self.p11, :self._r]

    @property
    def b22(self):
        return self.partition.b1[self.p11:, self.p11:]


def _krylov_companion(a, b, r):
    """Basis X of the Krylov space of (a, b) with ``a X = X alpha`` in companion form."""
    kc = ctrb(a, b)[:, :r]
    target = np.linalg.matrix_power(a, r) @ b
    coef, *_ = np.linalg.lstsq(kc, target, rcond=None)
    alpha = np.zeros((r, r))
    alpha[:-1, 1:] = np.eye(r - 1)
    alpha[-1, :] = coef.ravel()
    beta = np.zeros((r, 1))
    beta[-1, 0] = 1.0
    kalpha = ctrb(alpha, beta)
    return np.linalg.solve(kalpha.T, kc.T).T, alpha


def to_pdiag_form1(sys, tol=None):
    """Transform ``sys`` into P-diagonal form 1.

    Parameters
    ----------
    sys : StateSpace
        Must satisfy the modelling assumptions (V diagonal in particular).
    tol : float, optional
        Rank tolerance.

    Returns
    -------
    PDiagForm1

    Raises
    ------
    AssumptionViolation, NonMinimalV
    """
    tol = DEFAULT_TOLERANCES.rank if tol is None else tol
    _check_assumptions(sys)
    part = PartitionedSystem.from_statespace(sys, tol=1e-9)
    degrees = relative_degrees(part)
    perm = _stable_order(degrees, lambda d: 0 if d >= 1 else 1)
    degrees = [degrees[i] for i in perm]
    sys_p = permute_channels(sys, perm)
    part = PartitionedSystem.from_statespace(sys_p, tol=1e-9)
    p, l = part.p, part.l
    p11 = sum(1 for d in degrees if d >= 1)
    k = _injection(part, range(p11, p))
    a_t = part.a22 + k @ part.a12
    b_t = part.b2 + k @ part.b1

    blocks, orders = [], []
    for i in range(p11):
        kc = ctrb(a_t, b_t[:, i:i + 1])
        sv = np.linalg.svd(kc, compute_uv=False)
        r = int(np.sum(sv > tol * max(1.0, sv[0]) * l))
        x, _ = _krylov_companion(a_t, b_t[:, i:i + 1], r)
        blocks.append(x)
        orders.append(r)
    vhat = np.hstack(blocks) if blocks else np.zeros((l, 0))
    rsum = vhat.shape[1]
    if rsum and np.linalg.matrix_rank(vhat) < rsum:
        raise AssumptionViolation("channel Krylov spaces are not independent")
    # complement spanning the rest, annihilated by the degree >= 1 output rows
    if rsum < l:
        q, _ = np.linalg.qr(vhat) if rsum else (np.zeros((l, 0)), None)
        resid = np.eye(l) - q @ q.T
        _, _, piv = linalg.qr(resid, pivoting=True)
        sel = np.sort(piv[:l - rsum])
        y = resid[:, sel]
        c1 = part.a12[:p11]
        if rsum:
            y = y - vhat @ np.linalg.pinv(c1 @ vhat) @ (c1 @ y)
        basis = np.hstack([vhat, y])
    else:
        basis = vhat
    t2 = np.linalg.inv(basis) if l else np.zeros((0, 0))
    t = c_preserving_transformation(k, t2)
    out = apply_transformation(sys_p, t)
    out = _snap_form1(out, p11, orders)
    return PDiagForm1(out, t, tuple(perm), p11, p - p11, tuple(orders), tuple(degrees))


def _snap_form1(sys, p11, orders):
    """Set the structural zeros of form 1 exactly after an audit."""
    part = PartitionedSystem.from_statespace(sys, tol=1e-9)
    r = int(sum(orders))
    a12, a22, b1, b2 = (np.array(x) for x in (part.a12, part.a22, part.b1, part.b2))
    mask_a12 = np.zeros_like(a12, dtype=bool)
    mask_a12[:p11, r:] = True
    mask_a12[p11:, :r] = True
    off = 0
    for i, ri in enumerate(orders):
        cols = np.ones(r, dtype=bool)
        cols[off:off + ri] = False
        mask_a12[i, :r] |= cols
        off += ri
    mask_a22 = np.zeros_like(a22, dtype=bool)
    mask_a22[r:, :r] = True
    off = 0
    for ri in orders:
        rows = slice(off, off + ri)
        cols = np.ones(r, dtype=bool)
        cols[off:off + ri] = False
        mask_a22[rows, :r] |= cols
        off += ri
    b1_target = np.diag(np.diag(b1))
    b1_target[:p11] = 0.0
    b2_target = np.zeros_like(b2)
    off = 0
    for i, ri in enumerate(orders):
        b2_target[off + ri - 1, i] = b2[off + ri - 1, i]
        off += ri
    scale = 1.0 + np.abs(sys.a).max() + np.abs(sys.b).max()
    audit = max(
        np.abs(a12[mask_a12]).max(initial=0.0),
        np.abs(a22[mask_a22]).max(initial=0.0),
        np.abs(b1 - b1_target).max(initial=0.0),
        np.abs(b2 - b2_target).max(initial=0.0),
    )
    if audit > 1e-8 * scale:
        raise AssumptionViolation(f"form-1 structure audit failed ({audit:.2e})")
    a12[mask_a12] = 0.0
    a22[mask_a22] = 0.0
    return PartitionedSystem(part.a11, a12, part.a21, a22, b1_target, b2_target).to_statespace()


@dataclass(frozen=True, eq=False)
class PDiagForm2:
    """Realization in P-diagonal form 2.

    Channels are ordered by relative degree: ``p1`` channels of degree at
    least two, ``p2`` of degree one and ``p3`` of degree zero. Latent
    states are ordered ``z1`` (p1), ``z2`` (p2), ``z3`` (p1), ``z4`` (l2).
    ``sys == apply_transformation(permute_channels(original, perm), t)``.
    """

    sys: StateSpace
    t: np.ndarray
    perm: tuple
    p1: int
    p2: int
    p3: int
    k_list: tuple
    relative_degrees: tuple

    @property
    def partition(self):
        return PartitionedSystem.from_statespace(self.sys, tol=1e-9)

    @property
    def p(self):
        return self.p1 + self.p2 + self.p3

    @property
    def l(self):
        return self.sys.n - self.p

    @property
    def l2(self):
        return self.l - 2 * self.p1 - self.p2

    def _rows(self):
        p1, p2 = self.p1, self.p2
        y = (slice(0, p1), slice(p1, p1 + p2), slice(p1 + p2, self.p))
        z = (
            slice(0, p1),
            slice(p1, p1 + p2),
            slice(p1 + p2, 2 * p1 + p2),
            slice(2 * p1 + p2, self.l),
        )
        return y, z

    def _blk(self, name):
        part = self.partition
        y, z = self._rows()
        table = {
            "gamma22": (part.a12, y[1], z[1]),
            "gamma34": (part.a12, y[2], z[3]),
            "b22": (part.b1, y[2], y[2]),
            "alpha14": (part.a22, z[0], z[3]),
            "alpha24": (part.a22, z[1], z[3]),
            "alpha31": (part.a22, z[2], z[0]),
            "alpha34": (part.a22, z[2], z[3]),
            "alpha44": (part.a22, z[3], z[3]),
        }
        m, r, c = table[name]
        return np.array(m[r, c])

    gamma22 = property(lambda self: self._blk("gamma22"))
    gamma34 = property(lambda self: self._blk("gamma34"))
    b22 = property(lambda self: self._blk("b22"))
    alpha14 = property(lambda self: self._blk("alpha14"))
    alpha24 = property(lambda self: self._blk("alpha24"))
    alpha31 = property(lambda self: self._blk("alpha31"))
    alpha34 = property(lambda self: self._blk("alpha34"))
    alpha44 = property(lambda self: self._blk("alpha44"))

    @property
    def latent_slices(self):
        return self._rows()[1]

    @property
    def manifest_slices(self):
        return self._rows()[0]


def _degree_class(d):
    return 0 if d >= 2 else (1 if d == 1 else 2)


def to_pdiag_form2(sys, tol=None):
    """Transform ``sys`` into P-diagonal form 2.

    The latent basis is built from the rows of ``A12`` and their images
    under the injected ``A22``, so that the identity blocks of ``B2`` and
    the output rows ``[0 0 I 0]`` and ``[0 gamma22 0 0]`` hold exactly.

    Returns
    -------
    PDiagForm2

    Raises
    ------
    AssumptionViolation, NonMinimalV
    """
    tol = DEFAULT_TOLERANCES.rank if tol is None else tol
    _check_assumptions(sys)
    part = PartitionedSystem.from_statespace(sys, tol=1e-9)
    degrees = relative_degrees(part)
    perm = _stable_order(degrees, _degree_class)
    degrees = [degrees[i] for i in perm]
    sys_p = permute_channels(sys, perm)
    part = PartitionedSystem.from_statespace(sys_p, tol=1e-9)
    p, l = part.p, part.l
    p1 = sum(1 for d in degrees if d >= 2)
    p2 = sum(1 for d in degrees if d == 1)
    p3 = p - p1 - p2
    l2 = l - 2 * p1 - p2
    if l2 < 0:
        raise AssumptionViolation("latent dimension too small for the relative degrees")
    k = _injection(part, range(p1 + p2, p))
    a_t = part.a22 + k @ part.a12
    b_t = part.b2 + k @ part.b1
    c = part.a12

    k_list = tuple(d - 1 for d in degrees[:p1])
    w1 = []
    for i in range(p1):
        row = c[i] @ np.linalg.matrix_power(a_t, k_list[i])
        w1.append(row / (row @ b_t[:, i]))
    w2 = [c[i] / (c[i] @ b_t[:, i]) for i in range(p1, p1 + p2)]
    w3 = [c[i] for i in range(p1)]
    rows = np.array(w1 + w2 + w3) if w1 + w2 + w3 else np.zeros((0, l))
    # z4: orthogonal to the driven columns and to the z3 rows
    constraint = np.hstack([b_t[:, :p1 + p2], np.array(w3).T if w3 else np.zeros((l, 0))])
    if constraint.shape[1]:
        w4 = linalg.null_space(constraint.T, rcond=tol * l).T
    else:
        w4 = np.eye(l)
    if w4.shape[0] != l2:
        raise AssumptionViolation("could not complete the latent basis")
    t2 = np.vstack([rows, w4]) if l else np.zeros((0, 0))
    if l:
        sv = np.linalg.svd(t2, compute_uv=False)
        if sv[-1] <= 1e-10 * sv[0]:
            raise AssumptionViolation("form-2 latent basis is singular")
    t = c_preserving_transformation(k, t2)
    out = apply_transformation(sys_p, t)
    out = _snap_form2(out, p1, p2, p3)
    return PDiagForm2(out, t, tuple(perm), p1, p2, p3, k_list, tuple(degrees))


def _snap_form2(sys, p1, p2, p3):
    part = PartitionedSystem.from_statespace(sys, tol=1e-9)
    a12, a22, b1, b2 = (np.array(x) for x in (part.a12, part.a22, part.b1, part.b2))
    y1, y2 = slice(0, p1), slice(p1, p1 + p2)
    z1, z2, z3 = slice(0, p1), slice(p1, p1 + p2), slice(p1 + p2, 2 * p1 + p2)
    a12_t = a12.copy()
    a12_t[y1] = 0.0
    a12_t[y1, z3] = np.eye(p1)
    a12_t[y2] = 0.0
    a12_t[y2, z2] = np.diag(np.diag(a12[y2, z2]))
    a22_t = a22.copy()
    a22_t[z3, z1] = np.diag(np.diag(a22[z3, z1]))
    a22_t[z3, z2] = 0.0
    b1_t = np.zeros_like(b1)
    b1_t[p1 + p2:, p1 + p2:] = np.diag(np.diag(b1[p1 + p2:, p1 + p2:]))
    b2_t = np.zeros_like(b2)
    b2_t[:p1 + p2, :p1 + p2] = np.eye(p1 + p2)
    scale = 1.0 + np.abs(sys.a).max() + np.abs(sys.b).max()
    audit = max(np.abs(x - y).max(initial=0.0) for x, y in ((a12, a12_t), (a22, a22_t), (b1, b1_t), (b2, b2_t)))
    if audit > 1e-8 * scale:
        raise AssumptionViolation(f"form-2 structure audit failed ({audit:.2e})")
    return PartitionedSystem(part.a11, a12_t, part.a21, a22_t, b1_t, b2_t).to_statespace()
