"""Polynomial displays of transfer matrices.

Coefficients are for reporting only: each SISO entry is reduced to a
minimal realization by orthogonal Krylov deflation and expanded with the
Faddeev-LeVerrier recursion.
"""

from dataclasses import dataclass, field

import numpy as np

from .statespace import freqresp

__all__ = [
    "faddeev_leverrier",
    "minimal_siso",
    "siso_coefficients",
    "RationalEntry",
    "rational_matrix",
    "format_poly",
    "ReportBundle",
    "render_dsf",
    "check_rendering",
]


def faddeev_leverrier(a):
    """Characteristic polynomial and adjugate coefficients of ``a``.

    Returns
    -------
    coeffs : ndarray
        ``det(sI - a)`` in descending powers, leading 1.
    adj : list of ndarray
        ``adj(sI - a) = sum_k s^(n-1-k) adj[k]``.
    """
    n = a.shape[0]
    coeffs = [1.0]
    adj = []
    m = np.eye(n)
    for k in range(1, n + 1):
        adj.append(m)
        am = a @ m
        ck = -np.trace(am) / k
        coeffs.append(ck)
        m = am + ck * np.eye(n)
    return np.array(coeffs), adj


def _krylov_basis(a, b, tol):
    """Orthonormal basis of the Krylov space of (a, b) with deflation."""
    n = a.shape[0]
    scale = max(1.0, np.linalg.norm(a, 2))
    v = b.ravel().astype(float)
    basis = []
    ref = np.linalg.norm(v)
    if ref == 0:
        return np.zeros((n, 0))
    for _ in range(n):
        for _ in range(2):
            for q in basis:
                v = v - (q @ v) * q
        nv = np.linalg.norm(v)
        if nv <= tol * ref * scale ** len(basis):
            break
        q = v / nv
        basis.append(q)
        v = a @ q
        ref = max(ref, np.linalg.norm(v))
    return np.array(basis).T if basis else np.zeros((n, 0))


def minimal_siso(a, b, c, tol=1e-10):
    """Controllable and observable part of a SISO realization."""
    v = _krylov_basis(a, b, tol)
    a1, b1, c1 = v.T @ a @ v, v.T @ b, c @ v
    if a1.shape[0] == 0:
        return a1, b1, c1
    w = _krylov_basis(a1.T, c1.T, tol)
    return w.T @ a1 @ w, w.T @ b1, c1 @ w


def siso_coefficients(a, b, c, d=0.0, tol=1e-10):
    """Numerator and denominator, descending powers, of ``c (sI-a)^-1 b + d``.

    Numerator coefficients below ``1e-10`` times the largest one are pruned
    to zero; a numerator below ``1e-12`` times the denominator is dropped.
    """
    am, bm, cm = minimal_siso(np.asarray(a, float), np.asarray(b, float).reshape(-1, 1),
                              np.asarray(c, float).reshape(1, -1), tol)
    r = am.shape[0]
    den, adj = faddeev_leverrier(am)
    num = np.zeros(r + 1)
    for k, m in enumerate(adj):
        num[k + 1] = (cm @ m @ bm).item()
    num = num + float(np.asarray(d).reshape(-1)[0]) * den
    lead = np.abs(num).max(initial=0.0)
    if lead <= 1e-12 * np.abs(den).max():
        # roundoff left by an entry that is zero
        return np.zeros(1), np.ones(1)
    num[np.abs(num) < 1e-10 * lead] = 0.0
    nz = np.flatnonzero(num)
    num = num[nz[0]:] if nz.size else np.zeros(1)
    return num, den


def _fmt(x, digits):
    return f"{x:.{digits}g}"


def format_poly(coeffs, digits=4, var="s"):
    """Human readable polynomial, e.g. ``s^2 + 4 s + 27``."""
    coeffs = np.asarray(coeffs, float)
    deg = len(coeffs) - 1
    terms = []
    for k, c in enumerate(coeffs):
        if c == 0:
            continue
        power = deg - k
        mag = abs(c)
        if power == 0:
            body = _fmt(mag, digits)
        else:
            mono = var if power == 1 else f"{var}^{power}"
            body = mono if np.isclose(mag, 1.0, rtol=0, atol=10.0 ** -(digits + 2)) else f"{_fmt(mag, digits)} {mono}"
        sign = "-" if c < 0 else "+"
        terms.append((sign, body))
    if not terms:
        return "0"
    first_sign, first = terms[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


@dataclass(frozen=True)
class RationalEntry:
    """One transfer function ``num/den`` with descending coefficients."""

    num: np.ndarray
    den: np.ndarray

    def __call__(self, s):
        return np.polyval(self.num, s) / np.polyval(self.den, s)

    @property
    def is_zero(self):
        return not np.any(self.num)

    @property
    def zeros(self):
        return np.roots(self.num) if len(self.num) > 1 else np.zeros(0)

    @property
    def poles(self):
        return np.roots(self.den)

    @property
    def gain(self):
        return float(self.num[0]) if len(self.num) else 0.0

    def render(self, digits=4):
        if self.is_zero:
            return "0"
        return f"({format_poly(self.num, digits)}) / ({format_poly(self.den, digits)})"


def _row_blocks(sys):
    """Split a block-diagonal realization with unit-vector output rows by row."""
    a, c = sys.a, sys.c
    blocks = []
    for i in range(sys.p):
        states = np.flatnonzero(np.abs(c[i]) > 0)
        if states.size == 0:
            blocks.append(np.zeros(0, dtype=int))
            continue
        # close the support under the dynamics
        support = set(states.tolist())
        frontier = list(support)
        while frontier:
            j = frontier.pop()
            for k in np.flatnonzero(a[:, j]).tolist() + np.flatnonzero(a[j, :]).tolist():
                if k not in support:
                    support.add(k)
                    frontier.append(k)
        blocks.append(np.array(sorted(support)))
    return blocks


def rational_matrix(sys, tol=1e-10):
    """Rational entries of a transfer matrix as a nested list."""
    blocks = _row_blocks(sys)
    out = []
    for i in range(sys.p):
        idx = blocks[i]
        row = []
        for j in range(sys.m):
            if idx.size == 0:
                row.append(RationalEntry(np.array([sys.d[i, j]]), np.array([1.0])))
                continue
            num, den = siso_coefficients(sys.a[np.ix_(idx, idx)], sys.b[idx, j], sys.c[i, idx], sys.d[i, j], tol)
            row.append(RationalEntry(num, den))
        out.append(row)
    return out


@dataclass
class ReportBundle:
    """Text report with full-precision data behind it."""

    title: str
    sections: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def add(self, heading, body):
        self.sections.append((heading, body))

    def text(self):
        parts = [self.title, "=" * len(self.title)]
        for heading, body in self.sections:
            parts += ["", heading, "-" * len(heading), body]
        return "\n".join(parts) + "\n"


def _matrix_text(entries, name, digits):
    lines = []
    for i, row in enumerate(entries):
        for j, e in enumerate(row):
            lines.append(f"{name}({i + 1},{j + 1}) = {e.render(digits)}")
    return "\n".join(lines)


def render_dsf(dsf, digits=4, bundle=None, label=""):
    """Append Q and P displays to a report bundle."""
    bundle = bundle or ReportBundle("Dynamical structure function")
    q = rational_matrix(dsf.q_realization)
    p = rational_matrix(dsf.p_realization)
    bundle.add(f"Q{label}", _matrix_text(q, "Q", digits))
    bundle.add(f"P{label}", _matrix_text(p, "P", digits))
    bundle.data[f"Q{label}"] = q
    bundle.data[f"P{label}"] = p
    return bundle


def check_rendering(sys, entries, points):
    """Largest relative mismatch between rational entries and the realization."""
    g = freqresp(sys, points)
    worst = 0.0
    for k, s in enumerate(points):
        r = np.array([[e(s) for e in row] for row in entries])
        worst = max(worst, float(np.abs(r - g[k]).max() / (1.0 + np.abs(g[k]).max())))
    return worst
