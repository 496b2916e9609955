"""Random systems under the modelling assumptions and a Monte Carlo study.

Systems are assembled in P-diagonal form 1 from per-channel SISO blocks
with prescribed relative degrees, shifted to be stable, checked for
minimality and then scrambled by a random transformation that keeps
``C = [I 0]``. Each trial owns a random stream derived from
``(seed, trial index)`` so results do not depend on execution order.
"""

import csv
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np
from scipy import linalg

from .config import DEFAULT_TOLERANCES
from .errors import DimensionTooLarge, GenerationExhausted, NetfactorError
from .numerics import hamiltonian_structure
from .statespace import (
    StateSpace,
    apply_transformation,
    is_minimum_phase,
    permute_channels,
    validate_assumptions,
)

__all__ = [
    "SystemDims",
    "ExperimentConfig",
    "TrialRecord",
    "ExperimentResult",
    "random_system",
    "draw_dims",
    "run_trial",
    "run_experiment",
    "summarize",
    "write_trials_csv",
    "write_summary_csv",
]


@dataclass(frozen=True)
class SystemDims:
    """Channel relative degrees and latent dimension.

    Attributes
    ----------
    degrees : tuple of int
        Relative degree of each ``V(i, i)``.
    l : int
        Number of latent states.
    orders : tuple of int or None
        Order of each SISO block (0 for degree-zero channels); defaults to
        the relative degree.
    """

    degrees: tuple
    l: int
    orders: tuple = None

    @property
    def p(self):
        return len(self.degrees)

    @property
    def p1(self):
        return sum(1 for d in self.degrees if d >= 2)

    @property
    def p2(self):
        return sum(1 for d in self.degrees if d == 1)

    @property
    def p3(self):
        return sum(1 for d in self.degrees if d == 0)

    @property
    def l2(self):
        return self.l - 2 * self.p1 - self.p2

    def block_orders(self):
        return tuple(self.orders) if self.orders is not None else tuple(self.degrees)


def _draw(rng, shape, distribution):
    if distribution == "normal":
        return rng.standard_normal(shape)
    if distribution == "integer":
        return rng.integers(-3, 4, size=shape).astype(float)
    raise ValueError(f"unknown distribution {distribution!r}")


def _stable_poly(rng, degree, distribution):
    """Monic polynomial with roots in the open left half plane."""
    roots = []
    while len(roots) < degree:
        if degree - len(roots) >= 2 and rng.random() < 0.5:
            re = -abs(_draw(rng, (), distribution)) - 0.5
            im = abs(_draw(rng, (), distribution)) + 0.5
            roots += [complex(re, im), complex(re, -im)]
        else:
            roots.append(-abs(float(_draw(rng, (), distribution))) - 0.5)
    return np.real(np.poly(roots)) if degree else np.ones(1)


def _form1_system(dims, rng, distribution, minimum_phase):
    p, l = dims.p, dims.l
    orders = dims.block_orders()
    order_of = [o if d >= 1 else 0 for d, o in zip(dims.degrees, orders)]
    r_total = sum(order_of)
    if r_total > l:
        raise ValueError("SISO blocks do not fit in the latent dimension")
    rest = l - r_total
    a11 = _draw(rng, (p, p), distribution)
    a21 = _draw(rng, (l, p), distribution)
    a12 = np.zeros((p, l))
    a22 = np.zeros((l, l))
    b1 = np.zeros((p, p))
    b2 = np.zeros((l, p))
    off = 0
    for i, (d, r) in enumerate(zip(dims.degrees, order_of)):
        if d == 0:
            g = _draw(rng, (), distribution)
            b1[i, i] = g if g != 0 else 1.0
            continue
        den = _stable_poly(rng, r, distribution) if minimum_phase else np.concatenate([[1.0], _draw(rng, r, distribution)])
        nd = r - d
        if minimum_phase:
            num = _stable_poly(rng, nd, distribution) * (abs(_draw(rng, (), distribution)) + 1.0)
        else:
            num = _draw(rng, nd + 1, distribution)
            if num[0] == 0:
                num[0] = 1.0
        alpha = np.zeros((r, r))
        alpha[:-1, 1:] = np.eye(r - 1)
        alpha[-1] = -den[::-1][:-1]
        gamma = np.zeros(r)
        gamma[:nd + 1] = num[::-1]
        a22[off:off + r, off:off + r] = alpha
        b2[off + r - 1, i] = 1.0
        a12[i, off:off + r] = gamma
        off += r
    if rest:
        degree_zero = [i for i, d in enumerate(dims.degrees) if d == 0]
        a12[np.ix_(degree_zero, range(r_total, l))] = _draw(rng, (len(degree_zero), rest), distribution)
        a22[:r_total, r_total:] = _draw(rng, (r_total, rest), distribution)
        a22[r_total:, r_total:] = _draw(rng, (rest, rest), distribution)
    a = np.block([[a11, a12], [a21, a22]])
    b = np.vstack([b1, b2])
    c = np.hstack([np.eye(p), np.zeros((p, l))])
    return a, b, c


def _scramble(sys, rng):
    p, l = sys.p, sys.n - sys.p
    perm = rng.permutation(p)
    sys = permute_channels(sys, perm)
    if l == 0:
        return sys
    q, _ = np.linalg.qr(rng.standard_normal((l, l)))
    t2 = q @ np.diag(np.exp(rng.uniform(-0.5, 0.5, l)))
    # a latent basis change keeps (Q, P); an output injection would not
    t = linalg.block_diag(np.eye(p), t2)
    out = apply_transformation(sys, t)
    return StateSpace(out.a, out.b, np.hstack([np.eye(p), np.zeros((p, l))]), np.zeros((p, p)))


def random_system(dims, rng, *, distribution="normal", margin=0.1, minimum_phase=False,
                  scramble=True, max_tries=100):
    """Random stable, minimal system with diagonal V of the given shape.

    Parameters
    ----------
    dims : SystemDims
    rng : numpy.random.Generator
    distribution : {"normal", "integer"}
        Entry distribution. ``"integer"`` draws from {-3, ..., 3} and uses
        integer stability shifts, which makes repeated Hamiltonian
        eigenvalues (and hence continua) reachable.
    margin : float
        Stability margin enforced by shifting ``A``.
    minimum_phase : bool
        Reject systems whose transfer matrix has right-half-plane zeros.
    scramble : bool
        Apply a random channel permutation and a random latent basis change
        ``blkdiag(I, T2)``, which keeps ``C = [I 0]`` and the DSF.
    max_tries : int

    Raises
    ------
    GenerationExhausted
    """
    for _ in range(max_tries):
        a, b, c = _form1_system(dims, rng, distribution, minimum_phase)
        top = np.linalg.eigvals(a).real.max() if a.size else -1.0
        if top > -margin:
            shift = top + margin
            if distribution == "integer":
                shift = float(np.ceil(shift))
            a = a - shift * np.eye(a.shape[0])
        sys = StateSpace(a, b, c, np.zeros((dims.p, dims.p)))
        if scramble:
            sys = _scramble(sys, rng)
        if not validate_assumptions(sys).all_ok:
            continue
        if minimum_phase and not is_minimum_phase(sys):
            continue
        return sys
    raise GenerationExhausted(f"no admissible system after {max_tries} draws")


@dataclass(frozen=True)
class ExperimentConfig:
    """Monte Carlo study settings.

    Attributes
    ----------
    trials : int
    seed : int
    p_range, l2_range, l_range : tuple of int
        Inclusive ranges for the manifest count, the Riccati dimension and
        the latent dimension.
    degree_weights : tuple of float
        Probabilities of relative degree classes (0, 1, >= 2) per channel.
    distribution : str
    max_are_dim : int
        Trials with a larger Riccati dimension are recorded as skipped.
    restarts : int
        Restarts of the diagonal-P search.
    patience : int or None
        Stop the search once this many restarts agree on a nonzero minimum.
    classify_only : bool
        Only classify the Riccati spectrum (finite or continuum) and skip
        the network enumeration.
    workers : int
        Process count; 1 runs in the calling process.
    """

    trials: int = 100
    seed: int = 0
    p_range: tuple = (2, 6)
    l2_range: tuple = (0, 10)
    l_range: tuple = (0, 16)
    degree_weights: tuple = (0.5, 0.25, 0.25)
    distribution: str = "normal"
    max_are_dim: int = 10
    restarts: int = 20
    patience: int = 3
    classify_only: bool = False
    workers: int = 1
    tolerances: object = DEFAULT_TOLERANCES

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)} - {"tolerances"}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        kw = {k: tuple(v) if isinstance(v, list) else v for k, v in data.items()}
        return cls(**kw)


@dataclass
class TrialRecord:
    """Outcome of one trial; counts are None for continua, skips and errors."""

    trial: int
    seed: int
    status: str
    p: int = 0
    l: int = 0
    l2: int = 0
    p1: int = 0
    p2: int = 0
    p3: int = 0
    are_count: int = None
    eq11_count: int = None
    pdiag_count: int = None
    solutions: int = None
    continuum: bool = False
    s_block_max: float = None
    wall_time: float = 0.0
    message: str = ""

    def key(self):
        d = asdict(self)
        d.pop("wall_time")
        return d


def draw_dims(cfg, rng, max_tries=1000):
    """Random ``SystemDims`` inside the configured ranges."""
    w = np.asarray(cfg.degree_weights, dtype=float)
    w = w / w.sum()
    for _ in range(max_tries):
        p = int(rng.integers(cfg.p_range[0], cfg.p_range[1] + 1))
        classes = rng.choice(3, size=p, p=w)
        l2 = int(rng.integers(cfg.l2_range[0], cfg.l2_range[1] + 1))
        degrees = []
        for cl in classes:
            degrees.append(0 if cl == 0 else (1 if cl == 1 else 2 + int(rng.random() < 0.25)))
        p1 = sum(1 for d in degrees if d >= 2)
        p2 = sum(1 for d in degrees if d == 1)
        l = l2 + 2 * p1 + p2
        if not cfg.l_range[0] <= l <= cfg.l_range[1]:
            continue
        # SISO orders: relative degree plus optional extra numerator dynamics
        orders = []
        room = l - sum(d for d in degrees)
        for d in degrees:
            extra = 0
            if d >= 1 and room > 0 and rng.random() < 0.3:
                extra = 1
                room -= 1
            orders.append(d + extra if d >= 1 else 0)
        if room < 0:
            continue
        return SystemDims(tuple(degrees), l, tuple(orders))
    raise GenerationExhausted("could not draw dimensions inside the configured ranges")


def run_trial(cfg, idx):
    """Run trial ``idx`` of ``cfg`` and return its record."""
    from .reconstruct import enumerate_equivalent_networks, s_block_deviation, theorem3_problem
    from .dsf import to_pdiag_form2

    start = time.perf_counter()
    rng = np.random.default_rng(np.random.SeedSequence([int(cfg.seed), int(idx)]))
    rec = TrialRecord(trial=idx, seed=int(cfg.seed), status="ok")
    try:
        dims = draw_dims(cfg, rng)
        sys = random_system(dims, rng, distribution=cfg.distribution)
        rec.p, rec.l = dims.p, dims.l
        f2 = to_pdiag_form2(sys)
        rec.l2, rec.p1, rec.p2, rec.p3 = f2.l2, f2.p1, f2.p2, f2.p3
        problem = theorem3_problem(f2)
        _, continuum, _ = hamiltonian_structure(problem, cfg.tolerances)
        rec.continuum = bool(continuum)
        if continuum:
            rec.status = "continuum"
        elif cfg.classify_only:
            rec.status = "classified"
        elif problem.n > cfg.max_are_dim:
            rec.status = "skipped"
        else:
            res = enumerate_equivalent_networks(
                sys, config=cfg.tolerances, seed=int(rng.integers(2**31)),
                restarts=cfg.restarts, patience=cfg.patience, max_are_dim=cfg.max_are_dim,
            )
            rec.are_count = res.are_count
            rec.eq11_count = res.eq11_count
            rec.pdiag_count = res.pdiag_count
            rec.solutions = len(res.solutions)
            dev = [s_block_deviation(s.certificate.s, f2.p, f2.l2) for s in res.solutions]
            rec.s_block_max = max(dev) if dev else 0.0
    except DimensionTooLarge as exc:
        rec.status, rec.message = "skipped", str(exc)
    except (NetfactorError, np.linalg.LinAlgError, ValueError) as exc:
        rec.status, rec.message = "error", f"{type(exc).__name__}: {exc}"
    rec.wall_time = time.perf_counter() - start
    return rec


def _run_chunk(args):
    cfg, indices = args
    return [run_trial(cfg, i) for i in indices]


@dataclass
class ExperimentResult:
    records: list
    summary: list = field(default_factory=list)

    @property
    def continuum_fraction(self):
        done = [r for r in self.records if r.status in ("ok", "continuum", "skipped", "classified")]
        return sum(r.continuum for r in done) / len(done) if done else 0.0


def run_experiment(cfg):
    """Run all trials of ``cfg``; per-trial errors are recorded, not raised."""
    indices = list(range(cfg.trials))
    if cfg.workers > 1 and cfg.trials > 1:
        chunks = [indices[k::cfg.workers] for k in range(cfg.workers)]
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            parts = pool.map(_run_chunk, [(cfg, c) for c in chunks])
            records = sorted((r for part in parts for r in part), key=lambda r: r.trial)
    else:
        records = [run_trial(cfg, i) for i in indices]
    return ExperimentResult(records, summarize(records))


def summarize(records):
    """Mean counts and continuum fraction grouped by ``l2``."""
    groups = {}
    for r in records:
        if r.status == "error":
            continue
        groups.setdefault(r.l2, []).append(r)
    rows = []
    for l2 in sorted(groups):
        rs = groups[l2]
        fin = [r for r in rs if r.status == "ok"]

        def mean(attr):
            vals = [getattr(r, attr) for r in fin]
            return float(np.mean(vals)) if vals else float("nan")

        rows.append({
            "l2": l2,
            "trials": len(rs),
            "finite": len(fin),
            "continuum": sum(r.continuum for r in rs),
            "skipped": sum(r.status == "skipped" for r in rs),
            "continuum_fraction": sum(r.continuum for r in rs) / len(rs),
            "mean_are_count": mean("are_count"),
            "mean_eq11_count": mean("eq11_count"),
            "mean_pdiag_count": mean("pdiag_count"),
        })
    return rows


def write_trials_csv(records, path):
    names = [f.name for f in fields(TrialRecord)]
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=names)
        w.writeheader()
        for r in records:
            w.writerow({k: ("" if v is None else v) for k, v in asdict(r).items()})


def write_summary_csv(rows, path):
    names = ["l2", "trials", "finite", "continuum", "skipped", "continuum_fraction",
             "mean_are_count", "mean_eq11_count", "mean_pdiag_count"]
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=names)
        w.writeheader()
        for row in rows:
            w.writerow(row)
