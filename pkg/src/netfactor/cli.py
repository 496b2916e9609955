"""Command-line interface.

Exit codes: 0 success, 1 parse or configuration error, 2 assumption
violation, 3 numerical failure, 4 continuum of solutions, 5 failed
certificate check.
"""

import argparse
import os
import sys
from dataclasses import replace

import numpy as np

from . import io
from .config import tolerances_from_env
from .dsf import compute_dsf, dsf_consistency
from .errors import AssumptionViolation, FileFormatError, NetfactorError
from .fixtures import FIXTURES, fixture_document, fixture_names, load_fixture
from .reconstruct import (
    enumerate_equivalent_networks,
    full_noise_domain,
    full_noise_scalar_family,
    reconstruct_from_phi,
)
from .render import ReportBundle, check_rendering, render_dsf
from .simharness import ExperimentConfig, run_experiment, write_summary_csv, write_trials_csv
from .spectral import default_grid, positive_real_realization, verify_glover_willems
from .statespace import validate_assumptions

__all__ = ["main", "EXIT_OK", "EXIT_PARSE", "EXIT_ASSUMPTION", "EXIT_NUMERIC", "EXIT_CONTINUUM", "EXIT_VERIFY"]

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_ASSUMPTION = 2
EXIT_NUMERIC = 3
EXIT_CONTINUUM = 4
EXIT_VERIFY = 5

DEFAULT_THETAS = (-0.2, -0.1, 0.0, 0.05, 0.09)


class _ParseError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ParseError(message)


def _load_system(arg):
    """System and document from a file path or a built-in fixture name."""
    if os.path.exists(arg):
        doc = io.read_document(arg)
        return io.parse_system(doc), doc
    if arg in FIXTURES:
        return load_fixture(arg)[0], fixture_document(arg)
    raise FileFormatError(f"{arg}: no such file or built-in example")


def _grid(raw):
    if raw is None:
        return default_grid()
    try:
        values = np.array([float(x) for x in raw.split(",") if x.strip()])
    except ValueError as exc:
        raise FileFormatError(f"bad --grid value {raw!r}") from exc
    if values.size == 0 or np.any(values <= 0) or not np.all(np.isfinite(values)):
        raise FileFormatError("--grid needs positive finite frequencies")
    return values


def _matrix_text(m, digits):
    m = np.atleast_2d(np.asarray(m, dtype=float))
    return "\n".join("  ".join(f"{v: .{digits}g}" for v in row) for row in m)


def _require_assumptions(sys, tol):
    report = validate_assumptions(sys, config=tol)
    if not report.all_ok:
        raise AssumptionViolation("assumptions fail: " + ", ".join(report.failures()))


def _emit(args, bundle, files):
    """Print the report or, with ``--out``, write it and the data files."""
    paths = []
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        report = os.path.join(args.out, "report.txt")
        with open(report, "w", encoding="utf-8") as fh:
            fh.write(bundle.text())
        paths.append(report)
        for name, doc in files.items():
            path = os.path.join(args.out, name)
            io.write_document(path, doc)
            paths.append(path)
    if args.quiet:
        for path in paths:
            print(path)
    else:
        sys.stdout.write(bundle.text())


# subcommands ------------------------------------------------------------------

def cmd_dsf(args, tol):
    system, doc = _load_system(args.input)
    _require_assumptions(system, tol)
    grid = _grid(args.grid)
    dsf = compute_dsf(system)
    labels = doc.get("labels")
    bundle = ReportBundle("Dynamical structure function")
    if labels:
        bundle.add("Manifest states", ", ".join(labels))
    render_dsf(dsf, args.precision, bundle)
    consistency = dsf_consistency(system, dsf, grid)
    points = 1j * grid[:10]
    mismatch = max(check_rendering(dsf.q_realization, bundle.data["Q"], points),
                   check_rendering(dsf.p_realization, bundle.data["P"], points))
    bundle.add("Checks", f"consistency residual (I - Q) G - P: {consistency:.3e}\n"
                         f"rendering mismatch: {mismatch:.3e}")
    files = {"q.json": io.system_document(dsf.q_realization),
             "p.json": io.system_document(dsf.p_realization)}
    _emit(args, bundle, files)
    return EXIT_OK


def _solution_section(bundle, k, sol, digits, parameter_name):
    lines = [f"{parameter_name} =", _matrix_text(sol.parameter, digits),
             f"minimum phase: {'yes' if sol.minimum_phase else 'no'}",
             f"spectral density matches: {'yes' if sol.phi_ok else 'no'}",
             f"certificate worst residual: {sol.certificate.residuals.worst:.3e}"]
    if "b2_prime" in sol.extras:
        lines += ["B2' =", _matrix_text(sol.extras["b2_prime"], digits)]
    bundle.add(f"Solution {k}", "\n".join(lines))
    render_dsf(sol.dsf, digits, bundle, label=f" (solution {k})")


def _full_noise(args, tol, system):
    lo, hi = full_noise_domain(system)
    thetas = args.theta if args.theta else DEFAULT_THETAS
    family = full_noise_scalar_family(system, thetas, tol.residual)
    bundle = ReportBundle("Full-noise solution family")
    bundle.add("Solution set", "continuum: yes (one real parameter theta)\n"
                               f"admissible theta interval: ({lo:.6g}, {hi:.6g})")
    rows = ["theta  T2  phi_ok  worst_residual"]
    files = {}
    for k, sample in enumerate(family):
        t2 = sample.certificate.t[-1, -1]
        rows.append(f"{sample.theta:.{args.precision}g}  {t2:.{args.precision}g}  "
                    f"{'yes' if sample.phi_ok else 'no'}  {sample.certificate.residuals.worst:.3e}")
        render_dsf(sample.dsf, args.precision, bundle, label=f" (theta = {sample.theta:g})")
        files[f"member_{k}.json"] = io.system_document(sample.system, extra={"theta": sample.theta})
        files[f"certificate_{k}.json"] = io.certificate_document(
            sample.certificate.s, sample.certificate.t, residuals=sample.certificate.residuals.residuals)
    skipped = [t for t in thetas if not lo < t < hi]
    if skipped:
        rows.append("outside the admissible interval: " + ", ".join(f"{t:g}" for t in skipped))
    bundle.sections.insert(1, ("Sampled members", "\n".join(rows)))
    _emit(args, bundle, files)
    return EXIT_CONTINUUM


def cmd_enumerate(args, tol):
    system, doc = _load_system(args.input)
    if args.full_noise:
        return _full_noise(args, tol, system)
    _require_assumptions(system, tol)
    if args.source == "phi":
        basis = doc.get("phi_basis")
        z = positive_real_realization(system, basis=np.array(basis, dtype=float) if basis else None)
        result = reconstruct_from_phi(z, tol.residual, config=tol)
        parameter_name = "R2"
    else:
        result = enumerate_equivalent_networks(system, tol.residual, config=tol, seed=args.seed,
                                               restarts=args.restarts)
        parameter_name = "s22"
    bundle = ReportBundle("Networks with equal spectral density")
    dims = ", ".join(f"{k} = {v}" for k, v in result.dims.items())
    if result.is_continuum:
        bundle.add("Solution set", f"continuum: yes\n{dims}")
        _emit(args, bundle, {})
        return EXIT_CONTINUUM
    bundle.add("Solution set", f"continuum: no\n{dims}\n"
                               f"Riccati solutions: {result.are_count}\n"
                               f"meeting the linear constraint: {result.eq11_count}\n"
                               f"with diagonal P: {result.pdiag_count}\n"
                               f"distinct networks emitted: {len(result)}")
    files = {}
    for k, sol in enumerate(result.solutions):
        _solution_section(bundle, k, sol, args.precision, parameter_name)
        files[f"solution_{k}.json"] = io.system_document(sol.system, labels=doc.get("labels"))
        cert = sol.certificate
        files[f"certificate_{k}.json"] = io.certificate_document(cert.s, cert.t, cert.j,
                                                                 cert.residuals.residuals)
    if result.diagnostics:
        bundle.add("Diagnostics", "\n".join(result.diagnostics))
    _emit(args, bundle, files)
    return EXIT_OK


def cmd_verify(args, tol):
    sys_a, _ = _load_system(args.first)
    sys_b, _ = _load_system(args.second)
    s, t, _ = io.parse_certificate(io.read_document(args.certificate))
    report = verify_glover_willems(sys_a, sys_b, s, t, tol.residual)
    bundle = ReportBundle("Certificate check")
    bundle.add("Residuals", str(report))
    _emit(args, bundle, {})
    return EXIT_OK if report.passed else EXIT_VERIFY


def cmd_simulate(args, tol):
    doc = io.read_document(args.config)
    if not isinstance(doc, dict):
        raise FileFormatError("config must be a JSON object")
    try:
        cfg = ExperimentConfig.from_dict(doc)
    except (TypeError, ValueError) as exc:
        raise FileFormatError(f"bad config: {exc}") from exc
    overrides = {"tolerances": tol}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.workers is not None:
        overrides["workers"] = args.workers
    cfg = replace(cfg, **overrides)
    result = run_experiment(cfg)
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    trials = os.path.join(out, "trials.csv")
    summary = os.path.join(out, "summary.csv")
    write_trials_csv(result.records, trials)
    write_summary_csv(result.summary, summary)
    if args.quiet:
        print(trials)
        print(summary)
    else:
        lines = ["l2  trials  finite  continuum  mean_are  mean_eq11  mean_pdiag"]
        for row in result.summary:
            lines.append(f"{row['l2']}  {row['trials']}  {row['finite']}  {row['continuum']}  "
                         f"{row['mean_are_count']:.3g}  {row['mean_eq11_count']:.3g}  "
                         f"{row['mean_pdiag_count']:.3g}")
        lines.append(f"continuum fraction: {result.continuum_fraction:.4f}")
        lines.append(f"wrote {trials} and {summary}")
        print("\n".join(lines))
    return EXIT_OK


def cmd_example(args, tol):
    if args.list or not args.name:
        for name in fixture_names():
            print(f"{name}: {FIXTURES[name]['description']}")
        return EXIT_OK
    if args.name not in FIXTURES:
        raise FileFormatError(f"unknown example {args.name!r}; try --list")
    text = io.dumps(fixture_document(args.name))
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, f"{args.name}.json")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(path)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# parser -----------------------------------------------------------------------

def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--tol", type=float, default=None,
                        help="residual and grid tolerance (default: NETFACTOR_TOL or 1e-8)")
    common.add_argument("--precision", type=int, default=4, help="significant figures in reports")
    common.add_argument("--quiet", action="store_true", help="print only the paths of written files")
    common.add_argument("--out", default=None, help="output directory")

    parser = _Parser(prog="netfactor", description="Networks consistent with an output spectral density.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("dsf", parents=[common], help="compute and render (Q, P)")
    p.add_argument("input", help="system file or built-in example name")
    p.add_argument("--grid", default=None, help="comma-separated frequencies for the checks")
    p.set_defaults(func=cmd_dsf)

    p = sub.add_parser("enumerate", parents=[common], help="all networks with the same spectral density")
    p.add_argument("input", help="system file or built-in example name")
    p.add_argument("--from", dest="source", choices=("system", "phi"), default="system")
    p.add_argument("--full-noise", action="store_true", help="sample the full-noise family")
    p.add_argument("--theta", type=float, nargs="+", default=None, help="full-noise samples")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=20)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("verify", parents=[common], help="check an equivalence certificate")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("certificate")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo study from a JSON config")
    p.add_argument("config")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("example", parents=[common], help="write a built-in example system file")
    p.add_argument("name", nargs="?")
    p.add_argument("--list", action="store_true")
    p.set_defaults(func=cmd_example)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        tol = tolerances_from_env()
        if args.tol is not None:
            tol = tol.with_(residual=args.tol, grid=args.tol)
    except _ParseError as exc:
        print(f"netfactor: error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValueError as exc:
        print(f"netfactor: error: bad NETFACTOR_TOL ({exc})", file=sys.stderr)
        return EXIT_PARSE
    try:
        return args.func(args, tol)
    except FileFormatError as exc:
        print(f"netfactor: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except AssumptionViolation as exc:
        print(f"netfactor: assumption violated: {exc}", file=sys.stderr)
        return EXIT_ASSUMPTION
    except (NetfactorError, np.linalg.LinAlgError, ArithmeticError) as exc:
        print(f"netfactor: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
