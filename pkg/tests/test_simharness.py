import csv
from dataclasses import asdict

import numpy as np
import pytest

from netfactor.dsf import is_v_diagonal, relative_degrees
from netfactor.simharness import (
    ExperimentConfig,
    SystemDims,
    draw_dims,
    random_system,
    run_experiment,
    run_trial,
    write_summary_csv,
    write_trials_csv,
)
from netfactor.statespace import PartitionedSystem, is_minimum_phase, validate_assumptions

SMALL = dict(trials=12, seed=5, p_range=(2, 3), l2_range=(0, 2), l_range=(0, 6))


def _strip_time(records):
    return [{k: v for k, v in asdict(r).items() if k != "wall_time"} for r in records]


def test_system_dims():
    dims = SystemDims((0, 1, 2, 3), 9)
    assert (dims.p, dims.p1, dims.p2, dims.p3, dims.l2) == (4, 2, 1, 1, 4)
    assert dims.block_orders() == (0, 1, 2, 3)


@pytest.mark.parametrize("distribution", ["normal", "integer"])
def test_random_system_meets_assumptions(distribution):
    rng = np.random.default_rng(1)
    for degrees, l in [((0, 1, 2), 5), ((1, 1), 2), ((3, 0), 5)]:
        sys = random_system(SystemDims(degrees, l), rng, distribution=distribution)
        assert validate_assumptions(sys).all_ok
        part = PartitionedSystem.from_statespace(sys)
        assert is_v_diagonal(part)
        assert sorted(relative_degrees(part)) == sorted(degrees)


def test_minimum_phase_generation():
    rng = np.random.default_rng(2)
    for _ in range(5):
        assert is_minimum_phase(random_system(SystemDims((0, 1), 3), rng, minimum_phase=True))


def test_draw_dims_respects_ranges():
    cfg = ExperimentConfig(**SMALL)
    rng = np.random.default_rng(0)
    for _ in range(50):
        dims = draw_dims(cfg, rng)
        assert 2 <= dims.p <= 3 and 0 <= dims.l2 <= 2 and dims.l <= 6


def test_runs_are_deterministic():
    cfg = ExperimentConfig(**SMALL)
    first, second = run_experiment(cfg), run_experiment(cfg)
    assert _strip_time(first.records) == _strip_time(second.records)
    assert run_trial(cfg, 3).key() == first.records[3].key()


def test_workers_do_not_change_results():
    serial = run_experiment(ExperimentConfig(**SMALL))
    parallel = run_experiment(ExperimentConfig(**SMALL, workers=2))
    assert _strip_time(serial.records) == _strip_time(parallel.records)


def test_record_invariants():
    res = run_experiment(ExperimentConfig(**SMALL))
    assert all(r.status != "error" for r in res.records), [r.message for r in res.records]
    for r in res.records:
        if r.status == "ok":
            assert r.pdiag_count <= r.eq11_count <= r.are_count
            assert r.s_block_max <= 1e-8
            if r.l2 == 0:
                assert r.solutions == 1


def test_classify_only():
    res = run_experiment(ExperimentConfig(**SMALL, classify_only=True))
    assert {r.status for r in res.records} <= {"classified", "continuum", "skipped"}
    assert all(r.pdiag_count is None for r in res.records if r.status == "classified")


def test_empty_run_writes_headers(tmp_path):
    res = run_experiment(ExperimentConfig(trials=0))
    assert res.records == [] and res.summary == [] and res.continuum_fraction == 0.0
    write_trials_csv(res.records, tmp_path / "trials.csv")
    write_summary_csv(res.summary, tmp_path / "summary.csv")
    with open(tmp_path / "trials.csv") as fh:
        rows = list(csv.reader(fh))
    assert len(rows) == 1 and rows[0][0] == "trial"
    assert (tmp_path / "summary.csv").read_text().startswith("l2,")


def test_csv_contents(tmp_path):
    res = run_experiment(ExperimentConfig(**SMALL))
    write_trials_csv(res.records, tmp_path / "trials.csv")
    write_summary_csv(res.summary, tmp_path / "summary.csv")
    with open(tmp_path / "trials.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == SMALL["trials"]
    with open(tmp_path / "summary.csv") as fh:
        summary = list(csv.DictReader(fh))
    assert sum(int(r["trials"]) for r in summary) == sum(r.status != "error" for r in res.records)


def test_config_from_dict():
    cfg = ExperimentConfig.from_dict({"trials": 3, "p_range": [2, 4]})
    assert cfg.trials == 3 and cfg.p_range == (2, 4)
    with pytest.raises(ValueError, match="unknown"):
        ExperimentConfig.from_dict({"trails": 3})


def test_unknown_distribution():
    with pytest.raises(ValueError, match="distribution"):
        random_system(SystemDims((0, 0), 1), np.random.default_rng(0), distribution="cauchy")
