"""Experiment orchestration: spec validation, determinism, manifests, sweeps."""

import json

import pytest

from fitwalk.analytic import critical_fitness
from fitwalk.montecarlo import (
    ExperimentSpec,
    RunManifest,
    acceptance_plan,
    run_experiment,
    summary_row,
    sweep,
    SUMMARY_HEADER,
)
from fitwalk.rng import derive_seeds


class TestSpecValidation:
    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            ExperimentSpec(kind="nope")

    def test_p_constraint_named(self):
        with pytest.raises(ValueError, match="1/2 < p < 1"):
            ExperimentSpec(kind="mu", p=0.4, m=10)

    def test_critical_gate(self):
        with pytest.raises(ValueError, match="critical"):
            ExperimentSpec(kind="clt", p=0.6, f=0.6667, n=100, replicas=4)
        # f=None resolves to the exact critical threshold
        spec = ExperimentSpec(kind="clt", p=0.6, n=100, replicas=4)
        assert spec.f == critical_fitness(0.6)

    def test_general_f_allowed_where_meaningful(self):
        ExperimentSpec(kind="mu", p=0.6, f=0.5, m=10)
        ExperimentSpec(kind="recurrence", p=0.6, f=1.0, n=10)

    def test_fitness_dist_forces_full_mode(self):
        spec = ExperimentSpec(kind="fitness-dist", p=0.6, n=10)
        assert spec.mode == "full"


class TestDeterminism:
    def test_same_spec_byte_identical_outputs(self, tmp_path):
        spec = ExperimentSpec(kind="clt", p=0.6, n=20_000, replicas=50, quick=True)
        dir_a = tmp_path / "a"
        dir_b = tmp_path / "b"
        res_a = run_experiment(spec, outdir=dir_a)
        res_b = run_experiment(spec, outdir=dir_b)
        for name in ("normalized_delta.txt", "reports.json"):
            assert (dir_a / name).read_bytes() == (dir_b / name).read_bytes()
        assert res_a.manifest.digests == res_b.manifest.digests
        assert res_a.manifest.verify(dir_a)
        assert res_b.manifest.verify(dir_b)

    def test_manifest_round_trip(self, tmp_path):
        spec = ExperimentSpec(kind="mu", p=0.6, m=5000, quick=True)
        result = run_experiment(spec, outdir=tmp_path)
        manifest = RunManifest.read(tmp_path / "manifest.json")
        assert manifest.spec["kind"] == "mu"
        assert manifest.spec["master_seed"] == spec.master_seed
        assert manifest.seeds == result.manifest.seeds
        assert manifest.verify(tmp_path)
        assert manifest.version
        assert manifest.generator.startswith("splitmix64")

    def test_rerun_from_manifest_reproduces_outputs(self, tmp_path):
        spec = ExperimentSpec(kind="clt", p=0.6, n=5000, replicas=20, quick=True)
        dir_a = tmp_path / "a"
        run_experiment(spec, outdir=dir_a)
        replayed = RunManifest.read(dir_a / "manifest.json").to_spec()
        assert replayed == spec
        dir_b = tmp_path / "b"
        run_experiment(replayed, outdir=dir_b)
        assert (dir_a / "normalized_delta.txt").read_bytes() == (
            dir_b / "normalized_delta.txt"
        ).read_bytes()

    def test_manifest_seeds_match_derivation(self):
        spec = ExperimentSpec(kind="clt", p=0.6, n=1000, replicas=8, quick=True)
        result = run_experiment(spec)
        assert result.manifest.seeds == [
            int(s) for s in derive_seeds(spec.master_seed, 8)
        ]


class TestDegenerateRuns:
    def test_insufficient_data_marker(self):
        result = run_experiment(ExperimentSpec(kind="clt", p=0.6, n=0, replicas=1))
        assert len(result.reports) == 1
        assert result.reports[0].note == "insufficient-data"
        assert not result.passed

    def test_mu_zero_excursions(self):
        result = run_experiment(ExperimentSpec(kind="mu", p=0.6, m=0))
        assert result.reports[0].note == "insufficient-data"


class TestSweep:
    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            sweep([])

    def test_mu_sweep_across_p(self, tmp_path):
        specs = [
            ExperimentSpec(kind="mu", p=p, m=100_000, quick=True)
            for p in (0.55, 0.6, 0.75)
        ]
        results, csv_text = sweep(specs, outdir=tmp_path)
        lines = csv_text.strip().split("\n")
        assert lines[0] == SUMMARY_HEADER
        assert len(lines) == 4
        assert all(line.endswith("pass") for line in lines[1:])
        assert (tmp_path / "summary.csv").exists()

    def test_recurrence_classification_sweep(self):
        f_c = critical_fitness(0.6)
        specs = [
            ExperimentSpec(kind="recurrence", p=0.6, f=f, n=200_000, quick=True)
            for f in (0.5 * f_c, f_c, 0.9)
        ]
        results, _ = sweep(specs)
        regimes = [res.reports[0].note for res in results]
        assert "positive-recurrent" in regimes[0]
        assert "null-recurrent" in regimes[1]
        assert "transient" in regimes[2]
        assert all(res.passed for res in results)

    def test_continue_on_error(self):
        good = ExperimentSpec(kind="mu", p=0.6, m=1000, quick=True)
        results, csv_text = sweep([good, good], continue_on_error=True)
        assert len(results) == 2
        assert csv_text.count("\n") == 3


def test_summary_row_shape():
    result = run_experiment(ExperimentSpec(kind="mu", p=0.6, m=2000, quick=True))
    row = summary_row(result)
    assert row.split(",")[0] == "mu"
    assert row.split(",")[-1] in ("pass", "fail")


def test_acceptance_plan_wellformed():
    for quick in (False, True):
        plan = acceptance_plan(quick=quick)
        labels = [label for label, _ in plan]
        assert len(labels) == len(set(labels))
        kinds = {spec.kind for _, spec in plan}
        assert kinds == {
            "clt", "fitness-dist", "mu", "drift", "stable", "lil",
            "sandwich", "recurrence", "correction",
        }
        seeds = [spec.master_seed for _, spec in plan]
        assert len(seeds) == len(set(seeds))
        for _, spec in plan:
            assert spec.quick is quick


def test_reports_json_written(tmp_path):
    spec = ExperimentSpec(kind="mu", p=0.6, m=2000, quick=True)
    run_experiment(spec, outdir=tmp_path)
    payload = json.loads((tmp_path / "reports.json").read_text())
    assert payload[0]["name"] == "mu-mean"
    assert payload[0]["verdict"] in ("pass", "fail")
    assert "params" in payload[0]
