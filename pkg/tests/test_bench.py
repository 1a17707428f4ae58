import json
import time

import numpy as np
import pytest
import yaml

from banditabc.bench import (
    ExperimentConfig,
    MethodSettings,
    ObservedSpec,
    ReportRow,
    aggregate_rows,
    generate_observed,
    load_config,
    load_observed,
    load_report_rows,
    run_experiment,
    write_report,
)
from banditabc.bench.cli import main
from banditabc.bench.config import config_from_dict
from banditabc.bench.experiment import OUTPUT_ROOT_ENV, rank_report, resolve_output_root
from banditabc.bench.report import render_tables
from banditabc.errors import ConfigError
from banditabc.timing import Stopwatch


def tiny_config_dict(**overrides):
    data = {
        "schema_version": 1,
        "name": "tiny",
        "model": "birth_death",
        "observed": {"n_trajectories": 4, "n_grid_points": 40, "t_end": 8.0},
        "pool_sizes": [4],
        "methods": [
            "mab_eps_first",
            "mab_eps_greedy",
            "uniform_random",
            "static_single",
            "static_l2_topk",
            "static_random_k",
        ],
        "repetitions": 2,
        "seed": 321,
        "settings": {
            "epsilon": 0.5,
            "n_accept": 6,
            "tau": 0.3,
            "max_simulations": 300,
            "calibration_size": 10,
            "k": 2,
        },
    }
    data.update(overrides)
    return data


def write_config(tmp_path, data):
    path = tmp_path / "config.yaml"
    path.write_text(yaml.safe_dump(data))
    return path


class TestConfigParsing:
    def test_shipped_desk_config_parses(self):
        cfg = load_config("configs/desk_vilar.yaml")
        assert cfg.model == "vilar_oscillator"
        assert cfg.pool_sizes == (10,)
        assert "mab_eps_first" in cfg.methods
        assert cfg.observed.n_trajectories == 30
        assert cfg.observed.n_grid_points == 200
        assert cfg.settings.n_accept == 20
        assert cfg.settings.max_simulations == 3000

    def test_shipped_full_scale_config_parses(self):
        cfg = load_config("configs/full_vilar.yaml")
        assert cfg.pool_sizes[0] == 10
        assert 200 in cfg.pool_sizes
        assert cfg.repetitions == 5

    def test_seed_override(self, tmp_path):
        path = write_config(tmp_path, tiny_config_dict())
        cfg = load_config(path, seed_override=999)
        assert cfg.seed == 999

    def test_missing_key_rejected(self):
        data = tiny_config_dict()
        del data["model"]
        with pytest.raises(ConfigError, match="model"):
            config_from_dict(data)

    def test_wrong_schema_version_rejected(self):
        with pytest.raises(ConfigError, match="schema_version"):
            config_from_dict(tiny_config_dict(schema_version=2))

    def test_unknown_method_rejected(self):
        with pytest.raises(ConfigError):
            config_from_dict(tiny_config_dict(methods=["mab_eps_first", "oracle"]))

    def test_static_methods_require_the_bandit_run(self):
        with pytest.raises(ConfigError):
            config_from_dict(tiny_config_dict(methods=["static_single"]))

    def test_unknown_model_rejected(self):
        with pytest.raises(ConfigError):
            config_from_dict(tiny_config_dict(model="brusselator"))

    def test_theta_true_length_checked(self):
        data = tiny_config_dict()
        data["observed"]["theta_true"] = [1.0, 2.0, 3.0]
        with pytest.raises(ConfigError):
            config_from_dict(data)

    def test_unknown_settings_key_rejected(self, tmp_path):
        data = tiny_config_dict()
        data["settings"]["temperature"] = 1.0
        path = write_config(tmp_path, data)
        with pytest.raises(ConfigError):
            load_config(path)

    def test_method_settings_override(self):
        cfg = config_from_dict(
            tiny_config_dict(method_settings={"static_random_k": {"max_simulations": 50}})
        )
        assert cfg.settings_for("static_random_k").max_simulations == 50
        assert cfg.settings_for("static_random_k").n_accept == 6
        assert cfg.settings_for("mab_eps_first").max_simulations == 300

    def test_method_settings_for_unknown_method_rejected(self):
        with pytest.raises(ConfigError):
            config_from_dict(tiny_config_dict(method_settings={"oracle": {"k": 1}}))

    def test_validation_of_counts(self):
        with pytest.raises(ConfigError):
            config_from_dict(tiny_config_dict(repetitions=0))
        with pytest.raises(ConfigError):
            config_from_dict(tiny_config_dict(pool_sizes=[]))
        with pytest.raises(ConfigError):
            config_from_dict(tiny_config_dict(methods=["mab_eps_first", "mab_eps_first"]))

    def test_settings_validation(self):
        with pytest.raises(ConfigError):
            MethodSettings(epsilon=2.0)
        with pytest.raises(ConfigError):
            MethodSettings(n_accept=50, max_simulations=10)
        with pytest.raises(ConfigError):
            MethodSettings(tau=0.0)
        with pytest.raises(ConfigError):
            MethodSettings(calibration_size=1)
        with pytest.raises(ConfigError):
            ObservedSpec(n_trajectories=0, n_grid_points=10, t_end=1.0)


class TestObservedData:
    def test_generation_is_deterministic(self, tmp_path):
        cfg = config_from_dict(tiny_config_dict())
        out_a = generate_observed(cfg, output_root=tmp_path / "a")
        out_b = generate_observed(cfg, output_root=tmp_path / "b")
        for name in ["manifest.json"] + [f"traj_{i:05d}.csv" for i in range(4)]:
            assert (out_a / name).read_bytes() == (out_b / name).read_bytes()

    def test_load_round_trip(self, tmp_path):
        cfg = config_from_dict(tiny_config_dict())
        out = generate_observed(cfg, output_root=tmp_path)
        manifest, values = load_observed(out)
        assert manifest["model"] == "birth_death"
        assert manifest["theta_true"] == [10.0, 1.0]
        assert len(values) == 4
        assert all(v.shape == (40,) for v in values)

    def test_mismatched_dataset_is_refused(self, tmp_path):
        cfg = config_from_dict(tiny_config_dict())
        generate_observed(cfg, output_root=tmp_path)
        changed = tiny_config_dict()
        changed["observed"]["t_end"] = 9.0
        cfg2 = config_from_dict(changed)
        with pytest.raises(ConfigError, match="t_end"):
            run_experiment(cfg2, output_root=tmp_path)

    def test_missing_dataset_raises_on_load(self, tmp_path):
        with pytest.raises(ConfigError):
            load_observed(tmp_path / "nowhere")


@pytest.fixture(scope="module")
def tiny_run(tmp_path_factory):
    """One full sweep shared by the assertions below."""
    root = tmp_path_factory.mktemp("bench")
    cfg = config_from_dict(tiny_config_dict())
    rows, exp_dir = run_experiment(cfg, output_root=root)
    return cfg, rows, exp_dir


class TestExperimentSweep:
    def test_every_cell_succeeds(self, tiny_run):
        cfg, rows, _ = tiny_run
        assert len(rows) == len(cfg.methods) * cfg.repetitions
        for row in rows:
            assert not row.failed, row.error
            assert row.accepted > 0
            assert row.mae is not None and row.mae >= 0.0
            assert row.wall_selection <= row.wall_total

    def test_directory_layout(self, tiny_run):
        cfg, _, exp_dir = tiny_run
        assert (exp_dir / "report.csv").exists()
        assert (exp_dir / "report.json").exists()
        assert (exp_dir / "report.txt").exists()
        assert (exp_dir / "observed" / "manifest.json").exists()
        for rep in range(cfg.repetitions):
            cell = exp_dir / "cells" / f"K004_r{rep:02d}"
            assert (cell / "pool.json").exists()
            for method in cfg.methods:
                assert (cell / method / "run.json").exists()
                assert (cell / method / "accepted.csv").exists()
                assert (cell / method / "ledger.csv").exists()

    def test_static_runs_have_header_only_ledgers(self, tiny_run):
        _, _, exp_dir = tiny_run
        ledger = exp_dir / "cells" / "K004_r00" / "static_single" / "ledger.csv"
        assert ledger.read_text() == "iteration,arm_id,reward,phase\n"
        dynamic = exp_dir / "cells" / "K004_r00" / "mab_eps_first" / "ledger.csv"
        assert len(dynamic.read_text().splitlines()) > 1

    def test_pool_is_shared_across_methods(self, tiny_run):
        _, _, exp_dir = tiny_run
        cell = exp_dir / "cells" / "K004_r00"
        pool_ids = [s["id"] for s in json.loads((cell / "pool.json").read_text())["statistics"]]
        for method in ("mab_eps_first", "static_single", "uniform_random"):
            run = json.loads((cell / method / "run.json").read_text())
            assert [s["id"] for s in run["pool"]] == pool_ids

    def test_methods_share_prior_draws(self, tiny_run):
        # controlled comparison: same run seed means the i-th simulation of
        # every method in a cell uses the same theta and simulator seed
        _, _, exp_dir = tiny_run
        cell = exp_dir / "cells" / "K004_r01"
        runs = {
            m: json.loads((cell / m / "run.json").read_text())
            for m in ("mab_eps_first", "static_single")
        }
        seeds = {m: r["config"]["seed"] for m, r in runs.items()}
        assert seeds["mab_eps_first"] == seeds["static_single"]

    def test_static_subsets_come_from_the_ranking(self, tiny_run):
        _, _, exp_dir = tiny_run
        for rep in range(2):
            cell = exp_dir / "cells" / f"K004_r{rep:02d}"
            run = json.loads((cell / "static_single" / "run.json").read_text())
            topk = json.loads((cell / "static_l2_topk" / "run.json").read_text())
            assert len(run["config"]["subset"]) == 1
            assert topk["config"]["subset"][:1] == run["config"]["subset"]
            assert len(topk["config"]["subset"]) == 2

    def test_report_round_trip(self, tiny_run):
        # wall clock columns are rounded on disk, everything else is exact
        _, rows, exp_dir = tiny_run
        again = load_report_rows(exp_dir)
        assert len(again) == len(rows)
        for a, b in zip(again, rows):
            assert (a.method, a.K, a.repetition) == (b.method, b.K, b.repetition)
            assert a.mae == b.mae
            assert a.total_simulations == b.total_simulations
            assert a.accepted == b.accepted
            assert a.completed == b.completed
            assert a.error == b.error
            assert a.wall_total == pytest.approx(b.wall_total, abs=1e-5)
            assert a.wall_selection == pytest.approx(b.wall_selection, abs=1e-5)

    def test_report_json_contents(self, tiny_run):
        cfg, rows, exp_dir = tiny_run
        doc = json.loads((exp_dir / "report.json").read_text())
        assert doc["experiment"] == cfg.name
        assert doc["seed"] == cfg.seed
        assert len(doc["rows"]) == len(rows)
        assert {a["method"] for a in doc["aggregates"]} == set(cfg.methods)
        assert set(doc["not_implemented"]) == {"AS", "ME"}

    def test_rendered_table_mentions_reserved_columns(self, tiny_run):
        _, _, exp_dir = tiny_run
        text = (exp_dir / "report.txt").read_text()
        assert "AS (not implemented)" in text
        assert "ME (not implemented)" in text
        assert "MAE" in text

    def test_rank_report_lists_cells_and_statistics(self, tiny_run):
        _, _, exp_dir = tiny_run
        text = rank_report(exp_dir)
        assert "K004_r00:" in text
        assert "K004_r01:" in text
        assert "mean reward" in text

    def test_run_is_reproducible_byte_for_byte(self, tiny_run, tmp_path):
        cfg, _, exp_dir = tiny_run
        _, exp_dir2 = run_experiment(cfg, output_root=tmp_path)
        # timing columns in report.csv vary run to run; the sampling
        # artifacts must not
        for rel in [
            "cells/K004_r00/mab_eps_first/accepted.csv",
            "cells/K004_r00/mab_eps_first/ledger.csv",
            "cells/K004_r01/static_random_k/accepted.csv",
            "cells/K004_r01/uniform_random/ledger.csv",
        ]:
            assert (exp_dir / rel).read_bytes() == (exp_dir2 / rel).read_bytes()


class TestFailureIsolation:
    def test_bad_method_leaves_null_row_and_spares_the_rest(self, tmp_path):
        data = tiny_config_dict(
            repetitions=1,
            method_settings={"static_random_k": {"k": 10}},  # pool only has 4 arms
        )
        cfg = config_from_dict(data)
        rows, _ = run_experiment(cfg, output_root=tmp_path)
        by_method = {r.method: r for r in rows}
        bad = by_method["static_random_k"]
        assert bad.failed
        assert "k=10" in bad.error
        assert bad.mae is None
        for method, row in by_method.items():
            if method != "static_random_k":
                assert not row.failed

    def test_aggregates_skip_failed_rows(self):
        rows = [
            ReportRow(method="m", K=4, repetition=0, mae=7.0, wall_total=1.0, wall_selection=0.1),
            ReportRow(method="m", K=4, repetition=1, mae=8.0, wall_total=1.0, wall_selection=0.1),
            ReportRow(method="m", K=4, repetition=2, mae=9.0, wall_total=1.0, wall_selection=0.1),
            ReportRow(method="m", K=4, repetition=3, error="boom"),
        ]
        (agg,) = aggregate_rows(rows)
        assert agg["mae_mean"] == pytest.approx(8.0)
        assert agg["mae_std"] == pytest.approx(1.0)
        assert agg["repetitions"] == 4
        assert agg["valid_repetitions"] == 3

    def test_single_repetition_has_no_std(self):
        rows = [ReportRow(method="m", K=4, repetition=0, mae=7.0)]
        (agg,) = aggregate_rows(rows)
        assert agg["mae_mean"] == 7.0
        assert agg["mae_std"] is None

    def test_report_row_validation(self):
        with pytest.raises(ValueError):
            ReportRow(method="m", K=4, repetition=0, mae=-1.0)
        with pytest.raises(ValueError):
            ReportRow(method="m", K=4, repetition=0, wall_total=1.0, wall_selection=2.0)

    def test_render_tables_with_missing_aggregates(self):
        rows = [ReportRow(method="m", K=4, repetition=0, error="boom")]
        text = render_tables(rows, aggregate_rows(rows))
        assert "-" in text


class TestTiming:
    def test_stopwatch_starts_at_zero(self):
        assert Stopwatch().elapsed == 0.0

    def test_stopwatch_accumulates(self):
        sw = Stopwatch()
        with sw.measure():
            time.sleep(0.01)
        first = sw.elapsed
        assert first >= 0.009
        with sw.measure():
            time.sleep(0.01)
        assert sw.elapsed >= first + 0.009

    def test_stopwatch_keeps_counting_on_exception(self):
        sw = Stopwatch()
        with pytest.raises(RuntimeError):
            with sw.measure():
                raise RuntimeError("boom")
        assert sw.elapsed > 0.0


class TestOutputRoot:
    def test_explicit_argument_wins(self, tmp_path, monkeypatch):
        monkeypatch.setenv(OUTPUT_ROOT_ENV, str(tmp_path / "env"))
        assert resolve_output_root(tmp_path / "arg") == tmp_path / "arg"

    def test_environment_variable(self, tmp_path, monkeypatch):
        monkeypatch.setenv(OUTPUT_ROOT_ENV, str(tmp_path / "env"))
        assert resolve_output_root() == tmp_path / "env"

    def test_default_is_current_directory(self, monkeypatch):
        monkeypatch.delenv(OUTPUT_ROOT_ENV, raising=False)
        assert str(resolve_output_root()) == "."


class TestCli:
    def test_generate_run_report_rank(self, tmp_path, capsys):
        data = tiny_config_dict(
            repetitions=1,
            methods=["mab_eps_first", "static_single", "static_l2_topk"],
        )
        path = write_config(tmp_path, data)
        root = str(tmp_path / "out")

        assert main(["generate-observed", str(path), "--output-root", root]) == 0
        assert "observed dataset written" in capsys.readouterr().out

        assert main(["run", str(path), "--output-root", root]) == 0
        out = capsys.readouterr().out
        assert "3 cells finished (0 failed)" in out
        assert "MAE" in out

        run_dir = str(tmp_path / "out" / "tiny")
        assert main(["report", run_dir]) == 0
        assert "MAE" in capsys.readouterr().out

        assert main(["rank", run_dir]) == 0
        assert "K004_r00:" in capsys.readouterr().out

    def test_missing_config_is_an_error(self, tmp_path, capsys):
        assert main(["run", str(tmp_path / "nope.yaml")]) == 1
        assert "error:" in capsys.readouterr().err

    def test_report_on_missing_directory_is_an_error(self, tmp_path, capsys):
        assert main(["report", str(tmp_path / "nothing")]) == 1
        assert "error:" in capsys.readouterr().err

    def test_rank_on_directory_without_ledgers_is_an_error(self, tmp_path, capsys):
        assert main(["rank", str(tmp_path)]) == 1
        assert "error:" in capsys.readouterr().err

    def test_seed_override_changes_the_run(self, tmp_path):
        data = tiny_config_dict(repetitions=1, methods=["mab_eps_first"])
        path = write_config(tmp_path, data)
        assert main(["run", str(path), "--output-root", str(tmp_path / "a")]) == 0
        assert main(["run", str(path), "--seed", "99", "--output-root", str(tmp_path / "b")]) == 0
        a = (tmp_path / "a" / "tiny" / "cells" / "K004_r00" / "mab_eps_first" / "accepted.csv")
        b = (tmp_path / "b" / "tiny" / "cells" / "K004_r00" / "mab_eps_first" / "accepted.csv")
        assert a.read_bytes() != b.read_bytes()


class TestWriteReport:
    def test_rows_without_runs_round_trip(self, tmp_path):
        rows = [
            ReportRow(method="mab_eps_first", K=10, repetition=0, mae=6.5,
                      total_simulations=100, accepted=20, wall_total=1.25,
                      wall_selection=0.003, completed=True),
            ReportRow(method="uniform_random", K=10, repetition=0, error="boom"),
        ]
        write_report(rows, tmp_path)
        again = load_report_rows(tmp_path)
        assert [r.method for r in again] == ["mab_eps_first", "uniform_random"]
        assert again[0].mae == 6.5
        assert again[0].completed is True
        assert again[1].failed and again[1].error == "boom"
