"""Experiment orchestration.

Layout of an experiment directory:

    <output_root>/<name>/
        observed/                 observed trajectories + manifest.json
        cells/K010_r00/           one cell per (pool size, repetition)
            pool.json             the statistic pool shared by the cell
            <method>/run.json     full run record
            <method>/accepted.csv accepted parameter vectors
            <method>/ledger.csv   reward ledger (header-only for static runs)
        report.csv                one row per (method, K, repetition)
        report.json               rows + aggregates
        report.txt                rendered tables

The output root is the current directory unless BANDITABC_OUTPUT_ROOT or
an explicit argument overrides it.

All methods within a cell share the pool, the observed summary, the
calibration, and the run seed, so their prior draws and trajectories
coincide and differences come from the selection policy alone.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np

from ..bandit import BanditConfig, RewardLedger, exploration_budget, rank_arms
from ..engine import Prior, RunConfig, calibrate, mae, make_simulator, posterior_estimate, run_dynamic, run_static
from ..errors import ConfigError
from ..metric import observed_summary
from ..rng import derive_seed, simulation_seeds
from ..simulation import (
    SimulationRequest,
    builtin_model,
    load_trajectory,
    parameter_bounds,
    save_trajectory,
    simulate,
)
from ..summaries import standard_pool, statistic_to_dict
from .config import METHODS, ExperimentConfig
from .report import ReportRow, write_report

OUTPUT_ROOT_ENV = "BANDITABC_OUTPUT_ROOT"


def resolve_output_root(explicit=None) -> Path:
    if explicit is not None:
        return Path(explicit)
    return Path(os.environ.get(OUTPUT_ROOT_ENV, "."))


def experiment_dir(cfg: ExperimentConfig, output_root=None) -> Path:
    return resolve_output_root(output_root) / cfg.experiment_dir_name()


def _observed_seed(cfg: ExperimentConfig) -> int:
    if cfg.observed.seed is not None:
        return int(cfg.observed.seed)
    return derive_seed(cfg.seed, "observed")


def _observed_manifest(cfg: ExperimentConfig, network) -> dict:
    return {
        "schema_version": 1,
        "model": cfg.model,
        "observable": network.observable,
        "n_trajectories": cfg.observed.n_trajectories,
        "n_grid_points": cfg.observed.n_grid_points,
        "t_end": cfg.observed.t_end,
        "theta_true": cfg.theta_true().tolist(),
        "seed": _observed_seed(cfg),
    }


def generate_observed(cfg: ExperimentConfig, output_root=None) -> Path:
    """Simulate the observed dataset at theta_true and persist it."""
    network = builtin_model(cfg.model, cfg.observable)
    theta = cfg.theta_true()
    out = experiment_dir(cfg, output_root) / "observed"
    out.mkdir(parents=True, exist_ok=True)
    seeds = simulation_seeds(_observed_seed(cfg), "observed-sim")
    for i in range(cfg.observed.n_trajectories):
        req = SimulationRequest(
            theta=theta,
            seed=next(seeds),
            t_end=cfg.observed.t_end,
            n_grid_points=cfg.observed.n_grid_points,
        )
        y = simulate(network, req)
        save_trajectory(y.times, y.values, out / f"traj_{i:05d}.csv")
    (out / "manifest.json").write_text(
        json.dumps(_observed_manifest(cfg, network), indent=2) + "\n"
    )
    return out


def load_observed(observed_dir) -> tuple:
    """Read the dataset back: (manifest, list of value arrays)."""
    observed_dir = Path(observed_dir)
    manifest_path = observed_dir / "manifest.json"
    if not manifest_path.exists():
        raise ConfigError(f"no observed dataset at {observed_dir}")
    manifest = json.loads(manifest_path.read_text())
    values = []
    for i in range(manifest["n_trajectories"]):
        _, v = load_trajectory(observed_dir / f"traj_{i:05d}.csv")
        values.append(v)
    return manifest, values


def _ensure_observed(cfg: ExperimentConfig, output_root=None) -> tuple:
    out = experiment_dir(cfg, output_root) / "observed"
    if not (out / "manifest.json").exists():
        generate_observed(cfg, output_root)
    manifest, values = load_observed(out)
    network = builtin_model(cfg.model, cfg.observable)
    expected = _observed_manifest(cfg, network)
    mismatched = [k for k in expected if manifest.get(k) != expected[k]]
    if mismatched:
        raise ConfigError(
            f"observed dataset at {out} does not match the config "
            f"(differs in: {', '.join(mismatched)}); delete it or change output_dir"
        )
    return manifest, values


def _ordered_methods(cfg: ExperimentConfig) -> list:
    # mab_eps_first runs first within each cell: static baselines read its ranking
    return [m for m in METHODS if m in cfg.methods]


def _empty_ledger_csv(path) -> None:
    Path(path).write_text("iteration,arm_id,reward,phase\n")


def _run_cell_method(method, cfg, st, network, pool, prior, obs_summary, norm,
                     run_seed, ranking, subset_seed, extra_config):
    simulate_fn = make_simulator(network, cfg.observed.t_end, cfg.observed.n_grid_points)
    run_cfg = RunConfig(
        n_accept=st.n_accept, tau=st.tau, max_simulations=st.max_simulations, seed=run_seed
    )
    names = network.parameter_names

    if method in ("mab_eps_first", "mab_eps_greedy", "uniform_random"):
        strategy = {
            "mab_eps_first": "epsilon_first",
            "mab_eps_greedy": "epsilon_greedy",
            "uniform_random": "uniform_random",
        }[method]
        bandit_cfg = BanditConfig(
            strategy=strategy,
            epsilon=st.epsilon,
            exploration_budget=exploration_budget(st.epsilon, st.n_accept),
            seed=derive_seed(run_seed, "bandit"),
            record_all=st.record_all,
        )
        return run_dynamic(
            simulate_fn, pool, prior, obs_summary, norm, bandit_cfg, run_cfg,
            parameter_names=names, extra_config=extra_config,
        )

    if method in ("static_single", "static_l2_topk"):
        if ranking is None:
            raise ConfigError("statistic ranking unavailable: the mab_eps_first run failed")
        ranked = [a.arm for a in ranking if a.pulls > 0]
        if method == "static_single":
            subset, combine = ranked[:1], "single"
        else:
            if len(ranked) < st.k:
                raise ConfigError(
                    f"need {st.k} ranked statistics for static_l2_topk, got {len(ranked)}"
                )
            subset, combine = ranked[: st.k], "l2"
    else:  # static_random_k
        if st.k > pool.K:
            raise ConfigError(f"k={st.k} exceeds the pool size {pool.K}")
        rng = np.random.default_rng(subset_seed)
        subset = sorted(int(i) for i in rng.choice(pool.K, size=st.k, replace=False))
        combine = "single" if st.k == 1 else "l2"

    return run_static(
        simulate_fn, pool, subset, combine, prior, obs_summary, norm, run_cfg,
        parameter_names=names, extra_config=extra_config,
    )


def run_experiment(cfg: ExperimentConfig, output_root=None) -> tuple:
    """Run the full sweep; returns (report rows, experiment directory)."""
    exp_dir = experiment_dir(cfg, output_root)
    exp_dir.mkdir(parents=True, exist_ok=True)
    _, obs_values = _ensure_observed(cfg, output_root)

    network = builtin_model(cfg.model, cfg.observable)
    prior = Prior.from_bounds(parameter_bounds(cfg.model))
    truth = cfg.theta_true()
    simulate_fn = make_simulator(network, cfg.observed.t_end, cfg.observed.n_grid_points)
    methods = _ordered_methods(cfg)

    rows = []
    for K in cfg.pool_sizes:
        for rep in range(cfg.repetitions):
            cell_dir = exp_dir / "cells" / f"K{K:03d}_r{rep:02d}"
            cell_dir.mkdir(parents=True, exist_ok=True)
            pool_seed = derive_seed(cfg.seed, f"pool/K{K}/rep{rep}")
            run_seed = derive_seed(cfg.seed, f"run/K{K}/rep{rep}")
            subset_seed = derive_seed(cfg.seed, f"subset/K{K}/rep{rep}")
            calib_seed = derive_seed(cfg.seed, f"calibration/K{K}/rep{rep}")

            try:
                pool = standard_pool(K, pool_seed)
            except Exception as exc:
                for method in methods:
                    rows.append(ReportRow(method=method, K=K, repetition=rep, error=str(exc)))
                continue
            (cell_dir / "pool.json").write_text(
                json.dumps(
                    {
                        "pool_seed": pool_seed,
                        "statistics": [statistic_to_dict(s) for s in pool],
                    },
                    indent=2,
                )
                + "\n"
            )
            obs_summary = observed_summary(pool, obs_values)

            ranking = None
            norm_cache = {}
            for method in methods:
                st = cfg.settings_for(method)
                method_dir = cell_dir / method
                method_dir.mkdir(exist_ok=True)
                try:
                    if st.calibration_size not in norm_cache:
                        norm_cache[st.calibration_size] = calibrate(
                            simulate_fn, prior, pool, obs_summary,
                            st.calibration_size, calib_seed,
                        )
                    norm = norm_cache[st.calibration_size]
                    extra_config = {
                        "experiment": cfg.name,
                        "model": cfg.model,
                        "observable": network.observable,
                        "t_end": cfg.observed.t_end,
                        "n_grid_points": cfg.observed.n_grid_points,
                        "method": method,
                        "K": K,
                        "repetition": rep,
                        "pool_seed": pool_seed,
                    }
                    run = _run_cell_method(
                        method, cfg, st, network, pool, prior, obs_summary, norm,
                        run_seed, ranking, subset_seed, extra_config,
                    )
                    run.save_json(method_dir / "run.json")
                    run.save_accepted_csv(method_dir / "accepted.csv")
                    if run.ledger is not None:
                        run.ledger.to_csv(method_dir / "ledger.csv")
                        if method == "mab_eps_first":
                            ranking = rank_arms(run.ledger)
                    else:
                        _empty_ledger_csv(method_dir / "ledger.csv")
                    estimate = posterior_estimate(run) if run.n_accepted else None
                    rows.append(
                        ReportRow(
                            method=method,
                            K=K,
                            repetition=rep,
                            mae=mae(estimate, truth) if estimate is not None else None,
                            total_simulations=run.total_simulations,
                            accepted=run.n_accepted,
                            wall_total=run.timings["total"],
                            wall_selection=run.timings["selection"],
                            completed=run.completed,
                        )
                    )
                except Exception as exc:  # one bad cell must not sink the sweep
                    rows.append(ReportRow(method=method, K=K, repetition=rep, error=str(exc)))

    write_report(rows, exp_dir, extra={"experiment": cfg.name, "seed": cfg.seed})
    return rows, exp_dir


def rank_report(run_dir) -> str:
    """Render the exploitation-phase arm ranking of every cell's bandit run."""
    run_dir = Path(run_dir)
    ledger_paths = sorted(run_dir.glob("cells/*/mab_eps_first/ledger.csv"))
    if not ledger_paths:
        raise ConfigError(f"no mab_eps_first ledgers under {run_dir}")
    blocks = []
    for ledger_path in ledger_paths:
        cell_dir = ledger_path.parent.parent
        pool_info = json.loads((cell_dir / "pool.json").read_text())
        ids = [s["id"] for s in pool_info["statistics"]]
        ledger = RewardLedger.from_csv(ledger_path, n_arms=len(ids))
        lines = [f"{cell_dir.name}:"]
        lines.append(f"  {'rank':<5} {'arm':<4} {'statistic':<28} {'mean reward':>12} {'pulls':>6}")
        for pos, entry in enumerate(rank_arms(ledger), start=1):
            mean = "-" if entry.pulls == 0 else f"{entry.mean_reward:.4f}"
            lines.append(
                f"  {pos:<5} {entry.arm:<4} {ids[entry.arm]:<28} {mean:>12} {entry.pulls:>6}"
            )
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"
