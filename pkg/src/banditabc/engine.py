"""ABC rejection sampling with per-iteration statistic selection.

The dynamic loop implements likelihood-free rejection where the summary
statistic used for the accept/reject test is chosen fresh each iteration
by a bandit over the pool: draw theta from the prior, simulate, pick an
arm, accept when that arm's normalized distance to the observed summary
falls under tau.  Exploration iterations (with record_all) score every
arm on the same trajectory, which is what lets the bandit rank the whole
pool from a handful of simulations.

The static loop is the classical fixed-statistic counterpart: a chosen
subset of the pool with a single or combined L2 distance.  Both loops
share the prior/simulator seed streams, so a static rerun with the same
seed sees the same parameter draws and trajectories as the dynamic run
it is compared against.

Every run is driven by one integer seed split into named substreams
(prior, simulator, bandit); see the rng module.  Runs record enough to
replay any accepted sample: theta, the iteration, the arm, the distance,
and the simulator seed.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bandit import (
    PHASE_EXPLORATION,
    BanditConfig,
    RewardLedger,
    select_with_phase,
)
from .errors import ConfigError, EstimationError
from .metric import NormalizationState, ObservedSummary, combined_distance, normalize, raw_distance, reward
from .rng import simulation_seeds, substream
from .simulation import ReactionNetwork, SimulationRequest, simulate
from .summaries import StatisticPool, evaluate, evaluate_pool, statistic_to_dict
from .timing import Stopwatch


@dataclass(frozen=True)
class Prior:
    """Independent uniform box prior."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=np.float64)
        upper = np.asarray(self.upper, dtype=np.float64)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if lower.ndim != 1 or lower.shape != upper.shape:
            raise ConfigError("prior bounds must be 1-d arrays of equal length")
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise ConfigError("prior bounds must be finite")
        if np.any(upper < lower):
            raise ConfigError("upper prior bounds must not fall below lower bounds")

    @classmethod
    def from_bounds(cls, bounds) -> "Prior":
        arr = np.asarray(bounds, dtype=np.float64)
        return cls(arr[:, 0], arr[:, 1])

    @property
    def dim(self) -> int:
        return len(self.lower)

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(self.lower, self.upper)

    def contains(self, theta) -> bool:
        theta = np.asarray(theta, dtype=np.float64)
        return bool(np.all(theta >= self.lower) and np.all(theta <= self.upper))

    def midpoint(self) -> np.ndarray:
        return (self.lower + self.upper) / 2.0


@dataclass(frozen=True)
class GridPrior:
    """Uniform prior over a finite set of parameter points (handy for exact checks)."""

    points: np.ndarray

    def __post_init__(self):
        points = np.atleast_2d(np.asarray(self.points, dtype=np.float64))
        object.__setattr__(self, "points", points)
        if points.shape[0] < 1:
            raise ConfigError("grid prior needs at least one point")

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        return self.points[rng.integers(self.n_points)].copy()

    def contains(self, theta) -> bool:
        theta = np.asarray(theta, dtype=np.float64)
        return bool(np.any(np.all(np.isclose(self.points, theta), axis=1)))


def sample_prior(prior, rng_or_seed) -> np.ndarray:
    """One prior draw, from a Generator or an integer seed."""
    if isinstance(rng_or_seed, np.random.Generator):
        return prior.sample(rng_or_seed)
    return prior.sample(np.random.default_rng(int(rng_or_seed)))


@dataclass(frozen=True)
class RunConfig:
    n_accept: int
    tau: float
    max_simulations: int
    seed: int

    def __post_init__(self):
        if self.n_accept < 1:
            raise ConfigError("n_accept must be at least 1")
        if not self.tau > 0:
            raise ConfigError("tau must be positive")
        if self.max_simulations < 1:
            raise ConfigError("max_simulations must be at least 1")
        if self.max_simulations < self.n_accept:
            raise ConfigError("max_simulations cannot be smaller than n_accept")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")


@dataclass(frozen=True)
class AcceptedSample:
    theta: np.ndarray
    iteration: int
    arm: object  # arm index, or None for combined static distances
    distance: float
    sim_seed: int


@dataclass(frozen=True)
class SelectionRecord:
    iteration: int
    arm: object
    phase: str
    distance: float
    accepted: bool


@dataclass
class InferenceRun:
    """Everything one rejection run produced."""

    strategy: str
    parameter_names: tuple
    pool: StatisticPool
    config: dict
    accepted: list
    selections: list
    total_simulations: int
    completed: bool
    timings: dict
    normalization: NormalizationState
    ledger: RewardLedger = field(default=None)

    @property
    def n_accepted(self) -> int:
        return len(self.accepted)

    def accepted_thetas(self) -> np.ndarray:
        if not self.accepted:
            return np.empty((0, len(self.parameter_names)))
        return np.stack([s.theta for s in self.accepted])

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "strategy": self.strategy,
            "parameter_names": list(self.parameter_names),
            "pool": [statistic_to_dict(s) for s in self.pool],
            "config": self.config,
            "total_simulations": self.total_simulations,
            "completed": self.completed,
            "n_accepted": self.n_accepted,
            "timings": self.timings,
            "normalization": self.normalization.to_dict(),
            "accepted": [
                {
                    "theta": s.theta.tolist(),
                    "iteration": s.iteration,
                    "arm": s.arm,
                    "distance": s.distance,
                    "sim_seed": s.sim_seed,
                }
                for s in self.accepted
            ],
            "selections": [
                {
                    "iteration": s.iteration,
                    "arm": s.arm,
                    "phase": s.phase,
                    "distance": s.distance,
                    "accepted": s.accepted,
                }
                for s in self.selections
            ],
        }

    def save_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    def save_accepted_csv(self, path) -> None:
        """Accepted parameter vectors, one column per parameter."""
        lines = [",".join(self.parameter_names)]
        for s in self.accepted:
            lines.append(",".join(repr(float(v)) for v in s.theta))
        Path(path).write_text("\n".join(lines) + "\n")


def make_simulator(network: ReactionNetwork, t_end: float, n_grid_points: int):
    """Bind a network and grid into a (theta, seed) -> values callable."""

    def simulate_fn(theta, seed):
        req = SimulationRequest(theta=theta, seed=seed, t_end=t_end, n_grid_points=n_grid_points)
        return simulate(network, req).values

    return simulate_fn


def calibrate(simulate_fn, prior, pool: StatisticPool, observed: ObservedSummary,
              n_calibration: int, seed: int) -> NormalizationState:
    """Freeze per-statistic distance ranges from prior-predictive simulations."""
    if n_calibration < 2:
        raise ConfigError("calibration needs at least two simulations")
    rng = substream(seed, "calibration-prior")
    seeds = simulation_seeds(seed, "calibration-sim")
    distances = np.empty((n_calibration, pool.K))
    for j in range(n_calibration):
        theta = prior.sample(rng)
        values = evaluate_pool(pool, simulate_fn(theta, next(seeds)))
        for i in range(pool.K):
            distances[j, i] = raw_distance(values[i], observed.per_statistic[i])
    return NormalizationState.from_raw_distances(distances)


def _check_shapes(pool, observed, norm):
    if len(observed.per_statistic) != pool.K:
        raise ConfigError("observed summary length does not match the pool")
    if norm.n_statistics != pool.K:
        raise ConfigError("normalization state does not match the pool")


def run_dynamic(simulate_fn, pool: StatisticPool, prior, observed: ObservedSummary,
                norm: NormalizationState, bandit_cfg: BanditConfig, run_cfg: RunConfig,
                parameter_names=None, extra_config=None) -> InferenceRun:
    """Rejection sampling with bandit-selected statistics.

    Stops after n_accept acceptances or max_simulations iterations,
    whichever comes first; a budget-exhausted run is returned with
    completed=False rather than raised.
    """
    _check_shapes(pool, observed, norm)
    if parameter_names is None:
        parameter_names = tuple(f"theta_{i}" for i in range(prior.dim))

    ledger = RewardLedger(pool.K)
    prior_rng = substream(run_cfg.seed, "prior")
    seeds = simulation_seeds(run_cfg.seed, "sim")
    accepted, selections = [], []
    sw_sim, sw_stats, sw_select = Stopwatch(), Stopwatch(), Stopwatch()
    t0 = time.perf_counter()
    iteration = 0

    while len(accepted) < run_cfg.n_accept and iteration < run_cfg.max_simulations:
        theta = prior.sample(prior_rng)
        sim_seed = next(seeds)

        with sw_sim.measure():
            y = simulate_fn(theta, sim_seed)

        with sw_select.measure():
            arm, phase = select_with_phase(ledger, bandit_cfg, iteration)

        with sw_stats.measure():
            if phase == PHASE_EXPLORATION and bandit_cfg.record_all:
                values = evaluate_pool(pool, y)
                rewards = {}
                for i in range(pool.K):
                    nd = normalize(norm, i, raw_distance(values[i], observed.per_statistic[i]))
                    rewards[i] = reward(nd)
                dist = -rewards[arm]
            else:
                value = evaluate(pool[arm], y)
                dist = normalize(norm, arm, raw_distance(value, observed.per_statistic[arm]))
                rewards = {arm: reward(dist)}

        with sw_select.measure():
            ledger.record(iteration, rewards, phase)

        ok = bool(dist <= run_cfg.tau)
        if ok:
            accepted.append(
                AcceptedSample(theta=np.array(theta), iteration=iteration, arm=arm,
                               distance=dist, sim_seed=sim_seed)
            )
        selections.append(SelectionRecord(iteration, arm, phase, dist, ok))
        iteration += 1

    total = time.perf_counter() - t0
    t_sim, t_stats, t_select = sw_sim.elapsed, sw_stats.elapsed, sw_select.elapsed
    config = {
        "n_accept": run_cfg.n_accept,
        "tau": run_cfg.tau,
        "max_simulations": run_cfg.max_simulations,
        "seed": run_cfg.seed,
        "bandit": {
            "strategy": bandit_cfg.strategy,
            "epsilon": bandit_cfg.epsilon,
            "exploration_budget": bandit_cfg.exploration_budget,
            "seed": bandit_cfg.seed,
            "tie_break": bandit_cfg.tie_break,
            "record_all": bandit_cfg.record_all,
        },
    }
    if extra_config:
        config.update(extra_config)
    return InferenceRun(
        strategy=bandit_cfg.strategy,
        parameter_names=tuple(parameter_names),
        pool=pool,
        config=config,
        accepted=accepted,
        selections=selections,
        total_simulations=iteration,
        completed=len(accepted) >= run_cfg.n_accept,
        timings={
            "simulation": t_sim,
            "statistics": t_stats,
            "selection": t_select,
            "other": max(0.0, total - t_sim - t_stats - t_select),
            "total": total,
        },
        normalization=norm,
        ledger=ledger,
    )


def run_static(simulate_fn, pool: StatisticPool, subset, combine: str, prior,
               observed: ObservedSummary, norm: NormalizationState, run_cfg: RunConfig,
               parameter_names=None, extra_config=None) -> InferenceRun:
    """Classical rejection with a fixed statistic subset.

    combine="single" uses the one statistic in subset; combine="l2" uses
    the normalized L2 distance over the subset, scaled to stay in [0, 1].
    Shares seed substreams with run_dynamic so equal seeds see equal
    parameter draws and trajectories.
    """
    _check_shapes(pool, observed, norm)
    subset = [int(i) for i in subset]
    if not subset or len(set(subset)) != len(subset):
        raise ConfigError("subset must be non-empty without repeats")
    for i in subset:
        if not 0 <= i < pool.K:
            raise ConfigError(f"subset index {i} out of range for pool of {pool.K}")
    if combine not in ("single", "l2"):
        raise ConfigError(f"unknown combine mode {combine!r}")
    if combine == "single" and len(subset) != 1:
        raise ConfigError("combine='single' needs exactly one statistic")
    if parameter_names is None:
        parameter_names = tuple(f"theta_{i}" for i in range(prior.dim))

    prior_rng = substream(run_cfg.seed, "prior")
    seeds = simulation_seeds(run_cfg.seed, "sim")
    accepted, selections = [], []
    arm_label = subset[0] if combine == "single" else None
    sw_sim, sw_stats = Stopwatch(), Stopwatch()
    t0 = time.perf_counter()
    iteration = 0

    while len(accepted) < run_cfg.n_accept and iteration < run_cfg.max_simulations:
        theta = prior.sample(prior_rng)
        sim_seed = next(seeds)

        with sw_sim.measure():
            y = simulate_fn(theta, sim_seed)

        with sw_stats.measure():
            if combine == "single":
                i = subset[0]
                value = evaluate(pool[i], y)
                dist = normalize(norm, i, raw_distance(value, observed.per_statistic[i]))
            else:
                values = np.zeros(pool.K)
                for i in subset:
                    values[i] = evaluate(pool[i], y)
                dist = combined_distance(values, observed.per_statistic, subset, norm)

        ok = bool(dist <= run_cfg.tau)
        if ok:
            accepted.append(
                AcceptedSample(theta=np.array(theta), iteration=iteration, arm=arm_label,
                               distance=dist, sim_seed=sim_seed)
            )
        selections.append(SelectionRecord(iteration, arm_label, "static", dist, ok))
        iteration += 1

    total = time.perf_counter() - t0
    t_sim, t_stats = sw_sim.elapsed, sw_stats.elapsed
    strategy = "static_single" if combine == "single" else "static_l2"
    config = {
        "n_accept": run_cfg.n_accept,
        "tau": run_cfg.tau,
        "max_simulations": run_cfg.max_simulations,
        "seed": run_cfg.seed,
        "subset": subset,
        "combine": combine,
    }
    if extra_config:
        config.update(extra_config)
    return InferenceRun(
        strategy=strategy,
        parameter_names=tuple(parameter_names),
        pool=pool,
        config=config,
        accepted=accepted,
        selections=selections,
        total_simulations=iteration,
        completed=len(accepted) >= run_cfg.n_accept,
        timings={
            "simulation": t_sim,
            "statistics": t_stats,
            "selection": 0.0,
            "other": max(0.0, total - t_sim - t_stats),
            "total": total,
        },
        normalization=norm,
        ledger=None,
    )


def posterior_estimate(run: InferenceRun) -> np.ndarray:
    """Posterior point estimate: mean of the accepted parameter vectors."""
    if run.n_accepted == 0:
        raise EstimationError("no accepted samples to estimate from")
    return run.accepted_thetas().mean(axis=0)


def mae(estimate, truth) -> float:
    """Mean absolute error between an estimate and the generating parameters."""
    estimate = np.asarray(estimate, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    if estimate.shape != truth.shape:
        raise ConfigError("estimate and truth must have the same shape")
    if not (np.all(np.isfinite(estimate)) and np.all(np.isfinite(truth))):
        raise ConfigError("estimate and truth must be finite")
    return float(np.mean(np.abs(estimate - truth)))
