"""Reaction network data model.

A network is a list of species with integer initial copy numbers, a list
of named rate parameters, and a list of reactions.  Each reaction carries
a propensity kind:

    zeroth   a(x) = c
    first    a(x) = c * x_i
    second   a(x) = c * x_i * x_j          (i != j)
             a(x) = c * x_i * (x_i - 1)/2  (dimerisation, i == j)
    hill     a(x) = c * x_i * h(x_m)       with h an activating or
             repressing Hill response in a modulator species

Rate constants are not stored on the network; they arrive as a parameter
vector theta at simulation time, so one compiled network serves every
point of a prior.  Networks are frozen after construction and safe to
share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from ..errors import ConfigError, ModelDefinitionError

PROPENSITY_KINDS = ("zeroth", "first", "second", "hill")

# integer codes used by the compiled kernel
KIND_ZEROTH = 0
KIND_FIRST = 1
KIND_SECOND = 2
KIND_DIMER = 3
KIND_HILL_ACT = 4
KIND_HILL_REP = 5


@dataclass(frozen=True)
class Species:
    name: str
    initial: int

    def __post_init__(self):
        if not self.name:
            raise ModelDefinitionError("species name must be non-empty")
        if int(self.initial) != self.initial or self.initial < 0:
            raise ModelDefinitionError(
                f"species {self.name!r}: initial count must be a non-negative integer"
            )


@dataclass(frozen=True)
class HillTerm:
    """Hill-type modulation of a propensity by one species.

    mode "activate": h = x^n / (x^n + K^n); mode "repress": h = K^n / (x^n + K^n).
    """

    species: str
    threshold: float
    exponent: float
    mode: str = "activate"

    def __post_init__(self):
        if self.mode not in ("activate", "repress"):
            raise ModelDefinitionError(f"unknown Hill mode {self.mode!r}")
        if self.threshold <= 0 or self.exponent <= 0:
            raise ModelDefinitionError("Hill threshold and exponent must be positive")


@dataclass(frozen=True)
class Reaction:
    """One reaction channel.

    ``rate_param`` names the entry of theta used as the rate constant.
    ``reactants`` and ``products`` map species names to stoichiometric
    coefficients; the state change is products - reactants.
    """

    rate_param: str
    reactants: Mapping[str, int]
    products: Mapping[str, int]
    kind: str
    hill: Optional[HillTerm] = None

    def __post_init__(self):
        if self.kind not in PROPENSITY_KINDS:
            raise ModelDefinitionError(f"unknown propensity kind {self.kind!r}")
        for name, coeff in {**self.reactants, **self.products}.items():
            if int(coeff) != coeff or coeff <= 0:
                raise ModelDefinitionError(
                    f"stoichiometric coefficient for {name!r} must be a positive integer"
                )
        order = sum(self.reactants.values())
        expected = {"zeroth": 0, "first": 1, "second": 2}.get(self.kind)
        if expected is not None and order != expected:
            raise ModelDefinitionError(
                f"kind {self.kind!r} needs total reactant order {expected}, got {order}"
            )
        if self.kind == "hill":
            if self.hill is None:
                raise ModelDefinitionError("hill kind requires a HillTerm")
            if order != 1:
                raise ModelDefinitionError("hill kind modulates a first-order channel")
        elif self.hill is not None:
            raise ModelDefinitionError(f"kind {self.kind!r} must not carry a HillTerm")


@dataclass(frozen=True)
class ReactionNetwork:
    name: str
    species: tuple
    parameter_names: tuple
    reactions: tuple
    observable: str
    _compiled: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "species", tuple(self.species))
        object.__setattr__(self, "parameter_names", tuple(self.parameter_names))
        object.__setattr__(self, "reactions", tuple(self.reactions))
        self._validate()
        object.__setattr__(self, "_compiled", _compile(self))

    def _validate(self):
        names = [s.name for s in self.species]
        if len(set(names)) != len(names):
            raise ModelDefinitionError("duplicate species names")
        if len(set(self.parameter_names)) != len(self.parameter_names):
            raise ModelDefinitionError("duplicate parameter names")
        if not self.reactions:
            raise ModelDefinitionError("network has no reactions")
        known = set(names)
        params = set(self.parameter_names)
        for i, rxn in enumerate(self.reactions):
            if rxn.rate_param not in params:
                raise ModelDefinitionError(
                    f"reaction {i}: unknown rate parameter {rxn.rate_param!r}"
                )
            for sp in (*rxn.reactants, *rxn.products):
                if sp not in known:
                    raise ModelDefinitionError(f"reaction {i}: unknown species {sp!r}")
            if rxn.hill is not None and rxn.hill.species not in known:
                raise ModelDefinitionError(
                    f"reaction {i}: unknown Hill species {rxn.hill.species!r}"
                )
        if self.observable not in known:
            raise ModelDefinitionError(f"unknown observable species {self.observable!r}")

    @property
    def n_species(self) -> int:
        return len(self.species)

    @property
    def n_reactions(self) -> int:
        return len(self.reactions)

    @property
    def n_parameters(self) -> int:
        return len(self.parameter_names)

    @property
    def observable_index(self) -> int:
        return next(i for i, s in enumerate(self.species) if s.name == self.observable)

    def species_index(self, name: str) -> int:
        for i, s in enumerate(self.species):
            if s.name == name:
                return i
        raise ModelDefinitionError(f"unknown species {name!r}")

    def initial_state(self) -> np.ndarray:
        return np.array([s.initial for s in self.species], dtype=np.int64)

    def compiled(self) -> dict:
        """Arrays consumed by the SSA kernel; internal layout, do not mutate."""
        return self._compiled


def _compile(net: ReactionNetwork) -> dict:
    """Flatten a network into the array form the kernel iterates over."""
    sp_index = {s.name: i for i, s in enumerate(net.species)}
    par_index = {p: i for i, p in enumerate(net.parameter_names)}
    m, n = net.n_reactions, net.n_species

    kind = np.zeros(m, dtype=np.int64)
    rate_idx = np.zeros(m, dtype=np.int64)
    sp1 = np.full(m, -1, dtype=np.int64)
    sp2 = np.full(m, -1, dtype=np.int64)
    hill_sp = np.full(m, -1, dtype=np.int64)
    hill_k = np.zeros(m, dtype=np.float64)
    hill_n = np.zeros(m, dtype=np.float64)
    delta = np.zeros((m, n), dtype=np.int64)

    for r, rxn in enumerate(net.reactions):
        rate_idx[r] = par_index[rxn.rate_param]
        for sp, c in rxn.reactants.items():
            delta[r, sp_index[sp]] -= c
        for sp, c in rxn.products.items():
            delta[r, sp_index[sp]] += c
        reac = [(sp_index[sp], c) for sp, c in rxn.reactants.items()]
        if rxn.kind == "zeroth":
            kind[r] = KIND_ZEROTH
        elif rxn.kind == "first":
            kind[r] = KIND_FIRST
            sp1[r] = reac[0][0]
        elif rxn.kind == "second":
            if len(reac) == 1:  # 2A -> products
                kind[r] = KIND_DIMER
                sp1[r] = reac[0][0]
            else:
                kind[r] = KIND_SECOND
                sp1[r], sp2[r] = reac[0][0], reac[1][0]
        else:
            kind[r] = KIND_HILL_ACT if rxn.hill.mode == "activate" else KIND_HILL_REP
            sp1[r] = reac[0][0]
            hill_sp[r] = sp_index[rxn.hill.species]
            hill_k[r] = rxn.hill.threshold
            hill_n[r] = rxn.hill.exponent

    return {
        "kind": kind,
        "rate_idx": rate_idx,
        "sp1": sp1,
        "sp2": sp2,
        "hill_sp": hill_sp,
        "hill_k": hill_k,
        "hill_n": hill_n,
        "delta": delta,
    }


def propensities(network: ReactionNetwork, state: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """Reference propensity evaluation in plain numpy.

    Mirrors the compiled kernel arithmetic; used as an independent check
    and for inspecting models interactively.
    """
    c = network.compiled()
    state = np.asarray(state, dtype=np.float64)
    theta = np.asarray(theta, dtype=np.float64)
    out = np.zeros(network.n_reactions)
    for r in range(network.n_reactions):
        rate = theta[c["rate_idx"][r]]
        k = c["kind"][r]
        if k == KIND_ZEROTH:
            a = rate
        elif k == KIND_FIRST:
            a = rate * state[c["sp1"][r]]
        elif k == KIND_SECOND:
            a = rate * state[c["sp1"][r]] * state[c["sp2"][r]]
        elif k == KIND_DIMER:
            x = state[c["sp1"][r]]
            a = rate * x * (x - 1.0) / 2.0
        else:
            x = state[c["hill_sp"][r]] ** c["hill_n"][r]
            kk = c["hill_k"][r] ** c["hill_n"][r]
            h = x / (x + kk) if k == KIND_HILL_ACT else kk / (x + kk)
            a = rate * state[c["sp1"][r]] * h
        out[r] = a
    return out


@dataclass(frozen=True)
class SimulationRequest:
    """One simulator call: parameter vector, seed, and output grid."""

    theta: np.ndarray
    seed: int
    t_end: float
    n_grid_points: int

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=np.float64)
        object.__setattr__(self, "theta", theta)
        if theta.ndim != 1:
            raise ConfigError("theta must be a 1-d vector")
        if np.any(theta < 0):
            raise ConfigError("rate parameters must be non-negative")
        if not (0 <= self.seed < 2**64):
            raise ConfigError("seed must fit in an unsigned 64-bit integer")
        if not np.isfinite(self.t_end) or self.t_end <= 0:
            raise ConfigError("t_end must be positive and finite")
        if self.n_grid_points < 2:
            raise ConfigError("need at least two grid points")

    def grid(self) -> np.ndarray:
        return np.linspace(0.0, self.t_end, self.n_grid_points)


@dataclass(frozen=True)
class Trajectory:
    """A single species recorded on a uniform time grid.

    Values are copy numbers sampled zero-order-hold: entry k is the state
    just before the first event after times[k].
    """

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.float64)
        values = np.asarray(self.values, dtype=np.int64)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        if times.ndim != 1 or values.ndim != 1 or times.shape != values.shape:
            raise ConfigError("times and values must be 1-d arrays of equal length")
        if len(times) < 2:
            raise ConfigError("a trajectory needs at least two samples")
        if np.any(np.diff(times) <= 0):
            raise ConfigError("times must be strictly increasing")
        if np.any(values < 0):
            raise ConfigError("copy numbers cannot be negative")

    def __len__(self) -> int:
        return len(self.times)
