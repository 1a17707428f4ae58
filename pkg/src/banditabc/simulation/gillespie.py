"""Gillespie direct-method simulator.

The event loop is compiled with numba.  Randomness comes from a splitmix64
counter generator embedded in the kernel: numba's bridge to numpy seeding
truncates to 32 bits, while request seeds are full 64-bit integers, and the
counter design makes every trajectory a pure function of (network, theta,
seed, grid).  Two draws per event: exponential waiting time from the total
propensity, then a categorical pick of the reaction channel.

States are recorded zero-order-hold on the request grid.  When the total
propensity reaches zero the current state is absorbing and simply fills
the remaining grid points.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from ..errors import ModelDefinitionError
from .network import ReactionNetwork, SimulationRequest, Trajectory

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_INV53 = 1.0 / 9007199254740992.0  # 2**-53

_STATUS_OK = 0
_STATUS_BAD_PROPENSITY = 1


@njit(cache=True)
def _next_uniform(state):
    # splitmix64 step; returns (new_state, uniform in [0, 1))
    state = state + _GOLDEN
    z = state
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    z = z ^ (z >> np.uint64(31))
    return state, (z >> np.uint64(11)) * _INV53


@njit(cache=True)
def _ssa_direct(kind, rate_idx, sp1, sp2, hill_sp, hill_k, hill_n,
                delta, theta, init, grid, seed):
    m = kind.shape[0]
    n_grid = grid.shape[0]
    state = init.copy()
    out = np.zeros((n_grid, init.shape[0]), dtype=np.int64)
    a = np.zeros(m, dtype=np.float64)
    rng = seed
    t = 0.0
    gi = 0

    while gi < n_grid:
        total = 0.0
        for r in range(m):
            k = kind[r]
            rate = theta[rate_idx[r]]
            if k == 0:
                ar = rate
            elif k == 1:
                ar = rate * state[sp1[r]]
            elif k == 2:
                ar = rate * state[sp1[r]] * state[sp2[r]]
            elif k == 3:
                x = state[sp1[r]]
                ar = rate * x * (x - 1) * 0.5
            else:
                xn = float(state[hill_sp[r]]) ** hill_n[r]
                kn = hill_k[r] ** hill_n[r]
                if k == 4:
                    h = xn / (xn + kn)
                else:
                    h = kn / (xn + kn)
                ar = rate * state[sp1[r]] * h
            if not np.isfinite(ar) or ar < 0.0:
                return _STATUS_BAD_PROPENSITY, out
            a[r] = ar
            total += ar

        if total <= 0.0:
            # absorbing state: hold it for the rest of the grid
            while gi < n_grid:
                out[gi] = state
                gi += 1
            break

        rng, u1 = _next_uniform(rng)
        rng, u2 = _next_uniform(rng)
        t_next = t + (-np.log1p(-u1) / total)

        while gi < n_grid and grid[gi] < t_next:
            out[gi] = state
            gi += 1

        target = u2 * total
        acc = 0.0
        chosen = m - 1
        for r in range(m):
            acc += a[r]
            if target < acc:
                chosen = r
                break
        for s in range(state.shape[0]):
            state[s] += delta[chosen, s]
        t = t_next

    return _STATUS_OK, out


def simulate_states(network: ReactionNetwork, request: SimulationRequest) -> tuple:
    """Run the SSA and return (grid, states) with states shaped (grid, species)."""
    c = network.compiled()
    theta = np.asarray(request.theta, dtype=np.float64)
    if theta.shape[0] != network.n_parameters:
        raise ModelDefinitionError(
            f"theta has {theta.shape[0]} entries, network {network.name!r} "
            f"expects {network.n_parameters}"
        )
    grid = request.grid()
    status, states = _ssa_direct(
        c["kind"], c["rate_idx"], c["sp1"], c["sp2"],
        c["hill_sp"], c["hill_k"], c["hill_n"],
        c["delta"], theta, network.initial_state(), grid,
        np.uint64(request.seed),
    )
    if status == _STATUS_BAD_PROPENSITY:
        raise ModelDefinitionError(
            f"network {network.name!r} produced a negative or non-finite propensity"
        )
    return grid, states


def simulate(network: ReactionNetwork, request: SimulationRequest) -> Trajectory:
    """Simulate and record the network's observable species on the grid."""
    grid, states = simulate_states(network, request)
    return Trajectory(times=grid, values=states[:, network.observable_index])
