"""Built-in reaction networks.

Four stock models cover the usual test ground: a birth-death process with
a known stationary law, a reversible dimerisation, a stochastic
Lotka-Volterra predator-prey loop, and the two-gene relaxation oscillator
of Vilar et al. (PNAS 2002) with its activator/repressor pair.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError
from .network import Reaction, ReactionNetwork, Species


def _birth_death() -> ReactionNetwork:
    return ReactionNetwork(
        name="birth_death",
        species=(Species("X", 0),),
        parameter_names=("birth", "death"),
        reactions=(
            Reaction("birth", {}, {"X": 1}, "zeroth"),   # 0 -> X
            Reaction("death", {"X": 1}, {}, "first"),    # X -> 0
        ),
        observable="X",
    )


def _dimerization() -> ReactionNetwork:
    return ReactionNetwork(
        name="dimerization",
        species=(Species("M", 30), Species("D", 0)),
        parameter_names=("k_bind", "k_release"),
        reactions=(
            Reaction("k_bind", {"M": 2}, {"D": 1}, "second"),     # 2M -> D
            Reaction("k_release", {"D": 1}, {"M": 2}, "first"),   # D -> 2M
        ),
        observable="D",
    )


def _lotka_volterra() -> ReactionNetwork:
    return ReactionNetwork(
        name="lotka_volterra",
        species=(Species("prey", 100), Species("predator", 100)),
        parameter_names=("reproduce", "consume", "die"),
        reactions=(
            Reaction("reproduce", {"prey": 1}, {"prey": 2}, "first"),
            Reaction("consume", {"prey": 1, "predator": 1}, {"predator": 2}, "second"),
            Reaction("die", {"predator": 1}, {}, "first"),
        ),
        observable="prey",
    )


def _vilar_oscillator() -> ReactionNetwork:
    """Activator-repressor genetic oscillator.

    Two genes (Da activator, Dr repressor) with activator-bound forms
    Da_p / Dr_p, their transcripts Ma / Mr, proteins A / R, and the
    inactive complex C.  Gene unbinding and the release of the bound
    activator are carried by separate channels, which reproduces the
    deterministic rate equations of the original model.
    """
    sp = (
        Species("Da", 1), Species("Da_p", 0), Species("Ma", 0),
        Species("Dr", 1), Species("Dr_p", 0), Species("Mr", 0),
        Species("C", 0), Species("A", 0), Species("R", 0),
    )
    params = (
        "alpha_A", "alpha_A_p", "alpha_R", "alpha_R_p",
        "beta_A", "beta_R",
        "delta_MA", "delta_MR", "delta_A", "delta_R",
        "gamma_A", "gamma_R", "gamma_C",
        "theta_A", "theta_R",
    )
    rxn = (
        Reaction("gamma_A", {"Da": 1, "A": 1}, {"Da_p": 1}, "second"),     # activator binds own gene
        Reaction("theta_A", {"Da_p": 1}, {"Da": 1}, "first"),              # gene unbinds
        Reaction("gamma_R", {"Dr": 1, "A": 1}, {"Dr_p": 1}, "second"),     # activator binds repressor gene
        Reaction("theta_R", {"Dr_p": 1}, {"Dr": 1}, "first"),
        Reaction("alpha_A", {"Da": 1}, {"Da": 1, "Ma": 1}, "first"),       # basal transcription
        Reaction("alpha_A_p", {"Da_p": 1}, {"Da_p": 1, "Ma": 1}, "first"), # activated transcription
        Reaction("alpha_R", {"Dr": 1}, {"Dr": 1, "Mr": 1}, "first"),
        Reaction("alpha_R_p", {"Dr_p": 1}, {"Dr_p": 1, "Mr": 1}, "first"),
        Reaction("beta_A", {"Ma": 1}, {"Ma": 1, "A": 1}, "first"),         # translation
        Reaction("beta_R", {"Mr": 1}, {"Mr": 1, "R": 1}, "first"),
        Reaction("theta_A", {"Da_p": 1}, {"Da_p": 1, "A": 1}, "first"),    # bound activator released
        Reaction("theta_R", {"Dr_p": 1}, {"Dr_p": 1, "A": 1}, "first"),
        Reaction("gamma_C", {"A": 1, "R": 1}, {"C": 1}, "second"),         # sequestration
        Reaction("delta_A", {"C": 1}, {"R": 1}, "first"),                  # A decays inside the complex
        Reaction("delta_A", {"A": 1}, {}, "first"),
        Reaction("delta_R", {"R": 1}, {}, "first"),
        Reaction("delta_MA", {"Ma": 1}, {}, "first"),
        Reaction("delta_MR", {"Mr": 1}, {}, "first"),
    )
    return ReactionNetwork(
        name="vilar_oscillator",
        species=sp,
        parameter_names=params,
        reactions=rxn,
        observable="C",
    )


_BUILDERS = {
    "birth_death": _birth_death,
    "dimerization": _dimerization,
    "lotka_volterra": _lotka_volterra,
    "vilar_oscillator": _vilar_oscillator,
}

_REFERENCE = {
    "birth_death": (10.0, 1.0),
    "dimerization": (0.005, 0.08),
    "lotka_volterra": (1.0, 0.005, 0.6),
    "vilar_oscillator": (
        50.0, 500.0, 0.01, 50.0,   # transcription rates
        50.0, 5.0,                 # translation rates
        10.0, 0.5, 1.0, 0.2,       # decay rates
        1.0, 1.0, 2.0,             # binding rates
        50.0, 100.0,               # unbinding rates
    ),
}

_BOUNDS = {
    "birth_death": ((1.0, 20.0), (0.1, 2.0)),
    "dimerization": ((0.001, 0.01), (0.01, 0.2)),
    "lotka_volterra": ((0.1, 2.0), (0.001, 0.01), (0.1, 1.0)),
    "vilar_oscillator": (
        (30.0, 70.0), (200.0, 600.0), (0.0, 1.0), (30.0, 70.0),
        (30.0, 70.0), (1.0, 10.0),
        (1.0, 12.0), (0.0, 1.0), (0.0, 2.0), (0.0, 0.5),
        (0.5, 1.5), (0.5, 1.5), (1.0, 3.0),
        (30.0, 70.0), (80.0, 120.0),
    ),
}


def model_names() -> tuple:
    return tuple(sorted(_BUILDERS))


def builtin_model(name: str, observable: str | None = None) -> ReactionNetwork:
    """Return a built-in network, optionally rebinding its observable species."""
    try:
        net = _BUILDERS[name]()
    except KeyError:
        raise ConfigError(
            f"unknown model {name!r}; available: {', '.join(model_names())}"
        ) from None
    if observable is not None and observable != net.observable:
        if observable not in {s.name for s in net.species}:
            raise ConfigError(f"model {name!r} has no species {observable!r}")
        net = ReactionNetwork(
            name=net.name,
            species=net.species,
            parameter_names=net.parameter_names,
            reactions=net.reactions,
            observable=observable,
        )
    return net


def reference_parameters(name: str) -> np.ndarray:
    """Ground-truth rate vector used to generate synthetic observations."""
    if name not in _REFERENCE:
        raise ConfigError(f"no reference parameters for model {name!r}")
    return np.array(_REFERENCE[name], dtype=np.float64)


def parameter_bounds(name: str) -> tuple:
    """Per-parameter (lower, upper) box used as the default inference prior."""
    if name not in _BOUNDS:
        raise ConfigError(f"no parameter bounds for model {name!r}")
    return _BOUNDS[name]
