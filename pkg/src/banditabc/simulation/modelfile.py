"""On-disk formats: YAML network definitions and two-column trajectory CSVs."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np
import yaml

from ..errors import ConfigError, ModelDefinitionError
from .network import HillTerm, Reaction, ReactionNetwork, Species


def network_to_dict(net: ReactionNetwork) -> dict:
    reactions = []
    for rxn in net.reactions:
        entry = {
            "rate_param": rxn.rate_param,
            "reactants": dict(rxn.reactants),
            "products": dict(rxn.products),
            "kind": rxn.kind,
        }
        if rxn.hill is not None:
            entry["hill"] = {
                "species": rxn.hill.species,
                "threshold": rxn.hill.threshold,
                "exponent": rxn.hill.exponent,
                "mode": rxn.hill.mode,
            }
        reactions.append(entry)
    return {
        "name": net.name,
        "species": [{"name": s.name, "initial": s.initial} for s in net.species],
        "parameters": list(net.parameter_names),
        "reactions": reactions,
        "observable": net.observable,
    }


def network_from_dict(data: dict) -> ReactionNetwork:
    try:
        species = tuple(Species(s["name"], int(s["initial"])) for s in data["species"])
        reactions = []
        for entry in data["reactions"]:
            hill = None
            if entry.get("hill") is not None:
                h = entry["hill"]
                hill = HillTerm(
                    species=h["species"],
                    threshold=float(h["threshold"]),
                    exponent=float(h["exponent"]),
                    mode=h.get("mode", "activate"),
                )
            reactions.append(
                Reaction(
                    rate_param=entry["rate_param"],
                    reactants={k: int(v) for k, v in (entry.get("reactants") or {}).items()},
                    products={k: int(v) for k, v in (entry.get("products") or {}).items()},
                    kind=entry["kind"],
                    hill=hill,
                )
            )
        return ReactionNetwork(
            name=data["name"],
            species=species,
            parameter_names=tuple(data["parameters"]),
            reactions=tuple(reactions),
            observable=data["observable"],
        )
    except (KeyError, TypeError) as exc:
        raise ModelDefinitionError(f"malformed network definition: {exc}") from exc


def save_network(net: ReactionNetwork, path) -> None:
    Path(path).write_text(yaml.safe_dump(network_to_dict(net), sort_keys=False))


def load_network(path) -> ReactionNetwork:
    data = yaml.safe_load(Path(path).read_text())
    if not isinstance(data, dict):
        raise ModelDefinitionError(f"{path}: expected a mapping at top level")
    return network_from_dict(data)


def save_trajectory(times: np.ndarray, values: np.ndarray, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["time", "value"])
        for t, v in zip(times, values):
            writer.writerow([repr(float(t)), int(v)])


def load_trajectory(path) -> tuple:
    """Read a time,value CSV back into (times, values) arrays."""
    times, values = [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:2]] != ["time", "value"]:
            raise ConfigError(f"{path}: expected a 'time,value' header")
        for row in reader:
            if not row:
                continue
            times.append(float(row[0]))
            values.append(int(row[1]))
    return np.asarray(times, dtype=np.float64), np.asarray(values, dtype=np.int64)
