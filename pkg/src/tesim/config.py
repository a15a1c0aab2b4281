"""Experiment configuration: strict TOML parsing and resolution.

A config file has up to six sections — [topology], [demands], [paths],
[raecke], [lp], [run] — with every omitted key defaulted. Unknown
sections or keys are errors (typos must not silently change an
experiment), as are missing referenced files and demand sources that
conflict (a traffic-matrix file and a generated gravity model at once).

resolve_config returns the fully-defaulted configuration; its canonical
JSON form is hashed so runs can be traced back to the exact settings
that produced them.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field

import numpy as np
import tomli

from .simulate import SYSTEM_NAMES
from .topology import Topology, parse_topology
from .traffic import (
    PROFILES,
    TmSequence,
    TrafficMatrix,
    gravity_matrix,
    load_tm_sequence,
    make_tm_sequence,
)


class ConfigError(ValueError):
    """Invalid experiment configuration."""


_SCHEMA: dict[str, dict[str, type | tuple[type, ...]]] = {
    "topology": {
        "file": str,
        "format": str,
        "capacity_attr": str,
        "capacity_scale": (int, float),
        "default_capacity": (int, float),
    },
    "demands": {
        "file": str,
        "total_volume": (int, float),
        "profile": str,
        "steps": int,
        "peak_scale": (int, float),
        "seed": int,
        "jitter": bool,
    },
    "paths": {
        "budget": int,
        "ksp_cost": str,
        "all_paths_cap": int,
    },
    "raecke": {
        "iterations": int,
        "epsilon": (int, float),
        "seed": int,
        "repeat": int,
    },
    "lp": {
        "tolerance": (int, float),
    },
    "run": {
        "systems": list,
        "out_dir": str,
        "workers": int,
    },
}


@dataclass(frozen=True)
class ExperimentConfig:
    """A fully resolved experiment: every knob explicit."""

    topology_file: str
    topology_format: str
    capacity_attr: str = "LinkSpeed"
    capacity_scale: float = 1.0
    default_capacity: float | None = None
    demand_file: str | None = None
    total_volume: float | None = None
    profile: str = "constant"
    steps: int = 1
    peak_scale: float = 1.0
    demand_seed: int = 0
    jitter: bool = True
    systems: tuple[str, ...] = ()
    budget: int = 4
    ksp_cost: str = "hop_count"
    all_paths_cap: int = 10000
    raecke_iterations: int = 8
    raecke_epsilon: float = 0.5
    raecke_seed: int = 0
    raecke_repeat: int = 1
    lp_tolerance: float = 1e-6
    out_dir: str = "out"
    workers: int = 1

    def resolved(self) -> dict:
        """Canonical nested dict of every setting, defaults included."""
        return {
            "topology": {
                "file": self.topology_file,
                "format": self.topology_format,
                "capacity_attr": self.capacity_attr,
                "capacity_scale": self.capacity_scale,
                "default_capacity": self.default_capacity,
            },
            "demands": {
                "file": self.demand_file,
                "total_volume": self.total_volume,
                "profile": self.profile,
                "steps": self.steps,
                "peak_scale": self.peak_scale,
                "seed": self.demand_seed,
                "jitter": self.jitter,
            },
            "paths": {
                "budget": self.budget,
                "ksp_cost": self.ksp_cost,
                "all_paths_cap": self.all_paths_cap,
            },
            "raecke": {
                "iterations": self.raecke_iterations,
                "epsilon": self.raecke_epsilon,
                "seed": self.raecke_seed,
                "repeat": self.raecke_repeat,
            },
            "lp": {"tolerance": self.lp_tolerance},
            "run": {
                "systems": list(self.systems),
                "out_dir": self.out_dir,
                "workers": self.workers,
            },
        }

    def config_hash(self) -> str:
        text = json.dumps(self.resolved(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()


def _check_schema(doc: dict) -> None:
    if not isinstance(doc, dict):
        raise ConfigError("configuration root must be a table")
    for section, body in doc.items():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        if not isinstance(body, dict):
            raise ConfigError(f"[{section}] must be a table")
        for key, value in body.items():
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key {section}.{key}")
            expected = _SCHEMA[section][key]
            if isinstance(value, bool) and expected is not bool:
                raise ConfigError(f"{section}.{key} has the wrong type")
            if not isinstance(value, expected):
                raise ConfigError(f"{section}.{key} has the wrong type")


def parse_config(text: str, base_dir: str = ".") -> ExperimentConfig:
    """Parse and validate a TOML config; file paths resolve from base_dir."""
    try:
        doc = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML: {exc}") from exc
    _check_schema(doc)

    topo = doc.get("topology", {})
    if "file" not in topo:
        raise ConfigError("topology.file is required")
    topo_file = os.path.abspath(os.path.join(base_dir, topo["file"]))
    if not os.path.isfile(topo_file):
        raise ConfigError(f"topology file not found: {topo_file}")
    fmt = topo.get("format")
    if fmt is None:
        ext = os.path.splitext(topo_file)[1].lower()
        if ext == ".graphml":
            fmt = "graphml"
        elif ext == ".json":
            fmt = "json"
        else:
            raise ConfigError(
                f"cannot infer topology format from {topo_file!r}; set topology.format"
            )
    if fmt not in ("graphml", "json"):
        raise ConfigError(f"unknown topology format {fmt!r}")

    dem = doc.get("demands", {})
    if "file" in dem and "total_volume" in dem:
        raise ConfigError(
            "demands.file and demands.total_volume conflict: "
            "pick a traffic-matrix file or a generated gravity model"
        )
    demand_file = dem.get("file")
    if demand_file is not None:
        demand_file = os.path.abspath(os.path.join(base_dir, demand_file))
        if not os.path.isfile(demand_file):
            raise ConfigError(f"traffic-matrix file not found: {demand_file}")
        for key in ("profile", "steps", "peak_scale", "seed", "jitter"):
            if key in dem:
                raise ConfigError(f"demands.{key} has no effect with demands.file")
    profile = dem.get("profile", "constant")
    if profile not in PROFILES:
        raise ConfigError(f"unknown profile {profile!r}; known: {', '.join(PROFILES)}")
    steps = dem.get("steps", 1)
    if steps < 1:
        raise ConfigError("demands.steps must be >= 1")
    peak_scale = float(dem.get("peak_scale", 1.0))
    if peak_scale <= 0:
        raise ConfigError("demands.peak_scale must be positive")
    total_volume = dem.get("total_volume")
    if total_volume is not None and total_volume < 0:
        raise ConfigError("demands.total_volume must be non-negative")

    run = doc.get("run", {})
    systems = run.get("systems")
    if not systems:
        raise ConfigError("run.systems is required and must be non-empty")
    for name in systems:
        if not isinstance(name, str) or name not in SYSTEM_NAMES:
            known = ", ".join(SYSTEM_NAMES)
            raise ConfigError(f"unknown system {name!r}; known systems: {known}")
    if len(set(systems)) != len(systems):
        raise ConfigError("run.systems contains duplicates")

    paths = doc.get("paths", {})
    budget = paths.get("budget", 4)
    if budget < 1:
        raise ConfigError("paths.budget must be >= 1")
    ksp_cost = paths.get("ksp_cost", "hop_count")
    if ksp_cost not in ("hop_count", "inverse_capacity"):
        raise ConfigError(f"unknown ksp_cost {ksp_cost!r}")
    all_paths_cap = paths.get("all_paths_cap", 10000)
    if all_paths_cap < 1:
        raise ConfigError("paths.all_paths_cap must be >= 1")

    raecke = doc.get("raecke", {})
    iterations = raecke.get("iterations", 8)
    if iterations < 1:
        raise ConfigError("raecke.iterations must be >= 1")
    epsilon = float(raecke.get("epsilon", 0.5))
    if epsilon <= 0:
        raise ConfigError("raecke.epsilon must be positive")
    repeat = raecke.get("repeat", 1)
    if repeat < 1:
        raise ConfigError("raecke.repeat must be >= 1")

    lp = doc.get("lp", {})
    tolerance = float(lp.get("tolerance", 1e-6))
    if tolerance <= 0:
        raise ConfigError("lp.tolerance must be positive")

    workers = run.get("workers", 1)
    if workers < 1:
        raise ConfigError("run.workers must be >= 1")

    capacity_scale = float(topo.get("capacity_scale", 1.0))
    if capacity_scale <= 0:
        raise ConfigError("topology.capacity_scale must be positive")
    default_capacity = topo.get("default_capacity")

    return ExperimentConfig(
        topology_file=topo_file,
        topology_format=fmt,
        capacity_attr=topo.get("capacity_attr", "LinkSpeed"),
        capacity_scale=capacity_scale,
        default_capacity=float(default_capacity) if default_capacity is not None else None,
        demand_file=demand_file,
        total_volume=float(total_volume) if total_volume is not None else None,
        profile=profile,
        steps=int(steps),
        peak_scale=peak_scale,
        demand_seed=int(dem.get("seed", 0)),
        jitter=bool(dem.get("jitter", True)),
        systems=tuple(systems),
        budget=int(budget),
        ksp_cost=ksp_cost,
        all_paths_cap=int(all_paths_cap),
        raecke_iterations=int(iterations),
        raecke_epsilon=epsilon,
        raecke_seed=int(raecke.get("seed", 0)),
        raecke_repeat=int(repeat),
        lp_tolerance=tolerance,
        out_dir=run.get("out_dir", "out"),
        workers=int(workers),
    )


def load_config(path: str) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_config(text, base_dir=os.path.dirname(os.path.abspath(path)))


def load_topology(cfg: ExperimentConfig) -> Topology:
    with open(cfg.topology_file, encoding="utf-8") as fh:
        source = fh.read()
    return parse_topology(
        source,
        cfg.topology_format,
        capacity_attr=cfg.capacity_attr,
        capacity_scale=cfg.capacity_scale,
        default_capacity=cfg.default_capacity,
    )


def build_demands(cfg: ExperimentConfig, t: Topology) -> TmSequence:
    """The demand sequence an experiment runs on.

    Either the traffic-matrix file verbatim, or a gravity model scaled
    by the configured profile. Without an explicit total volume the
    gravity model defaults to one tenth of the total link capacity — a
    loaded but not saturated starting point.
    """
    if cfg.demand_file is not None:
        seq = load_tm_sequence(cfg.demand_file)
        if seq.num_nodes > t.num_nodes:
            raise ConfigError(
                f"traffic matrix references node {seq.num_nodes - 1} "
                f"but the topology has {t.num_nodes} nodes"
            )
        if seq.num_nodes < t.num_nodes:
            # file omitted trailing zero-demand nodes: pad to the topology
            padded = []
            for tm in seq.steps:
                v = np.zeros((t.num_nodes, t.num_nodes))
                v[: seq.num_nodes, : seq.num_nodes] = tm.volumes
                padded.append(TrafficMatrix(v))
            seq = TmSequence(tuple(padded), dict(seq.metadata))
        return seq
    total = cfg.total_volume
    if total is None:
        total = float(t.capacities.sum()) / 10.0
    base = gravity_matrix(t, total)
    return make_tm_sequence(
        base,
        cfg.profile,
        cfg.steps,
        cfg.peak_scale,
        cfg.demand_seed,
        jitter=cfg.jitter,
    )
