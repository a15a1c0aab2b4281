"""End-to-end simulation: TE systems driven over a demand sequence.

A TE system pairs a path-selection algorithm with an LP objective.
Paths are computed once per experiment (routing stays static); each
demand step re-solves the rate adaptation LP on the fixed paths, places
the flows, applies a proportional drop model on overloaded links, and
records throughput, utilization and latency metrics.

CSV emission lives here too, as the stable interchange surface:
curves are keyed by (system, step) with float cells written via repr
so equal runs produce byte-identical files.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .pathsel import PathSet, build_path_set
from .raecke import extract_weighted_paths, raecke_distribution
from .rateadapt import (
    FlowAllocation,
    LPStatus,
    RateAdaptError,
    build_ad_lp,
    build_lb_lp,
    solve_lp,
    to_allocation,
)
from .topology import Topology
from .traffic import TmSequence, TrafficMatrix


class SimulationError(ValueError):
    """Inconsistent simulation input (flows, paths and topology disagree)."""


SYSTEM_TABLE: dict[str, tuple[str, str]] = {
    "KSP+LB": ("ksp", "lb"),
    "KSP+AD": ("ksp", "ad"),
    "RACKE+LB": ("raecke", "lb"),
    "RACKE+AD": ("raecke", "ad"),
    "OPTIMAL(LB)": ("all_paths", "lb"),
    "OPTIMAL(AD)": ("all_paths", "ad"),
}

SYSTEM_NAMES: tuple[str, ...] = tuple(SYSTEM_TABLE)


@dataclass(frozen=True)
class TeSystem:
    """A named TE system: path algorithm plus LP objective."""

    name: str
    path_algo: str
    objective: str

    @classmethod
    def parse(cls, name: str) -> "TeSystem":
        if name not in SYSTEM_TABLE:
            known = ", ".join(SYSTEM_NAMES)
            raise SimulationError(f"unknown system {name!r}; known systems: {known}")
        algo, objective = SYSTEM_TABLE[name]
        return cls(name, algo, objective)


@dataclass(frozen=True)
class LatencySample:
    """Latency of one path at one step, weighted by its delivered volume."""

    src: int
    dst: int
    path_idx: int
    latency: float
    delivered: float


@dataclass(frozen=True)
class StepMetrics:
    step: int
    throughput: float
    max_utilization: float
    link_utilization: np.ndarray
    latency_samples: tuple[LatencySample, ...]
    offered_loads: np.ndarray
    delivered_loads: np.ndarray


@dataclass
class SystemSeries:
    """Per-step metrics of one system run; failure marks an aborted run."""

    label: str
    system: TeSystem
    steps: list[StepMetrics] = field(default_factory=list)
    failure: str | None = None


@dataclass
class ExperimentReport:
    topology: Topology
    series: dict[str, SystemSeries]
    metadata: dict


def place_flows(alloc: FlowAllocation, paths: PathSet, t: Topology) -> np.ndarray:
    """Offered per-link loads from a flow allocation (no capacity awareness)."""
    loads = np.zeros(t.num_links)
    for pair, arr in alloc.flows.items():
        plist = paths.paths.get(pair)
        if plist is None or len(plist) != arr.shape[0]:
            raise SimulationError(f"allocation for pair {pair} does not match the path set")
        for flow, path in zip(arr, plist):
            if flow == 0.0:
                continue
            for lid in path.links:
                loads[lid] += flow
    return loads


def apply_drop_model(
    alloc: FlowAllocation, loads: np.ndarray, paths: PathSet, t: Topology
) -> tuple[dict[tuple[int, int], np.ndarray], np.ndarray]:
    """Proportional drops on overloaded links.

    Every link forwards the fraction s_l = min(1, c_l / y_l) of its
    offered load (1 when idle); a path delivers its flow times the
    product of the survival fractions along it. Returns the delivered
    volume per (pair, path) and per-link loads recomputed from the
    delivered volumes.
    """
    caps = t.capacities
    survival = np.minimum(
        1.0, np.divide(caps, loads, out=np.ones(t.num_links), where=loads > 0)
    )
    delivered: dict[tuple[int, int], np.ndarray] = {}
    delivered_loads = np.zeros(t.num_links)
    for pair, arr in alloc.flows.items():
        plist = paths.paths[pair]
        out = np.zeros_like(arr)
        for i, (flow, path) in enumerate(zip(arr, plist)):
            if flow == 0.0:
                continue
            kept = flow * float(np.prod(survival[list(path.links)]))
            out[i] = kept
            for lid in path.links:
                delivered_loads[lid] += kept
        delivered[pair] = out
    return delivered, delivered_loads


def compute_metrics(
    step: int,
    alloc: FlowAllocation,
    delivered: dict[tuple[int, int], np.ndarray],
    tm: TrafficMatrix,
    paths: PathSet,
    t: Topology,
    offered_loads: np.ndarray | None = None,
    delivered_loads: np.ndarray | None = None,
) -> StepMetrics:
    """Throughput, utilization and latency for one simulated step.

    Utilization is measured on offered loads (what rate adaptation asked
    of each link); latency is measured on delivered loads (what actually
    crossed each link), with per-link delay l/(c - l) and the load
    clamped to 0.999c so saturated links report a large finite delay.
    Both load vectors are recomputed if not passed in.
    """
    if offered_loads is None:
        offered_loads = place_flows(alloc, paths, t)
    if delivered_loads is None:
        _, delivered_loads = apply_drop_model(alloc, offered_loads, paths, t)
    caps = t.capacities
    total_demand = tm.total()
    total_delivered = float(sum(arr.sum() for arr in delivered.values()))
    throughput = 1.0 if total_demand == 0 else total_delivered / total_demand
    utilization = offered_loads / caps if t.num_links else np.zeros(0)
    max_util = float(np.max(utilization, initial=0.0))
    clamped = np.minimum(delivered_loads, 0.999 * caps)
    per_link_delay = np.divide(
        clamped, caps - clamped, out=np.zeros(t.num_links), where=caps > clamped
    )
    samples: list[LatencySample] = []
    for pair in sorted(delivered):
        if float(tm.volumes[pair[0], pair[1]]) <= 0:
            continue
        for i, path in enumerate(paths.paths[pair]):
            latency = float(sum(per_link_delay[lid] for lid in path.links))
            samples.append(
                LatencySample(pair[0], pair[1], i, latency, float(delivered[pair][i]))
            )
    return StepMetrics(
        step=step,
        throughput=throughput,
        max_utilization=max_util,
        link_utilization=utilization,
        latency_samples=tuple(samples),
        offered_loads=offered_loads,
        delivered_loads=delivered_loads,
    )


def peak_step(tms: TmSequence) -> int:
    """Index of the step with the largest total demand (first on ties)."""
    totals = [tm.total() for tm in tms.steps]
    return int(np.argmax(totals))


def bottleneck_fraction(series: SystemSeries, tms: TmSequence) -> float:
    """Fraction of links at or above utilization 1 at the peak-demand step."""
    idx = peak_step(tms)
    if idx >= len(series.steps):
        raise SimulationError(f"series {series.label!r} has no step {idx}")
    util = series.steps[idx].link_utilization
    if util.shape[0] == 0:
        return 0.0
    return float(np.mean(util >= 1.0 - 1e-9))


def _build_path_sets(
    t: Topology,
    tasks: list[tuple[str, TeSystem, int | None]],
    *,
    budget: int,
    ksp_cost: str,
    all_paths_cap: int,
    raecke_iterations: int,
    raecke_epsilon: float,
) -> dict[tuple, PathSet]:
    cache: dict[tuple, PathSet] = {}
    for _, system, seed in tasks:
        if system.path_algo == "ksp":
            key = ("ksp",)
            if key not in cache:
                cache[key] = build_path_set(t, "ksp", budget, ksp_cost=ksp_cost)
        elif system.path_algo == "all_paths":
            key = ("all_paths",)
            if key not in cache:
                cache[key] = build_path_set(t, "all_paths", budget, all_paths_cap=all_paths_cap)
        else:
            key = ("raecke", seed)
            if key not in cache:
                dist = raecke_distribution(
                    t, iterations=raecke_iterations, seed=seed, epsilon=raecke_epsilon
                )
                weighted = extract_weighted_paths(dist, t)
                cache[key] = build_path_set(t, weighted.paths, budget)
    return cache


def _run_system(
    args: tuple[str, TeSystem, Topology, PathSet, TmSequence, float]
) -> SystemSeries:
    label, system, t, paths, tms, tolerance = args
    series = SystemSeries(label=label, system=system)
    build = build_lb_lp if system.objective == "lb" else build_ad_lp
    for step, tm in enumerate(tms.steps):
        model = build(t, tm, paths)
        solution = solve_lp(model, tolerance=tolerance)
        if solution.status is not LPStatus.OPTIMAL:
            series.failure = f"step {step}: LP {solution.status.value}"
            return series
        try:
            alloc = to_allocation(solution, paths, tm, tolerance=tolerance)
            offered = place_flows(alloc, paths, t)
            delivered, delivered_loads = apply_drop_model(alloc, offered, paths, t)
        except (RateAdaptError, SimulationError) as exc:
            series.failure = f"step {step}: {exc}"
            return series
        series.steps.append(
            compute_metrics(
                step, alloc, delivered, tm, paths, t,
                offered_loads=offered, delivered_loads=delivered_loads,
            )
        )
    return series


def run_experiment(
    t: Topology,
    tms: TmSequence,
    systems: list[str],
    *,
    budget: int = 4,
    ksp_cost: str = "hop_count",
    all_paths_cap: int = 10000,
    raecke_iterations: int = 8,
    raecke_epsilon: float = 0.5,
    raecke_seed: int = 0,
    raecke_repeat: int = 1,
    lp_tolerance: float = 1e-6,
    workers: int = 1,
    metadata: dict | None = None,
) -> ExperimentReport:
    """Run the named systems over the demand sequence.

    Tree-based systems repeat raecke_repeat times with seeds
    raecke_seed, raecke_seed+1, ... and label the runs NAME#1..#R so
    randomized-run spread stays visible. A failing system records its
    failure and does not interrupt the others. workers > 1 distributes
    whole system runs over processes; path sets are always built once,
    up front, and shared.
    """
    tasks: list[tuple[str, TeSystem, int | None]] = []
    for name in systems:
        system = TeSystem.parse(name)
        if system.path_algo == "raecke" and raecke_repeat > 1:
            for k in range(raecke_repeat):
                tasks.append((f"{name}#{k + 1}", system, raecke_seed + k))
        elif system.path_algo == "raecke":
            tasks.append((name, system, raecke_seed))
        else:
            tasks.append((name, system, None))
    labels = [label for label, _, _ in tasks]
    if len(set(labels)) != len(labels):
        raise SimulationError(f"duplicate system labels in {labels}")

    cache = _build_path_sets(
        t,
        tasks,
        budget=budget,
        ksp_cost=ksp_cost,
        all_paths_cap=all_paths_cap,
        raecke_iterations=raecke_iterations,
        raecke_epsilon=raecke_epsilon,
    )

    def task_args(task):
        label, system, seed = task
        key = (system.path_algo,) if system.path_algo != "raecke" else ("raecke", seed)
        return (label, system, t, cache[key], tms, lp_tolerance)

    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_system, [task_args(task) for task in tasks]))
    else:
        results = [_run_system(task_args(task)) for task in tasks]
    series = {s.label: s for s in results}
    return ExperimentReport(topology=t, series=series, metadata=dict(metadata or {}))


THROUGHPUT_CSV_HEADER = "system,step,throughput"
UTILIZATION_CSV_HEADER = "system,step,link_id,utilization"
LATENCY_CSV_HEADER = "system,step,src,dst,path_idx,latency,delivered"
CAPACITY_CSV_HEADER = "link_id,capacity"


def _fmt(value: float) -> str:
    return repr(float(value))


def throughput_csv(report: ExperimentReport) -> str:
    rows = []
    for label in sorted(report.series):
        for m in report.series[label].steps:
            rows.append(f"{label},{m.step},{_fmt(m.throughput)}")
    return "\n".join([THROUGHPUT_CSV_HEADER] + rows) + "\n"


def link_utilization_csv(report: ExperimentReport) -> str:
    rows = []
    for label in sorted(report.series):
        for m in report.series[label].steps:
            for lid, util in enumerate(m.link_utilization):
                rows.append(f"{label},{m.step},{lid},{_fmt(util)}")
    return "\n".join([UTILIZATION_CSV_HEADER] + rows) + "\n"


def path_latency_csv(report: ExperimentReport) -> str:
    rows = []
    for label in sorted(report.series):
        for m in report.series[label].steps:
            for s in m.latency_samples:
                rows.append(
                    f"{label},{m.step},{s.src},{s.dst},{s.path_idx},"
                    f"{_fmt(s.latency)},{_fmt(s.delivered)}"
                )
    return "\n".join([LATENCY_CSV_HEADER] + rows) + "\n"


def capacity_csv(t: Topology) -> str:
    rows = [f"{link.id},{_fmt(link.capacity)}" for link in t.links]
    return "\n".join([CAPACITY_CSV_HEADER] + rows) + "\n"


def report_csvs(report: ExperimentReport) -> dict[str, str]:
    """All interchange CSVs of a report, keyed by canonical file name."""
    return {
        "throughput.csv": throughput_csv(report),
        "link_utilization.csv": link_utilization_csv(report),
        "path_latency.csv": path_latency_csv(report),
        "link_capacity.csv": capacity_csv(report.topology),
    }


def emit_outputs(report: ExperimentReport, out_dir: str) -> list[str]:
    """Write the report CSVs into out_dir; returns the written paths."""
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for name, text in report_csvs(report).items():
        path = os.path.join(out_dir, name)
        with open(path, "w", newline="") as fh:
            fh.write(text)
        written.append(path)
    return sorted(written)
