"""Rate adaptation: LP construction and solving over fixed path sets.

Two objectives share one multicommodity skeleton (one variable per
admissible path, demand-sum equalities):

- load balance: minimize the common utilization bound r, with
  per-link rows  sum of path flows over the link <= c_l * r.  r is not
  capped at 1, so r > 1 reports how overloaded the network is.
- average delay: minimize sum_l r_l / c_l where r_l is the linearized
  delay cost of link l, lower-bounded by six cuts tangent to the M/M/1
  delay curve; the approximation is exact at utilizations
  {1/3, 2/3, 4/5, 9/10, 19/20} and keeps every flow pattern feasible
  (finite objective) even past capacity.

Everything is assembled sparse and solved with HiGHS; solutions are
accepted only when the reported optimum is primal-feasible within
tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .pathsel import PathSet
from .topology import Topology
from .traffic import TrafficMatrix

# Cuts r >= a*y - b*c of the piecewise-linear delay cost, as (a, b).
# Tangent segments touch the queueing-delay integral at utilizations
# 1/3, 2/3, 4/5, 9/10 and 19/20; the last ray makes overload expensive
# but never infeasible.
PIECES: tuple[tuple[float, float], ...] = (
    (3.0 / 2.0, 0.0),
    (9.0 / 2.0, 1.0),
    (15.0, 8.0),
    (50.0, 36.0),
    (200.0, 171.0),
    (4000.0, 3781.0),
)


def eval_piecewise_delay(z: float) -> float:
    """Piecewise-linear delay cost g(z) at utilization z = y/c (c = 1)."""
    if z < 0:
        raise ValueError(f"utilization must be non-negative, got {z}")
    return max(a * z - b for a, b in PIECES)


class LPStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    NUMERIC_FAILURE = "numeric_failure"


class RateAdaptError(ValueError):
    """Invalid LP input or unusable solution."""


@dataclass(frozen=True)
class LPModel:
    """Sparse LP min c^T v s.t. A_ub v <= b_ub, A_eq v = b_eq, v >= 0.

    flow_index maps each flow variable position to its (SD pair, path
    position within the path set); later variables (if any) are the
    objective's auxiliaries. unroutable lists pairs with positive
    demand but no admissible path; their demand is absent from the LP.
    """

    objective: str
    c: np.ndarray
    a_ub: sp.csr_matrix
    b_ub: np.ndarray
    a_eq: sp.csr_matrix
    b_eq: np.ndarray
    flow_index: tuple[tuple[tuple[int, int], int], ...]
    demands: dict[tuple[int, int], float]
    unroutable: tuple[tuple[int, int], ...]
    num_links: int

    @property
    def num_vars(self) -> int:
        return self.c.shape[0]


@dataclass(frozen=True)
class LPSolution:
    status: LPStatus
    objective: float | None
    values: np.ndarray | None
    model: LPModel


@dataclass(frozen=True)
class FlowAllocation:
    """Absolute flow and splitting ratio per admissible path.

    flows[pair][i] is the flow on the i-th path of the pair's path
    list; ratios are flows / demand, all zero for zero-demand pairs.
    unroutable carries over from the LP model.
    """

    flows: dict[tuple[int, int], np.ndarray]
    ratios: dict[tuple[int, int], np.ndarray]
    unroutable: tuple[tuple[int, int], ...]


def _skeleton(t: Topology, tm: TrafficMatrix, paths: PathSet):
    """Shared demand rows and link-incidence columns of both objectives."""
    if tm.volumes.shape[0] != t.num_nodes:
        raise RateAdaptError(
            f"traffic matrix is {tm.volumes.shape[0]}x{tm.volumes.shape[0]} "
            f"but the topology has {t.num_nodes} nodes"
        )
    flow_index: list[tuple[tuple[int, int], int]] = []
    demands: dict[tuple[int, int], float] = {}
    unroutable: list[tuple[int, int]] = []
    eq_rows: list[int] = []
    eq_cols: list[int] = []
    load_rows: list[int] = []  # (link, var) incidences
    load_cols: list[int] = []
    b_eq: list[float] = []
    for pair, volume in tm.demands():
        plist = paths.paths.get(pair, ())
        if not plist:
            if volume > 0:
                unroutable.append(pair)
            continue
        if volume <= 0:
            continue
        row = len(b_eq)
        demands[pair] = volume
        b_eq.append(volume)
        for pos, path in enumerate(plist):
            var = len(flow_index)
            flow_index.append((pair, pos))
            eq_rows.append(row)
            eq_cols.append(var)
            for lid in path.links:
                load_rows.append(lid)
                load_cols.append(var)
    return flow_index, demands, tuple(unroutable), eq_rows, eq_cols, load_rows, load_cols, b_eq


def build_lb_lp(t: Topology, tm: TrafficMatrix, paths: PathSet) -> LPModel:
    """Load-balance LP: variables [x_1..x_P, r], minimize r."""
    flow_index, demands, unroutable, eq_r, eq_c, ld_r, ld_c, b_eq = _skeleton(t, tm, paths)
    p = len(flow_index)
    l = t.num_links
    n = p + 1
    c = np.zeros(n)
    c[p] = 1.0
    a_eq = sp.coo_matrix(
        (np.ones(len(eq_r)), (eq_r, eq_c)), shape=(len(b_eq), n)
    ).tocsr()
    # link rows: sum of flows over link - c_l * r <= 0
    rows = ld_r + list(range(l))
    cols = ld_c + [p] * l
    vals = [1.0] * len(ld_r) + list(-t.capacities)
    a_ub = sp.coo_matrix((vals, (rows, cols)), shape=(l, n)).tocsr()
    return LPModel(
        objective="lb",
        c=c,
        a_ub=a_ub,
        b_ub=np.zeros(l),
        a_eq=a_eq,
        b_eq=np.asarray(b_eq),
        flow_index=tuple(flow_index),
        demands=demands,
        unroutable=unroutable,
        num_links=l,
    )


def build_ad_lp(t: Topology, tm: TrafficMatrix, paths: PathSet) -> LPModel:
    """Average-delay LP: variables [x_1..x_P, y_1..y_L, r_1..r_L].

    Minimizes sum_l r_l / c_l with per-link load equalities
    sum_{paths over l} x = y_l and six cut rows per link
    a_k y_l - r_l <= b_k c_l.
    """
    flow_index, demands, unroutable, eq_r, eq_c, ld_r, ld_c, b_eq = _skeleton(t, tm, paths)
    p = len(flow_index)
    l = t.num_links
    n = p + 2 * l
    c = np.zeros(n)
    c[p + l :] = 1.0 / t.capacities
    # demand equalities, then load equalities  sum x - y_l = 0
    eq_rows = eq_r + [len(b_eq) + lid for lid in ld_r] + [len(b_eq) + i for i in range(l)]
    eq_cols = eq_c + ld_c + [p + i for i in range(l)]
    eq_vals = [1.0] * (len(eq_r) + len(ld_r)) + [-1.0] * l
    a_eq = sp.coo_matrix(
        (eq_vals, (eq_rows, eq_cols)), shape=(len(b_eq) + l, n)
    ).tocsr()
    b_eq_full = np.concatenate([np.asarray(b_eq), np.zeros(l)])
    ub_rows: list[int] = []
    ub_cols: list[int] = []
    ub_vals: list[float] = []
    b_ub = np.empty(len(PIECES) * l)
    for k, (slope, intercept) in enumerate(PIECES):
        for lid in range(l):
            row = k * l + lid
            ub_rows.extend((row, row))
            ub_cols.extend((p + lid, p + l + lid))
            ub_vals.extend((slope, -1.0))
            b_ub[row] = intercept * t.capacities[lid]
    a_ub = sp.coo_matrix((ub_vals, (ub_rows, ub_cols)), shape=(len(PIECES) * l, n)).tocsr()
    return LPModel(
        objective="ad",
        c=c,
        a_ub=a_ub,
        b_ub=b_ub,
        a_eq=a_eq,
        b_eq=b_eq_full,
        flow_index=tuple(flow_index),
        demands=demands,
        unroutable=unroutable,
        num_links=l,
    )


_STATUS_MAP = {
    0: LPStatus.OPTIMAL,
    1: LPStatus.NUMERIC_FAILURE,  # iteration limit
    2: LPStatus.INFEASIBLE,
    3: LPStatus.UNBOUNDED,
    4: LPStatus.NUMERIC_FAILURE,
}


def solve_lp(model: LPModel, tolerance: float = 1e-6) -> LPSolution:
    """Solve with HiGHS and double-check primal feasibility.

    A solution only reports OPTIMAL when the solver succeeded and the
    returned point satisfies every row within tolerance; silent solver
    drift downgrades to NUMERIC_FAILURE instead of propagating.
    """
    if model.num_vars == 0 or model.b_eq.shape[0] == 0:
        # no routable positive demand: the zero solution is optimal
        values = np.zeros(model.num_vars)
        return LPSolution(LPStatus.OPTIMAL, 0.0, values, model)
    res = linprog(
        model.c,
        A_ub=model.a_ub,
        b_ub=model.b_ub,
        A_eq=model.a_eq,
        b_eq=model.b_eq,
        bounds=(0, None),
        method="highs",
    )
    status = _STATUS_MAP.get(res.status, LPStatus.NUMERIC_FAILURE)
    if status is not LPStatus.OPTIMAL:
        return LPSolution(status, None, None, model)
    values = np.asarray(res.x)
    eq_resid = float(np.max(np.abs(model.a_eq @ values - model.b_eq), initial=0.0))
    ub_resid = float(np.max(model.a_ub @ values - model.b_ub, initial=0.0))
    neg_resid = float(np.max(-values, initial=0.0))
    if max(eq_resid, ub_resid, neg_resid) > tolerance:
        return LPSolution(LPStatus.NUMERIC_FAILURE, None, None, model)
    return LPSolution(status, float(res.fun), values, model)


def to_allocation(
    solution: LPSolution, paths: PathSet, tm: TrafficMatrix, tolerance: float = 1e-6
) -> FlowAllocation:
    """Turn an optimal LP point into per-path flows and splitting ratios.

    Tiny negative values are clamped to zero and each demand's flows are
    rescaled to sum exactly to the demand; a clamp that moves any demand
    row by more than tolerance is an error, not a repair.
    """
    if solution.status is not LPStatus.OPTIMAL or solution.values is None:
        raise RateAdaptError(f"cannot allocate from a {solution.status.value} solution")
    model = solution.model
    flows: dict[tuple[int, int], np.ndarray] = {
        pair: np.zeros(len(plist)) for pair, plist in paths.paths.items() if plist
    }
    for var, (pair, pos) in enumerate(model.flow_index):
        flows[pair][pos] = max(0.0, float(solution.values[var]))
    ratios: dict[tuple[int, int], np.ndarray] = {}
    for pair, arr in flows.items():
        demand = model.demands.get(pair, 0.0)
        if demand <= 0:
            ratios[pair] = np.zeros_like(arr)
            continue
        total = float(arr.sum())
        if abs(total - demand) > max(tolerance, tolerance * demand):
            raise RateAdaptError(
                f"flows for pair {pair} sum to {total}, demand is {demand}"
            )
        arr *= demand / total
        ratios[pair] = arr / demand
    return FlowAllocation(flows=flows, ratios=ratios, unroutable=model.unroutable)


def min_max_util_bound(t: Topology, tm: TrafficMatrix, tolerance: float = 1e-6) -> float:
    """Optimal max-utilization bound r* with routing unrestricted.

    Source-aggregated edge formulation: per source, a flow variable on
    every link with conservation at every node; per link, total flow at
    most c_l * r. Equals the path formulation's optimum over all simple
    paths, without enumerating them. Demands whose destination is
    unreachable are excluded, matching path-based models that treat
    them as unroutable.
    """
    reachable = _reachable_sets(t)
    sources: list[int] = []
    supply: dict[int, dict[int, float]] = {}
    for (src, dst), volume in tm.demands():
        if volume <= 0 or dst not in reachable[src]:
            continue
        supply.setdefault(src, {})[dst] = supply.get(src, {}).get(dst, 0.0) + volume
    sources = sorted(supply)
    if not sources:
        return 0.0
    s_count, l, n_nodes = len(sources), t.num_links, t.num_nodes
    n = s_count * l + 1
    c = np.zeros(n)
    c[-1] = 1.0
    eq_rows: list[int] = []
    eq_cols: list[int] = []
    eq_vals: list[float] = []
    b_eq = np.zeros(s_count * n_nodes)
    for si, src in enumerate(sources):
        for link in t.links:
            var = si * l + link.id
            eq_rows.extend((si * n_nodes + link.src, si * n_nodes + link.dst))
            eq_cols.extend((var, var))
            eq_vals.extend((1.0, -1.0))
        total_out = sum(supply[src].values())
        b_eq[si * n_nodes + src] = total_out
        for dst, volume in supply[src].items():
            b_eq[si * n_nodes + dst] -= volume
    a_eq = sp.coo_matrix((eq_vals, (eq_rows, eq_cols)), shape=(s_count * n_nodes, n)).tocsr()
    ub_rows = [lid for _ in range(s_count) for lid in range(l)] + list(range(l))
    ub_cols = list(range(s_count * l)) + [n - 1] * l
    ub_vals = [1.0] * (s_count * l) + list(-t.capacities)
    a_ub = sp.coo_matrix((ub_vals, (ub_rows, ub_cols)), shape=(l, n)).tocsr()
    res = linprog(
        c,
        A_ub=a_ub,
        b_ub=np.zeros(l),
        A_eq=a_eq,
        b_eq=b_eq,
        bounds=(0, None),
        method="highs",
    )
    if res.status != 0:
        raise RateAdaptError(f"edge-formulation LP failed: {res.message}")
    return float(res.fun)


def _reachable_sets(t: Topology) -> list[set[int]]:
    out = [set() for _ in range(t.num_nodes)]
    for src in range(t.num_nodes):
        seen = {src}
        stack = [src]
        while stack:
            u = stack.pop()
            for lid in t.out_links[u]:
                v = t.links[lid].dst
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        out[src] = seen - {src}
    return out


def lp_text(model: LPModel) -> str:
    """Human-readable LP dump (CPLEX LP text format)."""
    names: list[str] = []
    for pair, pos in model.flow_index:
        names.append(f"x_{pair[0]}_{pair[1]}_{pos}")
    extra = model.num_vars - len(model.flow_index)
    if model.objective == "lb":
        names.append("r")
    else:
        names.extend(f"y_{i}" for i in range(model.num_links))
        names.extend(f"r_{i}" for i in range(model.num_links))
    if len(names) != model.num_vars:
        raise RateAdaptError("variable naming does not cover the model")

    def terms(row: sp.csr_matrix) -> str:
        parts = []
        for col, val in zip(row.indices, row.data):
            sign = "-" if val < 0 else "+"
            mag = abs(val)
            coeff = "" if mag == 1 else f"{mag:g} "
            parts.append(f"{sign} {coeff}{names[col]}")
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else text

    lines = ["Minimize", f" obj: {terms(sp.csr_matrix(model.c))}", "Subject To"]
    a_eq = model.a_eq.tocsr()
    for i in range(a_eq.shape[0]):
        lines.append(f" e{i}: {terms(a_eq[i])} = {model.b_eq[i]:g}")
    a_ub = model.a_ub.tocsr()
    for i in range(a_ub.shape[0]):
        lines.append(f" u{i}: {terms(a_ub[i])} <= {model.b_ub[i]:g}")
    lines.extend(["Bounds"] + [f" 0 <= {name}" for name in names] + ["End"])
    return "\n".join(lines) + "\n"
