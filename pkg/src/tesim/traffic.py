"""Traffic matrices: gravity-model generation, stress sequences, CSV I/O.

All values are volumes per timestep in the same unit as link capacity.
Everything here is a pure function of its inputs (sequences derive all
randomness from an explicit seed), so results are reproducible and safe
to share across parallel runs.
"""

from __future__ import annotations

import io
import csv
import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .topology import Topology

TM_CSV_HEADER = ["step", "src", "dst", "volume"]

PROFILES = ("constant", "ramp", "sinusoid")


class TrafficMatrixError(ValueError):
    """Invalid traffic-matrix data or serialized form."""


@dataclass(frozen=True)
class TrafficMatrix:
    """Per-timestep demand volume for every ordered SD pair (diagonal zero)."""

    volumes: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.volumes, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise TrafficMatrixError("volumes must be a square matrix")
        if np.any(np.diagonal(v) != 0):
            raise TrafficMatrixError("diagonal volumes must be zero")
        if np.any(v < 0):
            raise TrafficMatrixError("volumes must be non-negative")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "volumes", v)

    @property
    def num_nodes(self) -> int:
        return self.volumes.shape[0]

    def total(self) -> float:
        return float(self.volumes.sum())

    def demands(self) -> Iterator[tuple[tuple[int, int], float]]:
        """Ordered (pair, volume) over off-diagonal entries."""
        n = self.num_nodes
        for i in range(n):
            for j in range(n):
                if i != j:
                    yield (i, j), float(self.volumes[i, j])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TrafficMatrix):
            return NotImplemented
        return self.volumes.shape == other.volumes.shape and bool(
            np.all(self.volumes == other.volumes)
        )


@dataclass(frozen=True)
class TmSequence:
    """Ordered traffic matrices, one per timestep, plus generator metadata."""

    steps: tuple[TrafficMatrix, ...]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.steps:
            raise TrafficMatrixError("sequence needs at least one step")
        n = self.steps[0].num_nodes
        if any(tm.num_nodes != n for tm in self.steps):
            raise TrafficMatrixError("all steps must share the same node count")

    @property
    def num_nodes(self) -> int:
        return self.steps[0].num_nodes

    def __len__(self) -> int:
        return len(self.steps)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TmSequence):
            return NotImplemented
        return self.steps == other.steps


def gravity_matrix(t: Topology, total_volume: float) -> TrafficMatrix:
    """Gravity-model traffic matrix from a capacity heuristic.

    Node weight w(i) is the total capacity of links incident to i (in
    plus out); volumes[i][j] = total_volume * w(i)w(j) / sum_{u!=v} w(u)w(v).
    Entries sum to total_volume.
    """
    if total_volume < 0:
        raise TrafficMatrixError("total_volume must be >= 0")
    n = t.num_nodes
    w = np.zeros(n)
    for link in t.links:
        w[link.src] += link.capacity
        w[link.dst] += link.capacity
    norm = float(np.outer(w, w).sum() - np.dot(w, w))
    if norm <= 0:
        raise TrafficMatrixError("all node weights are zero; gravity model undefined")
    vol = np.outer(w, w) * (total_volume / norm)
    np.fill_diagonal(vol, 0.0)
    return TrafficMatrix(vol)


def _profile_scales(profile: str, steps: int, peak_scale: float) -> np.ndarray:
    if profile == "constant":
        return np.full(steps, peak_scale)
    if profile == "ramp":
        if steps == 1:
            return np.array([peak_scale])
        return np.linspace(0.1, peak_scale, steps)
    if profile == "sinusoid":
        # mean 0.55*peak, amplitude 0.45*peak: one full period over the steps,
        # peaking at the quarter point and bottoming out at 0.1*peak
        i = np.arange(steps)
        return peak_scale * (0.55 + 0.45 * np.sin(2 * math.pi * i / steps))
    raise TrafficMatrixError(f"unknown profile {profile!r}")


def make_tm_sequence(
    base: TrafficMatrix,
    profile: str,
    steps: int,
    peak_scale: float,
    seed: int,
    *,
    jitter: bool = True,
) -> TmSequence:
    """Scale a base matrix into a time series with optional demand jitter.

    Each step is base * profile_scale(step), entrywise multiplied by
    Uniform[0.95, 1.05] jitter drawn from the seed (disable for exact
    scaling). Identical arguments always produce identical sequences.
    """
    if steps < 1:
        raise TrafficMatrixError("steps must be >= 1")
    if peak_scale <= 0:
        raise TrafficMatrixError("peak_scale must be > 0")
    scales = _profile_scales(profile, steps, peak_scale)
    n = base.num_nodes
    rng = np.random.default_rng(seed)
    noise = rng.uniform(0.95, 1.05, size=(steps, n, n)) if jitter else np.ones((steps, n, n))
    mats = []
    for s in range(steps):
        v = base.volumes * scales[s] * noise[s]
        np.fill_diagonal(v, 0.0)
        mats.append(TrafficMatrix(v))
    meta = {
        "generator": "scaled",
        "profile": profile,
        "steps": steps,
        "peak_scale": peak_scale,
        "seed": seed,
        "jitter": jitter,
    }
    return TmSequence(tuple(mats), meta)


def tm_to_csv(seq: TmSequence) -> str:
    """Serialize a sequence: header step,src,dst,volume, one row per
    off-diagonal entry, sorted by (step, src, dst)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TM_CSV_HEADER)
    for s, tm in enumerate(seq.steps):
        n = tm.num_nodes
        for i in range(n):
            for j in range(n):
                if i != j:
                    writer.writerow([s, i, j, repr(float(tm.volumes[i, j]))])
    return buf.getvalue()


def tm_from_csv(text: str) -> TmSequence:
    """Parse the CSV traffic-matrix format; rows may be in any order."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise TrafficMatrixError("empty traffic-matrix file") from None
    if header != TM_CSV_HEADER:
        raise TrafficMatrixError(f"bad header {header!r}, expected {TM_CSV_HEADER!r}")
    entries: dict[int, list[tuple[int, int, float]]] = {}
    max_node = -1
    for row_no, row in enumerate(reader, start=2):
        if not row:
            continue
        try:
            s, i, j = int(row[0]), int(row[1]), int(row[2])
            vol = float(row[3])
        except (ValueError, IndexError) as exc:
            raise TrafficMatrixError(f"row {row_no}: malformed ({exc})") from exc
        if s < 0 or i < 0 or j < 0:
            raise TrafficMatrixError(f"row {row_no}: negative index")
        if vol < 0:
            raise TrafficMatrixError(f"row {row_no}: negative volume {vol}")
        if i == j:
            if vol > 0:
                raise TrafficMatrixError(f"row {row_no}: nonzero diagonal volume")
            continue
        entries.setdefault(s, []).append((i, j, vol))
        max_node = max(max_node, i, j)
    if not entries:
        raise TrafficMatrixError("no demand rows")
    steps = sorted(entries)
    if steps != list(range(len(steps))):
        raise TrafficMatrixError(f"step indices must be contiguous from 0, got {steps}")
    n = max_node + 1
    mats = []
    for s in steps:
        v = np.zeros((n, n))
        step_max = -1
        for i, j, vol in entries[s]:
            v[i, j] = vol
            step_max = max(step_max, i, j)
        if step_max != max_node:
            raise TrafficMatrixError(f"dimension mismatch at step {s}")
        mats.append(TrafficMatrix(v))
    return TmSequence(tuple(mats), {"generator": "file"})


def load_tm_sequence(path: str) -> TmSequence:
    with open(path, encoding="utf-8") as fh:
        return tm_from_csv(fh.read())


def dump_tm_sequence(seq: TmSequence, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(tm_to_csv(seq))
