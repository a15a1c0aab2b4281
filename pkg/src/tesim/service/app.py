"""FastAPI application exposing the simulation core.

The service is stateless: every request carries a full TOML config (a
file's text plus the directory its relative paths resolve from).
Domain errors (bad config, malformed topology or traffic files,
unsolvable runs) surface as 422 with a human-readable detail; file
contents never leave the request/response bodies, so the service can
front either a local CLI or a remote deployment.
"""

from __future__ import annotations

import dataclasses
import json

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..config import ConfigError, ExperimentConfig, build_demands, load_topology, parse_config
from ..pathsel import PathError, build_path_set, pathset_to_json
from ..raecke import RoutingTreeError, extract_weighted_paths, raecke_distribution
from ..rateadapt import RateAdaptError
from ..simulate import (
    SimulationError,
    TeSystem,
    report_csvs,
    run_experiment,
)
from ..topology import TopologyError, validate_topology
from ..traffic import TrafficMatrixError
from .schemas import (
    ConfigRequest,
    PathSetDoc,
    PathsResponse,
    RunRequest,
    RunResponse,
    ValidateResponse,
)

_DOMAIN_ERRORS = (
    ConfigError,
    TopologyError,
    TrafficMatrixError,
    PathError,
    RateAdaptError,
    SimulationError,
    RoutingTreeError,
)


def create_app() -> FastAPI:
    app = FastAPI(title="tesim", version=__version__)

    def _parse(req: ConfigRequest) -> ExperimentConfig:
        return parse_config(req.config, base_dir=req.base_dir)

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/config/validate", response_model=ValidateResponse)
    def validate(req: ConfigRequest) -> ValidateResponse:
        try:
            cfg = _parse(req)
            t = load_topology(cfg)
            violations = validate_topology(t)
            if violations:
                lines = "; ".join(f"{v.entity}: {v.rule}" for v in violations)
                raise ConfigError(f"topology fails validation: {lines}")
            build_demands(cfg, t)
        except _DOMAIN_ERRORS as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return ValidateResponse(valid=True, resolved=cfg.resolved(), config_hash=cfg.config_hash())

    @app.post("/paths", response_model=PathsResponse)
    def paths(req: RunRequest) -> PathsResponse:
        try:
            cfg = _apply_overrides(_parse(req), req)
            t = load_topology(cfg)
            docs: list[PathSetDoc] = []
            seen: set[str] = set()
            for name in cfg.systems:
                system = TeSystem.parse(name)
                if system.path_algo == "ksp":
                    label = "ksp"
                    if label in seen:
                        continue
                    ps = build_path_set(t, "ksp", cfg.budget, ksp_cost=cfg.ksp_cost)
                elif system.path_algo == "all_paths":
                    label = "all_paths"
                    if label in seen:
                        continue
                    ps = build_path_set(
                        t, "all_paths", cfg.budget, all_paths_cap=cfg.all_paths_cap
                    )
                else:
                    label = f"raecke_seed{cfg.raecke_seed}"
                    if label in seen:
                        continue
                    dist = raecke_distribution(
                        t,
                        iterations=cfg.raecke_iterations,
                        seed=cfg.raecke_seed,
                        epsilon=cfg.raecke_epsilon,
                    )
                    ps = build_path_set(t, extract_weighted_paths(dist, t).paths, cfg.budget)
                seen.add(label)
                docs.append(PathSetDoc(name=label, document=json.loads(pathset_to_json(ps, t))))
        except _DOMAIN_ERRORS as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        return PathsResponse(path_sets=docs)

    @app.post("/run", response_model=RunResponse)
    def run(req: RunRequest) -> RunResponse:
        try:
            cfg = _apply_overrides(_parse(req), req)
            t = load_topology(cfg)
            tms = build_demands(cfg, t)
            report = run_experiment(
                t,
                tms,
                list(cfg.systems),
                budget=cfg.budget,
                ksp_cost=cfg.ksp_cost,
                all_paths_cap=cfg.all_paths_cap,
                raecke_iterations=cfg.raecke_iterations,
                raecke_epsilon=cfg.raecke_epsilon,
                raecke_seed=cfg.raecke_seed,
                raecke_repeat=cfg.raecke_repeat,
                lp_tolerance=cfg.lp_tolerance,
                workers=cfg.workers,
                metadata={"config_hash": cfg.config_hash()},
            )
        except _DOMAIN_ERRORS as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        csvs = report_csvs(report)
        manifest = {
            "config_hash": cfg.config_hash(),
            "resolved_config": cfg.resolved(),
            "topology": {"nodes": t.num_nodes, "links": t.num_links},
            "demand_steps": len(tms),
            "systems": {
                label: {
                    "status": "failed" if series.failure else "ok",
                    "failure": series.failure,
                    "steps_completed": len(series.steps),
                }
                for label, series in sorted(report.series.items())
            },
            "outputs": sorted(csvs),
        }
        return RunResponse(csvs=csvs, manifest=manifest)

    return app


def _apply_overrides(cfg: ExperimentConfig, req: RunRequest) -> ExperimentConfig:
    if req.seed is not None:
        cfg = dataclasses.replace(cfg, demand_seed=req.seed, raecke_seed=req.seed)
    if req.systems is not None:
        unknown = [s for s in req.systems if s not in cfg.systems]
        if unknown:
            raise ConfigError(
                f"systems {unknown} are not in the configured set {list(cfg.systems)}"
            )
        if not req.systems:
            raise ConfigError("systems override must not be empty")
        cfg = dataclasses.replace(cfg, systems=tuple(req.systems))
    return cfg
