"""TOML config parsing, resolution, hashing and demand construction."""

import json

import numpy as np
import pytest

from tesim.config import (
    ConfigError,
    build_demands,
    load_config,
    load_topology,
    parse_config,
)
from tesim.topology import Link, Node, Topology, serialize_topology

TWO_NODE_JSON = serialize_topology(
    Topology([Node(0, "a"), Node(1, "b")], [Link(0, 0, 1, 10.0), Link(1, 1, 0, 10.0)])
)


@pytest.fixture
def workspace(tmp_path):
    (tmp_path / "net.json").write_text(TWO_NODE_JSON)
    return tmp_path


def minimal(extra: str = "") -> str:
    return (
        '[topology]\nfile = "net.json"\n\n'
        '[run]\nsystems = ["KSP+LB"]\n' + extra
    )


class TestParseConfig:
    def test_minimal_defaults(self, workspace):
        cfg = parse_config(minimal(), base_dir=str(workspace))
        assert cfg.topology_format == "json"
        assert cfg.budget == 4
        assert cfg.steps == 1
        assert cfg.lp_tolerance == 1e-6
        assert cfg.profile == "constant"
        assert cfg.total_volume is None
        assert cfg.systems == ("KSP+LB",)
        assert cfg.out_dir == "out"
        assert cfg.workers == 1
        assert cfg.raecke_iterations == 8
        assert cfg.raecke_epsilon == 0.5
        assert cfg.raecke_repeat == 1

    def test_format_inferred_from_extension(self, tmp_path):
        from importlib.resources import files

        source = (files("tesim") / "data" / "geant.graphml").read_text()
        (tmp_path / "net.graphml").write_text(source)
        cfg = parse_config(
            '[topology]\nfile = "net.graphml"\n\n[run]\nsystems = ["KSP+AD"]\n',
            base_dir=str(tmp_path),
        )
        assert cfg.topology_format == "graphml"
        assert load_topology(cfg).num_nodes == 38

    def test_unknown_extension_needs_format(self, tmp_path):
        (tmp_path / "net.dat").write_text(TWO_NODE_JSON)
        with pytest.raises(ConfigError, match="cannot infer topology format"):
            parse_config(
                '[topology]\nfile = "net.dat"\n\n[run]\nsystems = ["KSP+LB"]\n',
                base_dir=str(tmp_path),
            )
        cfg = parse_config(
            '[topology]\nfile = "net.dat"\nformat = "json"\n\n[run]\nsystems = ["KSP+LB"]\n',
            base_dir=str(tmp_path),
        )
        assert cfg.topology_format == "json"

    def test_missing_topology_file_key(self, workspace):
        with pytest.raises(ConfigError, match="topology.file is required"):
            parse_config('[run]\nsystems = ["KSP+LB"]\n', base_dir=str(workspace))

    def test_nonexistent_topology_file(self, workspace):
        with pytest.raises(ConfigError, match="topology file not found"):
            parse_config(
                '[topology]\nfile = "missing.json"\n\n[run]\nsystems = ["KSP+LB"]\n',
                base_dir=str(workspace),
            )

    def test_unknown_section(self, workspace):
        with pytest.raises(ConfigError, match=r"unknown section \[paths2\]"):
            parse_config(minimal("\n[paths2]\nbudget = 3\n"), base_dir=str(workspace))

    def test_unknown_key(self, workspace):
        with pytest.raises(ConfigError, match="unknown key paths.k"):
            parse_config(minimal("\n[paths]\nk = 3\n"), base_dir=str(workspace))

    def test_wrong_type(self, workspace):
        with pytest.raises(ConfigError, match="paths.budget has the wrong type"):
            parse_config(minimal('\n[paths]\nbudget = "four"\n'), base_dir=str(workspace))

    def test_bool_is_not_int(self, workspace):
        with pytest.raises(ConfigError, match="demands.steps has the wrong type"):
            parse_config(minimal("\n[demands]\nsteps = true\n"), base_dir=str(workspace))

    def test_invalid_toml(self, workspace):
        with pytest.raises(ConfigError, match="invalid TOML"):
            parse_config("topology = [", base_dir=str(workspace))

    def test_unknown_system(self, workspace):
        text = '[topology]\nfile = "net.json"\n\n[run]\nsystems = ["KSP+MLU"]\n'
        with pytest.raises(ConfigError, match="unknown system") as excinfo:
            parse_config(text, base_dir=str(workspace))
        assert "KSP+MLU" in str(excinfo.value)
        assert "OPTIMAL(AD)" in str(excinfo.value)

    def test_systems_required(self, workspace):
        with pytest.raises(ConfigError, match="run.systems is required"):
            parse_config('[topology]\nfile = "net.json"\n', base_dir=str(workspace))
        with pytest.raises(ConfigError, match="run.systems is required"):
            parse_config(
                '[topology]\nfile = "net.json"\n\n[run]\nsystems = []\n',
                base_dir=str(workspace),
            )

    def test_duplicate_systems(self, workspace):
        text = '[topology]\nfile = "net.json"\n\n[run]\nsystems = ["KSP+LB", "KSP+LB"]\n'
        with pytest.raises(ConfigError, match="duplicates"):
            parse_config(text, base_dir=str(workspace))

    def test_demand_file_conflicts_with_total_volume(self, workspace):
        (workspace / "tm.csv").write_text("step,src,dst,volume\n0,0,1,2.0\n")
        text = minimal('\n[demands]\nfile = "tm.csv"\ntotal_volume = 5.0\n')
        with pytest.raises(ConfigError, match="conflict"):
            parse_config(text, base_dir=str(workspace))

    def test_demand_file_excludes_generation_knobs(self, workspace):
        (workspace / "tm.csv").write_text("step,src,dst,volume\n0,0,1,2.0\n")
        text = minimal('\n[demands]\nfile = "tm.csv"\nsteps = 3\n')
        with pytest.raises(ConfigError, match="demands.steps has no effect"):
            parse_config(text, base_dir=str(workspace))

    def test_missing_demand_file(self, workspace):
        text = minimal('\n[demands]\nfile = "tm.csv"\n')
        with pytest.raises(ConfigError, match="traffic-matrix file not found"):
            parse_config(text, base_dir=str(workspace))

    def test_range_guards(self, workspace):
        cases = [
            ("[demands]\nsteps = 0\n", "steps must be >= 1"),
            ("[demands]\npeak_scale = 0.0\n", "peak_scale must be positive"),
            ("[demands]\ntotal_volume = -1.0\n", "total_volume must be non-negative"),
            ("[demands]\nprofile = 'square'\n", "unknown profile"),
            ("[paths]\nbudget = 0\n", "budget must be >= 1"),
            ("[paths]\nksp_cost = 'latency'\n", "unknown ksp_cost"),
            ("[paths]\nall_paths_cap = 0\n", "all_paths_cap must be >= 1"),
            ("[raecke]\niterations = 0\n", "iterations must be >= 1"),
            ("[raecke]\nepsilon = 0.0\n", "epsilon must be positive"),
            ("[raecke]\nrepeat = 0\n", "repeat must be >= 1"),
            ("[lp]\ntolerance = 0.0\n", "tolerance must be positive"),
        ]
        for snippet, msg in cases:
            with pytest.raises(ConfigError, match=msg):
                parse_config(minimal("\n" + snippet), base_dir=str(workspace))
        with pytest.raises(ConfigError, match="capacity_scale must be positive"):
            parse_config(
                '[topology]\nfile = "net.json"\ncapacity_scale = 0.0\n\n'
                '[run]\nsystems = ["KSP+LB"]\n',
                base_dir=str(workspace),
            )
        with pytest.raises(ConfigError, match="workers must be >= 1"):
            parse_config(
                '[topology]\nfile = "net.json"\n\n'
                '[run]\nsystems = ["KSP+LB"]\nworkers = 0\n',
                base_dir=str(workspace),
            )

    def test_load_config_resolves_relative_to_file(self, workspace):
        cfg_path = workspace / "exp.toml"
        cfg_path.write_text(minimal())
        cfg = load_config(str(cfg_path))
        assert cfg.topology_file == str(workspace / "net.json")


class TestResolvedAndHash:
    def test_resolved_round_trips_as_json(self, workspace):
        cfg = parse_config(minimal(), base_dir=str(workspace))
        doc = cfg.resolved()
        assert json.loads(json.dumps(doc)) == doc
        assert doc["paths"]["budget"] == 4
        assert doc["run"]["systems"] == ["KSP+LB"]

    def test_hash_stable_and_sensitive(self, workspace):
        a = parse_config(minimal(), base_dir=str(workspace))
        b = parse_config(minimal(), base_dir=str(workspace))
        c = parse_config(minimal("\n[paths]\nbudget = 5\n"), base_dir=str(workspace))
        assert a.config_hash() == b.config_hash()
        assert a.config_hash() != c.config_hash()
        assert len(a.config_hash()) == 64

    def test_explicit_defaults_hash_like_omitted(self, workspace):
        explicit = minimal("\n[paths]\nbudget = 4\n")
        assert (
            parse_config(minimal(), base_dir=str(workspace)).config_hash()
            == parse_config(explicit, base_dir=str(workspace)).config_hash()
        )


class TestBuildDemands:
    def test_gravity_defaults_to_tenth_of_capacity(self, workspace):
        cfg = parse_config(
            minimal("\n[demands]\njitter = false\n"), base_dir=str(workspace)
        )
        t = load_topology(cfg)
        tms = build_demands(cfg, t)
        assert len(tms) == 1
        # total capacity 20 -> default volume 2
        assert tms.steps[0].total() == pytest.approx(2.0)

    def test_jitter_on_by_default(self, workspace):
        cfg = parse_config(minimal(), base_dir=str(workspace))
        t = load_topology(cfg)
        total = build_demands(cfg, t).steps[0].total()
        assert total != 2.0
        assert 0.95 * 2.0 <= total <= 1.05 * 2.0

    def test_gravity_with_profile(self, workspace):
        text = minimal(
            "\n[demands]\ntotal_volume = 8.0\nprofile = 'ramp'\nsteps = 4\njitter = false\n"
        )
        cfg = parse_config(text, base_dir=str(workspace))
        t = load_topology(cfg)
        tms = build_demands(cfg, t)
        assert len(tms) == 4
        totals = [tm.total() for tm in tms.steps]
        assert totals[0] == pytest.approx(0.8)
        assert totals[-1] == pytest.approx(8.0)

    def test_demand_file_loaded_verbatim(self, workspace):
        (workspace / "tm.csv").write_text(
            "step,src,dst,volume\n0,0,1,2.0\n1,0,1,3.0\n"
        )
        cfg = parse_config(minimal('\n[demands]\nfile = "tm.csv"\n'), base_dir=str(workspace))
        t = load_topology(cfg)
        tms = build_demands(cfg, t)
        assert len(tms) == 2
        assert tms.steps[1].volumes[0, 1] == 3.0

    def test_demand_file_padded_to_topology(self, tmp_path):
        # file mentions only nodes 0 and 1 -> padded to the 3-node topology
        triangle = Topology(
            [Node(0, "a"), Node(1, "b"), Node(2, "c")],
            [
                Link(0, 0, 1, 5.0), Link(1, 1, 0, 5.0),
                Link(2, 1, 2, 5.0), Link(3, 2, 1, 5.0),
            ],
        )
        (tmp_path / "net.json").write_text(serialize_topology(triangle))
        (tmp_path / "tm.csv").write_text("step,src,dst,volume\n0,0,1,2.5\n")
        cfg = parse_config(minimal('\n[demands]\nfile = "tm.csv"\n'), base_dir=str(tmp_path))
        t = load_topology(cfg)
        tms = build_demands(cfg, t)
        assert tms.steps[0].volumes.shape == (3, 3)
        assert tms.steps[0].volumes[0, 1] == 2.5
        assert tms.steps[0].total() == 2.5

    def test_demand_file_larger_than_topology(self, workspace):
        (workspace / "tm.csv").write_text("step,src,dst,volume\n0,0,5,2.0\n")
        cfg = parse_config(minimal('\n[demands]\nfile = "tm.csv"\n'), base_dir=str(workspace))
        t = load_topology(cfg)
        with pytest.raises(ConfigError, match="references node 5"):
            build_demands(cfg, t)

    def test_seed_controls_jitter(self, workspace):
        text = minimal("\n[demands]\ntotal_volume = 8.0\nsteps = 2\nseed = 3\n")
        cfg = parse_config(text, base_dir=str(workspace))
        t = load_topology(cfg)
        assert build_demands(cfg, t) == build_demands(cfg, t)
        other = parse_config(
            minimal("\n[demands]\ntotal_volume = 8.0\nsteps = 2\nseed = 4\n"),
            base_dir=str(workspace),
        )
        assert build_demands(cfg, t) != build_demands(other, t)
