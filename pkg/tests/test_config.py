import pytest
from hypothesis import given, strategies as st

from swexner.config import ConfigError, RunConfig, emit_config, parse_config, with_overrides


class TestParse:
    def test_dune_defaults(self):
        cfg = parse_config("scenario = dune1d\n")
        assert cfg.cells == (2000,) and cfg.t_end == 700.0 and cfg.cfl == 0.5

    def test_flag_only(self):
        cfg = parse_config("", {"scenario": "antidune1d"})
        assert cfg.cells == (2400,) and cfg.t_end == 50.0 and cfg.ag == 0.001

    def test_bump_defaults_depend_on_transport(self):
        assert parse_config("scenario = bump2d").t_end == 500.0
        assert parse_config("scenario = bump2d\nag = 0.1").t_end == 1000.0

    def test_comments_and_blank_lines(self):
        cfg = parse_config("# run\n\nscenario = bump2d  # 2D\ncells = 64x32\nworkers = 2x2\n")
        assert cfg.cells == (64, 32) and cfg.workers == (2, 2)

    def test_flags_override_file(self):
        cfg = parse_config("scenario = dune1d\ncfl = 0.4", {"cfl": "0.9", "cells": None})
        assert cfg.cfl == 0.9 and cfg.cells == (2000,)

    @pytest.mark.parametrize("text,line", [
        ("scenario = dune1d\ncfl = 1.5", 2),
        ("scenario = dune1d\n\nspeed = 3", 3),
        ("scenario = dune1d\ncells = abc", 2),
        ("scenario = dune1d\nno equals sign", 2),
        ("scenario = river", 1),
    ])
    def test_errors_carry_line(self, text, line):
        with pytest.raises(ConfigError) as err:
            parse_config(text)
        assert err.value.line == line
        assert f"line {line}" in str(err.value)

    def test_missing_scenario(self):
        with pytest.raises(ConfigError, match="scenario"):
            parse_config("cfl = 0.3")

    def test_law_validation(self):
        with pytest.raises(ConfigError):
            parse_config("scenario = dune1d\nmg = 7")

    def test_snapshot_schedule(self):
        cfg = parse_config("scenario = dune1d\nt_end = 10\nsnap_every = 4\nsnap_at = 5,1")
        assert cfg.snapshot_times() == (0.0, 1.0, 4.0, 5.0, 8.0)

    def test_worker_count_gets_layout(self):
        cfg = parse_config("scenario = bump2d\nworkers = 4")
        assert cfg.layout(2) == (2, 2)

    def test_build_scenario_uses_law(self):
        cfg = parse_config("scenario = dune1d\ncells = 40\nlaw = mpm\nfriction = darcy-weisbach")
        sc = cfg.build_scenario()
        assert sc.grid.nx == 40 and sc.law.kind == "mpm" and sc.law.friction.kind == "darcy-weisbach"

    def test_wrong_cell_shape(self):
        with pytest.raises(ConfigError):
            parse_config("scenario = bump2d\ncells = 40").build_scenario()


names = st.sampled_from(["dune1d", "antidune1d", "bump2d"])


@given(names, st.integers(10, 5000), st.floats(0.01, 1.0), st.floats(1.0, 3.0), st.floats(0.0, 5.0),
       st.floats(1.0, 4.0), st.booleans(), st.lists(st.floats(0, 100), max_size=4), st.integers(1, 8),
       st.sampled_from(["grass", "mpm", "camenen"]))
def test_emit_parse_roundtrip(name, n, cfl, safety, ag, mg, corners, snaps, w, law):
    cells = (n, n // 2 + 10) if name == "bump2d" else (n,)
    cfg = RunConfig(scenario=name, cells=cells, t_end=12.5, cfl=cfl, safety=safety, ag=ag, mg=mg,
                    corners=corners, snap_at=tuple(sorted(snaps)), workers=(w, 0), law=law)
    assert parse_config(emit_config(cfg)) == cfg


def test_with_overrides():
    cfg = parse_config("scenario = dune1d")
    assert with_overrides(cfg, cfl=0.3, out=None).cfl == 0.3
