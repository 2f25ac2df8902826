import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from qdef_osc import cli
from qdef_osc.config import ConfigError, RunConfig, merge, natural_units_enabled, parse_config_text, parse_ratio
from qdef_osc.series import SeriesTable

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@given(arrays(np.float64, st.tuples(st.integers(0, 6), st.just(3)), elements=finite))
def test_table_round_trip(data):
    t = SeriesTable(("a", "b", "c"), data, {"gamma_q": 0.3, "note": "x", "n": [1, 2]})
    assert SeriesTable.from_csv(t.to_csv()) == t
    assert SeriesTable.from_json(t.to_json()) == t
    assert SeriesTable.from_csv(t.to_csv()).to_csv() == t.to_csv()


def test_table_rejects_ragged_and_duplicates():
    with pytest.raises(ValueError):
        SeriesTable(("a", "b"), np.zeros((3, 3)))
    with pytest.raises(ValueError):
        SeriesTable(("a", "a"), np.zeros((3, 2)))


def test_table_file_io(tmp_path):
    t = SeriesTable.from_columns({"x": [0.1, 1 / 3], "y": [2.0, -0.0]}, meta={"k": np.float64(1.5)})
    for fmt in ("csv", "json"):
        path = t.write(tmp_path / f"t.{fmt}")
        assert SeriesTable.read(path) == t
        assert b"\r\n" not in path.read_bytes()


def test_config_parsing():
    vals = parse_config_text("# comment\ngamma = 0.1, 0.2\nout=res  # trailing\n")
    assert vals["gamma"][0] == "0.1, 0.2"
    with pytest.raises(ConfigError, match=":2:"):
        parse_config_text("a=1\nbogus\n")
    with pytest.raises(ConfigError, match="duplicate"):
        parse_config_text("a=1\na=2\n")
    assert parse_ratio("4/3", "ratio") == pytest.approx(4 / 3)


def test_merge_precedence():
    merged = merge({"a": "1", "b": "2", "c": "3"}, {"b": ("20", "f:1"), "c": ("30", "f:2")}, {"c": "300", "a": None})
    assert merged == {"a": ("1", "default"), "b": ("20", "f:1"), "c": ("300", "command line")}
    with pytest.raises(ConfigError, match="unknown key"):
        merge({"a": "1"}, {"z": ("1", "f:3")}, {})


def test_run_config_validation():
    with pytest.raises(ConfigError):
        RunConfig("x", format="xml").validate()
    with pytest.raises(ConfigError):
        RunConfig("x", samples=2).validate()


def test_natural_units_env():
    assert natural_units_enabled({})
    assert not natural_units_enabled({"QDEF_OSC_NATURAL_UNITS": "0"})
    with pytest.raises(ConfigError):
        natural_units_enabled({"QDEF_OSC_NATURAL_UNITS": "yes"})


NAT = {"QDEF_OSC_NATURAL_UNITS": "1"}


@pytest.mark.parametrize("cmd,extra", [
    ("classical", ["--gamma", "0.5,2"]),
    ("phase-space", ["--gamma", "0.5,1.5"]),
    ("lissajous", []),
    ("spectrum", []),
    ("wavefunctions", ["--gamma", "0,0.3", "--n", "0,2"]),
    ("density2d", ["--extent", "3"]),
    ("correspondence", []),
    ("uncertainty", ["--gamma", "0.1,0.3"]),
])
def test_commands_write_tables(tmp_path, capsys, cmd, extra):
    for fmt in ("csv", "json"):
        out = tmp_path / fmt
        code = cli.main([cmd, "--out", str(out), "--format", fmt, "--samples", "200", *extra], environ=NAT)
        assert code == 0
        files = sorted(out.glob(f"*.{fmt}"))
        assert files
        for f in files:
            tab = SeriesTable.read(f)
            assert len(tab) > 0
            assert "software_version" in tab.meta
            # byte-stable re-emission
            assert (tab.to_csv() if fmt == "csv" else tab.to_json()) == f.read_text()


def test_uncertainty_bound_in_output(tmp_path):
    assert cli.main(["uncertainty", "--out", str(tmp_path)], environ=NAT) == 0
    tab = SeriesTable.read(tmp_path / "uncertainty.csv")
    assert np.all(tab["dxdp_over_hbar"] >= 0.5)


def test_q_flag_equivalent(tmp_path):
    cli.main(["spectrum", "--q", "0.7", "--out", str(tmp_path / "a")], environ=NAT)
    cli.main(["spectrum", "--gamma", "0.3", "--out", str(tmp_path / "b")], environ=NAT)
    a = sorted((tmp_path / "a").glob("*.csv"))
    b = sorted((tmp_path / "b").glob("*.csv"))
    assert [f.name for f in a] == [f.name for f in b]


@pytest.mark.parametrize("argv,env,code", [
    (["spectrum", "--gamma", ""], NAT, 1),
    (["wavefunctions", "--gamma", "0.3", "--n", "11"], NAT, 1),
    (["spectrum", "--gamma", "abc"], NAT, 1),
    (["spectrum", "--m0", "2"], NAT, 1),
    (["spectrum"], {"QDEF_OSC_NATURAL_UNITS": "0"}, 1),
    (["spectrum"], {"QDEF_OSC_NATURAL_UNITS": "maybe"}, 1),
    (["nonsense"], NAT, 1),
    (["classical", "--gamma", "1"], NAT, 1),
    (["verify", "--mutation", "bogus"], NAT, 1),
])
def test_validation_exit_codes(tmp_path, argv, env, code):
    assert cli.main([*argv, "--out", str(tmp_path)] if argv[0] != "nonsense" else argv, environ=env) == code


def test_config_file_and_unknown_key(tmp_path, capsys):
    good = tmp_path / "run.cfg"
    good.write_text("gamma = 0.2\nformat = json\n")
    assert cli.main(["spectrum", "--config", str(good), "--out", str(tmp_path / "o")], environ=NAT) == 0
    assert (tmp_path / "o" / "spectrum.json").exists() or list((tmp_path / "o").glob("*.json"))
    bad = tmp_path / "bad.cfg"
    bad.write_text("gamma = 0.2\nwhatever = 3\n")
    assert cli.main(["spectrum", "--config", str(bad)], environ=NAT) == 1
    assert "bad.cfg:2" in capsys.readouterr().err


def test_si_units(tmp_path):
    env = {"QDEF_OSC_NATURAL_UNITS": "0"}
    argv = ["spectrum", "--m0", "9.109e-31", "--omega0", "1e15", "--hbar", "1.0546e-34",
            "--scale", "2.4e-10", "--gamma", "0.3", "--out", str(tmp_path)]
    assert cli.main(argv, environ=env) == 0
    tab = SeriesTable.read(next(tmp_path.glob("*.csv")))
    assert tab.meta["units"] == "SI"


def test_verify_stdout_report(capsys):
    code = cli.main(["verify", "--out", "-"], environ=NAT)
    out = capsys.readouterr()
    report = json.loads(out.out)
    assert code == 0 and report["passed"]
    assert "checks passed" in out.err
    assert all(math.isfinite(c["measured"]) for c in report["checks"])
