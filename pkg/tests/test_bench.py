import numpy as np
import pytest
from click.testing import CliRunner

from pbssp.bench import (CSV_HEADER, ExperimentConfig, emit_results, format_csv, list_presets,
                         load_preset, parse_config, parse_csv, run_experiment)
from pbssp.cli import main
from pbssp.errors import DomainError

TINY = """
schema_version = 1
name = tiny
problem.kind = quadratic
problem.d_x = 4
problem.d_y = 3
problem.mu = 1.0
problem.L = 3.0
problem.L_xy = 1.0
problem.sigma = 1.0
oracle.kind = saa
oracle.n = 50
procedure = plain
epsilon = 0.05
p = 0.1
reps = 12
master_seed = 7
"""


def tiny(**kw):
    return parse_config(TINY).replace(**kw)


def test_parse_config_fields():
    cfg = parse_config(TINY)
    assert cfg.problem == {"kind": "quadratic", "d_x": 4, "d_y": 3, "mu": 1.0, "L": 3.0,
                           "L_xy": 1.0, "sigma": 1.0}
    assert cfg.oracle == {"kind": "saa", "n": 50}
    assert cfg.reps == 12 and cfg.master_seed == 7


@pytest.mark.parametrize("text", [
    TINY.replace("schema_version = 1", "schema_version = 2"),
    TINY.replace("schema_version = 1", ""),
    TINY + "\nbogus = 3\n",
    TINY.replace("reps = 12", "reps = 0"),
    TINY.replace("p = 0.1", "p = 1.5"),
    TINY.replace("procedure = plain", "procedure = magic"),
])
def test_invalid_configs(text):
    with pytest.raises(DomainError):
        parse_config(text)


def test_presets_load():
    names = list_presets()
    assert {"quadratic", "mdp", "game_saa", "game_speg"} <= set(names)
    for name in names:
        cfg = load_preset(name)
        assert cfg.schema_version == 1
    assert load_preset("mdp").problem["n_states"] == 10
    assert load_preset("game_speg").problem["N_y"] == 50


def test_noiseless_single_run():
    cfg = tiny(reps=1, **{"problem.sigma": 0.0, "oracle.inner_tol": 1e-10})
    recs, s = run_experiment(cfg)
    assert recs[0].success and recs[0].gap < 1e-9 and s.calls == 1


def test_csv_shape_and_round_trip():
    recs, s = run_experiment(tiny())
    text = format_csv([s])
    lines = text.split("\n")
    assert lines[0] == ",".join(CSV_HEADER) and lines[2] == "" and len(lines) == 3
    row = parse_csv(text)[0]
    assert row["mean_gap"] == pytest.approx(s.mean_gap, rel=1e-5)
    assert s.fail_prob == sum(not r.success for r in recs) / len(recs)
    assert row["fail_prob"] == pytest.approx(s.fail_prob, rel=1e-5)


def test_emit_writes_lf_file(tmp_path):
    _, s = run_experiment(tiny(reps=2))
    path = tmp_path / "out.csv"
    emit_results([s], "csv", path)
    assert b"\r" not in path.read_bytes()
    with pytest.raises(DomainError):
        emit_results([], "csv")
    assert "P[gap > eps]" in emit_results([s], "table")


def test_determinism_and_parallel_invariance():
    a = format_csv([run_experiment(tiny(procedure="rde", m=3))[1]])
    b = format_csv([run_experiment(tiny(procedure="rde", m=3))[1]])
    c = format_csv([run_experiment(tiny(procedure="rde", m=3, parallel=2))[1]])
    assert a == b == c


def test_gradient_calls_weighted():
    cfg = parse_config(TINY.replace("problem.sigma = 1.0", "problem.sigma = 1.0\nproblem.box = 1.0"))
    recs, s = run_experiment(cfg.replace(procedure="rde", m=3, reps=2, grad_batch=10))
    assert s.calls == pytest.approx(3 + 0.1 * 2 * 3)


def test_cli_run_and_validate(tmp_path):
    cfg_path = tmp_path / "tiny.cfg"
    cfg_path.write_text(TINY)
    runner = CliRunner()
    res = runner.invoke(main, ["run", "--config", str(cfg_path), "--reps", "3", "--seed", "5"])
    assert res.exit_code == 0, res.output
    assert res.output.splitlines()[0] == ",".join(CSV_HEADER)
    assert res.output.splitlines()[1].endswith(",5")
    res = runner.invoke(main, ["run", "--config", str(cfg_path), "--reps", "2", "--format", "table",
                               "--procedure", "pbssp", "--T", "1", "--m", "3", "--nu", "4"])
    assert res.exit_code == 0 and "pbssp" in res.output
    out = tmp_path / "o.csv"
    res = runner.invoke(main, ["run", "--config", str(cfg_path), "--reps", "2", "--out", str(out)])
    assert res.exit_code == 0 and out.read_text().startswith("procedure,")
    assert runner.invoke(main, ["validate-config", str(cfg_path)]).exit_code == 0
    bad = tmp_path / "bad.cfg"
    bad.write_text("schema_version = 9\n")
    assert runner.invoke(main, ["validate-config", str(bad)]).exit_code == 1
    res = runner.invoke(main, ["list-presets"])
    assert "mdp" in res.output
    res = runner.invoke(main, ["run", "--config", str(cfg_path), "--epsilon", "-1"])
    assert res.exit_code != 0
