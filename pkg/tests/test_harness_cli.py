import json

import numpy as np
import pytest

import discord_bounds.bounds
from discord_bounds.cli import main
from discord_bounds.harness import (
    run_figure1,
    run_selftest,
    sample_bell_diagonal,
    sample_coincident_channel,
    sample_filtered_coincident,
    sample_x_params,
    write_csv,
)
from discord_bounds.qstate import make_bell_diagonal, random_state, random_unitary
from discord_bounds.stateio import read_state, read_unitary, write_state, write_unitary


def test_figure1_report(tmp_path):
    report = run_figure1(30, rank=4, seed=42)
    assert report.n == 30
    assert report.violations == 0
    assert 0 <= report.fraction_within_0_01 <= 1
    path = tmp_path / "fig.csv"
    write_csv(report, path)
    text = path.read_text().splitlines()
    assert text[0] == "# discord-bounds v1"
    assert text[1].startswith("state_id,lower,upper,")
    assert len(text) == 32


def test_figure1_reproducible(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_csv(run_figure1(12, rank=3, seed=7), a)
    write_csv(run_figure1(12, rank=3, seed=7), b)
    assert a.read_bytes() == b.read_bytes()


def test_figure1_parallel_matches_serial(tmp_path, monkeypatch):
    a, b = tmp_path / "serial.csv", tmp_path / "par.csv"
    write_csv(run_figure1(10, rank=4, seed=3), a)
    monkeypatch.setenv("DISCORD_BOUNDS_THREADS", "2")
    write_csv(run_figure1(10, rank=4, seed=3), b)
    assert a.read_bytes() == b.read_bytes()


def test_figure1_povm_column(tmp_path):
    report = run_figure1(3, rank=2, seed=1, include_povm=True)
    for row in report.rows:
        assert row.oracle_povm is not None
        assert row.oracle_povm <= row.oracle_projective + 1e-7


def test_figure1_rank2_coincides():
    report = run_figure1(20, rank=2, seed=11)
    assert all(r.coincide for r in report.rows)


def test_samplers():
    rng = np.random.default_rng(0)
    rho = sample_bell_diagonal(rng)
    assert np.linalg.eigvalsh(rho.entries).min() > -1e-12
    params = sample_x_params(rng, zero_x=True)
    assert abs(params.x) < 1e-12
    rho = sample_filtered_coincident(rng)
    assert rho.dim == 4
    p1, a, b = sample_coincident_channel(rng)
    p2 = 1 - p1
    assert p1 ** 2 * (1 - a @ a) == pytest.approx(p2 ** 2 * (1 - b @ b), abs=1e-12)


def test_selftest_quick_passes():
    results = run_selftest(quick=True)
    failures = [name for name, ok, _ in results if not ok]
    assert failures == []


def test_selftest_detects_mutation(monkeypatch):
    # negative control: a corrupted entropy floor must break the invariants
    original = discord_bounds.bounds.co
    monkeypatch.setattr(discord_bounds.bounds, "co", lambda z: original(z) + 0.05)
    results = run_selftest(quick=True)
    failures = [name for name, ok, _ in results if not ok]
    assert failures != []


def test_stateio_round_trip(tmp_path):
    rho = random_state(3, 4, seed=5)
    path = tmp_path / "state.json"
    write_state(rho, path)
    back = read_state(path)
    assert back.dim_b == 3
    assert np.array_equal(back.entries, rho.entries)
    u = random_unitary(4, seed=2)
    upath = tmp_path / "u.json"
    write_unitary(u, upath)
    assert np.array_equal(read_unitary(upath), u)


def test_stateio_rejects_malformed(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"dim_a": 2, "dim_b": 2, "matrix": [[1, 2], [3, 4]]}))
    from discord_bounds.errors import DiscordBoundsError

    with pytest.raises(DiscordBoundsError):
        read_state(path)


def test_cli_bounds_and_exit_codes(tmp_path, capsys):
    path = tmp_path / "bd.json"
    write_state(make_bell_diagonal(0.6, -0.4, 0.2), path)
    assert main(["bounds", str(path), "--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["coincide"] is True
    assert payload["lower"] == pytest.approx(payload["upper"], abs=1e-9)
    assert payload["q_spectrum"] == pytest.approx([1.0, 0.36, 0.16, 0.04], abs=1e-10)

    assert main(["bounds", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["bounds", str(bad)]) == 2


def test_cli_bounds_singular_marginal(tmp_path):
    from discord_bounds.qstate import validate_state

    rho = validate_state(np.kron(np.diag([1.0, 0.0]), np.eye(2) / 2), dim_b=2)
    path = tmp_path / "sing.json"
    write_state(rho, path)
    assert main(["bounds", str(path)]) == 2


def test_cli_oracle(tmp_path, capsys):
    path = tmp_path / "bd.json"
    write_state(make_bell_diagonal(0.6, -0.4, 0.2), path)
    assert main(["oracle", str(path), "--povm", "2", "--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["projective"] == pytest.approx(0.120913789, abs=1e-6)
    assert payload["povm"] <= payload["projective"] + 1e-9


def test_cli_figure1(tmp_path, capsys):
    out = tmp_path / "f.csv"
    code = main(["figure1", "--n", "8", "--rank", "2", "--seed", "1",
                 "--out", str(out), "--json"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["violations"] == 0
    assert out.exists()


def test_cli_dqc1(capsys):
    assert main(["dqc1", "--n-qubits", "4", "--alpha", "0.8", "--random", "2",
                 "--traceless", "--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["u1"] < 1e-12
    assert payload["formula_lower"] == pytest.approx(payload["generic_lower"], abs=1e-8)
    assert payload["generic_upper"] <= payload["formula_upper"] + 1e-9
    assert payload["formula_lower"] - 1e-7 <= payload["oracle_projective"]
    assert payload["oracle_projective"] <= payload["generic_upper"] + 1e-7


def test_cli_dqc1_regime_note(capsys):
    # a generic unitary has u1 > 0: the formula lower is flagged, the generic
    # pipeline still reports bounds
    assert main(["dqc1", "--n-qubits", "3", "--alpha", "0.5", "--random", "4",
                 "--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert "unavailable" in str(payload["formula_lower"])
    assert "generic_lower" in payload


def test_cli_channel(capsys):
    assert main(["channel", "--p1", "0.5", "--a", "0,0,1", "--b", "0,0,-1",
                 "--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["upper"] == pytest.approx(1, abs=1e-9)
    assert payload["coincide"] is True
    assert payload["oracle_acc_info"] == pytest.approx(1, abs=1e-6)
    assert main(["channel", "--p1", "0.5", "--a", "0,0,2", "--b", "0,0,-1"]) == 2


def test_cli_xstate(capsys):
    assert main(["xstate", "--s1", "0.5", "--s2", "0.3", "--s3", "0.2",
                 "--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["closed_form"] == pytest.approx(payload["lower"], abs=1e-8)
    assert main(["xstate", "--s1", "2.0", "--s2", "0.0", "--s3", "0.0"]) == 2


def test_cli_bench_smoke(capsys):
    assert main(["bench", "--n", "2"]) == 0
    out = capsys.readouterr().out
    assert "kernel benchmark" in out
