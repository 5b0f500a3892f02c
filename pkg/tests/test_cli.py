import json

import pytest

from bwmin.cli import main


@pytest.fixture
def flows52(tmp_path):
    p = tmp_path / "flows.json"
    p.write_text('{"flows": [{"r": 1, "b": 5, "d": 1.4},'
                 ' {"r": 4, "b": 5, "d": 1.25}]}')
    return str(p)


def _run(capsys, argv):
    code = main(argv)
    return code, json.loads(capsys.readouterr().out)


def test_solve_sp(flows52, capsys):
    code, out = _run(capsys, ["solve", "--input", flows52, "--scheduler", "sp"])
    assert code == 0
    assert out["r_min"] == pytest.approx(78 / 7)
    assert out["b_prime"] is None


def test_solve_sp_shaped(flows52, capsys):
    code, out = _run(capsys,
                     ["solve", "--input", flows52, "--scheduler", "sp-shaped"])
    assert code == 0
    assert out["r_min"] == pytest.approx(53 / 7, abs=1e-9)
    assert out["b_prime"] == [5, 0]


def test_solve_packet_model(flows52, capsys):
    code, out = _run(capsys, ["solve", "--input", flows52, "--scheduler",
                              "sp-shaped", "--model", "packet"])
    assert code == 0
    assert out["r_min"] == pytest.approx(53 / 7, abs=1e-9)
    assert out["shaper"]["burst"] == pytest.approx(0.0)


def test_solve_packet_needs_two_flows(tmp_path, capsys):
    p = tmp_path / "one.json"
    p.write_text('{"flows": [{"r": 1, "b": 2, "d": 1}]}')
    code, out = _run(capsys, ["solve", "--input", str(p), "--scheduler",
                              "sp-shaped", "--model", "packet"])
    assert code == 2 and "error" in out


def test_compare(flows52, capsys):
    code, out = _run(capsys, ["compare", "--input", flows52])
    assert code == 0
    r = out["r_min"]
    assert r["edf"] == pytest.approx(53 / 7)
    assert r["sp"] == pytest.approx(78 / 7)
    assert r["sp-shaped"] == pytest.approx(53 / 7, abs=1e-9)
    assert r["fifo"] == pytest.approx(8.0)
    assert r["fifo-shaped"] == pytest.approx(7.8125, abs=1e-9)
    assert out["two_flow_closed_forms"]["fifo_shaped"] == pytest.approx(7.8125)


def test_compare_single_flow(tmp_path, capsys):
    p = tmp_path / "one.json"
    p.write_text('{"flows": [{"r": 2, "b": 7, "d": 3}]}')
    code, out = _run(capsys, ["compare", "--input", str(p)])
    assert code == 0
    vals = set()
    for v in out["r_min"].values():
        vals.add(round(v, 9))
    assert vals == {round(max(2, 7 / 3), 9)}


def test_delay(flows52, capsys):
    code, out = _run(capsys, ["delay", "--input", flows52, "--scheduler",
                              "sp", "--r", str(78 / 7)])
    assert code == 0
    assert out["delays"][0] == pytest.approx(1.4)


def test_verify_round_trip(flows52, capsys):
    # solver output fed back through the oracle never violates soundness
    for sched in ("edf", "sp", "sp-shaped", "fifo", "fifo-shaped"):
        code, out = _run(capsys, ["verify", "--input", flows52,
                                  "--scheduler", sched])
        assert code == 0, sched
        assert out["sound"] is True
        for row in out["flows"]:
            assert row["margin"] >= -2 * out["dt"] - 1e-6


def test_verify_offsets(flows52, capsys):
    code, out = _run(capsys, ["verify", "--input", flows52, "--scheduler",
                              "sp-shaped", "--offsets", "4"])
    assert code == 0 and out["sound"] is True


def test_verify_below_rate_floor(flows52, capsys):
    code, out = _run(capsys, ["verify", "--input", flows52, "--scheduler",
                              "sp", "--r", "4"])
    assert code == 2
    assert out["error"] == "InsufficientBandwidth"


def test_verify_undersized_bandwidth_fails(flows52, capsys):
    # EDF's per-flow guarantee only holds from the EDF minimum upward
    code, out = _run(capsys, ["verify", "--input", flows52, "--scheduler",
                              "edf", "--r", "6.0"])
    assert code == 1
    assert out["sound"] is False


def test_invalid_input_file(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{"flows": [{"r": -1, "b": 1, "d": 1}]}')
    code, out = _run(capsys, ["solve", "--input", str(p), "--scheduler", "edf"])
    assert code == 2
    assert out["error"] == "InvalidProfile"


def test_missing_file(capsys):
    code, out = _run(capsys, ["solve", "--input", "/nonexistent.json",
                              "--scheduler", "edf"])
    assert code == 2


def test_evaluate_json(capsys):
    code, out = _run(capsys, ["evaluate", "--scenario", "d11", "--trials",
                              "5", "--seed", "1"])
    assert code == 0
    assert len(out["stats"]) == 5


def test_evaluate_csv(tmp_path, capsys):
    out = tmp_path / "stats.csv"
    code = main(["evaluate", "--scenario", "d11", "--trials", "5",
                 "--seed", "1", "--out", str(out)])
    assert code == 0 and out.exists()


def test_heatmap_and_cdf(tmp_path):
    hm = tmp_path / "hm.csv"
    code = main(["heatmap", "--r1", "4", "--b1", "10", "--r2", "10", "--b2",
                 "18", "--grid", "12", "--out", str(hm)])
    assert code == 0 and hm.exists()
    cdf = tmp_path / "cdf.csv"
    code = main(["cdf", "--scenario", "d21", "--trials", "6", "--seed", "2",
                 "--out", str(cdf)])
    assert code == 0 and cdf.exists()


def test_evaluate_custom_deadlines(tmp_path, capsys):
    p = tmp_path / "deadlines.json"
    p.write_text("[2.0, 1.0, 0.5]")
    code, out = _run(capsys, ["evaluate", "--deadlines-file", str(p),
                              "--trials", "4", "--seed", "9"])
    assert code == 0
    assert out["scenario"] == "custom"


def test_evaluate_rejects_bad_custom_deadlines(tmp_path, capsys):
    p = tmp_path / "deadlines.json"
    p.write_text("[1.0, 1.0]")
    code, out = _run(capsys, ["evaluate", "--deadlines-file", str(p),
                              "--trials", "2", "--seed", "9"])
    assert code == 2


def test_solve_output_feeds_verify(flows52, capsys):
    # the solve -> verify round trip never reports a soundness violation
    for sched in ("sp-shaped", "fifo-shaped"):
        code, solved = _run(capsys, ["solve", "--input", flows52,
                                     "--scheduler", sched])
        assert code == 0
        argv = ["verify", "--input", flows52, "--scheduler", sched,
                "--r", repr(solved["r_min"]),
                "--b-prime", ",".join(repr(x) for x in solved["b_prime"])]
        code, out = _run(capsys, argv)
        assert code == 0 and out["sound"] is True
