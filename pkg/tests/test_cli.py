import subprocess
import sys

import pytest

from cuntzkrieger.cli import main


@pytest.fixture
def files(tmp_path):
    contents = {
        "fib": "2\n1 1\n1 0\n",
        "ident": "2\n1 0\n0 1\n",
        "full2": "2\n1 1\n1 1\n",
        "full4": "4\n1 1 1 1\n1 1 1 1\n1 1 1 1\n1 1 1 1\n",
        "bad": "2\n1 x\n1 0\n",
        "zerocol": "2\n1 0\n1 0\n",
        "z2": "group: 2\n0 1\n",
        "z2_bad": "group: 2\n1/3 0\n",
        "flip": "group: 2\n1 1\n",
        "wide": "group: 2\n0 1 1\n",
    }
    out = {}
    for name, text in contents.items():
        path = tmp_path / f"{name}.txt"
        path.write_text(text)
        out[name] = str(path)
    return out


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    lines = dict(line.split("=", 1) for line in captured.out.splitlines() if "=" in line and not line.startswith("#"))
    return code, lines, captured


def test_analyze(capsys, files):
    code, out, _ = run(capsys, "analyze", "--matrix", files["fib"])
    assert code == 0
    assert out["aperiodic"] == "true" and out["m"] == "2"
    assert out["kirchberg"] == "reported" and out["permutation"] == "false" and out["classes"] == "2"
    code, out, _ = run(capsys, "analyze", "--matrix", files["ident"])
    assert code == 0 and out["aperiodic"] == "false"


def test_exit_codes(capsys, files):
    assert run(capsys, "analyze", "--matrix", files["bad"])[0] == 2
    assert run(capsys, "analyze", "--matrix", files["zerocol"])[0] == 3
    assert run(capsys, "analyze", "--matrix", files["fib"] + ".missing")[0] == 2
    assert run(capsys, "action", "--matrix", files["fib"], "--action", files["z2_bad"])[0] == 4
    code, _, captured = run(capsys, "action", "--matrix", files["fib"], "--action", files["wide"])
    assert code == 5
    assert "Traceback" not in captured.err


def test_action(capsys, files):
    code, out, _ = run(capsys, "action", "--matrix", files["fib"], "--action", files["z2"], "--verify", "--cocycle", "4", "--fixed", "2")
    assert code == 0
    assert out["action"] == "verified" and out["identities"] == "pass"
    assert out["fixed_core_dim[2]"] == "5"
    assert out["unitary[0]"] == "s1.1* - s2.2*"


def test_action_oracle_and_witness(capsys, files):
    code, out, _ = run(
        capsys, "action", "--matrix", files["full2"], "--action", files["flip"],
        "--verify", "oracle", "--witness", "2", "0.5", "--budget", "200",
    )
    assert code == 0 and out["oracle"] == "pass"
    assert out["witness[0].defect[0]"] == "2.000000"


def test_ktheory(capsys, files):
    code, out, _ = run(capsys, "ktheory", "--matrix", files["fib"])
    assert (out["K0"], out["K1"], out["O2"]) == ("0", "0", "true")
    code, out, _ = run(capsys, "ktheory", "--matrix", files["full4"])
    assert out["K0"] == "Z_3" and out["O2"] == "false"


def test_rokhlin_demo(capsys):
    code, out, _ = run(capsys, "rokhlin-demo", "--r", "10", "--order", "2")
    assert (out["defect"], out["bound"], out["pass"]) == ("0.3129", "0.6283", "true")


def test_shift(capsys, files):
    code, out, _ = run(capsys, "shift", "--matrix", files["fib"], "--element", "p1", "--phi-power", "1", "--level", "2")
    assert out["phi[1].level[2]"] == "s11.11* + s21.21*"
    code, out, _ = run(capsys, "shift", "--matrix", files["fib"], "--element", "p1", "--phi-power", "2", "--verify", "oracle")
    assert out["phi[2]"] == "s111.111* + s12.12* + s211.211*"
    assert out["oracle"] == "pass"
    code, out, _ = run(capsys, "shift", "--matrix", files["fib"], "--element", "1", "--corner", "2", "1", "2")
    assert out["corner.equal"] == "true" and out["corner.words"] == "11"


def test_explain_and_sorted(capsys, files):
    main(["--explain", "ktheory", "--matrix", files["fib"]])
    text = capsys.readouterr().out
    report = [line for line in text.splitlines() if not line.startswith("#")]
    assert report == sorted(report)
    assert any(line.startswith("# ") for line in text.splitlines())


def test_deterministic_subprocess(files):
    argv = [sys.executable, "-m", "cuntzkrieger.cli", "--seed", "0", "witness", "--matrix", files["fib"],
            "--action", files["z2"], "--level", "3", "--eps", "0.1", "--budget", "200"]
    first = subprocess.run(argv, capture_output=True, text=True, check=True).stdout
    second = subprocess.run(argv, capture_output=True, text=True, check=True).stdout
    assert first == second and "witness.defect[0]=2.000000" in first
