import json
import subprocess
import sys

import pytest

from symcm.cli import EXIT_INTERNAL, EXIT_OK, EXIT_PARSE, EXIT_PRECONDITION, run


def ok(*argv):
    code, out, err = run(list(argv))
    assert code == EXIT_OK, err
    return out


def test_star_and_brackets():
    assert ok("star", "q0", "p0") == "q0*p0 + 1/2*i*hbar\n"
    assert ok("bracket", "q0", "p0") == "i*hbar\n"
    assert ok("poisson", "q0^2", "p0^2") == "4*q0*p0\n"


def test_weyl_verbs():
    assert ok("dequantize", "P0*Q0") == "q0*p0 - 1/2*i*hbar\n"
    assert ok("quantize", "q0^2*p0") == "Q0^2*P0 - i*hbar*Q0\n"


def test_hbar_value_substitution():
    assert ok("star", "q0", "p0", "--hbar", "2") == "q0*p0 + i\n"


def test_evolve_series_formats():
    out = ok("evolve", "1/2*q0^2 + 1/2*p0^2", "q0", "--order", "3")
    assert out == "t^0: q0\nt^1: p0\nt^2: -1/2*q0\nt^3: -1/6*p0\n"
    csv_out = ok("evolve", "1/2*q0^2 + 1/2*p0^2", "q0", "-K", "1", "--format", "csv")
    assert csv_out.splitlines()[0] == "n,term_index,q_exps,p_exps,hbar_pow,re,im"
    js = json.loads(ok("evolve", "1/2*p0^2+q0^4", "q0", "-K", "2", "--method", "poisson", "--format", "json"))
    assert js["order"] == 2


def test_trajectory_table():
    out = ok("evolve", "1/2*p0^2 + q0^4", "q0", "-K", "6", "--point", "1,0", "--hbar", "1",
             "--format", "csv", "--tmax", "1", "--steps", "1")
    lines = out.splitlines()
    assert lines[0] == "t,moyal_value,poisson_value"
    assert lines[1] == "0,1,1"
    t, moyal, classical = lines[2].split(",")
    assert t == "1" and moyal != classical


def test_unitary_and_eval():
    assert ok("unitary", "q0", "-K", "1") == "t^0: 1\nt^1: -i*hbar^-1*q0\n"
    assert ok("eval", "q0*p0 + hbar", "--point", "2,3", "--hbar", "1/2") == "13/2\n"


def test_classicality_config(tmp_path):
    cfg = {
        "means": [[0, 0]],
        "covariances": [["1/2", "1/2", 0]],
        "centers": [0, 0],
        "margins": ["1/2", 2],
        "observables": ["q0", "p0"],
        "order": 1,
        "p_grid": [0, 0.5],
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    obj = json.loads(ok("classicality", str(path), "--hbar", "1", "--format", "json"))
    assert obj["verdict"] is False
    assert [s["norm"] for s in obj["sequences"]] == ["1/2", "1/2"]
    assert "not 1-order classical" in ok("classicality", str(path), "--hbar", "1")
    code, _, err = run(["classicality", str(path)])
    assert code == EXIT_PRECONDITION and "rational --hbar" in err


def test_operand_files(tmp_path):
    (tmp_path / "a.txt").write_text("q0^2\n")
    (tmp_path / "b.json").write_text(json.dumps({"dof": 1, "terms": [{"q": [0], "p": [2], "hbar": 0, "re": "1", "im": "0"}]}))
    assert ok("poisson", f"@{tmp_path / 'a.txt'}", f"@{tmp_path / 'b.json'}") == "4*q0*p0\n"


def test_out_flag(tmp_path):
    target = tmp_path / "out.txt"
    assert ok("star", "q0", "p0", "--out", str(target)) == ""
    assert target.read_text() == "q0*p0 + 1/2*i*hbar\n"


@pytest.mark.parametrize(
    "argv, code",
    [
        (["star", "q0^", "p0"], EXIT_PARSE),
        (["star", "q0"], EXIT_PARSE),
        (["frobnicate"], EXIT_PARSE),
        (["star", "q5", "p0", "--dof", "2"], EXIT_PRECONDITION),
        (["star", "q0", "p0", "--format", "csv"], EXIT_PRECONDITION),
        (["star", "q0", "p0", "--hbar", "abc"], EXIT_PRECONDITION),
        (["eval", "hbar^-1", "--point", "0,0", "--hbar", "0"], EXIT_PRECONDITION),
        (["evolve", "q0", "p0"], EXIT_PRECONDITION),
        (["star", "q0", "@/nonexistent/file"], EXIT_PRECONDITION),
        (["star", "q0", "p0", "--dof", "0"], EXIT_PRECONDITION),
    ],
)
def test_exit_codes(argv, code):
    assert run(argv)[0] == code


def test_internal_failure_exit_code(monkeypatch):
    from symcm import cli
    from symcm.errors import InternalConsistencyError

    def boom(*_):
        raise InternalConsistencyError("negative norm")

    monkeypatch.setattr(cli, "star", boom)
    assert run(["star", "q0", "p0"])[0] == EXIT_INTERNAL


def test_module_entry_point_is_byte_deterministic():
    cmd = [sys.executable, "-m", "symcm", "evolve", "1/2*p0^2+q0^4", "q0", "-K", "6", "--format", "json"]
    first = subprocess.run(cmd, capture_output=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert first == second and first
    bad = subprocess.run([sys.executable, "-m", "symcm", "star", "q0", "("], capture_output=True)
    assert bad.returncode == EXIT_PARSE
    assert b"line 1, column 2" in bad.stderr
