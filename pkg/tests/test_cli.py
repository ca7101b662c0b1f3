import json
import subprocess
import sys

import pytest

from rackrepair.cli import config_from_spec, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_bounds_plain_values(capsys):
    assert run(capsys, "bounds", "--cutset-locality", "D=3", "K=2", "r=2")[:2] == (0, "3\n")
    assert run(capsys, "bounds", "--cutset-mds", "D=4", "K=2", "L=4", "e=1")[1] == "16/3\n"
    assert run(capsys, "bounds", "--partial-cutset", "D=3", "K=2", "e=2", "delta=2")[1] == "3/2\n"
    assert run(capsys, "bounds", "--singleton", "n=12", "k=4", "r=2", "delta=2")[1] == "8\n"
    assert run(capsys, "bounds", "--beta-min", "N=4", "K=2", "D=3", "r=2", "s=1")[1] == "1/2\n"
    assert run(capsys, "bounds", "--feasible", "N=4", "K=2", "D=3", "r=2", "s=1",
               "beta=9/20")[1] == "false\n"


def test_bounds_json(capsys):
    code, out, _ = run(capsys, "--format", "json", "bounds", "--r-star", "N=4", "K=2", "D=3",
                       "s=1,1,1,1", "beta=9/20", "M=4")
    data = json.loads(out)
    assert code == 0
    assert data["value"] == "21/10" and data["branch"] == "1"
    assert data["query"]["name"] == "r-star"


def test_bounds_usage_errors(capsys):
    code, _, err = run(capsys, "bounds", "--cutset-locality", "D=3", "K=2")
    assert code == 1 and "missing r" in err
    code, _, _ = run(capsys, "bounds", "--cutset-locality", "D=3", "K=2", "r")
    assert code == 1


def test_parser_errors_exit_one(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["bounds"])
    assert exc.value.code == 1


def test_flow_verify(capsys):
    code, out, _ = run(capsys, "--seed", "3", "flow-verify", "--trials", "20")
    assert code == 0
    assert out.splitlines() == ["20/20 exact matches", "20/20 evolutions at or above capacity"]


def test_construct(capsys):
    code, out, _ = run(capsys, "construct", "--instance", "gf13")
    assert code == 0
    config = config_from_spec(json.loads(out))
    assert config.n == 12 and config.k == 4


def test_config_from_parameters():
    config = config_from_spec({"p": 13, "n": 1, "w": 3, "class_values": [1, 8, 12, 5],
                               "m1": 2, "m2": 2, "r": 2})
    assert config.n == 12 and config.delta == 2


def test_encode_inject_repair_roundtrip(tmp_path, capsys):
    data = bytes(range(105)) * 2
    src = tmp_path / "in.bin"
    src.write_bytes(data)
    state = tmp_path / "state.json"
    back = tmp_path / "back.bin"
    assert run(capsys, "encode", "--instance", "tower210", "--input", str(src),
               "--out", str(state))[0] == 0
    code, out, _ = run(capsys, "inject", "--state", str(state), "--rack", "1",
                       "--positions", "0,2")
    assert code == 0 and json.loads(out) == {"1": [0, 2]}
    code, out, _ = run(capsys, "--format", "csv", "repair", "--state", str(state),
                       "--read-back", str(back))
    assert code == 0
    header, row = out.strip().split("\n")
    assert row.split(",")[3] == "partial-cross-ratio" and ",3/2,3/2,true" in row
    assert back.read_bytes() == data


def test_encode_rejects_misaligned_input(tmp_path, capsys):
    src = tmp_path / "in.bin"
    src.write_bytes(b"ab")
    code, _, err = run(capsys, "encode", "--instance", "gf13", "--input", str(src),
                       "--out", str(tmp_path / "s.json"))
    assert code == 1 and "multiple of 3 bytes" in err
    assert run(capsys, "encode", "--instance", "gf13", "--input", str(src), "--pad",
               "--out", str(tmp_path / "s.json"))[0] == 0


def test_inject_double_erasure_and_open_problem(tmp_path, capsys):
    src = tmp_path / "in.bin"
    src.write_bytes(b"abc")
    state = str(tmp_path / "s.json")
    run(capsys, "encode", "--instance", "gf13", "--input", str(src), "--out", state)
    run(capsys, "inject", "--state", state, "--rack", "0")
    code, _, err = run(capsys, "inject", "--state", state, "--rack", "0", "--positions", "1")
    assert code == 1 and "already erased" in err
    run(capsys, "inject", "--state", state, "--rack", "2")
    code, _, err = run(capsys, "repair", "--state", state)
    assert code == 1 and "open problem" in err


def test_bench_csv(capsys):
    code, out, _ = run(capsys, "--seed", "1", "bench", "--instance", "gf64", "--seeds", "1")
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0].startswith("instance,seed,event,scheme") and len(lines) == 3


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "rackrepair", "bounds", "--cutset-locality",
                           "D=3", "K=2", "r=2"], capture_output=True, text=True, check=True)
    assert proc.stdout == "3\n"
