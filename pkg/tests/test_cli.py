"""End-to-end command line coverage through main(argv).

One test also goes through the installed console script to make sure
the entry point wiring works; everything else stays in-process.
"""

import json
import subprocess
import sys

import numpy as np
import pytest

from tnpur import MpsTensor, PurificationTensor, ZulcInstance
from tnpur.cli import main
from tnpur.serialize import save_tensor, zulc_to_json

E01_DOC = zulc_to_json(ZulcInstance.from_lists([
    [[0, 1, 0], [0, 0, 0], [0, 0, 0]],
    [[0, 0, 0], [0, 0, 0], [0, 0, 0]],
    [[0, 0, 0], [0, 0, 0], [0, 0, 0]],
    [[0, 0, 0], [0, 0, 0], [0, 0, 0]],
    [[0, 0, 0], [0, 0, 0], [0, 0, 0]],
]))


def write_e01(tmp_path):
    path = tmp_path / "ys.json"
    path.write_text(json.dumps(E01_DOC))
    return str(path)


def write_ghz(tmp_path):
    ghz = MpsTensor.from_matrices(
        [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])], mode="float"
    )
    path = tmp_path / "ghz.json"
    save_tensor(ghz, str(path))
    return str(path)


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_reduce_then_scan_pipeline(tmp_path, capsys):
    ys = write_e01(tmp_path)
    tensor = str(tmp_path / "a.json")
    assert main(["reduce", "--input", ys, "--mode", "rational", "--out", tensor]) == 0
    capsys.readouterr()
    code, doc = run_json(
        capsys, ["scan", "--tensor", tensor, "--max-len", "4", "--exact", "--json"]
    )
    assert code == 2
    cert = doc["certificate"]
    assert cert["status"] == "negative-witness"
    assert cert["word"] == [0, 6]
    assert cert["trace"] == {"num": -1, "den": 1}
    assert cert["first_length"] == 2
    assert cert["method"] == "exhaustive"


def test_scan_certificates_thread_independent(tmp_path, capsys):
    ys = write_e01(tmp_path)
    tensor = str(tmp_path / "a.json")
    main(["reduce", "--input", ys, "--mode", "rational", "--out", tensor])
    capsys.readouterr()
    outs = []
    for threads in ("1", "4"):
        out_path = str(tmp_path / f"cert{threads}.json")
        code = main([
            "scan", "--tensor", tensor, "--max-len", "3", "--exact",
            "--threads", threads, "--out", out_path,
        ])
        assert code == 2
        capsys.readouterr()
        with open(out_path, "rb") as fh:
            outs.append(fh.read())
    assert outs[0] == outs[1]


def test_scan_clean_exit_code(tmp_path, capsys):
    t = MpsTensor.from_matrices([[[1, 0], [0, 1]], [[0, 1], [1, 0]]], mode="rational")
    path = str(tmp_path / "t.json")
    save_tensor(t, path)
    code, doc = run_json(capsys, ["scan", "--tensor", path, "--max-len", "4", "--json"])
    assert code == 0
    assert doc["certificate"]["status"] == "all-nonnegative-up-to-cap"


def test_scan_heuristic_mode(tmp_path, capsys):
    ys = write_e01(tmp_path)
    tensor = str(tmp_path / "a.json")
    main(["reduce", "--input", ys, "--mode", "rational", "--out", tensor])
    capsys.readouterr()
    code, doc = run_json(capsys, [
        "scan", "--tensor", tensor, "--heuristic",
        "--heuristic-samples", "4000", "--heuristic-max-len", "6",
        "--bias-letter", "6", "--seed", "3", "--json",
    ])
    assert code == 2
    assert doc["certificate"]["method"] == "heuristic-sample"
    assert doc["certificate"]["trace"]["num"] < 0


def test_scan_requires_max_len(tmp_path, capsys):
    path = write_ghz(tmp_path)
    assert main(["scan", "--tensor", path]) == 1
    err = capsys.readouterr().err
    assert "max-len" in err


def test_canonical_command(tmp_path, capsys):
    path = write_ghz(tmp_path)
    code, doc = run_json(capsys, ["canonical", "--tensor", path, "--json"])
    assert code == 0
    assert len(doc["outcome"]["blocks"]) == 2


def test_powersum_commands(capsys):
    code, doc = run_json(capsys, [
        "powersum", "sums", "--values", "1,2,3", "--count", "3", "--json"
    ])
    assert code == 0
    assert doc["sums"] == [[6, 1], [14, 1], [36, 1]]
    code, doc = run_json(capsys, [
        "powersum", "recover", "--sums", "6,14,36", "--json"
    ])
    assert code == 0
    roots = sorted(round(r[0]) for r in doc["roots"])
    assert roots == [1, 2, 3]
    code, doc = run_json(capsys, [
        "powersum", "first-nonzero", "--values", "1,-1", "--json"
    ])
    assert code == 0 and doc["L"] == 2
    code, doc = run_json(capsys, [
        "powersum", "proportional", "--pair", "2,4:1,2", "--pair", "6:3", "--json"
    ])
    assert code == 0 and doc["verdict"] is True


def test_purify_and_verify_commands(tmp_path, capsys):
    prod = MpsTensor.from_matrices([[[0.5]], [[0.5]]], mode="float")
    target = str(tmp_path / "p.json")
    save_tensor(prod, target)
    fitted = str(tmp_path / "b.json")
    code, doc = run_json(capsys, [
        "purify", "--tensor", target, "--bond", "1", "--env", "2",
        "--lengths", "1..4", "--restarts", "4", "--tol", "1e-9",
        "--seed", "7", "--out", fitted, "--json",
    ])
    assert code == 0
    assert doc["outcome"]["status"] == "found"
    assert doc["outcome"]["certified_length_bound"] == 192
    code = main(["verify", "--tensor", target, "--purification", fitted,
                 "--lengths", "1..4", "--tol", "1e-6"])
    assert code == 0
    capsys.readouterr()
    # a wrong candidate fails verification with exit code 2
    bad = str(tmp_path / "bad.json")
    rng = np.random.default_rng(0)
    save_tensor(
        PurificationTensor(
            rng.standard_normal((2, 2, 1, 1)) + 1j * rng.standard_normal((2, 2, 1, 1)),
            "float",
        ),
        bad,
    )
    code, doc = run_json(capsys, [
        "verify", "--tensor", target, "--purification", bad,
        "--lengths", "1..4", "--tol", "1e-9", "--json",
    ])
    assert code == 2
    assert doc["outcome"]["passed"] is False


def test_purify_not_found_exit_code(tmp_path, capsys):
    ys = write_e01(tmp_path)
    tensor = str(tmp_path / "a.json")
    main(["reduce", "--input", ys, "--mode", "rational", "--out", tensor])
    capsys.readouterr()
    code, doc = run_json(capsys, [
        "purify", "--tensor", tensor, "--bond", "1", "--lengths", "1,2",
        "--restarts", "2", "--seed", "1", "--json",
    ])
    assert code == 2
    assert doc["outcome"]["status"] == "not-found-inconclusive"
    assert doc["outcome"]["best_residual"] >= 1e-3


def test_loop_command(tmp_path, capsys):
    ident = ZulcInstance.from_lists(
        [np.eye(3, dtype=int).tolist()] + [[[0] * 3] * 3] * 4
    )
    ys = str(tmp_path / "ident.json")
    ys_doc = zulc_to_json(ident)
    with open(ys, "w") as fh:
        json.dump(ys_doc, fh)
    tensor = str(tmp_path / "a.json")
    main(["reduce", "--input", ys, "--mode", "rational", "--out", tensor])
    capsys.readouterr()
    code, doc = run_json(capsys, [
        "loop", "--tensor", tensor, "--max-bond", "0", "--max-len", "1", "--json",
    ])
    assert code == 0
    assert doc["outcome"]["status"] == "budget-exhausted"


def test_loop_witness_exit_code(tmp_path, capsys):
    ys = write_e01(tmp_path)
    tensor = str(tmp_path / "a.json")
    main(["reduce", "--input", ys, "--mode", "rational", "--out", tensor])
    capsys.readouterr()
    code, doc = run_json(capsys, [
        "loop", "--tensor", tensor, "--max-bond", "0", "--max-len", "2", "--json",
    ])
    assert code == 2
    assert doc["outcome"]["status"] == "case2-witness"
    assert doc["outcome"]["details"]["word"] == [0, 6]


def test_verify_identities_command(tmp_path, capsys):
    ys = write_e01(tmp_path)
    code = main(["verify-identities", "--input", ys, "--samples", "40", "--seed", "0"])
    out = capsys.readouterr().out
    assert code == 0
    assert "all checks passed" in out


def test_malformed_tensor_file(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text('{"mode": "rational", "d": 2, "D": 2}')
    code = main(["scan", "--tensor", str(path), "--max-len", "2"])
    assert code == 1
    assert "matrices" in capsys.readouterr().err


def test_unknown_arguments_exit_one(capsys):
    # bad usage exits 1 (argparse default of 2 is reserved for findings)
    with pytest.raises(SystemExit) as info:
        main(["scan", "--no-such-flag"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 1
    capsys.readouterr()


def test_console_script_runs():
    out = subprocess.run(
        [sys.executable, "-m", "tnpur.cli", "--help"],
        capture_output=True,
        text=True,
    )
    assert out.returncode == 0
    assert "scan" in out.stdout
