import json
import os
import subprocess
import sys

import numpy as np
import pytest

from tnlab.cli import EXIT_FAILED, EXIT_INCOMPATIBLE, EXIT_INPUT, EXIT_OK, main
from tnlab.io import (
    TensorFileError,
    dumps_tensor,
    load_suite_config,
    parse_suite_config,
    parse_tensor,
    reports_csv,
    save_tensor,
)
from tnlab.lattice import INF, SequenceSpace
from tnlab.seeding import SEED_ENV, child_seed, resolve_seed
from tnlab.tensor import FullTensor, diagonal_symmetric, diagonal_tensor
from tnlab.theorems import run_check


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


DIAG11 = '{"order": 2, "dim": 2, "exponent": 1, "symmetric": true, "coeffs": [1, 0, 0, 1]}'


# ---------------------------------------------------------------- io layer


def test_tensor_round_trip_is_byte_identical(tmp_path):
    u = FullTensor(SequenceSpace(3, INF, (1.0, 2.0, 0.5)), np.random.default_rng(0).normal(size=(3, 3)))
    text = dumps_tensor(u)
    tf = parse_tensor(text)
    assert np.array_equal(tf.tensor.coeffs, u.coeffs) and tf.tensor.space == u.space
    assert dumps_tensor(tf.tensor, tf.symmetric) == text
    path = tmp_path / "u.json"
    save_tensor(path, diagonal_symmetric(SequenceSpace(2, 2.5), [1, -2], 3))
    again = parse_tensor(path.read_text())
    assert again.symmetric and dumps_tensor(again.tensor, True) == path.read_text()


def test_tensor_exponent_and_weights_encoding():
    text = dumps_tensor(diagonal_tensor(SequenceSpace(2, INF), [1, 2], 2))
    assert '"exponent": "inf"' in text and "weights" not in text
    assert '"exponent": 2.5' in dumps_tensor(diagonal_tensor(SequenceSpace(2, 2.5), [1, 2], 2))


@pytest.mark.parametrize("text, fragment", [
    ("[1]", "JSON object"),
    ("{", "invalid JSON"),
    ('{"order": 2, "dim": 2, "exponent": 1, "coeffs": [1, 0, 0]}', "expected 4 values (dim^order = 2^2), got 3"),
    ('{"order": 2, "dim": 2, "exponent": 0.5, "coeffs": [1, 0, 0, 1]}', "exponent"),
    ('{"order": 2, "dim": 2, "exponent": 1, "coeffs": [1, 0, 0, 1], "extra": 1}', "unknown keys"),
    ('{"order": 2, "dim": 2, "exponent": 1, "symmetric": true, "coeffs": [1, 2, 0, 1]}', "permutation"),
    ('{"order": 2, "dim": 2, "exponent": 1, "weights": [1, -1], "coeffs": [1, 0, 0, 1]}', "weights"),
    ('{"order": 0, "dim": 2, "exponent": 1, "coeffs": []}', "order"),
    ('{"dim": 2, "exponent": 1, "coeffs": [1, 0, 0, 1]}', "missing key"),
])
def test_tensor_parse_errors(text, fragment):
    with pytest.raises(TensorFileError, match=fragment.replace("^", r"\^").replace("(", r"\(").replace(")", r"\)")):
        parse_tensor(text)


def test_suite_config_parsing():
    cfg = load_suite_config()
    assert cfg.samples == 100 and cfg.dims == (2, 3, 4) and cfg.orders == (2, 3)
    assert parse_suite_config('{"checks": [], "seed": 3}').checks == ()
    for bad in ('{"checks": ["nope"]}', '{"seed": "x"}', '{"dims": 3}', '{"unknown": 1}', "[]"):
        with pytest.raises(TensorFileError):
            parse_suite_config(bad)


def test_csv_columns():
    reports = [run_check("holder", 2, 2, 2, 1, 0), run_check("eq2.3", 2, 2, 2, 1, 0)]
    header = reports_csv(reports).splitlines()[0].split(",")
    assert header[:5] == ["check_id", "p", "m", "n", "seed"] and header[-1] == "passed"
    assert header[5:-1] == sorted(header[5:-1])


# ------------------------------------------------------------------ seeding


def test_seed_derivation(monkeypatch):
    assert child_seed(1, "a", 2) == child_seed(1, "a", 2)
    assert child_seed(1, "a", 2) != child_seed(1, "a", 3) != child_seed(2, "a", 3)
    monkeypatch.setenv(SEED_ENV, "77")
    assert resolve_seed(None) == 77 and resolve_seed(5) == 5
    monkeypatch.delenv(SEED_ENV)
    assert resolve_seed(None) == 0
    with pytest.raises(ValueError):
        resolve_seed(2**64)


# --------------------------------------------------------------------- norm


def test_norm_command(tmp_path, capsys):
    path = write(tmp_path, "d.json", DIAG11)
    assert main(["norm", path, "--norm", "eps", "--method", "enumerate", "--json"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["value"] == 2 and doc["rigor"] == "exact" and doc["method"] == "enumerate"
    for kind in ("s-eps", "pos-eps", "pos-s-eps"):
        assert main(["norm", path, "--norm", kind]) == EXIT_OK
        assert "value:    2.0" in capsys.readouterr().out


def test_norm_zero_and_errors(tmp_path, capsys):
    zero = write(tmp_path, "z.json", '{"order": 3, "dim": 2, "exponent": 2, "coeffs": [0, 0, 0, 0, 0, 0, 0, 0]}')
    assert main(["norm", zero, "--json"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["value"] == 0
    path = write(tmp_path, "d.json", DIAG11)
    assert main(["norm", path, "--method", "svd"]) == EXIT_INCOMPATIBLE
    bad = write(tmp_path, "bad.json", '{"order": 2, "dim": 2, "exponent": 1, "coeffs": [1, 0, 0]}')
    assert main(["norm", bad]) == EXIT_INPUT
    assert "expected 4 values" in capsys.readouterr().err
    assert main(["norm", str(tmp_path / "missing.json")]) == EXIT_INPUT


def test_norm_symmetrizes_nonsymmetric_input(tmp_path, capsys):
    path = write(tmp_path, "e12.json", '{"order": 2, "dim": 2, "exponent": 1, "coeffs": [0, 1, 0, 0]}')
    assert main(["norm", path, "--norm", "s-eps", "--json"]) == EXIT_OK
    out = capsys.readouterr()
    assert "symmetrization" in out.err and json.loads(out.out)["value"] == 1.0


# ------------------------------------------------------------------- verify


def test_verify_command(tmp_path, capsys):
    assert main(["verify", "--check", "thm3.6", "--p", "1", "--m", "2", "--n", "2", "--diag", "1,1", "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["passed"] and all(doc["quantities"][k] == 2 for k in ("eps", "s_eps", "pos_eps", "pos_s_eps"))
    path = write(tmp_path, "d.json", DIAG11)
    assert main(["verify", "--check", "lemma3.1", "--tensor", path]) == EXIT_OK
    out = capsys.readouterr().out
    assert "PASS" in out and "q_eps = 2.0" in out and "eps = 2.0" in out


def test_verify_failure_and_errors(capsys):
    assert main(["verify", "--check", "thm3.6", "--p", "1", "--diag", "1,-1"]) == EXIT_FAILED
    assert main(["verify", "--check", "thm3.6", "--m", "3", "--diag", "1,-1"]) == EXIT_INPUT
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--check", "no-such-check"])
    assert exc.value.code == 2


# -------------------------------------------------------------------- suite


def test_suite_command(tmp_path, capsys):
    cfg = write(tmp_path, "s.json", '{"checks": ["holder", "eq2.3"], "exponents": [2], "dims": [2], '
                                    '"orders": [2], "samples": 3}')
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["suite", cfg, "--out", str(out1), "--seed", "4"]) == EXIT_OK
    assert "2 checks, 6 instances, 0 failures" in capsys.readouterr().out
    assert main(["suite", cfg, "--out", str(out2), "--seed", "4"]) == EXIT_OK
    for name in ("report.csv", "witnesses.json"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
    assert main(["suite", cfg, "--out", str(tmp_path / "c"), "--seed", "5"]) == EXIT_OK
    assert (tmp_path / "c" / "report.csv").read_bytes() != (out1 / "report.csv").read_bytes()


def test_suite_seed_env_fallback(tmp_path, monkeypatch):
    cfg = write(tmp_path, "s.json", '{"checks": ["holder"], "exponents": [2], "dims": [2], "orders": [2], '
                                    '"samples": 1}')
    monkeypatch.setenv(SEED_ENV, "4")
    main(["suite", cfg, "--out", str(tmp_path / "env")])
    monkeypatch.delenv(SEED_ENV)
    main(["suite", cfg, "--out", str(tmp_path / "flag"), "--seed", "4"])
    assert (tmp_path / "env" / "report.csv").read_bytes() == (tmp_path / "flag" / "report.csv").read_bytes()


def test_suite_empty_and_invalid(tmp_path, capsys):
    cfg = write(tmp_path, "e.json", '{"checks": []}')
    assert main(["suite", cfg, "--out", str(tmp_path / "e")]) == EXIT_OK
    assert (tmp_path / "e" / "report.csv").read_text() == "check_id,p,m,n,seed,passed\n"
    assert main(["suite", write(tmp_path, "bad.json", '{"dims": [0]}'), "--out", str(tmp_path / "x")]) == EXIT_INPUT
    assert main(["suite", str(tmp_path / "missing.json")]) == EXIT_INPUT


def test_suite_reports_first_failure(tmp_path, capsys):
    cfg = write(tmp_path, "f.json", '{"checks": ["rademacher"], "exponents": [2], "dims": [2], "orders": [3], '
                                    '"samples": 2, "seed": 1}')
    assert main(["suite", cfg, "--out", str(tmp_path / "f")]) == EXIT_FAILED
    assert "first failure: rademacher" in capsys.readouterr().out
    doc = json.loads((tmp_path / "f" / "witnesses.json").read_text())
    assert doc["summary"]["failures"] == 2 and doc["summary"]["first_failure"]["check_id"] == "rademacher"


def test_module_entry_point_and_pure_python_fallback(tmp_path):
    path = write(tmp_path, "d.json", DIAG11)
    env = dict(os.environ, TNL_PURE_PYTHON="1")
    res = subprocess.run([sys.executable, "-m", "tnlab", "norm", path, "--json"], capture_output=True, text=True,
                         env=env, check=True)
    assert json.loads(res.stdout)["value"] == 2
    res = subprocess.run([sys.executable, "-c", "import tnlab; print(tnlab.BACKEND)"], capture_output=True,
                         text=True, env=env, check=True)
    assert res.stdout.strip() == "python"
