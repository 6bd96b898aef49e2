from __future__ import annotations

import json
import math

import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from qdehelix.cli import main, run
from qdehelix.errors import ArgumentError
from qdehelix.reports import Report, RunConfig, dumps, loads


def test_run_config_validation():
    RunConfig(space="G", n=8, k=4)
    with pytest.raises(ArgumentError):
        RunConfig(n=9)
    with pytest.raises(ArgumentError):
        RunConfig(space="G", n=4, k=4)
    with pytest.raises(ArgumentError):
        RunConfig(format="xml")
    with pytest.raises(ArgumentError):
        RunConfig(n=3, signs=(1, 1))


finite = st.floats(allow_nan=False, allow_infinity=True, width=64)


@seed(8080)
@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.tuples(finite, finite), min_size=3, max_size=3), min_size=3, max_size=3),
       st.lists(st.lists(st.integers(-10**30, 10**30), min_size=2, max_size=2), min_size=2, max_size=2))
def test_report_round_trip(entries, ints):
    M = np.array([[complex(a, b) for a, b in row] for row in entries])
    rep = Report("monodromy", RunConfig().echo())
    rep.add_matrix("S", M)
    rep.add_integer_matrix("gram", np.array(ints, dtype=object))
    rep.residuals["x"] = float("nan")
    text = rep.to_json()
    back = Report.from_json(text)
    assert back.to_json() == text
    R = back.matrix("S")
    assert all((np.isnan(a) and np.isnan(b)) or a == b for a, b in zip(R.real.flat, M.real.flat))
    assert all((np.isnan(a) and np.isnan(b)) or a == b for a, b in zip(R.imag.flat, M.imag.flat))
    assert back.integer_matrix("gram").tolist() == ints
    assert all(isinstance(x, int) for row in json.loads(text)["integer_matrices"]["gram"] for x in row)


def test_dumps_formatting():
    assert dumps(0.1).strip() == "0.10000000000000001"
    assert dumps([1.0, -0.0, float("inf")]).strip() == '[1.0, -0.0, "inf"]'
    assert loads(dumps({"a": [1, 2.5]})) == {"a": [1, 2.5]}


def test_monodromy_command(tmp_path, capsys):
    out = tmp_path / "r.json"
    code = main(["monodromy", "--space", "P", "--n", "3", "--t", "0", "--phi", "0.3", "--tol", "1e-8",
                 "-o", str(out), "-q"])
    assert code == 0
    rep = Report.from_json(out.read_text())
    S = rep.matrix("S")
    assert S.shape == (3, 3)
    assert np.abs(np.tril(S, -1)).max() < 1e-8 and np.abs(np.diag(S) - 1).max() < 1e-8
    assert rep.integer_matrices["R"] == [[0, 0, 0], [3, 0, 0], [0, 3, 0]]


def test_monodromy_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["monodromy", "--n", "4", "-o", str(a), "-q"])
    main(["monodromy", "--n", "4", "-o", str(b), "-q"])
    assert a.read_bytes() == b.read_bytes()


def test_monodromy_on_a_ray():
    code, rep = run(["monodromy", "--n", "2", "--phi", str(math.pi / 2), "-q", "-o", "/dev/null"])
    assert code == 2
    assert rep.error["type"] == "AdmissibilityError"


def test_trivial_case():
    code, rep = run(["monodromy", "--n", "1", "-q", "-o", "/dev/null"])
    assert code == 0
    assert abs(rep.matrix("S")[0, 0] - 1) < 1e-12


def test_bad_input_exit_code():
    code, rep = run(["monodromy", "--n", "12", "-q", "-o", "/dev/null"])
    assert code == 2 and rep.error["type"] == "ArgumentError"


def test_verify_p2():
    code, rep = run(["verify", "--n", "3", "-q", "-o", "/dev/null"])
    assert code == 0
    assert rep.match["length"] <= 4
    assert rep.match["gram_exact"] is True


def test_verify_g24():
    code, rep = run(["verify", "--space", "G", "--k", "2", "--n", "4", "-q", "-o", "/dev/null"])
    assert code == 0
    assert rep.match["gram_G_equals_wedge_gram_P"] is True
    assert rep.integer_matrices["gram_G"] == rep.integer_matrices["round_S_inverse"]


def test_verify_below_precision_floor():
    code, rep = run(["verify", "--n", "3", "--tol", "1e-15", "-q", "-o", "/dev/null"])
    assert code == 3
    assert "floor" in rep.error["message"]
    assert rep.error["best_residual"] > 1e-15


def test_orbit_from_report(tmp_path):
    src = tmp_path / "m.json"
    main(["monodromy", "--n", "4", "-o", str(src), "-q"])
    code, rep = run(["orbit", "--input", str(src), "-q", "-o", "/dev/null"])
    assert code == 0 and rep.match["residual"] < 1e-6


def test_grassmannian_both_routes():
    code, rep = run(["grassmannian", "--k", "2", "--n", "4", "--route", "both", "-q", "-o", "/dev/null"])
    assert code == 0
    assert rep.residuals["S_direct_vs_compound"] < 1e-6


def test_csv_export(tmp_path):
    out = tmp_path / "r.csv"
    assert main(["monodromy", "--n", "2", "--format", "csv", "-o", str(out), "-q"]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "# S"
    assert lines[1] == "row,1:re,1:im,H:re,H:im"
    assert lines[2].startswith("1,")


def test_timing_only_on_request():
    _, rep = run(["monodromy", "--n", "2", "-q", "-o", "/dev/null"])
    assert rep.timing is None
    _, rep = run(["monodromy", "--n", "2", "--timing", "-q", "-o", "/dev/null"])
    assert rep.timing["wall_seconds"] > 0


def test_precision_env(monkeypatch):
    monkeypatch.setenv("QDE_PRECISION", "mp:bogus")
    code, rep = run(["monodromy", "--n", "2", "-q", "-o", "/dev/null"])
    assert code == 2
