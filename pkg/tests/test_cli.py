import json
from fractions import Fraction as F

import pytest

from ringext.cli import main, render_text
from ringext.orthogonality import OrthMatrix, build_matrix
from ringext.rings import build_ring
from ringext.weights import builtin_weight


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, (json.loads(out) if out.strip() else None), err


@pytest.fixture
def lee_file(tmp_path):
    p = tmp_path / "lee.json"
    p.write_text(json.dumps({"kind": "table", "values": {"0": 0, "1": 1, "2": 2, "3": 1}}))
    return str(p)


@pytest.fixture
def bad_z4_file(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"kind": "table", "values": {"1": 1, "2": 0, "3": 1}}))
    return str(p)


def test_criterion_z4_lee(capsys, lee_file):
    code, out, _ = run_json(capsys, "criterion", "--ring", "Z(4)", "--weight", lee_file)
    assert code == 0
    assert out["criterion"]["passes"] is True
    assert out["criterion"]["factors"] == {"2R": "-2", "R": "-2"}


def test_analyze_mat2_rank(capsys):
    code, out, _ = run_json(capsys, "analyze", "--ring", "Mat(2,GF(2))", "--weight", "rank")
    assert code == 0 and out["criterion"]["passes"] is True
    assert out["classification"]["is_pir"] is True
    assert out["determinants"]["TQ_identity"] is True
    assert "counterexample" not in out


def test_analyze_singular_has_counterexample(capsys, bad_z4_file):
    code, out, _ = run_json(capsys, "analyze", "--ring", "Z(4)", "--weight", bad_z4_file, "--matrices")
    assert code == 0
    assert out["criterion"]["passes"] is False
    assert out["counterexample"]["verified"] is True
    assert set(out["matrices"]) == {"W0", "W", "Q", "T", "WQ"}


def test_strict_exit_code(capsys, bad_z4_file, lee_file):
    assert run(capsys, "criterion", "--ring", "Z(4)", "--weight", bad_z4_file, "--strict")[0] == 1
    assert run(capsys, "criterion", "--ring", "Z(4)", "--weight", lee_file, "--strict")[0] == 0


def test_non_pir_refused(capsys):
    code, out, _ = run_json(capsys, "criterion", "--ring", "Table(fq_xy.json)", "--weight", "hamming")
    assert code == 0
    crit = out["criterion"]
    assert crit["status"] == "refused" and crit["det_W0"] != "0"


@pytest.mark.parametrize("argv,needle", [
    (["criterion", "--ring", "Z(x)", "--weight", "hamming"], "Z(x)"),
    (["criterion", "--ring", "Quux(3)", "--weight", "hamming"], "Quux"),
    (["criterion", "--ring", "Z(4)", "--weight", "nosuch.json"], "nosuch.json"),
    (["criterion", "--ring", "Z(8)", "--weight", "lee"], "Lee"),
    (["criterion", "--ring", "Z(4)"], "--weight"),
    (["validate", "--ring", "Mat(4,GF(4))"], "max-order"),
])
def test_input_errors(capsys, argv, needle):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == ""
    assert needle in err


def test_missing_element_named(capsys, tmp_path):
    p = tmp_path / "w.json"
    p.write_text(json.dumps({"kind": "table", "values": {"1": 1, "3": 1}}))
    code, _, err = run(capsys, "criterion", "--ring", "Z(4)", "--weight", str(p))
    assert code == 2 and "2" in err and "missing" in err


def test_matrix_roundtrip(capsys):
    ring = build_ring("Mat(2,GF(2))")
    w = builtin_weight(ring, "homogeneous", gamma="3/2")
    code, out, _ = run_json(capsys, "matrix", "--ring", "Mat(2,GF(2))", "--weight", "homogeneous:3/2",
                            "--which", "W0", "--det")
    assert code == 0
    m = OrthMatrix.from_json(out["matrix"])
    assert m == build_matrix(ring, w, "W0")
    assert F(out["det"]) == m.det()


def test_matrix_w0_value(capsys):
    code, out, _ = run_json(capsys, "matrix", "--ring", "Z(4)", "--weight", "lee", "--which", "W", "--w0", "7/3")
    assert out["matrix"]["entries"][0] == ["7/3"] * 3


def test_q_and_t_need_no_weight(capsys):
    code, out, _ = run_json(capsys, "matrix", "--ring", "Table(fq_xy.json)", "--which", "Q")
    assert code == 0 and out["det"] == "0"
    code, out, _ = run_json(capsys, "matrix", "--ring", "Z(12)", "--which", "T")
    assert code == 0 and out["det"] in ("1", "-1")


def test_byte_identical_reports(capsys, lee_file):
    argv = ["analyze", "--ring", "Z(4)", "--weight", lee_file, "--no-timings"]
    first = run(capsys, *argv)[1]
    assert first == run(capsys, *argv)[1]
    with_t = json.loads(run(capsys, *argv[:-1])[1])
    assert "timings" in with_t
    with_t.pop("timings")
    assert with_t == json.loads(first)


def test_oracle_report_deterministic(capsys, lee_file):
    argv = ["oracle", "--ring", "Z(4)", "--weight", lee_file, "--no-timings"]
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]


def test_text_format(capsys, lee_file):
    code, out, _ = run(capsys, "criterion", "--ring", "Z(4)", "--weight", lee_file, "--format", "text")
    assert code == 0
    assert "passes: yes" in out and "2R: -2" in out
    assert not out.lstrip().startswith("{")


def test_render_text_nested():
    text = render_text({"a": {"b": [1, 2]}, "c": None})
    assert "a:" in text and "b: [1, 2]" in text and "c: -" in text


def test_ideals(capsys):
    code, out, _ = run_json(capsys, "ideals", "--ring", "Z(8)", "--side", "left")
    assert code == 0 and "right" not in out
    rows = out["left"]["ideals"]
    assert [r["size"] for r in rows] == [1, 2, 4, 8]
    assert [r["mobius_from_zero"] for r in rows] == [1, -1, 0, 0]
    assert rows[1]["generators"] == ["4"]
    assert out["left"]["hasse"] == [[0, 1], [1, 2], [2, 3]]


def test_ideals_all_lists_non_principal(capsys):
    _, few, _ = run_json(capsys, "ideals", "--ring", "Table(fq_xy.json)", "--side", "right")
    _, every, _ = run_json(capsys, "ideals", "--ring", "Table(fq_xy.json)", "--side", "right", "--all")
    assert len(every["right"]["ideals"]) > len(few["right"]["ideals"])
    assert any(not r["principal"] for r in every["right"]["ideals"])


def test_counterexample_and_oracle(capsys, bad_z4_file, lee_file):
    code, out, _ = run_json(capsys, "counterexample", "--ring", "Z(4)", "--weight", bad_z4_file)
    assert code == 0 and out["counterexample"]["verified"] is True
    code, out, _ = run_json(capsys, "counterexample", "--ring", "Z(4)", "--weight", lee_file)
    assert code == 2
    code, out, _ = run_json(capsys, "oracle", "--ring", "Z(4)", "--weight", lee_file, "--max-len", "2")
    assert code == 0 and out["oracle"]["extension_property"] is True
    code, out, _ = run_json(capsys, "oracle", "--ring", "Z(4)", "--weight", bad_z4_file, "--strict")
    assert code == 1 and out["oracle"]["extension_property"] is False


def test_budget_exceeded_reports_partial(capsys, lee_file):
    code, out, err = run_json(capsys, "oracle", "--ring", "Z(4)", "--weight", lee_file, "--search-budget", "10")
    assert code == 2 and "budget" in err.lower()
    assert out["partial"]["budget_exhausted"] is True


def test_validate(capsys):
    code, out, _ = run_json(capsys, "validate", "--ring", "Table(fq_xy.json)", "--weight", "hamming")
    assert code == 0 and out["validation"]["valid"] is True
    assert out["weight"]["bi_invariant"] is True


def test_max_order_env(capsys, monkeypatch):
    monkeypatch.setenv("RINGEXT_MAX_ORDER", "8")
    assert run(capsys, "validate", "--ring", "Z(9)")[0] == 2
    assert run(capsys, "validate", "--ring", "Z(9)", "--max-order", "9")[0] == 0
