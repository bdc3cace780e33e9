import json
from pathlib import Path

import pytest

from bernpop.cli import main
from bernpop.problems import canonical_json


@pytest.fixture()
def fixture_dir():
    import bernpop

    return Path(bernpop.__file__).parent / "fixtures"


def _run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_relax_level2_himmelblau(capsys, fixture_dir):
    code, out, _ = _run(
        capsys,
        ["relax", "--level", "2", "--output", "json", str(fixture_dir / "himmelblau.json")],
    )
    assert code == 0
    report = json.loads(out)
    assert report["bounds"]["p0"] == pytest.approx(-1170.0, abs=1e-6)
    assert report["bounds"]["p1"] == pytest.approx(-911.47, abs=0.01)
    assert report["bounds"]["p2"] == pytest.approx(-856.42, abs=0.01)


def test_bnb_level0_himmelblau(capsys, fixture_dir):
    code, out, _ = _run(
        capsys,
        [
            "bnb", "--level", "0", "--eps", "1e-9", "--output", "json",
            str(fixture_dir / "himmelblau.json"),
        ],
    )
    assert code == 0
    report = json.loads(out)
    sec = report["bnb"]
    assert sec["converged"]
    assert sec["lower"] <= 0.0 <= sec["upper"]
    assert sec["upper"] - sec["lower"] <= 1e-6


def test_relax_level1_with_degree_override(capsys, fixture_dir):
    code, out, _ = _run(
        capsys,
        [
            "relax", "--level", "1", "--degree", "2", "--output", "json",
            str(fixture_dir / "unitsq.json"),
        ],
    )
    assert code == 0
    report = json.loads(out)
    assert report["bounds"]["p1"] == pytest.approx(-0.5, abs=1e-9)


def test_degree_override_below_objective_degree_fails(capsys, fixture_dir):
    code, _, err = _run(
        capsys,
        ["relax", "--degree", "1", str(fixture_dir / "unitsq.json")],
    )
    assert code == 1
    assert "unsupported degree" in err


def test_malformed_json_distinct_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = _run(capsys, ["relax", str(bad)])
    assert code == 1
    assert "malformed JSON" in err


def test_missing_file_distinct_error(capsys):
    code, _, err = _run(capsys, ["relax", "/no/such/file.json"])
    assert code == 1
    assert "cannot read input" in err


def test_dimension_mismatch_distinct_error(tmp_path, capsys):
    bad = tmp_path / "dim.json"
    bad.write_text(
        json.dumps(
            {
                "dimension": 2,
                "objective": [{"exponents": [1], "coeff": 1}],
                "box": {"lower": [0, 0], "upper": [1, 1]},
            }
        )
    )
    code, _, err = _run(capsys, ["relax", str(bad)])
    assert code == 1
    assert "dimension" in err


def test_rational_mode_reports_fraction_strings(capsys, fixture_dir):
    code, out, _ = _run(
        capsys,
        [
            "relax", "--level", "0", "--arith", "rational", "--output", "json",
            str(fixture_dir / "himmelblau.json"),
        ],
    )
    assert code == 0
    report = json.loads(out)
    assert report["exact_bounds"]["p0"] == "-1170"
    assert report["bounds"]["p0"] == -1170.0


def test_json_report_roundtrips_bytewise(capsys, fixture_dir):
    code, out, _ = _run(
        capsys,
        ["relax", "--level", "1", "--output", "json", str(fixture_dir / "square1d.json")],
    )
    assert code == 0
    assert canonical_json(json.loads(out)) == out


def test_deterministic_output_modulo_timings(capsys, fixture_dir):
    argv = ["relax", "--level", "2", "--output", "json", str(fixture_dir / "unitsq.json")]
    _, out1, _ = _run(capsys, argv)
    _, out2, _ = _run(capsys, argv)
    r1, r2 = json.loads(out1), json.loads(out2)
    r1.pop("timings")
    r2.pop("timings")
    assert canonical_json(r1) == canonical_json(r2)


def test_lyapunov_mode(capsys, fixture_dir):
    code, out, _ = _run(
        capsys,
        ["lyapunov", "--output", "json", str(fixture_dir / "lyap1.json")],
    )
    assert code == 0
    report = json.loads(out)
    assert report["verdict"]["stable"] is True

    code, out, _ = _run(
        capsys,
        ["lyapunov", "--output", "json", str(fixture_dir / "lyap2.json")],
    )
    assert code == 0
    report = json.loads(out)
    assert report["verdict"]["stable"] is False
    assert report["verdict"]["v_bound"] == pytest.approx(-0.0625)


def test_bench_selected_names(capsys):
    code, out, _ = _run(
        capsys,
        ["bench", "--level", "1", "--output", "json", "square1d", "lyap1"],
    )
    assert code == 0
    report = json.loads(out)
    kinds = {r["label"]: r["kind"] for r in report["results"]}
    assert kinds == {"square1d": "pop", "lyap1": "lyapunov"}


def test_bench_unknown_name(capsys):
    code, _, err = _run(capsys, ["bench", "nonexistent"])
    assert code == 1
    assert "unknown benchmark" in err


def test_text_output_table_shape(capsys, fixture_dir):
    code, out, _ = _run(
        capsys,
        ["bnb", "--level", "0", "--eps", "1e-6", str(fixture_dir / "square1d.json")],
    )
    assert code == 0
    header = out.splitlines()[0]
    for col in ("ID", "Ineq", "Sub", "Time", "Cutoff", "Mono", "Sub*", "Cutoff*", "Time*", "Opt"):
        assert col in header
