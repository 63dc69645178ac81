"""CLI surface: exit codes, report schema conformance, seeded reproducibility."""

import json
import subprocess
import sys

import jsonschema
import pytest

from triadeform import DeformedGroup, parse_ring
from triadeform.cli import main
from triadeform.report import REPORT_SCHEMA


def run(capsys, argv):
    rc = main(argv)
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


def run_json(capsys, argv):
    rc, out, err = run(capsys, argv + ["--output", "json"])
    assert err == ""
    report = json.loads(out)
    jsonschema.validate(report, REPORT_SCHEMA)
    return rc, report


@pytest.fixture
def cocycle_file(tmp_path):
    def write(data, name="cocycle.json"):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return str(path)

    return write


TWISTED_F5 = {
    "ring": "Z/5",
    "n": 3,
    "cocycles": [{"type": "carry", "targets": {"0": "2"}}, None],
}

CARRY_Z_TO_Q = {
    "domain": {"type": "units", "ring": "Z"},
    "codomain": {"type": "units", "ring": "Q"},
    "backend": {"type": "carry", "targets": {"0": {"num": "4", "den": "1"}}},
}


# ---------------------------------------------------------------------------
# ring commands


def test_ring_info(capsys):
    rc, report = run_json(capsys, ["ring", "info", "Z/5"])
    assert rc == 0
    assert report["data"] == {
        "spec": "Z/5",
        "kind": "IntegersMod",
        "finite": True,
        "order": 5,
        "unit_count": 4,
    }


def test_ring_units_pins_fundamental_unit(capsys):
    rc, report = run_json(capsys, ["ring", "units", "Z[sqrt(2)]"])
    assert rc == 0
    assert report["data"]["torsion_order"] == 2
    assert report["data"]["torsion_generator"] == "-1"
    assert report["data"]["fundamental_units"] == ["1+1*sqrt(2)"]


def test_ring_divides_exit_codes(capsys):
    rc, report = run_json(capsys, ["ring", "divides", "Z", "2", "6"])
    assert rc == 0 and report["data"]["divides"] is True
    rc, report = run_json(capsys, ["ring", "divides", "Z", "4", "6"])
    assert rc == 1 and report["data"]["divides"] is False
    assert "witness" in report


def test_ring_psi_worked_instance(capsys):
    rc, report = run_json(
        capsys,
        [
            "ring", "psi", "Z[sqrt(2)]",
            "--s", "2",
            "--lam", "3+2*sqrt(2)",
            "--alpha", "3+2*sqrt(2)",
            "--beta", "17+12*sqrt(2)",
            "--delta", "19601+13860*sqrt(2)",
            "--a", "679+476*sqrt(2)",
        ],
    )
    assert rc == 0
    assert report["data"]["value"] is True
    # alpha = 1 breaks a conjunct
    rc, report = run_json(
        capsys,
        [
            "ring", "psi", "Z[sqrt(2)]",
            "--s", "2",
            "--lam", "3+2*sqrt(2)",
            "--alpha", "1",
            "--beta", "17+12*sqrt(2)",
            "--delta", "19601+13860*sqrt(2)",
            "--a", "679+476*sqrt(2)",
        ],
    )
    assert rc == 1 and report["data"]["value"] is False


def test_text_output_format(capsys):
    rc, out, err = run(capsys, ["ring", "info", "Z/5"])
    assert rc == 0 and err == ""
    lines = out.splitlines()
    assert lines[0] == "[ring info] lemma=exact-arith ok=true"
    assert any(line.startswith("  order: 5") for line in lines)


# ---------------------------------------------------------------------------
# ext


def test_ext_nontrivial(capsys):
    rc, report = run_json(capsys, ["ext", "4,0", "2"])
    assert rc == 0
    assert report["data"]["ext_invariants"] == [2]
    assert report["data"]["ext_order"] == 2
    assert report["data"]["trivial"] is False


def test_ext_trivial_for_free_b(capsys):
    rc, report = run_json(capsys, ["ext", "0", "5"])
    assert rc == 0
    assert report["data"]["ext_invariants"] == []
    assert report["data"]["trivial"] is True


# ---------------------------------------------------------------------------
# cocycle commands


def test_cocycle_verify_exhaustive(capsys, cocycle_file):
    rc, report = run_json(capsys, ["cocycle", "verify", "--file", cocycle_file(CARRY_Z_TO_Q)])
    assert rc == 0
    assert report["data"]["exhaustive"] is True
    assert report["seed"] == 20260814


def test_cocycle_is_coboundary_with_witness(capsys, cocycle_file):
    rc, report = run_json(capsys, ["cocycle", "is-coboundary", "--file", cocycle_file(CARRY_Z_TO_Q)])
    assert rc == 0
    assert report["data"] == {"coboundary": True, "witness": "psi(-1)=1/2"}


def test_cocycle_is_cot_rejects_twisted_carry(capsys, cocycle_file):
    doc = {
        "domain": {"type": "units", "ring": "Z/5"},
        "codomain": {"type": "units", "ring": "Z/5"},
        "backend": {"type": "carry", "targets": {"0": "2"}},
    }
    rc, report = run_json(capsys, ["cocycle", "is-cot", "--file", cocycle_file(doc)])
    assert rc == 1
    assert report["data"]["cot"] is False


def test_cocycle_transport(capsys, tmp_path, cocycle_file):
    doc = {
        "domain": {"type": "fg", "invariant_factors": [4], "free_rank": 0},
        "codomain": {"type": "fg", "invariant_factors": [2], "free_rank": 0},
        "backend": {"type": "carry", "targets": {"0": [1]}},
    }
    psi = tmp_path / "psi.json"
    psi.write_text(json.dumps({
        "domain": {"invariants": [2]}, "codomain": {"invariants": [2]}, "matrix": [[1]],
    }))
    eta = tmp_path / "eta.json"
    eta.write_text(json.dumps({
        "domain": {"invariants": [4]}, "codomain": {"invariants": [4]}, "matrix": [[3]],
    }))
    rc, report = run_json(
        capsys,
        ["cocycle", "transport", "--file", cocycle_file(doc), "--psi", str(psi), "--eta", str(eta)],
    )
    assert rc == 0
    result = report["data"]["result"]
    assert result["domain"] == {"type": "fg", "invariant_factors": [4], "free_rank": 0}
    assert result["backend"]["type"] == "table"


def test_cocycle_transport_rejects_non_iso(capsys, tmp_path, cocycle_file):
    doc = {
        "domain": {"type": "fg", "invariant_factors": [4], "free_rank": 0},
        "codomain": {"type": "fg", "invariant_factors": [2], "free_rank": 0},
        "backend": {"type": "carry", "targets": {"0": [1]}},
    }
    hom = tmp_path / "hom.json"
    hom.write_text(json.dumps({
        "domain": {"invariants": [4]}, "codomain": {"invariants": [4]}, "matrix": [[2]],
    }))
    psi = tmp_path / "psi.json"
    psi.write_text(json.dumps({
        "domain": {"invariants": [2]}, "codomain": {"invariants": [2]}, "matrix": [[1]],
    }))
    rc, out, err = run(capsys, [
        "cocycle", "transport", "--file", cocycle_file(doc), "--psi", str(psi), "--eta", str(hom),
    ])
    assert rc == 2
    assert "error:" in err


# ---------------------------------------------------------------------------
# group commands


def test_group_build_untwisted(capsys, group_file):
    rc, report = run_json(capsys, ["group", "build", "--group", group_file({"ring": "Z/3", "n": 3})])
    assert rc == 0
    assert report["data"] == {
        "ring": "Z/3", "n": 3, "kind": "deformed", "finite": True,
        "twisted": False, "order": 216,
    }


def test_group_build_twisted(capsys, group_file):
    rc, report = run_json(capsys, ["group", "build", "--group", group_file(TWISTED_F5)])
    assert rc == 0
    assert report["data"]["twisted"] is True
    assert report["data"]["order"] == 8000


def test_group_build_matrix(capsys, group_file):
    rc, report = run_json(capsys, ["group", "build", "--group", group_file({"ring": "Z/3", "n": 2, "kind": "matrix"})])
    assert rc == 0
    assert report["data"]["kind"] == "matrix"
    assert report["data"]["order"] == 12
    assert "twisted" not in report["data"]


def test_group_mul_cancels_transvections(capsys, group_file):
    group = DeformedGroup(parse_ring("Z/3"), 3)
    x = json.dumps(group.elem_to_json(group.transvection(1, 2, 1)))
    y = json.dumps(group.elem_to_json(group.transvection(1, 2, 2)))
    rc, report = run_json(
        capsys,
        ["group", "mul", "--group", group_file({"ring": "Z/3", "n": 3}), "--x", x, "--y", y],
    )
    assert rc == 0
    assert report["data"]["product"] == group.elem_to_json(group.identity)


def test_group_check_presentation(capsys, group_file):
    path = group_file({"ring": "Z/3", "n": 3})
    rc, report = run_json(capsys, ["group", "check-presentation", "--group", path, "--trials", "20"])
    assert rc == 0
    families = {f["family"] for f in report["data"]["families"]}
    assert families == {
        "transvection-additivity",
        "disjoint-commutation",
        "overlap-commutation",
        "diagonal-subgroup",
        "diagonal-conjugation",
    }
    assert all(f["ok"] for f in report["data"]["families"])


def test_group_fn_identity_sweeps_all_unit_pairs(capsys, group_file):
    rc, report = run_json(capsys, ["group", "fn-identity", "--group", group_file(TWISTED_F5)])
    assert rc == 0
    assert report["data"] == {"pairs_checked": 16, "failures": 0}


def test_group_fn_identity_explicit_pair(capsys, group_file):
    path = group_file(TWISTED_F5)
    rc, report = run_json(
        capsys, ["group", "fn-identity", "--group", path, "--alpha", "2", "--beta", "3"]
    )
    assert rc == 0
    assert report["data"]["pairs_checked"] == 1
    rc, out, err = run(capsys, ["group", "fn-identity", "--group", path, "--alpha", "2"])
    assert rc == 2 and "error:" in err


def test_group_split_iso_verified(capsys, group_file):
    path = group_file({"ring": "Z/5", "n": 3})
    rc, report = run_json(capsys, ["group", "split-iso", "--group", path, "--trials", "50"])
    assert rc == 0
    assert report["data"] == {"split": True, "verified_pairs": 50, "round_trip": True}


def test_group_split_iso_refused_for_nonsplit_twist(capsys, group_file):
    rc, report = run_json(capsys, ["group", "split-iso", "--group", group_file(TWISTED_F5)])
    assert rc == 1
    assert report["data"] == {"split": False}
    assert report["witness"] == "some factor cocycle is not a coboundary"


def test_group_enumerate(capsys, group_file):
    path = group_file({"ring": "Z/3", "n": 3})
    rc, report = run_json(capsys, ["group", "enumerate", "--group", path])
    assert rc == 0 and report["data"] == {"order": 216}
    rc, report = run_json(capsys, ["group", "enumerate", "--group", path, "--list-elements"])
    assert len(report["data"]["elements"]) == 216


# ---------------------------------------------------------------------------
# structure commands


def test_structure_center_and_derived(capsys, group_file):
    path = group_file({"ring": "Z/3", "n": 3})
    rc, report = run_json(capsys, ["structure", "center", "--group", path])
    assert rc == 0
    assert report["data"]["order"] == 2
    assert report["data"]["agrees_with_description"] is True
    rc, report = run_json(capsys, ["structure", "derived", "--group", path])
    assert rc == 0
    assert report["data"]["order"] == 27
    assert report["data"]["agrees_with_description"] is True


def test_structure_fitting_brute_force(capsys, group_file):
    path = group_file({"ring": "Z/3", "n": 3})
    rc, report = run_json(
        capsys, ["structure", "fitting", "--group", path, "--brute-force", "--class-bound", "2"]
    )
    assert rc == 0
    assert report["data"]["order"] == 54
    assert report["data"]["agrees_with_description"] is True
    assert report["data"]["nilpotency_class"] == 2


def test_structure_fitting_description_only(capsys, group_file):
    rc, report = run_json(capsys, ["structure", "fitting", "--group", group_file({"ring": "Z/3", "n": 3})])
    assert rc == 0
    assert report["data"]["kind"] == "Fitting"


def test_structure_width(capsys, group_file):
    path = group_file({"ring": "Z/3", "n": 3})
    rc, report = run_json(capsys, ["structure", "width", "--group", path, "--bound", "3"])
    assert rc == 0
    assert report["data"]["width_needed"] == 1
    rc, report = run_json(capsys, ["structure", "width", "--group", path, "--bound", "0"])
    assert rc == 1


def test_structure_torus(capsys, group_file):
    group = DeformedGroup(parse_ring("Z/3"), 3)
    path = group_file({"ring": "Z/3", "n": 3})
    elem = json.dumps(group.elem_to_json(group.diagonal_gen(1, 2)))
    rc, report = run_json(
        capsys, ["structure", "torus", "--group", path, "--index", "1", "--elem", elem]
    )
    assert rc == 0
    assert report["data"] == {"i": 1, "member": True, "alpha": "2"}
    rc, report = run_json(
        capsys, ["structure", "torus", "--group", path, "--index", "2", "--elem", elem]
    )
    assert rc == 1
    assert report["data"]["member"] is False


def test_structure_theta(capsys, group_file):
    path = group_file(TWISTED_F5)
    rc, report = run_json(capsys, ["structure", "theta", "--group", path, "--index", "1"])
    assert rc == 1 and report["data"]["splits"] is False
    rc, report = run_json(capsys, ["structure", "theta", "--group", path, "--index", "2"])
    assert rc == 0 and report["data"]["splits"] is True


# ---------------------------------------------------------------------------
# fo commands


def test_fo_parse(capsys):
    rc, report = run_json(capsys, ["fo", "parse", "A x. x = 1"])
    assert rc == 0
    assert report["data"] == {"canonical": "A x. x = 1", "free_variables": [], "round_trip": True}


def test_fo_parse_reports_free_variables(capsys):
    rc, report = run_json(capsys, ["fo", "parse", "A x. [x, y] = 1"])
    assert rc == 0
    assert report["data"]["free_variables"] == ["y"]


def test_fo_eval_naive_and_semantic(capsys, group_file):
    path = group_file({"ring": "Z/3", "n": 2, "kind": "matrix"})
    rc, report = run_json(capsys, ["fo", "eval", "A x. (E y. x*y = 1)", "--group", path])
    assert rc == 0
    assert report["data"]["value"] is True
    assert report["data"]["path"] == "naive"
    assert report["data"]["atoms_evaluated"] > 0
    rc, report = run_json(
        capsys, ["fo", "eval", "A x. A y. x*y = y*x", "--group", path, "--semantic"]
    )
    assert rc == 1
    assert report["data"] == {"value": False, "path": "semantic"}


def test_fo_eval_with_assignment(capsys, group_file):
    group = DeformedGroup(parse_ring("Z/3"), 3)
    path = group_file({"ring": "Z/3", "n": 3})
    elem = json.dumps(group.elem_to_json(group.transvection(1, 2, 1)))
    rc, report = run_json(
        capsys, ["fo", "eval", "x*x*x = 1", "--group", path, "--assign", f"x={elem}"]
    )
    assert rc == 0 and report["data"]["value"] is True


def test_fo_eval_defining_set_with_center(capsys, group_file):
    path = group_file({"ring": "Z/3", "n": 3})
    rc, report = run_json(
        capsys,
        ["fo", "eval", "@Z(x)", "--group", path, "--defining-set", "--var", "x", "--center-set", "Z"],
    )
    assert rc == 0
    assert report["data"]["defining_set_size"] == 2
    assert len(report["data"]["defining_set"]) == 2


def test_fo_eval_budget_flag(capsys, group_file):
    path = group_file({"ring": "Z/3", "n": 3})
    rc, out, err = run(
        capsys, ["fo", "eval", "A x. A y. A z. [x, y, z] = 1", "--group", path, "--budget", "1000"]
    )
    assert rc == 2
    assert "budget" in err


# ---------------------------------------------------------------------------
# seeds and reproducibility


def test_seeded_runs_are_byte_identical(capsys, group_file):
    path = group_file({"ring": "Z/3", "n": 3})
    argv = ["group", "check-presentation", "--group", path, "--seed", "7", "--trials", "20", "--output", "json"]
    rc1, out1, _ = run(capsys, argv)
    rc2, out2, _ = run(capsys, argv)
    assert rc1 == rc2 == 0
    assert out1 == out2
    assert json.loads(out1)["seed"] == 7


def test_flags_accepted_before_and_after_subcommand(capsys, group_file):
    path = group_file({"ring": "Q", "n": 3})
    before = ["--seed", "9", "--trials", "10", "group", "fn-identity", "--group", path, "--output", "json"]
    after = ["group", "fn-identity", "--group", path, "--seed", "9", "--trials", "10", "--output", "json"]
    rc1, out1, _ = run(capsys, before)
    rc2, out2, _ = run(capsys, after)
    assert rc1 == rc2 == 0
    assert out1 == out2
    assert json.loads(out1)["data"]["pairs_checked"] == 10


def test_seed_env_var_overrides_flag(capsys, group_file, monkeypatch):
    monkeypatch.setenv("TRIADEFORM_SEED", "123")
    path = group_file({"ring": "Z/3", "n": 3})
    rc, report = run_json(
        capsys, ["group", "check-presentation", "--group", path, "--seed", "7", "--trials", "5"]
    )
    assert rc == 0
    assert report["seed"] == 123


# ---------------------------------------------------------------------------
# usage errors


@pytest.mark.parametrize(
    "argv",
    [
        ["group", "build", "--group", "/nonexistent/group.json"],
        ["ring", "info", "Flub"],
        ["fo", "parse", "A y x = 1"],
        ["ext", "x,y", "2"],
        ["ring", "divides", "Z", "0", "3"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    rc, out, err = run(capsys, argv)
    assert rc == 2
    assert err.startswith("error:")


def test_invalid_group_json_exits_2(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    rc, out, err = run(capsys, ["group", "build", "--group", str(path)])
    assert rc == 2 and "error:" in err


def test_defining_set_requires_var(capsys, group_file):
    path = group_file({"ring": "Z/3", "n": 3})
    rc, out, err = run(capsys, ["fo", "eval", "x = 1", "--group", path, "--defining-set"])
    assert rc == 2 and "error:" in err


def test_unknown_command_exits_2(capsys):
    assert main(["frobnicate"]) == 2
    capsys.readouterr()


# ---------------------------------------------------------------------------
# installed entry point


def test_console_script_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "triadeform.cli", "ring", "info", "Z/3", "--output", "json"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    report = json.loads(proc.stdout)
    jsonschema.validate(report, REPORT_SCHEMA)
    assert report["data"]["order"] == 3
