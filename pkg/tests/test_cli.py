import io
import json
import pathlib

import pytest

from hoca.cli import main

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main([str(a) for a in argv], out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def d(name):
    return DATA / name


GOLDEN = [
    (("homology", d("two_torsion.json")), "H^0 = 0\nH^1 = Z/2\n"),
    (("homology", d("two_torsion.json"), "--deg", 1), "Z/2\n"),
    (("cone", d("times_two.json")), "C^-1 = Z\nd^-1 = [[2]]\nC^0 = Z\n"),
    (("tensor", d("sphere_z2.json"), d("sphere_z2.json")), "C^0 = Z/2\n"),
    (("derived-tensor", d("sphere_z2.json"), d("sphere_z2.json")),
     "C^-1 = Z/2\nC^0 = Z/2\nH^-1 = Z/2\nH^0 = Z/2\n"),
    (("derived-hom", d("sphere_z2.json"), d("sphere_z.json"), "--shift", 1), "Z/2\n"),
    (("verify-descent", d("descent_disk.json")),
     "pass generator 0 (Z)\npass acyclic 0\npass certificate 0\n"),
    (("spectrum", "validate", d("sym_sphere1.json")), "coxeter: ok\nequivariance: ok\n"),
    (("present", "extend", d("f2_sphere_restricted.json")), "C^0 = Z/2\n"),
]


@pytest.mark.parametrize("argv,expected", GOLDEN, ids=lambda x: x[0] if isinstance(x, tuple) else "")
def test_golden_text(argv, expected):
    code, out, err = run(*argv)
    assert (code, out, err) == (0, expected, "")


def test_factorize_reports_certificate():
    code, out, _ = run("factorize", d("factorize_z2.json"), "--max-cells", 4)
    assert code == 0
    assert "certificate verified: yes" in out
    assert "p is a quasi-isomorphism: yes" in out


def test_factorize_budget():
    code, _, err = run("factorize", d("factorize_z2.json"), "--max-cells", 1)
    assert code == 2
    assert "budget" in err


def test_bad_descent_exits_3():
    code, out, _ = run("verify-descent", d("descent_bad.json"))
    assert code == 3
    assert "FAIL acyclic 0: nonzero homology in degree 1" in out


def test_localize_tower():
    code, out, _ = run("localize", d("two_torsion.json"), "--tset", d("tset_times_two.json"),
                       "--steps", 2)
    assert code == 0
    assert out.count("map from the previous stage: zero on homology") == 2
    code, out, _ = run("localize", d("sphere_z3.json"), "--tset", d("tset_times_two.json"))
    assert code == 0 and "residual: none" in out


def test_spectrum_commands():
    code, out, _ = run("spectrum", "weak-omega", d("shift_spectrum.json"))
    assert code == 0 and out.endswith("yes\n")
    code, out, _ = run("spectrum", "suspend", d("shift_spectrum.json"))
    assert code == 0 and "level 0: sigma is a quasi-isomorphism" in out


def test_adjunction_command():
    code, out, _ = run("present", "check-adjunction", d("f2_sphere_restricted.json"), d("f2_disk.json"))
    assert code == 0 and "adjunction check: pass" in out


def test_monoid_axiom_probe_and_bad_index():
    code, out, _ = run("probe-monoid-axiom", d("sphere_z2.json"), "--j-index", 0)
    assert code == 0 and "injective quasi-isomorphism: yes" in out
    code, _, err = run("probe-monoid-axiom", d("sphere_z2.json"), "--j-index", 99)
    assert code == 1 and "usage error" in err


def test_json_output_is_parseable_and_stable():
    a = run("homology", d("two_torsion.json"), "--format", "json")
    b = run("--format", "json", "homology", d("two_torsion.json"))
    assert a == b
    doc = json.loads(a[1])
    assert doc["homology"]["1"] == {"invariants": [2], "text": "Z/2"}


def test_output_is_deterministic():
    argv = ("localize", d("two_torsion.json"), "--tset", d("tset_times_two.json"))
    assert run(*argv) == run(*argv)


@pytest.mark.parametrize("argv,code", [
    ((), 1),
    (("frobnicate",), 1),
    (("homology",), 1),
    (("homology", d("two_torsion.json"), "--format", "xml"), 1),
    (("homology", "/nonexistent.json"), 4),
    (("homology", d("times_two.json")), 4),
])
def test_exit_codes(argv, code):
    assert run(*argv)[0] == code


def test_malformed_input_names_the_path(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"format": 1, "type": "complex", "ring": {"kind": "Z"},
                               "components": {"0": {"factors": [1]}}}))
    code, _, err = run("homology", bad)
    assert code == 4
    assert "$.components.0.factors[0]" in err
    bad.write_text("{\n  \"format\": 1,\n")
    code, _, err = run("homology", bad)
    assert code == 4 and "line 3 column 1" in err


def test_selftest_single_criterion():
    code, out, _ = run("selftest", "--only", 4)
    assert code == 0
    assert out.splitlines() == [
        "PASS criterion 4: derived-hom oracle (p in 2, 3, 5 and n in -2..3, 0 mismatches)",
        "1/1 criteria passed",
    ]


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
    assert "selftest" in capsys.readouterr().out
