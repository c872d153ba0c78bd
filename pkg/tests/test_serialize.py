import json
import pathlib

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import complex_pairs_with_map, complexes
from hoca import serialize as ser
from hoca.algebra import FGModule, ModuleMap, Ring, imat
from hoca.complexes import Complex, InvariantViolation, disk, homology
from hoca.model import verify_descent
from hoca.presentation import AddCategory, restrict
from hoca.spectra import shift_spectrum, validate_spectrum

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"
Z = Ring.integers()


def roundtrip(obj, kind):
    got_kind, back = ser.loads(ser.dumps(obj, kind))
    assert got_kind == kind
    return back


@given(st.sampled_from([0, 2, 3, 12]))
def test_ring_roundtrip(m):
    R = Z if m == 0 else Ring("Zmod", m)
    assert roundtrip(R, "ring") == R


@given(st.lists(st.sampled_from([0, 2, 3, 4, 6]), max_size=4))
def test_module_roundtrip(fs):
    M = FGModule(Z, fs)
    assert roundtrip(M, "module") == M


def test_map_roundtrip():
    f = ModuleMap(FGModule(Z, [0, 4]), FGModule(Z, [2]), imat([[1, 2]]))
    assert roundtrip(f, "map") == f


@given(complexes())
def test_complex_roundtrip(C):
    assert roundtrip(C, "complex") == C


@given(complex_pairs_with_map())
def test_chain_map_roundtrip(triple):
    _, _, f = triple
    assert roundtrip(f, "chain_map") == f


def test_spectrum_roundtrip():
    E = shift_spectrum(Z, 1, 3)
    back = roundtrip(E, "spectrum")
    assert back.levels == E.levels
    assert back.assembly == E.assembly
    assert validate_spectrum(back).ok


def test_acomplex_roundtrip():
    F = disk(FGModule(Ring("Zmod", 2), [0]), 0)
    X = restrict(F, AddCategory(F.ring))
    back = roundtrip(X, "acomplex")
    assert back.modules.keys() == X.modules.keys()
    assert all(back.evaluate(k) == X.evaluate(k) for k in range(2))


def test_descent_and_tset_roundtrip():
    _, dd = ser.read(str(DATA / "descent_disk.json"))
    back = roundtrip(dd, "descent")
    assert back.generators == dd.generators and back.acyclics == dd.acyclics
    _, ts = ser.read(str(DATA / "tset_times_two.json"), "tset")
    assert roundtrip(ts, "tset").complexes == ts.complexes


@pytest.mark.parametrize("path", sorted(DATA.glob("*.json")), ids=lambda p: p.name)
def test_shipped_samples_load(path):
    kind, obj = ser.read(str(path))
    assert kind == json.loads(path.read_text())["type"]


def test_bad_descent_sample_loads_but_fails_verification():
    _, dd = ser.read(str(DATA / "descent_bad.json"), "descent")
    assert not verify_descent(dd).ok
    _, dd = ser.read(str(DATA / "descent_disk.json"), "descent")
    assert verify_descent(dd).ok


def test_two_torsion_sample():
    _, C = ser.read(str(DATA / "two_torsion.json"), "complex")
    assert C == Complex(Z, {0: FGModule(Z, [0]), 1: FGModule(Z, [0])}, {0: [[2]]})
    assert str(homology(C, 1)) == "Z/2"


def doc(**body):
    return json.dumps({"format": 1, "type": "complex", "ring": {"kind": "Z"}, **body})


def test_factor_one_names_its_path():
    with pytest.raises(ser.ParseError) as e:
        ser.loads(doc(components={"0": {"factors": [0, 1]}}))
    assert e.value.path == "$.components.0.factors[1]"
    assert "forbidden" in str(e.value)


@pytest.mark.parametrize("text,path", [
    ('{"format": 1, "type": "complex"', "line 1 column 32"),
    ('[]', "$"),
    ('{"format": 2, "type": "complex"}', "$.format"),
    ('{"format": 1, "type": "sheaf"}', "$.type"),
    ('{"format": 1, "type": "complex", "ring": {"kind": "Q"}, "components": {}}', "$.ring.kind"),
    ('{"format": 1, "type": "complex", "ring": {"kind": "Zmod", "m": 1}, "components": {}}', "$.ring.m"),
    (doc(components={"x": {"factors": [0]}}), "$.components"),
    (doc(components={"0": {"factors": [0]}, "1": {"factors": [0]}}, differentials={"0": [[1, 2]]}),
     "$.differentials.0[0]"),
    (doc(components={"0": {"factors": [0]}, "1": {"factors": [0]}}, differentials={"0": [[True]]}),
     "$.differentials.0[0][0]"),
    (doc(components={"0": {"factors": [-2]}}), "$.components.0.factors[0]"),
    (doc(), "$"),
])
def test_parse_errors(text, path):
    with pytest.raises(ser.ParseError) as e:
        ser.loads(text)
    assert e.value.path == path


def test_zmod_factor_must_divide():
    text = json.dumps({"format": 1, "type": "module", "ring": {"kind": "Zmod", "m": 4},
                       "factors": [3]})
    with pytest.raises(ser.ParseError, match="does not divide"):
        ser.loads(text)


def test_wrong_expected_type():
    with pytest.raises(ser.ParseError, match="expected chain_map"):
        ser.read(str(DATA / "two_torsion.json"), "chain_map")


def test_d_squared_is_an_invariant_violation():
    C = {"0": {"factors": [0]}, "1": {"factors": [0]}, "2": {"factors": [0]}}
    with pytest.raises(InvariantViolation):
        ser.loads(doc(components=C, differentials={"0": [[1]], "1": [[1]]}))


def test_missing_file():
    with pytest.raises(ser.ParseError):
        ser.read("/nonexistent/file.json")


def test_non_chain_map_is_an_invariant_violation():
    Z1 = {"factors": [0]}
    text = json.dumps({
        "format": 1, "type": "chain_map",
        "source": {"ring": {"kind": "Z"}, "components": {"0": Z1}},
        "target": {"ring": {"kind": "Z"}, "components": {"0": Z1, "1": Z1},
                   "differentials": {"0": [[2]]}},
        "components": {"0": [[1]]}})
    with pytest.raises(InvariantViolation, match="degree 0"):
        ser.loads(text)
