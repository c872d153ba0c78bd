import pytest

from hoca.acceptance import flipped_sym
from hoca.algebra import FGModule, Ring
from hoca.complexes import ChainMap, Complex, InvariantViolation, homology, sphere
from hoca.monoidal import TensorComplex
from hoca.spectra import (
    free_monoid_failures,
    is_spectrum_map,
    is_weak_omega_spectrum,
    make_spectrum,
    omega_infty,
    ring_spectrum_failures,
    shift_spectrum,
    sigma_infty,
    sigma_infty_monoidal_map,
    smash,
    spectrum_shift,
    spectrum_tensor_complex,
    suspension_cocycle_failures,
    suspension_map,
    sym_ring,
    validate_module_spectrum,
    validate_spectrum,
    weak_omega_report,
    zero_module,
    zero_spectrum,
    Spectrum,
)

Z = Ring.integers()
R1 = FGModule.free(Z, 1)


def S(d):
    return sphere(R1, d)


@pytest.mark.parametrize("d", [0, 1, 2])
def test_sym_is_a_commutative_ring_spectrum(d):
    ring = sym_ring(S(d), 3)
    assert ring_spectrum_failures(ring) == []
    assert validate_spectrum(ring.spectrum).ok


def test_odd_sphere_swap_is_minus_one():
    E = sym_ring(S(1), 2).spectrum
    swap = E.seq.actions[2][0]
    assert swap[2].matrix.tolist() == [[-1]]
    E0 = sym_ring(S(2), 2).spectrum
    assert E0.seq.actions[2][0][4].matrix.tolist() == [[1]]


def test_flipped_sign_is_detected():
    flip = flipped_sym(S(1), 3)
    rep = validate_spectrum(flip)
    assert not rep.ok
    assert rep.coxeter == []
    assert rep.equivariance == [(2, 0, "S", 0), (1, 2, "E", 0)]
    ring = sym_ring(S(1), 3)
    ring.spectrum = flip
    assert ("commutativity", 1, 1) in ring_spectrum_failures(ring)
    assert any("not equivariant" in line for line in rep.lines())


def test_broken_associativity_is_detected():
    ring = sym_ring(S(0), 3)
    ring.mult[2, 1] = 2 * ring.mult[2, 1]
    bad = ring_spectrum_failures(ring)
    assert ("associativity", 1, 1, 1) in bad


def test_zero_spectrum_and_zero_module():
    assert validate_spectrum(zero_spectrum(S(1), 3)).ok
    assert validate_module_spectrum(zero_module(sym_ring(S(1), 3)))


def test_make_spectrum_rejects_bad_data():
    flip = flipped_sym(S(1), 3)
    with pytest.raises(InvariantViolation):
        make_spectrum(flip.S, flip.levels, flip.seq.actions, flip.assembly)
    good = sym_ring(S(1), 3).spectrum
    E = make_spectrum(good.S, good.levels, good.seq.actions, good.assembly)
    assert validate_spectrum(E).ok


def test_assembly_shape_is_checked():
    E = sym_ring(S(1), 2).spectrum
    with pytest.raises(InvariantViolation):
        Spectrum(E.S, E.seq, [E.assembly[1], E.assembly[0]])


@pytest.mark.parametrize("d", [0, 1])
def test_sym_is_free_on_level_one(d):
    ring = sym_ring(S(d), 3)
    assert free_monoid_failures(ring.iota, ring) == []


def test_sigma_infty_and_omega_infty():
    A = Complex(Z, {0: FGModule.free(Z, 1), 1: FGModule.free(Z, 1)}, {0: [[3]]})
    E = sigma_infty(A, S(1), 3)
    assert validate_spectrum(E).ok
    assert omega_infty(E) == A
    assert [str(homology(X, 1 + n)) for n, X in enumerate(E.levels)] == ["Z/3"] * 4


def test_spectrum_shift_drops_levels():
    E = shift_spectrum(Z, 1, 3)
    F = spectrum_shift(E, 1)
    assert F.N == 2
    assert F.levels[0] == E.levels[1]
    assert validate_spectrum(F).ok
    with pytest.raises(ValueError):
        spectrum_shift(E, -1)


def test_tensor_with_unit_complex():
    E = shift_spectrum(Z, 1, 3)
    U = sphere(R1, 0)
    F = spectrum_tensor_complex(E, U)
    assert validate_spectrum(F).ok
    assert all(str(homology(X, n)) == str(homology(Y, n))
               for X, Y in zip(E.levels, F.levels) for n in range(-1, 5))


def test_identity_is_a_spectrum_map():
    E = shift_spectrum(Z, 1, 3)
    ident = [X.identity() for X in E.levels]
    assert is_spectrum_map(ident, E, E) == []
    half = ident[:2] + [2 * f for f in ident[2:]]
    assert is_spectrum_map(half, E, E) != []


def test_smash_of_suspension_spectra_and_monoidal_map():
    A = sphere(R1, 0)
    B = sphere(FGModule(Z, [2]), 0)
    left, sm, maps = sigma_infty_monoidal_map(A, B, S(1), 2)
    assert validate_spectrum(sm.spectrum).ok
    assert is_spectrum_map(maps, left, sm.spectrum) == []
    assert all(f.is_quasi_isomorphism() for f in maps)


def test_smash_needs_common_S():
    with pytest.raises(ValueError):
        smash(shift_spectrum(Z, 1, 2), shift_spectrum(Z, 2, 2))


@pytest.mark.parametrize("a,b", [(1, 1), (1, 2), (2, 1)])
def test_suspension_cocycle(a, b):
    assert suspension_cocycle_failures(shift_spectrum(Z, 1, 3), a, b) == []


def test_suspension_of_shift_spectrum_is_iso():
    E = shift_spectrum(Z, 1, 3)
    assert all(f.is_isomorphism() for f in suspension_map(E))
    with pytest.raises(ValueError):
        suspension_map(E, 0)


def test_weak_omega():
    E = shift_spectrum(Z, 1, 3)
    assert is_weak_omega_spectrum(E)
    broken = list(E.assembly)
    src, tgt = broken[1].source, broken[1].target
    broken[1] = ChainMap(src, tgt, {k: 0 * broken[1][k] for k in broken[1].degrees()})
    F = Spectrum(E.S, E.seq, broken)
    rep = weak_omega_report(F)
    assert not rep.ok
    assert rep.levels[1] is False
    assert "level 1: adjoint assembly is not" in "\n".join(rep.lines())


def test_level_shapes_of_sigma_infty():
    A = sphere(FGModule(Z, [3]), 0)
    E = sigma_infty(A, S(1), 2)
    expect = TensorComplex([S(1), S(1), A]).complex
    assert str(homology(E.levels[2], 2)) == str(homology(expect, 2)) == "Z/3"
