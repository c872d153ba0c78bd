import random

import pytest
from hypothesis import given

from hoca.algebra import FGModule, Ring
from hoca.complexes import (
    ChainMap,
    Complex,
    cone,
    cylinder,
    direct_sum_complex,
    disk,
    homology,
    is_acyclic,
    sphere,
    sphere_disk_inclusion,
    zero_map,
)
from hoca.model import (
    BudgetExceeded,
    DescentData,
    LiftSquare,
    cofibrant_replacement,
    cone_certificate,
    derived_hom,
    factorize,
    flasque_by_lifting,
    generating_cofibrations,
    generating_trivial_cofibrations,
    is_fibration,
    is_G_local,
    is_H_flasque,
    is_trivial_fibration,
    pushout_certificate,
    solve_lifting,
    verify_descent,
)
from hoca.randomgen import random_chain_map, random_complex

from conftest import complexes

Z = Ring.integers()
F2 = Ring("Zmod", 2)
R = FGModule.free(Z, 1)
Z2 = FGModule(Z, [2])
FREE = DescentData.modules(Z)


def test_generating_cofibrations_counts():
    I = generating_cofibrations(FREE, range(0, 2))
    assert [(f.source, f.target) for f in I] == [(sphere(R, 1), disk(R, 0)), (sphere(R, 2), disk(R, 1))]
    assert generating_cofibrations(FREE, range(0)) == []
    assert len(generating_cofibrations(DescentData.modules(Z, (1, 2)), range(0, 1))) == 2
    with pytest.raises(ValueError):
        DescentData([])


def test_trivial_cofibrations_are_injective_quasi_isos():
    H = cone(sphere(Z2, 0).identity())[0]
    dd = DescentData([R, Z2], [H])
    J = generating_trivial_cofibrations(dd, range(-1, 2))
    assert len(J) == 2 * 3 + 3
    for j in J:
        assert j.is_degreewise_injective() and j.is_quasi_isomorphism()
    assert len(generating_trivial_cofibrations(FREE, range(-1, 2))) == 3


def test_lift_exists_against_quasi_iso_surjection():
    i = sphere_disk_inclusion(R, 0)
    P = Complex(Z, {-1: R, 0: R}, {-1: [[2]]})
    K, _, _, sigma = cylinder(P)
    top = zero_map(i.source, K)
    bottom = ChainMap(i.target, P, {0: [[1]]})
    sq = LiftSquare(i, sigma, top, bottom)
    h = solve_lifting(sq)
    assert h is not None and sq.is_lift(h)


def test_no_lift_onto_nonzero_target():
    i = sphere_disk_inclusion(R, 0)
    T = sphere(R, 0)
    p = zero_map(Complex.zero(Z), T)
    sq = LiftSquare(i, p, zero_map(i.source, p.source), ChainMap(i.target, T, {0: [[1]]}))
    assert solve_lifting(sq) is None


def test_identity_lift_is_top():
    X = random_complex(random.Random(3), Z)
    Y = random_complex(random.Random(4), Z)
    f = random_chain_map(random.Random(5), X, Y)
    sq = LiftSquare(X.identity(), Y.identity(), f, f)
    assert solve_lifting(sq) == f


def test_noncommuting_square_rejected():
    i = sphere_disk_inclusion(R, 0)
    D = disk(R, 0)
    with pytest.raises(ValueError):
        LiftSquare(i, D.identity(), zero_map(i.source, D), D.identity())


@given(complexes(rings=(Z,)))
def test_surjections_are_fibrations(X):
    K, _, _, sigma = cylinder(X)
    rep = is_fibration(sigma, FREE)
    assert rep and rep.rlp_agrees
    assert is_fibration(zero_map(X, Complex.zero(Z)), FREE)


def test_sphere_disk_inclusion_is_not_fibration():
    rep = is_fibration(sphere_disk_inclusion(R, 0), FREE)
    assert not rep and rep.rlp_agrees


def test_flasque_and_local():
    assert is_H_flasque(sphere(Z2, 0), FREE)
    H = cone(sphere(Z2, 0).identity())[0]
    dd = DescentData([R], [H])
    assert is_H_flasque(sphere(Z2, 0), dd) and flasque_by_lifting(sphere(Z2, 0), dd)
    acyc = disk(FGModule.free(F2, 1), 0)
    assert is_H_flasque(acyc, DescentData([FGModule.free(F2, 1)], [acyc]))
    assert is_G_local(Complex.zero(Z), FREE)
    assert is_G_local(sphere(Z2, 0), FREE)
    # with Z/2 in 𝒢, Ext^1(Z/2, Z/2) is not seen by homotopy classes
    assert not is_G_local(sphere(Z2, 0), DescentData([R, Z2]))


def test_factorize_resolves_z2():
    f = zero_map(Complex.zero(Z), sphere(Z2, 0))
    i, cert, p = factorize(f, FREE, max_cells=10)
    P = i.target
    assert cert.verify() and p @ i == f
    assert p.is_quasi_isomorphism() and is_trivial_fibration(p, FREE)
    assert P.degrees() == [-1, 0] and all(P.module(n) == R for n in P.degrees())
    assert abs(int(P.d(-1).matrix[0, 0])) == 2


def test_factorize_budget():
    f = zero_map(Complex.zero(Z), sphere(Z2, 0))
    with pytest.raises(BudgetExceeded):
        factorize(f, FREE, max_cells=1)


def test_factorize_identity_and_cells():
    X = Complex(Z, {0: R, 1: R}, {0: [[3]]})
    i, cert, p = factorize(X.identity(), FREE)
    assert cert.cell_count() == 0 and i == X.identity() and p == X.identity()
    j = sphere_disk_inclusion(R, 0)
    i, cert, p = factorize(j, FREE)
    assert p @ i == j and p.is_quasi_isomorphism()


def test_cofibrant_replacement():
    P, q, cert = cofibrant_replacement(sphere(Z2, 0))
    assert q.is_quasi_isomorphism() and cert.verify()
    assert all(P.module(n).is_free() for n in P.degrees())
    C = Complex(Z, {0: R, 1: R}, {0: [[5]]})
    P, q, _ = cofibrant_replacement(C)
    assert P == C and q == C.identity()
    P, _, _ = cofibrant_replacement(Complex.zero(Z))
    assert P.is_zero()


def test_cofibrant_replacement_refuses_infinite_dimension():
    with pytest.raises(ValueError):
        cofibrant_replacement(sphere(FGModule(Ring("Zmod", 4), [2]), 0), max_cells=12)


def test_derived_hom_examples():
    C = Complex(Z, {0: R, 1: R, 2: R}, {0: [[0]], 1: [[4]]})
    for n in range(-1, 4):
        assert derived_hom(sphere(R, 0), C, n).isomorphic(homology(C, n))
    assert str(derived_hom(sphere(Z2, 0), sphere(Z2, 0), 1)) == "Z/2"
    Z3 = sphere(FGModule(Z, [3]), 0)
    assert all(derived_hom(sphere(Z2, 0), Z3, n).is_zero() for n in range(-2, 3))


@given(complexes(rings=(Z,), max_rank=2, max_length=3))
def test_derived_hom_quasi_iso_invariance(Y):
    """Replace the source by X ⊕ (contractible cone) and the target likewise."""
    X = sphere(Z2, 0)
    A = cone(sphere(R, 1).identity())[0]
    X2 = direct_sum_complex([X, A], Z)[0]
    Y2 = direct_sum_complex([Y, A], Z)[0]
    for n in range(-2, 3):
        assert derived_hom(X, Y, n).isomorphic(derived_hom(X2, Y2, n))


def test_verify_descent():
    assert verify_descent(FREE).ok
    bad = DescentData([R], [Complex(Z, {0: R, 1: R}, {0: [[2]]})])
    rep = verify_descent(bad)
    assert not rep.ok and any("degree 1" in line for line in rep.lines())
    H = cone(sphere(R, 0).identity())[0]
    good = DescentData([R], [H], [cone_certificate(R, 0)])
    assert verify_descent(good).ok
    assert not verify_descent(DescentData([R], [H])).ok       # missing certificate


def test_pushout_certificate_replays():
    cert = cone_certificate(R, 1)
    g = zero_map(cert.base, sphere(Z2, 0))
    new, phi = pushout_certificate(cert, g)
    assert new.verify() and is_acyclic(cert.target)
    assert new.target.degrees() == [0, 1] and phi.target == new.target
