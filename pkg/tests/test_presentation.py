import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import complexes
from hoca.algebra import FGModule, ModuleMap, Ring
from hoca.complexes import Complex, InvariantViolation, disk, homology, sphere
from hoca.presentation import (
    AddCategory,
    adjunction_report,
    compact_additivity_probe,
    counit,
    extend,
    extend_map,
    extends_to_representable,
    full_faithfulness_check,
    representable,
    restrict,
    restrict_map,
    unit_map,
)

Z = Ring.integers()
F2 = Ring("Zmod", 2)


def free(ring, r=1):
    return FGModule.free(ring, r)


@pytest.mark.parametrize("ring", [Z, F2, Ring("Zmod", 6)])
@pytest.mark.parametrize("k", [0, 1])
def test_representables_extend_to_objects(ring, k):
    assert extends_to_representable(AddCategory(ring), k)


def test_restriction_is_a_functor_with_expected_values():
    cat = AddCategory(Z)
    F = Complex(Z, {0: free(Z), 1: FGModule(Z, [0, 4])}, {0: [[1], [2]]})
    X = restrict(F, cat)
    assert X.failures() == []
    assert str(X.evaluate(1).module(1)) == "Z^2 ⊕ Z/4 ⊕ Z/4"
    assert X.evaluate(0) == F


def test_broken_functor_is_reported():
    cat = AddCategory(F2)
    X = restrict(sphere(free(F2), 0), cat)
    M = X.module(0)
    g = (1, 1, 0, 1)
    M.actions[g] = ModuleMap.zero(M.values[1], M.values[1])
    assert any(f[1] == "composition" for f in X.failures())


def test_extension_of_restriction_recovers_the_complex():
    cat = AddCategory(Z)
    F = Complex(Z, {0: free(Z, 2), 1: free(Z)}, {0: [[2, 0]]})
    eps = counit(F, cat)
    assert eps.is_isomorphism()
    assert str(homology(extend(restrict(F, cat)).complex, 1)) == "Z/2"


def test_unit_is_natural():
    cat = AddCategory(F2)
    X = representable(cat, 1)
    eta = unit_map(X)
    assert eta.failures() == []


def test_extend_respects_composition_and_identity():
    cat = AddCategory(Z)
    F = disk(free(Z), 0)
    f = 3 * F.identity()
    X = restrict(F, cat)
    ex = extend(X)
    a = restrict_map(f, cat)
    once = extend_map(a, ex, ex)
    twice = extend_map(restrict_map(9 * F.identity(), cat), ex, ex)
    assert once @ once == twice
    assert extend_map(restrict_map(F.identity(), cat), ex, ex) == ex.complex.identity()


@pytest.mark.parametrize("F", [sphere(free(F2), 0), disk(free(F2), 0),
                               Complex(F2, {0: free(F2, 2), 1: free(F2)}, {0: [[1, 1]]})])
def test_adjunction_over_f2(F):
    cat = AddCategory(F2)
    X = representable(cat, 0)
    rep = adjunction_report(X, F)
    assert rep.triangle_left and rep.triangle_right
    assert rep.counts[0] == rep.counts[1]
    assert rep.bijective
    assert rep.ok


def test_adjunction_over_integers_checks_triangles_only():
    cat = AddCategory(Z)
    rep = adjunction_report(restrict(sphere(free(Z), 1), cat), disk(free(Z), 0))
    assert rep.ok and rep.counts is None


def test_large_hom_sets_are_not_enumerated():
    cat = AddCategory(F2)
    F = sphere(free(F2, 3), 0)
    rep = adjunction_report(restrict(F, cat), F, limit=4)
    assert rep.bijective is None
    assert rep.notes


def test_full_faithfulness_on_representables():
    cat = AddCategory(F2)
    for a in range(2):
        for b in range(2):
            assert full_faithfulness_check(representable(cat, a), representable(cat, b))


@given(st.data())
def test_compact_additivity(data):
    ring = data.draw(st.sampled_from([Z, F2]))
    X = data.draw(complexes((ring,), free=True))
    fam = data.draw(st.lists(complexes((ring,)), min_size=0, max_size=3))
    assert compact_additivity_probe(X, fam)


def test_compact_additivity_rejects_a_bad_certificate():
    class Bad:
        def verify(self):
            return False

    with pytest.raises(InvariantViolation):
        compact_additivity_probe(sphere(free(Z), 0), [sphere(free(Z), 0)], Bad())
