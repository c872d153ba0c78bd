import random
from fractions import Fraction

from hypothesis import given, strategies as st

from hoca.algebra import FGModule, Ring
from hoca.complexes import (
    ChainMap,
    Complex,
    cone,
    direct_sum_complex,
    homology,
    induced_map,
    map_to_sum,
    sphere,
)
from hoca.localization import (
    PushoutSquare,
    TSet,
    is_T_local,
    localized_fibration_check,
    pushout_preserves_T_equiv_probe,
    t_cell_tower,
    t_local_witness,
)
from hoca.model import DescentData, derived_hom
from hoca.randomgen import random_chain_map, random_complex

Z = Ring.integers()
R = FGModule.free(Z, 1)
S0 = sphere(R, 0)
T2 = cone(ChainMap(S0, S0, {0: [[2]]}))[0]
TS = TSet.build([T2])
FREE = DescentData.modules(Z)


def z(k):
    return sphere(FGModule(Z, [k]), 0)


def test_tset_models_verify():
    assert TS.verify()


def test_locality_examples():
    assert is_T_local(z(3), TS)
    w = t_local_witness(z(2), TS)
    assert w is not None and w.shift == 0 and not w.module.is_zero()
    assert is_T_local(Complex.zero(Z), TS)
    # the witness really is a nonzero derived hom
    assert not derived_hom(T2, z(2), w.shift).is_zero()


def test_locality_is_quasi_iso_invariant():
    # Z/3 and its free resolution (Z -3-> Z) are both local
    P = Complex(Z, {-1: R, 0: R}, {-1: [[3]]})
    assert is_T_local(P, TS) == is_T_local(z(3), TS)
    Q = Complex(Z, {-1: R, 0: R}, {-1: [[2]]})
    assert is_T_local(Q, TS) == is_T_local(z(2), TS) is False


def test_localized_fibration():
    X = Complex(Z, {0: R, 1: R}, {0: [[5]]})
    for k, expect in ((3, True), (2, False)):
        S, _, projs = direct_sum_complex([z(k), X], Z)
        assert localized_fibration_check(projs[1], TS, FREE) is expect
    assert localized_fibration_check(X.identity(), TS, FREE)


def _direct_limit_h0(k):
    """H^0 of the k-th stage, as the subgroup 2^-k Z of Q (hand oracle)."""
    return Fraction(1, 2 ** k)


def test_tower_on_sphere():
    tower = t_cell_tower(S0, TS, steps=3)
    assert len(tower.stages) == 4
    for k in range(1, 4):
        assert homology(tower.stages[k], 0).isomorphic(R)
        f = induced_map(tower.composite(k), 0)
        # 1 in stage 0 is 2^k times the generator 2^-k of stage k
        assert abs(int(f.matrix[0, 0])) == Fraction(1) / _direct_limit_h0(k)
    for m in tower.maps:
        assert m.is_degreewise_injective()
    assert [a.stage for a in tower.log] == [0, 1, 2]
    assert tower.residual


def test_tower_constant_cases():
    tower = t_cell_tower(z(3), TS, steps=2)
    assert len(tower.stages) == 1 and not tower.log and not tower.residual
    empty = TSet.build([])
    assert len(t_cell_tower(S0, empty, steps=2).stages) == 1


def test_tower_maps_are_invisible_to_local_targets():
    tower = t_cell_tower(S0, TS, steps=2)
    probe = z(3)
    for m in tower.maps:
        for n in range(-1, 2):
            assert derived_hom(m.target, probe, n).isomorphic(derived_hom(m.source, probe, n))


@given(st.integers(0, 2 ** 32).map(random.Random))
def test_pushout_probe_random(r):
    X = random_complex(r, Z, max_rank=2, max_length=3)
    Y = random_complex(r, Z, max_rank=2, max_length=3)
    W = random_complex(r, Z, max_rank=2, max_length=3)
    g = random_chain_map(r, X, W)
    S, incs, projs = direct_sum_complex([X, W], Z)
    i = map_to_sum(S, projs, incs, [X.identity(), g], X)
    sq = PushoutSquare(i, random_chain_map(r, X, Y))
    assert pushout_preserves_T_equiv_probe(sq)


def test_pushout_probe_identity_and_quasi_iso():
    X = Complex(Z, {0: R, 1: R}, {0: [[2]]})
    assert pushout_preserves_T_equiv_probe(PushoutSquare(X.identity(), X.identity()))
    # pushing the quasi-iso X -> X ⊕ Cone(1) out along a map keeps a quasi-iso edge
    A = cone(S0.identity())[0]
    S, incs, projs = direct_sum_complex([X, A], Z)
    sq = PushoutSquare(incs[0], X.identity())
    assert incs[0].is_quasi_isomorphism() and sq.j.is_quasi_isomorphism()
    assert pushout_preserves_T_equiv_probe(sq)
