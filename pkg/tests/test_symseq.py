import itertools
import random
from math import comb, factorial

import pytest
from hypothesis import given, strategies as st

from hoca.algebra import FGModule, Ring
from hoca.complexes import sphere, zero_map
from hoca.randomgen import random_complex
from hoca.spectra import sym_sequence
from hoca.symseq import (
    DayTensor,
    adjoint_down_to_up,
    adjoint_up_to_down,
    block_cycle,
    compose,
    concentrated,
    day_associator,
    day_braiding,
    day_rank,
    day_unitor,
    equivariance_failures,
    equivariant_maps,
    free_shift_tensor_iso,
    inverse,
    reduced_word,
    seq_shift_down,
    seq_shift_up,
    shift_down_composite_iso,
    shift_down_counit,
    shift_down_unit,
    shuffle,
    transposition,
    zero_sequence,
)

Z = Ring.integers()
F2 = Ring("Zmod", 2)
R = FGModule.free(Z, 1)
perms = st.integers(1, 5).flatmap(lambda n: st.permutations(range(n)).map(tuple))


@given(perms)
def test_reduced_word_recomposes(g):
    n = len(g)
    h = tuple(range(n))
    for j in reduced_word(g):
        h = compose(h, transposition(n, j))
    assert h == g
    inv = sum(1 for a, b in itertools.combinations(range(n), 2) if g[a] > g[b])
    assert len(reduced_word(g)) == inv
    assert compose(g, inverse(g)) == tuple(range(n))


def test_shuffle_and_block_cycle():
    assert shuffle([[0, 2], [1]]) == (0, 2, 1)
    # block_cycle(a, b) moves the first a letters behind the last b
    assert block_cycle(1, 2) == (2, 0, 1)


def _seq_samples(ring, N=3):
    r = random.Random(11)
    X = random_complex(r, ring, max_rank=2, max_length=2)
    S = sphere(FGModule.free(ring, 1), 1)
    return [sym_sequence(S, N), concentrated(X, N), seq_shift_down(concentrated(X, N), 2, N),
            seq_shift_down(sym_sequence(S, N), 1, N), zero_sequence(ring, N)]


@pytest.mark.parametrize("ring", [Z, F2])
def test_coxeter_relations(ring):
    for s in _seq_samples(ring):
        assert s.coxeter_failures() == []
    seqs = _seq_samples(ring)
    for a in seqs[:3]:
        for b in seqs[:3]:
            assert DayTensor(a, b).seq.coxeter_failures() == []


def test_shift_down_ranks():
    X = sphere(FGModule.free(Z, 2), 0)
    for i in range(4):
        A = seq_shift_down(concentrated(X, 4), i, 4)
        # X sits in level 0, so only level i is nonzero: i! copies of X
        for n in range(5):
            assert A.levels[n].total_rank() == (2 * factorial(i) if n == i else 0)
    assert seq_shift_down(concentrated(X, 3), 0, 3) == concentrated(X, 3)


def test_shift_down_of_full_sequence_ranks():
    S = sphere(R, 0)
    A = sym_sequence(S, 4)
    for i in range(3):
        B = seq_shift_down(A, i, 4)
        for n in range(i, 5):
            assert B.levels[n].total_rank() == factorial(n) // factorial(n - i)


def test_shift_up_of_shift_down_level_zero():
    X = sphere(R, 0)
    up = seq_shift_up(concentrated(X, 3), 1)
    assert up.levels[0].is_zero()


@pytest.mark.parametrize("i,j", [(1, 1), (1, 2), (2, 1)])
def test_shift_down_composite(i, j):
    A = sym_sequence(sphere(R, 1), 4)
    maps = shift_down_composite_iso(A, i, j, 4)
    src = seq_shift_down(seq_shift_down(A, i, 4), j, 4)
    tgt = seq_shift_down(A, i + j, 4)
    assert equivariance_failures(maps, src, tgt) == []
    assert all(m.is_isomorphism() for m in maps)


def _hom_count(X, Y, lo, hi, shift=0):
    total = 1
    for n in range(lo, hi + 1):
        M, _, _ = equivariant_maps(X.levels[n], Y.levels[n + shift],
                                   X.actions[n], Y.actions[n + shift][:len(X.actions[n])])
        total *= M.cardinality()
    return total


def test_shift_adjunction_bijection_over_f2():
    S = sphere(FGModule.free(F2, 1), 0)
    B = sym_sequence(S, 3)
    A = seq_shift_down(concentrated(sphere(FGModule.free(F2, 1), 0), 3), 1, 3)
    for i in (1, 2):
        down = seq_shift_down(A, i, B.N)
        up = seq_shift_up(B, i)
        assert _hom_count(down, B, 0, B.N) == _hom_count(A, up, 0, up.N)


def test_shift_adjoints_round_trip():
    S = sphere(R, 1)
    B = sym_sequence(S, 3)
    A = concentrated(sphere(R, 1), 3)
    # ψ : A -> B{1}: the identity S -> B_1 at level 0
    up = seq_shift_up(B, 1)
    psi = [up.levels[0].identity()] + [zero_map(A.levels[m], up.levels[m]) for m in range(1, up.N + 1)]
    phi = adjoint_up_to_down(psi, A, B, 1)
    assert equivariance_failures(phi, seq_shift_down(A, 1, B.N), B) == []
    back = adjoint_down_to_up(phi, A, B, 1)
    assert all(a == b for a, b in zip(back, psi))


def test_unit_counit_triangle():
    """ε_{B} ∘ η restricted to the identity coset is the identity."""
    B = sym_sequence(sphere(R, 1), 3)
    eps = shift_down_counit(B, 1)
    up = seq_shift_up(B, 1)
    eta = shift_down_unit(up, 1)
    D = seq_shift_down(up, 1, B.N)
    assert equivariance_failures(eps, D, B) == []
    # (ε{1}) ∘ η_{B{1}} = 1_{B{1}}
    for m in range(up.N + 1):
        assert eps[m + 1] @ eta[m] == up.levels[m].identity()


def _rank_oracle(E, F, n):
    return sum(comb(n, p) * E.levels[p].total_rank() * F.levels[n - p].total_rank()
               for p in range(n + 1))


@pytest.mark.parametrize("d", [0, 1, 2])
def test_day_rank_binomial(d):
    E = sym_sequence(sphere(R, d), 4)
    F = seq_shift_down(concentrated(sphere(FGModule.free(Z, 2), 0), 4), 1, 4)
    D = DayTensor(E, F)
    for n in range(5):
        assert D.seq.levels[n].total_rank() == _rank_oracle(E, F, n) == day_rank(E, F, n)


def test_day_braiding_and_unitor():
    E = sym_sequence(sphere(R, 1), 3)
    F = seq_shift_down(concentrated(sphere(R, 1), 3), 1, 3)
    t = day_braiding(E, F)
    back = day_braiding(F, E)
    assert equivariance_failures(t, DayTensor(E, F).seq, DayTensor(F, E).seq) == []
    assert all((b @ a).is_isomorphism() and b @ a == a.source.identity() for a, b in zip(t, back))
    u = day_unitor(E)
    assert all(m.is_isomorphism() for m in u)


def test_day_associator():
    E = sym_sequence(sphere(R, 1), 3)
    L, Rt, maps = day_associator(E, E, E, 3)
    assert equivariance_failures(maps, L.seq, Rt.seq) == []
    assert all(m.is_isomorphism() for m in maps)


@pytest.mark.parametrize("ring", [Z, F2])
@pytest.mark.parametrize("i,j", [(0, 1), (1, 1), (1, 2), (2, 1)])
def test_free_shift_tensor_iso(ring, i, j):
    r = random.Random(i * 10 + j)
    X = random_complex(r, ring, max_rank=2, max_length=2)
    Y = random_complex(r, ring, max_rank=2, max_length=2)
    src, tgt, maps = free_shift_tensor_iso(X, Y, i, j)
    assert equivariance_failures(maps, src, tgt) == []
    assert all(m.is_isomorphism() for m in maps)
