import itertools
from math import gcd

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hoca.algebra import (
    FGModule,
    ModuleMap,
    Ring,
    enumerate_elements,
    hom_basis,
    imat,
    module_cokernel,
    module_hom,
    module_kernel,
    module_tensor,
    smith_normal_form,
    solve_linear,
)

Z = Ring.integers()

small_matrices = st.integers(1, 4).flatmap(
    lambda m: st.integers(1, 4).flatmap(
        lambda n: st.lists(st.lists(st.integers(-6, 6), min_size=n, max_size=n), min_size=m, max_size=m)))


def _det(rows):
    return int(round(np.linalg.det(np.array(rows, dtype=float))))


def determinantal_divisors(a):
    """d_k = gcd of all k x k minors (independent of any elimination)."""
    m, n = len(a), len(a[0])
    out = []
    for k in range(1, min(m, n) + 1):
        g = 0
        for rows in itertools.combinations(range(m), k):
            for cols in itertools.combinations(range(n), k):
                g = gcd(g, _det([[a[i][j] for j in cols] for i in rows]))
        out.append(g)
    return out


@given(small_matrices)
def test_snf_matches_minor_gcds(a):
    U, D, V = smith_normal_form(a)
    assert (U.dot(imat(a)).dot(V) == D).all()
    assert abs(_det(U.tolist())) == 1 and abs(_det(V.tolist())) == 1
    diag = [int(D[i, i]) for i in range(min(D.shape))]
    assert all(x >= 0 for x in diag)
    assert all(diag[i + 1] % diag[i] == 0 for i in range(len(diag) - 1) if diag[i])
    prods, p = [], 1
    for x in diag:
        p *= x
        prods.append(p)
    assert prods == determinantal_divisors(a)


def test_snf_example():
    _, D, _ = smith_normal_form([[2, 4], [6, 8]])
    assert D.tolist() == [[2, 0], [0, 4]]


def test_factor_one_is_rejected():
    with pytest.raises(ValueError, match="forbidden"):
        FGModule(Z, [1])


def test_invariant_factor_notation():
    assert str(FGModule(Z, [4, 6])) == "Z/2 ⊕ Z/12"
    assert str(FGModule(Z, [0, 0, 3])) == "Z^2 ⊕ Z/3"
    assert str(FGModule.zero(Z)) == "0"
    assert str(FGModule.free(Ring("Zmod", 2), 2)) == "(Z/2)^2"


@pytest.mark.parametrize("a,b", [(2, 4), (4, 6), (3, 5), (6, 9)])
def test_hom_and_tensor_of_cyclic_groups(a, b):
    assert module_hom(FGModule(Z, [a]), FGModule(Z, [b])).cardinality() == gcd(a, b)
    assert module_tensor(FGModule(Z, [a]), FGModule(Z, [b])).cardinality() == gcd(a, b)


def _brute_hom_count(M, N):
    """Count additive maps by choosing images of generators and checking relations."""
    elems = list(enumerate_elements(N))
    count = 0
    for imgs in itertools.product(elems, repeat=M.ngens):
        ok = all(not N.reduce(o * imgs[k]).any() for k, o in enumerate(M.orders) if o)
        count += ok
    return count


@pytest.mark.parametrize("mf,nf", [([2], [4]), ([2, 2], [2]), ([4], [2, 4]), ([6], [4])])
def test_hom_cardinality_brute_force(mf, nf):
    M, N = FGModule(Z, mf), FGModule(Z, nf)
    assert module_hom(M, N).cardinality() == _brute_hom_count(M, N)
    hb = hom_basis(M, N)
    for k in range(hb.module.ngens):
        coords = [0] * hb.module.ngens
        coords[k] = 1
        ModuleMap(M, N, hb.to_matrix(coords))       # well defined


def test_kernel_and_cokernel_of_multiplication():
    f = ModuleMap(FGModule.free(Z, 1), FGModule.free(Z, 1), [[6]])
    K, _ = module_kernel(f)
    Q, q = module_cokernel(f)
    assert K.is_zero() and str(Q) == "Z/6" and q.is_surjective()
    g = ModuleMap(FGModule(Z, [4]), FGModule(Z, [4]), [[2]])
    K, inc = module_kernel(g)
    assert str(K) == "Z/2" and inc.is_injective()


def test_zmod_free_factor_canonical():
    R = Ring("Zmod", 4)
    assert FGModule(R, [4]) == FGModule(R, [0])
    assert FGModule(R, [2, 0]).cardinality() == 8


def test_solve_linear():
    f = ModuleMap(FGModule.free(Z, 2), FGModule.free(Z, 1), [[2, 3]])
    x = solve_linear(f, [1])
    assert int(f.matrix.dot(x)[0]) == 1
    g = ModuleMap(FGModule.free(Z, 1), FGModule.free(Z, 1), [[2]])
    assert solve_linear(g, [1]) is None


def test_ill_defined_map_rejected():
    with pytest.raises(ValueError):
        ModuleMap(FGModule(Z, [2]), FGModule(Z, [3]), [[1]])
