import random

import pytest
from hypothesis import given, strategies as st

from hoca.algebra import FGModule, ModuleMap, Ring, imat
from hoca.complexes import (
    ChainMap,
    Complex,
    chain_cokernel,
    disk,
    homology,
    is_acyclic,
    sphere,
    sphere_disk_inclusion,
)
from hoca.model import (
    DescentData,
    cellular_structure,
    certify_by_generators,
    generating_trivial_cofibrations,
    verify_descent,
)
from hoca.monoidal import (
    TensorComplex,
    associator,
    braiding,
    derived_tensor,
    extend_descent,
    extended_generators,
    koszul_sign,
    monoid_axiom_failures,
    monoid_axiom_probe,
    pushout_product,
    tensor,
    tensor_maps,
    unit,
    unitor,
    weak_flat_resolution,
    weak_flatness_report,
)
from hoca.randomgen import random_chain_map, random_complex

from conftest import complexes

Z = Ring.integers()
F2 = Ring("Zmod", 2)
R = FGModule.free(Z, 1)
Z2 = FGModule(Z, [2])


def seeded():
    return st.integers(0, 2 ** 32).map(random.Random)


@given(complexes(), complexes())
def test_tensor_dd_and_braiding_involution(X, Y):
    if X.ring != Y.ring:
        return
    T = tensor(X, Y)
    assert all((T.d(n + 1) @ T.d(n)).is_zero() for n in T.degrees())
    assert braiding(Y, X) @ braiding(X, Y) == T.identity()


def test_unit_and_spheres():
    C = Complex(Z, {0: R, 1: R}, {0: [[2]]})
    assert unit(Z) == sphere(R, 0)
    assert unitor(C).is_isomorphism()
    assert tensor(sphere(Z2, 1), sphere(FGModule(Z, [4]), 2)) == sphere(Z2, 3)
    K = tensor(disk(R, 0), sphere(Z2, 0))
    assert K.module(0) == Z2 and K.module(1) == Z2 and is_acyclic(K)


def test_braiding_sign_on_degree_one():
    S1 = sphere(R, 1)
    tau = braiding(S1, S1)
    assert tau[2].matrix.tolist() == [[-1]]
    S0 = sphere(R, 0)
    assert braiding(S0, S0)[0].matrix.tolist() == [[1]]
    assert koszul_sign([1, 1], [1, 0]) == -1 and koszul_sign([2, 1], [1, 0]) == 1


@given(seeded())
def test_braiding_natural(r):
    ring = r.choice([Z, F2])
    X, Y, X1, Y1 = (random_complex(r, ring, max_rank=2, max_length=3) for _ in range(4))
    f, g = random_chain_map(r, X, X1), random_chain_map(r, Y, Y1)
    assert braiding(X1, Y1) @ tensor_maps(f, g) == tensor_maps(g, f) @ braiding(X, Y)


@given(seeded())
def test_pentagon(r):
    ring = r.choice([Z, F2])
    W, X, Y, V = (random_complex(r, ring, max_rank=2, max_length=2) for _ in range(4))
    one = lambda C: C.identity()
    WX = tensor(W, X)
    lhs = associator(W, X, tensor(Y, V)) @ associator(WX, Y, V)
    rhs = (tensor_maps(one(W), associator(X, Y, V)) @ associator(W, tensor(X, Y), V)
           @ tensor_maps(associator(W, X, Y), one(V)))
    assert lhs == rhs


@given(complexes(rings=(F2,), max_rank=2), complexes(rings=(F2,), max_rank=2))
def test_kunneth_over_field(X, Y):
    T = tensor(X, Y)
    lo = min(T.degrees() or [0]) - 1
    hi = max(T.degrees() or [0]) + 1
    for n in range(lo, hi + 1):
        want = sum(homology(X, p).ngens * homology(Y, n - p).ngens for p in X.degrees())
        assert homology(T, n).ngens == want


def test_pushout_product_of_generating_cofibrations():
    a = sphere_disk_inclusion(R, 0)
    pp = pushout_product(a, a)
    c = pp.map
    assert c.is_degreewise_injective()
    Q, _ = chain_cokernel(c)
    # coker(a) = S^0 Z, so coker(c) = S^0 Z ⊗ S^0 Z
    for n in Q.degrees():
        assert homology(Q, n).isomorphic(homology(sphere(R, 0), n))
    assert [n for n in Q.degrees() if Q.module(n).ngens] == [0]


def test_pushout_product_with_identity_is_iso():
    a = sphere_disk_inclusion(R, 0)
    b = sphere(Z2, 0).identity()
    assert pushout_product(a, b).map.is_isomorphism()


def test_pushout_product_certificate():
    i = sphere_disk_inclusion(R, 0)
    cert = certify_by_generators(i, [(0, R, imat([[1]], (1, 1)))])
    assert cert.verify()
    pp = pushout_product(i, i, cert, cert)
    assert pp.certificate is not None and pp.certificate.verify()


def test_pushout_product_with_trivial_cofibration():
    a = sphere_disk_inclusion(R, 0)
    D = disk(R, 1)
    b = ChainMap(Complex.zero(Z), D, {})
    c = pushout_product(a, b).map
    assert c.is_degreewise_injective() and c.is_quasi_isomorphism()


def test_derived_tensor_tor():
    T, comp = derived_tensor(sphere(Z2, 0), sphere(Z2, 0))
    assert str(homology(T, 0)) == "Z/2" and str(homology(T, -1)) == "Z/2"
    X = Complex(Z, {0: R, 1: R}, {0: [[3]]})
    T, comp = derived_tensor(X, sphere(Z2, 0))
    assert comp.is_quasi_isomorphism()
    T, _ = derived_tensor(sphere(Z2, 0), Complex.zero(Z))
    assert T.is_zero()


@given(complexes())
def test_monoid_axiom_on_frees(C):
    dd = DescentData.modules(C.ring)
    assert monoid_axiom_failures(C, dd, range(-2, 3)) == []


def test_monoid_axiom_with_free_acyclic():
    H = Complex(Z, {0: R, 1: R}, {0: [[1]]})
    dd = DescentData([R], [H], [cellular_structure(H, DescentData([R]))])
    C = Complex(Z, {0: Z2, 1: R}, {})
    J = generating_trivial_cofibrations(dd, range(-1, 2))
    assert all(monoid_axiom_probe(C, j) for j in J)


def test_weak_flat_resolution():
    res = weak_flat_resolution(sphere(Z2, 0), 1, R)
    H = res.H
    assert H.degrees() == [-1, 0] and abs(int(H.d(-1).matrix[0, 0])) == 2
    assert res.u.is_quasi_isomorphism() and res.certificate.verify()
    free = weak_flat_resolution(R, 2, R)
    assert free.u == free.H.identity()


def test_wrong_resolution_detected_by_probe():
    # 0 -> Z -(4)-> Z -> Z/2 is not exact: caught before or by the Z/2 probe
    i = ModuleMap(R, R, [[4]])
    pi = ModuleMap(R, Z2, [[1]])
    with pytest.raises(ValueError):
        weak_flat_resolution(Z2, 1, R, sequence=(i, pi), probes=[Z2])


def test_extend_descent():
    dd = DescentData.modules(Z)
    unit_ext = extend_descent(dd, R, 2)
    assert unit_ext.generators == dd.generators
    assert all(is_acyclic(H) for H in unit_ext.acyclics)
    ext = extend_descent(dd, Z2, 2)
    assert [str(E) for E in ext.generators] == ["Z", "Z/2"]
    assert [str(E) for E in extended_generators(dd, Z2, 2)] == ["Z", "Z/2"]
    assert verify_descent(ext).ok and verify_descent(unit_ext).ok
    # Z/2 is not weakly flat against itself: the Z/2 probe sees Tor
    rep = weak_flatness_report(dd, Z2, 2)
    assert [f[:3] for f in rep.failures] == [("resolution", 1, "Z"), ("resolution", 2, "Z")]
    assert weak_flatness_report(dd, FGModule.free(Z, 2), 2).ok


def test_tensor_complex_positions():
    X = Complex(Z, {0: R, 1: FGModule.free(Z, 2)}, {0: [[1], [0]]})
    T = TensorComplex([X, X])
    assert T.complex == tensor(X, X)
    assert T.complex.module(1).ngens == 4
