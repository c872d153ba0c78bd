"""Tensor products of complexes with Koszul signs, and what is built on them.

``(X_1 ⊗ ... ⊗ X_k)^n`` is the sum over degree tuples ``(p_1, ..., p_k)``
with ``sum p_i = n``, listed lexicographically (ascending ``p_1`` first).
Inside a block the generators are the surviving tuples of
:func:`hoca.algebra.tensor_basis`.  The differential is
``d(x_1 ⊗ ... ⊗ x_k) = sum_i (-1)^{p_1 + ... + p_{i-1}} x_1 ⊗ ... ⊗ dx_i ⊗ ... ⊗ x_k``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import (
    FGModule,
    ModuleMap,
    Ring,
    RingMismatch,
    identity,
    imat,
    map_tensor,
    module_tensor,
    tensor_basis,
)
from .complexes import (
    ChainMap,
    Complex,
    InvariantViolation,
    chain_cokernel,
    cone,
    direct_sum_complex,
    factor_through_cokernel,
    homology,
    map_from_sum,
    map_to_sum,
    sphere,
)
from .model import (
    CellCertificate,
    DescentData,
    cellular_structure,
    certify_by_generators,
    cofibrant_replacement,
    generating_trivial_cofibrations,
)


class TensorComplex:
    """``X_1 ⊗ ... ⊗ X_k`` with its block layout."""

    def __init__(self, factors: Sequence[Complex]):
        if not factors:
            raise ValueError("tensor of no factors; use the unit")
        ring = factors[0].ring
        for X in factors:
            if X.ring != ring:
                raise RingMismatch(f"{X.ring} vs {ring}")
        self.factors = list(factors)
        self.ring = ring
        self.blocks: dict[int, list] = {}
        degs = [X.degrees() for X in factors]
        for ptuple in itertools.product(*degs):
            tb = tensor_basis(*(X.module(p) for X, p in zip(factors, ptuple)))
            if tb.module.ngens:
                self.blocks.setdefault(sum(ptuple), []).append((ptuple, tb))
        self.offsets: dict[tuple, int] = {}
        mods = {}
        for n, bl in self.blocks.items():
            bl.sort(key=lambda b: b[0])
            off, fs = 0, []
            for ptuple, tb in bl:
                self.offsets[ptuple] = off
                off += tb.module.ngens
                fs.extend(tb.module.factors)
            mods[n] = FGModule(ring, fs)
        diffs = {n: self._differential(n, mods) for n in mods if n + 1 in mods}
        self.complex = Complex(ring, mods, diffs, check=False)

    def _differential(self, n: int, mods) -> ModuleMap:
        out = imat(shape=(mods[n + 1].ngens, mods[n].ngens))
        dcols = []
        for X in self.factors:
            cols = {}
            for p in X.degrees():
                m = X.d(p).matrix
                cols[p] = [[(r, int(m[r, c])) for r in range(m.shape[0]) if m[r, c]]
                           for c in range(m.shape[1])]
            dcols.append(cols)
        for ptuple, tb in self.blocks[n]:
            base = self.offsets[ptuple]
            for g, t in enumerate(tb.tuples):
                sign = 1
                for i, X in enumerate(self.factors):
                    p = ptuple[i]
                    if p in dcols[i]:
                        q = ptuple[:i] + (p + 1,) + ptuple[i + 1:]
                        loc = self.locate(q)
                        if loc is not None:
                            qoff, qtb = loc
                            for r, c in dcols[i][p][t[i]]:
                                row = qtb.index.get(t[:i] + (r,) + t[i + 1:])
                                if row is not None:
                                    out[qoff + row, base + g] += sign * c
                    if p % 2:
                        sign = -sign
        return ModuleMap(mods[n], mods[n + 1], out, check=False)

    def locate(self, ptuple):
        n = sum(ptuple)
        for q, tb in self.blocks.get(n, []):
            if q == ptuple:
                return self.offsets[ptuple], tb
        return None

    def generators(self, n: int) -> list[tuple]:
        """Labels ``(degree tuple, index tuple)`` of the degree-n generators."""
        return [(ptuple, t) for ptuple, tb in self.blocks.get(n, []) for t in tb.tuples]

    def position(self, ptuple, t):
        loc = self.locate(ptuple)
        if loc is None:
            return None
        off, tb = loc
        row = tb.index.get(tuple(t))
        return None if row is None else off + row

    def element(self, vectors: Sequence[np.ndarray], degrees: Sequence[int]) -> np.ndarray:
        """``v_1 ⊗ ... ⊗ v_k`` for elements ``v_i`` of ``X_i^{p_i}``."""
        n = sum(degrees)
        M = self.complex.module(n)
        out = imat(shape=(M.ngens,))
        loc = self.locate(tuple(degrees))
        if loc is None:
            return out
        off, tb = loc
        for t, row in tb.index.items():
            c = 1
            for v, i in zip(vectors, t):
                c *= int(v[i])
                if not c:
                    break
            if c:
                out[off + row] += c
        return M.reduce(out)


def tensor(*cs: Complex) -> Complex:
    """Tensor product of complexes (the unit is ``sphere(R, 0)``)."""
    return TensorComplex(cs).complex


def unit(ring: Ring) -> Complex:
    return sphere(FGModule.free(ring, 1), 0)


def tensor_maps(*fs: ChainMap) -> ChainMap:
    """``f_1 ⊗ ... ⊗ f_k`` (no signs: all maps have degree zero)."""
    S = TensorComplex([f.source for f in fs])
    T = TensorComplex([f.target for f in fs])
    comps = {}
    for n in S.complex.degrees():
        m = imat(shape=(T.complex.module(n).ngens, S.complex.module(n).ngens))
        for ptuple, tb in S.blocks[n]:
            loc = T.locate(ptuple)
            if loc is None:
                continue
            toff, ttb = loc
            block = map_tensor(*(f[p] for f, p in zip(fs, ptuple)))
            soff = S.offsets[ptuple]
            m[toff:toff + ttb.module.ngens, soff:soff + tb.module.ngens] = block.matrix
        comps[n] = ModuleMap(S.complex.module(n), T.complex.module(n), m, check=False)
    return ChainMap(S.complex, T.complex, comps, check=False)


def koszul_sign(degrees: Sequence[int], perm: Sequence[int]) -> int:
    """Sign of moving factors with the given degrees into the order ``perm``."""
    s = 0
    for a in range(len(perm)):
        for b in range(a + 1, len(perm)):
            if perm[a] > perm[b]:
                s += degrees[perm[a]] * degrees[perm[b]]
    return -1 if s % 2 else 1


def permute_factors(cs: Sequence[Complex], perm: Sequence[int]) -> ChainMap:
    """``X_0 ⊗ ... ⊗ X_{k-1} -> X_{perm[0]} ⊗ ... ⊗ X_{perm[k-1]}`` with Koszul signs."""
    S = TensorComplex(cs)
    T = TensorComplex([cs[i] for i in perm])
    comps = {}
    for n in S.complex.degrees():
        m = imat(shape=(T.complex.module(n).ngens, S.complex.module(n).ngens))
        for col, (ptuple, t) in enumerate(S.generators(n)):
            row = T.position(tuple(ptuple[i] for i in perm), tuple(t[i] for i in perm))
            if row is None:
                raise InvariantViolation("tensor generator lost under permutation")
            m[row, col] = koszul_sign(ptuple, perm)
        comps[n] = ModuleMap(S.complex.module(n), T.complex.module(n), m, check=False)
    return ChainMap(S.complex, T.complex, comps)


def braiding(X: Complex, Y: Complex) -> ChainMap:
    """``τ : X ⊗ Y -> Y ⊗ X``, ``x ⊗ y ↦ (-1)^{pq} y ⊗ x``."""
    return permute_factors([X, Y], (1, 0))


def flat_labels(layout: TensorComplex, n: int, subs: Sequence, _memo=None) -> list[tuple]:
    """Generator labels of ``layout`` in degree ``n`` with nested factors
    expanded.  ``subs[k]`` is ``None`` for a plain factor, a
    :class:`TensorComplex` for a nested tensor, a pair ``(layout, subs)`` for
    deeper nesting, or ``"unit"`` for a copy of the unit (which contributes
    nothing)."""
    memo = {} if _memo is None else _memo
    out = []
    for ptuple, t in layout.generators(n):
        ps, ts = [], []
        for k, (p, i) in enumerate(zip(ptuple, t)):
            sub = subs[k]
            if sub is None:
                ps.append(p)
                ts.append(i)
            elif isinstance(sub, str):
                continue
            else:
                layout2, subs2 = sub if isinstance(sub, tuple) else (sub, [None] * len(sub.factors))
                key = (id(layout2), p)
                if key not in memo:
                    memo[key] = flat_labels(layout2, p, subs2, memo)
                sp, st = memo[key][i]
                ps.extend(sp)
                ts.extend(st)
        out.append((tuple(ps), tuple(ts)))
    return out


def regroup(src: TensorComplex, src_subs: Sequence, tgt: TensorComplex, tgt_subs: Sequence,
            perm: Sequence[int] | None = None) -> ChainMap:
    """The map matching flattened generator labels, after permuting the flat
    factors by ``perm`` (with its Koszul sign)."""
    comps = {}
    for n in src.complex.degrees():
        tl = {lab: k for k, lab in enumerate(flat_labels(tgt, n, tgt_subs))}
        m = imat(shape=(tgt.complex.module(n).ngens, src.complex.module(n).ngens))
        for col, (ps, ts) in enumerate(flat_labels(src, n, src_subs)):
            if perm is None:
                lab, sign = (ps, ts), 1
            else:
                lab = (tuple(ps[i] for i in perm), tuple(ts[i] for i in perm))
                sign = koszul_sign(ps, perm)
            row = tl.get(lab)
            if row is None:
                raise InvariantViolation("generator has no partner after regrouping")
            m[row, col] = sign
        comps[n] = ModuleMap(src.complex.module(n), tgt.complex.module(n), m, check=False)
    return ChainMap(src.complex, tgt.complex, comps)


def associator(X: Complex, Y: Complex, Z: Complex) -> ChainMap:
    """``(X ⊗ Y) ⊗ Z -> X ⊗ (Y ⊗ Z)``; every generator goes to a generator."""
    XY, YZ = TensorComplex([X, Y]), TensorComplex([Y, Z])
    return regroup(TensorComplex([XY.complex, Z]), [XY, None],
                   TensorComplex([X, YZ.complex]), [None, YZ])


def unitor(C: Complex) -> ChainMap:
    """``1 ⊗ C -> C``."""
    T = TensorComplex([unit(C.ring), C])
    comps = {}
    for n in T.complex.degrees():
        m = imat(shape=(C.module(n).ngens, T.complex.module(n).ngens))
        for col, (_, t) in enumerate(T.generators(n)):
            m[t[1], col] = 1
        comps[n] = ModuleMap(T.complex.module(n), C.module(n), m, check=False)
    return ChainMap(T.complex, C, comps)


# --------------------------------------------------------------------------
# pushout-product

@dataclass
class PushoutProduct:
    """``c : A ⊗ B' ⊔_{A⊗B} A' ⊗ B -> A' ⊗ B'`` with optional cell certificate."""

    pushout: Complex
    map: ChainMap
    certificate: CellCertificate | None = None


def cell_columns(cert: CellCertificate) -> list[tuple]:
    """``(n, E, columns)``: where each cell's generators land in the target."""
    sizes = {n: cert.base.module(n).ngens for n in cert.base.degrees()}
    placed = []
    for a in cert.attachments:
        start = sizes.get(a.degree, 0)
        sizes[a.degree] = start + a.module.ngens
        placed.append((a.degree, a.module, start))
    R, _ = cert.replay()
    to_target = cert.iso or (cert.retract.retraction if cert.retract else None)
    out = []
    for n, E, start in placed:
        cols = imat(shape=(R.module(n).ngens, E.ngens))
        cols[start:start + E.ngens] = identity(E.ngens)
        if to_target is not None:
            cols = to_target[n].matrix.dot(cols)
        out.append((n, E, cols))
    return out


def pushout_product(a: ChainMap, b: ChainMap, cert_a: CellCertificate | None = None,
                    cert_b: CellCertificate | None = None) -> PushoutProduct:
    A, A1, B, B1 = a.source, a.target, b.source, b.target
    one_b = tensor_maps(A.identity(), b)      # A⊗B -> A⊗B'
    a_one = tensor_maps(a, B.identity())      # A⊗B -> A'⊗B
    S, incs, projs = direct_sum_complex([one_b.target, a_one.target], A.ring)
    into = map_to_sum(S, projs, incs, [one_b, -a_one], one_b.source)
    D, proj = chain_cokernel(into)
    a_B1 = tensor_maps(a, B1.identity())      # A⊗B' -> A'⊗B'
    A1_b = tensor_maps(A1.identity(), b)      # A'⊗B -> A'⊗B'
    out = map_from_sum(S, incs, [a_B1, A1_b], a_B1.target)
    c = factor_through_cokernel(proj, out)
    cert = None
    if cert_a is not None and cert_b is not None:
        T = TensorComplex([A1, B1])
        cells = []
        for n, E, ca in cell_columns(cert_a):
            for m, F, cb in cell_columns(cert_b):
                tb = tensor_basis(E, F)
                cols = imat(shape=(T.complex.module(n + m).ngens, len(tb.tuples)))
                for k, (i, j) in enumerate(tb.tuples):
                    cols[:, k] = T.element([ca[:, i], cb[:, j]], [n, m])
                cells.append((n + m, tb.module, cols))
        cert = certify_by_generators(c, cells)
    return PushoutProduct(D, c, cert)


# --------------------------------------------------------------------------
# derived tensor and probes

def derived_tensor(X: Complex, Y: Complex, dd: DescentData | None = None):
    """``(P ⊗ Y, q ⊗ 1)`` with ``q : P -> X`` a cofibrant replacement."""
    P, q, _ = cofibrant_replacement(X, dd)
    comp = tensor_maps(q, Y.identity())
    return comp.source, comp


def monoid_axiom_probe(C: Complex, j: ChainMap) -> bool:
    """``C ⊗ j`` is degreewise injective and a quasi-isomorphism."""
    f = tensor_maps(C.identity(), j)
    return f.is_degreewise_injective() and f.is_quasi_isomorphism()


def monoid_axiom_failures(C: Complex, dd: DescentData, degree_range) -> list[int]:
    return [k for k, j in enumerate(generating_trivial_cofibrations(dd, degree_range))
            if not monoid_axiom_probe(C, j)]


# --------------------------------------------------------------------------
# weakly flat objects

def _as_module(T) -> FGModule:
    if isinstance(T, FGModule):
        return T
    if T.degrees() not in ([], [0]):
        raise ValueError("T must be concentrated in degree 0")
    return T.module(0)


def tensor_power(T: FGModule, n: int) -> FGModule:
    M = FGModule.free(T.ring, 1)
    for _ in range(n):
        M = module_tensor(M, T)
    return M.normalized()


@dataclass
class WeakFlatResolution:
    H: Complex
    u: ChainMap
    certificate: CellCertificate
    probes: list = field(default_factory=list)


def free_presentation(F: FGModule):
    """``0 -> A -> B -> F -> 0`` with ``A``, ``B`` free (hereditary rings only)."""
    ring = F.ring
    if ring.kind != "Z" and not ring.is_field and not F.is_free():
        raise ValueError(f"no two-term free resolution of {F} over {ring}")
    tors = [k for k, e in enumerate(F.orders) if e]
    B = FGModule.free(ring, F.ngens)
    A = FGModule.free(ring, len(tors) if ring.kind == "Z" else 0)
    m = imat(shape=(B.ngens, A.ngens))
    if ring.kind == "Z":
        for c, k in enumerate(tors):
            m[k, c] = F.orders[k]
    return ModuleMap(A, B, m), ModuleMap(B, F, identity(F.ngens), check=False)


def weak_flat_resolution(T, n: int, E: FGModule, sequence=None,
                         probes: Sequence[FGModule] | None = None) -> WeakFlatResolution:
    """``H = Cone(A ⊗ E -> B ⊗ E)`` with ``u : H -> T^{⊗n} ⊗ E``.

    ``sequence`` is ``(i : A -> B, pi : B -> T^{⊗n})``; by default a free
    presentation is built.  Every probe ``F'`` is checked:
    ``H ⊗ F' -> T^{⊗n} ⊗ E ⊗ F'`` must be a quasi-isomorphism.
    """
    T = _as_module(T)
    ring = T.ring
    Tn = tensor_power(T, n)
    if sequence is None:
        if Tn.is_free():
            F = module_tensor(Tn, E).normalized()
            S = sphere(F, 0)
            cert = cellular_structure(S, DescentData([E]))
            res = WeakFlatResolution(S, S.identity(), cert)
            _check_probes(res, probes or [FGModule.free(ring, 1)])
            return res
        i, pi = free_presentation(Tn)
    else:
        i, pi = sequence
    iE = map_tensor(i, E.identity())
    piE = map_tensor(pi, E.identity())
    A, B = sphere(iE.source, 0), sphere(iE.target, 0)
    H, _, _ = cone(ChainMap(A, B, {0: iE}))
    F = sphere(piE.target, 0)
    # u(b, a) = pi(b)
    m = imat(shape=(F.module(0).ngens, H.module(0).ngens))
    m[:, :B.module(0).ngens] = piE.matrix
    u = ChainMap(H, F, {0: ModuleMap(H.module(0), F.module(0), m, check=False)})
    if not u.is_quasi_isomorphism():
        raise ValueError("resolution is not a quasi-isomorphism")
    cert = cellular_structure(H, DescentData([E, FGModule.free(ring, 1)]))
    if cert is None:
        raise ValueError("resolution is not degreewise a sum of generators")
    res = WeakFlatResolution(H, u, cert)
    _check_probes(res, probes or [FGModule.free(ring, 1)])
    return res


def _check_probes(res: WeakFlatResolution, probes):
    for P in probes:
        f = tensor_maps(res.u, sphere(P, 0).identity())
        if not f.is_quasi_isomorphism():
            raise ValueError(f"probe {P}: H ⊗ F' -> F ⊗ F' is not a quasi-isomorphism")
        res.probes.append(P)


def _dedupe(mods: Sequence[FGModule]) -> list[FGModule]:
    out = []
    for M in mods:
        if not any(M.isomorphic(N) for N in out):
            out.append(M)
    return out


def extended_generators(dd: DescentData, T, power_bound: int) -> list[FGModule]:
    """``{E ⊗ T^{⊗n} : E in 𝒢, 0 <= n <= bound}`` up to isomorphism."""
    T = _as_module(T)
    mods = [module_tensor(E, tensor_power(T, n)).normalized()
            for n in range(power_bound + 1) for E in dd.generators]
    return _dedupe([M for M in mods if M.ngens])


def extend_descent(dd: DescentData, T, power_bound: int = 2,
                   probes: Sequence[FGModule] | None = None) -> DescentData:
    """``(𝒢[T], ℋ[T])`` with ``ℋ[T] = ℋ ∪ {Cone(u_F)}``."""
    T = _as_module(T)
    gens = extended_generators(dd, T, power_bound)
    base = [E for E in dd.generators]
    acyclics = list(dd.acyclics)
    certs = list(dd.certificates)
    new_dd = DescentData(gens)
    for n in range(power_bound + 1):
        for E in base:
            res = weak_flat_resolution(T, n, E, probes=probes)
            K, _, _ = cone(res.u)
            cert = cellular_structure(K, new_dd)
            if cert is None:
                raise ValueError(f"Cone(u_F) for n={n}, E={E} is not 𝒢[T]-cellular")
            if not any(K == H for H in acyclics):
                acyclics.append(K)
                certs.append(cert)
    return DescentData(gens, acyclics, certs)


@dataclass
class WeakFlatReport:
    power_bound: int
    failures: list

    @property
    def ok(self) -> bool:
        return not self.failures


def weak_flatness_report(dd: DescentData, T, power_bound: int = 2) -> WeakFlatReport:
    """Conditions (a) and (b) of weak flatness, checked up to the power bound,
    with every ``F'`` in ``𝒢[T]`` as a probe."""
    T = _as_module(T)
    fails = []
    for H in dd.acyclics:
        for n in range(power_bound + 1):
            K = tensor(H, sphere(tensor_power(T, n), 0))
            if any(not homology(K, k).is_zero() for k in K.degrees()):
                fails.append(("acyclicity", n))
    gens = extended_generators(dd, T, power_bound)
    for n in range(power_bound + 1):
        for E in dd.generators:
            try:
                weak_flat_resolution(T, n, E, probes=gens)
            except ValueError as e:
                fails.append(("resolution", n, str(E), str(e)))
    return WeakFlatReport(power_bound, fails)


def descent_flatness_failures(dd: DescentData) -> list[tuple]:
    """Condition (ii) of a weakly flat descent structure: ``E ⊗ H`` acyclic."""
    out = []
    for k, H in enumerate(dd.acyclics):
        for gi, E in enumerate(dd.generators):
            K = tensor(sphere(E, 0), H)
            if any(not homology(K, n).is_zero() for n in K.degrees()):
                out.append((gi, k))
    return out
