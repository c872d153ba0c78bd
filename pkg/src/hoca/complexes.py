"""Bounded cochain complexes of finitely generated modules.

Differentials raise degree: ``d^n : C^n -> C^{n+1}``.  Only degrees with a
nonzero module are stored; everything else is the zero module.

Conventions used throughout the package:

* ``shift(C, k)^n = C^{n+k}`` with differential ``(-1)^k d``;
* ``Cone(p)^n = Y^n ⊕ X^{n+1}`` with ``d(y, x) = (dy + p x, -dx)``;
* ``Cyl(C)^n = C^n ⊕ C^{n+1} ⊕ C^n`` with ``d(x, y, z) = (dx - y, -dy, y + dz)``;
* ``Hom(X, Y)^n = prod_p Hom(X^p, Y^{p+n})`` with ``D f = d f - (-1)^n f d``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import (
    FGModule,
    HomBasis,
    ModuleMap,
    Ring,
    RingMismatch,
    Subquotient,
    block_map,
    direct_sum,
    hom_basis,
    identity,
    imat,
    kernel_lattice,
    linear_on_homs,
    solve_linear,
)


class InvariantViolation(ValueError):
    """A structural identity (d∘d = 0, commuting squares, ...) failed."""


def _as_map(f, source: FGModule, target: FGModule, check: bool) -> ModuleMap:
    if isinstance(f, ModuleMap):
        if f.source != source or f.target != target:
            raise InvariantViolation("component map has the wrong source or target")
        return f
    return ModuleMap(source, target, imat(f) if not isinstance(f, np.ndarray) else f, check=check)


class Complex:
    """A bounded cochain complex."""

    def __init__(self, ring: Ring, modules: dict, differentials: dict | None = None,
                 check: bool = True):
        self.ring = ring
        self._mods = {}
        for n, M in modules.items():
            if M.ring != ring:
                raise RingMismatch(f"degree {n}: {M.ring} vs {ring}")
            if M.ngens:
                self._mods[int(n)] = M
        self._d = {}
        for n, f in (differentials or {}).items():
            n = int(n)
            src, tgt = self.module(n), self.module(n + 1)
            if not src.ngens or not tgt.ngens:
                if isinstance(f, ModuleMap):
                    if not f.is_zero():
                        raise InvariantViolation(f"nonzero differential out of degree {n}")
                elif np.asarray(f, dtype=object).size and any(np.asarray(f, dtype=object).flat):
                    raise InvariantViolation(f"nonzero differential out of degree {n}")
                continue
            dm = _as_map(f, src, tgt, check)
            if not dm.is_zero():
                self._d[n] = dm
        if check:
            for n in self._d:
                if n + 1 in self._d and not (self._d[n + 1] @ self._d[n]).is_zero():
                    raise InvariantViolation(f"d^{n + 1} ∘ d^{n} != 0")

    # -- access --------------------------------------------------------
    def module(self, n: int) -> FGModule:
        return self._mods.get(n) or FGModule.zero(self.ring)

    def d(self, n: int) -> ModuleMap:
        f = self._d.get(n)
        if f is None:
            return ModuleMap.zero(self.module(n), self.module(n + 1))
        return f

    def degrees(self) -> list[int]:
        return sorted(self._mods)

    def support(self) -> tuple[int, int] | None:
        if not self._mods:
            return None
        return min(self._mods), max(self._mods)

    def is_zero(self) -> bool:
        return not self._mods

    def total_rank(self) -> int:
        return sum(M.ngens for M in self._mods.values())

    def __eq__(self, other):
        return (isinstance(other, Complex) and self.ring == other.ring
                and self._mods == other._mods
                and set(self._d) == set(other._d)
                and all(self._d[n] == other._d[n] for n in self._d))

    def __hash__(self):
        return hash((self.ring, tuple(sorted(self._mods.items()))))

    def __str__(self):
        if not self._mods:
            return "0"
        lines = []
        for n in self.degrees():
            lines.append(f"C^{n} = {self.module(n)}")
            if n in self._d:
                lines.append(f"d^{n} = {[[int(x) for x in r] for r in self._d[n].matrix]}")
        return "\n".join(lines)

    __repr__ = __str__

    def identity(self) -> "ChainMap":
        return ChainMap(self, self, {n: self.module(n).identity() for n in self.degrees()},
                        check=False)

    @classmethod
    def zero(cls, ring: Ring) -> "Complex":
        return cls(ring, {})


def _union_degrees(*cs: Complex) -> list[int]:
    s = set()
    for c in cs:
        s.update(c.degrees())
    return sorted(s)


class ChainMap:
    """Degree-preserving family of module maps commuting with ``d``."""

    def __init__(self, source: Complex, target: Complex, components: dict | None = None,
                 check: bool = True):
        if source.ring != target.ring:
            raise RingMismatch(f"{source.ring} vs {target.ring}")
        self.source = source
        self.target = target
        self._c = {}
        for n, f in (components or {}).items():
            n = int(n)
            S, T = source.module(n), target.module(n)
            if not S.ngens or not T.ngens:
                continue
            fm = _as_map(f, S, T, check)
            if not fm.is_zero():
                self._c[n] = fm
        if check:
            for n in _union_degrees(source, target):
                lhs = target.d(n) @ self[n]
                rhs = self[n + 1] @ source.d(n)
                if lhs != rhs:
                    raise InvariantViolation(f"chain map does not commute with d in degree {n}")

    def __getitem__(self, n: int) -> ModuleMap:
        f = self._c.get(n)
        if f is None:
            return ModuleMap.zero(self.source.module(n), self.target.module(n))
        return f

    def degrees(self) -> list[int]:
        return _union_degrees(self.source, self.target)

    def __matmul__(self, other: "ChainMap") -> "ChainMap":
        if other.target != self.source:
            raise ValueError("cannot compose chain maps: complex mismatch")
        return ChainMap(other.source, self.target,
                        {n: self[n] @ other[n] for n in other.source.degrees()}, check=False)

    def __add__(self, other: "ChainMap") -> "ChainMap":
        self._same(other)
        return ChainMap(self.source, self.target,
                        {n: self[n] + other[n] for n in self.source.degrees()}, check=False)

    def __sub__(self, other: "ChainMap") -> "ChainMap":
        self._same(other)
        return ChainMap(self.source, self.target,
                        {n: self[n] - other[n] for n in self.source.degrees()}, check=False)

    def __neg__(self) -> "ChainMap":
        return ChainMap(self.source, self.target, {n: -f for n, f in self._c.items()}, check=False)

    def __rmul__(self, k: int) -> "ChainMap":
        return ChainMap(self.source, self.target, {n: k * f for n, f in self._c.items()},
                        check=False)

    def _same(self, other):
        if other.source != self.source or other.target != self.target:
            raise ValueError("chain maps have different source or target")

    def __eq__(self, other):
        return (isinstance(other, ChainMap) and self.source == other.source
                and self.target == other.target
                and all(self[n] == other[n] for n in self.degrees()))

    def __hash__(self):
        return hash((self.source, self.target))

    def is_zero(self) -> bool:
        return not self._c

    def is_degreewise_injective(self) -> bool:
        return all(self[n].is_injective() for n in self.source.degrees())

    def is_degreewise_surjective(self) -> bool:
        return all(self[n].is_surjective() for n in self.target.degrees())

    def is_isomorphism(self) -> bool:
        return all(self[n].is_isomorphism() for n in self.degrees())

    def is_quasi_isomorphism(self) -> bool:
        lo_hi = [c.support() for c in (self.source, self.target) if c.support()]
        if not lo_hi:
            return True
        lo = min(s[0] for s in lo_hi)
        hi = max(s[1] for s in lo_hi)
        return all(induced_map(self, n).is_isomorphism() for n in range(lo, hi + 1))

    def __repr__(self):
        comps = {n: [[int(x) for x in r] for r in f.matrix] for n, f in sorted(self._c.items())}
        return f"ChainMap({comps})"


def zero_map(X: Complex, Y: Complex) -> ChainMap:
    return ChainMap(X, Y, {}, check=False)


# --------------------------------------------------------------------------
# homology

def homology_data(C: Complex, n: int) -> Subquotient:
    """``ker d^n / im d^{n-1}`` with cycle representatives and coordinates."""
    M = C.module(n)
    return Subquotient(M, kernel_lattice(C.d(n)), C.d(n - 1).matrix)


def homology(C: Complex, n: int) -> FGModule:
    return homology_data(C, n).module


def is_acyclic(C: Complex) -> bool:
    return all(homology(C, n).is_zero() for n in C.degrees())


def induced_map(f: ChainMap, n: int) -> ModuleMap:
    """``H^n(f)`` between the normalized homology modules."""
    hs = homology_data(f.source, n)
    ht = homology_data(f.target, n)
    imgs = f[n].matrix.dot(hs.gens)
    return ModuleMap(hs.module, ht.module, ht.coords_matrix(imgs), check=False)


# --------------------------------------------------------------------------
# elementary complexes

def sphere(E: FGModule, n: int) -> Complex:
    return Complex(E.ring, {n: E})


def disk(E: FGModule, n: int) -> Complex:
    return Complex(E.ring, {n: E, n + 1: E}, {n: E.identity()}, check=False)


def sphere_disk_inclusion(E: FGModule, n: int) -> ChainMap:
    """The canonical inclusion ``S^{n+1}E -> D^nE``."""
    return ChainMap(sphere(E, n + 1), disk(E, n), {n + 1: E.identity()}, check=False)


def shift(C: Complex, k: int) -> Complex:
    sign = -1 if k % 2 else 1
    return Complex(C.ring, {n - k: M for n, M in C._mods.items()},
                   {n - k: ModuleMap(C.module(n), C.module(n + 1), sign * f.matrix, check=False)
                    for n, f in C._d.items()}, check=False)


def shift_map(f: ChainMap, k: int) -> ChainMap:
    return ChainMap(shift(f.source, k), shift(f.target, k),
                    {n - k: g for n, g in f._c.items()}, check=False)


def direct_sum_complex(cs: Sequence[Complex], ring: Ring | None = None):
    """Direct sum with its inclusions and projections."""
    ring = ring or cs[0].ring
    degs = _union_degrees(*cs)
    mods, diffs, offs = {}, {}, {}
    for n in degs:
        mods[n], offs[n] = direct_sum([c.module(n) for c in cs], ring)
    for n in degs:
        blocks = {(i, i): c.d(n) for i, c in enumerate(cs)}
        diffs[n] = block_map([c.module(n) for c in cs], [c.module(n + 1) for c in cs],
                             blocks, ring)
    S = Complex(ring, mods, diffs, check=False)
    incs, projs = [], []
    for i, c in enumerate(cs):
        inc, proj = {}, {}
        for n in c.degrees():
            m = imat(shape=(S.module(n).ngens, c.module(n).ngens))
            o = offs[n][i]
            m[o:o + c.module(n).ngens, :] = identity(c.module(n).ngens)
            inc[n] = ModuleMap(c.module(n), S.module(n), m, check=False)
            proj[n] = ModuleMap(S.module(n), c.module(n), m.T.copy(), check=False)
        incs.append(ChainMap(c, S, inc, check=False))
        projs.append(ChainMap(S, c, proj, check=False))
    return S, incs, projs


def map_from_sum(S: Complex, incs: Sequence[ChainMap], maps: Sequence[ChainMap],
                 target: Complex) -> ChainMap:
    """The map out of a direct sum restricting to ``maps[i]`` on summand ``i``."""
    comps = {}
    for n in S.degrees():
        mat = imat(shape=(target.module(n).ngens, S.module(n).ngens))
        for inc, f in zip(incs, maps):
            mat = mat + f[n].matrix.dot(inc[n].matrix.T)
        comps[n] = ModuleMap(S.module(n), target.module(n), mat, check=False)
    return ChainMap(S, target, comps, check=False)


def map_to_sum(S: Complex, projs: Sequence[ChainMap], incs: Sequence[ChainMap],
               maps: Sequence[ChainMap], source: Complex) -> ChainMap:
    comps = {}
    for n in source.degrees():
        mat = imat(shape=(S.module(n).ngens, source.module(n).ngens))
        for inc, f in zip(incs, maps):
            mat = mat + inc[n].matrix.dot(f[n].matrix)
        comps[n] = ModuleMap(source.module(n), S.module(n), mat, check=False)
    return ChainMap(source, S, comps, check=False)


# --------------------------------------------------------------------------
# cone and cylinder

def cone(p: ChainMap):
    """``(Cone(p), u, v)`` for ``p : X -> Y``."""
    X, Y = p.source, p.target
    ring = X.ring
    degs = sorted(set(Y.degrees()) | {n - 1 for n in X.degrees()})
    mods = {n: direct_sum([Y.module(n), X.module(n + 1)], ring)[0] for n in degs}
    diffs = {}
    for n in degs:
        blocks = {(0, 0): Y.d(n), (0, 1): p[n + 1], (1, 1): -X.d(n + 1)}
        diffs[n] = block_map([Y.module(n), X.module(n + 1)],
                             [Y.module(n + 1), X.module(n + 2)], blocks, ring)
    K = Complex(ring, mods, diffs, check=False)
    u, v = {}, {}
    for n in degs:
        ny, nx = Y.module(n).ngens, X.module(n + 1).ngens
        m = imat(shape=(ny + nx, ny))
        m[:ny, :] = identity(ny)
        u[n] = ModuleMap(Y.module(n), K.module(n), m, check=False)
        m2 = imat(shape=(nx, ny + nx))
        m2[:, ny:] = identity(nx)
        v[n] = ModuleMap(K.module(n), X.module(n + 1), m2, check=False)
    X1 = shift(X, 1)
    return K, ChainMap(Y, K, u, check=False), ChainMap(K, X1, v, check=False)


def cylinder(C: Complex):
    """``(Cyl(C), i0, i1, sigma)``."""
    ring = C.ring
    degs = sorted(set(C.degrees()) | {n - 1 for n in C.degrees()})
    parts = lambda n: [C.module(n), C.module(n + 1), C.module(n)]
    mods = {n: direct_sum(parts(n), ring)[0] for n in degs}
    diffs = {}
    for n in degs:
        one = C.module(n + 1).identity()
        blocks = {(0, 0): C.d(n), (0, 1): -one, (1, 1): -C.d(n + 1), (2, 1): one, (2, 2): C.d(n)}
        diffs[n] = block_map(parts(n), parts(n + 1), blocks, ring)
    K = Complex(ring, mods, diffs, check=False)
    i0, i1, sig = {}, {}, {}
    for n in C.degrees():
        a, b = C.module(n).ngens, C.module(n + 1).ngens
        m0 = imat(shape=(2 * a + b, a))
        m0[:a] = identity(a)
        m1 = imat(shape=(2 * a + b, a))
        m1[a + b:] = identity(a)
        i0[n] = ModuleMap(C.module(n), K.module(n), m0, check=False)
        i1[n] = ModuleMap(C.module(n), K.module(n), m1, check=False)
        sig[n] = ModuleMap(K.module(n), C.module(n), (m0 + m1).T.copy(), check=False)
    return (K, ChainMap(C, K, i0, check=False), ChainMap(C, K, i1, check=False),
            ChainMap(K, C, sig, check=False))


# --------------------------------------------------------------------------
# Hom complexes and homotopies

class HomComplex:
    """``Hom(X, Y)`` with explicit bases and conversions to families of maps."""

    def __init__(self, X: Complex, Y: Complex):
        if X.ring != Y.ring:
            raise RingMismatch(f"{X.ring} vs {Y.ring}")
        self.X, self.Y = X, Y
        ring = X.ring
        self.blocks: dict[int, list[tuple[int, HomBasis]]] = {}
        sx, sy = X.support(), Y.support()
        degs = range(sy[0] - sx[1], sy[1] - sx[0] + 1) if sx and sy else range(0)
        for n in degs:
            bl = []
            for p in X.degrees():
                hb = hom_basis(X.module(p), Y.module(p + n))
                if hb.module.ngens:
                    bl.append((p, hb))
            if bl:
                self.blocks[n] = bl
        mods = {n: direct_sum([hb.module for _, hb in bl], ring)[0]
                for n, bl in self.blocks.items()}
        diffs = {}
        for n, bl in self.blocks.items():
            if n + 1 not in self.blocks:
                continue
            tb = self.blocks[n + 1]
            sign = -1 if n % 2 else 1
            tpos = {p: i for i, (p, _) in enumerate(tb)}

            def D(args, bl=bl, tb=tb, n=n, sign=sign, tpos=tpos):
                out = [imat(shape=(hb.target.ngens, hb.source.ngens)) for _, hb in tb]
                for (p, hb), f in zip(bl, args):
                    if not any(f.flat):
                        continue
                    if p in tpos:
                        out[tpos[p]] = out[tpos[p]] + Y.d(p + n).matrix.dot(f)
                    if p - 1 in tpos:
                        out[tpos[p - 1]] = out[tpos[p - 1]] - sign * f.dot(X.d(p - 1).matrix)
                return out

            diffs[n] = linear_on_homs([hb for _, hb in bl], [hb for _, hb in tb], D)
        self.complex = Complex(ring, mods, diffs, check=False)

    def maps(self, n: int, vec) -> dict[int, ModuleMap]:
        """The family ``X^p -> Y^{p+n}`` encoded by an element of degree ``n``."""
        out = {}
        off = 0
        for p, hb in self.blocks.get(n, []):
            k = hb.module.ngens
            out[p] = hb.to_map(vec[off:off + k])
            off += k
        return out

    def element(self, n: int, maps: dict) -> np.ndarray:
        parts = []
        for p, hb in self.blocks.get(n, []):
            f = maps.get(p)
            if f is None:
                parts.append(imat(shape=(hb.module.ngens,)))
            else:
                parts.append(hb.from_matrix(f.matrix if isinstance(f, ModuleMap) else f))
        if not parts:
            return imat(shape=(0,))
        return np.concatenate(parts)

    def chain_map(self, vec, n: int = 0) -> ChainMap:
        """A degree-``n`` cycle as a chain map ``X -> Y[n]``."""
        Yn = shift(self.Y, n)
        return ChainMap(self.X, Yn, self.maps(n, vec))

    def cycle_of(self, f: ChainMap, n: int = 0) -> np.ndarray:
        return self.element(n, {p: f[p] for p in self.X.degrees()})


def hom_complex(X: Complex, Y: Complex) -> Complex:
    return HomComplex(X, Y).complex


def homotopy_classes(X: Complex, Y: Complex, n: int) -> FGModule:
    return homology(hom_complex(X, Y), n)


@dataclass
class Homotopy:
    """A homotopy ``from_map ~ to_map`` realized as a map out of ``Cyl(source)``."""

    from_map: ChainMap
    to_map: ChainMap
    witness: ChainMap

    def verify(self) -> bool:
        _, i0, i1, _ = cylinder(self.from_map.source)
        return self.witness @ i0 == self.from_map and self.witness @ i1 == self.to_map


def homotopy_witness(f: ChainMap, g: ChainMap, s: dict) -> Homotopy:
    """Assemble ``h(x, y, z) = f x + s y + g z`` from ``s : X^{n+1} -> Y^n``."""
    X, Y = f.source, f.target
    K, _, _, _ = cylinder(X)
    comps = {}
    for n in K.degrees():
        parts = [f[n], s.get(n + 1) or ModuleMap.zero(X.module(n + 1), Y.module(n)), g[n]]
        m = imat(shape=(Y.module(n).ngens, K.module(n).ngens))
        c = 0
        for pmap in parts:
            w = pmap.source.ngens
            if w:
                m[:, c:c + w] = pmap.matrix
            c += w
        comps[n] = ModuleMap(K.module(n), Y.module(n), m, check=False)
    return Homotopy(f, g, ChainMap(K, Y, comps))


def find_homotopy(f: ChainMap, g: ChainMap) -> Homotopy | None:
    """A homotopy from ``f`` to ``g`` or ``None`` if they are not homotopic."""
    X, Y = f.source, f.target
    H = HomComplex(X, Y)
    diff = H.cycle_of(g - f)
    if not diff.size or not any(diff):
        return homotopy_witness(f, g, {})
    D = H.complex.d(-1)
    s = solve_linear(D, diff)
    if s is None:
        return None
    return homotopy_witness(f, g, H.maps(-1, s))


# --------------------------------------------------------------------------
# kernels, cokernels, pushouts, pullbacks

def chain_kernel(f: ChainMap):
    """Degreewise kernel complex and its inclusion."""
    X = f.source
    sqs = {n: Subquotient(X.module(n), kernel_lattice(f[n]), imat(shape=(X.module(n).ngens, 0)))
           for n in X.degrees()}
    mods = {n: sq.module for n, sq in sqs.items()}
    diffs = {}
    for n, sq in sqs.items():
        if n + 1 not in sqs or not sq.module.ngens:
            continue
        imgs = X.d(n).matrix.dot(sq.gens)
        diffs[n] = ModuleMap(sq.module, sqs[n + 1].module, sqs[n + 1].coords_matrix(imgs),
                             check=False)
    K = Complex(X.ring, mods, diffs, check=False)
    return K, ChainMap(K, X, {n: sq.inclusion() for n, sq in sqs.items()}, check=False)


def chain_cokernel(f: ChainMap):
    """Degreewise cokernel complex and the projection."""
    Y = f.target
    sqs = {n: Subquotient(Y.module(n), identity(Y.module(n).ngens), f[n].matrix)
           for n in Y.degrees()}
    mods = {n: sq.module for n, sq in sqs.items()}
    diffs = {}
    for n, sq in sqs.items():
        if n + 1 not in sqs or not sq.module.ngens:
            continue
        imgs = Y.d(n).matrix.dot(sq.gens)
        diffs[n] = ModuleMap(sq.module, sqs[n + 1].module, sqs[n + 1].coords_matrix(imgs),
                             check=False)
    Q = Complex(Y.ring, mods, diffs, check=False)
    proj = {n: ModuleMap(Y.module(n), sq.module, sq.coords_matrix(identity(Y.module(n).ngens)),
                         check=False) for n, sq in sqs.items()}
    return Q, ChainMap(Y, Q, proj, check=False)


def factor_through_cokernel(proj: ChainMap, g: ChainMap) -> ChainMap:
    """The map ``Q -> Z`` induced by ``g : Y -> Z`` vanishing on the kernel of ``proj``."""
    Q = proj.target
    comps = {}
    for n in Q.degrees():
        lift = _section(proj[n])
        comps[n] = g[n] @ lift
    return ChainMap(Q, g.target, comps)


def _section(p: ModuleMap) -> ModuleMap:
    """A set-theoretic section of a surjection on generators (as a module map
    of the underlying lattices; composing with a map that kills ``ker p``
    gives a well-defined homomorphism)."""
    cols = []
    for j in range(p.target.ngens):
        e = imat(shape=(p.target.ngens,))
        e[j] = 1
        x = solve_linear(p, e)
        if x is None:
            raise InvariantViolation("projection is not surjective")
        cols.append(x)
    m = imat(shape=(p.source.ngens, p.target.ngens))
    for j, c in enumerate(cols):
        m[:, j] = c
    return ModuleMap(p.target, p.source, m, check=False)


def pushout(i: ChainMap, f: ChainMap):
    """Pushout of ``B <- A -> C``: returns ``(D, j : C -> D, g : B -> D)``."""
    if i.source != f.source:
        raise ValueError("pushout needs a shared source")
    B, C = i.target, f.target
    S, incs, projs = direct_sum_complex([B, C], i.source.ring)
    into = map_to_sum(S, projs, incs, [i, -f], i.source)
    D, proj = chain_cokernel(into)
    g = proj @ incs[0]
    j = proj @ incs[1]
    return D, j, g


def pullback(p: ChainMap, q: ChainMap):
    """Pullback of ``B -> D <- C``: returns ``(P, pb : P -> B, pc : P -> C)``."""
    if p.target != q.target:
        raise ValueError("pullback needs a shared target")
    B, C = p.source, q.source
    S, incs, projs = direct_sum_complex([B, C], B.ring)
    out = map_from_sum(S, incs, [p, -q], p.target)
    P, inc = chain_kernel(out)
    return P, projs[0] @ inc, projs[1] @ inc


# --------------------------------------------------------------------------
# exactness

def is_exact_at(alpha: ModuleMap, beta: ModuleMap) -> bool:
    """``im alpha = ker beta`` for composable module maps."""
    if not (beta @ alpha).is_zero():
        return False
    K = Subquotient(beta.source, kernel_lattice(beta), alpha.matrix)
    return K.module.is_zero()


def connecting_map(i: ChainMap, p: ChainMap, n: int) -> ModuleMap:
    """``δ : H^n(C) -> H^{n+1}(A)`` for a degreewise short exact ``A -> B -> C``."""
    A, B, C = i.source, i.target, p.target
    hc = homology_data(C, n)
    ha = homology_data(A, n + 1)
    cols = imat(shape=(A.module(n + 1).ngens, hc.module.ngens))
    for k in range(hc.module.ngens):
        z = hc.gens[:, k]
        b = solve_linear(p[n], z)
        if b is None:
            raise InvariantViolation(f"p is not surjective in degree {n}")
        db = B.d(n)(b)
        a = solve_linear(i[n + 1], db)
        if a is None:
            raise InvariantViolation(f"boundary does not come from A in degree {n + 1}")
        cols[:, k] = a
    return ModuleMap(hc.module, ha.module, ha.coords_matrix(cols), check=False)


def long_exact_sequence_failures(i: ChainMap, p: ChainMap) -> list[tuple[str, int]]:
    """Nodes of the homology long exact sequence of ``0 -> A -> B -> C -> 0`` that
    fail exactness; empty when everything checks."""
    A, B, C = i.source, i.target, p.target
    degs = _union_degrees(A, B, C)
    if not degs:
        return []
    bad = []
    for n in range(degs[0] - 1, degs[-1] + 1):
        hi, hp = induced_map(i, n), induced_map(p, n)
        d_prev = connecting_map(i, p, n - 1)
        d_here = connecting_map(i, p, n)
        hi_next = induced_map(i, n + 1)
        if not is_exact_at(d_prev, hi):
            bad.append(("A", n))
        if not is_exact_at(hi, hp):
            bad.append(("B", n))
        if not is_exact_at(hp, d_here):
            bad.append(("C", n))
        if not is_exact_at(d_here, hi_next):
            bad.append(("A", n + 1))
    return bad


def short_exact_failures(i: ChainMap, p: ChainMap) -> list[tuple[str, int]]:
    """Degreewise exactness of ``0 -> A -> B -> C -> 0``."""
    bad = []
    for n in _union_degrees(i.source, i.target, p.target):
        if not i[n].is_injective():
            bad.append(("injective", n))
        if not p[n].is_surjective():
            bad.append(("surjective", n))
        if not is_exact_at(i[n], p[n]):
            bad.append(("middle", n))
    return bad


# --------------------------------------------------------------------------
# linear algebra on spaces of degree-n map families

class HomSpace:
    """``prod_p Hom(X^p, Y^{p+n})`` as a module with explicit block bases.

    Elements are handled as coordinate vectors or as ``{p: matrix}`` families.
    """

    def __init__(self, X: Complex, Y: Complex, n: int = 0):
        self.X, self.Y, self.n = X, Y, n
        self.blocks = []
        for p in X.degrees():
            hb = hom_basis(X.module(p), Y.module(p + n))
            if hb.module.ngens:
                self.blocks.append((p, hb))
        self.module = direct_sum([hb.module for _, hb in self.blocks], X.ring)[0]

    def family(self, vec) -> dict:
        out, off = {}, 0
        for p, hb in self.blocks:
            k = hb.module.ngens
            out[p] = hb.to_matrix(vec[off:off + k])
            off += k
        return out

    def maps(self, vec) -> dict:
        return {p: ModuleMap(self.X.module(p), self.Y.module(p + self.n), m, check=False)
                for p, m in self.family(vec).items()}

    def vector(self, family: dict) -> np.ndarray:
        parts = []
        for p, hb in self.blocks:
            f = family.get(p)
            if f is None:
                parts.append(imat(shape=(hb.module.ngens,)))
            else:
                parts.append(hb.from_matrix(f.matrix if isinstance(f, ModuleMap) else f))
        return np.concatenate(parts) if parts else imat(shape=(0,))

    def chain_map(self, vec) -> ChainMap:
        """A degree-0 element as a chain map (validated)."""
        return ChainMap(self.X, shift(self.Y, self.n), self.maps(vec))


def hom_operator(source: HomSpace, targets: Sequence[HomSpace], func) -> ModuleMap:
    """Matrix of a linear operator ``source -> ⊕ targets``.

    ``func`` takes a family ``{p: matrix}`` and returns one family per target
    (keys absent from a target's blocks must carry zero maps).
    """
    tblocks = [hb for t in targets for _, hb in t.blocks]
    keys = [(ti, p) for ti, t in enumerate(targets) for p, _ in t.blocks]
    ring = source.X.ring
    if not source.blocks or not tblocks:
        T = direct_sum([t.module for t in targets], ring)[0] if targets else FGModule.zero(ring)
        return ModuleMap.zero(source.module, T)

    def flat(args):
        fam = {p: m for (p, _), m in zip(source.blocks, args)}
        outs = func(fam)
        return [outs[ti].get(p) for ti, p in keys]

    return linear_on_homs([hb for _, hb in source.blocks], tblocks, flat)


def compose_families(f: dict, g: dict, shift_g: int = 0) -> dict:
    """``{p: f[p + shift_g] @ g[p]}`` on matrices, skipping missing entries."""
    out = {}
    for p, gm in g.items():
        fm = f.get(p + shift_g)
        if fm is not None:
            out[p] = fm.dot(gm)
    return out


def chain_inverse(f: ChainMap) -> ChainMap:
    """Inverse of a chain isomorphism."""
    comps = {}
    for n in f.target.degrees():
        g = f[n]
        cols = [solve_linear(g, e) for e in identity(g.target.ngens).T]
        if any(c is None for c in cols):
            raise InvariantViolation(f"not invertible in degree {n}")
        m = imat(shape=(g.source.ngens, g.target.ngens))
        for j, c in enumerate(cols):
            m[:, j] = c
        comps[n] = ModuleMap(g.target, g.source, m, check=False)
    inv = ChainMap(f.target, f.source, comps, check=False)
    if not (f @ inv == f.target.identity() and inv @ f == f.source.identity()):
        raise InvariantViolation("chain map is not an isomorphism")
    return inv


def precompose(q: ChainMap, C: Complex) -> ChainMap:
    """``Hom(q, C) : Hom(Y, C) -> Hom(X, C)``, ``f ↦ f∘q``."""
    HY, HX = HomComplex(q.target, C), HomComplex(q.source, C)
    comps = {}
    for n in HY.complex.degrees():
        src, tgt = HomSpace(q.target, C, n), HomSpace(q.source, C, n)
        qm = {p: q[p].matrix for p in q.source.degrees()}
        comps[n] = hom_operator(src, [tgt], lambda fam, qm=qm: [compose_families(fam, qm)])
    return ChainMap(HY.complex, HX.complex, comps, check=False)


def postcompose(C: Complex, p: ChainMap) -> ChainMap:
    """``Hom(C, p) : Hom(C, X) -> Hom(C, Y)``, ``f ↦ p∘f``."""
    HX, HY = HomComplex(C, p.source), HomComplex(C, p.target)
    comps = {}
    for n in HX.complex.degrees():
        src, tgt = HomSpace(C, p.source, n), HomSpace(C, p.target, n)
        pm = {k: p[k].matrix for k in p.source.degrees()}
        comps[n] = hom_operator(src, [tgt],
                                lambda fam, pm=pm, n=n: [compose_families(pm, fam, n)])
    return ChainMap(HX.complex, HY.complex, comps, check=False)
