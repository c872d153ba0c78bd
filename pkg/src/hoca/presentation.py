"""Complexes over the small additive category 𝔸 of free modules of a few ranks.

An 𝔸-module is an additive functor ``𝔸^op -> R-Mod``.  It is stored by its
value at each object and the action of the elementary matrices
``E_ij : R^a -> R^b``, which generate every hom group of 𝔸.

* ``restrict`` (``i^*``) sends ``F`` to ``X ↦ Hom(X, F) = F^{rank X}``.
* ``extend`` (``i_!``) is the coend ``∫^X M(X) ⊗ X``: the cokernel of the
  relation map ``m ⊗ x ↦ M(φ) m ⊗ x - m ⊗ φ x`` over the generators ``φ``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import (
    FGModule,
    ModuleMap,
    Ring,
    Subquotient,
    direct_sum,
    enumerate_elements,
    hom_basis,
    identity,
    imat,
    kernel_lattice,
    linear_on_homs,
)
from .complexes import (
    ChainMap,
    Complex,
    HomComplex,
    InvariantViolation,
    chain_cokernel,
    direct_sum_complex,
    factor_through_cokernel,
    homology_data,
    induced_map,
    postcompose,
    sphere,
)


@dataclass
class AddCategory:
    ring: Ring
    ranks: tuple = (1, 2)

    @property
    def objects(self) -> list[FGModule]:
        return [FGModule.free(self.ring, r) for r in self.ranks]

    def generators(self) -> list[tuple]:
        """``(a, b, i, j)`` for ``E_ij : object a -> object b``."""
        return [(a, b, i, j)
                for a, ra in enumerate(self.ranks) for b, rb in enumerate(self.ranks)
                for i in range(rb) for j in range(ra)]

    def matrix(self, a: int, b: int, i: int, j: int) -> np.ndarray:
        m = imat(shape=(self.ranks[b], self.ranks[a]))
        m[i, j] = 1
        return m


def _kron_copies(block: np.ndarray, k: int) -> np.ndarray:
    """``block ⊗ I_k`` laid out copy by copy."""
    out = imat(shape=(block.shape[0] * k, block.shape[1] * k))
    for r in range(block.shape[0]):
        for c in range(block.shape[1]):
            if block[r, c]:
                out[r * k:(r + 1) * k, c * k:(c + 1) * k] = block[r, c] * identity(k)
    return out


@dataclass
class AModule:
    cat: AddCategory
    values: list                 # FGModule per object
    actions: dict                # (a, b, i, j) -> ModuleMap values[b] -> values[a]

    def act(self, a: int, b: int, phi: np.ndarray) -> ModuleMap:
        f = ModuleMap.zero(self.values[b], self.values[a])
        for i in range(phi.shape[0]):
            for j in range(phi.shape[1]):
                if phi[i, j]:
                    f = f + ModuleMap(self.values[b], self.values[a],
                                      int(phi[i, j]) * self.actions[a, b, i, j].matrix, check=False)
        return f

    def functoriality_failures(self) -> list[tuple]:
        cat, bad = self.cat, []
        gens = cat.generators()
        for (a, b, i, j) in gens:
            for (b2, c, k, l) in gens:
                if b2 != b:
                    continue
                # E_kl ∘ E_ij = δ_{l i} E_kj, and F reverses composition
                lhs = self.actions[a, b, i, j] @ self.actions[b, c, k, l]
                rhs = (self.actions[a, c, k, j] if l == i
                       else ModuleMap.zero(self.values[c], self.values[a]))
                if lhs != rhs:
                    bad.append(("composition", (a, b, i, j), (b, c, k, l)))
        for a, r in enumerate(cat.ranks):
            if self.act(a, a, identity(r)) != self.values[a].identity():
                bad.append(("identity", a))
        return bad

    def is_zero(self) -> bool:
        return all(M.ngens == 0 for M in self.values)


@dataclass
class AMap:
    source: AModule
    target: AModule
    components: list             # ModuleMap per object

    def naturality_failures(self) -> list[tuple]:
        bad = []
        for (a, b, i, j) in self.source.cat.generators():
            lhs = self.components[a] @ self.source.actions[a, b, i, j]
            rhs = self.target.actions[a, b, i, j] @ self.components[b]
            if lhs != rhs:
                bad.append((a, b, i, j))
        return bad

    def __matmul__(self, other: "AMap") -> "AMap":
        return AMap(other.source, self.target,
                    [f @ g for f, g in zip(self.components, other.components)])

    def __eq__(self, other):
        return all(f == g for f, g in zip(self.components, other.components))


@dataclass
class AComplex:
    cat: AddCategory
    modules: dict                # n -> AModule
    diffs: dict                  # n -> AMap (M^n -> M^{n+1})

    def degrees(self) -> list[int]:
        return sorted(self.modules)

    def module(self, n: int) -> AModule:
        M = self.modules.get(n)
        return M if M is not None else zero_amodule(self.cat)

    def d(self, n: int) -> AMap:
        f = self.diffs.get(n)
        if f is not None:
            return f
        S, T = self.module(n), self.module(n + 1)
        return AMap(S, T, [ModuleMap.zero(a, b) for a, b in zip(S.values, T.values)])

    def evaluate(self, k: int) -> Complex:
        """The complex of values at object ``k``."""
        mods = {n: M.values[k] for n, M in self.modules.items()}
        diffs = {n: self.d(n).components[k] for n in self.modules if n + 1 in self.modules}
        return Complex(self.cat.ring, mods, diffs, check=False)

    def failures(self) -> list[tuple]:
        bad = []
        for n, M in self.modules.items():
            bad += [(n,) + f for f in M.functoriality_failures()]
            bad += [(n, "natural") + f for f in self.d(n).naturality_failures()]
            dd = self.d(n + 1) @ self.d(n)
            if any(not f.is_zero() for f in dd.components):
                bad.append((n, "d∘d"))
        return bad


@dataclass
class AComplexMap:
    source: AComplex
    target: AComplex
    components: dict             # n -> AMap

    def __getitem__(self, n: int) -> AMap:
        f = self.components.get(n)
        if f is not None:
            return f
        S, T = self.source.module(n), self.target.module(n)
        return AMap(S, T, [ModuleMap.zero(a, b) for a, b in zip(S.values, T.values)])

    def failures(self) -> list[tuple]:
        bad = []
        for n in set(self.source.degrees()) | set(self.target.degrees()):
            bad += [(n, "natural") + f for f in self[n].naturality_failures()]
            if not (self.target.d(n) @ self[n] == self[n + 1] @ self.source.d(n)):
                bad.append((n, "chain"))
        return bad

    def __eq__(self, other):
        degs = set(self.source.degrees()) | set(other.source.degrees())
        return all(self[n] == other[n] for n in degs)


def zero_amodule(cat: AddCategory) -> AModule:
    Z = FGModule.zero(cat.ring)
    return AModule(cat, [Z] * len(cat.ranks),
                   {g: ModuleMap.zero(Z, Z) for g in cat.generators()})


# --------------------------------------------------------------------------
# restriction

def restrict_module(M: FGModule, cat: AddCategory) -> AModule:
    """``X ↦ Hom(X, M) = M^{rank X}`` with ``f ↦ f ∘ φ``."""
    values = [direct_sum([M] * r, cat.ring)[0] for r in cat.ranks]
    k = M.ngens
    actions = {}
    for (a, b, i, j) in cat.generators():
        # (f ∘ E_ij)(e_l) = δ_{jl} f(e_i)
        block = cat.matrix(a, b, i, j).T
        actions[a, b, i, j] = ModuleMap(values[b], values[a], _kron_copies(block, k), check=False)
    return AModule(cat, values, actions)


def restrict_module_map(f: ModuleMap, cat: AddCategory) -> AMap:
    S, T = restrict_module(f.source, cat), restrict_module(f.target, cat)
    comps = []
    for a, r in enumerate(cat.ranks):
        m = imat(shape=(T.values[a].ngens, S.values[a].ngens))
        t, c = f.target.ngens, f.source.ngens
        for l in range(r):
            m[l * t:(l + 1) * t, l * c:(l + 1) * c] = f.matrix
        comps.append(ModuleMap(S.values[a], T.values[a], m, check=False))
    return AMap(S, T, comps)


def restrict(F: Complex, cat: AddCategory) -> AComplex:
    """``i^* F``, degreewise."""
    mods = {n: restrict_module(F.module(n), cat) for n in F.degrees()}
    diffs = {}
    for n in F.degrees():
        if n + 1 in mods:
            f = restrict_module_map(F.d(n), cat)
            diffs[n] = AMap(mods[n], mods[n + 1], f.components)
    return AComplex(cat, mods, diffs)


def restrict_map(f: ChainMap, cat: AddCategory) -> AComplexMap:
    S, T = restrict(f.source, cat), restrict(f.target, cat)
    comps = {}
    for n in f.source.degrees():
        g = restrict_module_map(f[n], cat)
        comps[n] = AMap(S.module(n), T.module(n), g.components)
    return AComplexMap(S, T, comps)


def representable(cat: AddCategory, k: int) -> AComplex:
    """``Hom_𝔸(-, X_k)`` in degree 0."""
    return restrict(sphere(cat.objects[k], 0), cat)


# --------------------------------------------------------------------------
# extension

@dataclass
class Extension:
    """``i_! M`` with the coend presentation ``Rel -> C -> i_! M``."""

    source: AComplex
    complex: Complex
    big: Complex                 # C^n = ⊕_k M^n(k)^{r_k}
    proj: ChainMap               # C -> i_! M
    slots: list                  # (k, l) in the order of the copies of C


def extend(M: AComplex) -> Extension:
    cat = M.cat
    ring = cat.ring
    slots = [(k, l) for k, r in enumerate(cat.ranks) for l in range(r)]
    gens = cat.generators()
    rel_slots = [(g, l) for g in gens for l in range(cat.ranks[g[0]])]

    def piece(k, n):
        return M.module(n).values[k]

    degs = M.degrees()
    cmods, rmods, coffs, roffs = {}, {}, {}, {}
    for n in degs:
        cmods[n], coffs[n] = direct_sum([piece(k, n) for k, _ in slots], ring)
        rmods[n], roffs[n] = direct_sum([piece(g[1], n) for g, _ in rel_slots], ring)
    cd, rd = {}, {}
    for n in degs:
        if n + 1 not in cmods:
            continue
        m = imat(shape=(cmods[n + 1].ngens, cmods[n].ngens))
        for s, (k, _) in enumerate(slots):
            blk = M.d(n).components[k].matrix
            m[coffs[n + 1][s]:coffs[n + 1][s] + blk.shape[0], coffs[n][s]:coffs[n][s] + blk.shape[1]] = blk
        cd[n] = m
        m = imat(shape=(rmods[n + 1].ngens, rmods[n].ngens))
        for s, (g, _) in enumerate(rel_slots):
            blk = M.d(n).components[g[1]].matrix
            m[roffs[n + 1][s]:roffs[n + 1][s] + blk.shape[0], roffs[n][s]:roffs[n][s] + blk.shape[1]] = blk
        rd[n] = m
    C = Complex(ring, cmods, cd, check=False)
    Rel = Complex(ring, rmods, rd, check=False)
    comps = {}
    for n in degs:
        m = imat(shape=(cmods[n].ngens, rmods[n].ngens))
        for s, ((a, b, i, j), l) in enumerate(rel_slots):
            c0 = roffs[n][s]
            act = M.module(n).actions[a, b, i, j].matrix
            width = piece(b, n).ngens
            # + M(φ) m ⊗ e_l
            t = coffs[n][slots.index((a, l))]
            m[t:t + act.shape[0], c0:c0 + width] += act
            # - m ⊗ φ e_l, and φ e_l = δ_{jl} e_i
            if l == j:
                t = coffs[n][slots.index((b, i))]
                m[t:t + width, c0:c0 + width] -= identity(width)
        comps[n] = ModuleMap(Rel.module(n), C.module(n), m, check=False)
    rel = ChainMap(Rel, C, comps)
    Q, proj = chain_cokernel(rel)
    return Extension(M, Q, C, proj, slots)


def _slot_inclusion(ext: Extension, n: int, k: int, l: int) -> np.ndarray:
    """Matrix of ``M^n(k) -> C^n`` onto the slot ``(k, l)``."""
    C = ext.big.module(n)
    sizes = [ext.source.module(n).values[kk].ngens for kk, _ in ext.slots]
    s = ext.slots.index((k, l))
    off = sum(sizes[:s])
    m = imat(shape=(C.ngens, sizes[s]))
    m[off:off + sizes[s], :] = identity(sizes[s])
    return m


def extend_map(alpha: AComplexMap, src: Extension | None = None,
               tgt: Extension | None = None) -> ChainMap:
    """``i_!(α)``, slot by slot on the coend presentation."""
    src = src or extend(alpha.source)
    tgt = tgt or extend(alpha.target)
    comps = {}
    for n in src.big.degrees():
        m = imat(shape=(tgt.big.module(n).ngens, src.big.module(n).ngens))
        for k, l in src.slots:
            blk = alpha[n].components[k].matrix
            if blk.size:
                m += _slot_inclusion(tgt, n, k, l).dot(blk).dot(_slot_inclusion(src, n, k, l).T)
        comps[n] = ModuleMap(src.big.module(n), tgt.big.module(n), m, check=False)
    big = ChainMap(src.big, tgt.big, comps, check=False)
    return factor_through_cokernel(src.proj, tgt.proj @ big)


def counit(F: Complex, cat: AddCategory, ext: Extension | None = None) -> ChainMap:
    """``ε : i_! i^* F -> F``, ``f ⊗ x ↦ f(x)``."""
    ext = ext or extend(restrict(F, cat))
    comps = {}
    for n in ext.big.degrees():
        M = F.module(n)
        k_ = M.ngens
        m = imat(shape=(k_, ext.big.module(n).ngens))
        for k, l in ext.slots:
            # slot (k, l) holds f ∈ M^{r_k}; evaluation at e_l picks copy l
            pick = imat(shape=(k_, k_ * cat.ranks[k]))
            pick[:, l * k_:(l + 1) * k_] = identity(k_)
            m += pick.dot(_slot_inclusion(ext, n, k, l).T)
        comps[n] = ModuleMap(ext.big.module(n), M, m, check=False)
    big = ChainMap(ext.big, F, comps)
    eps = factor_through_cokernel(ext.proj, big)
    if eps @ ext.proj != big:
        raise InvariantViolation("evaluation does not descend to the coend")
    return eps


def unit_map(M: AComplex, ext: Extension | None = None) -> AComplexMap:
    """``η : M -> i^* i_! M``, ``m ↦ (x ↦ [m ⊗ x])``."""
    ext = ext or extend(M)
    cat = M.cat
    T = restrict(ext.complex, cat)
    comps = {}
    for n in M.degrees():
        parts = []
        for k, r in enumerate(cat.ranks):
            cols = [ext.proj[n].matrix.dot(_slot_inclusion(ext, n, k, l)) if ext.complex.module(n).ngens
                    else imat(shape=(0, M.module(n).values[k].ngens)) for l in range(r)]
            m = np.vstack(cols) if cols else imat(shape=(0, M.module(n).values[k].ngens))
            parts.append(ModuleMap(M.module(n).values[k], T.module(n).values[k], m, check=False))
        comps[n] = AMap(M.module(n), T.module(n), parts)
    return AComplexMap(M, T, comps)


# --------------------------------------------------------------------------
# hom modules

def _chain_map_module(X: Complex, Y: Complex):
    """Chain maps ``X -> Y`` as (module, ambient HomComplex, generators)."""
    H = HomComplex(X, Y)
    d0 = H.complex.d(0)
    sq = Subquotient(H.complex.module(0), kernel_lattice(d0),
                     imat(shape=(H.complex.module(0).ngens, 0)))
    return sq.module, H, sq.gens


def natural_map_module(X: AComplex, Y: AComplex):
    """Natural chain maps ``X -> Y`` as (module, blocks, generators)."""
    cat = X.cat
    degs = sorted(set(X.degrees()) | set(Y.degrees()))
    blocks = []
    for n in degs:
        for k in range(len(cat.ranks)):
            hb = hom_basis(X.module(n).values[k], Y.module(n).values[k])
            if hb.module.ngens:
                blocks.append(((n, k), hb))
    if not blocks:
        Z = FGModule.zero(cat.ring)
        return Z, blocks, imat(shape=(0, 0))
    keys = [key for key, _ in blocks]
    targets, tkeys = [], []
    for n in degs:
        for k in range(len(cat.ranks)):
            hb = hom_basis(X.module(n).values[k], Y.module(n + 1).values[k])
            if hb.module.ngens:
                targets.append(hb)
                tkeys.append(("d", n, k))
        for g in cat.generators():
            a, b = g[0], g[1]
            hb = hom_basis(X.module(n).values[b], Y.module(n).values[a])
            if hb.module.ngens:
                targets.append(hb)
                tkeys.append(("nat", n, g))

    def func(mats):
        f = dict(zip(keys, mats))

        def get(n, k, shape):
            return f.get((n, k), imat(shape=shape))

        outs = []
        for key in tkeys:
            if key[0] == "d":
                _, n, k = key
                dx = X.d(n).components[k].matrix
                dy = Y.d(n).components[k].matrix
                fn = get(n, k, (Y.module(n).values[k].ngens, X.module(n).values[k].ngens))
                fn1 = get(n + 1, k, (Y.module(n + 1).values[k].ngens, X.module(n + 1).values[k].ngens))
                outs.append(dy.dot(fn) - fn1.dot(dx))
            else:
                _, n, (a, b, i, j) = key
                fa = get(n, a, (Y.module(n).values[a].ngens, X.module(n).values[a].ngens))
                fb = get(n, b, (Y.module(n).values[b].ngens, X.module(n).values[b].ngens))
                ax = X.module(n).actions[a, b, i, j].matrix
                ay = Y.module(n).actions[a, b, i, j].matrix
                outs.append(fa.dot(ax) - ay.dot(fb))
        return outs

    if targets:
        op = linear_on_homs([hb for _, hb in blocks], targets, func)
        lat = kernel_lattice(op)
    else:
        lat = identity(sum(hb.module.ngens for _, hb in blocks))
    amb = direct_sum([hb.module for _, hb in blocks], cat.ring)[0]
    sq = Subquotient(amb, lat, imat(shape=(amb.ngens, 0)))
    return sq.module, blocks, sq.gens


def natural_map_from_vector(X: AComplex, Y: AComplex, blocks, vec) -> AComplexMap:
    comps = {}
    off = 0
    mats = {}
    for key, hb in blocks:
        k = hb.module.ngens
        mats[key] = hb.to_matrix(vec[off:off + k])
        off += k
    for n in sorted(set(X.degrees()) | set(Y.degrees())):
        parts = []
        for k in range(len(X.cat.ranks)):
            S, T = X.module(n).values[k], Y.module(n).values[k]
            m = mats.get((n, k), imat(shape=(T.ngens, S.ngens)))
            parts.append(ModuleMap(S, T, m, check=False))
        comps[n] = AMap(X.module(n), Y.module(n), parts)
    return AComplexMap(X, Y, comps)


def _elements(module: FGModule, gens: np.ndarray, limit: int):
    card = module.cardinality()
    if card == 0 or card > limit:
        raise ValueError(f"hom set of size {card or 'infinity'} is not enumerable (limit {limit})")
    for c in enumerate_elements(module):
        yield gens.dot(c) if gens.size else imat(shape=(gens.shape[0],))


# --------------------------------------------------------------------------
# checks

@dataclass
class AdjunctionReport:
    triangle_left: bool
    triangle_right: bool
    counts: tuple | None = None          # (|Hom(i_! X, F)|, |Hom(X, i^* F)|)
    bijective: bool | None = None
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (self.triangle_left and self.triangle_right
                and self.bijective is not False
                and (self.counts is None or self.counts[0] == self.counts[1]))


def adjunction_report(X: AComplex, F: Complex, limit: int = 2 ** 8) -> AdjunctionReport:
    cat = X.cat
    ext = extend(X)
    # ε_{i_! X} ∘ i_!(η_X) = 1
    eta = unit_map(X, ext)
    inner = extend(eta.target)
    left = counit(ext.complex, cat, inner) @ extend_map(eta, ext, inner)
    tri1 = left == ext.complex.identity()
    # i^*(ε_F) ∘ η_{i^* F} = 1
    iF = restrict(F, cat)
    eF = extend(iF)
    eta2 = unit_map(iF, eF)
    epsF = counit(F, cat, eF)
    r = restrict_map(epsF, cat)
    comp = AComplexMap(iF, iF, {n: r[n] @ eta2[n] for n in iF.degrees()})
    tri2 = comp == AComplexMap(iF, iF, {n: AMap(iF.module(n), iF.module(n),
                                                 [V.identity() for V in iF.module(n).values])
                                        for n in iF.degrees()})
    rep = AdjunctionReport(tri1, tri2)
    if cat.ring.kind == "Zmod":
        Lmod, H, Lg = _chain_map_module(ext.complex, F)
        Rmod, blocks, Rg = natural_map_module(X, iF)
        rep.counts = (Lmod.cardinality(), Rmod.cardinality())
        if max(rep.counts) <= limit:
            seen = set()
            for vec in _elements(Rmod, Rg, limit):
                alpha = natural_map_from_vector(X, iF, blocks, vec)
                f = epsF @ _reindex(extend_map(alpha, ext, eF), ext.complex)
                seen.add(tuple(int(x) for x in H.cycle_of(f)))
            rep.bijective = len(seen) == rep.counts[1] == rep.counts[0]
        else:
            rep.notes.append("hom sets too large to enumerate")
    return rep


def _reindex(f: ChainMap, source: Complex) -> ChainMap:
    return ChainMap(source, f.target, {k: f[k] for k in f.degrees()}, check=False)


def adjunction_check(X: AComplex, F: Complex, limit: int = 2 ** 8) -> bool:
    return adjunction_report(X, F, limit).ok


def full_faithfulness_check(X: AComplex, Y: AComplex, limit: int = 2 ** 8) -> bool:
    """``Hom(X, Y) -> Hom(i_! X, i_! Y)`` is a bijection (finite rings only)."""
    ex, ey = extend(X), extend(Y)
    Rmod, blocks, Rg = natural_map_module(X, Y)
    Lmod, H, _ = _chain_map_module(ex.complex, ey.complex)
    if Rmod.cardinality() != Lmod.cardinality():
        return False
    seen = set()
    for vec in _elements(Rmod, Rg, limit):
        f = extend_map(natural_map_from_vector(X, Y, blocks, vec), ex, ey)
        seen.add(tuple(int(x) for x in H.cycle_of(f)))
    return len(seen) == Rmod.cardinality()


def extends_to_representable(cat: AddCategory, k: int) -> bool:
    """``i_!(Hom(-, X_k)) ≅ X_k`` through the counit."""
    E = sphere(cat.objects[k], 0)
    ext = extend(restrict(E, cat))
    return counit(E, cat, ext).is_isomorphism()


def compact_additivity_probe(X: Complex, family: Sequence[Complex], certificate=None) -> bool:
    """``⊕_i [X, Y_i] -> [X, ⊕_i Y_i]`` is an isomorphism."""
    if certificate is not None and not certificate.verify():
        raise InvariantViolation("certificate does not verify")
    if not family:
        return True
    S, incs, _ = direct_sum_complex(list(family), X.ring)
    HS = HomComplex(X, S).complex
    target = homology_data(HS, 0).module
    pieces = [induced_map(postcompose(X, inc), 0) for inc in incs]
    src, offs = direct_sum([p.source for p in pieces], X.ring)
    m = imat(shape=(target.ngens, src.ngens))
    for p, o in zip(pieces, offs):
        m[:, o:o + p.source.ngens] = p.matrix
    return ModuleMap(src, target, m, check=False).is_isomorphism()
