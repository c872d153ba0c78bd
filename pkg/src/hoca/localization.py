"""Localization with respect to a set 𝒯 of complexes, at desk scale.

𝒯-locality is decided on a finite shift window through derived homs.  The
localization tower cones off every derived-hom class ``T'[-n] -> stage`` by
a pushout along ``T'[-n] -> Cone(1_{T'[-n]})``; the result is reported stage
by stage and never assumed to have converged.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .algebra import FGModule, ModuleMap, imat
from .complexes import (
    ChainMap,
    Complex,
    HomComplex,
    chain_kernel,
    cone,
    direct_sum_complex,
    homology,
    homology_data,
    induced_map,
    long_exact_sequence_failures,
    map_from_sum,
    map_to_sum,
    pushout,
    shift,
)
from .model import (
    DescentData,
    cofibrant_replacement,
    hom_range,
    is_fibration,
)


@dataclass
class TSet:
    """𝒯 together with certified cofibrant models ``q : T' -> T``."""

    complexes: list
    models: list = field(default_factory=list)

    @classmethod
    def build(cls, complexes: Sequence[Complex], dd: DescentData | None = None) -> "TSet":
        models = []
        for T in complexes:
            P, q, cert = cofibrant_replacement(T, dd)
            models.append((P, q, cert))
        return cls(list(complexes), models)

    def verify(self) -> bool:
        return all(cert.verify() and q.is_quasi_isomorphism() and q.source == P
                   and q.target == T
                   for T, (P, q, cert) in zip(self.complexes, self.models))


def _range(shift_range, needed: range, what: str):
    if shift_range is None:
        return needed
    have = set(shift_range)
    missing = [n for n in needed if n not in have]
    if missing:
        raise ValueError(f"{what}: shift range misses {missing}")
    return shift_range


@dataclass
class LocalWitness:
    """A nonzero class ``T'_k -> K[n]`` (as a chain map) proving non-locality."""

    index: int
    shift: int
    module: FGModule
    cls: ChainMap


def t_local_witness(K: Complex, ts: TSet, shift_range=None) -> LocalWitness | None:
    for k, (P, _, _) in enumerate(ts.models):
        for n in _range(shift_range, hom_range(P, K), "is_T_local"):
            H = HomComplex(P, K)
            hd = homology_data(H.complex, n)
            if not hd.module.is_zero():
                return LocalWitness(k, n, hd.module, H.chain_map(hd.gens[:, 0], n))
    return None


def is_T_local(K: Complex, ts: TSet, dd: DescentData | None = None, shift_range=None) -> bool:
    """``Hom_D(T, K[n]) = 0`` for every ``T`` in 𝒯 and ``n`` in range."""
    return t_local_witness(K, ts, shift_range) is None


def localized_fibration_check(p: ChainMap, ts: TSet, dd: DescentData) -> bool:
    """Fibration in the 𝒢-structure whose kernel is 𝒯-local."""
    if not is_fibration(p, dd):
        return False
    K, _ = chain_kernel(p)
    return is_T_local(K, ts)


# --------------------------------------------------------------------------
# the tower

@dataclass
class Attached:
    stage: int
    t_index: int
    shift: int
    cls: ChainMap        # T'[-n] -> stage


@dataclass
class Tower:
    stages: list
    maps: list
    log: list
    residual: list

    def composite(self, k: int | None = None) -> ChainMap:
        """Stage 0 -> stage k."""
        k = len(self.maps) if k is None else k
        f = self.stages[0].identity()
        for m in self.maps[:k]:
            f = m @ f
        return f

    def surviving_degrees(self, k: int) -> list[int]:
        """Degrees where the map from stage ``k - 1`` to stage ``k`` is nonzero on homology."""
        f = self.maps[k - 1]
        return [n for n in f.source.degrees() if not induced_map(f, n).is_zero()]

    def report(self) -> list[str]:
        lines = []
        for k, S in enumerate(self.stages):
            hs = ", ".join(f"H^{n}={homology(S, n)}" for n in S.degrees())
            lines.append(f"stage {k}: {hs or '0'}")
            if k:
                live = self.surviving_degrees(k)
                lines.append("  map from the previous stage: "
                             + (f"nonzero on H^{', H^'.join(map(str, live))}" if live
                                else "zero on homology"))
            cells = [a for a in self.log if a.stage == k]
            if cells:
                lines.append(f"  coned off {len(cells)} class(es): "
                             + ", ".join(f"T{a.t_index}[{-a.shift}]" for a in cells))
        if self.residual:
            lines.append("residual: " + ", ".join(f"T{k} shift {n}: {M}" for k, n, M in self.residual))
        else:
            lines.append("residual: none (last stage is 𝒯-local on the window)")
        return lines


def _classes(S: Complex, ts: TSet, shift_range) -> list[tuple]:
    out = []
    for k, (P, _, _) in enumerate(ts.models):
        rng = hom_range(P, S) if shift_range is None else shift_range
        H = HomComplex(P, S)
        for n in rng:
            hd = homology_data(H.complex, n)
            for c in range(hd.module.ngens):
                f = H.chain_map(hd.gens[:, c], n)            # P -> S[n]
                Pn = shift(P, -n)
                g = ChainMap(Pn, S, {p + n: f[p] for p in P.degrees()})
                out.append((k, n, hd.module, g))
    return out


def t_cell_tower(C: Complex, ts: TSet, dd: DescentData | None = None, steps: int = 1,
                 shift_range=None) -> Tower:
    stages, maps, log = [C], [], []
    S = C
    for k in range(steps):
        classes = _classes(S, ts, shift_range)
        if not classes:
            break
        sources = [g.source for _, _, _, g in classes]
        A, incs, projs = direct_sum_complex(sources, C.ring)
        f = map_from_sum(A, incs, [g for _, _, _, g in classes], S)
        Kone, u, _ = cone(A.identity())
        D, j, _ = pushout(u, f)
        if not j.is_degreewise_injective():
            raise AssertionError("tower stage map is not injective")
        for t, n, _, g in classes:
            log.append(Attached(k, t, n, g))
        stages.append(D)
        maps.append(j)
        S = D
    residual = [(t, n, M) for t, n, M, _ in _residual(S, ts, shift_range)]
    return Tower(stages, maps, log, residual)


def _residual(S, ts, shift_range):
    seen = set()
    out = []
    for t, n, M, g in _classes(S, ts, shift_range):
        if (t, n) not in seen:
            seen.add((t, n))
            out.append((t, n, M, g))
    return out


# --------------------------------------------------------------------------
# pushout squares

@dataclass
class PushoutSquare:
    """``B <-i- A -f-> C`` with pushout ``D``, ``j : C -> D``, ``g : B -> D``."""

    i: ChainMap
    f: ChainMap
    D: Complex = None
    j: ChainMap = None
    g: ChainMap = None

    def __post_init__(self):
        if self.D is None:
            self.D, self.j, self.g = pushout(self.i, self.f)


def cone_comparison(sq: PushoutSquare) -> ChainMap:
    """``Cone(i) -> Cone(j)``, ``(b, a) ↦ (g b, f a)``."""
    Ki, _, _ = cone(sq.i)
    Kj, _, _ = cone(sq.j)
    comps = {}
    for n in Ki.degrees():
        gb, fa = sq.g[n].matrix, sq.f[n + 1].matrix
        m = imat(shape=(Kj.module(n).ngens, Ki.module(n).ngens))
        m[:gb.shape[0], :gb.shape[1]] = gb
        m[gb.shape[0]:, gb.shape[1]:] = fa
        comps[n] = ModuleMap(Ki.module(n), Kj.module(n), m, check=False)
    return ChainMap(Ki, Kj, comps)


def pushout_preserves_T_equiv_probe(sq: PushoutSquare) -> bool:
    """Mayer-Vietoris exactness and the cone comparison for a pushout square
    whose left edge is degreewise injective."""
    if not sq.i.is_degreewise_injective():
        raise ValueError("left edge must be degreewise injective")
    A, B, C = sq.i.source, sq.i.target, sq.f.target
    S, incs, projs = direct_sum_complex([B, C], A.ring)
    into = map_to_sum(S, projs, incs, [sq.i, -sq.f], A)
    out = map_from_sum(S, incs, [sq.g, sq.j], sq.D)
    if long_exact_sequence_failures(into, out):
        return False
    return cone_comparison(sq).is_quasi_isomorphism()
