"""Symmetric sequences of complexes, truncated at a level ``N``.

Permutations are tuples ``g`` with ``g[i]`` the image of letter ``i`` and
``(g∘h)[i] = g[h[i]]``.  ``s_j`` swaps letters ``j`` and ``j + 1``.  A
symmetric sequence stores only the action of the ``s_j``; other elements act
through a reduced word.

Induced levels (``A{-i}`` and the Day tensor) are direct sums of copies of a
complex, one per coset of a Young subgroup.  A coset is named by the letter
sets of its blocks and represented by the shuffle that maps each block
increasingly onto its set.  Group elements carry degree zero, so moving
copies around involves no Koszul signs.
"""

from __future__ import annotations

import itertools
from math import comb
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .algebra import FGModule, ModuleMap, Ring, imat
from .complexes import (
    ChainMap,
    Complex,
    HomSpace,
    InvariantViolation,
    direct_sum_complex,
    hom_operator,
)
from .algebra import Subquotient, kernel_lattice
from .monoidal import TensorComplex, tensor_maps, unit, unitor


# --------------------------------------------------------------------------
# permutations

def compose(g: Sequence[int], h: Sequence[int]) -> tuple:
    return tuple(g[i] for i in h)


def inverse(g: Sequence[int]) -> tuple:
    out = [0] * len(g)
    for i, x in enumerate(g):
        out[x] = i
    return tuple(out)


def transposition(n: int, j: int) -> tuple:
    g = list(range(n))
    g[j], g[j + 1] = j + 1, j
    return tuple(g)


@lru_cache(maxsize=None)
def reduced_word(g: tuple) -> tuple:
    """Indices ``j_1, ..., j_k`` with ``g = s_{j_1} ∘ ... ∘ s_{j_k}``, ``k`` minimal."""
    for i in range(len(g) - 1):
        if g[i] > g[i + 1]:
            return reduced_word(compose(g, transposition(len(g), i))) + (i,)
    return ()


def shuffle(sets: Sequence[Sequence[int]]) -> tuple:
    """The permutation sending the consecutive blocks of sizes ``len(sets[k])``
    increasingly onto ``sets[k]``."""
    return tuple(x for s in sets for x in sorted(s))


def block_cycle(a: int, b: int) -> tuple:
    """Letters ``[0, a)`` go to ``[b, a + b)`` and ``[a, a + b)`` to ``[0, b)``."""
    return tuple(b + i for i in range(a)) + tuple(range(b))


def shifted(g: Sequence[int], k: int, n: int | None = None) -> tuple:
    """``g`` acting on the letters ``[k, k + len(g))`` of ``n`` letters."""
    n = len(g) + k if n is None else n
    out = list(range(n))
    for i, x in enumerate(g):
        out[k + i] = k + x
    return tuple(out)


# --------------------------------------------------------------------------
# direct sums of copies

class Level:
    """``⊕_key V_key`` with the block offsets of each copy."""

    def __init__(self, ring: Ring, parts: Sequence[tuple]):
        self.ring = ring
        self.keys = [k for k, _ in parts]
        self.parts = dict(parts)
        if parts:
            self.complex, incs, projs = direct_sum_complex([V for _, V in parts], ring)
        else:
            self.complex, incs, projs = Complex.zero(ring), [], []
        self.inc = dict(zip(self.keys, incs))
        self.proj = dict(zip(self.keys, projs))
        self.offsets = {}
        for n in self.complex.degrees():
            off = 0
            for k in self.keys:
                self.offsets[k, n] = off
                off += self.parts[k].module(n).ngens

    def split(self, n: int, g: int) -> tuple:
        """Generator ``g`` in degree ``n`` as ``(key, index in the copy)``."""
        for k in self.keys:
            size = self.parts[k].module(n).ngens
            off = self.offsets[k, n]
            if off <= g < off + size:
                return k, g - off
        raise IndexError(g)

    def index(self, key, n: int, i: int) -> int:
        return self.offsets[key, n] + i


def block_chain(src: Level, tgt: Level, blocks: dict) -> ChainMap:
    """Assemble ``{(key_src, key_tgt): ChainMap V -> W}`` into ``src -> tgt``."""
    S, T = src.complex, tgt.complex
    comps = {}
    for n in S.degrees():
        m = imat(shape=(T.module(n).ngens, S.module(n).ngens))
        for (ks, kt), f in blocks.items():
            a, b = f.source.module(n).ngens, f.target.module(n).ngens
            if not a or not b:
                continue
            r, c = tgt.offsets[kt, n], src.offsets[ks, n]
            m[r:r + b, c:c + a] += f[n].matrix
        comps[n] = ModuleMap(S.module(n), T.module(n), m, check=False)
    return ChainMap(S, T, comps, check=False)


# --------------------------------------------------------------------------
# symmetric sequences

class SymSeq:
    """Levels ``X_0, ..., X_N`` with the actions of ``s_0, ..., s_{n-2}`` on ``X_n``.

    ``layouts[n]`` optionally records how a level was built (a :class:`Level`
    for induced levels, a :class:`TensorComplex` for tensor powers).
    """

    def __init__(self, ring: Ring, levels: Sequence[Complex], actions: Sequence[Sequence[ChainMap]],
                 check: bool = True, layouts: Sequence | None = None):
        self.ring = ring
        self.levels = list(levels)
        self.actions = [list(a) for a in actions]
        self.layouts = list(layouts) if layouts is not None else [None] * len(self.levels)
        self._memo: dict = {}
        if len(self.actions) != len(self.levels):
            raise ValueError("one action list per level")
        for n, (X, acts) in enumerate(zip(self.levels, self.actions)):
            if len(acts) != max(n - 1, 0):
                raise ValueError(f"level {n} needs {max(n - 1, 0)} generators, got {len(acts)}")
            for a in acts:
                if a.source != X or a.target != X:
                    raise InvariantViolation(f"action at level {n} is not an endomorphism")
        if check:
            bad = self.coxeter_failures()
            if bad:
                raise InvariantViolation(f"Coxeter relations fail: {bad[:3]}")

    @property
    def N(self) -> int:
        return len(self.levels) - 1

    def act(self, n: int, g: Sequence[int]) -> ChainMap:
        g = tuple(g)
        if len(g) != n:
            raise ValueError(f"permutation of {len(g)} letters at level {n}")
        key = (n, g)
        if key not in self._memo:
            f = self.levels[n].identity()
            for j in reduced_word(g):
                f = f @ self.actions[n][j]
            self._memo[key] = f
        return self._memo[key]

    def coxeter_failures(self) -> list[tuple]:
        out = []
        for n, acts in enumerate(self.actions):
            one = self.levels[n].identity()
            for i, a in enumerate(acts):
                if a @ a != one:
                    out.append((n, "s^2", i))
                if i + 1 < len(acts):
                    b = acts[i + 1]
                    ab = a @ b
                    if ab @ ab @ ab != one:
                        out.append((n, "braid", i))
                for j in range(i + 2, len(acts)):
                    if a @ acts[j] != acts[j] @ a:
                        out.append((n, "commute", i, j))
        return out

    def truncate(self, N: int) -> "SymSeq":
        return SymSeq(self.ring, self.levels[:N + 1], self.actions[:N + 1], check=False,
                      layouts=self.layouts[:N + 1])

    def identity(self) -> list[ChainMap]:
        return [X.identity() for X in self.levels]

    def __eq__(self, other):
        return (isinstance(other, SymSeq) and self.levels == other.levels
                and all(a == b for x, y in zip(self.actions, other.actions) for a, b in zip(x, y)))

    def __str__(self):
        return "\n".join(f"level {n}: ranks {[X.module(k).ngens for k in X.degrees()]}"
                         f" in degrees {X.degrees()}" for n, X in enumerate(self.levels))


def concentrated(X: Complex, N: int) -> SymSeq:
    """``X{0}``: ``X`` at level 0, zero above."""
    Z = Complex.zero(X.ring)
    levels = [X] + [Z] * N
    return SymSeq(X.ring, levels, [[Z.identity()] * max(n - 1, 0) if n else [] for n in range(N + 1)])


def zero_sequence(ring: Ring, N: int) -> SymSeq:
    Z = Complex.zero(ring)
    return SymSeq(ring, [Z] * (N + 1), [[Z.identity()] * max(n - 1, 0) for n in range(N + 1)])


def equivariance_failures(f: Sequence[ChainMap], X: SymSeq, Y: SymSeq) -> list[tuple]:
    """Levels ``n`` and generators ``s_j`` where ``f_n ρ(s_j) != ρ(s_j) f_n``."""
    out = []
    for n, fn in enumerate(f):
        if fn.source != X.levels[n] or fn.target != Y.levels[n]:
            out.append((n, "shape"))
            continue
        for j in range(n - 1):
            if fn @ X.actions[n][j] != Y.actions[n][j] @ fn:
                out.append((n, j))
    return out


def is_equivariant(f, X: SymSeq, Y: SymSeq) -> bool:
    return not equivariance_failures(f, X, Y)


def compose_families(g: Sequence[ChainMap], f: Sequence[ChainMap]) -> list[ChainMap]:
    return [a @ b for a, b in zip(g, f)]


def equivariant_maps(X: Complex, Y: Complex, gens_X: Sequence[ChainMap],
                     gens_Y: Sequence[ChainMap]) -> tuple[FGModule, HomSpace, np.ndarray]:
    """The module of chain maps ``X -> Y`` commuting with paired generators.

    Returns the module, the ambient :class:`HomSpace` and the kernel lattice
    (columns are ambient coordinate vectors).
    """
    H0, H1 = HomSpace(X, Y, 0), HomSpace(X, Y, 1)
    dX = {p: X.d(p).matrix for p in X.degrees()}
    dY = {p: Y.d(p).matrix for p in Y.degrees()}

    def op(fam):
        d = {}
        for p, m in fam.items():
            if p + 1 in dY:
                d[p] = dY[p].dot(m)
        for p in X.degrees():
            if p in dX and p + 1 in fam:
                term = -fam[p + 1].dot(dX[p])
                d[p] = d[p] + term if p in d else term
        outs = [d]
        for a, b in zip(gens_X, gens_Y):
            e = {}
            for p, m in fam.items():
                e[p] = m.dot(a[p].matrix) - b[p].matrix.dot(m)
            outs.append(e)
        return outs

    targets = [H1] + [H0] * len(gens_X)
    f = hom_operator(H0, targets, op)
    lat = kernel_lattice(f)
    sq = Subquotient(H0.module, lat, imat(shape=(H0.module.ngens, 0)))
    return sq.module, H0, sq.gens


# --------------------------------------------------------------------------
# shifts

def seq_shift_up(A: SymSeq, i: int) -> SymSeq:
    """``A{i}``: level ``n`` is ``A_{n+i}`` restricted to the first ``n`` letters."""
    if i < 0:
        return seq_shift_down(A, -i)
    levels = A.levels[i:]
    actions = [A.actions[n + i][:max(n - 1, 0)] for n in range(len(levels))]
    return SymSeq(A.ring, levels, actions, check=False)


def down_rep(n: int, t: Sequence[int]) -> tuple:
    """Coset representative for the injective tuple ``t`` (images of the last letters)."""
    rest = [x for x in range(n) if x not in t]
    return tuple(rest) + tuple(t)


def seq_shift_down(A: SymSeq, i: int, N: int | None = None) -> SymSeq:
    """``A{-i}``: level ``n`` is induced from ``A_{n-i}`` along the first ``n - i`` letters.

    Copies are indexed by injective tuples ``t`` (the images of the last ``i``
    letters) in lexicographic order.
    """
    if i < 0:
        return seq_shift_up(A, -i)
    N = A.N if N is None else N
    levels, actions, layouts = [], [], []
    for n in range(N + 1):
        if n - i < 0 or n - i > A.N:
            lev = Level(A.ring, [])
            levels.append(lev.complex)
            actions.append([lev.complex.identity()] * max(n - 1, 0))
            layouts.append(lev)
            continue
        V = A.levels[n - i]
        keys = list(itertools.permutations(range(n), i))
        lev = Level(A.ring, [(t, V) for t in keys])
        acts = []
        for j in range(n - 1):
            blocks = {}
            for t in keys:
                if j in t or j + 1 in t:
                    t2 = tuple(j + 1 if x == j else j if x == j + 1 else x for x in t)
                    blocks[t, t2] = V.identity()
                else:
                    rest = [x for x in range(n) if x not in t]
                    a = rest.index(j)
                    blocks[t, t] = A.actions[n - i][a]
            acts.append(block_chain(lev, lev, blocks))
        levels.append(lev.complex)
        actions.append(acts)
        layouts.append(lev)
    return SymSeq(A.ring, levels, actions, check=False, layouts=layouts)


def _down_element(lev: Level, A: SymSeq, n: int, i: int, g: Sequence[int]) -> ChainMap:
    """``v ↦ g ⊗ v`` from ``A_{n-i}`` into ``A{-i}_n``."""
    t = tuple(g[n - i:])
    h = compose(inverse(down_rep(n, t)), g)[:n - i]
    return lev.inc[t] @ A.act(n - i, h)


def shift_down_unit(A: SymSeq, i: int) -> list[ChainMap]:
    """``η : A -> A{-i}{i}``, ``v ↦ 1 ⊗ v``."""
    D = seq_shift_down(A, i, A.N + i)
    out = []
    for m in range(A.N + 1):
        n = m + i
        out.append(D.layouts[n].inc[tuple(range(m, n))])
    return out


def shift_down_counit(B: SymSeq, i: int) -> list[ChainMap]:
    """``ε : B{i}{-i} -> B``, ``g ⊗ v ↦ g·v``."""
    D = seq_shift_down(seq_shift_up(B, i), i, B.N)
    out = []
    for n in range(B.N + 1):
        lev = D.layouts[n]
        f = ChainMap(lev.complex, B.levels[n], {})
        for t in lev.keys:
            f = f + B.act(n, down_rep(n, t)) @ lev.proj[t]
        out.append(f)
    return out


def adjoint_down_to_up(phi: Sequence[ChainMap], A: SymSeq, B: SymSeq, i: int) -> list[ChainMap]:
    """``A{-i} -> B`` to ``A -> B{i}``: restrict to the identity coset."""
    D = seq_shift_down(A, i, B.N)
    return [phi[m + i] @ D.layouts[m + i].inc[tuple(range(m, m + i))]
            for m in range(B.N - i + 1)]


def adjoint_up_to_down(psi: Sequence[ChainMap], A: SymSeq, B: SymSeq, i: int) -> list[ChainMap]:
    """``A -> B{i}`` to ``A{-i} -> B``: ``g ⊗ v ↦ g·ψ(v)``."""
    D = seq_shift_down(A, i, B.N)
    out = []
    for n in range(B.N + 1):
        lev = D.layouts[n]
        f = ChainMap(lev.complex, B.levels[n], {})
        for t in lev.keys:
            f = f + B.act(n, down_rep(n, t)) @ psi[n - i] @ lev.proj[t]
        out.append(f)
    return out


def shift_down_composite_iso(A: SymSeq, i: int, j: int, N: int | None = None) -> list[ChainMap]:
    """``A{-i}{-j} ≅ A{-i-j}``, ``g ⊗ (g' ⊗ v) ↦ (g∘g') ⊗ v``."""
    N = A.N if N is None else N
    inner = seq_shift_down(A, i, N)
    outer = seq_shift_down(inner, j, N)
    both = seq_shift_down(A, i + j, N)
    out = []
    for n in range(N + 1):
        lev_o, lev_b = outer.layouts[n], both.layouts[n]
        f = ChainMap(lev_o.complex, lev_b.complex, {})
        for t in lev_o.keys:
            lev_i = inner.layouts[n - j]
            for t2 in lev_i.keys:
                g = compose(down_rep(n, t), shifted(down_rep(n - j, t2), 0, n))
                f = f + _down_element(lev_b, A, n, i + j, g) @ lev_i.proj[t2] @ lev_o.proj[t]
        out.append(f)
    return out


# --------------------------------------------------------------------------
# Day tensor

class DayTensor:
    """``E ⊗^𝔖 F``; level ``n`` is ``⊕_{p+q=n} ⊕_P E_p ⊗ F_q`` with ``P`` the
    letters carrying ``E`` (the ``E`` block comes first in the Young subgroup)."""

    def __init__(self, E: SymSeq, F: SymSeq, N: int | None = None):
        if E.ring != F.ring:
            raise ValueError("ring mismatch")
        self.E, self.F = E, F
        self.N = min(E.N, F.N) if N is None else N
        self.tensors: dict[tuple, TensorComplex] = {}
        levels, actions, layouts = [], [], []
        for n in range(self.N + 1):
            parts = []
            for p in range(n + 1):
                q = n - p
                if p > E.N or q > F.N:
                    continue
                T = self._tensor(p, q)
                if T is None:
                    continue
                for P in itertools.combinations(range(n), p):
                    parts.append(((p, P), T.complex))
            lev = Level(E.ring, parts)
            acts = []
            for j in range(n - 1):
                blocks = {}
                for key in lev.keys:
                    p, P = key
                    V = lev.parts[key]
                    a, b = j in P, j + 1 in P
                    if a != b:
                        P2 = tuple(sorted(j + 1 if x == j else j if x == j + 1 else x for x in P))
                        blocks[key, (p, P2)] = V.identity()
                    elif a:
                        k = P.index(j)
                        blocks[key, key] = tensor_maps(E.actions[p][k], F.levels[n - p].identity())
                    else:
                        Q = [x for x in range(n) if x not in P]
                        k = Q.index(j)
                        blocks[key, key] = tensor_maps(E.levels[p].identity(), F.actions[n - p][k])
                acts.append(block_chain(lev, lev, blocks))
            levels.append(lev.complex)
            actions.append(acts)
            layouts.append(lev)
        self.seq = SymSeq(E.ring, levels, actions, check=False, layouts=layouts)

    def _tensor(self, p, q):
        if (p, q) not in self.tensors:
            X, Y = self.E.levels[p], self.F.levels[q]
            self.tensors[p, q] = None if X.is_zero() or Y.is_zero() else TensorComplex([X, Y])
        return self.tensors[p, q]

    def level(self, n: int) -> Level:
        return self.seq.layouts[n]

    def labels(self, n: int, k: int) -> list[tuple]:
        """Generator labels ``(P, Q, degrees, indices)`` in degree ``k`` of level ``n``."""
        lev = self.level(n)
        out = []
        for key in lev.keys:
            p, P = key
            Q = tuple(x for x in range(n) if x not in P)
            for ptuple, t in self.tensors[p, n - p].generators(k):
                out.append((P, Q, ptuple, t))
        return out

    def embed(self, n: int, p: int, P: Sequence[int]) -> ChainMap:
        return self.level(n).inc[p, tuple(P)]


def day_tensor(E: SymSeq, F: SymSeq, N: int | None = None) -> DayTensor:
    return DayTensor(E, F, N)


def day_map(D: DayTensor, G: SymSeq, family: Callable[[int, int], ChainMap]) -> list[ChainMap]:
    """The map ``E ⊗^𝔖 F -> G`` determined by equivariant ``E_p ⊗ F_q -> G_{p+q}``:
    ``g_P ⊗ v ↦ g_P · f(v)``."""
    out = []
    for n in range(D.N + 1):
        lev = D.level(n)
        f = ChainMap(lev.complex, G.levels[n], {})
        for key in lev.keys:
            p, P = key
            Q = [x for x in range(n) if x not in P]
            f = f + G.act(n, shuffle([P, Q])) @ family(p, n - p) @ lev.proj[key]
        out.append(f)
    return out


def day_tensor_maps(D1: DayTensor, D2: DayTensor, f: Sequence[ChainMap],
                    g: Sequence[ChainMap]) -> list[ChainMap]:
    """``f ⊗ g``, copy by copy."""
    out = []
    for n in range(min(D1.N, D2.N) + 1):
        l1, l2 = D1.level(n), D2.level(n)
        blocks = {}
        for key in l1.keys:
            if key in l2.parts:
                p, _ = key
                blocks[key, key] = tensor_maps(f[p], g[n - p])
        out.append(block_chain(l1, l2, blocks))
    return out


def _relabel(src: Level, tgt: Level, src_labels, tgt_labels) -> ChainMap:
    """Signed generator bijection; labels map generator -> (label, sign)."""
    S, T = src.complex, tgt.complex
    comps = {}
    for k in S.degrees():
        index = {lab: r for r, lab in enumerate(tgt_labels(k))}
        m = imat(shape=(T.module(k).ngens, S.module(k).ngens))
        for c, (lab, sign) in enumerate(src_labels(k)):
            if lab not in index:
                raise InvariantViolation(f"generator {lab} has no partner")
            m[index[lab], c] = sign
        comps[k] = ModuleMap(S.module(k), T.module(k), m, check=False)
    return ChainMap(S, T, comps)


def day_braiding(E: SymSeq, F: SymSeq, N: int | None = None) -> list[ChainMap]:
    """``E ⊗^𝔖 F -> F ⊗^𝔖 E``: the copy on ``(P, Q)`` goes to ``(Q, P)`` with
    the Koszul sign."""
    A, B = DayTensor(E, F, N), DayTensor(F, E, N)
    out = []
    for n in range(A.N + 1):
        src = lambda k, n=n: [((Q, P, (b, a), (j, i)), (-1) ** (a * b))
                              for P, Q, (a, b), (i, j) in A.labels(n, k)]
        tgt = lambda k, n=n: B.labels(n, k)
        out.append(_relabel(A.level(n), B.level(n), src, tgt))
    return out


def day_unit(E: SymSeq) -> SymSeq:
    """``𝟙{0}``, the unit for the Day tensor (truncated like ``E``)."""
    return concentrated(unit(E.ring), E.N)


def day_unitor(E: SymSeq) -> list[ChainMap]:
    """``𝟙{0} ⊗^𝔖 E -> E``."""
    D = DayTensor(day_unit(E), E)
    out = []
    for n in range(D.N + 1):
        lev = D.level(n)
        f = unitor(E.levels[n])
        comps = {k: f[k] for k in lev.complex.degrees()}
        out.append(ChainMap(lev.complex, E.levels[n], comps, check=False))
    return out


def day_associator(E: SymSeq, F: SymSeq, G: SymSeq, N: int | None = None):
    """``(E ⊗ F) ⊗ G -> E ⊗ (F ⊗ G)``; returns the two Day tensors and the maps.

    A generator is named by the letter sets ``X, Y, Z`` of the three factors
    and the flat degree and index tuples."""
    EF = DayTensor(E, F, N)
    L = DayTensor(EF.seq, G, N)
    FG = DayTensor(F, G, N)
    R = DayTensor(E, FG.seq, N)

    def left(n, k):
        out = []
        for P1, Z, (a, c), (i, j) in L.labels(n, k):
            P2, Q2, (a1, b1), (i1, i2) = EF.labels(len(P1), a)[i]
            X = tuple(P1[x] for x in P2)
            Y = tuple(P1[x] for x in Q2)
            out.append(((X, Y, Z, (a1, b1, c), (i1, i2, j)), 1))
        return out

    def right(n, k):
        out = []
        for X, YZ, (a, b), (i, j) in R.labels(n, k):
            P2, Q2, (b1, c1), (j1, j2) = FG.labels(len(YZ), b)[j]
            Y = tuple(YZ[x] for x in P2)
            Z = tuple(YZ[x] for x in Q2)
            out.append((X, Y, Z, (a, b1, c1), (i, j1, j2)))
        return out

    maps = [_relabel(L.level(n), R.level(n), lambda k, n=n: left(n, k),
                     lambda k, n=n: right(n, k)) for n in range(L.N + 1)]
    return L, R, maps


def day_rank(E: SymSeq, F: SymSeq, n: int) -> int:
    """``Σ_{p+q=n} C(n, p) rank(E_p ⊗ F_q)``, summed over degrees."""
    total = 0
    for p in range(n + 1):
        q = n - p
        if p > E.N or q > F.N:
            continue
        X, Y = E.levels[p], F.levels[q]
        if X.is_zero() or Y.is_zero():
            continue
        total += comb(n, p) * TensorComplex([X, Y]).complex.total_rank()
    return total


def free_shift_tensor_iso(X: Complex, Y: Complex, i: int, j: int, N: int | None = None):
    """``X{-i} ⊗^𝔖 Y{-j} -> (X ⊗ Y){-i-j}``; returns source, target and the maps.

    The copy ``(P, a, b)`` goes to the copy ``g_P ∘ (a × b)``.
    """
    N = i + j if N is None else N
    Xi = seq_shift_down(concentrated(X, N), i, N)
    Yj = seq_shift_down(concentrated(Y, N), j, N)
    D = DayTensor(Xi, Yj, N)
    T = seq_shift_down(concentrated(TensorComplex([X, Y]).complex, N), i + j, N)
    XY = TensorComplex([X, Y])
    maps = []
    for n in range(N + 1):
        src_lev, tgt_lev = D.level(n), T.layouts[n]

        def src(k, n=n):
            out = []
            for P, Q, (a, b), (gi, gj) in D.labels(n, k):
                ka, x = Xi.layouts[len(P)].split(a, gi)
                kb, y = Yj.layouts[len(Q)].split(b, gj)
                g = compose(shuffle([P, Q]), ka + tuple(len(P) + v for v in kb))
                out.append(((g, (a, b), (x, y)), 1))
            return out

        def tgt(k, n=n):
            out = []
            for g in tgt_lev.keys:
                for ptuple, t in XY.generators(k):
                    out.append((g, ptuple, t))
            return out

        maps.append(_relabel(src_lev, tgt_lev, src, tgt))
    return D.seq, T, maps
