"""Exact arithmetic over Z and Z/m and finitely generated modules.

A module is stored as an ordered list of cyclic generators, each with an
invariant factor: ``0`` for a free summand of the ring, ``k >= 2`` for a
summand ``Z/k``.  Elements are integer coefficient vectors on those
generators and module maps are integer matrices (rows = target generators,
columns = source generators).  Every higher construction in the package
reduces to the integer matrix routines in this module.

>>> Z = Ring.integers()
>>> M = FGModule(Z, [4])
>>> print(module_kernel(ModuleMap(M, M, [[2]]))[0])
Z/2
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Ring",
    "FGModule",
    "ModuleMap",
    "RingMismatch",
    "smith_normal_form",
    "module_kernel",
    "module_cokernel",
    "module_hom",
    "module_tensor",
    "solve_linear",
    "hom_basis",
    "tensor_basis",
    "direct_sum",
    "Subquotient",
    "imat",
]


class RingMismatch(ValueError):
    pass


# --------------------------------------------------------------------------
# integer matrices

def imat(data=None, shape=None) -> np.ndarray:
    """Integer matrix with Python-int entries (object dtype)."""
    if data is None:
        return np.zeros(shape, dtype=object)
    a = np.array(data, dtype=object)
    if shape is not None:
        a = a.reshape(shape)
    elif a.ndim == 1 and a.size == 0:
        a = a.reshape((0, 0))
    if a.ndim == 2 and a.size:
        a = np.vectorize(int, otypes=[object])(a)
    return a


def identity(n: int) -> np.ndarray:
    m = imat(shape=(n, n))
    for i in range(n):
        m[i, i] = 1
    return m


def _rows(a: np.ndarray) -> list[list[int]]:
    return [[int(x) for x in row] for row in a]


@dataclass
class _SNF:
    U: list
    Uinv: list
    D: list
    V: list
    Vinv: list
    diag: list
    rank: int


def _snf(a: np.ndarray) -> _SNF:
    m, n = a.shape
    A = _rows(a)
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    Ui = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]
    Vi = [[int(i == j) for j in range(n)] for i in range(n)]

    def row_add(i, t, q):
        # row_i += q * row_t
        A[i] = [x + q * y for x, y in zip(A[i], A[t])]
        U[i] = [x + q * y for x, y in zip(U[i], U[t])]
        for r in Ui:
            r[t] -= q * r[i]

    def col_add(j, t, q):
        # col_j += q * col_t
        for r in A:
            r[j] += q * r[t]
        for r in V:
            r[j] += q * r[t]
        Vi[t] = [x - q * y for x, y in zip(Vi[t], Vi[j])]

    def row_swap(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]
        for r in Ui:
            r[i], r[j] = r[j], r[i]

    def col_swap(i, j):
        for r in A:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]
        Vi[i], Vi[j] = Vi[j], Vi[i]

    def row_neg(i):
        A[i] = [-x for x in A[i]]
        U[i] = [-x for x in U[i]]
        for r in Ui:
            r[i] = -r[i]

    t = 0
    while t < min(m, n):
        # pivot: smallest absolute value, then lowest (row, col)
        best = None
        for i in range(t, m):
            row = A[i]
            for j in range(t, n):
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
        if best is None:
            break
        _, pi, pj = best
        if pi != t:
            row_swap(pi, t)
        if pj != t:
            col_swap(pj, t)
        while True:
            p = A[t][t]
            done = True
            for i in range(t + 1, m):
                if A[i][t]:
                    row_add(i, t, -(A[i][t] // p))
                    if A[i][t]:
                        done = False
            for j in range(t + 1, n):
                if A[t][j]:
                    col_add(j, t, -(A[t][j] // p))
                    if A[t][j]:
                        done = False
            if not done:
                best = None
                for i in range(t, m):
                    if A[i][t] and (best is None or abs(A[i][t]) < best[0]):
                        best = (abs(A[i][t]), i, t)
                for j in range(t, n):
                    if A[t][j] and (best is None or abs(A[t][j]) < best[0]):
                        best = (abs(A[t][j]), t, j)
                _, pi, pj = best
                if pi != t:
                    row_swap(pi, t)
                if pj != t:
                    col_swap(pj, t)
                continue
            # divisibility of the remaining block
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if A[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_add(t, bad, 1)
        if A[t][t] < 0:
            row_neg(t)
        t += 1
    diag = [A[i][i] for i in range(min(m, n))]
    rank = sum(1 for d in diag if d)
    return _SNF(U, Ui, A, V, Vi, diag, rank)


def smith_normal_form(matrix) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(U, D, V)`` with ``D = U @ matrix @ V`` in Smith normal form.

    ``U`` and ``V`` are unimodular, ``D`` is diagonal with non-negative
    entries ``d_1 | d_2 | ...``.  Pivoting picks the entry of smallest
    absolute value, ties broken by lowest (row, column).
    """
    a = imat(matrix)
    if a.ndim != 2:
        raise ValueError("smith_normal_form expects a 2-d matrix")
    s = _snf(a)
    m, n = a.shape
    return imat(s.U, (m, m)), imat(s.D, (m, n)), imat(s.V, (n, n))


# --------------------------------------------------------------------------
# rings and modules

@dataclass(frozen=True)
class Ring:
    kind: str
    m: int = 0

    def __post_init__(self):
        if self.kind not in ("Z", "Zmod"):
            raise ValueError(f"unknown ring kind {self.kind!r}")
        if self.kind == "Zmod" and self.m < 2:
            raise ValueError(f"modulus must be >= 2, got {self.m}")
        if self.kind == "Z" and self.m != 0:
            raise ValueError("the integers carry no modulus")

    @classmethod
    def integers(cls) -> "Ring":
        return cls("Z")

    @classmethod
    def mod(cls, m: int) -> "Ring":
        return cls("Zmod", m)

    @property
    def char(self) -> int:
        """Additive order of 1 (0 for the integers)."""
        return self.m

    @property
    def is_field(self) -> bool:
        if self.kind == "Z":
            return False
        return all(self.m % p for p in range(2, int(self.m ** 0.5) + 1))

    def __str__(self):
        return "Z" if self.kind == "Z" else f"Z/{self.m}"


def _canon_factor(ring: Ring, k: int) -> int:
    return 0 if ring.kind == "Zmod" and k == ring.m else k


@dataclass(frozen=True)
class FGModule:
    ring: Ring
    factors: tuple = ()

    def __post_init__(self):
        fs = []
        for pos, k in enumerate(self.factors):
            k = int(k)
            if k < 0:
                raise ValueError(f"factor {pos} is negative ({k})")
            if k == 1:
                raise ValueError(f"factor {pos} equals 1, which is forbidden")
            if self.ring.kind == "Zmod" and k and self.ring.m % k:
                raise ValueError(
                    f"factor {pos} ({k}) does not divide the modulus {self.ring.m}")
            fs.append(_canon_factor(self.ring, k))
        object.__setattr__(self, "factors", tuple(fs))

    @classmethod
    def free(cls, ring: Ring, rank: int) -> "FGModule":
        return cls(ring, (0,) * rank)

    @classmethod
    def zero(cls, ring: Ring) -> "FGModule":
        return cls(ring, ())

    @property
    def ngens(self) -> int:
        return len(self.factors)

    @property
    def orders(self) -> tuple:
        """Additive order of each generator; 0 means infinite."""
        m = self.ring.m
        return tuple(k if k else m for k in self.factors)

    def is_zero(self) -> bool:
        return not self.factors

    def is_free(self) -> bool:
        return all(k == 0 for k in self.factors)

    def cardinality(self) -> int:
        """Number of elements; 0 stands for infinity."""
        n = 1
        for e in self.orders:
            if e == 0:
                return 0
            n *= e
        return n

    def reduce(self, v) -> np.ndarray:
        v = imat(list(v), (self.ngens,)) if not isinstance(v, np.ndarray) else v.copy()
        for i, e in enumerate(self.orders):
            if e:
                v[i] = v[i] % e
        return v

    def invariants(self) -> tuple:
        return _normal_factors(self.ring, self.factors)

    def normalized(self) -> "FGModule":
        return FGModule(self.ring, self.invariants())

    def isomorphic(self, other: "FGModule") -> bool:
        return self.ring == other.ring and self.invariants() == other.invariants()

    def identity(self) -> "ModuleMap":
        return ModuleMap(self, self, identity(self.ngens), check=False)

    def __str__(self):
        return format_factors(self.ring, self.invariants())


@lru_cache(maxsize=None)
def _normal_factors(ring: Ring, factors: tuple) -> tuple:
    orders = [k if k else ring.m for k in factors]
    d = _snf(imat(np.diag(orders) if orders else [], (len(orders), len(orders)))).diag
    tors = sorted(_canon_factor(ring, x) for x in d if x not in (0, 1) and _canon_factor(ring, x))
    free = [0] * sum(1 for x in d if _canon_factor(ring, x) == 0)
    return tuple(tors + free)


def format_factors(ring: Ring, factors: Sequence[int]) -> str:
    free = sum(1 for k in factors if k == 0)
    parts = []
    base = str(ring)
    if free:
        parts.append(base if free == 1 else
                     (f"{base}^{free}" if ring.kind == "Z" else f"({base})^{free}"))
    parts.extend(f"Z/{k}" for k in factors if k)
    return " ⊕ ".join(parts) if parts else "0"


# --------------------------------------------------------------------------
# maps

def _reduce_rows(mat: np.ndarray, orders: Sequence[int]) -> np.ndarray:
    out = mat.copy()
    for i, e in enumerate(orders):
        if e:
            out[i] = out[i] % e
    return out


class ModuleMap:
    """A homomorphism of finitely generated modules given by an integer matrix."""

    __slots__ = ("source", "target", "matrix")

    def __init__(self, source: FGModule, target: FGModule, matrix, check: bool = True):
        if source.ring != target.ring:
            raise RingMismatch(f"{source.ring} vs {target.ring}")
        mat = imat(matrix) if not isinstance(matrix, np.ndarray) else matrix
        if mat.size == 0:
            mat = imat(shape=(target.ngens, source.ngens))
        if mat.shape != (target.ngens, source.ngens):
            raise ValueError(
                f"matrix shape {mat.shape} does not match "
                f"{target.ngens}x{source.ngens}")
        mat = _reduce_rows(mat, target.orders)
        if check:
            for j, a in enumerate(source.orders):
                if a and any(_reduce_rows(a * mat[:, j:j + 1], target.orders).flat):
                    raise ValueError(
                        f"column {j} is not killed by the order {a} of its source generator")
        self.source = source
        self.target = target
        self.matrix = mat

    @classmethod
    def zero(cls, source: FGModule, target: FGModule) -> "ModuleMap":
        return cls(source, target, imat(shape=(target.ngens, source.ngens)), check=False)

    def __call__(self, v) -> np.ndarray:
        v = imat(list(v), (self.source.ngens,)) if not isinstance(v, np.ndarray) else v
        return self.target.reduce(self.matrix.dot(v) if v.size else imat(shape=(self.target.ngens,)))

    def __matmul__(self, other: "ModuleMap") -> "ModuleMap":
        if other.target != self.source:
            raise ValueError("cannot compose: module mismatch")
        return ModuleMap(other.source, self.target, self.matrix.dot(other.matrix)
                         if self.matrix.size and other.matrix.size
                         else imat(shape=(self.target.ngens, other.source.ngens)), check=False)

    def __add__(self, other: "ModuleMap") -> "ModuleMap":
        self._same_shape(other)
        return ModuleMap(self.source, self.target, self.matrix + other.matrix, check=False)

    def __sub__(self, other: "ModuleMap") -> "ModuleMap":
        self._same_shape(other)
        return ModuleMap(self.source, self.target, self.matrix - other.matrix, check=False)

    def __neg__(self) -> "ModuleMap":
        return ModuleMap(self.source, self.target, -self.matrix, check=False)

    def __rmul__(self, k: int) -> "ModuleMap":
        return ModuleMap(self.source, self.target, k * self.matrix, check=False)

    def _same_shape(self, other):
        if other.source != self.source or other.target != self.target:
            raise ValueError("maps have different source or target")

    def __eq__(self, other):
        return (isinstance(other, ModuleMap) and self.source == other.source
                and self.target == other.target
                and np.array_equal(self.matrix, other.matrix))

    def __hash__(self):
        return hash((self.source, self.target, tuple(self.matrix.flat)))

    def is_zero(self) -> bool:
        return not any(self.matrix.flat)

    def is_injective(self) -> bool:
        return module_kernel(self)[0].is_zero()

    def is_surjective(self) -> bool:
        return module_cokernel(self)[0].is_zero()

    def is_isomorphism(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def __repr__(self):
        return f"ModuleMap({self.source}, {self.target}, {_rows(self.matrix)})"


def _relations(M: FGModule) -> np.ndarray:
    """Columns generating the relation lattice of ``M`` inside ``Z^ngens``."""
    return imat(np.diag(M.orders) if M.ngens else [], (M.ngens, M.ngens))


def _hstack(*mats) -> np.ndarray:
    rows = mats[0].shape[0]
    cols = sum(m.shape[1] for m in mats)
    out = imat(shape=(rows, cols))
    c = 0
    for m in mats:
        out[:, c:c + m.shape[1]] = m
        c += m.shape[1]
    return out


# --------------------------------------------------------------------------
# subquotients

class Subquotient:
    """The quotient ``Z/B`` of two lattices ``B <= Z`` containing the relations
    of an ambient module.

    ``gens`` holds ambient representatives of the normalized generators and
    :meth:`coords` expresses an element of ``Z`` in those generators.
    """

    def __init__(self, ambient: FGModule, zgens: np.ndarray, bgens: np.ndarray):
        g = ambient.ngens
        rel = _relations(ambient)
        self.ambient = ambient
        zall = _hstack(zgens, rel) if zgens.size else rel
        s = _snf(zall) if g else None
        r = s.rank if s else 0
        self._U = imat(s.U, (g, g)) if s else imat(shape=(0, 0))
        self._d = s.diag[:r] if s else []
        zbasis = imat(s.Uinv, (g, g))[:, :r] if s else imat(shape=(0, 0))
        for i, d in enumerate(self._d):
            zbasis[:, i] *= d
        self._r = r
        ball = _hstack(bgens, rel) if bgens.size else rel
        x = self._zcoords_matrix(ball)
        s2 = _snf(x) if r else None
        d2 = list(s2.diag) + [0] * (r - len(s2.diag)) if s2 else []
        keep = [i for i in range(r) if d2[i] != 1]
        self._U2 = imat(s2.U, (r, r)) if s2 else imat(shape=(0, 0))
        self._keep = keep
        orders = [d2[i] for i in keep]
        self.module = FGModule(ambient.ring, [_canon_factor(ambient.ring, o) for o in orders])
        if r:
            u2inv = imat(s2.Uinv, (r, r))
            self.gens = zbasis.dot(u2inv[:, keep]) if keep else imat(shape=(g, 0))
        else:
            self.gens = imat(shape=(g, 0))
        self.gens = _reduce_rows(self.gens, ambient.orders)

    def _zcoords_matrix(self, cols: np.ndarray) -> np.ndarray:
        r = self._r
        if cols.shape[1] == 0:
            return imat(shape=(r, 0))
        y = self._U.dot(cols)
        for i in range(r, y.shape[0]):
            if any(y[i]):
                raise ValueError("element is not in the subquotient's numerator")
        out = imat(shape=(r, cols.shape[1]))
        for i, d in enumerate(self._d):
            for j in range(cols.shape[1]):
                if y[i, j] % d:
                    raise ValueError("element is not in the subquotient's numerator")
                out[i, j] = y[i, j] // d
        return out

    def contains(self, v) -> bool:
        try:
            self._zcoords_matrix(imat(list(v), (len(v), 1)))
        except ValueError:
            return False
        return True

    def coords_matrix(self, cols: np.ndarray) -> np.ndarray:
        """Coordinates of several numerator elements (as columns)."""
        c = self._zcoords_matrix(cols)
        if not self._keep:
            return imat(shape=(0, cols.shape[1]))
        q = self._U2.dot(c)[self._keep, :]
        return _reduce_rows(q, self.module.orders)

    def coords(self, v) -> np.ndarray:
        v = imat(list(v), (len(v), 1))
        return self.coords_matrix(v)[:, 0]

    def inclusion(self) -> ModuleMap:
        """The generator representatives as a map into the ambient module."""
        return ModuleMap(self.module, self.ambient, self.gens, check=False)


def _integer_kernel(a: np.ndarray) -> np.ndarray:
    """Basis (as columns) of the integer solutions of ``a x = 0``."""
    n = a.shape[1]
    if n == 0:
        return imat(shape=(0, 0))
    if a.shape[0] == 0:
        return identity(n)
    s = _snf(a)
    V = imat(s.V, (n, n))
    return V[:, s.rank:]


def kernel_lattice(f: ModuleMap) -> np.ndarray:
    """Columns spanning ``{x : f(x) = 0}`` in the lifted coordinates of the source."""
    g = f.source.ngens
    if f.target.ngens == 0:
        return identity(g)
    big = _hstack(f.matrix, _relations(f.target))
    return _integer_kernel(big)[:g, :]


def module_kernel(f: ModuleMap) -> tuple[FGModule, ModuleMap]:
    """Kernel of ``f`` in invariant-factor form, with its inclusion."""
    sq = Subquotient(f.source, kernel_lattice(f), imat(shape=(f.source.ngens, 0)))
    return sq.module, sq.inclusion()


def module_cokernel(f: ModuleMap) -> tuple[FGModule, ModuleMap]:
    """Cokernel of ``f`` in invariant-factor form, with the projection."""
    n = f.target.ngens
    sq = Subquotient(f.target, identity(n), f.matrix)
    proj = ModuleMap(f.target, sq.module, sq.coords_matrix(identity(n)), check=False)
    return sq.module, proj


def cokernel_data(f: ModuleMap) -> Subquotient:
    return Subquotient(f.target, identity(f.target.ngens), f.matrix)


def solve_linear(f: ModuleMap, y) -> np.ndarray | None:
    """An ``x`` with ``f(x) = y``, or ``None``.

    The solution has all free coordinates set to zero in the Smith basis of
    the lifted system, so it is deterministic.
    """
    g = f.source.ngens
    y = imat(list(y), (f.target.ngens,)) if not isinstance(y, np.ndarray) else y
    if f.target.ngens == 0:
        return imat(shape=(g,))
    big = _hstack(f.matrix, _relations(f.target))
    s = _snf(big)
    uy = imat(s.U, big.shape[:1] * 2).dot(y)
    w = [0] * big.shape[1]
    for i in range(len(uy)):
        d = s.diag[i] if i < len(s.diag) else 0
        if d == 0:
            if uy[i]:
                return None
        else:
            if uy[i] % d:
                return None
            w[i] = uy[i] // d
    x = imat(s.V, (big.shape[1],) * 2).dot(imat(w, (len(w),)))[:g]
    return f.source.reduce(x)


# --------------------------------------------------------------------------
# direct sums, hom and tensor

def direct_sum(mods: Sequence[FGModule], ring: Ring | None = None) -> tuple[FGModule, list[int]]:
    """Direct sum and the generator offset of each summand."""
    if not mods and ring is None:
        raise ValueError("empty direct sum needs a ring")
    ring = ring or mods[0].ring
    offsets, fs = [], []
    for M in mods:
        if M.ring != ring:
            raise RingMismatch(f"{M.ring} vs {ring}")
        offsets.append(len(fs))
        fs.extend(M.factors)
    return FGModule(ring, fs), offsets


@dataclass(frozen=True)
class HomBasis:
    """Explicit basis of ``Hom(M, N)``.

    Generator ``k`` sends source generator ``pairs[k][0]`` to ``mults[k]``
    times target generator ``pairs[k][1]`` and kills the others.
    """

    source: FGModule
    target: FGModule
    pairs: tuple
    mults: tuple
    module: FGModule

    def to_matrix(self, coords) -> np.ndarray:
        out = imat(shape=(self.target.ngens, self.source.ngens))
        for (i, j), mult, c in zip(self.pairs, self.mults, coords):
            out[j, i] += mult * c
        return _reduce_rows(out, self.target.orders)

    def from_matrix(self, mat: np.ndarray) -> np.ndarray:
        mat = _reduce_rows(mat, self.target.orders)
        out = imat(shape=(len(self.pairs),))
        seen = np.zeros(mat.shape, dtype=bool)
        for k, ((i, j), mult) in enumerate(zip(self.pairs, self.mults)):
            v = mat[j, i]
            if v % mult:
                raise ValueError(f"entry ({j},{i}) is not a well-defined homomorphism")
            out[k] = v // mult
            seen[j, i] = True
        if any(mat[~seen]) if mat.size else False:
            raise ValueError("matrix is not a homomorphism between these modules")
        return self.module.reduce(out)

    def to_map(self, coords) -> ModuleMap:
        return ModuleMap(self.source, self.target, self.to_matrix(coords), check=False)


@lru_cache(maxsize=None)
def hom_basis(M: FGModule, N: FGModule) -> HomBasis:
    if M.ring != N.ring:
        raise RingMismatch(f"{M.ring} vs {N.ring}")
    ring = M.ring
    pairs, mults, fs = [], [], []
    for i, a in enumerate(M.orders):
        for j, b in enumerate(N.orders):
            if a == 0:
                mult, order = 1, b
            elif b == 0:
                continue
            else:
                g = gcd(a, b)
                if g == 1:
                    continue
                mult, order = b // g, g
            pairs.append((i, j))
            mults.append(mult)
            fs.append(_canon_factor(ring, order))
    return HomBasis(M, N, tuple(pairs), tuple(mults), FGModule(ring, fs))


def module_hom(M: FGModule, N: FGModule) -> FGModule:
    """``Hom(M, N)`` with the basis of :func:`hom_basis`."""
    return hom_basis(M, N).module


def _gcd0(*xs: int) -> int:
    g = 0
    for x in xs:
        g = gcd(g, x)
    return g


@dataclass(frozen=True)
class TensorBasis:
    """Generators of ``M_1 ⊗ ... ⊗ M_k``: surviving tuples of generator indices."""

    factors: tuple
    tuples: tuple
    index: dict = field(compare=False, hash=False)
    module: FGModule = None


@lru_cache(maxsize=None)
def tensor_basis(*mods: FGModule) -> TensorBasis:
    ring = mods[0].ring
    for M in mods:
        if M.ring != ring:
            raise RingMismatch(f"{M.ring} vs {ring}")
    tuples, fs = [], []

    def rec(prefix, order, k):
        if k == len(mods):
            if order != 1:
                tuples.append(tuple(prefix))
                fs.append(_canon_factor(ring, order))
            return
        for i, e in enumerate(mods[k].orders):
            g = _gcd0(order, e) if prefix else e
            if g == 1:
                continue
            rec(prefix + [i], g, k + 1)

    rec([], 0, 0)
    return TensorBasis(tuple(mods), tuple(tuples), {t: n for n, t in enumerate(tuples)},
                       FGModule(ring, fs))


def module_tensor(M: FGModule, N: FGModule) -> FGModule:
    """``M ⊗ N`` on the generators ``m_i ⊗ n_j`` that survive."""
    return tensor_basis(M, N).module


def map_tensor(*maps: ModuleMap) -> ModuleMap:
    """``f_1 ⊗ ... ⊗ f_k`` on the tensor bases."""
    src = tensor_basis(*(f.source for f in maps))
    tgt = tensor_basis(*(f.target for f in maps))
    out = imat(shape=(len(tgt.tuples), len(src.tuples)))
    cols = [[[(r, int(f.matrix[r, c])) for r in range(f.matrix.shape[0]) if f.matrix[r, c]]
             for c in range(f.matrix.shape[1])] for f in maps]
    for n, t in enumerate(src.tuples):
        images = [cols[k][t[k]] for k in range(len(maps))]
        _accumulate(out, tgt.index, images, n)
    return ModuleMap(src.module, tgt.module, out, check=False)


def _accumulate(out, index, images, col):
    def rec(k, key, coeff):
        if k == len(images):
            row = index.get(tuple(key))
            if row is not None:
                out[row, col] += coeff
            return
        for r, c in images[k]:
            rec(k + 1, key + [r], coeff * c)
    rec(0, [], 1)


def block_map(source_parts: Sequence[FGModule], target_parts: Sequence[FGModule],
              blocks: dict, ring: Ring) -> ModuleMap:
    """Assemble a map between direct sums from ``{(row, col): ModuleMap}`` blocks."""
    S, so = direct_sum(source_parts, ring)
    T, to = direct_sum(target_parts, ring)
    out = imat(shape=(T.ngens, S.ngens))
    for (r, c), f in blocks.items():
        if f is None:
            continue
        out[to[r]:to[r] + f.target.ngens, so[c]:so[c] + f.source.ngens] += f.matrix
    return ModuleMap(S, T, out, check=False)


def linear_on_homs(sources: Sequence[HomBasis], targets: Sequence[HomBasis], func) -> ModuleMap:
    """Matrix of a linear operator between direct sums of hom modules.

    ``func`` receives one matrix per source block (all but one zero) and
    returns one matrix per target block.
    """
    ring = (sources or targets)[0].source.ring
    S, so = direct_sum([b.module for b in sources], ring)
    T, to = direct_sum([b.module for b in targets], ring)
    out = imat(shape=(T.ngens, S.ngens))
    zeros = [imat(shape=(b.target.ngens, b.source.ngens)) for b in sources]
    for bi, b in enumerate(sources):
        for k in range(b.module.ngens):
            e = imat(shape=(b.module.ngens,))
            e[k] = 1
            args = list(zeros)
            args[bi] = b.to_matrix(e)
            images = func(args)
            for ti, (tb, img) in enumerate(zip(targets, images)):
                if img is None:
                    continue
                out[to[ti]:to[ti] + tb.module.ngens, so[bi] + k] = tb.from_matrix(img)
    return ModuleMap(S, T, out, check=False)


def element_order(M: FGModule, v) -> int:
    """Additive order of an element; 0 means infinite."""
    order = 1
    for x, e in zip(v, M.orders):
        x = int(x)
        if e == 0:
            if x:
                return 0
            continue
        order = order * (e // gcd(x % e, e)) // gcd(order, e // gcd(x % e, e))
    return order


def enumerate_elements(M: FGModule) -> Iterable[np.ndarray]:
    """All elements of a finite module."""
    if M.cardinality() == 0:
        raise ValueError("module is infinite")
    import itertools
    for t in itertools.product(*(range(e) for e in M.orders)):
        yield imat(list(t), (M.ngens,))
