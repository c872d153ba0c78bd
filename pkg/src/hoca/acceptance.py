"""The ten acceptance criteria, shared by the test suite and ``hoca selftest``.

Each criterion returns a :class:`Result`; nothing here is cached between
criteria, so every run recomputes from the seed.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from math import comb

import numpy as np

from .algebra import FGModule, Ring, imat, module_kernel
from .complexes import (
    ChainMap,
    Complex,
    HomComplex,
    cone,
    cylinder,
    direct_sum_complex,
    homology,
    homotopy_classes,
    induced_map,
    long_exact_sequence_failures,
    map_from_sum,
    map_to_sum,
    pushout,
    short_exact_failures,
    sphere,
    sphere_disk_inclusion,
    zero_map,
)
from .localization import TSet, is_T_local, t_cell_tower, t_local_witness
from .model import DescentData, LiftSquare, derived_hom, factorize, generating_trivial_cofibrations, solve_lifting
from .monoidal import TensorComplex, monoid_axiom_probe
from .presentation import (
    AddCategory,
    adjunction_report,
    compact_additivity_probe,
    extends_to_representable,
    restrict,
)
from .randomgen import random_chain_map, random_complex, rng
from .spectra import (
    Spectrum,
    is_weak_omega_spectrum,
    ring_spectrum_failures,
    shift_spectrum,
    suspension_map,
    sym_ring,
    sym_sequence,
    validate_spectrum,
)
from .symseq import (
    DayTensor,
    SymSeq,
    concentrated,
    equivariance_failures,
    free_shift_tensor_iso,
    seq_shift_down,
)

Z = Ring.integers()
F2 = Ring("Zmod", 2)


@dataclass
class Result:
    number: int
    name: str
    ok: bool
    detail: str
    seconds: float

    def line(self) -> str:
        # no timings here: reports must be byte-identical across runs
        return f"{'PASS' if self.ok else 'FAIL'} criterion {self.number}: {self.name} ({self.detail})"


def _timed(number, name, func, *args):
    t0 = time.perf_counter()
    ok, detail = func(*args)
    seconds = time.perf_counter() - t0
    limit = TIME_LIMITS.get(number)
    if limit is not None:
        within = seconds < limit
        detail += f"; {'within' if within else 'over'} the {limit} s budget"
        ok = ok and within
    return Result(number, name, ok, detail, seconds)


def d_squared_failures(C: Complex) -> list[int]:
    """Degrees where ``d^{n+1} ∘ d^n != 0``, computed afresh."""
    return [n for n in C.degrees() if not (C.d(n + 1) @ C.d(n)).is_zero()]


# --------------------------------------------------------------------------
# 1. signs

def sign_suite(seed=None, count: int = 500):
    r = rng(seed)
    bad = []
    for k in range(count):
        ring = Z if k % 2 == 0 else F2
        X = random_complex(r, ring)
        Y = random_complex(r, ring)
        f = random_chain_map(r, X, Y)
        checks = {
            "cone": cone(f)[0],
            "cyl": cylinder(X)[0],
            "tensor": TensorComplex([X, Y]).complex,
            "hom": HomComplex(X, Y).complex,
        }
        if k % 5 == 0:
            E = seq_shift_down(concentrated(X, 2), 1, 2)
            F = seq_shift_down(concentrated(Y, 2), 1, 2)
            checks["day"] = DayTensor(E, F).seq.levels[2]
        for name, C in checks.items():
            if d_squared_failures(C):
                bad.append((k, name))
    return not bad, f"{count} instances, {len(bad)} failures"


# --------------------------------------------------------------------------
# 2. exactness

def exactness_suite(seed=None, count: int = 200):
    r = rng(seed)
    bad = []
    for k in range(count):
        ring = Z if k % 2 == 0 else F2
        X, Y, W = (random_complex(r, ring) for _ in range(3))
        f = random_chain_map(r, X, Y)
        K, u, v = cone(f)
        if short_exact_failures(u, v) or long_exact_sequence_failures(u, v):
            bad.append((k, "cone"))
        # a degreewise injective i = (1, g) : X -> X ⊕ W and a pushout along h
        g = random_chain_map(r, X, W)
        S, incs, projs = direct_sum_complex([X, W], ring)
        i = map_to_sum(S, projs, incs, [X.identity(), g], X)
        h = random_chain_map(r, X, Y)
        D, j, gg = pushout(i, h)
        if gg @ i != j @ h:
            bad.append((k, "square"))
            continue
        T, tincs, tprojs = direct_sum_complex([S, Y], ring)
        into = map_to_sum(T, tprojs, tincs, [i, -h], X)
        out = map_from_sum(T, tincs, [gg, j], D)
        if short_exact_failures(into, out) or long_exact_sequence_failures(into, out):
            bad.append((k, "pushout"))
    return not bad, f"{count} instances, {len(bad)} failures"


# --------------------------------------------------------------------------
# 3. homotopy classes against brute force over F2

def _families(X: Complex, Y: Complex, shift: int):
    """Every family ``X^p -> Y^{p+shift}`` of F2 matrices."""
    shapes = [(p, Y.module(p + shift).ngens, X.module(p).ngens) for p in X.degrees()]
    shapes = [s for s in shapes if s[1] and s[2]]
    sizes = [a * b for _, a, b in shapes]
    for bits in itertools.product((0, 1), repeat=sum(sizes)):
        fam, off = {}, 0
        for (p, a, b), sz in zip(shapes, sizes):
            fam[p] = np.array(bits[off:off + sz], dtype=object).reshape(a, b) if sz else imat(shape=(a, b))
            off += sz
        yield fam


def _mat(C, n):
    return C.d(n).matrix


def brute_homotopy_count(X: Complex, Y: Complex) -> int:
    def get(fam, p, rows, cols):
        return fam.get(p, imat(shape=(rows, cols)))

    degs = sorted(set(X.degrees()) | set(Y.degrees()) | {n - 1 for n in X.degrees()})
    cycles = 0
    for fam in _families(X, Y, 0):
        ok = True
        for p in degs:
            f0 = get(fam, p, Y.module(p).ngens, X.module(p).ngens)
            f1 = get(fam, p + 1, Y.module(p + 1).ngens, X.module(p + 1).ngens)
            lhs = _mat(Y, p).dot(f0) if f0.size and _mat(Y, p).size else imat(shape=(Y.module(p + 1).ngens, X.module(p).ngens))
            rhs = f1.dot(_mat(X, p)) if f1.size and _mat(X, p).size else imat(shape=(Y.module(p + 1).ngens, X.module(p).ngens))
            if any(int(x) % 2 for x in (lhs - rhs).flat):
                ok = False
                break
        cycles += ok
    boundaries = set()
    for s in _families(X, Y, -1):
        key = []
        for p in X.degrees():
            a, b = Y.module(p).ngens, X.module(p).ngens
            t = imat(shape=(a, b))
            sp = s.get(p)
            if sp is not None and _mat(Y, p - 1).size:
                t = t + _mat(Y, p - 1).dot(sp)
            sq = s.get(p + 1)
            if sq is not None and _mat(X, p).size:
                t = t + sq.dot(_mat(X, p))
            key.extend(int(x) % 2 for x in t.flat)
        boundaries.add(tuple(key))
    return cycles // len(boundaries)


def homotopy_oracle(seed=None, count: int = 50):
    r = rng(seed)
    done, bad = 0, []
    while done < count:
        X = random_complex(r, F2, max_rank=2, max_length=3)
        Y = random_complex(r, F2, max_rank=2, max_length=3)
        if X.total_rank() + Y.total_rank() > 6:
            continue
        got = homotopy_classes(X, Y, 0).cardinality()
        want = brute_homotopy_count(X, Y)
        if got != want:
            bad.append((done, got, want))
        done += 1
    return not bad, f"{count} instances, {len(bad)} mismatches"


# --------------------------------------------------------------------------
# 4. derived homs

def derived_hom_oracle():
    bad = []
    R = FGModule.free(Z, 1)
    for p in (2, 3, 5):
        M = FGModule(Z, [p])
        X = sphere(M, 0)
        hand = Complex(Z, {-1: R, 0: R}, {-1: [[p]]})
        for n in range(-2, 4):
            want = FGModule(Z, [p]) if n in (0, 1) else FGModule.zero(Z)
            a = derived_hom(X, X, n)
            b = homotopy_classes(hand, X, n)
            if not (a.isomorphic(want) and b.isomorphic(want)):
                bad.append((p, n, str(a), str(b)))
    return not bad, f"p in 2, 3, 5 and n in -2..3, {len(bad)} mismatches"


# --------------------------------------------------------------------------
# 5. lifting and factorization

def _random_square(r, X: Complex, p: ChainMap, n: int):
    Y = p.source
    one = FGModule.free(Z, 1)
    i = sphere_disk_inclusion(one, n)
    xs = imat([r.randint(-3, 3) for _ in range(Y.module(n).ngens)], (Y.module(n).ngens,))
    # a random element of the kernel of p in degree n
    K, inc = module_kernel(p[n])
    k = inc.matrix.dot(imat([r.randint(-2, 2) for _ in range(K.ngens)], (K.ngens,))) if K.ngens else 0 * xs
    y = Y.module(n + 1).reduce(Y.d(n).matrix.dot(xs + k)) if Y.module(n + 1).ngens else imat(shape=(0,))
    x = X.module(n).reduce(p[n].matrix.dot(xs)) if X.module(n).ngens else imat(shape=(0,))
    dx = X.module(n + 1).reduce(X.d(n).matrix.dot(x)) if X.module(n + 1).ngens else imat(shape=(0,))
    top = ChainMap(i.source, Y, {n + 1: imat(list(y), (len(y), 1))})
    bottom = ChainMap(i.target, X, {n: imat(list(x), (len(x), 1)), n + 1: imat(list(dx), (len(dx), 1))})
    return LiftSquare(i, p, top, bottom)


def lifting_suite(seed=None, count: int = 60):
    r = rng(seed)
    bad, squares = [], 0
    for k in range(count):
        X = random_complex(r, Z)
        if k % 2:
            Cyl, _, _, sigma = cylinder(X)
            p = sigma
        else:
            W = random_complex(r, Z)
            A = cone(W.identity())[0]
            S, incs, projs = direct_sum_complex([X, A], Z)
            p = projs[0]
        lo, hi = min(p.source.degrees() or [0]), max(p.source.degrees() or [0])
        for n in range(lo - 1, hi + 1):
            sq = _random_square(r, X, p, n)
            squares += 1
            h = solve_lifting(sq)
            if h is None or not sq.is_lift(h):
                bad.append((k, n))
    cells = []
    for q in (2, 3, 5):
        T = sphere(FGModule(Z, [q]), 0)
        i, cert, pmap = factorize(zero_map(Complex.zero(Z), T), DescentData.modules(Z), max_cells=10)
        P = i.target
        two_term = len(P.degrees()) == 2 and all(P.module(n).is_free() for n in P.degrees())
        ok = cert.verify() and cert.cell_count() <= 10 and pmap.is_quasi_isomorphism() and two_term
        cells.append(cert.cell_count())
        if not ok:
            bad.append(("factorize", q))
    return not bad, f"{squares} squares lifted, factorizations used {cells} cells, {len(bad)} failures"


# --------------------------------------------------------------------------
# 6. monoid axiom

def monoid_axiom_suite(seed=None, count: int = 40):
    r = rng(seed)
    dd = DescentData.modules(Z)
    bad, probes = [], 0
    for k in range(count):
        C = random_complex(r, Z)
        lo, hi = min(C.degrees() or [0]), max(C.degrees() or [0])
        for j in generating_trivial_cofibrations(dd, range(lo - 1, hi + 2)):
            probes += 1
            if not monoid_axiom_probe(C, j):
                bad.append(k)
    return not bad, f"{probes} probes over {count} complexes, {len(bad)} failures"


# --------------------------------------------------------------------------
# 7. localization

def localization_suite():
    R = FGModule.free(Z, 1)
    S0 = sphere(R, 0)
    T, _, _ = cone(ChainMap(S0, S0, {0: [[2]]}))
    ts = TSet.build([T])
    tower = t_cell_tower(sphere(R, 0), ts, steps=3)
    f = induced_map(tower.composite(3), 0)
    H = homology(tower.stages[3], 0)
    times8 = H.isomorphic(FGModule.free(Z, 1)) and abs(int(f.matrix[0, 0])) == 8 and f.matrix.shape == (1, 1)
    local3 = is_T_local(sphere(FGModule(Z, [3]), 0), ts)
    witness = t_local_witness(sphere(FGModule(Z, [2]), 0), ts)
    ok = times8 and local3 and witness is not None and len(tower.stages) == 4
    detail = (f"H^0 comparison {[[int(x) for x in row] for row in f.matrix]}, "
              f"Z/3 local: {local3}, Z/2 witness in shift {witness.shift if witness else None}")
    return ok, detail


# --------------------------------------------------------------------------
# 8. symmetric sequences

def _rank_oracle(E: SymSeq, F: SymSeq, n: int) -> int:
    """Binomial convolution from ranks alone (free modules)."""
    tot = lambda X: sum(X.module(k).ngens for k in X.degrees())
    return sum(comb(n, p) * tot(E.levels[p]) * tot(F.levels[n - p]) for p in range(n + 1))


def symmetric_sequence_suite(seed=None):
    r = rng(seed)
    R = FGModule.free(Z, 1)
    N = 4
    bad = []
    seqs = [sym_sequence(sphere(R, d), N) for d in (0, 1, 2)]
    X = random_complex(r, Z, max_rank=2, max_length=2, free=True)
    seqs += [seq_shift_down(concentrated(X, N), i, N) for i in (1, 2)]
    days = [DayTensor(a, b) for a in seqs[:3] for b in seqs]
    for k, s in enumerate(seqs + [d.seq for d in days]):
        if s.coxeter_failures():
            bad.append(("coxeter", k))
    for a in seqs[:3]:
        for b in seqs[:3]:
            D = DayTensor(a, b)
            for n in range(N + 1):
                if D.seq.levels[n].total_rank() != _rank_oracle(a, b, n):
                    bad.append(("rank", n))
    isos = 0
    for ring in (Z, F2):
        A = random_complex(r, ring, max_rank=2, max_length=2)
        B = random_complex(r, ring, max_rank=2, max_length=2)
        for i, j in ((1, 1), (1, 2), (2, 1), (0, 2)):
            src, tgt, maps = free_shift_tensor_iso(A, B, i, j)
            isos += 1
            if equivariance_failures(maps, src, tgt) or not all(m.is_isomorphism() for m in maps):
                bad.append(("shift iso", i, j))
    return not bad, f"{len(seqs) + len(days)} sequences, {isos} explicit isomorphisms, {len(bad)} failures"


# --------------------------------------------------------------------------
# 9. spectra

def flipped_sym(S: Complex, N: int, level: int = 2) -> Spectrum:
    """``Sym(S)`` with the sign of the ``s_0`` action negated at one level."""
    E = sym_ring(S, N).spectrum
    acts = [list(a) for a in E.seq.actions]
    acts[level] = [-acts[level][0]] + acts[level][1:]
    return Spectrum(S, SymSeq(S.ring, E.levels, acts), E.assembly, name="flipped")


def spectrum_suite():
    R = FGModule.free(Z, 1)
    bad = []
    for d in (0, 1):
        S = sphere(R, d)
        ring = sym_ring(S, 4)
        if ring_spectrum_failures(ring) or not validate_spectrum(ring.spectrum).ok:
            bad.append(("sym", d))
    S1 = sphere(R, 1)
    flip = flipped_sym(S1, 4)
    rep = validate_spectrum(flip)
    ring = sym_ring(S1, 4)
    ring.spectrum = flip
    comm = [f for f in ring_spectrum_failures(ring) if f[0] == "commutativity"]
    if rep.ok or not comm:
        bad.append("negative control")
    E = shift_spectrum(Z, 1, 4)
    if not is_weak_omega_spectrum(E) or not all(f.is_quasi_isomorphism() for f in suspension_map(E)):
        bad.append("shift spectrum")
    detail = (f"negative control flagged at {sorted({(m, n) for m, n, _, _ in rep.equivariance})}"
              f" and commutativity at {[f[1:] for f in comm]}")
    return not bad, detail + (f"; failures {bad}" if bad else "")


# --------------------------------------------------------------------------
# 10. presentation

def presentation_suite(seed=None, count: int = 12, family_count: int = 10):
    r = rng(seed)
    bad = []
    for ring in (Z, F2):
        cat = AddCategory(ring)
        for k in range(len(cat.ranks)):
            if not extends_to_representable(cat, k):
                bad.append(("representable", str(ring), k))
    cat = AddCategory(F2)
    checked = 0
    attempts = 0
    while checked < count and attempts < 10 * count:
        attempts += 1
        F = random_complex(r, F2, max_rank=2, max_length=2)
        G = random_complex(r, F2, max_rank=2, max_length=2)
        rep = adjunction_report(restrict(F, cat), G)
        if rep.counts is None or max(rep.counts) > 2 ** 8:
            continue
        checked += 1
        if not rep.ok:
            bad.append(("adjunction", checked))
    for ring in (Z, F2):
        for _ in range(family_count):
            X = random_complex(r, ring, free=True)
            fam = [random_complex(r, ring) for _ in range(r.randint(1, 3))]
            if not compact_additivity_probe(X, fam):
                bad.append(("compact", str(ring)))
    return not bad, (f"representables ok, {checked} enumerable adjunction instances, "
                     f"{2 * family_count} compactness families, {len(bad)} failures")


CRITERIA = [
    (1, "sign conventions", sign_suite),
    (2, "exactness", exactness_suite),
    (3, "homotopy oracle", homotopy_oracle),
    (4, "derived-hom oracle", derived_hom_oracle),
    (5, "lifting and factorization", lifting_suite),
    (6, "monoid axiom", monoid_axiom_suite),
    (7, "localization tower", localization_suite),
    (8, "symmetric sequences", symmetric_sequence_suite),
    (9, "spectra", spectrum_suite),
    (10, "presentation", presentation_suite),
]

SEEDED = {1, 2, 3, 5, 6, 8, 10}
TIME_LIMITS = {1: 60, 7: 5}


def run_criterion(number: int, seed=None) -> Result:
    num, name, func = CRITERIA[number - 1]
    args = (seed,) if num in SEEDED else ()
    return _timed(num, name, func, *args)


def run_all(seed=None) -> list[Result]:
    return [run_criterion(k, seed) for k in range(1, len(CRITERIA) + 1)]
