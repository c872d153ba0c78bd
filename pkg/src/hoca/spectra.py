"""Symmetric spectra of complexes over a fixed complex ``S``, truncated at ``N``.

A spectrum is a symmetric sequence ``E`` with assembly maps
``σ_n : S ⊗ E_n -> E_{n+1}``.  The composites ``S^{⊗m} ⊗ E_n -> E_{m+n}``
use the ``S`` factors from the inside out and must be equivariant for
``𝔖_m × 𝔖_n`` acting on the first ``m`` and the last ``n`` letters.
``E{k}`` keeps ``𝔖_n`` on the first ``n`` letters of ``E_{n+k}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

from .algebra import FGModule, ModuleMap, Ring, imat
from .complexes import (
    ChainMap,
    Complex,
    HomComplex,
    InvariantViolation,
    chain_cokernel,
    chain_inverse,
    factor_through_cokernel,
    sphere,
)
from .monoidal import TensorComplex, braiding, permute_factors, regroup, tensor_maps, unit, unitor
from .symseq import (
    DayTensor,
    SymSeq,
    block_cycle,
    concentrated,
    day_associator,
    day_map,
    day_tensor_maps,
    equivariance_failures,
    seq_shift_up,
    transposition,
)

DEFAULT_TRUNCATION = 4


# --------------------------------------------------------------------------
# Sym(S)

class SymAlgebra:
    """The tensor powers ``S^{⊗n}`` with the Koszul-signed permutation action."""

    def __init__(self, S: Complex, N: int = DEFAULT_TRUNCATION):
        self.S, self.N, self.ring = S, N, S.ring
        self.layouts = ["unit"] + [TensorComplex([S] * n) for n in range(1, N + 1)]
        levels = [unit(S.ring)] + [T.complex for T in self.layouts[1:]]
        actions = [[permute_factors([S] * n, transposition(n, j)) for j in range(n - 1)]
                   for n in range(N + 1)]
        self.seq = SymSeq(S.ring, levels, actions, check=False, layouts=self.layouts)
        self._mult: dict = {}

    def level(self, n: int) -> Complex:
        return self.seq.levels[n]

    def sub(self, n: int):
        """The nesting descriptor of level ``n`` for :func:`regroup`."""
        return self.layouts[n]

    def mult(self, p: int, q: int) -> ChainMap:
        """``μ_{p,q} : S^{⊗p} ⊗ S^{⊗q} -> S^{⊗(p+q)}`` (concatenation)."""
        if (p, q) not in self._mult:
            src = TensorComplex([self.level(p), self.level(q)])
            if p + q == 0:
                f = unitor(self.level(0))
            else:
                f = regroup(src, [self.sub(p), self.sub(q)], self.layouts[p + q],
                            [None] * (p + q))
            self._mult[p, q] = f
        return self._mult[p, q]


def sym_sequence(S: Complex, N: int = DEFAULT_TRUNCATION) -> SymSeq:
    return SymAlgebra(S, N).seq


# --------------------------------------------------------------------------
# spectra

class Spectrum:
    def __init__(self, S: Complex, seq: SymSeq, assembly: Sequence[ChainMap], name: str = ""):
        self.S, self.seq, self.assembly, self.name = S, seq, list(assembly), name
        self.ring = S.ring
        if len(self.assembly) != seq.N:
            raise ValueError(f"need {seq.N} assembly maps, got {len(self.assembly)}")
        for n, s in enumerate(self.assembly):
            if s.source != TensorComplex([S, seq.levels[n]]).complex or s.target != seq.levels[n + 1]:
                raise InvariantViolation(f"assembly map {n} has the wrong shape")
        self._comp: dict = {}

    @property
    def N(self) -> int:
        return self.seq.N

    @property
    def levels(self) -> list[Complex]:
        return self.seq.levels

    @cached_property
    def sym(self) -> SymAlgebra:
        return SymAlgebra(self.S, self.N)

    def composite(self, m: int, n: int) -> ChainMap:
        """``S^{⊗m} ⊗ E_n -> E_{m+n}``, the last ``S`` factor acting first."""
        if (m, n) in self._comp:
            return self._comp[m, n]
        Y, E = self.sym, self.levels
        if m == 0:
            f = unitor(E[n])
        else:
            inner = TensorComplex([Y.level(m - 1), E[n]])
            src = TensorComplex([Y.level(m), E[n]])
            tgt = TensorComplex([self.S, inner.complex])
            r = regroup(src, [Y.sub(m), None], tgt, [None, (inner, [Y.sub(m - 1), None])])
            f = self.assembly[n + m - 1] @ tensor_maps(self.S.identity(), self.composite(m - 1, n)) @ r
        self._comp[m, n] = f
        return f

    def __str__(self):
        head = f"spectrum {self.name}".rstrip() + f" over S with {self.N + 1} levels"
        return head + "\n" + str(self.seq)


@dataclass
class SpectrumReport:
    coxeter: list = field(default_factory=list)
    equivariance: list = field(default_factory=list)   # (m, n, "S" | "E", j)

    @property
    def ok(self) -> bool:
        return not self.coxeter and not self.equivariance

    def lines(self) -> list[str]:
        out = [f"coxeter: {'ok' if not self.coxeter else self.coxeter}"]
        if self.equivariance:
            for m, n, side, j in self.equivariance:
                letter = j if side == "S" else m + j
                out.append(f"not equivariant at (m, n) = ({m}, {n}) for the transposition "
                           f"({letter} {letter + 1}) of the {side} letters")
        else:
            out.append("equivariance: ok")
        return out


def validate_spectrum(E: Spectrum) -> SpectrumReport:
    rep = SpectrumReport(coxeter=E.seq.coxeter_failures())
    Y = E.sym
    for total in range(E.N + 1):
        for m in range(total + 1):
            n = total - m
            c = E.composite(m, n)
            for j in range(m - 1):
                lhs = c @ tensor_maps(Y.seq.actions[m][j], E.levels[n].identity())
                if lhs != E.seq.actions[total][j] @ c:
                    rep.equivariance.append((m, n, "S", j))
            for j in range(n - 1):
                lhs = c @ tensor_maps(Y.level(m).identity(), E.seq.actions[n][j])
                if lhs != E.seq.actions[total][m + j] @ c:
                    rep.equivariance.append((m, n, "E", j))
    return rep


def make_spectrum(S: Complex, levels: Sequence[Complex], actions, assembly, name: str = "") -> Spectrum:
    """Build and validate; raises :class:`InvariantViolation` with the report."""
    seq = SymSeq(S.ring, levels, actions, check=False)
    E = Spectrum(S, seq, assembly, name)
    rep = validate_spectrum(E)
    if not rep.ok:
        raise InvariantViolation("; ".join(rep.lines()))
    return E


def sym_spectrum(S: Complex, N: int = DEFAULT_TRUNCATION) -> Spectrum:
    """``Sym(S)`` with ``σ_n = μ_{1,n}``."""
    Y = SymAlgebra(S, N)
    return Spectrum(S, Y.seq, [Y.mult(1, n) for n in range(N)], name="Sym(S)")


def shift_spectrum(R: Ring, d: int, N: int = DEFAULT_TRUNCATION) -> Spectrum:
    """``E_n = sphere(R, d n)`` with the canonical assembly isomorphisms,
    i.e. ``Sym(sphere(R, d))``."""
    E = sym_spectrum(sphere(FGModule.free(R, 1), d), N)
    E.name = f"shift spectrum of sphere(R, {d})"
    return E


def zero_spectrum(S: Complex, N: int = DEFAULT_TRUNCATION) -> Spectrum:
    Z = Complex.zero(S.ring)
    seq = SymSeq(S.ring, [Z] * (N + 1), [[Z.identity()] * max(n - 1, 0) for n in range(N + 1)])
    zero = ChainMap(TensorComplex([S, Z]).complex, Z, {})
    return Spectrum(S, seq, [zero] * N, name="0")


def spectrum_shift(E: Spectrum, k: int) -> Spectrum:
    """``E{k}``: ``E_{n+k}`` with ``σ{k}_n = σ_{n+k}``."""
    if k < 0:
        raise ValueError("only nonnegative shifts of spectra")
    return Spectrum(E.S, seq_shift_up(E.seq, k), E.assembly[k:], name=f"{E.name}{{{k}}}")


def spectrum_tensor_complex(E: Spectrum, A: Complex) -> Spectrum:
    """``E ⊗ A = (E_n ⊗ A, σ_n ⊗ 1)``."""
    levels = [TensorComplex([X, A]).complex for X in E.levels]
    actions = [[tensor_maps(a, A.identity()) for a in acts] for acts in E.seq.actions]
    seq = SymSeq(E.ring, levels, actions, check=False)
    assembly = []
    for n, s in enumerate(E.assembly):
        XA = TensorComplex([E.levels[n], A])
        src = TensorComplex([E.S, XA.complex])
        SX = TensorComplex([E.S, E.levels[n]])
        tgt = TensorComplex([SX.complex, A])
        r = regroup(src, [None, XA], tgt, [SX, None])
        assembly.append(tensor_maps(s, A.identity()) @ r)
    return Spectrum(E.S, seq, assembly, name=f"{E.name} ⊗ A")


def is_spectrum_map(f: Sequence[ChainMap], E: Spectrum, F: Spectrum) -> list[tuple]:
    """Failures of ``f`` to be equivariant and to commute with assembly."""
    bad = equivariance_failures(f, E.seq, F.seq)
    for n in range(min(E.N, F.N)):
        lhs = F.assembly[n] @ tensor_maps(E.S.identity(), f[n])
        if lhs != f[n + 1] @ E.assembly[n]:
            bad.append((n, "assembly"))
    return bad


# --------------------------------------------------------------------------
# free spectra and Σ^∞

def _left_assembly(Y: SymAlgebra, E: SymSeq, F: SymSeq, act: Callable, N: int) -> list[ChainMap]:
    """Assembly on ``E ⊗^𝔖 F`` induced by a left ``Sym(S)``-action on ``E``.

    ``act(m, n)`` is the action ``S^{⊗m} ⊗ E_m -> E_{m+n}``.
    """
    L, R, assoc = day_associator(Y.seq, E, F, N)          # (Y⊗E)⊗F -> Y⊗(E⊗F)
    YE_day = DayTensor(Y.seq, E, N)
    act_E = day_map(YE_day, E, act)
    D = DayTensor(E, F, N)
    left = day_tensor_maps(L, D, act_E, F.identity())
    out = []
    for n in range(N):
        inv = chain_inverse(assoc[n + 1])
        inc = R.embed(n + 1, 1, (0,))
        out.append(left[n + 1] @ inv @ inc)
    return out


def _retarget(f: ChainMap, source: Complex) -> ChainMap:
    """The same matrices viewed from a structurally equal source."""
    if f.source != source:
        raise InvariantViolation("sources differ")
    return ChainMap(source, f.target, {k: f[k] for k in f.degrees()}, check=False)


def free_spectrum(F: SymSeq, S: Complex) -> Spectrum:
    """``Sym(S) ⊗^𝔖 F`` with its free assembly."""
    N = F.N
    Y = SymAlgebra(S, N)
    D = DayTensor(Y.seq, F, N)
    sig = _left_assembly(Y, Y.seq, F, Y.mult, N)
    assembly = [_retarget(s, TensorComplex([S, D.seq.levels[n]]).complex)
                for n, s in enumerate(sig)]
    E = Spectrum(S, D.seq, assembly, name="Sym(S) ⊗ F")
    E.day = D
    return E


def sigma_infty(A: Complex, S: Complex, N: int = DEFAULT_TRUNCATION) -> Spectrum:
    """``Σ^∞ A = Sym(S) ⊗^𝔖 A{0}``; level ``n`` is ``S^{⊗n} ⊗ A``."""
    E = free_spectrum(concentrated(A, N), S)
    E.name = "Σ^∞A"
    return E


def omega_infty(E: Spectrum) -> Complex:
    return E.levels[0]


def right_action(E: Spectrum) -> Callable:
    """``E_p ⊗ S^{⊗q} -> E_{p+q}`` through the braiding and the block cycle."""
    Y = E.sym

    def act(p, q):
        return (E.seq.act(p + q, block_cycle(q, p)) @ E.composite(q, p)
                @ braiding(E.levels[p], Y.level(q)))
    return act


@dataclass
class Smash:
    spectrum: Spectrum
    day: DayTensor
    proj: list               # (E ⊗^𝔖 F)_n -> (E ∧ F)_n


def smash(E: Spectrum, F: Spectrum) -> Smash:
    """``E ∧ F``: the levelwise coequalizer of ``E ⊗ Sym(S) ⊗ F ⇉ E ⊗ F``."""
    if E.S != F.S:
        raise ValueError("spectra over different S")
    N = min(E.N, F.N)
    Y = SymAlgebra(E.S, N)
    L, R, assoc = day_associator(E.seq, Y.seq, F.seq, N)     # (E⊗Y)⊗F -> E⊗(Y⊗F)
    D = DayTensor(E.seq, F.seq, N)
    ra = day_map(DayTensor(E.seq, Y.seq, N), E.seq, right_action(E))
    la = day_map(DayTensor(Y.seq, F.seq, N), F.seq, lambda m, n: F.composite(m, n))
    one = day_tensor_maps(L, D, ra, F.seq.identity())
    two = day_tensor_maps(R, D, E.seq.identity(), la)
    levels, actions, projs = [], [], []
    for n in range(N + 1):
        diff = one[n] - two[n] @ assoc[n]
        Q, proj = chain_cokernel(diff)
        levels.append(Q)
        projs.append(proj)
        actions.append([factor_through_cokernel(proj, proj @ a) for a in D.seq.actions[n]])
    seq = SymSeq(E.ring, levels, actions, check=False)
    sig = _left_assembly(Y, E.seq, F.seq, lambda m, n: E.composite(m, n), N)
    assembly = []
    for n in range(N):
        lift = tensor_maps(E.S.identity(), projs[n])
        g = projs[n + 1] @ _retarget(sig[n], lift.source)
        h = factor_through_cokernel(lift, g)
        if h @ lift != g:
            raise InvariantViolation(f"assembly does not descend at level {n}")
        assembly.append(h)
    return Smash(Spectrum(E.S, seq, assembly, name=f"{E.name} ∧ {F.name}"), D, projs)


def sigma_infty_monoidal_map(A: Complex, B: Complex, S: Complex,
                             N: int = DEFAULT_TRUNCATION) -> tuple[Spectrum, Smash, list[ChainMap]]:
    """``Σ^∞(A ⊗ B) -> Σ^∞A ∧ Σ^∞B``, ``x ⊗ a ⊗ b ↦ (x ⊗ a) ⊗ (1 ⊗ b)``."""
    AB = TensorComplex([A, B])
    left = sigma_infty(AB.complex, S, N)
    SA, SB = sigma_infty(A, S, N), sigma_infty(B, S, N)
    sm = smash(SA, SB)
    Y = SymAlgebra(S, N)
    maps = []
    for n in range(N + 1):
        src = TensorComplex([Y.level(n), AB.complex])
        YA = TensorComplex([Y.level(n), A])
        UB = TensorComplex([unit(S.ring), B])
        tgt = TensorComplex([YA.complex, UB.complex])
        r = regroup(src, [Y.sub(n), AB], tgt, [(YA, [Y.sub(n), None]), (UB, ["unit", None])])
        inc = sm.day.embed(n, n, tuple(range(n)))
        f = sm.proj[n] @ inc @ _retarget(r, r.source)
        maps.append(_retarget(f, left.levels[n]))
    return left, sm, maps


# --------------------------------------------------------------------------
# suspension and weak Ω-spectra

def _reverse(E: Spectrum, l: int, k: int) -> ChainMap:
    """``E_l ⊗ S^{⊗k} -> S^{⊗k} ⊗ E_l``, ``x ⊗ s_1 ⋯ s_k ↦ ± s_k ⋯ s_1 ⊗ x``."""
    Y = E.sym
    src = TensorComplex([E.levels[l], Y.level(k)])
    tgt = TensorComplex([Y.level(k), E.levels[l]])
    perm = tuple(range(k, -1, -1))
    return regroup(src, [None, Y.sub(k)], tgt, [Y.sub(k), None], perm)


def suspension_map(E: Spectrum, k: int = 1) -> list[ChainMap]:
    """``σ^k : E ⊗ S^{⊗k} -> E{k}``, level ``l``: ``E_l ⊗ S^{⊗k} -> E_{l+k}``.

    The ``S`` factors are reversed before assembly and the ``S`` letters are
    then moved behind the ``E`` letters, so ``σ^k`` is equivariant for ``𝔖_l``
    on the first letters and ``σ^{a+b} = σ^b_{E{a}} ∘ (σ^a ⊗ 1)``.
    """
    if k < 1:
        raise ValueError("k >= 1")
    out = []
    for l in range(E.N - k + 1):
        c = E.seq.act(l + k, block_cycle(k, l))
        out.append(c @ E.composite(k, l) @ _reverse(E, l, k))
    return out


def suspension_cocycle_failures(E: Spectrum, a: int, b: int) -> list[int]:
    """Levels where ``σ^{a+b} != σ^b_{E{a}} ∘ (σ^a ⊗ 1)``."""
    Y = E.sym
    whole = suspension_map(E, a + b)
    first = suspension_map(E, a)
    second = suspension_map(spectrum_shift(E, a), b)
    bad = []
    for l in range(E.N - a - b + 1):
        Ya, Yb = TensorComplex([E.levels[l], Y.level(a)]), Y.level(b)
        src = TensorComplex([E.levels[l], Y.level(a + b)])
        tgt = TensorComplex([Ya.complex, Yb])
        r = regroup(src, [None, Y.sub(a + b)], tgt, [(Ya, [None, Y.sub(a)]), Y.sub(b)])
        if whole[l] != second[l] @ tensor_maps(first[l], Yb.identity()) @ r:
            bad.append(l)
    return bad


def adjoint_assembly(E: Spectrum, n: int) -> ChainMap:
    """``σ̃_n : E_n -> Hom(S, E_{n+1})``, ``x ↦ (s ↦ σ_n(τ(x ⊗ s)))``."""
    X, S, T = E.levels[n], E.S, E.levels[n + 1]
    g = E.assembly[n] @ braiding(X, S)
    XS = TensorComplex([X, S])
    H = HomComplex(S, T)
    comps = {}
    for k in X.degrees():
        M = H.complex.module(k)
        m = imat(shape=(M.ngens, X.module(k).ngens))
        for x in range(X.module(k).ngens):
            fam = {}
            for p in S.degrees():
                blk = imat(shape=(T.module(p + k).ngens, S.module(p).ngens))
                for s in range(S.module(p).ngens):
                    pos = XS.position((k, p), (x, s))
                    if pos is not None and g[k + p].matrix.shape[0]:
                        blk[:, s] = g[k + p].matrix[:, pos]
                fam[p] = blk
            if M.ngens:
                m[:, x] = M.reduce(H.element(k, fam))
        comps[k] = ModuleMap(X.module(k), M, m, check=False)
    return ChainMap(X, H.complex, comps)


@dataclass
class OmegaReport:
    levels: dict          # n -> bool

    @property
    def ok(self) -> bool:
        return all(self.levels.values())

    def lines(self) -> list[str]:
        return [f"level {n}: adjoint assembly {'is' if v else 'is not'} a quasi-isomorphism"
                for n, v in sorted(self.levels.items())]


def weak_omega_report(E: Spectrum) -> OmegaReport:
    return OmegaReport({n: adjoint_assembly(E, n).is_quasi_isomorphism() for n in range(E.N)})


def is_weak_omega_spectrum(E: Spectrum, dd=None, ts=None, shift_range=None) -> bool:
    """Every ``σ̃_n`` is a quasi-isomorphism (``S`` is cofibrant here, so
    ``Hom(S, -)`` is already derived)."""
    return weak_omega_report(E).ok


# --------------------------------------------------------------------------
# ring and module spectra

@dataclass
class RingSpectrumData:
    spectrum: Spectrum
    mult: dict                 # (p, q) -> R_p ⊗ R_q -> R_{p+q}
    unit: ChainMap             # 1 -> R_0
    iota: ChainMap             # S -> R_1
    commutative: bool = False


def sym_ring(S: Complex, N: int = DEFAULT_TRUNCATION) -> RingSpectrumData:
    Y = SymAlgebra(S, N)
    E = Spectrum(S, Y.seq, [Y.mult(1, n) for n in range(N)], name="Sym(S)")
    mult = {(p, q): Y.mult(p, q) for p in range(N + 1) for q in range(N + 1 - p)}
    iota = ChainMap(S, Y.level(1), {k: S.module(k).identity() for k in S.degrees()}, check=False)
    return RingSpectrumData(E, mult, Y.level(0).identity(), iota, commutative=True)


def _right_unitor(X: Complex) -> ChainMap:
    return unitor(X) @ braiding(X, unit(X.ring))


def ring_spectrum_failures(R: RingSpectrumData) -> list[tuple]:
    E, mu = R.spectrum, R.mult
    L = E.levels
    N = E.N
    bad = []
    for (p, q), m in sorted(mu.items()):
        for j in range(p - 1):
            if m @ tensor_maps(E.seq.actions[p][j], L[q].identity()) != E.seq.actions[p + q][j] @ m:
                bad.append(("equivariance", p, q))
                break
        for j in range(q - 1):
            if m @ tensor_maps(L[p].identity(), E.seq.actions[q][j]) != E.seq.actions[p + q][p + j] @ m:
                bad.append(("equivariance", p, q))
                break
    for p in range(N + 1):
        for q in range(N + 1 - p):
            for r in range(N + 1 - p - q):
                lhs = mu[p + q, r] @ tensor_maps(mu[p, q], L[r].identity())
                PQ, QR = TensorComplex([L[p], L[q]]), TensorComplex([L[q], L[r]])
                a = regroup(TensorComplex([PQ.complex, L[r]]), [PQ, None],
                            TensorComplex([L[p], QR.complex]), [None, QR])
                rhs = mu[p, q + r] @ tensor_maps(L[p].identity(), mu[q, r]) @ a
                if lhs != rhs:
                    bad.append(("associativity", p, q, r))
    for q in range(N + 1):
        if mu[0, q] @ tensor_maps(R.unit, L[q].identity()) != unitor(L[q]):
            bad.append(("left unit", q))
        if mu[q, 0] @ tensor_maps(L[q].identity(), R.unit) != _right_unitor(L[q]):
            bad.append(("right unit", q))
    if R.commutative:
        for (p, q), m in sorted(mu.items()):
            lhs = mu[q, p] @ braiding(L[p], L[q])
            if lhs != E.seq.act(p + q, block_cycle(p, q)) @ m:
                bad.append(("commutativity", p, q))
    for n in range(N):
        if E.assembly[n] != mu[1, n] @ tensor_maps(R.iota, L[n].identity()):
            bad.append(("assembly", n))
    return bad


def validate_ring_spectrum(R: RingSpectrumData) -> bool:
    return not ring_spectrum_failures(R)


@dataclass
class ModuleSpectrumData:
    ring: RingSpectrumData
    spectrum: Spectrum
    action: dict               # (p, q) -> R_p ⊗ M_q -> M_{p+q}


def module_spectrum_failures(M: ModuleSpectrumData) -> list[tuple]:
    R, E, a = M.ring, M.spectrum, M.action
    L, K = R.spectrum.levels, E.levels
    N = min(R.spectrum.N, E.N)
    bad = []
    for p in range(N + 1):
        for q in range(N + 1 - p):
            for r in range(N + 1 - p - q):
                lhs = a[p + q, r] @ tensor_maps(R.mult[p, q], K[r].identity())
                PQ, QR = TensorComplex([L[p], L[q]]), TensorComplex([L[q], K[r]])
                g = regroup(TensorComplex([PQ.complex, K[r]]), [PQ, None],
                            TensorComplex([L[p], QR.complex]), [None, QR])
                rhs = a[p, q + r] @ tensor_maps(L[p].identity(), a[q, r]) @ g
                if lhs != rhs:
                    bad.append(("associativity", p, q, r))
    for q in range(N + 1):
        if a[0, q] @ tensor_maps(R.unit, K[q].identity()) != unitor(K[q]):
            bad.append(("unit", q))
    for n in range(N):
        if E.assembly[n] != a[1, n] @ tensor_maps(R.iota, K[n].identity()):
            bad.append(("assembly", n))
    return bad


def validate_module_spectrum(M: ModuleSpectrumData) -> bool:
    return not module_spectrum_failures(M)


def zero_module(R: RingSpectrumData) -> ModuleSpectrumData:
    Zs = zero_spectrum(R.spectrum.S, R.spectrum.N)
    N = R.spectrum.N
    action = {(p, q): ChainMap(TensorComplex([R.spectrum.levels[p], Zs.levels[q]]).complex,
                               Zs.levels[p + q], {})
              for p in range(N + 1) for q in range(N + 1 - p)}
    return ModuleSpectrumData(R, Zs, action)


# --------------------------------------------------------------------------
# Sym(S) is free

def extend_to_monoid_map(f: ChainMap, M: RingSpectrumData) -> list[ChainMap]:
    """The monoid map ``Sym(S) -> M`` with level-1 component ``f : S -> M_1``."""
    S = f.source
    N = M.spectrum.N
    Y = SymAlgebra(S, N)
    out = [M.unit]
    for n in range(1, N + 1):
        src = TensorComplex([S] * n)
        inner = Y.level(n - 1)
        tgt = TensorComplex([S, inner])
        r = regroup(src, [None] * n, tgt, [None, Y.sub(n - 1)])
        out.append(M.mult[1, n - 1] @ tensor_maps(f, out[n - 1]) @ r)
    return out


def free_monoid_failures(f: ChainMap, M: RingSpectrumData) -> list[tuple]:
    """Checks that the extension exists (equivariant, unital, multiplicative)
    and is unique (each ``μ_{1,n}`` of ``Sym(S)`` is an isomorphism, so a
    monoid map is determined by level 1)."""
    S = f.source
    N = M.spectrum.N
    Y = SymAlgebra(S, N)
    F = extend_to_monoid_map(f, M)
    bad = [("equivariance",) + b for b in equivariance_failures(F, Y.seq, M.spectrum.seq)]
    if F[1] != _retarget(f, Y.level(1)):
        bad.append(("level one",))
    for p in range(N + 1):
        for q in range(N + 1 - p):
            if F[p + q] @ Y.mult(p, q) != M.mult[p, q] @ tensor_maps(F[p], F[q]):
                bad.append(("multiplicative", p, q))
    for n in range(N):
        if not Y.mult(1, n).is_isomorphism():
            bad.append(("uniqueness", n))
    return bad

