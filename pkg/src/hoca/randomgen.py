"""Random bounded complexes and chain maps for the property suites.

``HOCA_SEED`` fixes the default seed.  A random differential is built one
degree at a time as a random map out of the cokernel of the previous one, so
``d∘d = 0`` holds by construction rather than by rejection.
"""

from __future__ import annotations

import os
import random

import numpy as np

from .algebra import FGModule, ModuleMap, Ring, Subquotient, hom_basis, imat, kernel_lattice, module_cokernel
from .complexes import ChainMap, Complex, HomComplex

DEFAULT_SEED = 20240601


def seed_from_env(default: int = DEFAULT_SEED) -> int:
    raw = os.environ.get("HOCA_SEED")
    return int(raw) if raw not in (None, "") else default


def rng(seed: int | None = None) -> random.Random:
    return random.Random(seed_from_env() if seed is None else seed)


def random_module(r: random.Random, ring: Ring, max_rank: int = 3, torsion=(2, 3, 4)) -> FGModule:
    k = r.randint(0, max_rank)
    if ring.kind == "Zmod":
        return FGModule.free(ring, k)
    fs = [0 if r.random() < 0.7 else r.choice(torsion) for _ in range(k)]
    return FGModule(ring, fs)


def _random_hom(r: random.Random, M: FGModule, N: FGModule, spread: int = 2) -> np.ndarray:
    hb = hom_basis(M, N)
    coords = [r.randint(-spread, spread) for _ in range(hb.module.ngens)]
    return hb.to_matrix(coords)


def random_complex(r: random.Random, ring: Ring, max_rank: int = 3, max_length: int = 4,
                   low: int = -1, free: bool = False) -> Complex:
    """A bounded complex with at most ``max_length`` nonzero degrees starting at ``low``."""
    length = r.randint(1, max_length)
    mods = {}
    for n in range(low, low + length):
        mods[n] = (FGModule.free(ring, r.randint(0, max_rank)) if free
                   else random_module(r, ring, max_rank))
    diffs = {}
    prev = None
    for n in range(low, low + length - 1):
        M, N = mods[n], mods[n + 1]
        if prev is None:
            diffs[n] = _random_hom(r, M, N)
        else:
            Q, q = module_cokernel(prev)
            diffs[n] = _random_hom(r, Q, N).dot(q.matrix) if Q.ngens else imat(shape=(N.ngens, M.ngens))
        prev = ModuleMap(M, N, diffs[n], check=False)
    return Complex(ring, mods, diffs)


def random_chain_map(r: random.Random, X: Complex, Y: Complex, spread: int = 2) -> ChainMap:
    """A random combination of generators of the chain maps ``X -> Y``."""
    H = HomComplex(X, Y)
    M0 = H.complex.module(0)
    if not M0.ngens:
        return ChainMap(X, Y, {})
    lat = kernel_lattice(H.complex.d(0))
    sq = Subquotient(M0, lat, imat(shape=(M0.ngens, 0)))
    coords = imat([r.randint(-spread, spread) for _ in range(sq.module.ngens)], (sq.module.ngens,))
    vec = M0.reduce(sq.gens.dot(coords)) if sq.module.ngens else imat(shape=(M0.ngens,))
    f = H.chain_map(vec, 0)
    return ChainMap(X, Y, {n: f[n] for n in f.degrees()})


def corpus(seed: int | None = None, count: int = 40, rings=None, **kw) -> list[Complex]:
    r = rng(seed)
    rings = rings or [Ring.integers(), Ring("Zmod", 2)]
    return [random_complex(r, rings[k % len(rings)], **kw) for k in range(count)]
