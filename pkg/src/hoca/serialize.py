"""The JSON wire format (version 1); see docs/format.md.

Every file is an object with ``"format": 1`` and a ``"type"``; the remaining
keys are the fields of that type.  Decoding errors raise :class:`ParseError`
naming the offending entry as a JSON path such as ``$.components.0.factors[1]``.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .algebra import FGModule, ModuleMap, Ring, imat
from .complexes import ChainMap, Complex, InvariantViolation

FORMAT_VERSION = 1


class ParseError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


def _need(obj, key: str, path: str):
    if not isinstance(obj, dict):
        raise ParseError(path, "expected an object")
    if key not in obj:
        raise ParseError(path, f"missing key {key!r}")
    return obj[key]


def _int(x, path: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ParseError(path, f"expected an integer, got {x!r}")
    return x


# --------------------------------------------------------------------------
# rings, modules, maps

def ring_to_json(R: Ring) -> dict:
    return {"kind": "Z"} if R.kind == "Z" else {"kind": "Zmod", "m": R.m}


def ring_from_json(obj, path: str = "$") -> Ring:
    kind = _need(obj, "kind", path)
    if kind == "Z":
        return Ring.integers()
    if kind == "Zmod":
        m = _int(_need(obj, "m", path), f"{path}.m")
        if m < 2:
            raise ParseError(f"{path}.m", f"modulus must be at least 2, got {m}")
        return Ring("Zmod", m)
    raise ParseError(f"{path}.kind", f"unknown ring kind {kind!r}")


def module_to_json(M: FGModule) -> dict:
    return {"ring": ring_to_json(M.ring), "factors": [int(f) for f in M.factors]}


def module_from_json(obj, path: str = "$", ring: Ring | None = None) -> FGModule:
    fs = _need(obj, "factors", path)
    R = ring_from_json(_need(obj, "ring", path), f"{path}.ring") if "ring" in obj or ring is None else ring
    if not isinstance(fs, list):
        raise ParseError(f"{path}.factors", "expected a list")
    out = []
    for k, f in enumerate(fs):
        f = _int(f, f"{path}.factors[{k}]")
        if f == 1 or f < 0:
            raise ParseError(f"{path}.factors[{k}]", f"factor {f} is forbidden (use 0 for Z, d >= 2 for Z/d)")
        if R.kind == "Zmod" and f and R.m % f:
            raise ParseError(f"{path}.factors[{k}]", f"factor {f} does not divide {R.m}")
        out.append(f)
    return FGModule(R, out)


def matrix_to_json(m: np.ndarray) -> list:
    return [[int(x) for x in row] for row in m]


def matrix_from_json(obj, rows: int, cols: int, path: str) -> np.ndarray:
    if not isinstance(obj, list):
        raise ParseError(path, "expected a list of rows")
    if rows == 0 or cols == 0:
        if any(obj) and not all(r == [] for r in obj):
            raise ParseError(path, f"expected an empty {rows}x{cols} matrix")
        return imat(shape=(rows, cols))
    if len(obj) != rows:
        raise ParseError(path, f"expected {rows} rows, got {len(obj)}")
    m = imat(shape=(rows, cols))
    for i, row in enumerate(obj):
        if not isinstance(row, list) or len(row) != cols:
            raise ParseError(f"{path}[{i}]", f"expected a row of length {cols}")
        for j, x in enumerate(row):
            m[i, j] = _int(x, f"{path}[{i}][{j}]")
    return m


def map_to_json(f: ModuleMap) -> dict:
    return {"source": module_to_json(f.source), "target": module_to_json(f.target),
            "matrix": matrix_to_json(f.matrix)}


def map_from_json(obj, path: str = "$") -> ModuleMap:
    S = module_from_json(_need(obj, "source", path), f"{path}.source")
    T = module_from_json(_need(obj, "target", path), f"{path}.target")
    m = matrix_from_json(_need(obj, "matrix", path), T.ngens, S.ngens, f"{path}.matrix")
    try:
        return ModuleMap(S, T, m)
    except ValueError as e:
        raise ParseError(f"{path}.matrix", str(e)) from None


# --------------------------------------------------------------------------
# complexes and chain maps

def complex_to_json(C: Complex) -> dict:
    return {"ring": ring_to_json(C.ring),
            "components": {str(n): {"factors": [int(f) for f in C.module(n).factors]}
                           for n in C.degrees()},
            "differentials": {str(n): matrix_to_json(C.d(n).matrix)
                              for n in C.degrees() if not C.d(n).is_zero()}}


def _degree(key: str, path: str) -> int:
    try:
        return int(key)
    except (TypeError, ValueError):
        raise ParseError(path, f"degree key {key!r} is not an integer") from None


def complex_from_json(obj, path: str = "$") -> Complex:
    R = ring_from_json(_need(obj, "ring", path), f"{path}.ring")
    comps = _need(obj, "components", path)
    if not isinstance(comps, dict):
        raise ParseError(f"{path}.components", "expected an object keyed by degree")
    mods = {}
    for key, m in comps.items():
        n = _degree(key, f"{path}.components")
        mods[n] = module_from_json(m, f"{path}.components.{key}", ring=R)
    diffs = {}
    for key, m in (obj.get("differentials") or {}).items():
        n = _degree(key, f"{path}.differentials")
        src = mods.get(n, FGModule.zero(R))
        tgt = mods.get(n + 1, FGModule.zero(R))
        mat = matrix_from_json(m, tgt.ngens, src.ngens, f"{path}.differentials.{key}")
        try:
            diffs[n] = ModuleMap(src, tgt, mat)
        except ValueError as e:
            raise ParseError(f"{path}.differentials.{key}", str(e)) from None
    try:
        return Complex(R, mods, diffs)
    except InvariantViolation:
        raise
    except ValueError as e:
        raise ParseError(path, str(e)) from None


def chain_map_to_json(f: ChainMap) -> dict:
    return {"source": complex_to_json(f.source), "target": complex_to_json(f.target),
            "components": {str(n): matrix_to_json(f[n].matrix) for n in f.degrees()}}


def components_from_json(obj, S: Complex, T: Complex, path: str) -> dict:
    if not isinstance(obj, dict):
        raise ParseError(path, "expected an object keyed by degree")
    out = {}
    for key, m in obj.items():
        n = _degree(key, path)
        out[n] = matrix_from_json(m, T.module(n).ngens, S.module(n).ngens, f"{path}.{key}")
    return out


def chain_map_from_json(obj, path: str = "$") -> ChainMap:
    S = complex_from_json(_need(obj, "source", path), f"{path}.source")
    T = complex_from_json(_need(obj, "target", path), f"{path}.target")
    comps = components_from_json(_need(obj, "components", path), S, T, f"{path}.components")
    return ChainMap(S, T, comps)


# --------------------------------------------------------------------------
# descent data and 𝒯

def descent_to_json(dd) -> dict:
    return {"ring": ring_to_json(dd.ring),
            "generators": [{"factors": [int(f) for f in E.factors]} for E in dd.generators],
            "acyclics": [complex_to_json(H) for H in dd.acyclics]}


def descent_from_json(obj, path: str = "$"):
    from .model import DescentData, cellular_structure
    R = ring_from_json(_need(obj, "ring", path), f"{path}.ring")
    gens = [module_from_json(g, f"{path}.generators[{k}]", ring=R)
            for k, g in enumerate(_need(obj, "generators", path))]
    if not gens:
        raise ParseError(f"{path}.generators", "need at least one generator")
    acyc = [complex_from_json(h, f"{path}.acyclics[{k}]")
            for k, h in enumerate(obj.get("acyclics", []))]
    dd = DescentData(gens, acyc)
    dd.certificates = [cellular_structure(H, dd) for H in acyc]
    return dd


def tset_to_json(ts) -> dict:
    return {"complexes": [complex_to_json(T) for T in ts.complexes]}


def tset_from_json(obj, path: str = "$"):
    from .localization import TSet
    cs = _need(obj, "complexes", path)
    return TSet.build([complex_from_json(c, f"{path}.complexes[{k}]") for k, c in enumerate(cs)])


# --------------------------------------------------------------------------
# spectra

def spectrum_to_json(E) -> dict:
    return {"S": complex_to_json(E.S), "truncation": E.N,
            "levels": [complex_to_json(X) for X in E.levels],
            "actions": [[{str(n): matrix_to_json(a[n].matrix) for n in a.degrees()} for a in acts]
                        for acts in E.seq.actions],
            "assembly": [{str(n): matrix_to_json(s[n].matrix) for n in s.degrees()}
                         for s in E.assembly]}


def spectrum_from_json(obj, path: str = "$", validate: bool = False):
    from .monoidal import TensorComplex
    from .spectra import Spectrum, validate_spectrum
    from .symseq import SymSeq
    S = complex_from_json(_need(obj, "S", path), f"{path}.S")
    N = _int(_need(obj, "truncation", path), f"{path}.truncation")
    levels = [complex_from_json(c, f"{path}.levels[{k}]")
              for k, c in enumerate(_need(obj, "levels", path))]
    if len(levels) != N + 1:
        raise ParseError(f"{path}.levels", f"expected {N + 1} levels, got {len(levels)}")
    raw = _need(obj, "actions", path)
    if not isinstance(raw, list) or len(raw) != N + 1:
        raise ParseError(f"{path}.actions", f"expected {N + 1} lists of generators")
    actions = []
    for n, acts in enumerate(raw):
        if not isinstance(acts, list) or len(acts) != max(n - 1, 0):
            raise ParseError(f"{path}.actions[{n}]", f"expected {max(n - 1, 0)} generators")
        X = levels[n]
        actions.append([ChainMap(X, X, components_from_json(a, X, X, f"{path}.actions[{n}][{j}]"))
                        for j, a in enumerate(acts)])
    raw = _need(obj, "assembly", path)
    if not isinstance(raw, list) or len(raw) != N:
        raise ParseError(f"{path}.assembly", f"expected {N} assembly maps")
    assembly = []
    for n, a in enumerate(raw):
        src = TensorComplex([S, levels[n]]).complex
        assembly.append(ChainMap(src, levels[n + 1],
                                 components_from_json(a, src, levels[n + 1], f"{path}.assembly[{n}]")))
    E = Spectrum(S, SymSeq(S.ring, levels, actions, check=False), assembly,
                 name=obj.get("name", ""))
    if validate:
        rep = validate_spectrum(E)
        if not rep.ok:
            raise InvariantViolation("; ".join(rep.lines()))
    return E


# --------------------------------------------------------------------------
# complexes of 𝔸-modules

def acomplex_to_json(X) -> dict:
    mods = {}
    for n in X.degrees():
        M = X.module(n)
        mods[str(n)] = {
            "values": [{"factors": [int(f) for f in V.factors]} for V in M.values],
            "actions": [{"gen": list(g), "matrix": matrix_to_json(f.matrix)}
                        for g, f in sorted(M.actions.items())],
        }
    return {"ring": ring_to_json(X.cat.ring), "ranks": list(X.cat.ranks), "modules": mods,
            "differentials": {str(n): [matrix_to_json(f.matrix) for f in X.d(n).components]
                              for n in X.degrees() if n + 1 in X.modules}}


def acomplex_from_json(obj, path: str = "$"):
    from .presentation import AComplex, AddCategory, AMap, AModule, restrict
    R = ring_from_json(_need(obj, "ring", path), f"{path}.ring")
    ranks = tuple(_int(r, f"{path}.ranks[{k}]") for k, r in enumerate(obj.get("ranks", [1, 2])))
    cat = AddCategory(R, ranks)
    if "restrict" in obj:
        return restrict(complex_from_json(obj["restrict"], f"{path}.restrict"), cat)
    mods = {}
    for key, m in _need(obj, "modules", path).items():
        n = _degree(key, f"{path}.modules")
        p = f"{path}.modules.{key}"
        values = [module_from_json(v, f"{p}.values[{k}]", ring=R)
                  for k, v in enumerate(_need(m, "values", p))]
        if len(values) != len(ranks):
            raise ParseError(f"{p}.values", f"expected {len(ranks)} values")
        actions = {}
        for k, a in enumerate(_need(m, "actions", p)):
            g = tuple(_need(a, "gen", f"{p}.actions[{k}]"))
            if g not in cat.generators():
                raise ParseError(f"{p}.actions[{k}].gen", f"{list(g)} is not a generator")
            mat = matrix_from_json(_need(a, "matrix", f"{p}.actions[{k}]"),
                                   values[g[0]].ngens, values[g[1]].ngens, f"{p}.actions[{k}].matrix")
            actions[g] = ModuleMap(values[g[1]], values[g[0]], mat)
        missing = [g for g in cat.generators() if g not in actions]
        if missing:
            raise ParseError(f"{p}.actions", f"missing generator {list(missing[0])}")
        mods[n] = AModule(cat, values, actions)
    diffs = {}
    for key, ms in (obj.get("differentials") or {}).items():
        n = _degree(key, f"{path}.differentials")
        if n not in mods or n + 1 not in mods:
            raise ParseError(f"{path}.differentials.{key}", "differential between missing degrees")
        comps = [ModuleMap(mods[n].values[k], mods[n + 1].values[k],
                           matrix_from_json(m, mods[n + 1].values[k].ngens, mods[n].values[k].ngens,
                                            f"{path}.differentials.{key}[{k}]"))
                 for k, m in enumerate(ms)]
        diffs[n] = AMap(mods[n], mods[n + 1], comps)
    X = AComplex(cat, mods, diffs)
    bad = X.failures()
    if bad:
        raise InvariantViolation(f"not a complex of additive functors: {bad[0]}")
    return X


# --------------------------------------------------------------------------
# documents

ENCODERS = {
    "ring": ring_to_json, "module": module_to_json, "map": map_to_json,
    "complex": complex_to_json, "chain_map": chain_map_to_json, "descent": descent_to_json,
    "tset": tset_to_json, "spectrum": spectrum_to_json, "acomplex": acomplex_to_json,
}
DECODERS = {
    "ring": ring_from_json, "module": module_from_json, "map": map_from_json,
    "complex": complex_from_json, "chain_map": chain_map_from_json, "descent": descent_from_json,
    "tset": tset_from_json, "spectrum": spectrum_from_json, "acomplex": acomplex_from_json,
}


def dump(obj, kind: str) -> dict:
    doc = {"format": FORMAT_VERSION, "type": kind}
    doc.update(ENCODERS[kind](obj))
    return doc


def dumps(obj, kind: str) -> str:
    return json.dumps(dump(obj, kind), indent=1, sort_keys=True, ensure_ascii=False)


def load(doc: Any, expect: str | tuple | None = None):
    """Decode a document; returns ``(kind, object)``."""
    if not isinstance(doc, dict):
        raise ParseError("$", "expected a JSON object")
    version = doc.get("format")
    if version != FORMAT_VERSION:
        raise ParseError("$.format", f"unsupported format {version!r} (expected {FORMAT_VERSION})")
    kind = doc.get("type")
    if kind not in DECODERS:
        raise ParseError("$.type", f"unknown type {kind!r}")
    if expect is not None:
        allowed = (expect,) if isinstance(expect, str) else expect
        if kind not in allowed:
            raise ParseError("$.type", f"expected {' or '.join(allowed)}, got {kind!r}")
    body = {k: v for k, v in doc.items() if k not in ("format", "type")}
    return kind, DECODERS[kind](body, "$")


def loads(text: str, expect=None):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"line {e.lineno} column {e.colno}", e.msg) from None
    return load(doc, expect)


def read(path: str, expect=None):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ParseError(path, e.strerror or str(e)) from None
    try:
        return loads(text, expect)
    except ParseError as e:
        raise ParseError(f"{path}: {e.path}", e.message) from None
