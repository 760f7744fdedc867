"""File formats: polynomial / generalized-polynomial / tree JSON, truth tables, input sets.

All JSON formats number variables from 1; inside the package they are 0-based bits.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .dtree import DecisionTree
from .genpoly import GenPoly
from .poly import BOOLEAN, EXACT, FLOAT, INTEGER, REAL, MultilinearPoly, TruthTable, bits, mask_of


class FormatError(ValueError):
    """Malformed input file."""


def _vars_to_mask(vs, n: int) -> int:
    vs = list(vs)
    if any(not isinstance(v, int) or v < 1 or v > n for v in vs):
        raise FormatError(f"variable indices must be integers in 1..{n}, got {vs}")
    if len(set(vs)) != len(vs):
        raise FormatError(f"repeated variable in {vs}")
    return mask_of(v - 1 for v in vs)


def _mask_to_vars(m: int) -> list[int]:
    return [i + 1 for i in bits(m)]


def _require(d: dict, *keys):
    if not isinstance(d, dict):
        raise FormatError("expected a JSON object")
    for k in keys:
        if k not in d:
            raise FormatError(f"missing field {k!r}")


# --------------------------------------------------------------------------
# polynomials
# --------------------------------------------------------------------------

def poly_to_json(p: MultilinearPoly) -> dict:
    terms = [{"vars": _mask_to_vars(s), "coeff": c} for s, c in sorted(p.terms.items())]
    return {"n": p.n, "coeff_kind": p.coeff_kind, "terms": terms}


def poly_from_json(d: dict) -> MultilinearPoly:
    _require(d, "n", "terms")
    n = d["n"]
    kind = d.get("coeff_kind", EXACT)
    if kind not in (EXACT, FLOAT):
        raise FormatError(f"coeff_kind must be {EXACT!r} or {FLOAT!r}")
    terms: dict[int, float] = {}
    for t in d["terms"]:
        _require(t, "vars", "coeff")
        s = _vars_to_mask(t["vars"], n)
        if s in terms:
            raise FormatError(f"duplicate monomial {t['vars']}")
        terms[s] = t["coeff"]
    try:
        return MultilinearPoly(n, terms, kind)
    except ValueError as e:
        raise FormatError(str(e)) from e


def genpoly_to_json(g: GenPoly) -> dict:
    terms = [
        {"pos": _mask_to_vars(p), "neg": _mask_to_vars(q), "coeff": c}
        for (p, q), c in sorted(g.monomials.items())
    ]
    return {"n": g.n, "coeff_kind": g.coeff_kind, "terms": terms}


def genpoly_from_json(d: dict) -> GenPoly:
    _require(d, "n", "terms")
    n = d["n"]
    kind = d.get("coeff_kind")
    monos: dict[tuple[int, int], float] = {}
    for t in d["terms"]:
        _require(t, "coeff")
        key = (_vars_to_mask(t.get("pos", []), n), _vars_to_mask(t.get("neg", []), n))
        monos[key] = monos.get(key, 0) + t["coeff"]
    if kind is None:
        kind = EXACT if all(float(c).is_integer() for c in monos.values()) else FLOAT
    try:
        return GenPoly(n, monos, kind)
    except ValueError as e:
        raise FormatError(str(e)) from e


def tree_to_json(t: DecisionTree) -> dict:
    nodes = [nd if "leaf" in nd else {**nd, "var": nd["var"] + 1} for nd in t.nodes()]
    return {"n": t.n, "nodes": nodes, "root": t.root}


def tree_from_json(d: dict) -> DecisionTree:
    _require(d, "n", "nodes")
    nodes = []
    for nd in d["nodes"]:
        if "leaf" in nd:
            nodes.append({"leaf": nd["leaf"]})
        else:
            _require(nd, "var", "lo", "hi")
            nodes.append({"var": nd["var"] - 1, "lo": nd["lo"], "hi": nd["hi"]})
    try:
        return DecisionTree.from_nodes(d["n"], nodes, d.get("root", 0))
    except (ValueError, TypeError) as e:
        raise FormatError(str(e)) from e


def read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: {e}") from e


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


# --------------------------------------------------------------------------
# truth tables and input sets
# --------------------------------------------------------------------------

def table_to_text(f: TruthTable) -> str:
    """First line ``n=<k>``; then 2^k characters for Boolean tables, else spaced numbers."""
    if f.value_kind == BOOLEAN:
        body = "".join(str(int(v)) for v in f.values)
    else:
        body = " ".join(repr(v.item()) for v in f.values)
    return f"n={f.n}\n{body}\n"


def table_from_text(text: str) -> TruthTable:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("n="):
        raise FormatError("truth table must start with a line 'n=<k>'")
    try:
        n = int(lines[0][2:])
    except ValueError as e:
        raise FormatError(f"bad header {lines[0]!r}") from e
    body = " ".join(lines[1:])
    toks = body.split()
    if len(toks) == 1 and set(toks[0]) <= {"0", "1"}:
        vals = np.array([int(ch) for ch in toks[0]], dtype=np.int64)
        kind = BOOLEAN
    else:
        try:
            nums = [float(t) for t in toks]
        except ValueError as e:
            raise FormatError(f"non-numeric table entry: {e}") from e
        if all(v.is_integer() for v in nums):
            vals = np.array([int(v) for v in nums], dtype=np.int64)
            kind = BOOLEAN if set(vals.tolist()) <= {0, 1} else INTEGER
        else:
            vals = np.array(nums)
            kind = REAL
    if len(vals) != 1 << n:
        raise FormatError(f"expected {1 << n} values for n={n}, found {len(vals)}")
    return TruthTable(n, vals, kind)


def read_table(path) -> TruthTable:
    return table_from_text(Path(path).read_text())


def input_to_bits(x: int, n: int) -> str:
    """Character j is x_{j+1}."""
    return "".join(str((x >> j) & 1) for j in range(n))


def bits_to_input(s: str, n: int) -> int:
    s = s.strip()
    if len(s) != n or set(s) - {"0", "1"}:
        raise FormatError(f"expected a bit-string of length {n}, got {s!r}")
    return sum(1 << j for j, ch in enumerate(s) if ch == "1")


def read_input_set(path, n: int) -> list[int]:
    out = []
    for ln in Path(path).read_text().splitlines():
        ln = ln.split("#", 1)[0].strip()
        if ln:
            out.append(bits_to_input(ln, n))
    if not out:
        raise FormatError(f"{path}: no inputs")
    return out


def write_input_set(path, F, n: int) -> None:
    Path(path).write_text("".join(input_to_bits(x, n) + "\n" for x in sorted(F)))
