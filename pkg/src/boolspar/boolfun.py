"""Function zoo and combinatorial measures on Boolean truth tables.

Sensitivity, monotone block sensitivity, minterms/maxterms, separating
sets of inputs, block identification and the independent-zero restriction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable

import numpy as np

from .genpoly import GenPoly
from .poly import BOOLEAN, Restriction, TruthTable, bits, mask_of, popcount

MBS_EXACT_MAX_N = 14
SPOT_CHECK_MAX_N = 16


# --------------------------------------------------------------------------
# function zoo
# --------------------------------------------------------------------------

def _weights(n: int) -> np.ndarray:
    xs = np.arange(1 << n, dtype=np.int64)
    w = np.zeros_like(xs)
    for i in range(n):
        w += (xs >> i) & 1
    return w


def sink_edges(m: int) -> list[tuple[int, int]]:
    """Edge variables of Sink on ``m`` vertices, lexicographic vertex pairs (a < b).

    Bit value 1 orients the edge toward the smaller vertex ``a``.
    """
    return list(combinations(range(m), 2))


def _sink_table(m: int) -> np.ndarray:
    edges = sink_edges(m)
    xs = np.arange(1 << len(edges), dtype=np.int64)
    out = np.zeros_like(xs)
    for v in range(m):
        is_sink = np.ones_like(xs, dtype=bool)
        for e, (a, b) in enumerate(edges):
            bit = (xs >> e) & 1
            if a == v:
                is_sink &= bit == 1
            elif b == v:
                is_sink &= bit == 0
        out |= is_sink
    return out


def _sink_predicate(m: int) -> Callable[[int], int]:
    edges = sink_edges(m)

    def pred(x: int) -> int:
        indeg = [0] * m
        for e, (a, b) in enumerate(edges):
            indeg[a if (x >> e) & 1 else b] += 1
        return int(any(d == m - 1 for d in indeg))

    return pred


def _fmixed_table(n: int) -> np.ndarray:
    xs = np.arange(1 << (n + 2), dtype=np.int64)
    a, b = xs & 1, (xs >> 1) & 1
    y = xs >> 2
    full = (1 << n) - 1
    y_or = (y != 0).astype(np.int64)
    y_and = (y == full).astype(np.int64)
    return np.where(a & b, 1, np.where(a & (1 - b), y_or, np.where((1 - a) & b, y_and, 0)))


def _fmixed_predicate(n: int) -> Callable[[int], int]:
    def pred(x: int) -> int:
        a, b, y = x & 1, (x >> 1) & 1, x >> 2
        if a and b:
            return 1
        if a:
            return int(y != 0)
        if b:
            return int(y == (1 << n) - 1)
        return 0

    return pred


def _zoo_entry(kind: str, k: int):
    """(variable count, vectorized builder, scalar predicate) for a zoo family."""
    if kind == "or":
        return k, lambda: (np.arange(1 << k) != 0), lambda x: int(x != 0)
    if kind == "and":
        return k, lambda: (np.arange(1 << k) == (1 << k) - 1), lambda x: int(x == (1 << k) - 1)
    if kind == "parity":
        return k, lambda: _weights(k) & 1, lambda x: popcount(x) & 1
    if kind == "thr":
        return k, lambda: _weights(k) >= k - 1, lambda x: int(popcount(x) >= k - 1)
    if kind == "majority":
        return k, lambda: 2 * _weights(k) > k, lambda x: int(2 * popcount(x) > k)
    if kind == "and-or2":
        def build():
            xs = np.arange(1 << (2 * k), dtype=np.int64)
            out = np.ones_like(xs)
            for j in range(k):
                out &= ((xs >> (2 * j)) & 3) != 0
            return out
        return 2 * k, build, lambda x: int(all((x >> (2 * j)) & 3 for j in range(k)))
    if kind == "sink":
        return math.comb(k, 2), lambda: _sink_table(k), _sink_predicate(k)
    if kind == "fmixed":
        return k + 2, lambda: _fmixed_table(k), _fmixed_predicate(k)
    raise ValueError(f"unknown function family {kind!r}")


ZOO_FAMILIES = ("or", "and", "parity", "thr", "majority", "and-or2", "sink", "fmixed")

_MIN_PARAM = {"or": 1, "and": 1, "parity": 1, "thr": 2, "majority": 1, "and-or2": 1, "sink": 2, "fmixed": 1}


@dataclass(frozen=True)
class NamedFunction:
    name: str
    param: int
    table: TruthTable = field(repr=False)

    @property
    def spec(self) -> str:
        return f"{self.name}:{self.param}"

    @property
    def n(self) -> int:
        return self.table.n


def named(kind: str, k: int) -> NamedFunction:
    """Build a zoo function; for n <= 16 the table is re-checked against a scalar predicate."""
    if k < _MIN_PARAM.get(kind, 1):
        raise ValueError(f"{kind}:{k} needs parameter >= {_MIN_PARAM.get(kind, 1)}")
    n, build, pred = _zoo_entry(kind, k)
    table = TruthTable(n, np.asarray(build()).astype(np.int64), BOOLEAN)
    if n <= SPOT_CHECK_MAX_N:
        expect = np.fromiter((pred(x) for x in range(1 << n)), dtype=np.int64, count=1 << n)
        if not np.array_equal(expect, table.values):
            raise AssertionError(f"{kind}:{k} table disagrees with its defining predicate")
    return NamedFunction(kind, k, table)


def parse_function(spec: str) -> NamedFunction:
    """Parse ``family:N`` (e.g. ``or:8``, ``thr:8``, ``sink:4``)."""
    kind, sep, arg = spec.partition(":")
    if not sep or kind not in ZOO_FAMILIES:
        raise ValueError(f"unknown function spec {spec!r}; families: {', '.join(ZOO_FAMILIES)}")
    try:
        k = int(arg)
    except ValueError:
        raise ValueError(f"bad parameter in function spec {spec!r}") from None
    return named(kind, k)


def or_fn(n: int) -> TruthTable:
    return named("or", n).table


def and_fn(n: int) -> TruthTable:
    return named("and", n).table


def parity_fn(n: int) -> TruthTable:
    return named("parity", n).table


def thr_fn(n: int) -> TruthTable:
    """Thr^n_{n-1}: 1 iff at most one coordinate is 0."""
    return named("thr", n).table


def majority_fn(n: int) -> TruthTable:
    return named("majority", n).table


def and_or2_fn(n: int) -> TruthTable:
    """AND_n of n disjoint OR_2 blocks on variable pairs (2j, 2j+1)."""
    return named("and-or2", n).table


def sink_fn(m: int) -> TruthTable:
    return named("sink", m).table


def fmixed_fn(n: int) -> TruthTable:
    """f_mixed on 2 + n variables: address bits x1, x2 then the data block y."""
    return named("fmixed", n).table


def or_genpoly(n: int) -> GenPoly:
    """OR_n = 1 - prod xbar_i."""
    return GenPoly(n, {(0, 0): 1, (0, (1 << n) - 1): -1})


def sink_genpoly(m: int) -> GenPoly:
    """One monomial per vertex: every incident edge oriented into it."""
    edges = sink_edges(m)
    mons = {}
    for v in range(m):
        pos = neg = 0
        for e, (a, b) in enumerate(edges):
            if a == v:
                pos |= 1 << e
            elif b == v:
                neg |= 1 << e
        mons[(pos, neg)] = 1
    return GenPoly(len(edges), mons)


def fmixed_genpoly(n: int) -> GenPoly:
    """x1 x2 + x1 ~x2 (1 - prod ~y) + ~x1 x2 prod y, written as four monomials."""
    y = ((1 << n) - 1) << 2
    return GenPoly(n + 2, {(0b11, 0): 1, (0b01, 0b10): 1, (0b01, 0b10 | y): -1, (0b10 | y, 0b01): 1})


# --------------------------------------------------------------------------
# sensitivity
# --------------------------------------------------------------------------

def sensitive_set(f: TruthTable, x: int) -> int:
    """Mask of coordinates i with f(x xor e_i) != f(x)."""
    v = f.values
    s = 0
    for i in range(f.n):
        if v[x] != v[x ^ (1 << i)]:
            s |= 1 << i
    return s


def sensitivity_counts(f: TruthTable) -> np.ndarray:
    """|S(f, x)| for every input x."""
    v = f.values
    xs = np.arange(1 << f.n)
    out = np.zeros(1 << f.n, dtype=np.int64)
    for i in range(f.n):
        out += v != v[xs ^ (1 << i)]
    return out


def sensitivity(f: TruthTable) -> int:
    return int(sensitivity_counts(f).max())


def restrict_table(f: TruthTable, rho: Restriction) -> TruthTable:
    """f|rho as a table over the free variables of ``rho`` in ascending order.

    Variables outside the restriction's domain are treated as fixed to 0.
    """
    free = rho.free_vars
    k = len(free)
    if k == 0:
        return TruthTable(1, np.repeat(f.values[rho.ones], 2), f.value_kind)
    ys = np.arange(1 << k, dtype=np.int64)
    idx = np.full(1 << k, rho.ones, dtype=np.int64)
    for j, var in enumerate(free):
        idx |= ((ys >> j) & 1) << var
    return TruthTable(k, f.values[idx], f.value_kind)


def restricted_sensitivity(f: TruthTable, rho: Restriction) -> int:
    """s(f|rho); 0 when every variable is fixed."""
    if rho.free_count == 0:
        return 0
    return sensitivity(restrict_table(f, rho))


def compress(x: int, vars_: list[int]) -> int:
    """Project ``x`` onto ``vars_``, packing the bits densely in that order."""
    out = 0
    for j, v in enumerate(vars_):
        out |= ((x >> v) & 1) << j
    return out


# --------------------------------------------------------------------------
# monotone functions, critical inputs
# --------------------------------------------------------------------------

def is_monotone(f: TruthTable) -> bool:
    v = f.values
    xs = np.arange(1 << f.n)
    for i in range(f.n):
        lo = xs[(xs >> i) & 1 == 0]
        if np.any(v[lo] > v[lo | (1 << i)]):
            return False
    return True


@dataclass(frozen=True)
class CriticalInputs:
    M0: frozenset
    M1: frozenset

    @property
    def M(self) -> int:
        return len(self.M0) + len(self.M1)


def critical_inputs(f: TruthTable) -> CriticalInputs:
    """Critical 0-inputs (zeros exactly on a maxterm) and 1-inputs (ones exactly on a minterm).

    For monotone f, x is a critical 1-input iff f(x) = 1 and clearing any single
    1-bit of x drops f to 0; dually for critical 0-inputs.
    """
    if f.value_kind != BOOLEAN:
        raise ValueError("critical inputs need a Boolean function")
    if not is_monotone(f):
        raise ValueError("critical inputs are defined for monotone functions only")
    v = f.values
    xs = np.arange(1 << f.n)
    c1 = v == 1
    c0 = v == 0
    for i in range(f.n):
        b = 1 << i
        has = (xs & b) != 0
        c1 &= ~has | (v[xs ^ b] == 0)
        c0 &= has | (v[xs ^ b] == 1)
    return CriticalInputs(frozenset(np.flatnonzero(c0).tolist()), frozenset(np.flatnonzero(c1).tolist()))


# --------------------------------------------------------------------------
# separating sets
# --------------------------------------------------------------------------

def _as_set(F: Iterable[int]) -> frozenset:
    items = list(F)
    s = frozenset(items)
    if len(s) != len(items):
        raise ValueError("input collection contains duplicates; a separating set must be a set")
    return s


def is_separating(F: Iterable[int], f: TruthTable) -> bool:
    """Every distinct pair differs somewhere on the union of their sensitive coordinates."""
    items = sorted(_as_set(F))
    sens = [sensitive_set(f, x) for x in items]
    for a in range(len(items)):
        for b in range(a + 1, len(items)):
            B = sens[a] | sens[b]
            if (items[a] ^ items[b]) & B == 0:
                return False
    return True


def restrict_set(F: Iterable[int], rho: Restriction) -> frozenset:
    """Members consistent with the set variables of ``rho``, projected to its free variables.

    Projections are packed in the same order as ``restrict_table`` uses.
    """
    free = rho.free_vars
    return frozenset(
        compress(w, free) for w in F if (w & rho.set_vars) == rho.ones
    )


def dense_sensitive_subset(F: Iterable[int], f: TruthTable) -> tuple[int, frozenset]:
    """Coordinate i sensitive for the most members of F, and those members.

    Ties go to the smallest index.  The chosen subset has at least |F|/(2n)
    members whenever F is separating with |F| >= 2.
    """
    F = _as_set(F)
    if len(F) < 2:
        raise ValueError("need at least two inputs")
    sens = {x: sensitive_set(f, x) for x in F}
    best_i, best = 0, frozenset()
    for i in range(f.n):
        sub = frozenset(x for x in F if sens[x] >> i & 1)
        if len(sub) > len(best):
            best_i, best = i, sub
    if 2 * f.n * len(best) < len(F):
        raise ValueError("density bound fails; the input set is not separating")
    return best_i, best


# --------------------------------------------------------------------------
# monotone block sensitivity
# --------------------------------------------------------------------------

def minimal_sensitive_zero_blocks(f: TruthTable, x: int) -> list[int]:
    """Inclusion-minimal B within the zeros of x with f(x | B) != f(x)."""
    zeros = bits(~x & ((1 << f.n) - 1))
    k = len(zeros)
    if k == 0:
        return []
    ys = np.arange(1 << k, dtype=np.int64)
    full = np.full(1 << k, x, dtype=np.int64)
    for j, var in enumerate(zeros):
        full |= ((ys >> j) & 1) << var
    sens = f.values[full] != f.values[x]
    # below[y]: some subset of y (including y) is sensitive
    below = sens.copy()
    for j in range(k):
        v = below.reshape(-1, 2, 1 << j)
        v[:, 1, :] |= v[:, 0, :]
    proper = np.zeros_like(sens)
    for j in range(k):
        has = ((ys >> j) & 1) == 1
        proper[has] |= below[ys[has] ^ (1 << j)]
    minimal = np.flatnonzero(sens & ~proper)
    return [int(full[y] & ~x) for y in minimal]


def max_disjoint_packing(blocks: list[int], universe: int) -> int:
    """Largest number of pairwise disjoint blocks (exact branch and bound)."""
    blocks = sorted(set(blocks), key=lambda b: (popcount(b), b))
    best = 0

    def rec(avail: int, used: int, cands: list[int]):
        nonlocal best
        if used > best:
            best = used
        if not cands:
            return
        # every further block consumes at least one still-available element
        if used + min(len(cands), popcount(avail)) <= best:
            return
        e = (avail & -avail)
        with_e = [b for b in cands if b & e]
        without_e = [b for b in cands if not b & e]
        for b in with_e:
            rest = avail & ~b
            rec(rest, used + 1, [c for c in without_e if not c & b])
        rec(avail & ~e, used, without_e)

    usable = 0
    for b in blocks:
        usable |= b
    rec(usable & universe, 0, [b for b in blocks if b & ~universe == 0])
    return best


def _greedy_packing(blocks: list[int]) -> int:
    used = 0
    count = 0
    for b in sorted(blocks, key=lambda b: (popcount(b), b)):
        if not b & used:
            used |= b
            count += 1
    return count


def mbs_at(f: TruthTable, x: int, exact: bool = True) -> int:
    blocks = minimal_sensitive_zero_blocks(f, x)
    if not blocks:
        return 0
    if exact:
        return max_disjoint_packing(blocks, ~x & ((1 << f.n) - 1))
    return _greedy_packing(blocks)


def mbs(f: TruthTable, exact: bool = True) -> int:
    """Monotone block sensitivity.

    Exact mode packs minimal sensitive 0-blocks optimally and is limited to
    n <= 14.  ``exact=False`` packs greedily and returns a lower bound.
    Constant functions have MBS 0.
    """
    if f.value_kind != BOOLEAN:
        raise ValueError("MBS needs a Boolean function")
    if exact and f.n > MBS_EXACT_MAX_N:
        raise ValueError(f"exact MBS limited to n <= {MBS_EXACT_MAX_N}; pass exact=False")
    order = sorted(range(1 << f.n), key=lambda x: popcount(x))
    best = 0
    for x in order:
        if f.n - popcount(x) <= best:
            break  # remaining inputs have too few zeros to beat best
        best = max(best, mbs_at(f, x, exact))
    return best


def identify_blocks(f: TruthTable, z: int, blocks: list[int]) -> TruthTable:
    """g(y) = f(z with every variable of block i set to y_i)."""
    seen = 0
    for b in blocks:
        if b & seen:
            raise ValueError("blocks overlap")
        if b & z:
            raise ValueError("z is not zero on every block")
        if b == 0:
            raise ValueError("empty block")
        seen |= b
    k = len(blocks)
    if k == 0:
        raise ValueError("need at least one block")
    ys = np.arange(1 << k, dtype=np.int64)
    idx = np.full(1 << k, z, dtype=np.int64)
    for j, b in enumerate(blocks):
        idx |= np.where((ys >> j) & 1, b, 0)
    return TruthTable(k, f.values[idx], f.value_kind)


def independent_zero_restriction(k: int, rng: np.random.Generator) -> Restriction:
    """Each of k variables independently fixed to 0 or left free, probability 1/2 each."""
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(rng)
    coins = rng.random(k) < 0.5
    free = mask_of(np.flatnonzero(coins).tolist())
    full = (1 << k) - 1
    return Restriction(k, zeros=full & ~free, free=free)


def zero_restriction_survival(k: int, monomials: list[int], trials: int, seed: int) -> list[float]:
    """Fraction of independent-zero restrictions leaving each monomial alive (no variable fixed to 0)."""
    rng = np.random.default_rng(seed)
    free = rng.random((trials, k)) < 0.5
    weights = 1 << np.arange(k, dtype=np.int64)
    masks = (free * weights).sum(axis=1)
    return [float(np.mean((masks & m) == m)) for m in monomials]
