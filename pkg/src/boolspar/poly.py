"""Multilinear polynomials in the De Morgan basis over {0,1}^n.

Variables are 0-based internally: bit ``i`` of a subset mask stands for
``x_{i+1}``.  Truth tables are indexed the same way, so entry ``x`` of a
table holds ``f`` evaluated at the input whose 1-coordinates are the bits
of ``x``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

MAX_VARS = 24

BOOLEAN, INTEGER, REAL = "boolean", "integer", "real"
EXACT, FLOAT = "int", "real"


def popcount(x: int) -> int:
    return bin(x).count("1")


def bits(mask: int) -> list[int]:
    """Indices of the set bits of ``mask``, ascending."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def submasks(mask: int):
    """All submasks of ``mask`` (including 0 and ``mask``)."""
    s = mask
    while True:
        yield s
        if s == 0:
            return
        s = (s - 1) & mask


def _check_n(n: int) -> None:
    if not 1 <= n <= MAX_VARS:
        raise ValueError(f"variable count n={n} outside supported range 1..{MAX_VARS}")


@dataclass(frozen=True, eq=False)
class TruthTable:
    """A function on {0,1}^n stored as its 2^n values."""

    n: int
    values: np.ndarray
    value_kind: str = BOOLEAN

    def __post_init__(self):
        _check_n(self.n)
        vals = np.asarray(self.values)
        if vals.shape != (1 << self.n,):
            raise ValueError(f"expected {1 << self.n} values, got shape {vals.shape}")
        if self.value_kind == BOOLEAN:
            if not np.isin(vals, (0, 1)).all():
                raise ValueError("boolean table has entries outside {0,1}")
            vals = vals.astype(np.int64)
        elif self.value_kind == INTEGER:
            if vals.dtype.kind == "f" and not np.all(vals == np.round(vals)):
                raise ValueError("integer table has non-integral entries")
            vals = vals.astype(np.int64)
        elif self.value_kind == REAL:
            vals = vals.astype(np.float64)
        else:
            raise ValueError(f"unknown value_kind {self.value_kind!r}")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_function(cls, n: int, fn, value_kind: str = BOOLEAN) -> "TruthTable":
        return cls(n, np.array([fn(x) for x in range(1 << n)]), value_kind)

    def __call__(self, x: int):
        return self.values[x].item()

    def __eq__(self, other):
        if not isinstance(other, TruthTable):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash((self.n, self.values.tobytes()))

    @property
    def is_constant(self) -> bool:
        return bool(np.all(self.values == self.values[0]))


@dataclass(frozen=True, eq=False)
class MultilinearPoly:
    """Sum of ``a_S * prod_{i in S} x_i`` with the zero coefficients dropped."""

    n: int
    terms: Mapping[int, float] = field(default_factory=dict)
    coeff_kind: str = EXACT

    def __post_init__(self):
        if self.coeff_kind not in (EXACT, FLOAT):
            raise ValueError(f"unknown coeff_kind {self.coeff_kind!r}")
        limit = 1 << self.n
        clean = {}
        for s, c in self.terms.items():
            s = int(s)
            if s < 0 or s >= limit:
                raise ValueError(f"subset mask {s} outside [n] for n={self.n}")
            if self.coeff_kind == EXACT:
                if c != int(c):
                    raise ValueError(f"non-integral coefficient {c} in exact polynomial")
                c = int(c)
            else:
                c = float(c)
            if c != 0:
                clean[s] = c
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "_key", None)

    def __eq__(self, other):
        if not isinstance(other, MultilinearPoly):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash(self.key)

    @property
    def key(self):
        k = self._key
        if k is None:
            k = (self.n, frozenset(self.terms.items()))
            object.__setattr__(self, "_key", k)
        return k

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def deg(self) -> int:
        return max((popcount(s) for s in self.terms), default=0)

    @property
    def spar(self) -> int:
        return len(self.terms)

    @property
    def l1(self):
        return sum(abs(c) for c in self.terms.values())

    @property
    def vars(self) -> int:
        """Mask of the variables appearing in some stored monomial."""
        v = 0
        for s in self.terms:
            v |= s
        return v

    def __call__(self, x: int):
        return eval_poly(self, x)

    def __add__(self, other: "MultilinearPoly") -> "MultilinearPoly":
        return add(self, other)

    def __sub__(self, other: "MultilinearPoly") -> "MultilinearPoly":
        return add(self, scale(other, -1))

    def __mul__(self, other: "MultilinearPoly") -> "MultilinearPoly":
        return mul(self, other)

    def __repr__(self):
        if not self.terms:
            return f"MultilinearPoly(n={self.n}, 0)"
        parts = []
        for s in sorted(self.terms, key=lambda s: (popcount(s), s)):
            mono = "*".join(f"x{i + 1}" for i in bits(s)) or "1"
            parts.append(f"{self.terms[s]}*{mono}")
        return f"MultilinearPoly(n={self.n}, {' + '.join(parts)})"


def constant(n: int, c=1, coeff_kind: str = EXACT) -> MultilinearPoly:
    return MultilinearPoly(n, {0: c}, coeff_kind)


def monomial(n: int, s: int, c=1, coeff_kind: str = EXACT) -> MultilinearPoly:
    return MultilinearPoly(n, {s: c}, coeff_kind)


def _kind(*polys: MultilinearPoly) -> str:
    return EXACT if all(p.coeff_kind == EXACT for p in polys) else FLOAT


def add(p: MultilinearPoly, q: MultilinearPoly) -> MultilinearPoly:
    out = dict(p.terms)
    for s, c in q.terms.items():
        out[s] = out.get(s, 0) + c
    return MultilinearPoly(max(p.n, q.n), out, _kind(p, q))


def scale(p: MultilinearPoly, c) -> MultilinearPoly:
    kind = p.coeff_kind if isinstance(c, (int, np.integer)) else FLOAT
    return MultilinearPoly(p.n, {s: a * c for s, a in p.terms.items()}, kind)


def mul(p: MultilinearPoly, q: MultilinearPoly) -> MultilinearPoly:
    """Product reduced with x_i^2 = x_i (monomials multiply by set union)."""
    out: dict[int, float] = {}
    for s, a in p.terms.items():
        for t, b in q.terms.items():
            u = s | t
            out[u] = out.get(u, 0) + a * b
    return MultilinearPoly(max(p.n, q.n), out, _kind(p, q))


def _nonzero_terms(a: np.ndarray) -> dict[int, float]:
    idx = np.flatnonzero(a)
    return dict(zip(idx.tolist(), a[idx].tolist()))


def mobius_from_table(f: TruthTable) -> MultilinearPoly:
    """Unique multilinear representation of ``f`` via the subset Möbius transform."""
    _check_n(f.n)
    exact = f.value_kind in (BOOLEAN, INTEGER)
    a = f.values.astype(np.int64 if exact else np.float64)
    for i in range(f.n):
        v = a.reshape(-1, 2, 1 << i)
        v[:, 1, :] -= v[:, 0, :]
    return MultilinearPoly(f.n, _nonzero_terms(a), EXACT if exact else FLOAT)


def poly_values(p: MultilinearPoly) -> np.ndarray:
    """All 2^n values of ``p`` by the zeta (subset-sum) transform."""
    _check_n(p.n)
    a = np.zeros(1 << p.n, dtype=np.int64 if p.coeff_kind == EXACT else np.float64)
    if p.terms:
        a[np.fromiter(p.terms.keys(), dtype=np.int64, count=len(p.terms))] = list(p.terms.values())
    for i in range(p.n):
        v = a.reshape(-1, 2, 1 << i)
        v[:, 1, :] += v[:, 0, :]
    return a


def table_from_poly(p: MultilinearPoly) -> TruthTable:
    vals = poly_values(p)
    if p.coeff_kind == FLOAT:
        kind = REAL
    elif np.isin(vals, (0, 1)).all():
        kind = BOOLEAN
    else:
        kind = INTEGER
    return TruthTable(p.n, vals, kind)


def eval_poly(p: MultilinearPoly, x: int):
    return sum(c for s, c in p.terms.items() if s & ~x == 0)


def measures(p: MultilinearPoly) -> dict:
    return {"deg": p.deg, "spar": p.spar, "l1": p.l1, "is_zero": p.is_zero}


@dataclass(frozen=True)
class Restriction:
    """Partial assignment ``V -> {0, 1, *}`` given by three disjoint masks."""

    n: int
    zeros: int = 0
    ones: int = 0
    free: int = 0

    def __post_init__(self):
        if self.zeros & self.ones or self.zeros & self.free or self.ones & self.free:
            raise ValueError("a variable received more than one assignment")
        if self.domain >> self.n:
            raise ValueError("restriction mentions variables outside [n]")

    STAR = "*"

    @classmethod
    def from_assign(cls, n: int, assign: Mapping[int, object]) -> "Restriction":
        """Build from ``{var_index: 0 | 1 | '*'}`` with 0-based indices."""
        z = o = fr = 0
        for i, a in assign.items():
            if a == cls.STAR:
                fr |= 1 << i
            elif a == 0:
                z |= 1 << i
            elif a == 1:
                o |= 1 << i
            else:
                raise ValueError(f"bad assignment {a!r} for x{i + 1}")
        return cls(n, z, o, fr)

    @property
    def domain(self) -> int:
        return self.zeros | self.ones | self.free

    @property
    def set_vars(self) -> int:
        return self.zeros | self.ones

    @property
    def free_count(self) -> int:
        return popcount(self.free)

    @property
    def free_vars(self) -> list[int]:
        return bits(self.free)

    @property
    def assign(self) -> dict[int, object]:
        out: dict[int, object] = {}
        for i in bits(self.domain):
            b = 1 << i
            out[i] = 0 if self.zeros & b else 1 if self.ones & b else self.STAR
        return out

    def extend(self, y: int) -> int:
        """Full input agreeing with the restriction, free coordinates read from ``y``."""
        return self.ones | (y & self.free)

    def free_inputs(self):
        """Every full input consistent with the restriction (vars outside the domain at 0)."""
        for y in submasks(self.free):
            yield self.ones | y

    def __str__(self):
        a = self.assign
        return "".join(
            "*" if a.get(i) == self.STAR else "-" if i not in a else str(a[i]) for i in range(self.n)
        )


def restrict_poly(p: MultilinearPoly, rho: Restriction) -> MultilinearPoly:
    """Substitute the set variables of ``rho``; merged coefficients that cancel vanish."""
    out: dict[int, float] = {}
    for s, c in p.terms.items():
        if s & rho.zeros:
            continue
        t = s & ~rho.ones
        out[t] = out.get(t, 0) + c
    return MultilinearPoly(p.n, out, p.coeff_kind)


def fix_var(p: MultilinearPoly, i: int, u: int) -> MultilinearPoly:
    b = 1 << i
    return restrict_poly(p, Restriction(p.n, zeros=0 if u else b, ones=b if u else 0))


def decompose(p: MultilinearPoly, i: int) -> tuple[MultilinearPoly, MultilinearPoly]:
    """Split ``p = R1 * x_i + R0`` with neither part mentioning ``x_i``."""
    if not 0 <= i < p.n:
        raise ValueError(f"variable index {i} outside [n]")
    b = 1 << i
    r1 = {s & ~b: c for s, c in p.terms.items() if s & b}
    r0 = {s: c for s, c in p.terms.items() if not s & b}
    return MultilinearPoly(p.n, r1, p.coeff_kind), MultilinearPoly(p.n, r0, p.coeff_kind)


def l1_tail(p: MultilinearPoly, d: int):
    """Total |coefficient| on monomials of degree at least ``d``."""
    return sum(abs(c) for s, c in p.terms.items() if popcount(s) >= d)


def truncate_tail(p: MultilinearPoly, d: int) -> MultilinearPoly:
    """Drop every monomial of degree >= ``d``."""
    if d < 0:
        raise ValueError("degree cutoff must be non-negative")
    return MultilinearPoly(p.n, {s: c for s, c in p.terms.items() if popcount(s) < d}, p.coeff_kind)
