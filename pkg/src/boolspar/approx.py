"""Explicit approximators for OR and Thr^n_{n-1}, error amplification and term sampling.

An approximator here is a polynomial Q with |Q(x) - f(x)| <= 1/3 on every
input.  Each construction below comes with an exact (or level-wise)
check of that error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .poly import (
    EXACT,
    FLOAT,
    MAX_VARS,
    MultilinearPoly,
    TruthTable,
    mobius_from_table,
    poly_values,
    popcount,
    truncate_tail,
)

APPROX_ERROR = 1 / 3
# values within this distance of {0, 1} are pulled inside 1/3 by g then 4 rounds of h
AMPLIFY_BAND = 0.44
CHEBYSHEV_MAX_N = 400


# --------------------------------------------------------------------------
# Chebyshev polynomials and the OR approximator
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ChebyshevPoly:
    """T_d with exact integer coefficients, ``coeffs[j]`` multiplying z^j."""

    d: int
    coeffs: tuple

    def __call__(self, z):
        out = 0
        for c in reversed(self.coeffs):
            out = out * z + c
        return out

    @property
    def max_abs_coeff(self) -> int:
        return max(abs(c) for c in self.coeffs)


def chebyshev_T(d: int) -> ChebyshevPoly:
    """T_0 = 1, T_1 = z, T_d = 2z T_{d-1} - T_{d-2}."""
    if d < 0:
        raise ValueError("degree must be non-negative")
    prev, cur = [1], [0, 1]
    if d == 0:
        return ChebyshevPoly(0, (1,))
    for _ in range(d - 1):
        nxt = [0] + [2 * c for c in cur]
        for j, c in enumerate(prev):
            nxt[j] -= c
        prev, cur = cur, nxt
    return ChebyshevPoly(d, tuple(cur))


@dataclass(frozen=True)
class SymmetricPoly:
    """q(x) = sum_k c_k * e_k(x), where e_k is the sum of all degree-k monomials.

    At Hamming weight m the value is sum_k C(m, k) c_k.  ``exact`` keeps the
    rational coefficients; ``level_coeffs`` are their float images.
    """

    n: int
    exact: tuple

    @property
    def level_coeffs(self) -> tuple:
        return tuple(float(c) for c in self.exact)

    @property
    def deg(self) -> int:
        return max((k for k, c in enumerate(self.exact) if c != 0), default=0)

    @property
    def spar(self) -> int:
        return sum(math.comb(self.n, k) for k, c in enumerate(self.exact) if c != 0)

    @property
    def l1(self) -> float:
        return float(sum(abs(c) * math.comb(self.n, k) for k, c in enumerate(self.exact)))

    def level_value(self, m: int) -> Fraction:
        return sum((math.comb(m, k) * c for k, c in enumerate(self.exact) if k <= m), Fraction(0))

    def level_values(self) -> list[Fraction]:
        return [self.level_value(m) for m in range(self.n + 1)]

    def to_multilinear(self) -> MultilinearPoly:
        if self.n > MAX_VARS:
            raise ValueError(f"expansion to {self.n} variables is too large")
        c = self.level_coeffs
        terms = {}
        for s in range(1 << self.n):
            k = popcount(s)
            if k < len(c) and c[k] != 0:
                terms[s] = c[k]
        return MultilinearPoly(self.n, terms, FLOAT)


def or_approx_degree(n: int) -> int:
    """ceil(2 sqrt n) in integer arithmetic."""
    d = math.isqrt(4 * n)
    return d if d * d == 4 * n else d + 1


def chebyshev_or_approximator(n: int) -> SymmetricPoly:
    """q(x) = p(|x|) with p(z) = 1 - T_d((n-z)/(n-1)) / T_d(n/(n-1)), d = ceil(2 sqrt n).

    The degree-k coefficient is the k-th forward difference of p at 0,
    computed in exact rational arithmetic.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    if n > CHEBYSHEV_MAX_N:
        raise ValueError(f"n > {CHEBYSHEV_MAX_N}: float coefficients would lose all precision")
    d = or_approx_degree(n)
    T = chebyshev_T(d)
    top = T(Fraction(n, n - 1))
    p = [1 - T(Fraction(n - z, n - 1)) / top for z in range(min(d, n) + 1)]
    coeffs = [
        sum((Fraction((-1) ** (k - j) * math.comb(k, j)) * p[j] for j in range(k + 1)), Fraction(0))
        for k in range(len(p))
    ]
    return SymmetricPoly(n, tuple(coeffs))


def symmetric_max_error(q: SymmetricPoly, level_target) -> float:
    """max over Hamming levels m of |q(m) - target(m)|, evaluated exactly."""
    return float(max(abs(v - level_target(m)) for m, v in enumerate(q.level_values())))


def or_level(m: int) -> int:
    return int(m > 0)


# --------------------------------------------------------------------------
# Thr^n_{n-1} via a separating collection
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SeparatingCollection:
    """Pairs (S1, S2) of subsets of [n]; a pair splits {i, j} when S1 or S2 does."""

    n: int
    pairs: tuple

    @property
    def t(self) -> int:
        return len(self.pairs)

    def split_counts(self) -> np.ndarray:
        """counts[i, j] = number of pairs that split {i, j}."""
        n = self.n
        idx = np.arange(n)
        s1 = np.array([[(a >> i) & 1 for i in idx] for a, _ in self.pairs], dtype=bool).reshape(-1, n)
        s2 = np.array([[(b >> i) & 1 for i in idx] for _, b in self.pairs], dtype=bool).reshape(-1, n)
        split = (s1[:, :, None] != s1[:, None, :]) | (s2[:, :, None] != s2[:, None, :])
        return split.sum(axis=0)

    @property
    def delta(self) -> Fraction:
        """Smallest fraction of pairs splitting any {i, j}."""
        c = self.split_counts()
        iu = np.triu_indices(self.n, 1)
        return Fraction(int(c[iu].min()), self.t)

    def is_separating(self, delta: Fraction = Fraction(2, 3)) -> bool:
        return self.delta >= delta


def default_collection_size(n: int) -> int:
    return math.ceil(216 * math.log(n * n))


@dataclass(frozen=True)
class ThrApproximation:
    """g = scaled / t, with ``scaled`` an exact integer polynomial."""

    collection: SeparatingCollection
    scaled: MultilinearPoly
    attempts: int

    @property
    def t(self) -> int:
        return self.collection.t

    @property
    def poly(self) -> MultilinearPoly:
        return MultilinearPoly(self.scaled.n, {s: c / self.t for s, c in self.scaled.terms.items()}, FLOAT)

    @property
    def spar(self) -> int:
        return self.scaled.spar


def pair_terms(n: int, s1: int, s2: int) -> dict[int, int]:
    """(A1 + B1 - X)(A2 + B2 - X) in the De Morgan basis.

    A_j, B_j are the AND over S_j and its complement, X the AND of all
    variables.  Using X * A = X and X^2 = X the product is
    A1A2 + A1B2 + B1A2 + B1B2 - 3X.
    """
    full = (1 << n) - 1
    c1, c2 = full & ~s1, full & ~s2
    out: dict[int, int] = {}
    for m in (s1 | s2, s1 | c2, c1 | s2, c1 | c2):
        out[m] = out.get(m, 0) + 1
    out[full] = out.get(full, 0) - 3
    return out


def thr_scaled_poly(coll: SeparatingCollection) -> MultilinearPoly:
    terms: dict[int, int] = {}
    for s1, s2 in coll.pairs:
        for m, c in pair_terms(coll.n, s1, s2).items():
            terms[m] = terms.get(m, 0) + c
    return MultilinearPoly(coll.n, terms, EXACT)


def thr_fn_values(n: int) -> np.ndarray:
    xs = np.arange(1 << n)
    w = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        w += (xs >> i) & 1
    return (w >= n - 1).astype(np.int64)


def check_thr_approximation(approx: ThrApproximation) -> dict:
    """Exhaustive integer check: t*g = t on 1-inputs and 0 <= 3*t*g <= t on 0-inputs."""
    n, t = approx.scaled.n, approx.t
    vals = poly_values(approx.scaled)
    target = thr_fn_values(n).astype(bool)
    ones_ok = bool(np.all(vals[target] == t))
    zeros = vals[~target]
    zeros_ok = bool(np.all(3 * zeros <= t) and np.all(zeros >= 0))
    err = float(np.max(np.abs(vals / t - target)))
    return {"ones_exact": ones_ok, "zeros_within_third": zeros_ok, "max_error": err}


def thr_approximator(n: int, t: int | None = None, seed: int = 0,
                     max_attempts: int = 1000) -> ThrApproximation:
    """Approximator for Thr^n_{n-1} from a random 2/3-separating collection.

    Collections of ``t`` random pairs are drawn until one is exactly
    2/3-separating, then g = (1/t) * sum of the pair products.
    """
    if n < 3:
        raise ValueError("need n >= 3")
    if n > MAX_VARS:
        raise ValueError(f"n > {MAX_VARS} is out of range")
    if t is None:
        t = default_collection_size(n)
    if t < 1:
        raise ValueError("collection size must be positive")
    rng = np.random.default_rng(seed)
    weights = 1 << np.arange(n, dtype=np.int64)
    for attempt in range(1, max_attempts + 1):
        bitsets = rng.integers(0, 2, size=(t, 2, n), dtype=np.int64)
        masks = (bitsets * weights).sum(axis=2)
        coll = SeparatingCollection(n, tuple((int(a), int(b)) for a, b in masks))
        if coll.is_separating():
            return ThrApproximation(coll, thr_scaled_poly(coll), attempt)
    raise RuntimeError(f"no 2/3-separating collection of size {t} in {max_attempts} attempts; try a larger t")


# --------------------------------------------------------------------------
# amplification, truncation, sampling
# --------------------------------------------------------------------------

def cubic_h(y):
    """h(y) = 3y^2 - 2y^3: fixes 0, 1/2, 1 and pulls everything else toward 0 or 1."""
    return 3 * y * y - 2 * y * y * y


def cubic_g(y):
    """Entry map (y + h(y)) / 2, a gentler contraction that keeps the 0.44 band in range."""
    return (y + cubic_h(y)) / 2


def amplifier_map(y, k: int):
    """h applied k times after g."""
    y = cubic_g(np.asarray(y, dtype=np.float64))
    for _ in range(k):
        y = cubic_h(y)
    return y


def distance_to_bits(y) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64)
    return np.minimum(np.abs(y), np.abs(y - 1))


def amplify(p: MultilinearPoly, k: int, band: float = AMPLIFY_BAND) -> MultilinearPoly:
    """Multilinear form of amplifier_map(P(x), k).

    Composition followed by x_i^2 = x_i reduction agrees with the pointwise
    map on the cube, so the result is the Moebius transform of the mapped
    values.  Its degree is at most 3^(k+1) * deg(P).
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    vals = poly_values(p).astype(np.float64)
    dist = distance_to_bits(vals)
    bad = np.flatnonzero(dist > band + 1e-12)
    if bad.size:
        x = int(bad[0])
        raise ValueError(f"precondition violated: P({x:0{p.n}b}) = {vals[x]} is not within {band} of 0 or 1")
    out = mobius_from_table(TruthTable(p.n, amplifier_map(vals, k), "real"))
    return out


def truncate_and_amplify(p: MultilinearPoly, f: TruthTable, d: int, k: int = 4) -> dict:
    """Drop monomials of degree >= d, then amplify; reports the error at each stage."""
    q = truncate_tail(p, d)
    e_trunc = max_error(q, f)
    out = {"truncated_deg": q.deg, "truncated_spar": q.spar, "truncated_error": e_trunc}
    if e_trunc <= AMPLIFY_BAND:
        a = amplify(q, k)
        out.update({"amplified_deg": a.deg, "amplified_error": max_error(a, f)})
    return out


def grolmusz_terms(l1: float, n: int, eps: float, delta: float = 0.5) -> int:
    """Sample count making every one of the 2^n values eps-accurate with probability 1 - delta."""
    return math.ceil(2 * l1 * l1 * (n * math.log(2) + math.log(2 / delta)) / (eps * eps))


def sparsify_by_sampling(p: MultilinearPoly, k: int, seed: int = 0) -> MultilinearPoly:
    """Unbiased estimate of P built from k monomials drawn with probability |a_S| / l1(P)."""
    if p.is_zero:
        raise ValueError("l1(P) must be positive")
    if k < 1:
        raise ValueError("k must be positive")
    masks = np.array(list(p.terms.keys()), dtype=np.int64)
    coeffs = np.array([float(c) for c in p.terms.values()])
    l1 = float(np.abs(coeffs).sum())
    rng = np.random.default_rng(seed)
    picks = rng.choice(len(masks), size=k, p=np.abs(coeffs) / l1)
    counts = np.bincount(picks, minlength=len(masks))
    out = {int(masks[j]): math.copysign(l1 * int(c) / k, coeffs[j]) for j, c in enumerate(counts) if c}
    return MultilinearPoly(p.n, out, FLOAT)


def max_error(p, f: TruthTable) -> float:
    """Largest |P(x) - f(x)| over the cube; a SymmetricPoly is checked level by level."""
    if isinstance(p, SymmetricPoly):
        if p.n != f.n:
            raise ValueError("polynomial and table have different n")
        return _symmetric_vs_table(p, f)
    if p.n != f.n:
        raise ValueError("polynomial and table have different n")
    return float(np.max(np.abs(poly_values(p).astype(np.float64) - f.values)))


def _symmetric_vs_table(q: SymmetricPoly, f: TruthTable) -> float:
    xs = np.arange(1 << f.n)
    w = np.zeros(1 << f.n, dtype=np.int64)
    for i in range(f.n):
        w += (xs >> i) & 1
    levels = np.array([float(v) for v in q.level_values()])
    return float(np.max(np.abs(levels[w] - f.values)))
