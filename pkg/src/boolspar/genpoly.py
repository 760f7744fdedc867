"""Generalized polynomials over the literals x_i and xbar_i = 1 - x_i."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, NamedTuple

import numpy as np

from .poly import EXACT, FLOAT, MultilinearPoly, Restriction, TruthTable, bits, popcount, submasks


class GenMonomial(NamedTuple):
    pos: int
    neg: int
    coeff: float = 1

    @property
    def degree(self) -> int:
        return popcount(self.pos) + popcount(self.neg)


def _check_literals(pos: int, neg: int, n: int) -> None:
    if pos & neg:
        raise ValueError(f"monomial uses x_i and xbar_i together (overlap mask {pos & neg:#x})")
    if (pos | neg) >> n:
        raise ValueError("monomial mentions variables outside [n]")


@dataclass(frozen=True, eq=False)
class GenPoly:
    """Map ``(pos_mask, neg_mask) -> coeff`` for monomials prod x_P * prod (1 - x_N).

    Overlapping ``pos``/``neg`` masks are rejected: such a monomial is zero in
    the quotient ring and never needs to be written down.
    """

    n: int
    monomials: Mapping[tuple[int, int], float] = field(default_factory=dict)
    coeff_kind: str = EXACT

    def __post_init__(self):
        clean = {}
        for (p, q), c in self.monomials.items():
            _check_literals(p, q, self.n)
            if self.coeff_kind == EXACT:
                if c != int(c):
                    raise ValueError(f"non-integral coefficient {c} in exact polynomial")
                c = int(c)
            else:
                c = float(c)
            if c != 0:
                clean[(int(p), int(q))] = c
        object.__setattr__(self, "monomials", clean)

    @classmethod
    def from_monomials(cls, n: int, monos, coeff_kind: str = EXACT) -> "GenPoly":
        out: dict[tuple[int, int], float] = {}
        for m in monos:
            m = GenMonomial(*m)
            _check_literals(m.pos, m.neg, n)
            out[(m.pos, m.neg)] = out.get((m.pos, m.neg), 0) + m.coeff
        return cls(n, out, coeff_kind)

    def __eq__(self, other):
        if not isinstance(other, GenPoly):
            return NotImplemented
        return self.n == other.n and self.monomials == other.monomials

    def __hash__(self):
        return hash((self.n, frozenset(self.monomials.items())))

    def __iter__(self):
        for (p, q), c in self.monomials.items():
            yield GenMonomial(p, q, c)

    def __call__(self, x: int):
        return eval_gen(self, x)

    @property
    def deg(self) -> int:
        return max((popcount(p) + popcount(q) for p, q in self.monomials), default=0)

    @property
    def spar(self) -> int:
        return len(self.monomials)

    @property
    def l1(self):
        return sum(abs(c) for c in self.monomials.values())

    def __repr__(self):
        parts = []
        for (p, q), c in self.monomials.items():
            lits = [f"x{i + 1}" for i in bits(p)] + [f"~x{i + 1}" for i in bits(q)]
            parts.append(f"{c}*{'*'.join(lits) or '1'}")
        return f"GenPoly(n={self.n}, {' + '.join(parts) or '0'})"


def gen_add(g: GenPoly, h: GenPoly, wg=1, wh=1) -> GenPoly:
    out = {k: wg * c for k, c in g.monomials.items()}
    for k, c in h.monomials.items():
        out[k] = out.get(k, 0) + wh * c
    exact = all(isinstance(w, int) for w in (wg, wh)) and g.coeff_kind == h.coeff_kind == EXACT
    return GenPoly(max(g.n, h.n), out, EXACT if exact else FLOAT)


def eval_gen(g: GenPoly, x: int):
    return sum(c for (p, q), c in g.monomials.items() if p & ~x == 0 and q & x == 0)


def gen_values(g: GenPoly) -> np.ndarray:
    """All 2^n values, one vectorized indicator per monomial."""
    xs = np.arange(1 << g.n, dtype=np.int64)
    out = np.zeros(1 << g.n, dtype=np.int64 if g.coeff_kind == EXACT else np.float64)
    for (p, q), c in g.monomials.items():
        out[((xs & p) == p) & ((xs & q) == 0)] += c
    return out


def gen_measures(g: GenPoly) -> dict:
    """Degree, term count and coefficient mass of this particular representation.

    Representations are not unique, so the last two are only upper bounds on
    the generalized sparsity and weight of the function represented.
    """
    return {"deg": g.deg, "gspar_ub": g.spar, "gl1_ub": g.l1}


def expand_to_standard(g: GenPoly) -> MultilinearPoly:
    """Replace every xbar_j by 1 - x_j and collect in the De Morgan basis."""
    out: dict[int, float] = {}
    for (p, q), c in g.monomials.items():
        for t in submasks(q):
            s = p | t
            out[s] = out.get(s, 0) + (-c if popcount(t) & 1 else c)
    return MultilinearPoly(g.n, out, g.coeff_kind)


def from_standard(p: MultilinearPoly) -> GenPoly:
    return GenPoly(p.n, {(s, 0): c for s, c in p.terms.items()}, p.coeff_kind)


def restrict_gen(g: GenPoly, rho: Restriction) -> GenPoly:
    out: dict[tuple[int, int], float] = {}
    for (p, q), c in g.monomials.items():
        if p & rho.zeros or q & rho.ones:
            continue
        key = (p & ~rho.ones, q & ~rho.zeros)
        out[key] = out.get(key, 0) + c
    return GenPoly(g.n, out, g.coeff_kind)


def restricted_degree(pos: int, neg: int, rho: Restriction) -> int:
    """Degree of a single generalized monomial after ``rho`` (0 if killed)."""
    if pos & rho.zeros or neg & rho.ones:
        return 0
    return popcount((pos | neg) & rho.free)


def gen_max_error(g: GenPoly, f: TruthTable) -> float:
    if g.n != f.n:
        raise ValueError("polynomial and table have different n")
    return float(np.max(np.abs(gen_values(g) - f.values)))
