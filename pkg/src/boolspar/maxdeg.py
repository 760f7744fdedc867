"""Adaptive max-degree restriction sampler driven by l1-norm shrinkage.

At each step the sampler either fixes a variable whose substitution keeps
at least a (1 - 1/n) fraction of the current l1 mass (passive step), or
picks the lowest-index variable ``x_i``, writes ``Q = R1 * x_i + R0`` and
flips a fair coin between fixing ``x_i = 0`` (continue on ``R0``) and
leaving it free (continue on ``R1``) -- an active step.

All branching decisions depend only on the current (polynomial, variable
set) state, so they are computed once per state and cached; a run then
only flips coins.  ``n`` in the thresholds is the ambient variable count
fixed at the top-level call.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import InvariantError
from .poly import (
    EXACT,
    BOOLEAN,
    MultilinearPoly,
    Restriction,
    TruthTable,
    bits,
    decompose,
    fix_var,
    mobius_from_table,
    popcount,
    restrict_poly,
)
from .stats import TailVerdict, map_trials, panel_slack, tail_verdicts, trial_rng

FLOAT_TOL = 1e-9
MAX_EXAMPLES = 5

PASSIVE, ACTIVE, LEAF = "passive", "active", "leaf"
SET0, SET1, FREE = "set0", "set1", "free"


@dataclass(frozen=True)
class MaxDegreeParams:
    ambient_n: int
    seed: int = 0

    def __post_init__(self):
        if self.ambient_n < 2:
            raise ValueError("ambient_n must be at least 2")


class TraceStep(NamedTuple):
    kind: str
    variable: int
    action: str
    l1_before: float
    l1_after: float


@dataclass(frozen=True)
class RestrictionTrace:
    steps: tuple
    active_count: int
    free_count: int


def _geq(a, b, exact: bool) -> bool:
    return a >= b if exact else a >= b - FLOAT_TOL * max(abs(b), 1.0)


def balancedness_assert(q: MultilinearPoly, n: int) -> bool:
    """True iff every variable of ``q`` splits it into halves each holding >= l1(q)/(2n)."""
    exact = q.coeff_kind == EXACT
    total = q.l1
    for i in bits(q.vars):
        r1, r0 = decompose(q, i)
        if exact:
            if 2 * n * r0.l1 < total or 2 * n * r1.l1 < total:
                return False
        elif not (_geq(r0.l1, total / (2 * n), False) and _geq(r1.l1, total / (2 * n), False)):
            return False
    return True


@dataclass(eq=False)
class _Node:
    poly: MultilinearPoly
    V: int
    kind: str
    var: int = -1
    u: int = 0
    children: list = field(default_factory=list)  # (poly, V) per branch
    resolved: list = field(default_factory=list)

    @property
    def l1(self):
        return self.poly.l1


class MaxDegreeSampler:
    """Cached decision structure of the sampler for one input polynomial."""

    def __init__(self, q: MultilinearPoly, V: int | None = None, ambient_n: int | None = None,
                 check_balance: bool = False):
        if q.is_zero:
            raise ValueError("input polynomial must be non-zero")
        if V is None:
            V = (1 << q.n) - 1
        if q.vars & ~V:
            raise ValueError("Vars(Q) must be contained in V")
        self.n = q.n
        self.ambient_n = ambient_n if ambient_n is not None else q.n
        if self.ambient_n < 2:
            raise ValueError("ambient_n must be at least 2")
        self.check_balance = check_balance
        self._cache: dict = {}
        self.root = self._node(q, V)

    @property
    def states(self) -> int:
        return len(self._cache)

    def _node(self, q: MultilinearPoly, V: int) -> _Node:
        key = (q.key, V)
        node = self._cache.get(key)
        if node is None:
            node = self._build(q, V)
            self._cache[key] = node
        return node

    def _build(self, q: MultilinearPoly, V: int) -> _Node:
        if q.is_zero:
            raise InvariantError("sampler reached the zero polynomial")
        if V == 0:
            return _Node(q, V, LEAF)
        n = self.ambient_n
        exact = q.coeff_kind == EXACT
        total = q.l1
        for i in bits(V):
            for u in (0, 1):
                qu = fix_var(q, i, u)
                ok = n * qu.l1 >= (n - 1) * total if exact else _geq(qu.l1, (1 - 1 / n) * total, False)
                if ok:
                    return _Node(q, V, PASSIVE, i, u, [(qu, V & ~(1 << i))], [None])
        if q.vars != V:
            raise InvariantError("active branch entered with a variable of V outside Vars(Q)")
        if self.check_balance and not balancedness_assert(q, n):
            raise InvariantError(f"balancedness violated at {q!r}")
        i = bits(V)[0]
        r1, r0 = decompose(q, i)
        rest = V & ~(1 << i)
        return _Node(q, V, ACTIVE, i, 0, [(r0, rest), (r1, rest)], [None, None])

    def _child(self, node: _Node, idx: int) -> _Node:
        c = node.resolved[idx]
        if c is None:
            c = self._node(*node.children[idx])
            node.resolved[idx] = c
        return c

    def sample(self, rng: np.random.Generator) -> tuple[Restriction, RestrictionTrace]:
        node = self.root
        zeros = ones = free = 0
        steps = []
        active = 0
        while node.kind != LEAF:
            b = 1 << node.var
            if node.kind == PASSIVE:
                idx = 0
                if node.u:
                    ones |= b
                    action = SET1
                else:
                    zeros |= b
                    action = SET0
            else:
                active += 1
                if rng.random() < 0.5:
                    idx, action = 0, SET0
                    zeros |= b
                else:
                    idx, action = 1, FREE
                    free |= b
            child = self._child(node, idx)
            steps.append(TraceStep(node.kind, node.var, action, node.l1, child.l1))
            node = child
        return Restriction(self.n, zeros, ones, free), RestrictionTrace(tuple(steps), active, popcount(free))


def max_degree_restriction(q: MultilinearPoly, V: int | None, params: MaxDegreeParams,
                           check_balance: bool = False) -> tuple[Restriction, RestrictionTrace]:
    """One draw of the sampler, seeded by ``params.seed``."""
    sampler = MaxDegreeSampler(q, V, params.ambient_n, check_balance)
    return sampler.sample(np.random.default_rng(params.seed))


def active_lower_bound(l1, n: int) -> float:
    """log(l1/10) / log(4n): every run makes at least this many active steps."""
    return math.log(l1 / 10) / math.log(4 * n)


# --------------------------------------------------------------------------
# batch verification
# --------------------------------------------------------------------------

@dataclass
class MaxDegReport:
    function: str
    n: int
    trials: int
    seed: int
    l1: int
    spar: int
    active_bound: float
    failures: dict
    examples: list
    tails: list[TailVerdict]
    free_hist: dict
    active_hist: dict
    sampler_states: int = 0

    @property
    def per_run_ok(self) -> bool:
        return not any(self.failures.values())

    @property
    def stats_ok(self) -> bool:
        return all(v.ok for v in self.tails)

    @property
    def active_min(self) -> int:
        return min(self.active_hist) if self.active_hist else 0

    def as_dict(self) -> dict:
        return {
            "function": self.function,
            "n": self.n,
            "trials": self.trials,
            "seed": self.seed,
            "l1": self.l1,
            "spar": self.spar,
            "active_bound": self.active_bound,
            "active_min": self.active_min,
            "per_run_failures": dict(self.failures),
            "failure_examples": self.examples,
            "tail_checks": [v.as_dict() for v in self.tails],
            "free_hist": {str(k): v for k, v in sorted(self.free_hist.items())},
            "active_hist": {str(k): v for k, v in sorted(self.active_hist.items())},
            "per_run_ok": self.per_run_ok,
            "stats_ok": self.stats_ok,
        }


def default_monomials(n: int) -> dict[str, int]:
    return {"full": (1 << n) - 1, "half": (1 << max(1, n // 2)) - 1}


def _maxdeg_worker(payload, lo: int, hi: int) -> dict:
    p, seed, monos, check_balance = payload
    n = p.n
    bound = active_lower_bound(p.l1, n)
    failures: Counter = Counter({"full_degree": 0, "active_bound": 0, "invariant": 0})
    examples: list = []
    tails = {name: [0] * popcount(m) for name, m in monos.items()}
    free_hist: Counter = Counter()
    active_hist: Counter = Counter()
    try:
        sampler = MaxDegreeSampler(p, None, n, check_balance)
    except InvariantError as e:
        failures["invariant"] += hi - lo
        return {"failures": failures, "examples": [str(e)], "tails": tails,
                "free_hist": free_hist, "active_hist": active_hist, "states": 0}
    degree_ok: dict[Restriction, bool] = {}
    for t in range(lo, hi):
        try:
            rho, trace = sampler.sample(trial_rng(seed, t))
        except InvariantError as e:
            failures["invariant"] += 1
            if len(examples) < MAX_EXAMPLES:
                examples.append(f"trial {t}: {e}")
            continue
        ok = degree_ok.get(rho)
        if ok is None:
            r = restrict_poly(p, rho)
            ok = (not r.is_zero) and r.deg == rho.free_count
            degree_ok[rho] = ok
        if not ok:
            failures["full_degree"] += 1
            if len(examples) < MAX_EXAMPLES:
                examples.append(f"trial {t}: deg(f|rho) != free_count for rho={rho}")
        if trace.active_count < bound - 1e-12:
            failures["active_bound"] += 1
            if len(examples) < MAX_EXAMPLES:
                examples.append(f"trial {t}: active_count {trace.active_count} < {bound:.4f}")
        free_hist[trace.free_count] += 1
        active_hist[trace.active_count] += 1
        for name, m in monos.items():
            if m & rho.zeros:
                continue
            d = popcount(m & rho.free)
            row = tails[name]
            for k in range(d):
                row[k] += 1
    return {"failures": failures, "examples": examples, "tails": tails,
            "free_hist": free_hist, "active_hist": active_hist, "states": sampler.states}


def _merge(parts: list[dict]) -> dict:
    out = {"failures": Counter(), "examples": [], "tails": None,
           "free_hist": Counter(), "active_hist": Counter(), "states": 0}
    for part in parts:
        out["failures"].update(part["failures"])
        out["examples"].extend(part["examples"])
        out["free_hist"].update(part["free_hist"])
        out["active_hist"].update(part["active_hist"])
        out["states"] = max(out["states"], part["states"])
        if out["tails"] is None:
            out["tails"] = {k: list(v) for k, v in part["tails"].items()}
        else:
            for k, v in part["tails"].items():
                out["tails"][k] = [a + b for a, b in zip(out["tails"][k], v)]
    out["examples"] = out["examples"][:MAX_EXAMPLES]
    return out


def verify_max_degree_distribution(f: TruthTable, trials: int, seed: int,
                                   monomials: dict[str, int] | None = None,
                                   slack: float | None = None, threads: int = 1,
                                   check_balance: bool = True, name: str = "") -> MaxDegReport:
    """Run the sampler ``trials`` times on P(f) and check its distributional properties.

    Every run must give deg(f|rho) = #free with f|rho non-zero, and at least
    log(l1/10)/log(4n) active steps.  For each monomial of the panel the
    empirical Pr[deg(M|rho) >= t] is compared against 2^-t plus ``slack``
    (default: Hoeffding at confidence 1 - 1e-4, Bonferroni over the panel).
    """
    if f.value_kind != BOOLEAN:
        raise ValueError("verification needs a Boolean function")
    if f.is_constant:
        raise ValueError("verification needs a non-constant function")
    if f.n < 2:
        raise ValueError("need n >= 2")
    p = mobius_from_table(f)
    monos = default_monomials(f.n) if monomials is None else dict(monomials)
    cells = sum(popcount(m) for m in monos.values())
    if slack is None:
        slack = panel_slack(trials, cells)
    parts = map_trials(_maxdeg_worker, (p, seed, monos, check_balance), trials, threads)
    m = _merge(parts)
    return MaxDegReport(
        function=name, n=f.n, trials=trials, seed=seed, l1=p.l1, spar=p.spar,
        active_bound=active_lower_bound(p.l1, f.n), failures=dict(m["failures"]),
        examples=m["examples"], tails=tail_verdicts(m["tails"], trials, slack),
        free_hist=dict(m["free_hist"]), active_hist=dict(m["active_hist"]),
        sampler_states=m["states"],
    )
