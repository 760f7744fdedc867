"""Adaptive max-sensitivity restriction sampler driven by separating-set shrinkage.

The state is a set ``F`` of inputs that is separating for the current
restriction of ``f``.  While ``|F| > 2`` the sampler either fixes a variable
that keeps a (1 - 1/n) fraction of ``F`` (passive step), or picks the pair
``(x_i, u)`` sensitive for the most members of ``F`` and, with probability
1/3 each, fixes ``x_i = 0``, fixes ``x_i = 1``, or leaves ``x_i`` free and
keeps only the members with ``w_i = u`` that are sensitive at ``i``.  Once
``|F| <= 2`` every remaining variable is fixed to one member ``w``, which is
also the witness: every free coordinate is sensitive for ``f`` at ``w``.

Members of ``F`` are kept as full n-bit inputs.  They always agree with
the fixed part of the current subcube, so projecting is never needed and
the sensitive set of the restricted function at ``w`` is just
``S(f, w) & V``.  Decisions depend only on the state ``(V, fixed bits, F)``
and are cached, so a run only draws coins.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .boolfun import restricted_sensitivity, sensitive_set
from .errors import InvariantError
from .genpoly import restricted_degree
from .poly import BOOLEAN, Restriction, TruthTable, bits, popcount
from .stats import TailVerdict, map_trials, panel_slack, tail_verdicts, trial_rng

MAX_EXAMPLES = 5

TERMINAL, PASSIVE, ACTIVE = "terminal", "passive", "active"
SET0, SET1, FREE = "set0", "set1", "free"


@dataclass(frozen=True)
class MaxSensParams:
    ambient_n: int
    seed: int = 0

    def __post_init__(self):
        if self.ambient_n < 2:
            raise ValueError("ambient_n must be at least 2")


class SensStep(NamedTuple):
    kind: str
    variable: int
    action: str
    F_size_before: int
    F_size_after: int


@dataclass(frozen=True)
class SensTrace:
    steps: tuple
    active_count: int
    free_count: int
    witness: int


def sensitive_masks(f: TruthTable) -> np.ndarray:
    """S(f, x) as a bitmask for every input x."""
    v = f.values
    xs = np.arange(1 << f.n, dtype=np.int64)
    out = np.zeros(1 << f.n, dtype=np.int64)
    for i in range(f.n):
        out |= (v != v[xs ^ (1 << i)]).astype(np.int64) << i
    return out


def lex_key(w: int, n: int) -> tuple:
    """Order inputs by the string x1 x2 ... xn."""
    return tuple((w >> i) & 1 for i in range(n))


@dataclass(eq=False)
class _Node:
    V: int
    sub: int
    F: frozenset
    kind: str
    var: int = -1
    u: int = 0
    witness: int = 0
    children: list = field(default_factory=list)  # (V, sub, F) per branch
    resolved: list = field(default_factory=list)


class MaxSensitivitySampler:
    """Cached decision structure of the sampler for one (f, F) pair."""

    def __init__(self, f: TruthTable, F, V: int | None = None, ambient_n: int | None = None,
                 check_separating: bool = False):
        if f.value_kind != BOOLEAN:
            raise ValueError("sampler needs a Boolean function")
        items = list(F)
        F = frozenset(int(w) for w in items)
        if not F:
            raise ValueError("F must be non-empty")
        if len(F) != len(items):
            raise ValueError("F contains duplicates")
        full = (1 << f.n) - 1
        if any(w < 0 or w > full for w in F):
            raise ValueError("F contains inputs outside {0,1}^n")
        if V is None:
            V = full
        outside = {w & ~V & full for w in F}
        if len(outside) != 1:
            raise ValueError("members of F must agree on the variables outside V")
        self.f = f
        self.n = f.n
        self.ambient_n = ambient_n if ambient_n is not None else f.n
        if self.ambient_n < 2:
            raise ValueError("ambient_n must be at least 2")
        self.check_separating = check_separating
        self.sens = sensitive_masks(f)
        self._cache: dict = {}
        if check_separating and not self.separating(F, V):
            raise ValueError("F is not separating for f")
        self.root = self._node(V, outside.pop(), F)

    @property
    def states(self) -> int:
        return len(self._cache)

    def separating(self, F: frozenset, V: int) -> bool:
        """Separation of F for f restricted to the subcube on V."""
        items = sorted(F)
        s = [int(self.sens[w]) & V for w in items]
        for a in range(len(items)):
            for b in range(a + 1, len(items)):
                if (items[a] ^ items[b]) & (s[a] | s[b]) == 0:
                    return False
        return True

    def _node(self, V: int, sub: int, F: frozenset) -> _Node:
        key = (V, sub, F)
        node = self._cache.get(key)
        if node is None:
            node = self._build(V, sub, F)
            self._cache[key] = node
        return node

    def _build(self, V: int, sub: int, F: frozenset) -> _Node:
        if not F:
            raise InvariantError("sampler reached an empty input set")
        if self.check_separating and not self.separating(F, V):
            raise InvariantError("input set lost separation after a restriction")
        n = self.ambient_n
        size = len(F)
        if size <= 2:
            w = min(F, key=lambda x: lex_key(x, self.n))
            return _Node(V, sub, F, TERMINAL, witness=w)
        for i in bits(V):
            b = 1 << i
            f1 = frozenset(w for w in F if w & b)
            for u, part in ((0, F - f1), (1, f1)):
                if n * len(part) >= (n - 1) * size:
                    return _Node(V, sub, F, PASSIVE, i, u,
                                 children=[(V & ~b, sub | (u << i), part)], resolved=[None])
        best, best_cnt = None, -1
        for i in bits(V):
            b = 1 << i
            for u in (0, 1):
                cnt = sum(1 for w in F if self.sens[w] & b and ((w >> i) & 1) == u)
                if cnt > best_cnt:
                    best, best_cnt = (i, u), cnt
        i, u = best
        if 4 * n * best_cnt < size:
            raise InvariantError(
                f"active quota missed: best count {best_cnt} < |F|/(4n) = {size}/{4 * n}")
        b = 1 << i
        f1 = frozenset(w for w in F if w & b)
        f0 = F - f1
        fs = frozenset(w for w in F if self.sens[w] & b and ((w >> i) & 1) == u)
        rest = V & ~b
        return _Node(V, sub, F, ACTIVE, i, u,
                     children=[(rest, sub, f0), (rest, sub | b, f1), (rest, sub | (u << i), fs)],
                     resolved=[None, None, None])

    def _child(self, node: _Node, idx: int) -> _Node:
        c = node.resolved[idx]
        if c is None:
            c = self._node(*node.children[idx])
            node.resolved[idx] = c
        return c

    def sample(self, rng: np.random.Generator) -> tuple[Restriction, SensTrace]:
        node = self.root
        zeros = ones = free = 0
        steps = []
        active = 0
        while node.kind != TERMINAL:
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
                idx = min(int(rng.random() * 3), 2)
                if idx == 0:
                    zeros |= b
                    action = SET0
                elif idx == 1:
                    ones |= b
                    action = SET1
                else:
                    free |= b
                    action = FREE
            child = self._child(node, idx)
            steps.append(SensStep(node.kind, node.var, action, len(node.F), len(child.F)))
            node = child
        w = node.witness
        zeros |= node.V & ~w
        ones |= node.V & w
        steps.append(SensStep(TERMINAL, -1, "fix", len(node.F), 1))
        rho = Restriction(self.n, zeros, ones, free)
        return rho, SensTrace(tuple(steps), active, popcount(free), w)


def max_sensitivity_restriction(f: TruthTable, F, params: MaxSensParams, V: int | None = None,
                                check_separating: bool = False) -> tuple[Restriction, SensTrace]:
    """One draw of the sampler, seeded by ``params.seed``."""
    sampler = MaxSensitivitySampler(f, F, V, params.ambient_n, check_separating)
    return sampler.sample(np.random.default_rng(params.seed))


def active_lower_bound(size: int, n: int) -> float:
    """log(|F|/20) / log(4n): every run makes at least this many active steps."""
    return math.log(size / 20) / math.log(4 * n)


def witness_ok(f: TruthTable, F, rho: Restriction, w: int) -> bool:
    """w is in F, agrees with rho on the set variables, and is sensitive on every free one."""
    return (w in F and (w & rho.set_vars) == rho.ones
            and rho.free & ~sensitive_set(f, w) == 0)


# --------------------------------------------------------------------------
# batch verification
# --------------------------------------------------------------------------

@dataclass
class MaxSensReport:
    function: str
    n: int
    F_size: int
    trials: int
    seed: int
    active_bound: float
    failures: dict
    examples: list
    tails: list[TailVerdict]
    free_hist: dict
    active_hist: dict
    free_by_active: dict  # active count -> total free count over those runs
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

    def free_ratio_rows(self) -> list[dict]:
        """Mean free count per active count next to the expected a/3."""
        return [
            {"active": a, "runs": self.active_hist[a],
             "mean_free": self.free_by_active[a] / self.active_hist[a], "expected": a / 3}
            for a in sorted(self.active_hist)
        ]

    @property
    def free_active_ratio(self) -> float:
        """Total free count over total active count; each active step frees with probability 1/3."""
        total_active = sum(a * c for a, c in self.active_hist.items())
        return sum(self.free_by_active.values()) / total_active if total_active else 0.0

    def as_dict(self) -> dict:
        return {
            "function": self.function,
            "n": self.n,
            "F_size": self.F_size,
            "trials": self.trials,
            "seed": self.seed,
            "active_bound": self.active_bound,
            "active_min": self.active_min,
            "per_run_failures": dict(self.failures),
            "failure_examples": self.examples,
            "tail_checks": [v.as_dict() for v in self.tails],
            "free_hist": {str(k): v for k, v in sorted(self.free_hist.items())},
            "active_hist": {str(k): v for k, v in sorted(self.active_hist.items())},
            "free_vs_active": self.free_ratio_rows(),
            "free_active_ratio": self.free_active_ratio,
            "per_run_ok": self.per_run_ok,
            "stats_ok": self.stats_ok,
        }


def monomial_name(pos: int, neg: int) -> str:
    lits = sorted([(i, f"x{i + 1}") for i in bits(pos)] + [(i, f"~x{i + 1}") for i in bits(neg)])
    return "*".join(s for _, s in lits) or "1"


def default_gen_monomials(n: int) -> list[tuple[int, int]]:
    """All-positive, all-negated, and two mixed monomials over the first variables."""
    full = (1 << n) - 1
    h = max(1, n // 2)
    low = (1 << h) - 1
    out = [(full, 0), (0, full), (low, full & ~low)]
    if n >= 4:
        out.append((0b0011, 0b1100))
    return out


def _maxsens_worker(payload, lo: int, hi: int) -> dict:
    f, F, seed, monos, check = payload
    n = f.n
    bound = active_lower_bound(len(F), n)
    failures: Counter = Counter({"witness": 0, "sensitivity": 0, "active_bound": 0, "invariant": 0})
    examples: list = []
    tails = {monomial_name(p, q): [0] * (popcount(p) + popcount(q)) for p, q in monos}
    free_hist: Counter = Counter()
    active_hist: Counter = Counter()
    free_by_active: Counter = Counter()

    def note(msg):
        if len(examples) < MAX_EXAMPLES:
            examples.append(msg)

    try:
        sampler = MaxSensitivitySampler(f, F, None, n, check)
    except InvariantError as e:
        failures["invariant"] += hi - lo
        note(str(e))
        return {"failures": failures, "examples": examples, "tails": tails, "free_hist": free_hist,
                "active_hist": active_hist, "free_by_active": free_by_active, "states": 0}
    sens_cache: dict[Restriction, int] = {}
    for t in range(lo, hi):
        try:
            rho, trace = sampler.sample(trial_rng(seed, t))
        except InvariantError as e:
            failures["invariant"] += 1
            note(f"trial {t}: {e}")
            continue
        if not witness_ok(f, F, rho, trace.witness):
            failures["witness"] += 1
            note(f"trial {t}: bad witness {trace.witness} for rho={rho}")
        s = sens_cache.get(rho)
        if s is None:
            s = restricted_sensitivity(f, rho)
            sens_cache[rho] = s
        if s != rho.free_count:
            failures["sensitivity"] += 1
            note(f"trial {t}: s(f|rho) = {s} but {rho.free_count} free, rho={rho}")
        if trace.active_count < bound - 1e-12:
            failures["active_bound"] += 1
            note(f"trial {t}: active_count {trace.active_count} < {bound:.4f}")
        free_hist[trace.free_count] += 1
        active_hist[trace.active_count] += 1
        free_by_active[trace.active_count] += trace.free_count
        for p, q in monos:
            d = restricted_degree(p, q, rho)
            row = tails[monomial_name(p, q)]
            for k in range(d):
                row[k] += 1
    return {"failures": failures, "examples": examples, "tails": tails, "free_hist": free_hist,
            "active_hist": active_hist, "free_by_active": free_by_active, "states": sampler.states}


def _merge(parts: list[dict]) -> dict:
    out = {"failures": Counter(), "examples": [], "tails": None, "free_hist": Counter(),
           "active_hist": Counter(), "free_by_active": Counter(), "states": 0}
    for part in parts:
        for k in ("failures", "free_hist", "active_hist", "free_by_active"):
            out[k].update(part[k])
        out["examples"].extend(part["examples"])
        out["states"] = max(out["states"], part["states"])
        if out["tails"] is None:
            out["tails"] = {k: list(v) for k, v in part["tails"].items()}
        else:
            for k, v in part["tails"].items():
                out["tails"][k] = [a + b for a, b in zip(out["tails"][k], v)]
    out["examples"] = out["examples"][:MAX_EXAMPLES]
    return out


def verify_max_sens_distribution(f: TruthTable, F, trials: int, seed: int,
                                 monomials: list[tuple[int, int]] | None = None,
                                 slack: float | None = None, threads: int = 1,
                                 check_separating: bool = True, name: str = "") -> MaxSensReport:
    """Run the sampler ``trials`` times and check its per-run and tail properties.

    Per run: the trace's witness is valid, s(f|rho) equals the number of free
    variables (computed from scratch), and there are at least
    log(|F|/20)/log(4n) active steps.  Quota misses and loss of separation
    surface as ``invariant`` failures.  For each generalized monomial
    ``(pos, neg)`` of the panel, Pr[deg(M|rho) >= t] is compared with
    2^-t plus ``slack``.
    """
    F = frozenset(F)
    if f.n < 2:
        raise ValueError("need n >= 2")
    monos = default_gen_monomials(f.n) if monomials is None else list(monomials)
    cells = sum(popcount(p) + popcount(q) for p, q in monos)
    if slack is None:
        slack = panel_slack(trials, cells)
    parts = map_trials(_maxsens_worker, (f, F, seed, monos, check_separating), trials, threads)
    m = _merge(parts)
    return MaxSensReport(
        function=name, n=f.n, F_size=len(F), trials=trials, seed=seed,
        active_bound=active_lower_bound(len(F), f.n), failures=dict(m["failures"]),
        examples=m["examples"], tails=tail_verdicts(m["tails"] or {}, trials, slack),
        free_hist=dict(m["free_hist"]), active_hist=dict(m["active_hist"]),
        free_by_active=dict(m["free_by_active"]), sampler_states=m["states"],
    )
