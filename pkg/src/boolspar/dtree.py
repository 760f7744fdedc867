"""Decision trees, randomized trees, and their conversion to generalized polynomials."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .genpoly import GenPoly, gen_add
from .poly import EXACT, FLOAT, TruthTable


@dataclass(frozen=True)
class DecisionTree:
    """Node arrays: internal nodes have ``var >= 0`` and children ``lo``/``hi``; leaves have ``var = -1``.

    Every node must be reachable from ``root`` exactly once and no variable
    may repeat along a root-to-leaf path.
    """

    n: int
    var: tuple
    lo: tuple
    hi: tuple
    leaf: tuple
    root: int = 0

    def __post_init__(self):
        k = len(self.var)
        if not (len(self.lo) == len(self.hi) == len(self.leaf) == k):
            raise ValueError("node arrays have different lengths")
        if not 0 <= self.root < k:
            raise ValueError("root index out of range")
        seen = [False] * k
        stack = [(self.root, 0)]
        while stack:
            node, used = stack.pop()
            if seen[node]:
                raise ValueError(f"node {node} is reachable twice; the structure is not a tree")
            seen[node] = True
            v = self.var[node]
            if v < 0:
                if self.leaf[node] not in (0, 1):
                    raise ValueError(f"leaf {node} has label {self.leaf[node]!r}")
                continue
            if v >= self.n:
                raise ValueError(f"node {node} queries x{v + 1} outside [n]")
            if used >> v & 1:
                raise ValueError(f"x{v + 1} is queried twice on one path")
            for c in (self.lo[node], self.hi[node]):
                if not 0 <= c < k:
                    raise ValueError(f"node {node} has child index {c} out of range")
                stack.append((c, used | (1 << v)))

    @classmethod
    def from_nodes(cls, n: int, nodes: list[dict], root: int = 0) -> "DecisionTree":
        """Build from ``[{"var": i, "lo": a, "hi": b} | {"leaf": 0|1}]`` with 0-based vars."""
        var, lo, hi, leaf = [], [], [], []
        for nd in nodes:
            if "leaf" in nd:
                var.append(-1)
                lo.append(-1)
                hi.append(-1)
                leaf.append(int(nd["leaf"]))
            else:
                var.append(int(nd["var"]))
                lo.append(int(nd["lo"]))
                hi.append(int(nd["hi"]))
                leaf.append(-1)
        return cls(n, tuple(var), tuple(lo), tuple(hi), tuple(leaf), root)

    @classmethod
    def constant(cls, n: int, b: int) -> "DecisionTree":
        return cls(n, (-1,), (-1,), (-1,), (int(b),))

    def nodes(self) -> list[dict]:
        out = []
        for v, a, b, lf in zip(self.var, self.lo, self.hi, self.leaf):
            out.append({"leaf": lf} if v < 0 else {"var": v, "lo": a, "hi": b})
        return out

    @property
    def size(self) -> int:
        """Number of leaves."""
        return sum(1 for v in self.var if v < 0)

    @property
    def depth(self) -> int:
        best = 0
        stack = [(self.root, 0)]
        while stack:
            node, d = stack.pop()
            if self.var[node] < 0:
                best = max(best, d)
            else:
                stack.extend([(self.lo[node], d + 1), (self.hi[node], d + 1)])
        return best

    def paths(self):
        """Yield ``(pos_mask, neg_mask, leaf_label)`` for every root-to-leaf path."""
        stack = [(self.root, 0, 0)]
        while stack:
            node, pos, neg = stack.pop()
            v = self.var[node]
            if v < 0:
                yield pos, neg, self.leaf[node]
            else:
                stack.append((self.lo[node], pos, neg | (1 << v)))
                stack.append((self.hi[node], pos | (1 << v), neg))

    def __call__(self, x: int) -> int:
        return eval_tree(self, x)


def eval_tree(t: DecisionTree, x: int) -> int:
    node = t.root
    while t.var[node] >= 0:
        node = t.hi[node] if (x >> t.var[node]) & 1 else t.lo[node]
    return t.leaf[node]


def tree_table(t: DecisionTree) -> TruthTable:
    return TruthTable(t.n, np.array([eval_tree(t, x) for x in range(1 << t.n)], dtype=np.int64))


def tree_to_genpoly(t: DecisionTree) -> GenPoly:
    """One monomial per 1-leaf: x_i along 1-edges, xbar_i along 0-edges, coefficient 1."""
    return GenPoly(t.n, {(p, q): 1 for p, q, b in t.paths() if b == 1}, EXACT)


def random_tree(n: int, rng: np.random.Generator, max_depth: int | None = None,
                stop_prob: float = 0.25) -> DecisionTree:
    """Random tree: each node becomes a leaf with ``stop_prob`` or when no variables remain."""
    if max_depth is None:
        max_depth = n
    var, lo, hi, leaf = [], [], [], []

    def grow(avail: list[int], depth: int) -> int:
        idx = len(var)
        var.append(-1)
        lo.append(-1)
        hi.append(-1)
        leaf.append(-1)
        if not avail or depth >= max_depth or rng.random() < stop_prob:
            leaf[idx] = int(rng.integers(0, 2))
            return idx
        v = avail[int(rng.integers(0, len(avail)))]
        rest = [a for a in avail if a != v]
        var[idx] = v
        lo[idx] = grow(rest, depth + 1)
        hi[idx] = grow(rest, depth + 1)
        return idx

    grow(list(range(n)), 0)
    return DecisionTree(n, tuple(var), tuple(lo), tuple(hi), tuple(leaf))


def chain_or_tree(n: int) -> DecisionTree:
    """Query x1, x2, ... in turn; answer 1 at the first 1, else 0."""
    nodes: list[dict] = []
    for i in range(n):
        nodes.append({"var": i, "lo": 2 * i + 2, "hi": 2 * i + 1})
        nodes.append({"leaf": 1})
    nodes.append({"leaf": 0})
    return DecisionTree.from_nodes(n, nodes)


# --------------------------------------------------------------------------
# randomized trees
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class RandomizedTree:
    """A distribution over trees; weights are non-negative rationals summing to 1."""

    support: tuple  # of (DecisionTree, Fraction)

    def __post_init__(self):
        if not self.support:
            raise ValueError("empty support")
        ws = [Fraction(w) for _, w in self.support]
        if any(w < 0 for w in ws):
            raise ValueError("negative weight")
        if sum(ws) != 1:
            raise ValueError(f"weights sum to {sum(ws)}, not 1")
        if len({t.n for t, _ in self.support}) != 1:
            raise ValueError("trees have different n")
        object.__setattr__(self, "support", tuple((t, Fraction(w)) for t, w in self.support))

    @property
    def n(self) -> int:
        return self.support[0][0].n

    def prob_one(self) -> list[Fraction]:
        """Exact Pr[R(x) = 1] for every input x."""
        out = [Fraction(0)] * (1 << self.n)
        for t, w in self.support:
            vals = tree_table(t).values
            for x in np.flatnonzero(vals):
                out[int(x)] += w
        return out

    def success(self, f: TruthTable) -> list[Fraction]:
        p1 = self.prob_one()
        return [p if f.values[x] else 1 - p for x, p in enumerate(p1)]


def randomized_to_genpoly(r: RandomizedTree, f: TruthTable | None = None,
                          margin: Fraction = Fraction(2, 3)) -> GenPoly:
    """Weighted sum of the trees' polynomials; checks success >= ``margin`` when f is given."""
    if f is not None:
        succ = r.success(f)
        worst = min(range(len(succ)), key=lambda x: succ[x])
        if succ[worst] < margin:
            raise ValueError(f"success probability {succ[worst]} < {margin} at input {worst:0{r.n}b}")
    out = GenPoly(r.n, {}, FLOAT)
    for t, w in r.support:
        out = gen_add(out, tree_to_genpoly(t), 1.0, float(w))
    return out


def subsample_support(r: RandomizedTree, f: TruthTable, k: int, rng: np.random.Generator,
                      margin: Fraction = Fraction(2, 3), max_attempts: int = 100) -> RandomizedTree:
    """Draw k trees i.i.d. from R and keep the uniform mixture once it re-verifies the margin."""
    if k < 1:
        raise ValueError("k must be positive")
    probs = np.array([float(w) for _, w in r.support])
    for _ in range(max_attempts):
        picks = rng.choice(len(r.support), size=k, p=probs / probs.sum())
        counts: dict[int, int] = {}
        for j in picks:
            counts[int(j)] = counts.get(int(j), 0) + 1
        cand = RandomizedTree(tuple((r.support[j][0], Fraction(c, k)) for j, c in sorted(counts.items())))
        if min(cand.success(f)) >= margin:
            return cand
    raise RuntimeError(f"no support of size {k} kept the success margin in {max_attempts} attempts")
