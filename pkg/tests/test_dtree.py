from fractions import Fraction

import numpy as np
import pytest

from boolspar.boolfun import majority_fn, or_fn
from boolspar.dtree import (
    DecisionTree,
    RandomizedTree,
    chain_or_tree,
    eval_tree,
    random_tree,
    randomized_to_genpoly,
    subsample_support,
    tree_table,
    tree_to_genpoly,
)
from boolspar.genpoly import gen_max_error, gen_values
from boolspar.poly import TruthTable


def and2_tree():
    return DecisionTree.from_nodes(2, [
        {"var": 0, "lo": 1, "hi": 2}, {"leaf": 0},
        {"var": 1, "lo": 3, "hi": 4}, {"leaf": 0}, {"leaf": 1},
    ])


def full_tree(n, labels):
    """Complete tree querying x1..xn in order; leaf for input x gets labels[x]."""
    nodes = []

    def build(depth, prefix):
        idx = len(nodes)
        nodes.append(None)
        if depth == n:
            nodes[idx] = {"leaf": int(labels[prefix])}
        else:
            lo = build(depth + 1, prefix)
            hi = build(depth + 1, prefix | (1 << depth))
            nodes[idx] = {"var": depth, "lo": lo, "hi": hi}
        return idx

    build(0, 0)
    return DecisionTree.from_nodes(n, nodes)


def test_constant_and_dictator():
    assert all(eval_tree(DecisionTree.constant(3, 1), x) == 1 for x in range(8))
    t = DecisionTree.from_nodes(3, [{"var": 2, "lo": 1, "hi": 2}, {"leaf": 0}, {"leaf": 1}])
    assert [t(x) for x in range(8)] == [(x >> 2) & 1 for x in range(8)]


def test_full_tree_matches_table(rng):
    labels = rng.integers(0, 2, 8)
    t = full_tree(3, labels)
    assert np.array_equal(tree_table(t).values, labels)
    assert (t.size, t.depth) == (8, 3)


def test_and2_conversion():
    t = and2_tree()
    g = tree_to_genpoly(t)
    assert g.monomials == {(0b11, 0): 1}
    assert t.size == 3


def test_chain_or_monomials():
    n = 4
    g = tree_to_genpoly(chain_or_tree(n))
    expect = {(1 << i, (1 << i) - 1): 1 for i in range(n)}
    assert g.monomials == expect
    assert gen_max_error(g, or_fn(n)) == 0


def test_random_trees_convert_exactly(rng):
    for _ in range(200):
        n = int(rng.integers(1, 7))
        t = random_tree(n, rng)
        g = tree_to_genpoly(t)
        assert np.array_equal(gen_values(g), tree_table(t).values)
        assert g.spar <= t.size and g.l1 <= t.size and g.deg <= t.depth


def test_structure_validation():
    with pytest.raises(ValueError, match="twice"):
        DecisionTree.from_nodes(2, [{"var": 0, "lo": 1, "hi": 2}, {"var": 0, "lo": 3, "hi": 4},
                                    {"leaf": 0}, {"leaf": 0}, {"leaf": 1}])
    with pytest.raises(ValueError):
        DecisionTree.from_nodes(2, [{"var": 0, "lo": 1, "hi": 1}, {"leaf": 0}])
    with pytest.raises(ValueError):
        DecisionTree.from_nodes(2, [{"var": 5, "lo": 1, "hi": 2}, {"leaf": 0}, {"leaf": 1}])
    with pytest.raises(ValueError):
        DecisionTree.from_nodes(2, [{"leaf": 2}])


def test_randomized_exact_tree():
    t = full_tree(3, majority_fn(3).values)
    r = RandomizedTree(((t, 1),))
    g = randomized_to_genpoly(r, majority_fn(3))
    assert gen_max_error(g, majority_fn(3)) == 0


def test_randomized_majority_vote():
    # three trees, each wrong on a different single input; each input is right with prob >= 2/3
    f = majority_fn(3)
    trees = []
    for bad in (1, 2, 4):
        labels = f.values.copy()
        labels[bad] ^= 1
        trees.append((full_tree(3, labels), Fraction(1, 3)))
    r = RandomizedTree(tuple(trees))
    assert min(r.success(f)) == Fraction(2, 3)
    g = randomized_to_genpoly(r, f)
    assert gen_max_error(g, f) <= 1 / 3 + 1e-12
    assert g.l1 <= max(t.size for t, _ in trees) + 1e-12


def test_convex_combination_with_constant():
    f = or_fn(3)
    r = RandomizedTree(((chain_or_tree(3), Fraction(2, 3)), (DecisionTree.constant(3, 0), Fraction(1, 3))))
    assert gen_max_error(randomized_to_genpoly(r, f), f) <= 1 / 3 + 1e-12


def test_randomized_rejects_weak_distribution():
    f = or_fn(2)
    r = RandomizedTree(((DecisionTree.constant(2, 0), Fraction(1, 2)), (DecisionTree.constant(2, 1), Fraction(1, 2))))
    with pytest.raises(ValueError, match="success"):
        randomized_to_genpoly(r, f)
    with pytest.raises(ValueError):
        RandomizedTree(((DecisionTree.constant(2, 0), Fraction(1, 2)),))


def test_subsample_support(rng):
    f = or_fn(3)
    r = RandomizedTree(((chain_or_tree(3), Fraction(9, 10)), (DecisionTree.constant(3, 0), Fraction(1, 10))))
    s = subsample_support(r, f, 5, rng)
    assert min(s.success(f)) >= Fraction(2, 3)
    assert sum(w for _, w in s.support) == 1
