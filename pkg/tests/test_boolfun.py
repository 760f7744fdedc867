import itertools

import numpy as np
import pytest

from boolspar.boolfun import (
    ZOO_FAMILIES,
    and_fn,
    compress,
    critical_inputs,
    dense_sensitive_subset,
    identify_blocks,
    independent_zero_restriction,
    is_monotone,
    is_separating,
    majority_fn,
    max_disjoint_packing,
    mbs,
    mbs_at,
    minimal_sensitive_zero_blocks,
    named,
    or_fn,
    parity_fn,
    parse_function,
    restrict_set,
    restrict_table,
    restricted_sensitivity,
    sensitive_set,
    sensitivity,
    sensitivity_counts,
    thr_fn,
    zero_restriction_survival,
)
from boolspar.poly import Restriction, TruthTable, popcount

from conftest import brute_sensitive


def random_monotone(n, rng, k=None):
    """Upward closure of a few random inputs."""
    k = k if k is not None else int(rng.integers(1, 5))
    seeds = rng.integers(0, 1 << n, k)
    vals = np.array([int(any(x & s == s for s in seeds)) for x in range(1 << n)])
    return TruthTable(n, vals)


def brute_mbs(f):
    """Max number of disjoint blocks within the zeros of x that each flip f; plain recursion."""
    n, v = f.n, f.values
    best = 0
    for x in range(1 << n):
        zeros = [i for i in range(n) if not x >> i & 1]
        cands = []
        for r in range(1, len(zeros) + 1):
            for sub in itertools.combinations(zeros, r):
                b = sum(1 << i for i in sub)
                if v[x | b] != v[x]:
                    cands.append(b)

        def rec(used, start, count):
            nonlocal best
            best = max(best, count)
            for j in range(start, len(cands)):
                if not cands[j] & used:
                    rec(used | cands[j], j + 1, count + 1)

        rec(0, 0, 0)
    return best


def test_zoo_parsing_and_sizes():
    assert parse_function("or:8").n == 8
    assert parse_function("and-or2:3").n == 6
    assert parse_function("sink:4").n == 6
    assert parse_function("fmixed:3").n == 5
    assert set(ZOO_FAMILIES) >= {"or", "thr", "majority", "parity"}
    for bad in ("nope:3", "or", "or:x", "thr:1"):
        with pytest.raises(ValueError):
            parse_function(bad)


def test_zoo_definitions():
    assert majority_fn(5)(0b00111) == 1 and majority_fn(5)(0b00011) == 0
    assert majority_fn(4)(0b0011) == 0  # ties go to 0
    assert thr_fn(4)(0b1110) == 1 and thr_fn(4)(0b1100) == 0
    assert parity_fn(3)(0b111) == 1
    f = named("and-or2", 2).table
    assert f(0b0101) == 1 and f(0b0011) == 0


def test_sensitivity_against_brute_force(rng):
    for _ in range(20):
        n = int(rng.integers(1, 7))
        vals = rng.integers(0, 2, 1 << n)
        f = TruthTable(n, vals)
        counts = sensitivity_counts(f)
        for x in range(1 << n):
            s = brute_sensitive(vals, n, x)
            assert sensitive_set(f, x) == sum(1 << i for i in s)
            assert counts[x] == len(s)
        assert sensitivity(f) == max(counts)


def test_known_sensitivities():
    assert sensitivity(or_fn(6)) == 6
    assert sensitivity(parity_fn(5)) == 5
    assert sensitivity(majority_fn(5)) == 3
    assert sensitivity(thr_fn(6)) == 5  # one zero: the n-1 ones are sensitive, the zero is not


def test_restrict_table_and_sensitivity(rng):
    f = TruthTable(5, rng.integers(0, 2, 32))
    rho = Restriction.from_assign(5, {0: 1, 1: "*", 2: 0, 3: "*", 4: 1})
    g = restrict_table(f, rho)
    assert g.n == 2
    for y in range(4):
        x = 0b10001 | ((y & 1) << 1) | ((y >> 1) << 3)
        assert g(y) == f(x)
    assert restricted_sensitivity(f, rho) == sensitivity(g)
    assert restricted_sensitivity(f, Restriction(5, zeros=31)) == 0


def test_compress():
    assert compress(0b10110, [1, 2, 4]) == 0b111
    assert compress(0b10110, [0, 3]) == 0


def test_critical_inputs_of_or_and_thr():
    c = critical_inputs(or_fn(4))
    assert c.M1 == {1, 2, 4, 8} and c.M0 == {0}
    c = critical_inputs(thr_fn(5))
    assert c.M1 == {0b11111 & ~(1 << i) for i in range(5)}
    assert len(c.M0) == 10 and all(popcount(x) == 3 for x in c.M0)


def brute_critical(f):
    """Minterms and maxterms by definition: minimal 1-sets and minimal 0-sets."""
    n, v = f.n, f.values
    ones = {x for x in range(1 << n) if v[x] == 1 and all(v[x & ~(1 << i)] == 0 for i in range(n) if x >> i & 1)}
    zeros = {x for x in range(1 << n) if v[x] == 0 and all(v[x | (1 << i)] == 1 for i in range(n) if not x >> i & 1)}
    return zeros, ones


def test_critical_inputs_brute(rng):
    for _ in range(30):
        f = random_monotone(int(rng.integers(2, 7)), rng)
        assert is_monotone(f)
        c = critical_inputs(f)
        assert (c.M0, c.M1) == brute_critical(f)


def test_critical_inputs_reject_non_monotone():
    with pytest.raises(ValueError):
        critical_inputs(parity_fn(3))


def test_separation(rng):
    f = or_fn(4)
    c = critical_inputs(f)
    assert is_separating(c.M0 | c.M1, f)
    # two 1-inputs differing only on an insensitive coordinate
    assert not is_separating([0b0011, 0b0111], f)
    with pytest.raises(ValueError):
        is_separating([1, 1], f)


def test_separation_closed_under_restriction(rng):
    for _ in range(50):
        n = int(rng.integers(2, 7))
        f = random_monotone(n, rng)
        c = critical_inputs(f)
        F = c.M0 | c.M1
        assign = {i: [0, 1, "*"][int(rng.integers(0, 3))] for i in range(n)}
        rho = Restriction.from_assign(n, assign)
        if rho.free_count == 0:
            continue
        consistent = [w for w in F if w & rho.set_vars == rho.ones]
        G = restrict_set(F, rho)
        assert len(G) == len(consistent)
        assert is_separating(G, restrict_table(f, rho))


def test_dense_sensitive_subset(rng):
    for _ in range(40):
        n = int(rng.integers(2, 7))
        f = random_monotone(n, rng)
        c = critical_inputs(f)
        F = c.M0 | c.M1
        if len(F) < 2:
            continue
        i, sub = dense_sensitive_subset(F, f)
        assert 2 * n * len(sub) >= len(F)
        assert all(sensitive_set(f, w) >> i & 1 for w in sub)
        counts = [sum(1 for w in F if sensitive_set(f, w) >> j & 1) for j in range(n)]
        assert len(sub) == max(counts) and counts.index(max(counts)) == i


def test_minimal_blocks():
    f = or_fn(3)
    assert sorted(minimal_sensitive_zero_blocks(f, 0)) == [1, 2, 4]
    assert minimal_sensitive_zero_blocks(f, 1) == []
    assert minimal_sensitive_zero_blocks(and_fn(3), 0) == [7]


def test_packing():
    assert max_disjoint_packing([0b11, 0b110, 0b1100, 0b1], 0b1111) == 2
    assert max_disjoint_packing([0b1, 0b10, 0b100], 0b111) == 3
    assert max_disjoint_packing([], 0b111) == 0


def test_mbs_matches_brute_force(rng):
    for _ in range(25):
        n = int(rng.integers(1, 6))
        f = TruthTable(n, rng.integers(0, 2, 1 << n))
        assert mbs(f) == brute_mbs(f)


def test_mbs_known_values():
    for n in range(1, 8):
        assert mbs(or_fn(n)) == n
        assert mbs(and_fn(n)) == 1
    assert mbs(TruthTable(3, np.zeros(8, dtype=int))) == 0
    assert mbs(or_fn(16), exact=False) == 16
    with pytest.raises(ValueError):
        mbs(or_fn(15))


def test_mbs_greedy_is_lower_bound(rng):
    for _ in range(15):
        f = TruthTable(5, rng.integers(0, 2, 32))
        for x in range(32):
            assert mbs_at(f, x, exact=False) <= mbs_at(f, x)


def test_identify_blocks():
    f = or_fn(6)
    g = identify_blocks(f, 0, [0b11, 0b1100])
    assert g == or_fn(2)
    with pytest.raises(ValueError):
        identify_blocks(f, 0, [0b11, 0b10])
    with pytest.raises(ValueError):
        identify_blocks(f, 1, [0b11])


def test_independent_zero_restriction():
    rho = independent_zero_restriction(10, 3)
    assert rho.ones == 0 and rho.zeros | rho.free == (1 << 10) - 1
    assert independent_zero_restriction(10, 3) == rho


def test_zero_restriction_survival_close_to_expected():
    rates = zero_restriction_survival(8, [0b1, 0b111, 0b11111111], 40000, 1)
    for r, d in zip(rates, (1, 3, 8)):
        assert abs(r - 2.0**-d) < 0.015
