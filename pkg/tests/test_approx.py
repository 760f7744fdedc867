import math
from fractions import Fraction

import numpy as np
import pytest
from numpy.polynomial import chebyshev as npcheb

from boolspar.approx import (
    AMPLIFY_BAND,
    SeparatingCollection,
    amplifier_map,
    amplify,
    check_thr_approximation,
    chebyshev_or_approximator,
    chebyshev_T,
    cubic_h,
    default_collection_size,
    distance_to_bits,
    max_error,
    or_approx_degree,
    or_level,
    pair_terms,
    sparsify_by_sampling,
    symmetric_max_error,
    thr_approximator,
    truncate_and_amplify,
)
from boolspar.boolfun import or_fn, thr_fn
from boolspar.poly import FLOAT, MultilinearPoly, TruthTable, mobius_from_table, poly_values


def test_chebyshev_trig_identity():
    thetas = np.linspace(0.01, math.pi - 0.01, 64)
    for d in range(21):
        T = chebyshev_T(d)
        assert np.max(np.abs(T(np.cos(thetas)) - np.cos(d * thetas))) <= 1e-9


def test_chebyshev_low_degrees():
    assert chebyshev_T(0).coeffs == (1,)
    assert chebyshev_T(1).coeffs == (0, 1)
    assert chebyshev_T(2).coeffs == (-1, 0, 2)
    assert chebyshev_T(3).coeffs == (0, -3, 0, 4)


def test_coefficient_bound():
    for d in range(41):
        assert chebyshev_T(d).max_abs_coeff <= 3**d


def test_degree_choice():
    assert [or_approx_degree(n) for n in (4, 9, 10, 16, 100)] == [4, 6, 7, 8, 20]


@pytest.mark.parametrize("n", [2, 4, 9, 16])
def test_or_approximator_levels_match_p(n):
    # independent evaluation of p(z) = 1 - T_d((n-z)/(n-1)) / T_d(n/(n-1)) in floats
    d = or_approx_degree(n)
    basis = [0] * d + [1]
    top = npcheb.chebval(n / (n - 1), basis)
    q = chebyshev_or_approximator(n)
    for m in range(n + 1):
        p = 1 - npcheb.chebval((n - m) / (n - 1), basis) / top
        assert abs(float(q.level_value(m)) - p) < 1e-9
    assert q.level_value(0) == 0
    assert symmetric_max_error(q, or_level) <= 1 / 3


def test_or_approximator_multilinear_expansion():
    q = chebyshev_or_approximator(6)
    p = q.to_multilinear()
    assert p.spar == q.spar and math.isclose(p.l1, q.l1)
    assert math.isclose(max_error(p, or_fn(6)), max_error(q, or_fn(6)), abs_tol=1e-12)


def test_or_approximator_guards():
    with pytest.raises(ValueError):
        chebyshev_or_approximator(1)
    with pytest.raises(ValueError):
        chebyshev_or_approximator(401)


def test_pair_terms_match_product():
    n, s1, s2 = 5, 0b00110, 0b10011
    full = (1 << n) - 1
    p = MultilinearPoly(n, pair_terms(n, s1, s2))
    for x in range(1 << n):
        a1, b1 = int(x & s1 == s1), int(x & (full & ~s1) == full & ~s1)
        a2, b2 = int(x & s2 == s2), int(x & (full & ~s2) == full & ~s2)
        X = int(x == full)
        assert p(x) == (a1 + b1 - X) * (a2 + b2 - X)


def test_separation_fraction_brute():
    coll = SeparatingCollection(3, ((0b001, 0b011), (0b000, 0b110), (0b101, 0b101)))
    # per pair {i, j}: does S1 or S2 split it?
    def splits(s, i, j):
        return (s >> i & 1) != (s >> j & 1)

    fracs = []
    for i in range(3):
        for j in range(i + 1, 3):
            fracs.append(Fraction(sum(splits(a, i, j) or splits(b, i, j) for a, b in coll.pairs), 3))
    assert coll.delta == min(fracs)


def test_thr_small_collection():
    a = thr_approximator(10, t=40, seed=0, max_attempts=20000)
    assert a.collection.is_separating()
    assert a.spar <= 9 * a.t
    chk = check_thr_approximation(a)
    assert chk["ones_exact"] and chk["zeros_within_third"]
    assert max_error(a.poly, thr_fn(10)) <= 1 / 3 + 1e-12


def test_thr_default_size():
    assert default_collection_size(8) == math.ceil(216 * math.log(64))


def test_thr_budget_exhausted():
    with pytest.raises(RuntimeError):
        thr_approximator(12, t=2, seed=0, max_attempts=3)


def test_amplifier_fixed_points_and_band():
    assert np.allclose(amplifier_map([0.0, 1.0], 4), [0.0, 1.0])
    ys = np.linspace(-AMPLIFY_BAND, AMPLIFY_BAND, 2001)
    assert np.all(np.abs(amplifier_map(ys, 4)) < 1 / 3)
    assert np.all(np.abs(amplifier_map(1 - ys, 4) - 1) < 1 / 3)


def test_plain_cubic_entry_misses_the_wide_band():
    # h applied five times sends -0.44 above 1/2 and 1.44 below 1/2
    y = np.array([-0.44, 1.44])
    for _ in range(5):
        y = cubic_h(y)
    assert y[0] > 0.5 and y[1] < 0.5


def test_amplify_preserves_rounding_and_exact_inputs():
    rng = np.random.default_rng(0)
    n = 5
    target = rng.integers(0, 2, 1 << n)
    noisy = target + rng.uniform(-1 / 3, 1 / 3, 1 << n)
    p = mobius_from_table(TruthTable(n, noisy, "real"))
    a = amplify(p, 3)
    vals = poly_values(a)
    assert np.array_equal(np.round(vals), target)
    assert np.all(distance_to_bits(vals) <= distance_to_bits(noisy) + 1e-12)
    exact = mobius_from_table(or_fn(4))
    assert np.allclose(poly_values(amplify(exact, 2)), poly_values(exact))


def test_amplify_precondition():
    with pytest.raises(ValueError, match="precondition"):
        amplify(MultilinearPoly(2, {0: 0.5}, FLOAT), 1)


def test_truncate_and_amplify():
    out = truncate_and_amplify(mobius_from_table(or_fn(4)), or_fn(4), 5)
    assert out["truncated_error"] == 0 and out["amplified_error"] < 1e-12


def test_sparsify_single_monomial_is_exact():
    p = MultilinearPoly(4, {0b1011: -3})
    q = sparsify_by_sampling(p, 7, seed=1)
    assert q.terms == {0b1011: -3.0}


def test_sparsify_term_count_and_concentration():
    n = 8
    rng = np.random.default_rng(5)
    terms = {int(s): float(rng.choice([-1, 1])) for s in rng.choice(1 << n, 40, replace=False)}
    p = MultilinearPoly(n, terms, FLOAT)
    k = 400
    q = sparsify_by_sampling(p, k, seed=2)
    assert q.spar <= k
    dev = np.max(np.abs(poly_values(q) - poly_values(p)))
    assert dev <= p.l1 * math.sqrt(math.log(2 ** (n + 1)) / (2 * k))


def test_sparsify_unbiased():
    p = chebyshev_or_approximator(5).to_multilinear()
    target = poly_values(p)

    def avg_error(trials):
        acc = np.zeros_like(target)
        for s in range(trials):
            acc += poly_values(sparsify_by_sampling(p, 20, seed=s))
        return np.max(np.abs(acc / trials - target))

    e1, e2 = avg_error(60), avg_error(960)
    # 16x the trials should shrink the error about 4x
    assert 4 / 3 <= e1 / e2 <= 12


def test_max_error_exact_representation():
    assert max_error(mobius_from_table(thr_fn(6)), thr_fn(6)) == 0
    assert max_error(chebyshev_or_approximator(16), or_fn(16)) <= 1 / 3
