import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from boolspar.boolfun import critical_inputs, majority_fn, or_fn, restricted_sensitivity, thr_fn
from boolspar.maxsens import (
    PASSIVE,
    TERMINAL,
    MaxSensitivitySampler,
    MaxSensParams,
    active_lower_bound,
    lex_key,
    max_sensitivity_restriction,
    verify_max_sens_distribution,
    witness_ok,
)
from boolspar.poly import TruthTable

from test_boolfun import random_monotone


def test_single_input_fixes_everything():
    f = majority_fn(5)
    rho, trace = max_sensitivity_restriction(f, [0b00111], MaxSensParams(5, 0))
    assert rho.free == 0 and rho.ones == 0b00111 and rho.zeros == 0b11000
    assert trace.witness == 0b00111 and trace.active_count == 0


def test_terminal_picks_lexicographically_smallest():
    # OR_2 with F = {x1=1, x2=1}: as strings x1x2 these are "10" and "01"; "01" (= 0b10) wins
    rho, trace = max_sensitivity_restriction(or_fn(2), [0b01, 0b10], MaxSensParams(2, 0))
    assert trace.witness == 0b10
    assert (rho.zeros, rho.ones) == (0b01, 0b10)
    assert lex_key(0b10, 2) < lex_key(0b01, 2)


def test_or_witness_and_sensitivity():
    f = or_fn(6)
    c = critical_inputs(f)
    F = c.M0 | c.M1
    s = MaxSensitivitySampler(f, F, check_separating=True)
    # x1 = 0 keeps 6 of the 7 inputs and 6 * 6 >= 5 * 7, so the first step is passive
    assert (s.root.kind, s.root.var, s.root.u) == (PASSIVE, 0, 0)
    rng = np.random.default_rng(2)
    for _ in range(300):
        rho, trace = s.sample(rng)
        assert witness_ok(f, F, rho, trace.witness)
        assert restricted_sensitivity(f, rho) == rho.free_count
        assert trace.steps[-1].kind == TERMINAL


def test_determinism():
    f = majority_fn(5)
    F = critical_inputs(f).M1
    assert max_sensitivity_restriction(f, F, MaxSensParams(5, 9)) == max_sensitivity_restriction(f, F, MaxSensParams(5, 9))


def test_errors():
    f = or_fn(3)
    with pytest.raises(ValueError):
        MaxSensitivitySampler(f, [])
    with pytest.raises(ValueError):
        MaxSensitivitySampler(f, [0b011, 0b111, 0b001], check_separating=True)
    with pytest.raises(ValueError):
        MaxSensitivitySampler(f, [0b1000])


def test_active_bound_formula():
    assert active_lower_bound(20, 5) == 0
    assert active_lower_bound(28, 8) > 0


@given(st.integers(2, 6), st.integers(0, 10**6))
def test_random_monotone_functions(n, seed):
    f = random_monotone(n, np.random.default_rng(seed))
    c = critical_inputs(f)
    F = c.M0 | c.M1
    rep = verify_max_sens_distribution(f, F, 40, seed, slack=1.0)
    assert rep.per_run_ok, rep.examples


def test_report_fields():
    f = thr_fn(6)
    rep = verify_max_sens_distribution(f, critical_inputs(f).M0, 2000, 5, name="thr:6")
    d = rep.as_dict()
    assert d["per_run_ok"] and d["stats_ok"]
    assert d["F_size"] == 15
    assert sum(d["free_hist"].values()) == 2000
    assert abs(d["free_active_ratio"] - 1 / 3) < 0.05
