import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from boolspar import io
from boolspar.boolfun import sink_genpoly
from boolspar.dtree import chain_or_tree, random_tree
from boolspar.poly import FLOAT, MultilinearPoly, TruthTable


@given(st.integers(1, 6).flatmap(
    lambda n: st.tuples(st.just(n), st.dictionaries(st.integers(0, (1 << n) - 1), st.integers(-9, 9)))))
def test_poly_json_round_trip(arg):
    n, terms = arg
    p = MultilinearPoly(n, terms)
    assert io.poly_from_json(json.loads(json.dumps(io.poly_to_json(p)))) == p


def test_poly_json_uses_one_based_vars():
    d = io.poly_to_json(MultilinearPoly(3, {0b101: 2, 0: -1}))
    assert d["terms"] == [{"vars": [], "coeff": -1}, {"vars": [1, 3], "coeff": 2}]
    assert d["coeff_kind"] == "int"


def test_float_poly_round_trip():
    p = MultilinearPoly(2, {1: 0.25, 3: -1.5}, FLOAT)
    assert io.poly_from_json(io.poly_to_json(p)) == p


@pytest.mark.parametrize("bad", [
    {"terms": []},
    {"n": 2, "terms": [{"vars": [3], "coeff": 1}]},
    {"n": 2, "terms": [{"vars": [1, 1], "coeff": 1}]},
    {"n": 2, "terms": [{"vars": [1], "coeff": 1}, {"vars": [1], "coeff": 2}]},
    {"n": 2, "coeff_kind": "int", "terms": [{"vars": [1], "coeff": 0.5}]},
    {"n": 2, "coeff_kind": "complex", "terms": []},
])
def test_poly_json_errors(bad):
    with pytest.raises(io.FormatError):
        io.poly_from_json(bad)


def test_genpoly_round_trip():
    g = sink_genpoly(4)
    assert io.genpoly_from_json(io.genpoly_to_json(g)) == g
    with pytest.raises(io.FormatError):
        io.genpoly_from_json({"n": 2, "terms": [{"pos": [1], "neg": [1], "coeff": 1}]})


def test_tree_round_trip(rng):
    for _ in range(20):
        t = random_tree(5, rng)
        assert io.tree_from_json(io.tree_to_json(t)) == t
    d = io.tree_to_json(chain_or_tree(2))
    assert d["nodes"][0] == {"var": 1, "lo": 2, "hi": 1}
    with pytest.raises(io.FormatError):
        io.tree_from_json({"n": 2, "nodes": [{"var": 1, "lo": 0, "hi": 0}]})


def test_table_text_round_trip(rng):
    f = TruthTable(4, rng.integers(0, 2, 16))
    text = io.table_to_text(f)
    assert text.splitlines()[0] == "n=4" and len(text.splitlines()[1]) == 16
    assert io.table_from_text(text) == f
    g = TruthTable(2, np.array([0.5, 1, -2, 3.25]), "real")
    assert io.table_from_text(io.table_to_text(g)) == g
    h = io.table_from_text("n=1\n3 -4\n")
    assert h.value_kind == "integer"


@pytest.mark.parametrize("text", ["0101", "n=2\n010", "n=x\n01", "n=1\na b"])
def test_table_text_errors(text):
    with pytest.raises(io.FormatError):
        io.table_from_text(text)


def test_input_sets(tmp_path):
    assert io.input_to_bits(0b0011, 4) == "1100"
    assert io.bits_to_input("1100", 4) == 0b0011
    path = tmp_path / "F.txt"
    io.write_input_set(path, {1, 6}, 3)
    assert path.read_text() == "100\n011\n"
    assert io.read_input_set(path, 3) == [1, 6]
    with pytest.raises(io.FormatError):
        io.bits_to_input("12", 2)
    (tmp_path / "empty.txt").write_text("# nothing\n")
    with pytest.raises(io.FormatError):
        io.read_input_set(tmp_path / "empty.txt", 3)
