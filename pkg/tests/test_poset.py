import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hscale.errors import CycleError, NotComparable, NotDirected, UnknownLabel
from hscale.poset import build_poset, check_directed, transitive_closure, upper_bound


def chain3():
    return build_poset(["0", "1", "2"], [("0", "1"), ("1", "2")])


def diamond_top():
    return build_poset(["a", "b", "c"], [("a", "c"), ("b", "c")])


def test_chain_closure_infers_0_le_2():
    p = chain3()
    assert p.leq("0", "2") and not p.leq("2", "0")
    assert p.top == "2" and p.minimum == "0"
    assert check_directed(p) is None


def test_diamond_top_is_directed_without_minimum():
    p = diamond_top()
    assert check_directed(p) is None
    assert p.minimum is None
    assert sorted(p.minimal_elements()) == ["a", "b"]
    assert upper_bound(p, "a", "b") == "c"


def test_cycle_rejected():
    with pytest.raises(CycleError):
        build_poset(["a", "b"], [("a", "b"), ("b", "a")])


def test_unknown_label_and_duplicates():
    with pytest.raises(UnknownLabel):
        build_poset(["a"], [("a", "z")])
    with pytest.raises(ValueError):
        build_poset(["a", "a"], [])


def test_undirected_pair_witness():
    p = build_poset(["a", "b"], [])
    assert check_directed(p) == ("a", "b")
    with pytest.raises(NotDirected):
        upper_bound(p, "a", "b")
    with pytest.raises(NotDirected):
        p.top


def test_upper_bound_reflexive_and_chain():
    p = chain3()
    assert upper_bound(p, "0", "2") == "2"
    assert upper_bound(p, "1", "1") == "1"


def test_upper_bound_tie_break_by_element_order():
    # a, b both below x and y, which are both below t: two minimal upper bounds
    p = build_poset(["a", "b", "y", "x", "t"],
                    [("a", "x"), ("b", "x"), ("a", "y"), ("b", "y"), ("x", "t"), ("y", "t")])
    assert upper_bound(p, "a", "b") == "y"


def test_covering_pairs_drop_implied_edges():
    p = build_poset(["0", "1", "2"], [("0", "1"), ("1", "2"), ("0", "2")])
    assert sorted(p.covering_pairs()) == [("0", "1"), ("1", "2")]


def test_chain_between():
    p = chain3()
    assert p.chain_between("0", "2") == ["0", "1", "2"]
    with pytest.raises(NotComparable):
        p.chain_between("2", "0")


@st.composite
def dags(draw):
    n = draw(st.integers(1, 7))
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if draw(st.booleans())]
    return n, edges


def brute_closure(n, edges):
    rel = {(i, i) for i in range(n)} | set(edges)
    changed = True
    while changed:
        changed = False
        for (a, b), (c, d) in itertools.product(list(rel), list(rel)):
            if b == c and (a, d) not in rel:
                rel.add((a, d))
                changed = True
    return rel


@settings(max_examples=60, deadline=None)
@given(dags())
def test_closure_matches_brute_force(data):
    n, edges = data
    labels = [str(i) for i in range(n)]
    p = build_poset(labels, [(str(a), str(b)) for a, b in edges])
    ref = brute_closure(n, edges)
    for i in range(n):
        for j in range(n):
            assert p.leq(str(i), str(j)) == ((i, j) in ref)
    again = transitive_closure(p.leq_matrix)
    assert np.array_equal(again, p.leq_matrix)


@settings(max_examples=60, deadline=None)
@given(dags())
def test_upper_bound_properties(data):
    n, edges = data
    labels = [str(i) for i in range(n)]
    # add a top so the poset is directed
    p = build_poset(labels + ["T"], [(str(a), str(b)) for a, b in edges] + [(x, "T") for x in labels])
    assert check_directed(p) is None
    for a in p.elements:
        for b in p.elements:
            u = upper_bound(p, a, b)
            assert p.leq(a, u) and p.leq(b, u)
            assert u == upper_bound(p, b, a)
