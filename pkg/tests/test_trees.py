import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treelcs import (LukasiewiczPath, OrientedSubtree, cut_at,
                     decode_lukasiewicz, encode_lukasiewicz, errors,
                     neighbor_component_depths, parse, reroot, serialize,
                     subtree_at, trim_at)
from treelcs.trees import (distance_matrix, from_parent_list, to_parent_list)

from conftest import trees_up_to, uniform_tree


def steps(*xs):
    return LukasiewiczPath(np.array(xs, dtype=np.int64))


def test_decode_examples():
    assert decode_lukasiewicz(steps(-1)).size == 1
    t = decode_lukasiewicz(steps(1, -1, -1))
    assert t.size == 3 and t.k(0) == 2
    t = decode_lukasiewicz(steps(0, -1))  # chain of 2, not rejected
    assert t.size == 2 and t.height == 1
    with pytest.raises(errors.InvalidPath):
        steps(-1, -1)
    with pytest.raises(errors.InvalidPath):
        steps(1, -1)
    with pytest.raises(errors.InvalidPath):
        steps(-2, 0)


def test_encode_examples():
    assert list(encode_lukasiewicz(parse("()")).steps) == [-1]
    assert list(encode_lukasiewicz(parse("((()))")).steps) == [0, 0, -1]
    assert list(encode_lukasiewicz(parse("(()()())")).steps) == [2, -1, -1, -1]


def test_roundtrip_exhaustive_up_to_12():
    # decode(encode) = id and encode(decode) = id on every plane tree
    count = 0
    for t in trees_up_to(12):
        path = encode_lukasiewicz(t)
        assert decode_lukasiewicz(path) == t
        count += 1
    assert count == 1 + 1 + 2 + 5 + 14 + 42 + 132 + 429 + 1430 + 4862 \
        + 16796 + 58786


def test_roundtrip_random_large():
    # 1e4 random trees beyond the exhaustive range
    for i in range(10 ** 4):
        t = uniform_tree(13 + (7 * i) % 200, seed=7000 + i)
        assert decode_lukasiewicz(encode_lukasiewicz(t)) == t
        if i % 20 == 0:
            assert parse(serialize(t)) == t


def test_outdegree_sum():
    for t in trees_up_to(7):
        k = np.array([t.k(u) for u in range(t.size)])
        assert k.sum() == t.size - 1


def test_subtree_cut_trim_examples():
    t = parse("(()(()))")  # root with leaf a=1 and b=2 (one child)
    assert subtree_at(t, 0) == t
    assert cut_at(t, 1) == t
    tr = trim_at(t, 2)
    assert serialize(tr) == "(())" and tr.size == 2
    with pytest.raises(errors.RootHasNoTrim):
        trim_at(t, 0)
    with pytest.raises(errors.NodeNotFound):
        subtree_at(t, 99)


def test_subtree_cut_trim_size_identities():
    for i in range(40):
        t = uniform_tree(30, seed=8100 + i)
        for u in range(1, t.size, 5):
            st = subtree_at(t, u)
            ct = cut_at(t, u)
            assert st.size + ct.size == t.size + 1
            p = int(t.parent[u])
            tr = trim_at(t, u)
            assert tr.size == subtree_at(t, p).size - st.size


def test_reroot_examples():
    ch = parse("((()))")
    assert serialize(reroot(ch, 1)) == "(()())"
    k13 = parse("(()()())")
    assert serialize(reroot(k13, 1)) == "((()()))"
    assert reroot(k13, 0) == k13


def test_reroot_preserves_graph():
    for i in range(25):
        t = uniform_tree(14, seed=9100 + i)
        d0 = distance_matrix(t)
        deg0 = sorted(t.degree(u) for u in range(t.size))
        for v in range(t.size):
            r = reroot(t, v)
            assert sorted(r.degree(u) for u in range(r.size)) == deg0
            # distances are preserved as a multiset over pairs
            d1 = distance_matrix(r)
            assert sorted(d0.ravel()) == sorted(d1.ravel())


def test_neighbor_component_depths_examples():
    assert neighbor_component_depths(parse("()"), 0) == []
    k13 = parse("(()()())")
    assert neighbor_component_depths(k13, 0) == [1, 1, 1]
    p4 = parse("((((()))))")
    assert neighbor_component_depths(p4, 1) == [3, 1]


def test_neighbor_component_depths_match_brute():
    # entry for neighbor w = 1 + height of the component of w in t - v,
    # checked against explicit component extraction via rerooting
    for i in range(15):
        t = uniform_tree(12, seed=9500 + i)
        for v in range(t.size):
            got = neighbor_component_depths(t, v)
            r = reroot(t, v)
            brute = sorted((1 + subtree_at(r, int(c)).height
                            for c in r.children(0)), reverse=True)
            assert got == brute


def test_serialize_parse_errors():
    with pytest.raises(errors.ParseError) as e:
        parse("(()")
    assert e.value.offset == 3
    with pytest.raises(errors.ParseError) as e:
        parse("())(")
    assert e.value.offset == 2
    with pytest.raises(errors.ParseError):
        parse("")
    with pytest.raises(errors.ParseError):
        parse("(x)")
    with pytest.raises(errors.ParseError):
        parse("()()")


def test_parent_list_roundtrip():
    t = parse("(()(()))")
    assert from_parent_list(to_parent_list(t)) == t
    # arbitrary order is normalized to preorder
    assert from_parent_list([2, 2, -1]).size == 3
    with pytest.raises(errors.TreeLcsError):
        from_parent_list([0, 0])  # no root
    with pytest.raises(errors.TreeLcsError):
        from_parent_list([-1, -1])  # two roots


def test_oriented_subtree():
    t = parse("(()(()))")
    down = OrientedSubtree(t, 0, 2).materialize()
    assert down == parse("(())")
    up = OrientedSubtree(t, 2, 0).materialize()
    assert up.size == 2
    with pytest.raises(errors.TreeLcsError):
        OrientedSubtree(t, 1, 3).validate()


@given(st.integers(2, 40), st.integers(0, 10 ** 6))
@settings(max_examples=60, deadline=None)
def test_roundtrip_property(n, seed):
    t = uniform_tree(n, seed=seed)
    assert parse(serialize(t)) == t
    assert decode_lukasiewicz(encode_lukasiewicz(t)) == t
