import itertools

import pytest

from phylonet.core import InvalidStructure, reticulation_number, unroot
from phylonet.gadgets import (NdpInstance, _gadget_edges,
                              backmap_restriction, hn_to_ruhn,
                              merged_network, ndp_oracle, ndp_to_utc,
                              stupid_rooting)
from phylonet.newick import parse_tree, write_tree
from phylonet.ruhn import _root_at_split, ruhn_exact
from phylonet.utc import rooted_tc, utc_oracle, utc_solve


def _named_fresh():
    counter = itertools.count()
    return lambda: "n%d" % next(counter)


# the three terminal-splitting templates, written out so the
# construction stays visually auditable
TEMPLATE_3 = [
    ("n0", "n1"), ("n1", "n2"), ("n1", "n3"), ("n2", "n4"), ("n3", "n5"),
    ("n4", "n6"), ("n5", "n7"), ("n5", "n6"), ("n4", "n7"), ("n7", "n8"),
    ("n0", "n9"), ("n8", "n10"), ("n9", "n11"), ("n8", "n11"),
    ("n9", "n10"), ("n11", "n12"), ("n6", "n13"), ("n12", "n14"),
    ("n13", "n15"), ("n13", "n14"), ("n12", "n15"),
    ("n15", "n16"), ("n14", "n17"), ("n10", "n18"),
]
TEMPLATE_2 = [
    ("n0", "n1"), ("n0", "n2"), ("n1", "n3"), ("n2", "n4"), ("n3", "n5"),
    ("n4", "n6"), ("n4", "n5"), ("n3", "n6"), ("n5", "n7"), ("n6", "n8"),
]
TEMPLATE_1 = [
    ("n0", "n1"), ("n0", "n2"), ("n2", "n3"), ("n2", "n11"),
    ("n1", "n4"), ("n1", "n5"), ("n5", "n3"), ("n4", "n6"), ("n5", "n7"),
    ("n6", "n8"), ("n7", "n9"), ("n7", "n8"), ("n6", "n9"),
    ("n8", "n12"), ("n9", "n10"),
]


def test_gadget_templates():
    e3, ext3, term3, extra3 = _gadget_edges(3, _named_fresh())
    assert e3 == TEMPLATE_3 and not extra3
    assert len(ext3) == 3 and len(term3) == 3

    e2, ext2, term2, extra2 = _gadget_edges(2, _named_fresh())
    assert e2 == TEMPLATE_2 and not extra2
    assert len(ext2) == 3 and len(term2) == 2

    e1, ext1, term1, extra1 = _gadget_edges(1, _named_fresh())
    assert e1 == TEMPLATE_1
    assert len(ext1) == 3 and len(term1) == 1 and len(extra1) == 1


def test_gadget_internal_degrees():
    # with all three externals connected, every non-leaf node is cubic
    for kind in (3, 2, 1):
        edges, ext, term, extra = _gadget_edges(kind, _named_fresh())
        deg = {}
        for u, v in edges:
            deg[u] = deg.get(u, 0) + 1
            deg[v] = deg.get(v, 0) + 1
        for v in ext:
            deg[v] = deg.get(v, 0) + 1
        leaves = set(term) | {x for p in extra for x in p}
        for v, d in deg.items():
            assert d == (1 if v in leaves else 3), (kind, v, d)


def test_instance_parse_serialize_roundtrip():
    inst = NdpInstance([("a", "b"), ("b", "c")], [("a", "c")])
    text = inst.serialize()
    back = NdpInstance.parse(text)
    assert back.edges == inst.edges and back.pairs == inst.pairs
    assert back.serialize() == text


def test_instance_validation():
    with pytest.raises(InvalidStructure):
        NdpInstance([("a", "b")], [("a", "a")]).validate()
    deg4 = [("x", "y%d" % i) for i in range(4)]
    with pytest.raises(InvalidStructure):
        NdpInstance(deg4, [("y0", "y1")]).validate()


def test_oracle_basics():
    path = NdpInstance([("s", "a"), ("a", "t")], [("s", "t")])
    assert ndp_oracle(path) is True
    conflict = NdpInstance(
        [("s1", "c"), ("s2", "c"), ("c", "m"), ("m", "t1"), ("m", "t2")],
        [("s1", "t1"), ("s2", "t2")])
    assert ndp_oracle(conflict) is False


def test_single_edge_reduces_to_three_taxa():
    inst = NdpInstance([("s1", "t1")], [("s1", "t1")])
    net, tree = ndp_to_utc(inst)
    assert tree.taxa() == {"rho", "s1", "t1"}
    assert utc_oracle(net, tree) is not None


def test_conflict_reduces_to_no():
    inst = NdpInstance(
        [("s1", "c"), ("s2", "c"), ("c", "m"), ("m", "t1"), ("m", "t2")],
        [("s1", "t1"), ("s2", "t2")])
    net, tree = ndp_to_utc(inst)
    assert utc_oracle(net, tree) is None


def test_overloaded_terminal_is_trivial_no():
    edges = [("x", "y%d" % i) for i in range(3)]
    pairs = [("x", "y%d" % i) for i in range(3)] + [("y0", "y1")]
    net, tree = ndp_to_utc(NdpInstance(edges, pairs))
    assert utc_solve(net, tree) is False


def test_busy_terminal_gadget_agreement():
    inst = NdpInstance([("a", "b"), ("a", "c"), ("b", "t1"), ("c", "t2")],
                       [("a", "t1"), ("a", "t2")])
    net, tree = ndp_to_utc(inst)
    assert ndp_oracle(inst) is True
    assert utc_solve(net, tree) is True


def test_hn_to_ruhn_shapes():
    t1 = parse_tree("((a,b),c);", mode="rooted")
    t2 = parse_tree("((a,c),b);", mode="rooted")
    u1, u2 = hn_to_ruhn(t1, t2)
    assert len(u1.taxa()) == 3 * 3 + 2 == len(u2.taxa())
    v1, v2 = hn_to_ruhn(t1, t2, caterpillar_len="2n+3")
    assert len(v1.taxa()) == 3 + 2 * (2 * 3 + 3)     # c0..c8, d0..d8
    # the second caterpillar runs the other way
    assert write_tree(u1) != write_tree(u2)


def test_hn_to_ruhn_reserved_names():
    t1 = parse_tree("((c0,b),x);", mode="rooted")
    with pytest.raises(InvalidStructure):
        hn_to_ruhn(t1, t1.copy())


def test_merged_network_displays_both():
    t1 = parse_tree("((a,b),c);", mode="rooted")
    t2 = parse_tree("((a,c),b);", mode="rooted")
    net = merged_network(t1, t2)
    assert reticulation_number(net) == 3
    assert rooted_tc(net, t1) is not None
    assert rooted_tc(net, t2) is not None


def test_backmap_recovers_optimum():
    t1 = parse_tree("((a,b),c);", mode="rooted")
    t2 = parse_tree("((a,c),b);", mode="rooted")
    u1, u2 = hn_to_ruhn(t1, t2)
    sol = ruhn_exact([u1, u2], 2, max_taxa=20)
    assert sol is not None and sol.value == 2
    r1 = _root_at_split(u1, sol.rootings[0])
    r2 = _root_at_split(u2, sol.rootings[1])
    assert not stupid_rooting(r1, r2, 4)
    back = backmap_restriction(sol.network, sol.images[0], sol.images[1])
    assert reticulation_number(back) == 1
    assert rooted_tc(back, t1) is not None
    assert rooted_tc(back, t2) is not None
