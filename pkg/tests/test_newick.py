import random

import pytest
from hypothesis import given, settings, strategies as st

from phylonet.core import canonical_rooted, canonical_unrooted
from phylonet.newick import (NewickDocument, ParseError, export_dot,
                             parse_network, parse_tree, write_network,
                             write_tree)
from phylonet.randgen import (rand_rooted_tree, rand_unrooted_network,
                              rand_unrooted_tree)


def taxa_sets(min_size=3, max_size=8):
    return st.sets(st.sampled_from("abcdefgh"), min_size=min_size,
                   max_size=max_size)


@given(taxa_sets(), st.integers(0, 2 ** 30))
@settings(max_examples=50, deadline=None)
def test_unrooted_tree_roundtrip(taxa, seed):
    t = rand_unrooted_tree(random.Random(seed), taxa)
    back = parse_tree(write_tree(t), mode="unrooted")
    assert canonical_unrooted(back) == canonical_unrooted(t)


@given(taxa_sets(min_size=2), st.integers(0, 2 ** 30))
@settings(max_examples=50, deadline=None)
def test_rooted_tree_roundtrip(taxa, seed):
    t = rand_rooted_tree(random.Random(seed), taxa)
    back = parse_tree(write_tree(t), mode="rooted")
    assert canonical_rooted(back) == canonical_rooted(t)


def _as_nx(g):
    import networkx as nx
    h = nx.MultiGraph()
    for v in g.inc:
        h.add_node(v, label=g.labels.get(v, ""))
    for u, v in g.edges.values():
        h.add_edge(u, v)
    return h


@given(taxa_sets(min_size=4), st.integers(0, 3), st.integers(0, 2 ** 30))
@settings(max_examples=30, deadline=None)
def test_unrooted_network_roundtrip(taxa, r, seed):
    import networkx as nx
    n = rand_unrooted_network(random.Random(seed), taxa, r)
    back = parse_network(write_network(n), mode="unrooted")
    assert back.taxa() == n.taxa()
    assert nx.is_isomorphic(_as_nx(n), _as_nx(back),
                            node_match=lambda a, b:
                            a["label"] == b["label"])
    # writing the reparsed graph is stable
    assert write_network(back) == \
        write_network(parse_network(write_network(back), mode="unrooted"))


def test_enewick_roundtrip():
    text = "((((a,(b)#H1),c),(#H1,d)),e);"
    n = parse_network(text, mode="rooted")
    assert write_network(parse_network(write_network(n), mode="rooted")) \
        == write_network(n)


def test_write_tree_is_deterministic():
    t = parse_tree("((b,a),(d,c));", mode="rooted")
    s = parse_tree("((c,d),(a,b));", mode="rooted")
    assert write_tree(t) == write_tree(s)


def test_parse_errors():
    with pytest.raises(ParseError):
        parse_tree("((a,b);", mode="rooted")
    with pytest.raises(ParseError):
        parse_tree("(a,a,b);", mode="unrooted")
    with pytest.raises(ParseError):
        parse_network("no-header\nv0 v1\n", mode="unrooted")


def test_document_parse_and_write():
    doc = NewickDocument.parse("(a,b,(c,d));\n(a,c,(b,d));",
                               mode="unrooted")
    assert len(doc.entries) == 2
    assert doc.write().count(";") == 2


def test_export_dot_mentions_labels():
    t = parse_tree("(a,b,(c,d));", mode="unrooted")
    dot = export_dot(t)
    assert dot.startswith("graph")
    for x in "abcd":
        assert '"%s"' % x in dot
