import random

import pytest
from hypothesis import given, settings, strategies as st

from phylonet.core import (InvalidStructure, canonical_rooted,
                           canonical_unrooted, caterpillar, is_connected,
                           labelled_isomorphic, restrict_to_taxa,
                           reticulation_number, root_at_edge,
                           rooted_caterpillar, tidy_unrooted, unroot,
                           validate_rooted, validate_unrooted)
from phylonet.randgen import rand_rooted_tree, rand_unrooted_tree


def taxa_sets(min_size=3, max_size=8):
    return st.sets(st.sampled_from("abcdefgh"), min_size=min_size,
                   max_size=max_size)


def test_caterpillar_shape():
    t = caterpillar(["a", "b", "c", "d"])
    validate_unrooted(t, as_tree=True)
    assert t.taxa() == {"a", "b", "c", "d"}
    assert reticulation_number(t) == 0


def test_rooted_caterpillar_shape():
    t = rooted_caterpillar(["a", "b", "c", "d"])
    validate_rooted(t, as_tree=True)
    assert t.taxa() == {"a", "b", "c", "d"}


@given(taxa_sets(), st.integers(0, 2 ** 30))
@settings(max_examples=40, deadline=None)
def test_root_unroot_roundtrip(taxa, seed):
    rng = random.Random(seed)
    t = rand_unrooted_tree(rng, taxa)
    eid = rng.choice(sorted(t.edges))
    rt = root_at_edge(t, eid)
    validate_rooted(rt, as_tree=True)
    back = unroot(rt)
    assert canonical_unrooted(back) == canonical_unrooted(t)


@given(taxa_sets(min_size=2), st.integers(0, 2 ** 30))
@settings(max_examples=40, deadline=None)
def test_canonical_rooted_is_label_invariant(taxa, seed):
    rng = random.Random(seed)
    t = rand_rooted_tree(rng, taxa)
    # a fresh copy built through different node ids canonicalizes the same
    assert canonical_rooted(t.copy()) == canonical_rooted(t)


def test_canonical_unrooted_separates_shapes():
    a = caterpillar(["a", "b", "c", "d", "e", "f"])
    b = caterpillar(["a", "c", "b", "d", "e", "f"])
    assert canonical_unrooted(a) != canonical_unrooted(b)
    assert labelled_isomorphic(a, a.copy())
    assert not labelled_isomorphic(a, b)


def test_restrict_to_taxa():
    t = caterpillar(["a", "b", "c", "d", "e"])
    s = restrict_to_taxa(t, {"a", "c", "e"})
    validate_unrooted(s, as_tree=True)
    assert s.taxa() == {"a", "c", "e"}


def test_tidy_unrooted_suppresses_degree_two():
    t = caterpillar(["a", "b", "c", "d"])
    eid = sorted(t.edges)[0]
    t.subdivide(eid)
    s = tidy_unrooted(t)
    validate_unrooted(s, as_tree=True)
    assert is_connected(s)


def test_validate_rejects_parallel_edges():
    t = caterpillar(["a", "b", "c", "d"])
    inner = [v for v in t.inc if v not in t.labels]
    t.add_edge(inner[0], inner[1])
    t.add_edge(inner[0], inner[1])
    with pytest.raises(InvalidStructure):
        validate_unrooted(t)
