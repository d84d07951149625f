import pytest

from phylonet.core import GuardExceeded, caterpillar, reticulation_number
from phylonet.randgen import rand_unrooted_tree
from phylonet.uhn import (is_agreement_forest, maf_exact,
                          forest_from_network, network_from_forest,
                          tbr_bfs_oracle, uhn_solve)
from phylonet.utc import utc_oracle, verify_image


def test_agreement_forest_checker(fig1):
    t1, t2 = fig1
    whole = [frozenset(t1.taxa())]
    assert not is_agreement_forest(t1, t2, whole)
    singletons = [frozenset({x}) for x in sorted(t1.taxa())]
    assert is_agreement_forest(t1, t2, singletons)


def test_fig1_values(fig1):
    t1, t2 = fig1
    forest = maf_exact(t1, t2)
    assert len(forest.blocks) == 2
    assert tbr_bfs_oracle(t1, t2) == 1
    value, net, i1, i2 = uhn_solve(t1, t2)
    assert value == 1
    assert reticulation_number(net) == 1
    assert verify_image(net, t1, i1) and verify_image(net, t2, i2)


def test_identical_trees_distance_zero():
    t = caterpillar(["a", "b", "c", "d", "e"])
    assert len(maf_exact(t, t.copy()).blocks) == 1
    assert tbr_bfs_oracle(t, t.copy()) == 0
    assert uhn_solve(t, t.copy())[0] == 0


def test_maf_equals_tbr_plus_one(rng):
    for _ in range(40):
        taxa = ["t%d" % i for i in range(1, rng.randint(4, 7))]
        t1 = rand_unrooted_tree(rng, taxa)
        t2 = rand_unrooted_tree(rng, taxa)
        assert len(maf_exact(t1, t2).blocks) - 1 == tbr_bfs_oracle(t1, t2)


def test_network_from_forest_roundtrip(rng):
    for _ in range(25):
        taxa = ["t%d" % i for i in range(1, rng.randint(4, 7))]
        t1 = rand_unrooted_tree(rng, taxa)
        t2 = rand_unrooted_tree(rng, taxa)
        forest = maf_exact(t1, t2)
        net, i1, i2 = network_from_forest(t1, t2, forest)
        assert reticulation_number(net) == len(forest.blocks) - 1
        assert verify_image(net, t1, i1) and verify_image(net, t2, i2)
        back = forest_from_network(net, i1, i2)
        assert is_agreement_forest(t1, t2, back.blocks)
        limit = max(24, len(net.edges))
        assert utc_oracle(net, t1, max_edges=limit) is not None
        assert utc_oracle(net, t2, max_edges=limit) is not None


def test_guards():
    taxa = ["t%02d" % i for i in range(1, 12)]
    t = caterpillar(taxa)
    with pytest.raises(GuardExceeded):
        maf_exact(t, t.copy())
    with pytest.raises(GuardExceeded):
        tbr_bfs_oracle(t, t.copy())
