import pytest

from phylonet.core import GuardExceeded, caterpillar, root_at_edge
from phylonet.newick import parse_network, parse_tree
from phylonet.randgen import displayed_tree, rand_unrooted_network, \
    rand_unrooted_tree
from phylonet.utc import (rooted_tc, utc_find_image, utc_oracle, utc_solve,
                          verify_image)


def test_rooted_tc_positive():
    n = parse_network("((((a,(b)#H1),c),(#H1,d)),e);", mode="rooted")
    t = parse_tree("((((a,b),c),d),e);", mode="rooted")
    img = rooted_tc(n, t)
    assert img is not None and verify_image(n, t, img)


def test_rooted_tc_negative():
    n = parse_network("((((a,(b)#H1),c),(#H1,d)),e);", mode="rooted")
    t = parse_tree("((((a,d),c),b),e);", mode="rooted")
    assert rooted_tc(n, t) is None


def test_fig6_is_no(fig6):
    n, t = fig6
    assert utc_solve(n, t) is False
    assert utc_solve(n, t, use_kernel=False) is False
    assert utc_oracle(n, t) is None


def test_display_of_own_switching(rng):
    hits = 0
    for _ in range(60):
        taxa = ["t%d" % i for i in range(1, rng.randint(4, 7))]
        net = rand_unrooted_network(rng, taxa, rng.randint(1, 3))
        tree = displayed_tree(rng, net)
        if tree is None:
            continue
        assert utc_solve(net, tree) is True
        img = utc_find_image(net, tree)
        assert img is not None and verify_image(net, tree, img)
        hits += 1
    assert hits > 20


def test_solver_matches_oracle(rng):
    for _ in range(80):
        taxa = ["t%d" % i for i in range(1, rng.randint(4, 6))]
        net = rand_unrooted_network(rng, taxa, rng.randint(0, 2))
        if len(net.edges) > 24:
            continue
        tree = rand_unrooted_tree(rng, taxa)
        want = utc_oracle(net, tree) is not None
        assert utc_solve(net, tree) is want
        assert utc_solve(net, tree, use_kernel=False) is want


def test_oracle_guard():
    taxa = ["t%02d" % i for i in range(1, 16)]   # 27 edges > 24
    t = caterpillar(taxa)
    with pytest.raises(GuardExceeded):
        utc_oracle(t, t.copy())
