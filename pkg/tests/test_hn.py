import pytest

from phylonet.core import (GuardExceeded, canonical_rooted,
                           reticulation_number, rooted_caterpillar)
from phylonet.hn import (attach_taxa, enumerate_generators, hn_enum_oracle,
                         hn_exact, maaf_exact, uhn_exhaustive_oracle)
from phylonet.newick import parse_tree
from phylonet.randgen import rand_rooted_tree, rand_unrooted_tree
from phylonet.utc import rooted_tc


def test_generator_counts_and_side_bounds():
    counts = {r: len(enumerate_generators(r)) for r in range(4)}
    assert counts[0] == 1 and counts[1] == 1
    assert counts == {0: 1, 1: 1, 2: 7, 3: 111}
    for r in range(1, 4):
        for gen in enumerate_generators(r):
            assert len(gen.edge_sides()) <= 4 * r - 1
            assert len(gen.node_sides()) <= r


def test_generator_guard():
    with pytest.raises(GuardExceeded):
        enumerate_generators(4)


def test_attach_taxa_streams_valid_networks():
    gen = enumerate_generators(1)[0]
    seen = set()
    for net in attach_taxa(gen, {"a", "b", "c"}):
        assert reticulation_number(net) == 1
        assert net.taxa() == {"a", "b", "c"}
        seen.add(canonical_rooted(net))
    assert seen


def test_hn_identical_trees():
    t = rooted_caterpillar(["a", "b", "c", "d"])
    sol = hn_exact([t, t.copy()], 0)
    assert sol is not None and sol.value == 0


def test_hn_cherry_swap_pair():
    t1 = parse_tree("(((a,b),c),d);", mode="rooted")
    t2 = parse_tree("(((a,b),d),c);", mode="rooted")
    sol = hn_exact([t1, t2], 2)
    assert sol is not None and sol.value == 1
    for t in (t1, t2):
        assert rooted_tc(sol.network, t) is not None


def test_hn_fig1_rootings(fig1_rooted):
    r1, r2 = fig1_rooted
    sol = hn_exact([r1, r2], 3)
    assert sol is not None and sol.value == 3
    assert reticulation_number(sol.network) == 3


def test_hn_matches_enum_oracle(rng):
    for _ in range(25):
        taxa = ["a", "b", "c", "d"][:rng.randint(3, 4)]
        t1 = rand_rooted_tree(rng, taxa)
        t2 = rand_rooted_tree(rng, taxa)
        want = hn_enum_oracle([t1, t2], 2)
        sol = hn_exact([t1, t2], 2)
        got = None if sol is None else sol.value
        assert got == want


def test_maaf_cap_returns_none():
    t1 = parse_tree("((((a,b),c),d),e);", mode="rooted")
    t2 = parse_tree("((((e,d),c),b),a);", mode="rooted")
    full = maaf_exact(t1, t2)
    assert full is not None
    m = full[0]
    if m > 1:
        assert maaf_exact(t1, t2, max_m=m - 1) is None


def test_uhn_exhaustive_oracle_matches_solver(rng):
    from phylonet.uhn import uhn_solve
    done = 0
    while done < 10:
        taxa = ["t%d" % i for i in range(1, rng.randint(5, 6))]
        t1 = rand_unrooted_tree(rng, taxa)
        t2 = rand_unrooted_tree(rng, taxa)
        value = uhn_solve(t1, t2)[0]
        if value > 2:
            continue
        assert uhn_exhaustive_oracle([t1, t2], value) == value
        done += 1


def test_hn_guards():
    t = rooted_caterpillar(["t%d" % i for i in range(1, 8)])
    with pytest.raises(GuardExceeded):
        hn_exact([t, t.copy()], 1)
    t4 = rooted_caterpillar(["a", "b", "c", "d"])
    with pytest.raises(GuardExceeded):
        hn_exact([t4, t4.copy()], 4)
