import pytest

from phylonet.core import (GuardExceeded, caterpillar,
                           reticulation_number)
from phylonet.newick import parse_tree
from phylonet.ruhn import (RuhnSolution, _edge_split, _rooting_candidates,
                           _root_at_split, ruhn_exact)
from phylonet.utc import rooted_tc


def test_rooting_candidates_cover_all_edges():
    t = parse_tree("((a,b),(c,d),e);", mode="unrooted")
    cands = _rooting_candidates(t)
    assert len(cands) == len(t.edges)
    assert all(isinstance(s, frozenset) for s in cands)
    # canonical side: never contains the smallest taxon
    assert all("a" not in s for s in cands)


def test_root_at_split_roundtrip():
    t = parse_tree("((a,b),(c,d),e);", mode="unrooted")
    for split in _rooting_candidates(t):
        rt = _root_at_split(t, split)
        assert rt.taxa() == t.taxa()


def test_identical_trees_value_zero():
    t = caterpillar(["a", "b", "c", "d"])
    sol = ruhn_exact([t, t.copy()], 0)
    assert sol is not None and sol.value == 0


def test_fig1_value_two(fig1):
    t1, t2 = fig1
    sol = ruhn_exact([t1, t2], 3)
    assert sol is not None and sol.value == 2
    assert reticulation_number(sol.network) == 2
    for i, t in enumerate((t1, t2)):
        rt = _root_at_split(t, sol.rootings[i])
        assert rooted_tc(sol.network, rt) is not None
    text = sol.serialize()
    assert text.startswith("value 2\n")
    assert "root t0 " in text and "network " in text


def test_chain_instance_lifts():
    taxa = ["a"] + ["m%d" % i for i in range(1, 9)] + ["b"]
    t1 = caterpillar(taxa)
    t2 = caterpillar(["m%d" % i for i in range(1, 9)] + ["b", "a"])
    sol = ruhn_exact([t1, t2], 1)
    assert sol is not None and sol.value == 1
    # certificate is on the original ten taxa, not the kernel
    assert sol.network.taxa() == set(taxa)
    for i, t in enumerate((t1, t2)):
        rt = _root_at_split(t, sol.rootings[i])
        assert rooted_tc(sol.network, rt) is not None


def test_no_solution_below_optimum(fig1):
    t1, t2 = fig1
    assert ruhn_exact([t1, t2], 1) is None


def test_guard_on_kmax():
    t = caterpillar(["a", "b", "c", "d"])
    with pytest.raises(GuardExceeded):
        ruhn_exact([t, t.copy()], 4)
