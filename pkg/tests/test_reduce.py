import random

from phylonet.core import canonical_unrooted, caterpillar, \
    reticulation_number
from phylonet.newick import parse_tree
from phylonet.randgen import rand_unrooted_tree
from phylonet.reduce import (ReductionLog, apply_cps, apply_dcc,
                             find_common_pendant_subtree,
                             find_maximal_chain, kernelize_ruhn,
                             kernelize_utc)


def test_common_pendant_subtree_found():
    t1 = parse_tree("(((a,b),c),(d,e),f);", mode="unrooted")
    t2 = parse_tree("(((a,b),d),(c,e),f);", mode="unrooted")
    p = find_common_pendant_subtree([t1, t2])
    assert p is not None and set(p.taxa) == {"a", "b"}
    out, step = apply_cps([t1, t2], p)
    assert step.kind == "cps"
    assert len(out[0].taxa()) == 5


def test_fig1_is_cps_irreducible(fig1):
    assert find_common_pendant_subtree(list(fig1)) is None


def test_chain_truncation():
    t1 = caterpillar(["a"] + ["m%d" % i for i in range(1, 9)] + ["b"])
    t2 = caterpillar(["m%d" % i for i in range(1, 9)] + ["b", "a"])
    chain = find_maximal_chain([t1, t2])
    assert chain is not None and len(chain) >= 5
    out, step = apply_dcc([t1, t2], 5)
    assert step.kind == "cc" and step.d == 5
    assert len(out[0].taxa()) == len(t1.taxa()) - len(step.removed)


def test_log_roundtrip_and_replay():
    t1 = parse_tree("(((a,b),c),(d,e),f);", mode="unrooted")
    t2 = parse_tree("(((a,b),d),(c,e),f);", mode="unrooted")
    kern = kernelize_ruhn([t1, t2], 1)
    text = kern.log.serialize()
    back = ReductionLog.parse(text)
    assert back.serialize() == text
    replayed = back.replay([t1, t2])
    if kern.decided is None:
        # placeholder names are freshly drawn on each run; compare
        # modulo a consistent renaming
        def neutral(t):
            g = t.copy()
            for i, x in enumerate(sorted(v for v in g.taxa()
                                         if v.startswith("_k"))):
                g.labels[g.leaf_of(x)] = "_p%d" % i
            return canonical_unrooted(g)

        assert {neutral(t) for t in replayed} == \
            {neutral(t) for t in kern.trees}


def test_kernelize_utc_bounds(rng):
    from phylonet.randgen import rand_unrooted_network
    for _ in range(40):
        taxa = ["t%d" % i for i in range(1, rng.randint(4, 7))]
        net = rand_unrooted_network(rng, taxa, rng.randint(0, 3))
        tree = rand_unrooted_tree(rng, taxa)
        kern = kernelize_utc(net, tree)
        if kern.decided is not None:
            continue
        k = reticulation_number(kern.network)
        assert len(kern.network.taxa()) <= max(6 * k, 4)
        assert len(kern.network.edges) <= max(15 * k, 5)


def test_kernelize_ruhn_k0_is_identity_decision():
    t1 = parse_tree("(a,b,(c,d));", mode="unrooted")
    t2 = parse_tree("(a,c,(b,d));", mode="unrooted")
    kern = kernelize_ruhn([t1, t2], 0)
    assert kern.decided is False
    same = kernelize_ruhn([t1, t1.copy()], 0)
    assert same.decided is True


def test_kernelize_ruhn_taxa_bound():
    t1 = caterpillar(["x%02d" % i for i in range(25)])
    t2 = rand_unrooted_tree(random.Random(5), ["x%02d" % i
                                               for i in range(25)])
    kern = kernelize_ruhn([t1, t2], 1)
    if kern.decided is None:
        assert len(kern.trees[0].taxa()) < 20
