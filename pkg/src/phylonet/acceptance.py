"""The acceptance suite: ten numbered checks shared by the test suite
and the ``selftest`` CLI subcommand.

Each criterion function raises AssertionError (with a readable message)
on failure and returns a short detail string on success.  Everything is
seeded, so two runs behave identically.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass

from .core import (GuardExceeded, UGraph, caterpillar, reticulation_number,
                   root_at_edge, unroot)
from .gadgets import (backmap_restriction, ndp_oracle, ndp_to_utc,
                      stupid_rooting, hn_to_ruhn)
from .hn import hn_exact, maaf_exact, uhn_exhaustive_oracle
from .newick import parse_tree
from .randgen import (displayed_tree, rand_ndp, rand_rooted_tree,
                      rand_unrooted_network, rand_unrooted_tree)
from .reduce import apply_dcc, kernelize_ruhn, kernelize_utc
from .ruhn import _root_at_split, ruhn_exact
from .uhn import maf_exact, tbr_bfs_oracle, uhn_solve
from .utc import rooted_tc, utc_oracle, utc_solve, verify_image


# ---------------------------------------------------------------------------
# shared worked-example fixtures


def fig1_trees():
    """The two six-taxon caterpillars of the worked introduction
    example."""
    t1 = caterpillar(["a", "b", "c", "d", "e", "f"])
    t2 = caterpillar(["c", "b", "a", "f", "e", "d"])
    return t1, t2


def _pendant_edge(t, x):
    return t.inc[t.leaf_of(x)][0]


def fig1_rootings():
    """The discussed rootings: first tree at the edge entering a,
    second at the edge entering e."""
    t1, t2 = fig1_trees()
    return (root_at_edge(t1, _pendant_edge(t1, "a")),
            root_at_edge(t2, _pendant_edge(t2, "e")))


def fig6_instance():
    """Six-cycle network with one pendant leaf per cycle node, against
    the caterpillar (a,b,c,f,e,d); a NO instance that chain reduction
    to length 2 would wrongly turn into YES."""
    n = UGraph()
    ring = [n.new_node() for _ in range(6)]
    for i in range(6):
        n.add_edge(ring[i], ring[(i + 1) % 6])
    for i, x in enumerate("abcdef"):
        n.add_edge(ring[i], n.new_node(x))
    t = caterpillar(["a", "b", "c", "f", "e", "d"])
    return n, t


# ---------------------------------------------------------------------------
# criteria


def criterion_1():
    """Worked example triple: unrooted value 1, root-uncertain value 2,
    rooted value 3, certificates re-verified."""
    t1, t2 = fig1_trees()
    val, net, i1, i2 = uhn_solve(t1, t2)
    assert val == 1, "unrooted value %d != 1" % val
    assert verify_image(net, t1, i1) and verify_image(net, t2, i2), \
        "unrooted certificate failed re-verification"

    sol = ruhn_exact([t1, t2], 3)
    assert sol is not None and sol.value == 2, "root-uncertain value != 2"
    for i, t in enumerate((t1, t2)):
        rt = _root_at_split(t, sol.rootings[i])
        assert rooted_tc(sol.network, rt) is not None, \
            "root-uncertain certificate failed re-verification"

    r1, r2 = fig1_rootings()
    hsol = hn_exact([r1, r2], 3)
    assert hsol is not None and hsol.value == 3, "rooted value != 3"
    for rt in (r1, r2):
        assert rooted_tc(hsol.network, rt) is not None, \
            "rooted certificate failed re-verification"
    return "values 1 / 2 / 3 with verified certificates"


def criterion_2():
    """Chain-length regression: the six-cycle instance is NO, reducing
    its chains to length 2 flips it to YES, the kernelization (which
    keeps length 3) preserves NO."""
    n, t = fig6_instance()
    assert utc_solve(n, t) is False, "six-cycle instance not NO"

    cur = [n, t]
    while True:
        red = apply_dcc(cur, 2)
        if red is None:
            break
        cur = red[0]
    assert len(cur[1].taxa()) < 6, "no chain was cut"
    assert utc_solve(cur[0], cur[1]) is True, \
        "length-2 chain cuts should flip the answer to YES"

    kern = kernelize_utc(n, t)
    if kern.decided is not None:
        assert kern.decided is False, "kernelization changed the answer"
    else:
        assert utc_solve(kern.network, kern.tree) is False, \
            "kernelization changed the answer"
    return "NO preserved by the kernel, flipped by 2-chain cuts"


N_UTC_INSTANCES = 500


def _rand_utc_instance(rng):
    taxa = ["t%d" % i for i in range(1, rng.randint(4, 7))]
    r = rng.randint(0, 3)
    for _ in range(40):
        net = rand_unrooted_network(rng, taxa, r)
        if len(net.edges) <= 24:
            break
    else:
        net = rand_unrooted_network(rng, taxa, 0)
    if rng.random() < 0.6:
        tree = displayed_tree(rng, net)
        if tree is not None:
            return net, tree
    return net, rand_unrooted_tree(rng, taxa)


def criterion_3(collect_kernels=None):
    """Solver equals oracle on random unrooted containment instances."""
    rng = random.Random(303)
    agree = 0
    for i in range(N_UTC_INSTANCES):
        net, tree = _rand_utc_instance(rng)
        want = utc_oracle(net, tree) is not None
        a = utc_solve(net, tree, use_kernel=True)
        b = utc_solve(net, tree, use_kernel=False)
        assert a == want and b == want, \
            "disagreement on instance %d (oracle=%s kernel=%s plain=%s)" \
            % (i, want, a, b)
        agree += 1
        if collect_kernels is not None:
            collect_kernels.append((net, tree))
    return "%d/%d instances agree" % (agree, N_UTC_INSTANCES)


def criterion_4():
    """Kernel size bounds hold across the random suite."""
    rng = random.Random(404)
    checked = 0
    for i in range(200):
        net, tree = _rand_utc_instance(rng)
        kern = kernelize_utc(net, tree)
        if kern.decided is not None:
            continue
        k = reticulation_number(kern.network)
        taxa = len(kern.network.taxa())
        edges = len(kern.network.edges)
        assert taxa <= max(6 * k, 4), \
            "kernel taxa %d > %d (k=%d)" % (taxa, max(6 * k, 4), k)
        assert edges <= max(15 * k, 5), \
            "kernel edges %d > %d (k=%d)" % (edges, max(15 * k, 5), k)
        checked += 1
    rchecked = 0
    for i in range(100):
        taxa = ["t%d" % j for j in range(1, rng.randint(4, 9))]
        trees = [rand_unrooted_tree(rng, taxa)
                 for _ in range(rng.randint(2, 3))]
        for k in range(1, 3):
            kern = kernelize_ruhn(trees, k)
            if kern.decided is not None:
                continue
            nt = len(kern.trees[0].taxa())
            assert nt < 20 * k * k, \
                "accept-path kernel has %d taxa >= 20k^2 (k=%d)" % (nt, k)
            rchecked += 1
    return "%d tree-containment and %d multi-tree kernels within bounds" \
        % (checked, rchecked)


N_MAF_PAIRS = 200


def criterion_5():
    """Agreement-forest cross-checks: forest blocks minus one equals
    the TBR distance, the built network is optimal and verified, and
    the exhaustive search returns the same value on small instances."""
    rng = random.Random(505)
    checked = cross = 0
    for i in range(N_MAF_PAIRS):
        nt = rng.randint(4, 7)
        taxa = ["t%d" % j for j in range(1, nt + 1)]
        t1 = rand_unrooted_tree(rng, taxa)
        t2 = rand_unrooted_tree(rng, taxa)
        forest = maf_exact(t1, t2)
        value = len(forest.blocks)
        d = tbr_bfs_oracle(t1, t2)
        assert value - 1 == d, \
            "pair %d: maf %d - 1 != tbr %d" % (i, value, d)
        net, i1, i2 = network_from_forest_checked(t1, t2, forest)
        assert reticulation_number(net) == value - 1, \
            "pair %d: network has wrong reticulation number" % i
        checked += 1
        if nt <= 6 and value - 1 <= 2:
            same = uhn_exhaustive_oracle([t1, t2], value - 1)
            assert same == value - 1, \
                "pair %d: exhaustive oracle %s != %d" % (i, same, value - 1)
            cross += 1
    return "%d pairs checked, %d cross-checked exhaustively" \
        % (checked, cross)


def network_from_forest_checked(t1, t2, forest):
    from .uhn import network_from_forest
    net, i1, i2 = network_from_forest(t1, t2, forest)
    limit = max(24, len(net.edges))
    for t, img in ((t1, i1), (t2, i2)):
        assert verify_image(net, t, img), "forest network image invalid"
        assert utc_oracle(net, t, max_edges=limit) is not None, \
            "oracle does not confirm display"
    return net, i1, i2


N_CHAIN_PAIRS = 100


def criterion_6():
    """Value chain: unrooted <= root-uncertain <= rooted, with both
    inequalities simultaneously strict on the worked example."""
    rng = random.Random(606)
    checked = skipped = 0
    while checked < N_CHAIN_PAIRS:
        nt = rng.randint(3, 5)
        taxa = ["t%d" % j for j in range(1, nt + 1)]
        r1 = rand_rooted_tree(rng, taxa)
        r2 = rand_rooted_tree(rng, taxa)
        hs = hn_exact([r1, r2], 3)
        if hs is None:
            skipped += 1
            continue
        hr = hs.value
        u1, u2 = unroot(r1), unroot(r2)
        hu = uhn_solve(u1, u2)[0]
        rs = ruhn_exact([u1, u2], hr)
        assert rs is not None, "root-uncertain value above the rooted one"
        hru = rs.value
        assert hu <= hru <= hr, \
            "chain broken: %d <= %d <= %d" % (hu, hru, hr)
        checked += 1
    t1, t2 = fig1_trees()
    hu = uhn_solve(t1, t2)[0]
    hru = ruhn_exact([t1, t2], 3).value
    f1, f2 = fig1_rootings()
    hr = hn_exact([f1, f2], 3).value
    assert hu < hru < hr, \
        "worked example not strict: %d / %d / %d" % (hu, hru, hr)
    return "%d pairs in chain (%d skipped beyond guards), strict on the " \
        "worked example" % (checked, skipped)


N_LEMMA4_RANDOM = 20


def _lemma4_pairs():
    """(T1, T2, h^r) for every rooted pair on three taxa, then random
    four-taxon pairs."""
    shapes3 = [parse_tree(s, mode="rooted") for s in
               ["((a,b),c);", "((a,c),b);", "((b,c),a);"]]
    for r1 in shapes3:
        for r2 in shapes3:
            yield r1.copy(), r2.copy()
    rng = random.Random(707)
    taxa = ["a", "b", "c", "d"]
    for _ in range(N_LEMMA4_RANDOM):
        yield rand_rooted_tree(rng, taxa), rand_rooted_tree(rng, taxa)


def criterion_7(collect=None):
    """Transformed instances gain exactly one reticulation."""
    count = 0
    for t1, t2 in _lemma4_pairs():
        hr = hn_exact([t1, t2], 3).value
        u1, u2 = hn_to_ruhn(t1, t2)
        sol = ruhn_exact([u1, u2], hr + 1, max_taxa=20)
        assert sol is not None and sol.value == hr + 1, \
            "transformed value != %d + 1" % hr
        count += 1
        if collect is not None:
            collect.append((t1, t2, hr, u1, u2, sol))
    return "%d pairs with exact +1 equality" % count


def criterion_8():
    """Back-mapping the optimal transformed solution recovers an
    optimal rooted network; the reticulation count strictly drops."""
    instances = []
    criterion_7(collect=instances)
    checked = 0
    for t1, t2, hr, u1, u2, sol in instances:
        clen = len([x for x in u1.taxa() if x.startswith("c")
                    and x[1:].isdigit()])
        rr1 = _root_at_split(u1, sol.rootings[0])
        rr2 = _root_at_split(u2, sol.rootings[1])
        assert not stupid_rooting(rr1, rr2, clen), \
            "optimal solution used a stupid rooting"
        back = backmap_restriction(sol.network, sol.images[0],
                                   sol.images[1])
        p, q = reticulation_number(back), reticulation_number(sol.network)
        assert p < q, "no strict drop: p=%d q=%d" % (p, q)
        assert p == hr, "backmap r=%d != %d" % (p, hr)
        assert rooted_tc(back, t1) is not None \
            and rooted_tc(back, t2) is not None, \
            "backmap result does not display the inputs"
        checked += 1
    return "%d back-maps optimal with p < q" % checked


N_NDP_INSTANCES = 50


def criterion_9():
    """Disjoint-paths oracle agrees with the containment oracle on the
    generated instances."""
    rng = random.Random(909)
    checked = 0
    while checked < N_NDP_INSTANCES:
        inst = rand_ndp(rng, allow_busy_terminals=(checked % 5 == 0))
        net, tree = ndp_to_utc(inst)
        if len(net.edges) > 26:
            continue        # out of oracle reach; resample
        want = ndp_oracle(inst)
        got = utc_oracle(net, tree, max_edges=26) is not None
        assert want == got, \
            "disagreement on:\n%s" % inst.serialize()
        checked += 1
    return "%d instances agree" % checked


def criterion_10():
    """CLI output is byte-identical under different --threads values."""
    import io
    import os
    import tempfile
    from contextlib import redirect_stdout
    from . import cli
    from .newick import write_network, write_tree

    t1, t2 = fig1_trees()
    n6, t6 = fig6_instance()
    with tempfile.TemporaryDirectory() as d:
        trees = os.path.join(d, "fig1.nwk")
        with open(trees, "w") as f:
            f.write(write_tree(t1) + "\n" + write_tree(t2) + "\n")
        netf = os.path.join(d, "fig6N.txt")
        with open(netf, "w") as f:
            f.write(write_network(n6))
        treef = os.path.join(d, "fig6T.nwk")
        with open(treef, "w") as f:
            f.write(write_tree(t6) + "\n")
        commands = [
            ["utc", "--network", netf, "--tree", treef],
            ["uhn", "--trees", trees],
            ["ruhn", "--trees", trees, "--kmax", "3"],
            ["kernelize", "--network", netf, "--tree", treef],
            ["oracle", "--network", netf, "--tree", treef],
            ["gen-ndp", "--seed", "5"],
            ["export-dot", "--network", netf],
        ]
        for cmd in commands:
            outs = []
            for threads in ("1", "4"):
                buf = io.StringIO()
                with redirect_stdout(buf):
                    code = cli.run(cmd + ["--threads", threads])
                outs.append((code, buf.getvalue()))
            assert outs[0] == outs[1], \
                "output differs across --threads for %r" % cmd[0]
    return "%d commands byte-identical across --threads" % len(commands)


CRITERIA = [
    (1, "worked example values 1/2/3", criterion_1),
    (2, "chain-length-2 regression", criterion_2),
    (3, "solver vs oracle on random instances", criterion_3),
    (4, "kernel size bounds", criterion_4),
    (5, "agreement forest cross-checks", criterion_5),
    (6, "value inequality chain", criterion_6),
    (7, "transformation adds exactly one", criterion_7),
    (8, "back-map optimality", criterion_8),
    (9, "disjoint-paths gadget soundness", criterion_9),
    (10, "CLI determinism", criterion_10),
]


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float


def run_all(numbers=None):
    results = []
    for num, title, fn in CRITERIA:
        if numbers is not None and num not in numbers:
            continue
        t0 = time.time()
        try:
            detail = fn()
            ok = True
        except AssertionError as exc:
            detail = str(exc)
            ok = False
        results.append(CriterionResult(num, title, ok, detail,
                                       time.time() - t0))
    return results
