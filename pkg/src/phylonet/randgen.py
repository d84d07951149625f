"""Seeded random instance generators for tests and experiments.

All generators take a :class:`random.Random` so runs are reproducible
from a single seed.
"""

from __future__ import annotations

import random

from .core import (RGraph, UGraph, caterpillar, is_connected,
                   reticulation_number, tidy_unrooted, validate_rooted,
                   validate_unrooted)
from .gadgets import NdpInstance


def rand_unrooted_tree(rng, taxa):
    """Uniform-ish random unrooted binary tree: start from a triple and
    attach the remaining taxa to random edges."""
    taxa = sorted(taxa)
    if len(taxa) < 3:
        raise ValueError("need at least 3 taxa")
    t = UGraph()
    hub = t.new_node()
    for x in taxa[:3]:
        t.add_edge(hub, t.new_node(x))
    for x in taxa[3:]:
        eid = rng.choice(sorted(t.edges))
        w = t.subdivide(eid)
        t.add_edge(w, t.new_node(x))
    return validate_unrooted(t, as_tree=True)


def rand_rooted_tree(rng, taxa):
    """Random rooted binary tree by random sequential attachment."""
    taxa = sorted(taxa)
    if len(taxa) < 2:
        raise ValueError("need at least 2 taxa")
    t = RGraph()
    t.root = t.new_node()
    for x in taxa[:2]:
        t.add_edge(t.root, t.new_node(x))
    for x in taxa[2:]:
        eid = rng.choice(sorted(t.edges))
        u, v = t.edges[eid]
        t.remove_edge(eid)
        w = t.new_node()
        t.add_edge(u, w)
        t.add_edge(w, v)
        t.add_edge(w, t.new_node(x))
    return validate_rooted(t, as_tree=True)


def rand_unrooted_network(rng, taxa, r, tries=200):
    """Random unrooted network: a random tree plus ``r`` extra edges,
    each connecting two subdivided distinct edges."""
    for _ in range(tries):
        g = rand_unrooted_tree(rng, taxa)
        ok = True
        for _ in range(r):
            e1, e2 = rng.sample(sorted(g.edges), 2)
            w1, w2 = g.subdivide(e1), g.subdivide(e2)
            g.add_edge(w1, w2)
        try:
            return validate_unrooted(g)
        except Exception:
            ok = False
        if not ok:
            continue
    raise RuntimeError("could not build a network")


def displayed_tree(rng, net, tries=500):
    """A tree the network displays, found by deleting r random edges
    while keeping everything connected; None if unlucky."""
    r = reticulation_number(net)
    for _ in range(tries):
        h = net.copy()
        ok = True
        for _ in range(r):
            cands = [e for e in sorted(h.edges)
                     if not any(v in h.labels for v in h.edges[e])]
            rng.shuffle(cands)
            for eid in cands:
                trial = h.copy()
                trial.remove_edge(eid)
                if is_connected(trial):
                    h = trial
                    break
            else:
                ok = False
                break
        if not ok:
            continue
        s = tidy_unrooted(h)
        if s.taxa() == net.taxa() and is_connected(s) \
                and reticulation_number(s) == 0:
            return s
    return None


def rand_ndp(rng, max_nodes=8, allow_busy_terminals=False):
    """Random disjoint-paths instance on at most ``max_nodes`` nodes
    with maximum degree 3.  By default terminals are degree-1 nodes in
    a single pair each (keeping the reduced instance small); with
    ``allow_busy_terminals`` higher-degree and multi-pair terminals are
    sampled too, which exercises the splitting gadgets."""
    while True:
        n = rng.randint(3, max_nodes)
        nodes = ["v%d" % i for i in range(n)]
        edges = []
        deg = {v: 0 for v in nodes}
        cand = [(a, b) for i, a in enumerate(nodes) for b in nodes[i + 1:]]
        rng.shuffle(cand)
        for a, b in cand:
            if deg[a] < 3 and deg[b] < 3 and rng.random() < 0.55:
                edges.append((a, b))
                deg[a] += 1
                deg[b] += 1
        deg1 = [v for v in nodes if deg[v] == 1]
        if len(deg1) < 2:
            continue
        pairs = []
        pool = list(deg1)
        for _ in range(rng.randint(1, 2)):
            busy = allow_busy_terminals and rng.random() < 0.5
            if not busy and len(pool) >= 2:
                a = pool.pop(rng.randrange(len(pool)))
                b = pool.pop(rng.randrange(len(pool)))
            else:
                a, b = rng.sample(nodes, 2)
            pairs.append((a, b))
        counts = {}
        for s, t in pairs:
            counts[s] = counts.get(s, 0) + 1
            counts[t] = counts.get(t, 0) + 1
        if any(c > 3 for c in counts.values()):
            continue
        return NdpInstance(edges, pairs)
