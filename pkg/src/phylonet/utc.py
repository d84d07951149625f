"""Deciding whether a network displays a tree.

A network displays a tree when some subtree of the network (the image)
turns into the tree after suppressing degree-2 nodes.  Three entry
points:

* :func:`rooted_tc` for rooted networks, by switching off one incoming
  arc per reticulation (2^k combinations),
* :func:`utc_solve` for unrooted networks, by bounded branching on a
  cherry of the tree,
* :func:`utc_oracle`, an independent brute-force check used to validate
  the solver on small instances.
"""

from __future__ import annotations

import itertools
from .core import (GuardExceeded, Image, InvalidStructure, RGraph,
                   TaxonMismatch, UGraph, canonical_rooted,
                   canonical_unrooted, connected_components, is_connected,
                   labelled_isomorphic, make_image, normalize,
                   restrict_to_taxa, reticulation_number, tidy_rooted,
                   tidy_unrooted, validate_rooted, validate_unrooted)


# ---------------------------------------------------------------------------
# rooted display


def _prune_rooted_dead(h, root):
    """Delete, iteratively, unlabelled sinks and sources hanging off the
    kept arc set; also unwind unary source chains so the remaining
    subgraph is a subtree spanning exactly the leaves."""
    work = True
    while work:
        work = False
        for v in list(h.out_inc):
            ind, outd = len(h.in_inc[v]), len(h.out_inc[v])
            if v in h.labels:
                continue
            if outd == 0:
                h.remove_node(v)
                work = True
            elif ind == 0 and outd == 1 and v != root:
                h.remove_node(v)
                work = True
    # the root itself may have become unary; peel it down to the first
    # branching node
    v = root
    while v in h.out_inc and len(h.in_inc[v]) == 0 and len(h.out_inc[v]) == 1 \
            and v not in h.labels:
        c = h.edges[h.out_inc[v][0]][1]
        h.remove_node(v)
        v = c
    return h


def rooted_tc(n, t):
    """Does rooted network ``n`` display rooted tree ``t``?

    Tries every way of keeping one incoming arc per reticulation.  On
    success returns an :class:`Image` referencing edges of ``n``,
    otherwise None.
    """
    if n.taxa() != t.taxa():
        raise TaxonMismatch("network and tree carry different taxa")
    target = canonical_rooted(t)
    retics = sorted(n.reticulations())
    in_arcs = [sorted(n.in_inc[v]) for v in retics]
    for choice in itertools.product(*[(0, 1) for _ in retics]):
        h = n.copy()
        for arcs, pick in zip(in_arcs, choice):
            h.remove_edge(arcs[1 - pick])
        _prune_rooted_dead(h, n.root)
        s = tidy_rooted(h)
        if s.root is None:
            continue
        try:
            if canonical_rooted(s) != target:
                continue
        except KeyError:
            continue
        if s.taxa() != t.taxa():
            continue
        return make_image(n, h.edges.keys())
    return None


# ---------------------------------------------------------------------------
# unrooted display, branching solver


def _split_off_taxon_free(g):
    """If g is disconnected, keep the single component carrying taxa.
    Returns False if taxa are split over several components."""
    comps = connected_components(g)
    if len(comps) <= 1:
        return True
    with_taxa = [c for c in comps if any(v in g.labels for v in c)]
    if len(with_taxa) != 1:
        return False
    keep = with_taxa[0]
    for v in list(g.inc):
        if v not in keep:
            g.remove_node(v)
    return True


def _find_cherry(t):
    """A cherry of unrooted tree t: two leaves with a common neighbour,
    smallest taxon pair first.  None when t has no internal node."""
    best = None
    for v in t.inc:
        if v in t.labels:
            continue
        leaves = sorted(t.labels[w] for _, w in t.neighbors(v)
                        if w in t.labels)
        if len(leaves) >= 2:
            pair = (leaves[0], leaves[1])
            if best is None or pair < best:
                best = pair
    return best


def _decide_utc(n, t):
    """Recursive decision: does (normalized) network n display tree t?"""
    taxa = n.taxa()
    if len(taxa) <= 3:
        return True
    if reticulation_number(n) == 0:
        return labelled_isomorphic(n, t)
    cherry = _find_cherry(t)
    x, y = cherry
    lx, ly = n.leaf_of(x), n.leaf_of(y)
    nx = next(w for _, w in n.neighbors(lx))
    ny = next(w for _, w in n.neighbors(ly))
    if nx == ny:
        n2 = n.copy()
        del n2.labels[ly]
        normalize(n2)
        return _decide_utc(n2, restrict_to_taxa(t, taxa - {y}))
    # an image realizing the cherry cannot use all four side edges at
    # the two leaf neighbours, so one of them can be deleted
    sides = []
    for hub, leaf in ((nx, lx), (ny, ly)):
        for eid, w in n.neighbors(hub):
            if w != leaf:
                sides.append(eid)
    for eid in dict.fromkeys(sides):
        n2 = n.copy()
        n2.remove_edge(eid)
        if not _split_off_taxon_free(n2):
            continue
        normalize(n2)
        if n2.taxa() != taxa:
            continue
        if _decide_utc(n2, t):
            return True
    return False


def _extract_image(n, t):
    """Given that n displays t, find a witnessing subtree of n by greedy
    edge deletion, then strip unlabelled pendant branches."""
    host = n.copy()
    changed = True
    while reticulation_number(host) > 0 and changed:
        changed = False
        for eid in sorted(host.edges):
            trial = host.copy()
            trial.remove_edge(eid)
            if not _split_off_taxon_free(trial):
                continue
            if trial.taxa() != n.taxa():
                continue
            probe = tidy_unrooted(trial)
            if not is_connected(probe):
                continue
            if _decide_utc(probe, t):
                host = trial
                changed = True
                break
    # prune unlabelled pendant parts without suppressing degree-2 nodes,
    # so surviving edge ids still reference n
    work = True
    while work:
        work = False
        for v in list(host.inc):
            if v not in host.labels and len(host.inc[v]) <= 1:
                host.remove_node(v)
                work = True
    return make_image(n, host.edges.keys())


def verify_image(host, t, image):
    """Check that ``image`` really embeds ``t`` into ``host``."""
    if isinstance(host, RGraph):
        sub = RGraph()
        m = {}
        for eid in image.host_edges:
            for v in host.edges[eid]:
                if v not in m:
                    m[v] = sub.new_node(host.labels.get(v))
        for eid in image.host_edges:
            u, v = host.edges[eid]
            sub.add_edge(m[u], m[v])
        roots = [v for v in sub.out_inc if len(sub.in_inc[v]) == 0]
        if len(roots) != 1:
            return False
        sub.root = roots[0]
        s = tidy_rooted(sub)
        return s.taxa() == t.taxa() and canonical_rooted(s) == \
            canonical_rooted(t)
    sub = UGraph()
    m = {}
    for eid in image.host_edges:
        for v in host.edges[eid]:
            if v not in m:
                m[v] = sub.new_node(host.labels.get(v))
    for eid in image.host_edges:
        u, v = host.edges[eid]
        sub.add_edge(m[u], m[v])
    if not is_connected(sub):
        return False
    s = tidy_unrooted(sub)
    if s.taxa() != t.taxa() or not is_connected(s):
        return False
    return reticulation_number(s) == 0 and labelled_isomorphic(s, t)


def utc_solve(n, t, use_kernel=True):
    """Does unrooted network ``n`` display unrooted tree ``t``?

    With ``use_kernel=True`` the instance is first shrunk by the
    reduction rules.  Either way the return value is the plain yes/no
    answer; use :func:`utc_find_image` for a certificate.
    """
    if n.taxa() != t.taxa():
        raise TaxonMismatch("network and tree carry different taxa")
    if use_kernel:
        from .reduce import kernelize_utc
        kn = kernelize_utc(n, t)
        if kn.decided is not None:
            return kn.decided
        return _decide_utc(kn.network, kn.tree)
    return _decide_utc(tidy_unrooted(n), t)


def utc_find_image(n, t):
    """An :class:`Image` of ``t`` in ``n``, or None.  Runs the branching
    decision without kernelization, then extracts a witness by greedy
    edge deletion."""
    if n.taxa() != t.taxa():
        raise TaxonMismatch("network and tree carry different taxa")
    if not _decide_utc(tidy_unrooted(n), t):
        return None
    image = _extract_image(n, t)
    assert verify_image(n, t, image)
    return image


# ---------------------------------------------------------------------------
# brute-force oracle


def utc_oracle(n, t, max_edges=24):
    """Independent display check by exhausting spanning subtrees.

    Deletes every set of exactly r(n) edges whose removal leaves a
    connected graph, tidies the result and compares against ``t``.  Any
    image extends to such a spanning subtree, so this is equivalent to
    searching images directly.  Returns an :class:`Image` on the edges
    of ``n``, or None.  Refuses hosts above ``max_edges``.
    """
    if len(n.edges) > max_edges:
        raise GuardExceeded("oracle limited to %d edges, got %d"
                            % (max_edges, len(n.edges)))
    if n.taxa() != t.taxa():
        raise TaxonMismatch("network and tree carry different taxa")
    target = canonical_unrooted(t)
    r = reticulation_number(n)
    for drop in itertools.combinations(sorted(n.edges), r):
        h = n.copy()
        for eid in drop:
            h.remove_edge(eid)
        if not is_connected(h):
            continue
        s = tidy_unrooted(h)
        if s.taxa() != t.taxa() or not is_connected(s):
            continue
        if reticulation_number(s) == 0 and canonical_unrooted(s) == target:
            # strip unlabelled pendant branches of h to get the image
            work = True
            while work:
                work = False
                for v in list(h.inc):
                    if v not in h.labels and len(h.inc[v]) <= 1:
                        h.remove_node(v)
                        work = True
            return make_image(n, h.edges.keys())
    return None
