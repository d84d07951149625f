"""Exact root-uncertain hybridization number.

Given a collection of unrooted trees, find the smallest k such that the
trees admit rootings that are simultaneously displayed by one rooted
network with k reticulations.  The solver runs iterative deepening on
k: each level kernelizes the collection (pendant-subtree collapse and
5k-chain truncation), enumerates edge rootings of the kernel trees and
solves the rooted question exactly.  Certificates found on the kernel
are lifted back to the original taxa by undoing the reductions, and
every lifted certificate is re-verified from scratch before it is
returned.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .core import (GuardExceeded, InvalidStructure, RGraph, TaxonMismatch,
                   canonical_rooted, canonical_unrooted, normalize,
                   reticulation_number, root_at_edge)
from .hn import hn_exact
from .newick import parse_tree, write_network
from .reduce import (apply_cps, find_common_pendant_subtree, kernelize_ruhn)
from .utc import rooted_tc


@dataclass
class RuhnSolution:
    """Optimal value with witnessing rootings, network and images.

    Rootings are recorded as splits: for each input tree the set of
    taxa on one side of the root edge."""

    value: int
    rootings: dict          # tree index -> frozenset of taxa
    network: RGraph
    images: list

    def serialize(self):
        lines = ["value %d" % self.value]
        for i in sorted(self.rootings):
            lines.append("root t%d %s" % (
                i, ",".join(sorted(self.rootings[i]))))
        lines.append("network %s" % write_network(self.network))
        for i, img in enumerate(self.images):
            lines.append("image t%d %s" % (
                i, " ".join(str(e) for e in sorted(img.host_edges))))
        return "\n".join(lines) + "\n"


def _edge_split(t, eid):
    """Taxa on one side of an edge, as a canonical frozenset: the side
    not containing the overall smallest taxon."""
    u, v = t.edges[eid]
    seen = {u}
    stack = [u]
    while stack:
        w = stack.pop()
        for e2, x in t.neighbors(w):
            if e2 != eid and x not in seen:
                seen.add(x)
                stack.append(x)
    side = frozenset(t.labels[w] for w in seen if w in t.labels)
    small = min(t.taxa())
    return frozenset(t.taxa()) - side if small in side else side


def _root_at_split(t, split):
    """Root an unrooted tree at the edge realizing the given split."""
    for eid in sorted(t.edges):
        s = _edge_split(t, eid)
        if s == split or t.taxa() - s == split:
            return root_at_edge(t, eid)
    raise InvalidStructure("no edge realizes the split %s" % sorted(split))


def _rooting_candidates(t):
    """All rooting splits of a tree, smallest-side-first order."""
    out = []
    for eid in sorted(t.edges):
        s = _edge_split(t, eid)
        if s not in out:
            out.append(s)
    out.sort(key=lambda s: (len(s), sorted(s)))
    return out


def _expand_split(split, step):
    if step.kind == "cps":
        if step.x in split:
            return frozenset(split - {step.x}) | set(step.taxa)
        return split
    if step.kind == "cc":
        if step.kept[-1] in split:
            return frozenset(split) | set(step.removed)
        return split
    return split


def _splice_subtree(net, x, shape):
    """Replace leaf x of a rooted network by the given tree shape."""
    sub = parse_tree(shape + ";", mode="rooted")
    lx = net.leaf_of(x)
    del net.labels[lx]
    m = {sub.root: lx}
    for v in sub.out_inc:
        if v != sub.root:
            m[v] = net.new_node(sub.labels.get(v))
    for u, v in sub.edges.values():
        net.add_edge(m[u], m[v])
    return net


def _chain_insertions(net, step):
    """Candidate networks re-inserting the truncated chain taxa: hang
    them below or above the parent of each kept chain leaf, preserving
    the chain order."""
    removed = list(step.removed)
    for anchor in reversed(step.kept):
        try:
            leaf = net.leaf_of(anchor)
        except KeyError:
            continue
        p = net.edges[net.in_inc[leaf][0]][0]
        down = [e for e in net.out_inc[p] if net.edges[e][1] != leaf]
        for eid in down:
            h = net.copy()
            hp = h.edges[h.in_inc[h.leaf_of(anchor)][0]][0]
            tail = next(e for e in h.out_inc[hp]
                        if h.edges[e][1] != h.leaf_of(anchor))
            cur = hp
            u, v = h.edges[tail]
            h.remove_edge(tail)
            for x in removed:
                w = h.new_node()
                h.add_edge(cur, w)
                h.add_edge(w, h.new_node(x))
                cur = w
            h.add_edge(cur, v)
            yield h
        if net.in_inc[p]:
            h = net.copy()
            hl = h.leaf_of(anchor)
            hp = h.edges[h.in_inc[hl][0]][0]
            up = h.in_inc[hp][0]
            u, v = h.edges[up]
            h.remove_edge(up)
            cur = u
            for x in reversed(removed):
                w = h.new_node()
                h.add_edge(cur, w)
                h.add_edge(w, h.new_node(x))
                cur = w
            h.add_edge(cur, v)
            yield h


def _forward_states(trees, log):
    """Replay the reduction log, returning the tree collection before
    each structural step (and the steps themselves)."""
    states = []
    cur = [t.copy() for t in trees]
    for step in log.steps:
        if step.kind == "cps":
            p = find_common_pendant_subtree(cur)
            if p is None or tuple(sorted(p.taxa)) != step.taxa:
                raise InvalidStructure("log replay found a different "
                                       "pendant subtree")
            states.append(([t.copy() for t in cur], step))
            cur, step2 = apply_cps(cur, p)
            if step2.x != step.x:
                # fresh placeholder names differ between runs; align
                # with the logged name
                for g in cur:
                    g.labels[g.leaf_of(step2.x)] = step.x
        elif step.kind == "cc":
            states.append(([t.copy() for t in cur], step))
            nxt = []
            for s in cur:
                g = s.copy()
                for x in step.removed:
                    del g.labels[g.leaf_of(x)]
                normalize(g)
                nxt.append(g)
            cur = nxt
    return states, cur


def _verify_level(net, trees, splits):
    images = []
    for t, split in zip(trees, splits):
        rt = _root_at_split(t, split)
        img = rooted_tc(net, rt)
        if img is None:
            return None
        images.append(img)
    return images


def _lift(trees, log, net, splits):
    """Undo the reductions on a kernel certificate.  Returns the
    network, per-tree root splits and verified images on the original
    taxa."""
    states, _ = _forward_states(trees, log)
    for stage_trees, step in reversed(states):
        new_splits = [_expand_split(s, step) for s in splits]
        if step.kind == "cps":
            cand = _splice_subtree(net.copy(), step.x, step.shape)
            if _verify_level(cand, stage_trees, new_splits) is None:
                raise InvalidStructure("pendant-subtree lift failed "
                                       "verification")
            net, splits = cand, new_splits
        elif step.kind == "cc":
            lifted = None
            for cand in _chain_insertions(net, step):
                if _verify_level(cand, stage_trees, new_splits) is not None:
                    lifted = cand
                    break
            if lifted is None:
                raise InvalidStructure("chain lift failed verification")
            net, splits = lifted, new_splits
    images = _verify_level(net, trees, splits)
    if images is None:
        raise InvalidStructure("lifted certificate failed verification")
    return net, splits, images


def _trivial_solution(trees, value=0):
    t = trees[0]
    split = frozenset({min(t.taxa())})
    net = _root_at_split(t, split)
    splits = [split for _ in trees]
    images = _verify_level(net, trees, splits)
    if images is None:
        raise InvalidStructure("trivial certificate failed verification")
    return RuhnSolution(value, dict(enumerate(splits)), net, images)


def ruhn_exact(trees, k_max, max_taxa=6, max_k=3):
    """Smallest k <= k_max such that some rootings of the trees are
    displayed by one rooted network with k reticulations, with a lifted
    and re-verified certificate; None when every level fails."""
    trees = list(trees)
    taxa = trees[0].taxa()
    for t in trees[1:]:
        if t.taxa() != taxa:
            raise TaxonMismatch("trees carry different taxa")
    if k_max > max_k:
        raise GuardExceeded("ruhn_exact limited to k_max <= %d" % max_k)
    if len(trees) == 1 or len({canonical_unrooted(t) for t in trees}) == 1:
        return _trivial_solution(trees)
    for k in range(k_max + 1):
        kern = kernelize_ruhn(trees, k)
        if kern.decided is False:
            continue
        if kern.decided is True:
            return _trivial_solution(trees)
        kernel = kern.trees
        distinct = len({canonical_unrooted(t) for t in kernel})
        if distinct > 2 ** k:
            continue
        if len(kernel[0].taxa()) > max_taxa:
            raise GuardExceeded(
                "kernel carries %d taxa, rooted search limited to %d"
                % (len(kernel[0].taxa()), max_taxa))
        cand_lists = [_rooting_candidates(t) for t in kernel]
        for combo in itertools.product(*cand_lists):
            rooted = [_root_at_split(t, s) for t, s in zip(kernel, combo)]
            sol = hn_exact(rooted, k, max_taxa=max_taxa, max_k=max_k)
            if sol is None or sol.value > k:
                continue
            net, splits, images = _lift(trees, kern.log, sol.network,
                                        list(combo))
            if reticulation_number(net) != sol.value:
                raise InvalidStructure("lifted network changed the "
                                       "reticulation count")
            return RuhnSolution(sol.value, dict(enumerate(splits)), net,
                                images)
    return None
