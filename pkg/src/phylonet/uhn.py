"""Unrooted hybridization number for two trees.

The route goes through agreement forests: a partition of the taxa into
blocks whose restricted subtrees agree between the two trees and are
node-disjoint within each tree.  A minimum forest with k+1 blocks gives
an unrooted network with k reticulations displaying both trees, and
vice versa, so h^u equals the TBR distance.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import (GuardExceeded, InvalidStructure, TaxonMismatch, UGraph,
                   canonical_unrooted, connected_components, is_connected,
                   labelled_isomorphic, make_image, normalize,
                   restrict_to_taxa, reticulation_number, tidy_unrooted)
from .utc import verify_image


@dataclass
class AgreementForest:
    """A partition of the shared taxa into agreement blocks."""

    blocks: list  # list of frozensets

    def sorted_blocks(self):
        return sorted(self.blocks, key=lambda b: min(b))

    def serialize(self):
        return "\n".join(",".join(sorted(b))
                         for b in self.sorted_blocks()) + "\n"

    @staticmethod
    def parse(text):
        blocks = [frozenset(line.split(","))
                  for line in text.splitlines() if line.strip()]
        return AgreementForest(blocks)


def _spanning_nodes(t, taxa):
    """Nodes of the minimal subtree of tree t connecting ``taxa``."""
    leaves = {t.leaf_of(x) for x in taxa}
    if len(leaves) == 1:
        return set(leaves)
    # prune degree-1 nodes that are not wanted leaves
    keep = set(t.inc)
    deg = {v: t.degree(v) for v in keep}
    queue = [v for v in keep if deg[v] == 1 and v not in leaves]
    while queue:
        v = queue.pop()
        keep.discard(v)
        for eid, w in t.neighbors(v):
            if w in keep:
                deg[w] -= 1
                if deg[w] == 1 and w not in leaves:
                    queue.append(w)
    return keep


def is_agreement_forest(t1, t2, partition):
    """Check the two agreement-forest conditions for a partition."""
    taxa = t1.taxa()
    if t2.taxa() != taxa:
        raise TaxonMismatch("trees carry different taxa")
    blocks = [frozenset(b) for b in partition]
    flat = [x for b in blocks for x in b]
    if len(flat) != len(set(flat)) or set(flat) != taxa or \
            any(not b for b in blocks):
        raise InvalidStructure("not a partition of the taxon set")
    for t in (t1, t2):
        spans = [_spanning_nodes(t, b) for b in blocks]
        for i in range(len(spans)):
            for j in range(i + 1, len(spans)):
                if spans[i] & spans[j]:
                    return False
    for b in blocks:
        if len(b) == 1:
            continue
        if not labelled_isomorphic(restrict_to_taxa(t1, b),
                                   restrict_to_taxa(t2, b)):
            return False
    return True


def _compatible(t1, t2, blocks, spans1, spans2):
    """Incremental forest feasibility used while growing a partition."""
    for i in range(len(blocks)):
        for j in range(i + 1, len(blocks)):
            if spans1[i] & spans1[j] or spans2[i] & spans2[j]:
                return False
    return True


def maf_exact(t1, t2, guard=10, bounded=False):
    """A maximum agreement forest, by searching partitions with an
    increasing number of blocks.  Instances above ``guard`` taxa are
    refused unless ``bounded`` is set (the search is identical, just
    potentially slow)."""
    taxa = sorted(t1.taxa())
    if t2.taxa() != set(taxa):
        raise TaxonMismatch("trees carry different taxa")
    if len(taxa) > guard and not bounded:
        raise GuardExceeded("maf_exact limited to %d taxa, got %d"
                            % (guard, len(taxa)))

    def grow(idx, blocks, spans1, spans2, max_blocks):
        if idx == len(taxa):
            return AgreementForest([frozenset(b) for b in blocks])
        x = taxa[idx]
        for i in range(len(blocks)):
            nb = blocks[i] | {x}
            if len(nb) >= 2 and not labelled_isomorphic(
                    restrict_to_taxa(t1, nb), restrict_to_taxa(t2, nb)):
                continue
            s1 = _spanning_nodes(t1, nb)
            s2 = _spanning_nodes(t2, nb)
            if any(s1 & spans1[j] for j in range(len(blocks)) if j != i) or \
                    any(s2 & spans2[j] for j in range(len(blocks)) if j != i):
                continue
            out = grow(idx + 1, blocks[:i] + [nb] + blocks[i + 1:],
                       spans1[:i] + [s1] + spans1[i + 1:],
                       spans2[:i] + [s2] + spans2[i + 1:], max_blocks)
            if out is not None:
                return out
        if len(blocks) < max_blocks:
            s1 = _spanning_nodes(t1, {x})
            s2 = _spanning_nodes(t2, {x})
            if not any(s1 & s for s in spans1) and \
                    not any(s2 & s for s in spans2):
                out = grow(idx + 1, blocks + [{x}], spans1 + [s1],
                           spans2 + [s2], max_blocks)
                if out is not None:
                    return out
        return None

    for m in range(1, len(taxa) + 1):
        found = grow(0, [], [], [], m)
        if found is not None:
            return found
    raise InvalidStructure("no agreement forest found")  # unreachable


# ---------------------------------------------------------------------------
# TBR distance by breadth-first search over tree space


def _tbr_neighbors(t):
    """All trees one TBR move away from tree t, as canonical strings
    paired with a representative graph."""
    out = {}
    for eid in sorted(t.edges):
        h = t.copy()
        h.remove_edge(eid)
        normalize(h)
        comps = connected_components(h)
        if len(comps) != 2:
            continue
        sides = []
        for comp in comps:
            pts = []
            if len(comp) == 1:
                pts.append(("node", next(iter(comp))))
            else:
                for e2, (a, b) in h.edges.items():
                    if a in comp:
                        pts.append(("edge", e2))
            sides.append(pts)
        for p1 in sides[0]:
            for p2 in sides[1]:
                g = h.copy()
                ends = []
                for kind, ref in (p1, p2):
                    ends.append(g.subdivide(ref) if kind == "edge" else ref)
                g.add_edge(ends[0], ends[1])
                key = canonical_unrooted(g)
                out.setdefault(key, g)
    return out


def tbr_bfs_oracle(t1, t2, guard=7):
    """Minimum number of TBR moves from t1 to t2, by breadth-first
    search through tree space.  Guarded to small taxon sets."""
    if t1.taxa() != t2.taxa():
        raise TaxonMismatch("trees carry different taxa")
    if len(t1.taxa()) > guard:
        raise GuardExceeded("tbr_bfs_oracle limited to %d taxa, got %d"
                            % (guard, len(t1.taxa())))
    target = canonical_unrooted(t2)
    start = canonical_unrooted(t1)
    if start == target:
        return 0
    frontier = {start: t1}
    seen = {start}
    dist = 0
    while frontier:
        dist += 1
        nxt = {}
        for g in frontier.values():
            for key, h in _tbr_neighbors(g).items():
                if key == target:
                    return dist
                if key not in seen:
                    seen.add(key)
                    nxt[key] = h
        frontier = nxt
    raise InvalidStructure("tree space exhausted without reaching target")


# ---------------------------------------------------------------------------
# forest -> network (constructive direction)


def _detaching_split(t, block):
    """In tree t, find the edge detaching exactly ``block`` and report
    the wiring points on both sides.

    Returns (inner, outer) where each is either ('taxon', x) or
    ('split', (A, B)): the bipartition of that side's taxa induced by
    the attachment node.  None when the block is not pendant."""
    block = frozenset(block)
    rest = frozenset(t.taxa()) - block
    for eid in sorted(t.edges):
        for u, v in (t.edges[eid], tuple(reversed(t.edges[eid]))):
            side = _component_taxa(t, eid, u)
            if side != block:
                continue

            def point(node, own):
                if len(own) == 1:
                    return ("taxon", next(iter(own)))
                parts = []
                for e2, w in t.neighbors(node):
                    if e2 != eid:
                        parts.append(frozenset(_component_taxa(t, e2, w)))
                return ("split", tuple(sorted(parts, key=min)))

            return point(u, block), point(v, rest)
    return None


def _component_taxa(t, eid, start):
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for e2, w in t.neighbors(v):
            if e2 == eid or w in seen:
                continue
            seen.add(w)
            stack.append(w)
    return frozenset(t.labels[v] for v in seen if v in t.labels)


def _elimination_order(t2, forest):
    """Pendant-component elimination ordering with wiring points.

    Returns the blocks in elimination order; every block except the
    last carries its two wiring points (inner and outer)."""
    remaining = list(forest.sorted_blocks())
    order = []
    while len(remaining) > 1:
        rest_taxa = set().union(*remaining)
        t2r = restrict_to_taxa(t2, rest_taxa)
        pick = None
        for b in sorted(remaining, key=min):
            found = _detaching_split(t2r, b)
            if found is not None:
                pick = (b, found)
                break
        if pick is None:
            raise InvalidStructure("no pendant block; not an agreement "
                                   "forest?")
        b, (wp_in, wp_out) = pick
        order.append((b, wp_in, wp_out))
        remaining.remove(b)
    order.append((remaining[0], None, None))
    return order


class _HostTracker:
    """A network under construction whose edge sets must survive
    subdivisions: each subdivision rewrites the tracked sets."""

    def __init__(self, g):
        self.g = g
        self.tracked = []

    def track(self, edge_set):
        self.tracked.append(edge_set)
        return edge_set

    def subdivide(self, eid):
        u, v = self.g.edges[eid]
        self.g.remove_edge(eid)
        w = self.g.new_node()
        e1 = self.g.add_edge(u, w)
        e2 = self.g.add_edge(w, v)
        for s in self.tracked:
            if eid in s:
                s.discard(eid)
                s.add(e1)
                s.add(e2)
        return w, e1, e2


def _split_edge_in_image(g, img_edges, split, min_taxon):
    """The edge of the subtree ``img_edges`` whose removal induces the
    given taxon bipartition, choosing the candidate closest to the leaf
    of ``min_taxon``."""
    a_side, b_side = frozenset(split[0]), frozenset(split[1])
    nodes = set()
    adj = {}
    for eid in img_edges:
        u, v = g.edges[eid]
        nodes.update((u, v))
        adj.setdefault(u, []).append((eid, v))
        adj.setdefault(v, []).append((eid, u))

    def side_taxa(eid, start):
        seen = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for e2, w in adj[x]:
                if e2 == eid or w in seen:
                    continue
                seen.add(w)
                stack.append(w)
        return frozenset(g.labels[v] for v in seen
                         if v in g.labels and g.labels[v] in a_side | b_side)

    candidates = []
    for eid in sorted(img_edges):
        u, v = g.edges[eid]
        tu = side_taxa(eid, u)
        if tu == a_side or tu == b_side:
            candidates.append(eid)
    if not candidates:
        raise InvalidStructure("image path for wiring split not found")
    # distance from min_taxon's leaf to the edge, within the subtree
    start = g.leaf_of(min_taxon)
    distv = {start: 0}
    queue = [start]
    while queue:
        x = queue.pop(0)
        for e2, w in adj[x]:
            if w not in distv:
                distv[w] = distv[x] + 1
                queue.append(w)
    return min(candidates,
               key=lambda e: (min(distv[g.edges[e][0]],
                                  distv[g.edges[e][1]]), e))


def network_from_forest(t1, t2, forest):
    """Wire the blocks of an agreement forest into a network displaying
    both trees.  Returns (network, image of t1, image of t2); the
    reticulation number equals the block count minus one."""
    if not is_agreement_forest(t1, t2, forest.blocks):
        raise InvalidStructure("not an agreement forest")
    order = _elimination_order(t2, forest)
    host = _HostTracker(t1.copy())
    g = host.g
    block_imgs = {}
    for b, _, _ in order:
        nodes = _spanning_nodes(g, b)
        edges = {eid for eid, (u, v) in g.edges.items()
                 if u in nodes and v in nodes}
        block_imgs[b] = host.track(edges)
    wiring_edges = host.track(set())
    # image of t2 over the already-wired union, grown back to front
    last_block = order[-1][0]
    img2 = host.track(set(block_imgs[last_block]))
    wired_taxa = set(last_block)
    def wire_point(kind, ref, img, min_taxon):
        """Subdivide at a wiring point; a taxon point subdivides the
        pendant edge and pulls its leaf-side half into ``img``."""
        if kind == "taxon":
            leaf = g.leaf_of(ref)
            w, e1, e2 = host.subdivide(g.inc[leaf][0])
            img.add(e1 if leaf in g.edges[e1] else e2)
            return w
        w, _, _ = host.subdivide(_split_edge_in_image(g, img, ref,
                                                      min_taxon))
        return w

    for b, wp_in, wp_out in reversed(order[:-1]):
        s1 = wire_point(wp_in[0], wp_in[1], block_imgs[b], min(b))
        s2 = wire_point(wp_out[0], wp_out[1], img2, min(wired_taxa))
        new_edge = g.add_edge(s1, s2)
        wiring_edges.add(new_edge)
        img2 |= block_imgs[b]
        img2.add(new_edge)
        wired_taxa |= b
    img1_edges = set(g.edges) - wiring_edges
    img1 = make_image(g, img1_edges)
    img2_img = make_image(g, img2)
    if not verify_image(g, t1, img1) or not verify_image(g, t2, img2_img):
        raise InvalidStructure("forest wiring produced an invalid image")
    return g, img1, img2_img


def forest_from_network(n, img1, img2):
    """Recover an agreement forest from a network and images of the two
    trees: extend the first image to a spanning tree, then cut the
    second image at the edges the spanning tree does not use."""
    span = set(img1.host_edges)
    # greedy spanning-tree extension over all nodes, canonical order
    parent = {}

    def find(v):
        while parent.get(v, v) != v:
            parent[v] = parent.get(parent[v], parent[v])
            v = parent[v]
        return v

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        parent[ra] = rb
        return True

    for eid in span:
        union(*n.edges[eid])
    for eid in sorted(n.edges):
        if eid not in span and union(*n.edges[eid]):
            span.add(eid)
    cut = set(img2.host_edges) - span
    # components of the second image after removing the cut edges
    adj = {}
    for eid in img2.host_edges - cut:
        u, v = n.edges[eid]
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    for v in img2.host_nodes:
        adj.setdefault(v, [])
    blocks = []
    seen = set()
    for v in adj:
        if v in seen:
            continue
        comp = {v}
        stack = [v]
        while stack:
            x = stack.pop()
            for w in adj[x]:
                if w not in comp:
                    comp.add(w)
                    stack.append(w)
        seen |= comp
        taxa = frozenset(n.labels[w] for w in comp if w in n.labels)
        if taxa:
            blocks.append(taxa)
    return AgreementForest(blocks)


def uhn_solve(t1, t2, guard=10, bounded=False):
    """h^u of two unrooted trees plus a witnessing network and images."""
    forest = maf_exact(t1, t2, guard=guard, bounded=bounded)
    value = len(forest.blocks) - 1
    g, img1, img2 = network_from_forest(t1, t2, forest)
    assert reticulation_number(g) == value
    return value, g, img1, img2
