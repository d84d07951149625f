"""Exact rooted hybridization number.

Contains the r-generator machinery (enumeration and taxon attachment),
an exact solver for sets of rooted trees, and an exhaustive oracle for
the unrooted two-tree problem.

For two trees the solver goes through maximum acyclic agreement
forests: the hybridization number equals the minimum component count of
an acyclic agreement forest of the root-augmented trees, minus one, and
the forest can be wired into a witnessing network.  For three or more
trees a complete (and much slower) search over reticulation-edge
additions is used.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import networkx as nx

from .core import (GuardExceeded, InvalidStructure, RESERVED_PREFIX, RGraph,
                   TaxonMismatch, UGraph, canonical_rooted,
                   canonical_unrooted, is_connected, labelled_isomorphic,
                   make_image, normalize, reticulation_number, tidy_rooted,
                   tidy_unrooted, validate_rooted)
from .utc import rooted_tc, utc_oracle

RHO = RESERVED_PREFIX + "rho"


# ---------------------------------------------------------------------------
# r-generators


@dataclass
class Generator:
    """A reticulation backbone: DAG multigraph with a single node of
    indegree 0 and outdegree 1, r reticulations (indegree 2, outdegree
    at most 1) and otherwise indegree-1/outdegree-2 nodes."""

    r: int
    nodes: tuple            # node ids 0..n-1; 0 is the top node
    edges: tuple            # tuple of (tail, head), index = edge side id

    def edge_sides(self):
        return list(range(len(self.edges)))

    def node_sides(self):
        outdeg = {v: 0 for v in self.nodes}
        indeg = {v: 0 for v in self.nodes}
        for u, v in self.edges:
            outdeg[u] += 1
            indeg[v] += 1
        if self.r == 0:
            # degenerate generator: the sink of the single edge
            return [v for v in self.nodes if outdeg[v] == 0]
        return [v for v in self.nodes if indeg[v] == 2 and outdeg[v] == 0]

    def sides(self):
        return len(self.edges) + len(self.node_sides())


def _assemble(r, r1):
    """All stub assignments for r reticulations of which r1 have
    outdegree 1; yields edge tuples."""
    t = 2 * r - r1 - 1
    if t < 0:
        return
    # node ids: 0 = top, 1..t tree nodes, t+1..t+r reticulations
    # (the first r1 reticulations have outdegree 1)
    tree = list(range(1, t + 1))
    retic = list(range(t + 1, t + r + 1))
    cap = {0: 1}
    for v in tree:
        cap[v] = 2
    for i, v in enumerate(retic):
        cap[v] = 1 if i < r1 else 0
    # in-stubs in fixed order: one per tree node, two per reticulation
    stubs = [(v, 0) for v in tree] + [(v, s) for v in retic for s in (0, 1)]

    def symmetric_ok(edges, used):
        # interchangeable unlabelled nodes must appear in index order
        def first_use(v):
            for i, (a, b) in enumerate(edges):
                if a == v or b == v:
                    return i
            return len(edges)
        for group in (tree, retic[:r1], retic[r1:]):
            uses = [first_use(v) for v in group]
            if uses != sorted(uses):
                return False
        return True

    def rec(i, edges, cap):
        if i == len(stubs):
            yield tuple(edges)
            return
        head, slot = stubs[i]
        for src in sorted(cap):
            if cap[src] == 0 or src == head:
                continue
            if slot == 1 and edges[-1][1] == head and src < edges[-1][0]:
                continue  # unordered pair of in-edges
            cap[src] -= 1
            edges.append((src, head))
            yield from rec(i + 1, edges, cap)
            edges.pop()
            cap[src] += 1

    n = t + r + 1
    for edges in rec(0, [], cap):
        # acyclicity
        g = nx.MultiDiGraph()
        g.add_nodes_from(range(n))
        g.add_edges_from(edges)
        if not nx.is_directed_acyclic_graph(g):
            continue
        if not nx.is_weakly_connected(g):
            continue
        if not symmetric_ok(list(edges), None):
            continue
        yield tuple(range(n)), edges


_GEN_CACHE = {}


def enumerate_generators(r, guard=3):
    """All r-generators up to isomorphism, in a deterministic order."""
    if r < 0:
        raise ValueError("negative reticulation count")
    if r > guard:
        raise GuardExceeded("generator enumeration limited to r <= %d, "
                            "got %d" % (guard, r))
    if r in _GEN_CACHE:
        return _GEN_CACHE[r]
    if r == 0:
        out = [Generator(0, (0, 1), ((0, 1),))]
        _GEN_CACHE[0] = out
        return out
    found = []
    reps = []
    for r1 in range(r + 1):
        for nodes, edges in _assemble(r, r1):
            g = nx.MultiDiGraph()
            g.add_nodes_from(nodes)
            g.add_edges_from(edges)
            key = (len(nodes), tuple(sorted(
                (g.in_degree(v), g.out_degree(v)) for v in nodes)))
            dup = False
            for k2, g2 in reps:
                if k2 == key and nx.is_isomorphic(g, g2):
                    dup = True
                    break
            if dup:
                continue
            reps.append((key, g))
            found.append(Generator(r, nodes, edges))
    found.sort(key=lambda G: (len(G.nodes), len(G.edges), G.edges))
    _GEN_CACHE[r] = found
    return found


def attach_taxa(gen, taxa):
    """Stream every rooted network obtained by distributing ``taxa``
    over the sides of a generator: node sides take exactly one label,
    edge sides take ordered label sequences."""
    taxa = sorted(taxa)
    node_sides = gen.node_sides()
    edge_sides = gen.edge_sides()
    if len(taxa) < len(node_sides):
        raise InvalidStructure("fewer taxa than node sides")

    for node_combo in itertools.permutations(taxa, len(node_sides)):
        rest = [x for x in taxa if x not in node_combo]
        # distribute the rest over edge sides as ordered sequences:
        # choose a side for each taxon, then an order within each side
        for side_of in itertools.product(edge_sides, repeat=len(rest)):
            groups = {e: [x for x, s in zip(rest, side_of) if s == e]
                      for e in edge_sides}
            orders = [itertools.permutations(groups[e]) for e in edge_sides]
            for combo in itertools.product(*orders):
                net = _build_attached(gen, node_sides, node_combo,
                                      dict(zip(edge_sides, combo)))
                if net is not None:
                    yield net


def _build_attached(gen, node_sides, node_combo, edge_labels):
    g = RGraph()
    m = {v: g.new_node() for v in gen.nodes}
    for v, lab in zip(node_sides, node_combo):
        if gen.r == 0:
            # degenerate generator: the sink is itself the leaf
            g.labels[m[v]] = lab
        else:
            g.add_edge(m[v], g.new_node(lab))
    for idx, (u, v) in enumerate(gen.edges):
        cur = m[u]
        for lab in edge_labels[idx]:
            w = g.new_node()
            g.add_edge(cur, w)
            g.add_edge(w, g.new_node(lab))
            cur = w
        g.add_edge(cur, m[v])
    # the generator top has outdegree 1; remove it
    top = m[gen.nodes[0]]
    child = g.edges[g.out_inc[top][0]][1]
    g.remove_node(top)
    g.root = child
    # reject leftovers that break the degree rules (e.g. a parallel pair
    # of edge sides that both stayed empty)
    seen = set()
    for u, v in g.edges.values():
        if (u, v) in seen:
            return None
        seen.add((u, v))
    try:
        return validate_rooted(g)
    except InvalidStructure:
        return None


# ---------------------------------------------------------------------------
# rooted agreement forests (two trees)


def _augment(t):
    """Copy of a rooted tree with a pendant root leaf added above."""
    g = t.copy()
    nr = g.new_node()
    rho = g.new_node(RHO)
    g.add_edge(nr, g.root)
    g.add_edge(nr, rho)
    g.root = nr
    return g


def _depths(t):
    depth = {t.root: 0}
    parent = {t.root: None}
    stack = [t.root]
    while stack:
        v = stack.pop()
        for c in t.children(v):
            depth[c] = depth[v] + 1
            parent[c] = v
            stack.append(c)
    return depth, parent


def _lca(depth, parent, nodes):
    nodes = list(nodes)
    v = nodes[0]
    for w in nodes[1:]:
        a, b = v, w
        while depth[a] > depth[b]:
            a = parent[a]
        while depth[b] > depth[a]:
            b = parent[b]
        while a != b:
            a, b = parent[a], parent[b]
        v = a
    return v


def _steiner_nodes(t, depth, parent, block):
    """Nodes of the minimal subtree of t connecting the block's leaves
    (including the paths up to their LCA)."""
    leaves = [t.leaf_of(x) for x in block]
    top = _lca(depth, parent, leaves)
    nodes = {top}
    for leaf in leaves:
        v = leaf
        while v not in nodes:
            nodes.add(v)
            v = parent[v]
    return nodes, top


def _rooted_restrict(t, block):
    h = t.copy()
    for v in list(h.labels):
        if h.labels[v] not in block:
            del h.labels[v]
    return tidy_rooted(h)


def _acyclic(order_info):
    """order_info: list of (root depth comparisons) arcs; detect a
    directed cycle among block indices."""
    n = max((max(a, b) for a, b in order_info), default=-1) + 1
    adj = {i: set() for i in range(n)}
    for a, b in order_info:
        adj[a].add(b)
    state = {}

    def dfs(v):
        state[v] = 1
        for w in adj[v]:
            if state.get(w) == 1:
                return False
            if w not in state and not dfs(w):
                return False
        state[v] = 2
        return True

    return all(state.get(v) == 2 or dfs(v) for v in adj)


def _proper_ancestor(depth, parent, a, b):
    if depth[a] >= depth[b]:
        return False
    while depth[b] > depth[a]:
        b = parent[b]
    return a == b


class RootedForest:
    """An acyclic agreement forest of two root-augmented trees."""

    def __init__(self, blocks):
        self.blocks = [frozenset(b) for b in blocks]


def maaf_exact(t1, t2, max_m=None):
    """Minimum component count of an acyclic agreement forest of the
    root-augmented trees; the rooted hybridization number is this value
    minus one.  With ``max_m`` the search stops after that many blocks
    and returns None (decision use)."""
    if t1.taxa() != t2.taxa():
        raise TaxonMismatch("trees carry different taxa")
    a1, a2 = _augment(t1), _augment(t2)
    d1, p1 = _depths(a1)
    d2, p2 = _depths(a2)
    elems = sorted(a1.taxa())

    def blocks_ok(blocks, spans1, spans2):
        for i in range(len(blocks)):
            for j in range(i + 1, len(blocks)):
                if spans1[i][0] & spans1[j][0] or spans2[i][0] & spans2[j][0]:
                    return False
        return True

    def acyclic_blocks(spans1, spans2):
        arcs = []
        for i in range(len(spans1)):
            for j in range(len(spans1)):
                if i == j:
                    continue
                if _proper_ancestor(d1, p1, spans1[i][1], spans1[j][1]) or \
                        _proper_ancestor(d2, p2, spans2[i][1], spans2[j][1]):
                    arcs.append((i, j))
        return _acyclic(arcs) if arcs else True

    def grow(idx, blocks, spans1, spans2, max_blocks):
        if idx == len(elems):
            if acyclic_blocks(spans1, spans2):
                return RootedForest(blocks)
            return None
        x = elems[idx]
        for i in range(len(blocks)):
            nb = blocks[i] | {x}
            if len(nb) >= 2 and canonical_rooted(_rooted_restrict(a1, nb)) \
                    != canonical_rooted(_rooted_restrict(a2, nb)):
                continue
            s1 = _steiner_nodes(a1, d1, p1, nb)
            s2 = _steiner_nodes(a2, d2, p2, nb)
            if any(s1[0] & spans1[j][0] for j in range(len(blocks))
                   if j != i) or \
                    any(s2[0] & spans2[j][0] for j in range(len(blocks))
                        if j != i):
                continue
            out = grow(idx + 1, blocks[:i] + [nb] + blocks[i + 1:],
                       spans1[:i] + [s1] + spans1[i + 1:],
                       spans2[:i] + [s2] + spans2[i + 1:], max_blocks)
            if out is not None:
                return out
        if len(blocks) < max_blocks:
            s1 = _steiner_nodes(a1, d1, p1, {x})
            s2 = _steiner_nodes(a2, d2, p2, {x})
            if not any(s1[0] & s[0] for s in spans1) and \
                    not any(s2[0] & s[0] for s in spans2):
                out = grow(idx + 1, blocks + [{x}], spans1 + [s1],
                           spans2 + [s2], max_blocks)
                if out is not None:
                    return out
        return None

    top = len(elems) if max_m is None else min(max_m, len(elems))
    for m in range(1, top + 1):
        found = grow(0, [], [], [], m)
        if found is not None:
            return len(found.blocks), found, (a1, d1, p1), (a2, d2, p2)
    if max_m is not None:
        return None
    raise InvalidStructure("no agreement forest found")  # unreachable


# ---------------------------------------------------------------------------
# wiring an acyclic forest into a network


class _RTracker:
    def __init__(self, g):
        self.g = g
        self.tracked = []

    def track(self, s):
        self.tracked.append(s)
        return s

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


def _copy_shape(g, shape):
    """Copy a rooted tree into g; returns (root node, edge ids)."""
    m = {}
    edges = set()
    for v in shape.out_inc:
        m[v] = g.new_node(shape.labels.get(v))
    for u, v in list(shape.edges.values()):
        edges.add(g.add_edge(m[u], m[v]))
    return m[shape.root], edges


def _below_taxa(g, img, eid, cache):
    if eid in cache:
        return cache[eid]
    head = g.edges[eid][1]
    out = set()
    if head in g.labels:
        out.add(g.labels[head])
    for e2 in g.out_inc[head]:
        if e2 in img:
            out |= _below_taxa(g, img, e2, cache)
    cache[eid] = out
    return out


def forest_to_network(t1, t2, forest, aug1, aug2):
    """Wire the blocks of an acyclic agreement forest into a rooted
    network with (block count - 1) reticulations displaying both trees."""
    (a1, d1, p1), (a2, d2, p2) = aug1, aug2
    blocks = sorted(forest.blocks, key=min)
    roots = [(_steiner_nodes(a1, d1, p1, b)[1],
              _steiner_nodes(a2, d2, p2, b)[1]) for b in blocks]
    # topological order: root block (with the augmentation leaf) first,
    # then respecting the ancestor relations in both trees
    idxs = list(range(len(blocks)))
    order = []
    placed = set()
    start = next(i for i in idxs if RHO in blocks[i])
    order.append(start)
    placed.add(start)
    while len(order) < len(blocks):
        progressed = False
        for i in sorted(set(idxs) - placed, key=lambda i: min(blocks[i])):
            ok = True
            for j in set(idxs) - placed - {i}:
                if _proper_ancestor(d1, p1, roots[j][0], roots[i][0]) or \
                        _proper_ancestor(d2, p2, roots[j][1], roots[i][1]):
                    ok = False
                    break
            if ok:
                order.append(i)
                placed.add(i)
                progressed = True
                break
        if not progressed:
            raise InvalidStructure("agreement forest is not acyclic")

    host = _RTracker(RGraph())
    g = host.g
    imgs = [host.track(set()), host.track(set())]
    attach_of = {}  # (tree index, subdivision node) -> attach node depth
    # place the root block
    first = blocks[order[0]]
    if len(first) == 1:
        root = g.new_node()
        leaf = g.new_node(RHO)
        eid = g.add_edge(root, leaf)
        g.root = root
        imgs[0].add(eid)
        imgs[1].add(eid)
    else:
        shape = _rooted_restrict(a1, first)
        g.root, edges = _copy_shape(g, shape)
        imgs[0] |= edges
        imgs[1] |= edges
    done = set(first)
    for oi in order[1:]:
        b = blocks[oi]
        ends = []
        for ti, (aug, dd, pp) in enumerate(((a1, d1, p1), (a2, d2, p2))):
            r_b = roots[oi][ti]
            # first proper ancestor with already-placed taxa below
            v = pp[r_b]
            dset = None
            while v is not None:
                dset = _subtree_taxa(aug, v) & done
                if dset:
                    break
                v = pp[v]
            if not dset:
                raise InvalidStructure("no attachment point for block")
            # edges of the current image whose below-set matches
            cache = {}
            img = imgs[ti]
            cands = [e for e in sorted(img)
                     if (_below_taxa(g, img, e, cache) & done) == dset]
            if not cands:
                raise InvalidStructure("attachment edge not found")
            # order candidates top to bottom along the path and insert
            # below every subdivision whose original hang point is a
            # strict ancestor of ours
            path = _order_path(g, cands)
            pos = 0
            for k in range(len(path)):
                top = g.edges[path[k]][0]
                info = attach_of.get((ti, top))
                if info is not None and dd[info] < dd[v]:
                    pos = k
            eid = path[pos]
            s, _, _ = host.subdivide(eid)
            attach_of[(ti, s)] = v
            ends.append(s)
        w = g.new_node()
        e1 = g.add_edge(ends[0], w)
        e2 = g.add_edge(ends[1], w)
        imgs[0].add(e1)
        imgs[1].add(e2)
        if len(b) == 1:
            leaf = g.new_node(next(iter(b)))
            eb = g.add_edge(w, leaf)
            block_edges = {eb}
        else:
            shape = _rooted_restrict(a1, b)
            broot, block_edges = _copy_shape(g, shape)
            block_edges.add(g.add_edge(w, broot))
        imgs[0] |= block_edges
        imgs[1] |= block_edges
        done |= b
    # strip the augmentation leaf and tidy
    del g.labels[g.leaf_of(RHO)]
    net = tidy_rooted(g)
    return validate_rooted(net)


def _subtree_taxa(t, v):
    out = set()
    stack = [v]
    while stack:
        x = stack.pop()
        if x in t.labels:
            out.add(t.labels[x])
        stack.extend(t.children(x))
    return out


def _order_path(g, edges):
    """Order a set of edges forming a directed path, top first."""
    heads = {g.edges[e][1] for e in edges}
    tops = [e for e in edges if g.edges[e][0] not in heads]
    if len(tops) != 1:
        return sorted(edges)
    path = [tops[0]]
    rest = set(edges) - {tops[0]}
    while rest:
        tail = g.edges[path[-1]][1]
        nxt = [e for e in rest if g.edges[e][0] == tail]
        if not nxt:
            return path + sorted(rest)
        path.append(nxt[0])
        rest.discard(nxt[0])
    return path


# ---------------------------------------------------------------------------
# solvers and oracles


@dataclass
class HnSolution:
    value: int
    network: RGraph
    images: list


def _check_all(net, trees):
    images = []
    for t in trees:
        img = rooted_tc(net, t)
        if img is None:
            return None
        images.append(img)
    return images


def _subdivide_rgraph(g, eid):
    u, v = g.edges[eid]
    g.remove_edge(eid)
    w = g.new_node()
    g.add_edge(u, w)
    g.add_edge(w, v)
    return w


def _one_more_reticulation(net):
    eids = sorted(net.edges)
    for e1 in eids:
        for e2 in eids:
            if e1 == e2:
                continue
            h = net.copy()
            s1 = _subdivide_rgraph(h, e1)
            s2 = _subdivide_rgraph(h, e2)
            h.add_edge(s1, s2)
            try:
                validate_rooted(h)
            except InvalidStructure:
                continue
            yield h
    for e2 in eids:
        h = net.copy()
        s2 = _subdivide_rgraph(h, e2)
        nr = h.new_node()
        h.add_edge(nr, h.root)
        h.add_edge(nr, s2)
        h.root = nr
        try:
            validate_rooted(h)
        except InvalidStructure:
            continue
        yield h


def hn_enum_oracle(trees, k_max, max_taxa=4, max_k=2):
    """Independent brute force: grow reticulation edges onto the first
    tree and test display of the others.  Tightly guarded."""
    if len(trees[0].taxa()) > max_taxa or k_max > max_k:
        raise GuardExceeded("hn_enum_oracle limited to %d taxa and k <= %d"
                            % (max_taxa, max_k))
    base = trees[0]
    level = [base]
    if _check_all(base, trees[1:]) is not None:
        return 0
    for k in range(1, k_max + 1):
        nxt = []
        for net in level:
            for h in _one_more_reticulation(net):
                if _check_all(h, trees[1:]) is not None:
                    return k
                nxt.append(h)
        level = nxt
    return None


def hn_exact(trees, k_max, max_taxa=6, max_k=3):
    """Smallest k <= k_max such that one rooted network with k
    reticulations displays every tree; returns an :class:`HnSolution`
    with re-verified certificates, or None."""
    taxa = trees[0].taxa()
    for t in trees[1:]:
        if t.taxa() != taxa:
            raise TaxonMismatch("trees carry different taxa")
    if len(taxa) > max_taxa:
        raise GuardExceeded("hn_exact limited to %d taxa, got %d"
                            % (max_taxa, len(taxa)))
    if k_max > max_k:
        raise GuardExceeded("hn_exact limited to k_max <= %d" % max_k)
    canon = {canonical_rooted(t) for t in trees}
    if len(canon) == 1:
        net = trees[0].copy()
        return HnSolution(0, net, _check_all(net, trees))
    if len(trees) == 2:
        found = maaf_exact(trees[0], trees[1], max_m=k_max + 1)
        if found is None:
            return None
        m, forest, aug1, aug2 = found
        value = m - 1
        net = forest_to_network(trees[0], trees[1], forest, aug1, aug2)
        images = _check_all(net, trees)
        if images is None or reticulation_number(net) != value:
            raise InvalidStructure("forest wiring failed verification")
        return HnSolution(value, net, images)
    # three or more trees: complete level-by-level search
    level = [trees[0].copy()]
    for k in range(1, k_max + 1):
        nxt = []
        for net in level:
            for h in _one_more_reticulation(net):
                images = _check_all(h, trees[1:])
                if images is not None:
                    full = _check_all(h, trees)
                    return HnSolution(k, h, full)
                nxt.append(h)
        level = nxt
    return None


def _one_more_unrooted(net):
    eids = sorted(net.edges)
    for e1, e2 in itertools.combinations(eids, 2):
        h = net.copy()
        a = h.subdivide(e1)
        b = h.subdivide(e2)
        h.add_edge(a, b)
        yield h


def uhn_exhaustive_oracle(trees, k_max, max_taxa=6, max_k=2):
    """Smallest k <= k_max such that some unrooted network with k
    reticulations displays every tree, by exhaustive construction from
    the first tree; None if no k <= k_max works."""
    taxa = trees[0].taxa()
    for t in trees[1:]:
        if t.taxa() != taxa:
            raise TaxonMismatch("trees carry different taxa")
    if len(taxa) > max_taxa or k_max > max_k:
        raise GuardExceeded("uhn_exhaustive_oracle limited to %d taxa and "
                            "k <= %d" % (max_taxa, max_k))

    def displays_all(net):
        for t in trees[1:]:
            if utc_oracle(net, t, max_edges=10 ** 6) is None:
                return False
        return True

    level = [trees[0].copy()]
    if len({canonical_unrooted(t) for t in trees}) == 1:
        return 0
    for k in range(1, k_max + 1):
        nxt = []
        for net in level:
            for h in _one_more_unrooted(net):
                if displays_all(h):
                    return k
                nxt.append(h)
        level = nxt
    return None
