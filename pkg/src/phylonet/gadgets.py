"""Constructive reductions used as instance generators.

Three constructions:

* :func:`ndp_to_utc` turns a node-disjoint-paths instance into an
  unrooted tree-containment instance (after normalizing terminals with
  the three splitting gadgets),
* :func:`hn_to_ruhn` turns a rooted two-tree instance into an unrooted
  pair whose root-uncertain value is exactly one higher,
* :func:`backmap_restriction` recovers a rooted network on the original
  taxa from a solution of the transformed instance.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

from .core import (InvalidStructure, RGraph, TaxonMismatch, UGraph,
                   caterpillar, reticulation_number, tidy_rooted,
                   validate_rooted, validate_unrooted)
from .newick import parse_tree
from .reduce import trivial_instance


# ---------------------------------------------------------------------------
# node-disjoint paths instances


@dataclass
class NdpInstance:
    """An undirected multigraph with a multiset of terminal pairs."""

    edges: list                 # list of (u, v) node-name pairs
    pairs: list                 # list of (s, t) node-name pairs, s != t

    def nodes(self):
        out = set()
        for u, v in self.edges:
            out.add(u)
            out.add(v)
        for s, t in self.pairs:
            out.add(s)
            out.add(t)
        return out

    def serialize(self):
        lines = ["graph %s %s" % (u, v) for u, v in self.edges]
        lines += ["pair %s %s" % (s, t) for s, t in self.pairs]
        return "\n".join(lines) + "\n"

    @staticmethod
    def parse(text):
        edges, pairs = [], []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            bits = line.split()
            if bits[0] == "graph" and len(bits) == 3:
                edges.append((bits[1], bits[2]))
            elif bits[0] == "pair" and len(bits) == 3:
                pairs.append((bits[1], bits[2]))
            else:
                raise InvalidStructure("bad instance line: %r" % line)
        return NdpInstance(edges, pairs)

    def validate(self):
        for s, t in self.pairs:
            if s == t:
                raise InvalidStructure("pair with identical endpoints %s"
                                       % s)
        deg = {}
        for u, v in self.edges:
            deg[u] = deg.get(u, 0) + 1
            deg[v] = deg.get(v, 0) + 1
        if any(d > 3 for d in deg.values()):
            raise InvalidStructure("normalization handles maximum degree 3 "
                                   "only")
        return self


def ndp_oracle(inst, max_nodes=10):
    """Brute-force decision: do mutually node-disjoint paths exist, one
    per pair?  Paths may meet only at terminals shared between pairs,
    and only as endpoints; edges are never reused."""
    if len(inst.nodes()) > max_nodes:
        raise InvalidStructure("oracle limited to %d nodes" % max_nodes)
    adj = {}
    for eid, (u, v) in enumerate(inst.edges):
        adj.setdefault(u, []).append((eid, v))
        adj.setdefault(v, []).append((eid, u))

    def place(i, internal_used, endpoint_used, edges_used):
        if i == len(inst.pairs):
            return True
        s, t = inst.pairs[i]
        if s in internal_used or t in internal_used:
            return False

        def walk(v, path, path_edges):
            if v == t:
                return place(i + 1, internal_used | set(path[1:-1]),
                             endpoint_used | {s, t},
                             edges_used | path_edges)
            for eid, w in sorted(adj.get(v, ())):
                if eid in edges_used or eid in path_edges:
                    continue
                if w in path or w in internal_used:
                    continue
                # an already-used endpoint may be revisited only as
                # this path's own endpoint
                if w in endpoint_used and w != t:
                    continue
                if walk(w, path + [w], path_edges | {eid}):
                    return True
            return False

        return walk(s, [s], frozenset())

    return place(0, set(), set(), frozenset())


# ---------------------------------------------------------------------------
# terminal-splitting gadgets


class _MGraph:
    """Minimal undirected multigraph on named nodes."""

    def __init__(self, edges=()):
        self.adj = {}
        self.eid = 0
        self.edges = {}
        for u, v in edges:
            self.add(u, v)

    def add(self, u, v):
        e = self.eid
        self.eid += 1
        self.edges[e] = (u, v)
        self.adj.setdefault(u, []).append(e)
        self.adj.setdefault(v, []).append(e)
        return e

    def remove_edge(self, e):
        u, v = self.edges.pop(e)
        self.adj[u].remove(e)
        self.adj[v].remove(e)

    def remove_node(self, v):
        for e in list(self.adj.get(v, ())):
            self.remove_edge(e)
        self.adj.pop(v, None)

    def other(self, e, v):
        a, b = self.edges[e]
        return b if a == v else a

    def degree(self, v):
        return len(self.adj.get(v, ()))


def _gadget_edges(kind, fresh):
    """Edge list of one splitting gadget on freshly named nodes.
    Returns (edges, external slots, terminal slots)."""
    f = fresh
    if kind == 3:
        A, B, C, D, E, F, G, H, I, J, K, L, M, N, O, P = (f() for _ in
                                                          range(16))
        si, sj, sk = f(), f(), f()
        edges = [(A, B), (B, C), (B, D), (C, E), (D, F), (E, G), (F, H),
                 (F, G), (E, H), (H, I), (A, J), (I, K), (J, L), (I, L),
                 (J, K), (L, M), (G, N), (M, O), (N, P), (N, O), (M, P),
                 (P, si), (O, sj), (K, sk)]
        return edges, [A, C, D], [si, sj, sk], []
    if kind == 2:
        W, A, B, C, D, E, F = (f() for _ in range(7))
        si, sj = f(), f()
        edges = [(W, A), (W, B), (A, C), (B, D), (C, E), (D, F), (D, E),
                 (C, F), (E, si), (F, sj)]
        return edges, [W, A, B], [si, sj], []
    # kind == 1: reroute one external through a guard pair {p, q}
    G, W, Q, R, A, B, C, D, E, F = (f() for _ in range(10))
    p, q = f(), f()
    si = f()
    edges = [(G, W), (G, Q), (Q, R), (Q, q), (W, A), (W, B), (B, R),
             (A, C), (B, D), (C, E), (D, F), (D, E), (C, F), (E, si),
             (F, p)]
    return edges, [G, A, R], [si], [(p, q)]


def _normalize(inst):
    """Apply the splitting gadgets so that every terminal has degree 1
    and is in exactly one pair; then clean low-degree non-terminals."""
    g = _MGraph(inst.edges)
    for v in inst.nodes():
        g.adj.setdefault(v, [])
    pairs = [list(p) for p in inst.pairs]
    counter = itertools.count()

    def fresh():
        return "_g%d" % next(counter)

    by_count = {1: [], 2: [], 3: []}
    counts = {}
    for s, t in pairs:
        counts[s] = counts.get(s, 0) + 1
        counts[t] = counts.get(t, 0) + 1
    for v, c in counts.items():
        by_count[c].append(v)

    for kind in (3, 2, 1):
        for v in sorted(by_count[kind]):
            if kind == 1 and g.degree(v) <= 1:
                continue        # already a compliant terminal
            slots = [(i, side) for i, pr in enumerate(pairs)
                     for side in (0, 1) if pr[side] == v]
            slots.sort(key=lambda iv: (pairs[iv[0]][1 - iv[1]], iv[0]))
            edges, externals, terminals, extra = _gadget_edges(kind, fresh)
            ext = sorted(g.adj.get(v, ()))
            if len(ext) > 3:
                raise InvalidStructure("terminal %s has degree > 3" % v)
            hooks = [(e, g.other(e, v)) for e in ext]
            g.remove_node(v)
            for u, w in edges:
                g.add(u, w)
            for (e, nbr), slot in zip(hooks, externals):
                g.add(nbr, slot)
            for (i, side), leaf in zip(slots, terminals):
                pairs[i][side] = leaf
            for p, q in extra:
                pairs.append([p, q])

    terminals = {x for pr in pairs for x in pr}
    # low-degree cleanup on non-terminals
    work = True
    while work:
        work = False
        for v in list(g.adj):
            if v in terminals:
                continue
            d = g.degree(v)
            if d == 0 or d == 1:
                g.remove_node(v)
                work = True
            elif d == 2:
                e1, e2 = g.adj[v]
                a, b = g.other(e1, v), g.other(e2, v)
                g.remove_node(v)
                if a != b:
                    g.add(a, b)
                work = True
    # drop components without terminals
    comp = {}
    for v in g.adj:
        if v in comp:
            continue
        stack, seen = [v], {v}
        while stack:
            x = stack.pop()
            for e in g.adj[x]:
                w = g.other(e, x)
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        keep = bool(seen & terminals)
        for w in seen:
            comp[w] = keep
    for v in [v for v, keep in comp.items() if not keep]:
        g.remove_node(v)
    for v in g.adj:
        d = g.degree(v)
        if v not in terminals and d != 3:
            raise InvalidStructure("normalization left node %s with "
                                   "degree %d" % (v, d))
    return g, [tuple(p) for p in pairs]


def ndp_to_utc(inst):
    """Build the tree-containment instance: an unrooted tree T and
    network N such that N displays T exactly when the normalized
    disjoint-paths instance is solvable.  A terminal in more than three
    pairs makes the input trivially unsolvable; a fixed NO instance is
    returned in that case."""
    inst.validate()
    counts = {}
    for s, t in inst.pairs:
        counts[s] = counts.get(s, 0) + 1
        counts[t] = counts.get(t, 0) + 1
    if any(c > 3 for c in counts.values()):
        return trivial_instance(False)
    deg = {}
    for u, v in inst.edges:
        deg[u] = deg.get(u, 0) + 1
        deg[v] = deg.get(v, 0) + 1
    if any(deg.get(v, 0) == 0 for v in counts):
        return trivial_instance(False)   # isolated terminal: no path
    g, pairs = _normalize(inst)
    # a terminal cut off from its partner makes the instance a NO; the
    # construction below needs every pair inside one component
    comp = {}
    for v in g.adj:
        if v in comp:
            continue
        stack, seen = [v], {v}
        while stack:
            x = stack.pop()
            for e in g.adj[x]:
                w = g.other(e, x)
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        for w in seen:
            comp[w] = v
    for a, b in pairs:
        if g.degree(a) != 1 or g.degree(b) != 1 \
                or comp.get(a) != comp.get(b):
            return trivial_instance(False)
    k = len(pairs)
    names = {}
    for i, (a, b) in enumerate(pairs, start=1):
        lo, hi = sorted((a, b))
        names[lo] = "s%d" % i
        names[hi] = "t%d" % i

    # the tree: a caterpillar of cherries with rho at the s_1 end
    if k == 1:
        tree = parse_tree("(rho,s1,t1);", mode="unrooted")
    else:
        inner = "(s%d,t%d)" % (k, k)
        for i in range(k - 1, 1, -1):
            inner = "((s%d,t%d),%s)" % (i, i, inner)
        tree = parse_tree("(rho,(s1,t1),%s);" % inner, mode="unrooted")

    # the network: the normalized graph with the same spine on top; the
    # s_i stubs of the spine dive into the graph where s_i attached
    net = UGraph()
    node = {}
    for v in sorted(g.adj):
        node[v] = net.new_node()
    for e in sorted(g.edges):
        u, v = g.edges[e]
        net.add_edge(node[u], node[v])
    s_nodes, t_nodes = {}, {}
    for i, (a, b) in enumerate(pairs, start=1):
        lo, hi = sorted((a, b))
        s_nodes[i], t_nodes[i] = lo, hi
    for i in range(1, k + 1):
        net.labels[node[t_nodes[i]]] = "t%d" % i
    us = {}
    for i in range(1, k + 1):
        sv = node[s_nodes[i]]
        hook = net.edges[net.inc[sv][0]]
        nbr = hook[1] if hook[0] == sv else hook[0]
        net.remove_node(sv)
        u = net.new_node()
        net.add_edge(u, nbr)
        net.add_edge(u, net.new_node("s%d" % i))
        us[i] = u
    if k == 1:
        net.add_edge(us[1], net.new_node("rho"))
    else:
        spine = [net.new_node() for _ in range(k - 1)]
        net.add_edge(spine[0], net.new_node("rho"))
        net.add_edge(spine[0], us[1])
        for j in range(1, k - 1):
            net.add_edge(spine[j - 1], spine[j])
            net.add_edge(spine[j], us[j + 1])
        net.add_edge(spine[-1], us[k])
    # a parallel pair of the normalized graph becomes a theta: subdivide
    # both copies and join the two new nodes (display-equivalent, keeps
    # the network simple and cubic)
    seen = {}
    for eid in sorted(net.edges):
        pair = net.edges[eid]
        if pair in seen:
            w1 = net.subdivide(seen.pop(pair))
            w2 = net.subdivide(eid)
            net.add_edge(w1, w2)
        else:
            seen[pair] = eid
    return validate_unrooted(net), tree


# ---------------------------------------------------------------------------
# rooted-to-root-uncertain transformation


_CD_RE = re.compile(r"^[cd]\d+$")


def _undirected_with_root(g, host, attach):
    """Copy a rooted tree into an unrooted host, joining its root node
    to ``attach``."""
    m = {}
    for v in g.out_inc:
        m[v] = host.new_node(g.labels.get(v))
    for a, b in g.edges.values():
        host.add_edge(m[a], m[b])
    host.add_edge(attach, m[g.root])


def hn_to_ruhn(t1, t2, caterpillar_len="n+1"):
    """Two unrooted trees whose root-uncertain hybridization number is
    the rooted hybridization number of the inputs plus one.  Each input
    is glued under a fresh caterpillar; the c-part of the second tree's
    caterpillar is reversed."""
    X = t1.taxa()
    if t2.taxa() != X:
        raise TaxonMismatch("trees carry different taxa")
    n = len(X)
    if any(_CD_RE.match(x) for x in X):
        raise InvalidStructure("taxa collide with reserved c/d names")
    if caterpillar_len not in ("n+1", "2n+3"):
        raise ValueError("caterpillar_len must be 'n+1' or '2n+3'")
    clen = n + 1 if caterpillar_len == "n+1" else 2 * n + 3
    cs = ["c%d" % i for i in range(clen)]
    ds = ["d%d" % i for i in range(clen)]
    out = []
    for t, cseq in ((t1, cs), (t2, list(reversed(cs)))):
        host = caterpillar(cseq + ds)
        leaf = host.leaf_of(ds[-1])
        u = host.subdivide(host.inc[leaf][0])
        _undirected_with_root(t, host, u)
        out.append(validate_unrooted(host))
    return out[0], out[1]


def merged_network(t1, t2):
    """The trivial rooted network displaying both trees: glue them at
    the taxa under a fresh root (one reticulation per taxon)."""
    net = t1.copy()
    m = {}
    for v in t2.out_inc:
        if v in t2.labels:
            m[v] = net.leaf_of(t2.labels[v])
        else:
            m[v] = net.new_node()
    for a, b in t2.edges.values():
        net.add_edge(m[a], m[b])
    for x in sorted(t1.taxa()):
        old = net.leaf_of(x)
        del net.labels[old]
        net.add_edge(old, net.new_node(x))
    root = net.new_node()
    net.add_edge(root, net.root)
    net.add_edge(root, m[t2.root])
    net.root = root
    return validate_rooted(net)


def stupid_rooting(r1, r2, clen):
    """Did the rootings leave the two caterpillars oppositely oriented?
    Compares the c-part orientations (root distance of c0 versus the
    last c-taxon) of the two rooted trees; a sensible pair induces the
    c-taxa in the same root-to-leaf order in both."""

    def depth(t, x):
        d = 0
        v = t.leaf_of(x)
        while t.in_inc[v]:
            v = t.edges[t.in_inc[v][0]][0]
            d += 1
        return d

    o1 = depth(r1, "c0") - depth(r1, "c%d" % (clen - 1))
    o2 = depth(r2, "c0") - depth(r2, "c%d" % (clen - 1))
    return o1 * o2 < 0


def _below_set(net, edges, eid, cache):
    if eid in cache:
        return cache[eid]
    head = net.edges[eid][1]
    out = set()
    if head in net.labels:
        out.add(net.labels[head])
    for e2 in net.out_inc[head]:
        if e2 in edges:
            out |= _below_set(net, edges, e2, cache)
    cache[eid] = out
    return out


def backmap_restriction(np, img1, img2):
    """Restrict a network displaying sensible rootings of the
    transformed trees to the part displaying the original trees.

    The certificate images locate the originals: keep exactly the image
    edges whose taxa below form a non-trivial subset of the original
    taxa, take the union, and repair degrees.  The result has strictly
    fewer reticulations than the input."""
    X = {x for x in np.taxa() if not _CD_RE.match(x)}
    if len(X) < 2:
        raise InvalidStructure("nothing to restrict to")
    keep = set()
    for img in (img1, img2):
        edges = set(img.host_edges)
        cache = {}
        for eid in edges:
            below = _below_set(np, edges, eid, cache) & X
            if below and below != X:
                keep.add(eid)
    sub = RGraph()
    m = {}
    for eid in keep:
        for v in np.edges[eid]:
            if v not in m:
                m[v] = sub.new_node(np.labels.get(v))
    for eid in sorted(keep):
        u, v = np.edges[eid]
        sub.add_edge(m[u], m[v])
    roots = sorted(v for v in sub.out_inc if not sub.in_inc[v])
    if not roots:
        raise InvalidStructure("images do not cover the original taxa")
    while len(roots) > 1:
        r = sub.new_node()
        sub.add_edge(r, roots[0])
        sub.add_edge(r, roots[1])
        roots = [r] + roots[2:]
    sub.root = roots[0]
    out = validate_rooted(tidy_rooted(sub))
    p, q = reticulation_number(out), reticulation_number(np)
    if p >= q:
        raise InvalidStructure("restriction did not drop a reticulation "
                               "(p=%d, q=%d)" % (p, q))
    return out
