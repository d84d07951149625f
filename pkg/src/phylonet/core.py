"""Graph model for binary phylogenetic trees and networks.

Unrooted structures are connected undirected multigraphs whose labelled
nodes have degree 1 and whose unlabelled nodes have degree 3.  Rooted
structures are DAGs with a single root (indegree 0, outdegree 2), tree
nodes (1 in, 2 out), reticulations (2 in, 1 out) and labelled leaves
(1 in, 0 out).  Parallel edges and loops are tolerated in intermediate
states only; ``normalize`` removes them.

All public operations are pure: they copy their input and return fresh
objects.  Node and edge ids are small ints, stable under copy, so that
an :class:`Image` can reference host edges across operations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

#: Prefix reserved for taxa invented by reduction rules.  Input parsers
#: reject user taxa that start with this prefix.
RESERVED_PREFIX = "_k"


class PhyloError(Exception):
    """Base class for all errors raised by this package."""


class InvalidStructure(PhyloError):
    """A graph violates the structural requirements of its type."""


class TaxonMismatch(PhyloError):
    """Two structures that should share a taxon set do not."""


class GuardExceeded(PhyloError):
    """An exact enumeration was asked to run beyond its size guard."""


# ---------------------------------------------------------------------------
# multigraphs


class UGraph:
    """Undirected multigraph with optional leaf labels.

    ``edges`` maps edge id -> (u, v) with u <= v; ``inc`` maps node ->
    list of incident edge ids (a loop appears twice).  ``labels`` maps a
    node to its taxon name.
    """

    __slots__ = ("edges", "inc", "labels", "_next_node", "_next_edge")

    def __init__(self):
        self.edges = {}
        self.inc = {}
        self.labels = {}
        self._next_node = 0
        self._next_edge = 0

    # -- construction

    def new_node(self, label=None):
        v = self._next_node
        self._next_node += 1
        self.inc[v] = []
        if label is not None:
            self.labels[v] = label
        return v

    def add_edge(self, u, v):
        eid = self._next_edge
        self._next_edge += 1
        self.edges[eid] = (u, v) if u <= v else (v, u)
        self.inc[u].append(eid)
        if u != v:
            self.inc[v].append(eid)
        else:
            self.inc[u].append(eid)
        return eid

    def remove_edge(self, eid):
        u, v = self.edges.pop(eid)
        self.inc[u].remove(eid)
        if u != v:
            self.inc[v].remove(eid)
        else:
            self.inc[u].remove(eid)

    def remove_node(self, v):
        for eid in list(self.inc[v]):
            if eid in self.edges:
                self.remove_edge(eid)
        del self.inc[v]
        self.labels.pop(v, None)

    def copy(self):
        g = UGraph.__new__(UGraph)
        g.edges = dict(self.edges)
        g.inc = {v: list(es) for v, es in self.inc.items()}
        g.labels = dict(self.labels)
        g._next_node = self._next_node
        g._next_edge = self._next_edge
        return g

    # -- queries

    @property
    def nodes(self):
        return self.inc.keys()

    def degree(self, v):
        return len(self.inc[v])

    def neighbors(self, v):
        """Yield (eid, other endpoint) pairs; a loop yields (eid, v) twice."""
        for eid in self.inc[v]:
            a, b = self.edges[eid]
            yield eid, b if a == v else a

    def endpoints(self, eid):
        return self.edges[eid]

    def other_end(self, eid, v):
        a, b = self.edges[eid]
        return b if a == v else a

    def taxa(self):
        return set(self.labels.values())

    def leaf_of(self, taxon):
        for v, lab in self.labels.items():
            if lab == taxon:
                return v
        raise KeyError(taxon)

    def find_edge(self, u, v):
        """Return the id of some edge between u and v, or None."""
        if u > v:
            u, v = v, u
        for eid in self.inc[u]:
            if self.edges[eid] == (u, v):
                return eid
        return None

    def subdivide(self, eid):
        """Replace edge eid by a path of length 2; return the new node."""
        u, v = self.edges[eid]
        self.remove_edge(eid)
        w = self.new_node()
        self.add_edge(u, w)
        self.add_edge(w, v)
        return w

    def __repr__(self):
        return "UGraph(n=%d, m=%d, taxa=%s)" % (
            len(self.inc), len(self.edges), sorted(self.labels.values()))


class RGraph:
    """Directed multigraph with a designated root and leaf labels."""

    __slots__ = ("edges", "out_inc", "in_inc", "labels", "root",
                 "_next_node", "_next_edge")

    def __init__(self):
        self.edges = {}       # eid -> (tail, head)
        self.out_inc = {}
        self.in_inc = {}
        self.labels = {}
        self.root = None
        self._next_node = 0
        self._next_edge = 0

    def new_node(self, label=None):
        v = self._next_node
        self._next_node += 1
        self.out_inc[v] = []
        self.in_inc[v] = []
        if label is not None:
            self.labels[v] = label
        return v

    def add_edge(self, u, v):
        eid = self._next_edge
        self._next_edge += 1
        self.edges[eid] = (u, v)
        self.out_inc[u].append(eid)
        self.in_inc[v].append(eid)
        return eid

    def remove_edge(self, eid):
        u, v = self.edges.pop(eid)
        self.out_inc[u].remove(eid)
        self.in_inc[v].remove(eid)

    def remove_node(self, v):
        for eid in list(self.out_inc[v]) + list(self.in_inc[v]):
            if eid in self.edges:
                self.remove_edge(eid)
        del self.out_inc[v]
        del self.in_inc[v]
        self.labels.pop(v, None)

    def copy(self):
        g = RGraph.__new__(RGraph)
        g.edges = dict(self.edges)
        g.out_inc = {v: list(es) for v, es in self.out_inc.items()}
        g.in_inc = {v: list(es) for v, es in self.in_inc.items()}
        g.labels = dict(self.labels)
        g.root = self.root
        g._next_node = self._next_node
        g._next_edge = self._next_edge
        return g

    @property
    def nodes(self):
        return self.out_inc.keys()

    def outdeg(self, v):
        return len(self.out_inc[v])

    def indeg(self, v):
        return len(self.in_inc[v])

    def children(self, v):
        return [self.edges[eid][1] for eid in self.out_inc[v]]

    def parents(self, v):
        return [self.edges[eid][0] for eid in self.in_inc[v]]

    def taxa(self):
        return set(self.labels.values())

    def leaf_of(self, taxon):
        for v, lab in self.labels.items():
            if lab == taxon:
                return v
        raise KeyError(taxon)

    def reticulations(self):
        return [v for v in self.in_inc if len(self.in_inc[v]) == 2]

    def __repr__(self):
        return "RGraph(n=%d, m=%d, taxa=%s)" % (
            len(self.out_inc), len(self.edges), sorted(self.labels.values()))


@dataclass(frozen=True)
class Image:
    """An embedding certificate: the host edges forming a subtree whose
    degree-2 suppression yields the guest tree."""

    host_edges: frozenset
    host_nodes: frozenset
    leaf_map: tuple  # sorted tuple of (taxon, host node)

    def leaf_dict(self):
        return dict(self.leaf_map)


def make_image(host, edge_ids):
    edge_ids = frozenset(edge_ids)
    nodes = set()
    for eid in edge_ids:
        u, v = host.edges[eid]
        nodes.add(u)
        nodes.add(v)
    if not edge_ids:
        nodes = set(host.labels)
    leaf_map = tuple(sorted((lab, v) for v, lab in host.labels.items()
                            if v in nodes))
    return Image(edge_ids, frozenset(nodes), leaf_map)


# ---------------------------------------------------------------------------
# basic structural operations


def reticulation_number(g):
    """|E| - (|V| - 1) for either orientation of graph."""
    if isinstance(g, RGraph):
        n = len(g.out_inc)
    else:
        n = len(g.inc)
    return len(g.edges) - (n - 1)


def connected_components(g):
    seen = set()
    comps = []
    for start in g.inc:
        if start in seen:
            continue
        comp = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for _, w in g.neighbors(v):
                if w not in comp:
                    comp.add(w)
                    stack.append(w)
        seen |= comp
        comps.append(comp)
    return comps


def is_connected(g):
    return len(connected_components(g)) <= 1


def normalize(g):
    """In place: drop loops and collapse parallel edge pairs, then tidy.

    A loop can never lie on an image, and of a parallel pair an image
    uses at most one edge, so both removals preserve display answers.
    """
    changed = True
    while changed:
        changed = _tidy_pass_unrooted(g)
        for eid in list(g.edges):
            if eid not in g.edges:
                continue
            u, v = g.edges[eid]
            if u == v:
                g.remove_edge(eid)
                changed = True
        seen = {}
        for eid in list(g.edges):
            if eid not in g.edges:
                continue
            pair = g.edges[eid]
            if pair in seen:
                g.remove_edge(eid)
                changed = True
            else:
                seen[pair] = eid
    return g


def _tidy_pass_unrooted(g):
    """One fixpoint run of degree-2 suppression and unlabelled-leaf
    deletion; returns True if anything changed."""
    changed_any = False
    work = True
    while work:
        work = False
        for v in list(g.inc):
            if v not in g.inc:
                continue
            if v in g.labels:
                continue
            d = len(g.inc[v])
            if d == 0:
                g.remove_node(v)
                work = changed_any = True
            elif d == 1:
                g.remove_node(v)
                work = changed_any = True
            elif d == 2:
                e1, e2 = g.inc[v]
                if e1 == e2:
                    continue  # loop; handled by normalize
                a = g.other_end(e1, v)
                b = g.other_end(e2, v)
                g.remove_node(v)
                g.add_edge(a, b)
                work = changed_any = True
    return changed_any


def tidy_unrooted(g):
    """Copy of g with unlabelled degree-<=1 nodes deleted and degree-2
    nodes suppressed, iterated to a fixed point (loops and parallel
    pairs are removed as well)."""
    h = g.copy()
    normalize(h)
    return h


def tidy_rooted(g):
    """Copy of g cleaned up to a valid rooted structure: reticulations
    with outdegree 0 deleted, in-1/out-1 nodes suppressed, unlabelled
    leaves deleted, in-0/out-1 nodes deleted, parallel arcs collapsed."""
    h = g.copy()
    work = True
    while work:
        work = False
        for v in list(h.out_inc):
            if v not in h.out_inc:
                continue
            ind, outd = len(h.in_inc[v]), len(h.out_inc[v])
            if v in h.labels:
                if ind == 0 and outd == 0 and len(h.out_inc) > 1:
                    continue
                if outd == 0:
                    continue
            if outd == 0:
                h.remove_node(v)
                work = True
            elif ind == 1 and outd == 1:
                p = h.edges[h.in_inc[v][0]][0]
                c = h.edges[h.out_inc[v][0]][1]
                h.remove_node(v)
                h.add_edge(p, c)
                work = True
            elif ind == 0 and outd == 1:
                h.remove_node(v)
                work = True
        seen = {}
        for eid in list(h.edges):
            pair = h.edges[eid]
            if pair in seen:
                h.remove_edge(eid)
                work = True
            else:
                seen[pair] = eid
    roots = [v for v in h.out_inc if len(h.in_inc[v]) == 0]
    h.root = roots[0] if len(roots) == 1 else None
    return h


def tidy(g, mode):
    """Public tidy operation; ``mode`` is 'rooted' or 'unrooted'."""
    if mode == "rooted":
        return tidy_rooted(g)
    if mode == "unrooted":
        return tidy_unrooted(g)
    raise ValueError("mode must be 'rooted' or 'unrooted'")


# ---------------------------------------------------------------------------
# validation


def validate_unrooted(g, as_tree=False):
    if len(g.inc) == 0:
        raise InvalidStructure("empty graph")
    if len(g.inc) == 1:
        v = next(iter(g.inc))
        if v not in g.labels:
            raise InvalidStructure("single node must be labelled")
        return g
    if not is_connected(g):
        raise InvalidStructure("graph is not connected")
    for eid, (u, v) in g.edges.items():
        if u == v:
            raise InvalidStructure("loop at node %d" % u)
    seen = {}
    for eid, pair in g.edges.items():
        if pair in seen:
            raise InvalidStructure("parallel edges between %d and %d" % pair)
        seen[pair] = eid
    labs = set()
    for v in g.inc:
        d = len(g.inc[v])
        if v in g.labels:
            if d != 1:
                raise InvalidStructure("labelled node %d has degree %d" % (v, d))
            if g.labels[v] in labs:
                raise InvalidStructure("duplicate taxon %r" % g.labels[v])
            labs.add(g.labels[v])
        else:
            if d != 3:
                raise InvalidStructure(
                    "unlabelled node %d has degree %d" % (v, d))
    r = reticulation_number(g)
    if r < 0:
        raise InvalidStructure("negative reticulation number")
    if as_tree and r != 0:
        raise InvalidStructure("expected a tree, reticulation number %d" % r)
    return g


def validate_rooted(g, as_tree=False):
    if g.root is None:
        raise InvalidStructure("no root set")
    labs = set()
    for v in g.out_inc:
        ind, outd = len(g.in_inc[v]), len(g.out_inc[v])
        if v == g.root:
            if (ind, outd) != (0, 2):
                raise InvalidStructure("root must have indegree 0 outdegree 2")
        elif v in g.labels:
            if (ind, outd) != (1, 0):
                raise InvalidStructure(
                    "leaf %r must have indegree 1 outdegree 0" % g.labels[v])
            if g.labels[v] in labs:
                raise InvalidStructure("duplicate taxon %r" % g.labels[v])
            labs.add(g.labels[v])
        elif (ind, outd) not in ((1, 2), (2, 1)):
            raise InvalidStructure(
                "internal node %d has degrees (%d,%d)" % (v, ind, outd))
    # acyclicity by Kahn's algorithm
    indeg = {v: len(g.in_inc[v]) for v in g.out_inc}
    queue = [v for v, d in indeg.items() if d == 0]
    count = 0
    while queue:
        v = queue.pop()
        count += 1
        for c in g.children(v):
            indeg[c] -= 1
            if indeg[c] == 0:
                queue.append(c)
    if count != len(g.out_inc):
        raise InvalidStructure("directed cycle present")
    if as_tree and reticulation_number(g) != 0:
        raise InvalidStructure("expected a tree")
    return g


def is_unrooted_tree(g):
    return reticulation_number(g) == 0


# ---------------------------------------------------------------------------
# canonical forms and isomorphism


def canonical_rooted(g, root=None):
    """Canonical newick-like string of a rooted tree; children sorted."""
    if root is None:
        root = g.root

    def rec(v):
        if v in g.labels:
            return g.labels[v]
        parts = sorted(rec(c) for c in g.children(v))
        return "(" + ",".join(parts) + ")"

    return rec(root)


def canonical_unrooted(g):
    """Canonical string of an unrooted tree with labelled leaves.

    The tree is traversed away from the leaf carrying the smallest
    taxon, which makes the form deterministic without any rooting step.
    """
    if len(g.inc) == 1:
        return next(iter(g.labels.values()))
    start_tax = min(g.labels.values())
    start = g.leaf_of(start_tax)

    def rec(v, come_from):
        if v in g.labels:
            return g.labels[v]
        parts = sorted(rec(w, v) for _, w in g.neighbors(v) if w != come_from)
        return "(" + ",".join(parts) + ")"

    nb = next(w for _, w in g.neighbors(start))
    return start_tax + "|" + rec(nb, start)


def labelled_isomorphic(a, b):
    """Leaf-label-preserving isomorphism test for trees (either both
    rooted or both unrooted)."""
    if a.taxa() != b.taxa():
        raise TaxonMismatch("taxon sets differ: %s vs %s"
                            % (sorted(a.taxa()), sorted(b.taxa())))
    if isinstance(a, RGraph) != isinstance(b, RGraph):
        raise TaxonMismatch("cannot compare rooted with unrooted")
    if isinstance(a, RGraph):
        return canonical_rooted(a) == canonical_rooted(b)
    return canonical_unrooted(a) == canonical_unrooted(b)


# ---------------------------------------------------------------------------
# tree surgery


def restrict_to_taxa(t, taxa):
    """The minimal spanning subtree of ``taxa`` with degree-2 nodes
    suppressed.  A single-taxon restriction is one labelled node."""
    taxa = set(taxa)
    if not taxa:
        raise ValueError("restriction taxon set is empty")
    missing = taxa - t.taxa()
    if missing:
        raise TaxonMismatch("unknown taxa: %s" % sorted(missing))
    h = t.copy()
    for v in list(h.labels):
        if h.labels[v] not in taxa:
            del h.labels[v]
    normalize(h)
    return h


def root_at_edge(t, edge):
    """Root an unrooted tree by subdividing ``edge`` (an edge id or a
    (u, v) pair) and directing everything away from the new node."""
    if isinstance(edge, tuple):
        eid = t.find_edge(*edge)
        if eid is None:
            raise ValueError("no edge %s in tree" % (edge,))
    else:
        eid = edge
        if eid not in t.edges:
            raise ValueError("no edge id %s in tree" % (edge,))
    u, v = t.edges[eid]
    r = RGraph()
    mapping = {}
    for w in t.inc:
        mapping[w] = r.new_node(t.labels.get(w))
    root = r.new_node()
    r.root = root
    r.add_edge(root, mapping[u])
    r.add_edge(root, mapping[v])
    # orient remaining edges by BFS from the two subtree tops
    seen = {u, v}
    queue = [u, v]
    while queue:
        w = queue.pop()
        for e2, x in t.neighbors(w):
            if e2 == eid or x in seen:
                continue
            seen.add(x)
            r.add_edge(mapping[w], mapping[x])
            queue.append(x)
    return r


def unroot(rt):
    """Forget directions and suppress the root of a rooted tree."""
    g = UGraph()
    mapping = {}
    for v in rt.out_inc:
        mapping[v] = g.new_node(rt.labels.get(v))
    for (u, v) in rt.edges.values():
        g.add_edge(mapping[u], mapping[v])
    normalize(g)
    return g


def caterpillar(taxa):
    """Unrooted caterpillar (x1, ..., xn): a central path with cherries
    at both ends; n >= 4."""
    taxa = list(taxa)
    n = len(taxa)
    if n < 4:
        raise ValueError("unrooted caterpillar needs at least 4 taxa")
    g = UGraph()
    leaves = [g.new_node(x) for x in taxa]
    spine = [g.new_node() for _ in range(n - 2)]  # p_2 .. p_{n-1}
    for a, b in zip(spine, spine[1:]):
        g.add_edge(a, b)
    g.add_edge(leaves[0], spine[0])
    g.add_edge(leaves[1], spine[0])
    for i in range(2, n - 2):
        g.add_edge(leaves[i], spine[i - 1])
    g.add_edge(leaves[n - 2], spine[-1])
    g.add_edge(leaves[n - 1], spine[-1])
    return g


def rooted_caterpillar(taxa):
    """Rooted caterpillar: root above x1 on the caterpillar spine."""
    taxa = list(taxa)
    if len(taxa) < 2:
        raise ValueError("rooted caterpillar needs at least 2 taxa")
    r = RGraph()
    cur = r.new_node(taxa[-1])
    for x in reversed(taxa[:-1]):
        v = r.new_node()
        r.add_edge(v, r.new_node(x))
        r.add_edge(v, cur)
        cur = v
    r.root = cur
    return r


def fresh_taxon(existing, counter=itertools.count(1)):
    """A new reserved-namespace taxon name not colliding with ``existing``."""
    while True:
        name = "%s%d" % (RESERVED_PREFIX, next(counter))
        if name not in existing:
            return name
