"""Parsing and serialization.

Trees use plain Newick.  Rooted networks use extended Newick with
``#Hk`` hybrid tags.  Unrooted networks use a line-oriented edge-list
format (Newick cannot express undirected cycles):

    unrooted-network
    n1 n2
    leaf n3 taxonname

Whitespace is insignificant inside Newick strings, ``[...]`` comments
are skipped, and taxa must match ``[A-Za-z0-9_.-]+``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .core import (InvalidStructure, PhyloError, RESERVED_PREFIX, RGraph,
                   UGraph, canonical_unrooted, normalize,
                   reticulation_number, validate_rooted, validate_unrooted)

TAXON_RE = re.compile(r"[A-Za-z0-9_.\-]+")


class ParseError(PhyloError):
    def __init__(self, message, pos=None):
        if pos is not None:
            message = "%s (at position %d)" % (message, pos)
        super().__init__(message)
        self.pos = pos


def _check_taxon(name, pos, seen, allow_reserved=False):
    if not TAXON_RE.fullmatch(name):
        raise ParseError("invalid taxon name %r" % name, pos)
    if name.startswith(RESERVED_PREFIX) and not allow_reserved:
        raise ParseError("taxon %r uses the reserved prefix %r"
                         % (name, RESERVED_PREFIX), pos)
    if name in seen:
        raise ParseError("duplicate taxon %r" % name, pos)
    seen.add(name)


class _Scanner:
    def __init__(self, text):
        self.text = text
        self.i = 0
        self._skip()

    def _skip(self):
        t, i = self.text, self.i
        while i < len(t):
            if t[i].isspace():
                i += 1
            elif t[i] == "[":
                j = t.find("]", i)
                if j < 0:
                    raise ParseError("unterminated comment", i)
                i = j + 1
            else:
                break
        self.i = i

    def peek(self):
        return self.text[self.i] if self.i < len(self.text) else ""

    def take(self, ch):
        if self.peek() != ch:
            raise ParseError("expected %r, found %r" % (ch, self.peek() or "end"),
                             self.i)
        self.i += 1
        self._skip()

    def name(self):
        m = re.compile(r"[A-Za-z0-9_.\-#]+").match(self.text, self.i)
        if not m:
            raise ParseError("expected a name", self.i)
        self.i = m.end()
        self._skip()
        return m.group(0)

    def done(self):
        return self.i >= len(self.text)


def _parse_clades(sc):
    """Parse a parenthesized group; returns a nested structure of lists
    and (name, pos) leaves."""
    if sc.peek() == "(":
        pos = sc.i
        sc.take("(")
        kids = [_parse_clades(sc)]
        while sc.peek() == ",":
            sc.take(",")
            kids.append(_parse_clades(sc))
        sc.take(")")
        tag = None
        if sc.peek() == "#":
            tag = sc.name()
        return ("clade", kids, tag, pos)
    pos = sc.i
    return ("leaf", sc.name(), pos)


def parse_tree(text, mode):
    """Parse a single Newick record into a tree.

    ``mode='unrooted'`` requires a top-level trifurcation (or a 2-taxon
    ``(a,b);``); ``mode='rooted'`` requires bifurcations throughout.
    """
    sc = _Scanner(text)
    top = _parse_clades(sc)
    if sc.peek() == ";":
        sc.take(";")
    if not sc.done():
        raise ParseError("trailing characters", sc.i)
    seen = set()

    if mode == "rooted":
        g = RGraph()

        def build(node):
            if node[0] == "leaf":
                _check_taxon(node[1], node[2], seen)
                return g.new_node(node[1])
            _, kids, tag, pos = node
            if tag is not None:
                raise ParseError("hybrid tag in a tree", pos)
            if len(kids) != 2:
                raise ParseError("rooted trees must be bifurcating", pos)
            v = g.new_node()
            for k in kids:
                g.add_edge(v, build(k))
            return v

        g.root = build(top)
        if top[0] == "leaf":
            raise ParseError("a rooted tree needs at least two taxa", 0)
        return validate_rooted(g, as_tree=True)

    if mode != "unrooted":
        raise ValueError("mode must be 'rooted' or 'unrooted'")

    g = UGraph()

    def build_u(node, parent):
        if node[0] == "leaf":
            _check_taxon(node[1], node[2], seen)
            v = g.new_node(node[1])
        else:
            _, kids, tag, pos = node
            if tag is not None:
                raise ParseError("hybrid tag in a tree", pos)
            if len(kids) != 2:
                raise ParseError("internal nodes must be bifurcating", pos)
            v = g.new_node()
            for k in kids:
                build_u(k, v)
        if parent is not None:
            g.add_edge(parent, v)
        return v

    if top[0] == "leaf":
        _check_taxon(top[1], top[2], seen)
        g.new_node(top[1])
        return g
    _, kids, tag, pos = top
    if tag is not None:
        raise ParseError("hybrid tag in a tree", pos)
    if len(kids) == 2 and all(k[0] == "leaf" for k in kids):
        for k in kids:
            build_u(k, None)
        g.add_edge(0, 1)
        return validate_unrooted(g, as_tree=True)
    if len(kids) != 3:
        raise ParseError(
            "unrooted trees need a top-level trifurcation", pos)
    center = g.new_node()
    for k in kids:
        build_u(k, center)
    return validate_unrooted(g, as_tree=True)


# -- writing trees


def _rooted_parts(g, v):
    if v in g.labels:
        return g.labels[v], g.labels[v]
    parts = sorted(_rooted_parts(g, c) for c in g.children(v))
    key = min(p[0] for p in parts)
    return key, "(" + ",".join(p[1] for p in parts) + ")"


def write_tree(t):
    """Canonical Newick: children ordered by minimal descendant taxon.
    Unrooted trees are written around the neighbour of the smallest
    taxon's leaf, giving a top-level trifurcation."""
    if isinstance(t, RGraph):
        return _rooted_parts(t, t.root)[1] + ";"
    if len(t.inc) == 1:
        return next(iter(t.labels.values())) + ";"
    if len(t.inc) == 2:
        a, b = sorted(t.labels.values())
        return "(%s,%s);" % (a, b)
    start = t.leaf_of(min(t.labels.values()))

    def parts(v, come_from):
        if v in t.labels:
            return t.labels[v], t.labels[v]
        ps = sorted(parts(w, v) for _, w in t.neighbors(v) if w != come_from)
        return min(p[0] for p in ps), "(" + ",".join(p[1] for p in ps) + ")"

    center = next(w for _, w in t.neighbors(start))
    ps = sorted([parts(w, center) for _, w in t.neighbors(center)
                 if w != start] + [(t.labels[start], t.labels[start])])
    return "(" + ",".join(p[1] for p in ps) + ");"


# -- networks


def parse_network(text, mode):
    """Parse a network: extended Newick (rooted) or edge list (unrooted)."""
    if mode == "unrooted":
        return _parse_edge_list(text)
    if mode != "rooted":
        raise ValueError("mode must be 'rooted' or 'unrooted'")
    sc = _Scanner(text)
    top = _parse_clades(sc)
    if sc.peek() == ";":
        sc.take(";")
    if not sc.done():
        raise ParseError("trailing characters", sc.i)
    g = RGraph()
    seen = set()
    hybrids = {}

    def build(node):
        if node[0] == "leaf":
            name, pos = node[1], node[2]
            if name.startswith("#"):
                if name not in hybrids:
                    hybrids[name] = g.new_node()
                return hybrids[name]
            _check_taxon(name, pos, seen)
            return g.new_node(name)
        _, kids, tag, pos = node
        if len(kids) not in (1, 2):
            raise ParseError("network nodes must have 1 or 2 children", pos)
        if tag is not None:
            if tag not in hybrids:
                hybrids[tag] = g.new_node()
            v = hybrids[tag]
        else:
            if len(kids) != 2:
                raise ParseError("only hybrid nodes may be unary", pos)
            v = g.new_node()
        for k in kids:
            g.add_edge(v, build(k))
        return v

    if top[0] == "leaf":
        raise ParseError("a network needs internal structure", 0)
    g.root = build(top)
    return validate_rooted(g)


def _parse_edge_list(text):
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or lines[0] != "unrooted-network":
        raise ParseError("expected 'unrooted-network' header")
    g = UGraph()
    names = {}
    seen = set()

    def node_for(name):
        if name not in names:
            names[name] = g.new_node()
        return names[name]

    for lineno, ln in enumerate(lines[1:], start=2):
        parts = ln.split()
        if parts[0] == "leaf":
            if len(parts) != 3:
                raise ParseError("bad leaf line %d: %r" % (lineno, ln))
            _check_taxon(parts[2], None, seen)
            u = node_for(parts[1])
            v = g.new_node(parts[2])
            g.add_edge(u, v)
        elif len(parts) == 2:
            g.add_edge(node_for(parts[0]), node_for(parts[1]))
        else:
            raise ParseError("bad edge line %d: %r" % (lineno, ln))
    return validate_unrooted(g)


def write_network(n):
    """Serialize a network; inverse of :func:`parse_network`."""
    if isinstance(n, UGraph):
        inner = sorted(v for v in n.inc if v not in n.labels)
        order = {v: "v%d" % i for i, v in enumerate(inner)}
        lines = ["unrooted-network"]
        leaf_lines = []
        for eid in sorted(n.edges):
            u, v = n.edges[eid]
            if u in n.labels or v in n.labels:
                leaf, other = (u, v) if u in n.labels else (v, u)
                leaf_lines.append("leaf %s %s" % (order[other], n.labels[leaf]))
            else:
                lines.append("%s %s" % (order[u], order[v]))
        lines += sorted(leaf_lines)
        return "\n".join(lines) + "\n"

    # rooted: extended Newick; each reticulation is written in full at its
    # first occurrence and as a bare tag afterwards.  Children are ordered
    # by a fully expanded canonical string so the output does not depend
    # on internal storage order.
    full = {}

    def expand(v):
        if v not in full:
            if v in n.labels:
                full[v] = n.labels[v]
            else:
                full[v] = "(" + ",".join(
                    sorted(expand(c) for c in n.children(v))) + ")"
        return full[v]

    expand(n.root)
    order = sorted(n.out_inc, key=lambda v: full[v])
    tags = {}
    for v in order:
        if len(n.in_inc[v]) == 2:
            tags[v] = "#H%d" % (len(tags) + 1)
    emitted = set()

    def rec(v):
        if v in n.labels:
            return n.labels[v]
        tag = tags.get(v)
        if tag is not None and v in emitted:
            return tag
        if tag is not None:
            emitted.add(v)
        kids = sorted(n.children(v), key=lambda c: full[c])
        txt = "(" + ",".join(rec(c) for c in kids) + ")"
        if tag is not None:
            txt += tag
        return txt

    return rec(n.root) + ";"


# -- documents


@dataclass
class NewickDocument:
    """An ordered list of named records, ';'-separated on disk."""

    entries: list = field(default_factory=list)  # (name, object)

    @staticmethod
    def parse(text, mode, kind="tree"):
        doc = NewickDocument()
        chunks = [c.strip() for c in text.split(";")]
        chunks = [c for c in chunks if c]
        parse = parse_tree if kind == "tree" else parse_network
        for i, chunk in enumerate(chunks):
            doc.entries.append(("t%d" % (i + 1), parse(chunk + ";", mode)))
        return doc

    def write(self):
        return "\n".join(write_tree(obj) if not isinstance(obj, UGraph)
                         or reticulation_number(obj) == 0
                         else write_network(obj)
                         for _, obj in self.entries) + "\n"


# -- DOT export


def export_dot(x, image=None):
    """GraphViz DOT text for a tree or network; edges on ``image`` (an
    :class:`Image`) are highlighted."""
    hi = image.host_edges if image is not None else frozenset()
    out = []
    if isinstance(x, RGraph):
        out.append("digraph phylo {")
        out.append('  rankdir=TB; node [shape=point];')
        for v in sorted(x.out_inc):
            if v in x.labels:
                out.append('  n%d [shape=plaintext, label="%s"];'
                           % (v, x.labels[v]))
            else:
                out.append("  n%d;" % v)
        for eid in sorted(x.edges):
            u, v = x.edges[eid]
            attr = " [color=red, penwidth=2]" if eid in hi else ""
            out.append("  n%d -> n%d%s;" % (u, v, attr))
    else:
        out.append("graph phylo {")
        out.append("  node [shape=point];")
        for v in sorted(x.inc):
            if v in x.labels:
                out.append('  n%d [shape=plaintext, label="%s"];'
                           % (v, x.labels[v]))
            else:
                out.append("  n%d;" % v)
        for eid in sorted(x.edges):
            u, v = x.edges[eid]
            attr = " [color=red, penwidth=2]" if eid in hi else ""
            out.append("  n%d -- n%d%s;" % (u, v, attr))
    out.append("}")
    return "\n".join(out) + "\n"
