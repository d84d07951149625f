"""Reduction rules and kernelization drivers.

Three rules shrink a collection of unrooted structures on a shared
taxon set:

* CPS clips a maximal common pendant subtree down to a fresh taxon,
* d-CC truncates a maximal common chain to its first d taxa,
* NC deletes an edge (or a taxon) next to a chain of the network in a
  two-structure network/tree instance.

Two drivers apply them: :func:`kernelize_utc` for a network/tree pair
and :func:`kernelize_ruhn` for a set of trees at parameter k.  Every
application is recorded in a replayable :class:`ReductionLog`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import (InvalidStructure, RESERVED_PREFIX, TaxonMismatch, UGraph,
                   canonical_unrooted, connected_components, fresh_taxon,
                   is_connected, labelled_isomorphic, normalize,
                   reticulation_number, restrict_to_taxa)


# ---------------------------------------------------------------------------
# pendant subtrees


@dataclass
class PendantSubtree:
    """A common pendant subtree: its taxa, the attachment edge per host
    and the canonical rooted shape seen from the attachment point.  An
    ``attachments`` of None marks the whole-instance convention for a
    collection of identical trees."""

    taxa: frozenset
    attachments: list | None   # one (edge id, outside node) per host
    shape: str                 # rooted newick of the clipped part


def _side_nodes(g, eid, start):
    """Nodes reachable from ``start`` without crossing edge ``eid``."""
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for e2, w in g.neighbors(v):
            if e2 == eid:
                continue
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def _pendant_sides(g):
    """All pendant-subtree candidates of g: maps frozenset of taxa to
    (edge id, inner endpoint, outer endpoint, side node set).  A side
    qualifies when it induces a tree carrying at least one taxon."""
    out = {}
    total = len(g.inc)
    for eid in sorted(g.edges):
        u, v = g.edges[eid]
        for inner, outer in ((u, v), (v, u)):
            side = _side_nodes(g, eid, inner)
            if len(side) == total:       # eid is on a cycle
                continue
            inner_edges = sum(1 for e2, (a, b) in g.edges.items()
                              if a in side and b in side and e2 != eid)
            if inner_edges != len(side) - 1:
                continue                 # side is not a tree
            taxa = frozenset(g.labels[w] for w in side if w in g.labels)
            if not taxa or len(taxa) != sum(1 for w in side if w in g.labels):
                continue
            if len(side) != 2 * len(taxa) - 1:
                continue                 # unlabelled leaves inside
            out.setdefault(taxa, (eid, inner, outer, side))
    return out


def _side_shape(g, eid, inner, side):
    """Canonical rooted form of a pendant side, rooted at its inner
    attachment endpoint."""
    def rec(v, banned):
        if v in g.labels:
            return g.labels[v]
        parts = sorted(rec(w, e2) for e2, w in g.neighbors(v) if e2 != banned)
        return "(" + ",".join(parts) + ")"

    if inner in g.labels:
        return g.labels[inner]
    return rec(inner, eid)


def find_common_pendant_subtree(structures):
    """A maximal common pendant subtree of the collection with at least
    two taxa, or None.  If all members are identical trees, the whole
    taxon set is returned (single-taxon collapse convention)."""
    taxa0 = structures[0].taxa()
    for s in structures[1:]:
        if s.taxa() != taxa0:
            raise TaxonMismatch("structures carry different taxa")
    if len(taxa0) >= 2 and all(reticulation_number(s) == 0
                               for s in structures):
        canon = {canonical_unrooted(s) for s in structures}
        if len(canon) == 1:
            return PendantSubtree(frozenset(taxa0), None, "")
    sides = [_pendant_sides(s) for s in structures]
    common = []
    for cand, (eid, inner, outer, side) in sides[0].items():
        if len(cand) < 2 or len(cand) == len(taxa0):
            continue
        shape = _side_shape(structures[0], eid, inner, side)
        atts = [(eid, outer)]
        ok = True
        for s, table in zip(structures[1:], sides[1:]):
            if cand not in table:
                ok = False
                break
            e2, in2, out2, side2 = table[cand]
            if _side_shape(s, e2, in2, side2) != shape:
                ok = False
                break
            atts.append((e2, out2))
        if ok:
            common.append(PendantSubtree(cand, atts, shape))
    if not common:
        return None
    maximal = [p for p in common
               if not any(p.taxa < q.taxa for q in common)]
    return min(maximal, key=lambda p: (min(p.taxa), sorted(p.taxa)))


def apply_cps(structures, p, existing=None):
    """Clip pendant subtree ``p`` from each member and hang a fresh
    taxon in its place.  Returns (new members, log step)."""
    existing = set(existing or set())
    for s in structures:
        existing |= s.taxa()
    x = fresh_taxon(existing)
    out = []
    if p.attachments is None:
        for s in structures:
            g = UGraph()
            g.new_node(x)
            out.append(g)
        return out, Step("cps", x=x, taxa=tuple(sorted(p.taxa)),
                         shape=p.shape)
    for s, (eid, outer) in zip(structures, p.attachments):
        g = s.copy()
        side = _side_nodes(g, eid, g.other_end(eid, outer))
        for v in side:
            g.remove_node(v)
        g.add_edge(outer, g.new_node(x))
        out.append(g)
    return out, Step("cps", x=x, taxa=tuple(sorted(p.taxa)), shape=p.shape)


# ---------------------------------------------------------------------------
# chains


@dataclass
class Chain:
    """An ordered taxon sequence whose parents form a path in every
    host it was found in."""

    taxa: tuple

    def __len__(self):
        return len(self.taxa)


def _parent_map(g):
    return {g.labels[v]: g.other_end(g.inc[v][0], v) for v in g.labels}


def _is_chain_in(g, seq, parents=None):
    """Is seq a chain of g: parents p1..pt form a path, with p1 = p2 or
    p_{t-1} = p_t tolerated at the ends."""
    p = parents or _parent_map(g)
    ps = [p[x] for x in seq]
    t = len(ps)
    path = [ps[0]]
    for i in range(t - 1):
        if ps[i] == ps[i + 1]:
            if i != 0 and i != t - 2:
                return False
        else:
            path.append(ps[i + 1])
    if len(set(path)) != len(path):
        return False
    for a, b in zip(path, path[1:]):
        if g.find_edge(a, b) is None:
            return False
    return True


def _orient(seq):
    return seq if seq[0] <= seq[-1] else tuple(reversed(seq))


def find_maximal_chain(structures, min_len=2):
    """The longest common chain of the collection (ties broken towards
    the lexicographically smallest taxon), or None."""
    parents = [_parent_map(s) for s in structures]
    taxa = sorted(structures[0].taxa())

    def consec(x, y):
        for s, p in zip(structures, parents):
            if p[x] != p[y] and s.find_edge(p[x], p[y]) is None:
                return False
        return True

    link = {x: [y for y in taxa if y != x and consec(x, y)] for x in taxa}
    best = None

    def consider(seq):
        nonlocal best
        if len(seq) < min_len:
            return
        for s, p in zip(structures, parents):
            if not _is_chain_in(s, seq, p):
                return
        cand = _orient(tuple(seq))
        key = (-len(cand), min(cand), cand)
        if best is None or key < (-len(best), min(best), best):
            best = cand

    def extend(seq, used):
        grew = False
        for y in link[seq[-1]]:
            if y not in used:
                ok = True
                for s, p in zip(structures, parents):
                    if not _is_chain_in(s, seq + [y], p):
                        ok = False
                        break
                if ok:
                    grew = True
                    used.add(y)
                    extend(seq + [y], used)
                    used.remove(y)
        if not grew:
            consider(seq)

    for x in taxa:
        extend([x], {x})
    return Chain(best) if best else None


def apply_dcc(structures, d):
    """Common d-chain reduction: truncate the maximal common chain of
    length > d to its first d taxa.  Returns (new members, step) or
    None when no qualifying chain exists."""
    if d < 2:
        raise ValueError("chain truncation needs d >= 2")
    chain = find_maximal_chain(structures, min_len=d + 1)
    if chain is None or len(chain) <= d:
        return None
    kept, removed = chain.taxa[:d], chain.taxa[d:]
    out = []
    for s in structures:
        g = s.copy()
        for x in removed:
            del g.labels[g.leaf_of(x)]
        normalize(g)
        out.append(g)
    return out, Step("cc", d=d, kept=kept, removed=removed)


# ---------------------------------------------------------------------------
# network chain rule


def _has_pendant_on(t, taxaset):
    """Does tree t have a pendant subtree on exactly this taxon set?"""
    taxaset = frozenset(taxaset)
    for eid in t.edges:
        for start in t.edges[eid]:
            side = _side_nodes(t, eid, start)
            if frozenset(t.labels[w] for w in side
                         if w in t.labels) == taxaset:
                return True
    return False


def _chain_edge(n, parents, x, y):
    eid = n.find_edge(parents[x], parents[y])
    if eid is None:
        raise InvalidStructure("chain parents of %s and %s not adjacent"
                               % (x, y))
    return eid


def _outer_edge(n, parents, x, x_next):
    """The edge at the parent of end-taxon x that leads neither to x nor
    along the chain."""
    p = parents[x]
    skip = {n.inc[n.leaf_of(x)][0]}
    if parents[x_next] != p:
        skip.add(_chain_edge(n, parents, x, x_next))
    else:
        # cherry end: the outer edge is the one not going to either leaf
        skip.add(n.inc[n.leaf_of(x_next)][0])
    for eid in n.inc[p]:
        if eid not in skip:
            return eid
    raise InvalidStructure("no outer edge at the parent of %s" % x)


@dataclass
class NCOutcome:
    case: int
    network: UGraph | None
    tree: UGraph | None
    decided: bool | None
    step: "Step"


def apply_nc(n, t, chain=None):
    """Network chain reduction on a network/tree pair.

    Uses the maximal chain of the network (length >= 3) unless one is
    given.  Returns an :class:`NCOutcome`, or None when the network has
    no chain of length 3.  A ``decided`` of False means the instance
    was recognized as a NO instance.
    """
    if chain is None:
        found = find_maximal_chain([n], min_len=3)
        if found is None:
            return None
        chain = found.taxa
    chain = tuple(chain)
    tcount = len(chain)
    if tcount < 3:
        return None
    parents = _parent_map(n)

    def no(case, why):
        return NCOutcome(case, None, None, False,
                         Step("nc", case=case, chain=chain, deleted=why))

    def cut(case, eid):
        n2 = n.copy()
        n2.remove_edge(eid)
        if not is_connected(n2):
            return no(case, "disconnecting-edge")
        normalize(n2)
        return NCOutcome(case, n2, t.copy(), None,
                         Step("nc", case=case, chain=chain,
                              deleted="edge:%d" % eid))

    if tcount >= 7:
        return no(1, "chain-too-long")
    x = dict(enumerate(chain, start=1))
    if tcount == 6:
        return cut(2, _chain_edge(n, parents, x[3], x[4]))
    if tcount == 5:
        if _is_chain_in(t, (x[1], x[2], x[3])):
            return cut(3, _chain_edge(n, parents, x[3], x[4]))
        return cut(3, _chain_edge(n, parents, x[2], x[3]))
    if tcount == 4:
        if _is_chain_in(t, (x[1], x[2], x[3])):
            return cut(4, _chain_edge(n, parents, x[3], x[4]))
        if _is_chain_in(t, (x[2], x[3], x[4])):
            return cut(4, _chain_edge(n, parents, x[1], x[2]))
        return cut(4, _chain_edge(n, parents, x[2], x[3]))
    # tcount == 3
    tp = _parent_map(t)
    if _has_pendant_on(t, chain):
        if tp[x[1]] == tp[x[2]]:
            return cut(5, _outer_edge(n, parents, x[1], x[2]))
        return cut(5, _outer_edge(n, parents, x[3], x[2]))
    if _has_pendant_on(t, (x[1], x[2])):
        return cut(6, _chain_edge(n, parents, x[2], x[3]))
    if _has_pendant_on(t, (x[2], x[3])):
        return cut(7, _chain_edge(n, parents, x[1], x[2]))
    if _is_chain_in(t, chain):
        n2, t2 = n.copy(), t.copy()
        for g in (n2, t2):
            del g.labels[g.leaf_of(x[3])]
        normalize(n2)
        normalize(t2)
        return NCOutcome(8, n2, t2, None,
                         Step("nc", case=8, chain=chain,
                              deleted="taxon:%s" % x[3]))
    # the chain is neither a chain of the tree nor splittable into
    # pendant pieces matching the tree, so no image can exist
    return no(0, "chain-unmatched")


# ---------------------------------------------------------------------------
# reduction log


@dataclass
class Step:
    """One reduction step; serializes to a single line."""

    kind: str
    data: dict = field(default_factory=dict)

    def __init__(self, kind, **data):
        self.kind = kind
        self.data = data

    def __getattr__(self, name):
        data = object.__getattribute__(self, "__dict__").get("data", {})
        if name in data:
            return data[name]
        raise AttributeError(name)

    def line(self):
        parts = [self.kind]
        for key, val in self.data.items():
            if isinstance(val, (tuple, list, frozenset)):
                val = ",".join(str(v) for v in val)
            parts.append("%s=%s" % (key, val))
        return " ".join(parts)

    @staticmethod
    def parse(line):
        bits = line.split()
        kind = bits[0]
        data = {}
        for bit in bits[1:]:
            key, _, val = bit.partition("=")
            if key in ("taxa", "kept", "removed", "chain"):
                data[key] = tuple(val.split(","))
            elif key in ("d", "case"):
                data[key] = int(val)
            else:
                data[key] = val
        return Step(kind, **data)


@dataclass
class ReductionLog:
    steps: list = field(default_factory=list)

    def add(self, step):
        self.steps.append(step)

    def serialize(self):
        return "\n".join(s.line() for s in self.steps) + "\n" \
            if self.steps else ""

    @staticmethod
    def parse(text):
        log = ReductionLog()
        for line in text.splitlines():
            line = line.strip()
            if line:
                log.add(Step.parse(line))
        return log

    def replay(self, structures):
        """Re-apply the recorded rules to a fresh copy of the inputs;
        returns the reduced members (decisions are not re-taken)."""
        cur = [s.copy() for s in structures]
        for step in self.steps:
            if step.kind == "cps":
                taxa = frozenset(step.data["taxa"])
                p = find_common_pendant_subtree(cur)
                if p is None or p.taxa != taxa:
                    raise InvalidStructure("replay: CPS step diverged")
                cur, _ = apply_cps(cur, p)
            elif step.kind == "cc":
                removed = step.data["removed"]
                nxt = []
                for g in cur:
                    g = g.copy()
                    for xx in removed:
                        del g.labels[g.leaf_of(xx)]
                    normalize(g)
                    nxt.append(g)
                cur = nxt
            elif step.kind == "nc":
                out = apply_nc(cur[0], cur[1], chain=step.data["chain"])
                if out is None or out.case != step.data["case"]:
                    raise InvalidStructure("replay: NC step diverged")
                if out.decided is None:
                    cur = [out.network, out.tree]
            elif step.kind in ("prune", "decided"):
                pass
        return cur


# ---------------------------------------------------------------------------
# kernelization drivers


@dataclass
class KernelResult:
    """Reduced instance plus the log; ``decided`` is set when the rules
    already determined the answer (the network/tree fields then hold a
    matching trivial instance)."""

    network: UGraph
    tree: UGraph
    log: ReductionLog
    decided: bool | None = None


def _quartet(a, b, c, d):
    g = UGraph()
    u, v = g.new_node(), g.new_node()
    g.add_edge(u, v)
    for w, x in ((u, a), (u, b), (v, c), (v, d)):
        g.add_edge(w, g.new_node(x))
    return g


def trivial_instance(answer):
    """A fixed 4-taxon, 5-edge network/tree pair that is a YES (or NO)
    instance, for emitting decided kernels."""
    names = ["%st%d" % (RESERVED_PREFIX, i) for i in range(1, 5)]
    n = _quartet(*names)
    if answer:
        return n, _quartet(*names)
    return n, _quartet(names[0], names[2], names[1], names[3])


def _prune_taxon_free_components(n, log):
    """Delete cut-edge components of the network without taxa."""
    g = n.copy()
    changed = True
    while changed:
        changed = False
        for eid in sorted(g.edges):
            u, v = g.edges[eid]
            side = _side_nodes(g, eid, u)
            if len(side) == len(g.inc):
                continue
            other = set(g.inc) - side
            for part, anchor in ((side, v), (other, u)):
                if not any(w in g.labels for w in part):
                    for w in part:
                        g.remove_node(w)
                    normalize(g)
                    log.add(Step("prune", size=len(part)))
                    changed = True
                    break
            if changed:
                break
    return g


def kernelize_utc(n, t):
    """Kernel for the display question on a network/tree pair.

    Applies taxon-free pruning, CPS, 3-CC and NC to a fixed point.  The
    result's network has reticulation number k with at most max(6k, 4)
    taxa and max(15k, 5) edges; a decided instance is replaced by the
    matching trivial instance.
    """
    if n.taxa() != t.taxa():
        raise TaxonMismatch("network and tree carry different taxa")
    log = ReductionLog()

    def decide(answer, why):
        log.add(Step("decided", answer="YES" if answer else "NO", why=why))
        tn, tt = trivial_instance(answer)
        return KernelResult(tn, tt, log, answer)

    cur_n, cur_t = n.copy(), t.copy()
    while True:
        if len(cur_n.taxa()) <= 3:
            return decide(True, "few-taxa")
        cur_n = _prune_taxon_free_components(cur_n, log)
        if reticulation_number(cur_n) == 0:
            return decide(labelled_isomorphic(cur_n, cur_t), "tree-vs-tree")
        p = find_common_pendant_subtree([cur_n, cur_t])
        if p is not None:
            (cur_n, cur_t), step = apply_cps([cur_n, cur_t], p)
            log.add(step)
            continue
        ntaxa = len(cur_n.taxa())
        if any(2 <= len(s) < ntaxa for s in _pendant_sides(cur_n)):
            return decide(False, "uncommon-pendant-subtree")
        red = apply_dcc([cur_n, cur_t], 3)
        if red is not None:
            (cur_n, cur_t), step = red
            log.add(step)
            continue
        out = apply_nc(cur_n, cur_t)
        if out is not None:
            log.add(out.step)
            if out.decided is not None:
                return decide(out.decided, "nc-case-%d" % out.case)
            cur_n, cur_t = out.network, out.tree
            continue
        return KernelResult(cur_n, cur_t, log, None)


@dataclass
class RuhnKernel:
    trees: list
    log: ReductionLog
    decided: bool | None = None


def kernelize_ruhn(trees, k):
    """Kernel for the root-uncertain question at parameter k: CPS and
    5k-CC to exhaustion, then the taxon-count rejection test."""
    taxa0 = trees[0].taxa()
    for s in trees[1:]:
        if s.taxa() != taxa0:
            raise TaxonMismatch("trees carry different taxa")
    log = ReductionLog()
    cur = [s.copy() for s in trees]
    while True:
        p = find_common_pendant_subtree(cur)
        if p is not None:
            if p.attachments is None:
                cur, step = apply_cps(cur, p)
                log.add(step)
                log.add(Step("decided", answer="YES", why="identical-trees"))
                return RuhnKernel(cur, log, True)
            cur, step = apply_cps(cur, p)
            log.add(step)
            continue
        if k >= 1:
            red = apply_dcc(cur, 5 * k)
            if red is not None:
                cur, step = red
                log.add(step)
                continue
        break
    if k == 0:
        canon = {canonical_unrooted(s) for s in cur}
        answer = len(canon) == 1
        log.add(Step("decided", answer="YES" if answer else "NO",
                     why="identity-at-k0"))
        return RuhnKernel(cur, log, answer)
    if len(cur[0].taxa()) >= 20 * k * k:
        log.add(Step("decided", answer="NO", why="taxa-bound"))
        return RuhnKernel(cur, log, False)
    return RuhnKernel(cur, log, None)
