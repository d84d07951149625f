"""Batch command-line front end.

Exit codes: 0 = YES / solved, 1 = NO / optimum exceeds the bound,
2 = usage or parse error, 3 = a guard was exceeded.  Guards can be
overridden with the environment variables PHYLONET_GUARD_MAX_TAXA,
PHYLONET_GUARD_MAX_K and PHYLONET_GUARD_ORACLE_EDGES.  ``--threads``
only caps worker concurrency (the solvers are sequential); it never
changes the output bytes.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
from dataclasses import dataclass, field

from .core import GuardExceeded, PhyloError, reticulation_number
from .gadgets import NdpInstance, hn_to_ruhn, ndp_to_utc
from .hn import hn_exact
from .newick import (NewickDocument, ParseError, export_dot, parse_network,
                     parse_tree, write_network, write_tree)
from .randgen import rand_ndp
from .reduce import kernelize_ruhn, kernelize_utc
from .ruhn import _root_at_split, ruhn_exact
from .uhn import uhn_solve
from .utc import rooted_tc, utc_find_image, utc_oracle, utc_solve, \
    verify_image

EXIT_YES = 0
EXIT_NO = 1
EXIT_USAGE = 2
EXIT_GUARD = 3


@dataclass
class CliConfig:
    subcommand: str
    inputs: dict = field(default_factory=dict)      # role -> path
    max_taxa: int = 6
    max_k: int = 3
    oracle_edges: int = 24
    output_format: str = "text"                     # text | dot | log
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.max_taxa <= 0 or self.max_k < 0 or self.oracle_edges <= 0:
            raise ValueError("guards must be positive")


def _env_int(name, default):
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(EXIT_USAGE)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write("error: %s\n" % message)
        raise SystemExit(EXIT_USAGE)


def _build_parser():
    p = _Parser(prog="phylonet", description=__doc__)
    sub = p.add_subparsers(dest="cmd")

    def add(name, **kw):
        sp = sub.add_parser(name, **kw)
        sp.add_argument("--threads", type=int, default=1)
        return sp

    sp = add("utc", help="does an unrooted network display a tree?")
    sp.add_argument("--network", required=True)
    sp.add_argument("--tree", required=True)
    sp.add_argument("--no-kernel", action="store_true")

    sp = add("uhn", help="unrooted hybridization number of two trees")
    sp.add_argument("--trees", required=True)

    sp = add("hn", help="rooted hybridization number")
    sp.add_argument("--trees", required=True)
    sp.add_argument("--kmax", type=int, default=3)

    sp = add("ruhn", help="root-uncertain hybridization number")
    sp.add_argument("--trees", required=True)
    sp.add_argument("--kmax", type=int, default=3)

    sp = add("kernelize", help="print the reduced instance and its log")
    sp.add_argument("--network")
    sp.add_argument("--tree")
    sp.add_argument("--trees")
    sp.add_argument("--k", type=int, default=1)

    sp = add("oracle", help="brute-force containment check")
    sp.add_argument("--network", required=True)
    sp.add_argument("--tree", required=True)

    sp = add("gen-ndp", help="random disjoint-paths instance")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--max-nodes", type=int, default=8)
    sp.add_argument("--busy", action="store_true",
                    help="allow multi-pair / high-degree terminals")
    sp.add_argument("--emit-utc", action="store_true",
                    help="also print the reduced containment instance")

    sp = add("gen-lemma4", help="transform two rooted trees")
    sp.add_argument("--trees", required=True)
    sp.add_argument("--caterpillar-len", choices=["n+1", "2n+3"],
                    default="n+1")

    sp = add("export-dot", help="GraphViz output")
    sp.add_argument("--network")
    sp.add_argument("--tree")
    sp.add_argument("--rooted", action="store_true")

    sp = add("selftest", help="run the acceptance suite")
    sp.add_argument("--only", default=None,
                    help="comma-separated criterion numbers")
    return p


def _read(path):
    try:
        with open(path) as f:
            return f.read()
    except OSError as exc:
        sys.stderr.write("error: %s\n" % exc)
        raise SystemExit(EXIT_USAGE)


def _load_trees(path, mode):
    doc = NewickDocument.parse(_read(path), mode)
    return [obj for _, obj in doc.entries]


def _print_image(img):
    print("image %s" % " ".join(str(e) for e in sorted(img.host_edges)))


def _cmd_utc(ns):
    net = parse_network(_read(ns.network), mode="unrooted")
    tree = parse_tree(_read(ns.tree), mode="unrooted")
    if ns.no_kernel:
        ok = utc_solve(net, tree, use_kernel=False)
    else:
        ok = utc_solve(net, tree)
    if not ok:
        print("NO")
        return EXIT_NO
    img = utc_find_image(net, tree)
    assert img is not None and verify_image(net, tree, img)
    print("YES")
    _print_image(img)
    return EXIT_YES


def _cmd_uhn(ns):
    trees = _load_trees(ns.trees, "unrooted")
    if len(trees) != 2:
        sys.stderr.write("error: need exactly two trees\n")
        return EXIT_USAGE
    value, net, i1, i2 = uhn_solve(trees[0], trees[1])
    assert verify_image(net, trees[0], i1) and \
        verify_image(net, trees[1], i2)
    print("h_u = %d" % value)
    print(write_network(net))
    _print_image(i1)
    _print_image(i2)
    return EXIT_YES


def _cmd_hn(ns, cfg):
    trees = _load_trees(ns.trees, "rooted")
    sol = hn_exact(trees, ns.kmax, max_taxa=cfg.max_taxa, max_k=cfg.max_k)
    if sol is None:
        print("NO (no solution with k <= %d)" % ns.kmax)
        return EXIT_NO
    for t in trees:
        assert rooted_tc(sol.network, t) is not None
    print("h_r = %d" % sol.value)
    print(write_network(sol.network))
    for img in sol.images:
        _print_image(img)
    return EXIT_YES


def _cmd_ruhn(ns, cfg):
    trees = _load_trees(ns.trees, "unrooted")
    sol = ruhn_exact(trees, ns.kmax, max_taxa=cfg.max_taxa,
                     max_k=cfg.max_k)
    if sol is None:
        print("NO (no solution with k <= %d)" % ns.kmax)
        return EXIT_NO
    for i, t in enumerate(trees):
        rt = _root_at_split(t, sol.rootings[i])
        assert rooted_tc(sol.network, rt) is not None
    print("h_ru = %d" % sol.value)
    sys.stdout.write(sol.serialize())
    return EXIT_YES


def _cmd_kernelize(ns):
    if ns.trees is not None:
        trees = _load_trees(ns.trees, "unrooted")
        kern = kernelize_ruhn(trees, ns.k)
        sys.stdout.write(kern.log.serialize())
        if kern.decided is None:
            for t in kern.trees:
                print(write_tree(t))
        return EXIT_YES
    if ns.network is None or ns.tree is None:
        sys.stderr.write("error: need --network/--tree or --trees\n")
        return EXIT_USAGE
    net = parse_network(_read(ns.network), mode="unrooted")
    tree = parse_tree(_read(ns.tree), mode="unrooted")
    kern = kernelize_utc(net, tree)
    sys.stdout.write(kern.log.serialize())
    sys.stdout.write(write_network(kern.network))
    print(write_tree(kern.tree))
    return EXIT_YES


def _cmd_oracle(ns, cfg):
    net = parse_network(_read(ns.network), mode="unrooted")
    tree = parse_tree(_read(ns.tree), mode="unrooted")
    img = utc_oracle(net, tree, max_edges=cfg.oracle_edges)
    if img is None:
        print("NO")
        return EXIT_NO
    assert verify_image(net, tree, img)
    print("YES")
    _print_image(img)
    return EXIT_YES


def _cmd_gen_ndp(ns):
    rng = random.Random(ns.seed)
    inst = rand_ndp(rng, max_nodes=ns.max_nodes,
                    allow_busy_terminals=ns.busy)
    sys.stdout.write(inst.serialize())
    if ns.emit_utc:
        net, tree = ndp_to_utc(inst)
        sys.stdout.write(write_network(net))
        print(write_tree(tree))
    return EXIT_YES


def _cmd_gen_lemma4(ns):
    trees = _load_trees(ns.trees, "rooted")
    if len(trees) != 2:
        sys.stderr.write("error: need exactly two rooted trees\n")
        return EXIT_USAGE
    u1, u2 = hn_to_ruhn(trees[0], trees[1],
                        caterpillar_len=ns.caterpillar_len)
    print(write_tree(u1))
    print(write_tree(u2))
    return EXIT_YES


def _cmd_export_dot(ns):
    if ns.network is not None:
        text = _read(ns.network)
        mode = "rooted" if ns.rooted or text.lstrip().startswith("(") \
            else "unrooted"
        obj = parse_network(text, mode=mode)
    elif ns.tree is not None:
        mode = "rooted" if ns.rooted else "unrooted"
        obj = parse_tree(_read(ns.tree), mode=mode)
    else:
        sys.stderr.write("error: need --network or --tree\n")
        return EXIT_USAGE
    sys.stdout.write(export_dot(obj))
    return EXIT_YES


def _cmd_selftest(ns):
    from .acceptance import run_all
    numbers = None
    if ns.only:
        try:
            numbers = {int(x) for x in ns.only.split(",")}
        except ValueError:
            sys.stderr.write("error: bad --only list\n")
            return EXIT_USAGE
    results = run_all(numbers)
    all_ok = True
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print("criterion %2d %s %s (%s) [%.1fs]"
              % (r.number, status, r.title, r.detail, r.seconds))
        all_ok = all_ok and r.passed
    return EXIT_YES if all_ok else EXIT_NO


def run(argv):
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_USAGE
    if ns.cmd is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        cfg = CliConfig(
            subcommand=ns.cmd,
            max_taxa=_env_int("PHYLONET_GUARD_MAX_TAXA", 6),
            max_k=_env_int("PHYLONET_GUARD_MAX_K", 3),
            oracle_edges=_env_int("PHYLONET_GUARD_ORACLE_EDGES", 24),
            seed=getattr(ns, "seed", 0),
            threads=ns.threads,
        )
    except ValueError:
        sys.stderr.write("error: guards must be positive\n")
        return EXIT_USAGE
    try:
        if ns.cmd == "utc":
            return _cmd_utc(ns)
        if ns.cmd == "uhn":
            return _cmd_uhn(ns)
        if ns.cmd == "hn":
            return _cmd_hn(ns, cfg)
        if ns.cmd == "ruhn":
            return _cmd_ruhn(ns, cfg)
        if ns.cmd == "kernelize":
            return _cmd_kernelize(ns)
        if ns.cmd == "oracle":
            return _cmd_oracle(ns, cfg)
        if ns.cmd == "gen-ndp":
            return _cmd_gen_ndp(ns)
        if ns.cmd == "gen-lemma4":
            return _cmd_gen_lemma4(ns)
        if ns.cmd == "export-dot":
            return _cmd_export_dot(ns)
        if ns.cmd == "selftest":
            return _cmd_selftest(ns)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except GuardExceeded as exc:
        sys.stderr.write("guard exceeded: %s\n" % exc)
        return EXIT_GUARD
    except (ParseError, ValueError) as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_USAGE
    except PhyloError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_USAGE
    return EXIT_USAGE


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
