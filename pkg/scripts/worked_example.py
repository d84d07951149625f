#!/usr/bin/env python3
"""Walk through the six-taxon worked example: the same pair of trees
has unrooted value 1, root-uncertain value 2, and rooted value 3."""

from phylonet.acceptance import fig1_rootings, fig1_trees
from phylonet.hn import hn_exact
from phylonet.newick import write_network, write_tree
from phylonet.ruhn import ruhn_exact
from phylonet.uhn import uhn_solve


def main():
    t1, t2 = fig1_trees()
    print("T1 =", write_tree(t1))
    print("T2 =", write_tree(t2))

    value, net, _, _ = uhn_solve(t1, t2)
    print("\nunrooted: h_u =", value)
    print(write_network(net))

    sol = ruhn_exact([t1, t2], 3)
    print("root-uncertain: h_ru =", sol.value)
    print(sol.serialize())

    r1, r2 = fig1_rootings()
    hs = hn_exact([r1, r2], 3)
    print("rooted (at the edges entering a and e): h_r =", hs.value)
    print(write_network(hs.network))


if __name__ == "__main__":
    main()
