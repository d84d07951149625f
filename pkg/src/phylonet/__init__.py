"""Exact algorithms for embedding phylogenetic trees into networks."""

from .core import (GuardExceeded, Image, InvalidStructure, PhyloError,
                   RGraph, TaxonMismatch, UGraph, caterpillar,
                   labelled_isomorphic, restrict_to_taxa,
                   reticulation_number, root_at_edge, rooted_caterpillar,
                   tidy, unroot)

__all__ = [
    "GuardExceeded", "Image", "InvalidStructure", "PhyloError", "RGraph",
    "TaxonMismatch", "UGraph", "caterpillar", "labelled_isomorphic",
    "restrict_to_taxa", "reticulation_number", "root_at_edge",
    "rooted_caterpillar", "tidy", "unroot",
]

__version__ = "0.1.0"
