"""Tools for the modular isomorphism problem of finite p-groups.

Groups are pc-presented (:mod:`mipkit.pcgroup`); the augmentation ideal of
``F_p G`` modulo its powers is tabulated on a Jennings basis
(:mod:`mipkit.algtable`) and compared through canonical forms
(:mod:`mipkit.canon`).  Group-theoretical invariants, the small group ring and
the bin splitting loop live in :mod:`mipkit.invariants`,
:mod:`mipkit.smallring` and :mod:`mipkit.driver`.
"""
from .algtable import SCTable, build_aug_table, extend_table, load_table, save_table
from .canon import CanonCertificate, canonical_form, iso_oracle
from .caps import CapExceeded, Caps, get_caps, set_caps
from .corpus import corpus_groups, named
from .driver import SolvedByInvariants, Split, SplitResult, Unresolved, mip_bin_split
from .invariants import bin_groups, fingerprint
from .jennings import jennings_bound, jennings_series
from .kernels import BACKEND
from .pcgroup import (PcPresentation, is_isomorphic_groups, load_presentation, make_presentation,
                      parse_presentation)
from .smallring import baginski_quotient, contains_normal_copy, small_unit_group

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "CanonCertificate", "CapExceeded", "Caps", "PcPresentation", "SCTable",
    "SolvedByInvariants", "Split", "SplitResult", "Unresolved", "baginski_quotient",
    "bin_groups", "build_aug_table", "canonical_form", "contains_normal_copy", "corpus_groups",
    "extend_table",
    "fingerprint", "get_caps", "is_isomorphic_groups", "iso_oracle", "jennings_bound",
    "jennings_series", "load_presentation", "load_table", "make_presentation",
    "mip_bin_split", "named", "parse_presentation", "save_table", "set_caps", "small_unit_group",
]
