"""Integral Khovanov homology of link diagrams and twist-tangle knot families."""

from .cube import BigradedComplex, build_complex, resolve, split_at_crossing
from .diagram import (Crossing, Diagram, DiagramError, compute_c, connected_sum, mirror,
                      parse_braid, parse_pd, smooth, to_pd)
from .family import (FamilySpec, TangleWord, check_compatible, format_family, generate_family,
                     parse_family, twist_action)
from .homology import (HomologyTable, compare_tables, compute, diagonal_width, homology_table,
                       jones_from_table, poincare_polynomial, smith_normal_form)
from .laurent import LaurentPoly, TwoVarPoly
from .les import build_les, check_rank_exactness, check_ses_chain_level
from .limits import CapExceeded
from .polynomials import homflypt, kauffman_jones

__version__ = "0.1.0"

__all__ = [
    "BigradedComplex", "CapExceeded", "Crossing", "Diagram", "DiagramError", "FamilySpec",
    "HomologyTable", "LaurentPoly", "TangleWord", "TwoVarPoly", "build_complex", "build_les",
    "check_compatible", "check_rank_exactness", "check_ses_chain_level", "compare_tables",
    "compute", "compute_c", "connected_sum", "diagonal_width", "format_family",
    "generate_family", "homflypt", "homology_table", "jones_from_table", "kauffman_jones",
    "mirror", "parse_braid", "parse_family", "parse_pd", "poincare_polynomial", "resolve",
    "smith_normal_form", "smooth", "split_at_crossing", "to_pd", "twist_action",
]
