"""Locally determined groups from partial-map semigroups.

Actions and S-maps, S-structures, pseudovertices, expansion schemes,
descending-link complexes and finiteness certificates.
"""

from .complex_topology import (
    SimplicialComplex,
    complex_below,
    descending_link,
    homology,
    is_homologically_n_connected,
    partitioned_descending_link,
)
from .core_action import ActionError, Domain, PartialMap, get_action
from .expansion_scheme import Scheme, contracting_vectors, make_scheme, rich_constant
from .finiteness_engine import f_infinity_checklist, f_n_checklist, stable_conn_ge
from .gamma_group import GammaElement, gamma_compose, gamma_invert
from .pseudovertex import (
    BudgetExceeded,
    ClassPair,
    Pseudovertex,
    common_upper_bound,
    leq,
    parse_pv,
    root_vertex,
    transporter,
)
from .s_structure import SStructure, make_structure

__version__ = "0.1.0"
