"""Exact flag-algebra toolkit for triangle-free graphs.

Verifies sum-of-squares density certificates in exact rational
arithmetic, enumerates triangle-free graphs up to isomorphism, counts
pentagons in blow-ups, and computes cut distances, all without floating
point.  The bundled certificate pins the limiting pentagon density of
triangle-free graphs at 24/625, the value achieved by balanced blow-ups
of the 5-cycle.
"""

__version__ = "0.1.0"

from .algebra import (
    AlgebraElement,
    Flag,
    TypeSigma,
    average,
    constant,
    element_from_obj,
    element_to_obj,
    eval_blowup,
    flag_FV,
    flag_fj,
    flag_product,
    flags_of_size,
    format_rational,
    graph_element,
    lift,
    make_flag,
    parse_rational,
    rho,
    sigma_type,
    trivial_type,
    type_P,
    unit,
    upward_pi,
)
from .census import ModelCensus, enumerate_models, enumerate_models_stream, model_count
from .certificate import (
    Certificate,
    SOSBlock,
    VerificationReport,
    bundled_certificate,
    check_psd,
    expand_lhs,
    identify_linear_graphs,
    load_certificate,
    save_certificate,
    verify,
)
from .cutmetric import cut_norm, cut_norm_witness, d_box, delta_blowup_sequence, delta_hat
from .extremal import (
    BlowupSpec,
    ExtremalReport,
    LargeGraph,
    almost_balanced_blowups,
    blowup,
    chi,
    count_pentagons,
    exhaustive_max_pentagons,
    michael_graph,
    phi_blowup_density,
    strong_hom_expansion,
)
from .graphs import (
    Rational,
    SmallGraph,
    automorphism_count,
    canonical_code,
    canonical_form,
    complete_bipartite,
    complete_graph,
    count_induced,
    cycle,
    density,
    disjoint_union,
    empty_graph,
    from_graph6,
    induced_counts,
    induced_subgraph,
    is_triangle_free,
    is_twin_free,
    iter_subsets,
    path,
    relabel,
    star,
    strong_hom_count,
    to_graph6,
)

__all__ = [name for name in dir() if not name.startswith("_")]
