"""linkpass: invariants of bottom tangles and link equivalence deciders.

The package computes the Casson-type invariants a2(i), a2(ij), the Milnor
invariants mu(ij), mu(ijk), mu(jiij) and the residue phi(ij) of bottom
tangles from signed Gauss codes, and decides clasp-pass, band-pass, band-#
and band-p# equivalence of the closures by solving integer congruence
systems.
"""

from .codec import (
    Diagram,
    DiagramError,
    DiagramKind,
    ParseError,
    Passage,
    Role,
    ValidationReport,
    linking_number,
    parse,
    self_writhe,
    serialize,
    validate,
)
from .tangle_ops import (
    StrandTemplate,
    close,
    component_knot,
    compose_templates,
    connected_sum_insert,
    delete_components,
    mirror,
    parse_template,
    plat_closure,
    serialize_template,
    stack,
)
from .polyengine import (
    LaurentPolynomial,
    WirtingerPresentation,
    a2_i,
    a2_ij,
    alexander_a2,
    alexander_polynomial,
    conway_skein,
    wirtinger,
)
from .magnus import (
    TruncatedSeries,
    arc_series,
    longitude_series,
    meridian_series,
    milnor,
    series_inv,
    series_mul,
    series_pow,
)
from .classify import (
    CongruenceRow,
    CongruenceSystem,
    EquivalenceRelation,
    InvariantProfile,
    Verdict,
    build_link_system,
    decide_link,
    decide_link_z2split,
    decide_tangle,
    profile,
    solve_congruence,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
