"""Character lattices of multinorm one tori.

Finite groups as Cayley tables, G-lattices as integer matrices, exact
Tate cohomology, the reduction calculus for multinorm lattices with
replayable certificates, a classifier for quasi-permutation and
quasi-invertibility, and explicit verified resolutions.
"""

__version__ = "1.0.0"

from .errors import (  # noqa: E402
    ClosureTooLarge,
    DegreeUnsupported,
    EmptyMultiset,
    NotNilpotent,
    NotNormal,
    OutOfScope,
    ParseError,
    PreconditionFailed,
    SizeCap,
    TorilatError,
    VerificationError,
)
from .groups import (  # noqa: E402
    FiniteGroup,
    Subgroup,
    all_subgroups,
    catalog,
    catalog_group,
    closure,
    parse_subgroup_list,
    quotient,
    subgroup_label,
)
from .lattice import FinAb, GLattice, LatticeHom, dual, permutation_lattice, restrict  # noqa: E402
from .multinorm import (  # noqa: E402
    MultinormData,
    ReductionTrace,
    SubgroupMultiset,
    WeightFunction,
    build_I,
    build_J,
    quotient_descend,
    reduce_to_reduced,
    restrict_multinorm,
    strongly_reduce,
)
from .cohomology import (  # noqa: E402
    coflabby_resolution,
    flabby_resolution,
    obstruction_report,
    sha_omega2,
    tate,
)
from .classifier import NQI, QP, Verdict, classify, cross_check  # noqa: E402
from .resolutions import (  # noqa: E402
    ExplicitComplex,
    apt1_complex,
    apt2_complex,
    cm_dihedral_construction,
    dihedral_sequence,
    fixture,
    v4_sequence,
)
