"""Exact computations with webs of symmetric matrices, their discriminants,
endomorphism algebras, equivalence classes and quadric automorphism groups."""
from .endoalg import EndoAlgebra, EtaleReport, endomorphism_algebra, etale_report, norm_kernel_order, sigma_fixed_space, unit_coset_reps
from .equivalence import (
    PROBABLY_ABSENT,
    EquivKind,
    FiberReport,
    census,
    congruent,
    fiber_enumerate,
    full_orbit,
    module_isomorphic,
)
from .errors import *  # noqa: F401,F403
from .exactfield import F2, F3, F5, QQ, FieldSpec, Scalar, characteristic, enumerate_elements
from .mpoly import (
    MPoly,
    gcd_many,
    is_geometrically_squarefree,
    is_homogeneous,
    multiplicity,
    parse_poly,
    partial_derivative,
    poly_gcd,
    proportional,
    render,
)
from .quadauto import GroupReport, QuadricSystem, base_locus_points, corank, stabilizer_groups
from .swt import parse_swt, read_swt, render_swt, write_swt
from .symweb import GroupElem, SymWeb, WebClass, act, adjugate, classify, discriminant, multiplicity_profile, normalized_act

__version__ = "0.1.0"
