"""supergeo: exact verification of 2|2 supermanifold atlases over the
projective plane -- Grassmann-Laurent algebra, supermatrices and Berezinians,
Cech cohomology of line bundles, family builders, and a CLI driver."""

__version__ = "0.1.0"

from .superalg import (
    NotAUnit,
    ParseError,
    SuperElem,
    SuperError,
    TableMismatch,
    VarTable,
    add,
    deriv_even,
    deriv_odd_left,
    format_elem,
    invert_unit,
    mul,
    parse,
    substitute,
    truncate_J,
)
from .supermat import (
    SuperMatrix,
    berezinian,
    berezinian_alt,
    det_even,
    inverse,
    matmul,
    standard_form,
)
from .atlas import (
    Atlas,
    Chart,
    TransitionMap,
    atlas_from_json,
    atlas_to_json,
    check_cocycle_loop,
    compose,
    compose_jacobians,
    even_remainder_derivation,
    identity_map,
    invert_map,
    is_calabi_yau,
    jacobian,
    pushforward_vector_field,
    standard_chart,
)
from .cech import (
    CohClass,
    basis_top,
    bott,
    class_in_top,
    default_picard_lift,
    euler_char,
    h1_tangent,
    h1_tangent_bott,
    h_line,
    monomial_str,
    obstruction_delta,
    omega_cocycle_sum,
    picard_delta,
    serre_dual_params,
)
from .families import (
    MatrixCocycle,
    atlas_equal,
    berezinian_normal_form,
    berezinian_raw,
    big_cell,
    build_decomposable,
    build_generic,
    build_omega1,
    build_pi_plane,
    cotangent_cocycle,
    decomposable_cocycle,
    det_cocycle,
    fermionic_cocycle,
    frame_signs,
    identity_cocycle,
    normal_form_map,
    rescale_odd,
    sym_restricted_rank,
)
