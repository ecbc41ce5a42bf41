"""Builders for the 2|2 supermanifold families over the projective plane.

The reduced manifold is covered by the three standard affine charts; the odd
structure is a rank-2 bundle given by a 2x2 matrix cocycle M with det matching
the O(-3) cocycle, and the single even deformation is controlled by an exact
rational parameter (written `l` in the assignment strings).  Everything here
is constructed symbolically and then verified by the exact loop composition.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .superalg import SuperElem, SuperError, VarTable, format_elem, parse, substitute
from .supermat import SuperMatrix, det_even, matmul, standard_form
from .atlas import (
    Atlas,
    Chart,
    TransitionMap,
    check_cocycle_loop,
    compose,
    jacobian,
    standard_chart,
)
from .supermat import berezinian

CYCLIC = ((0, 1), (1, 2), (2, 0))

# Reduced (purely even) transitions of the three-chart plane.
REDUCED = {
    (0, 1): {"z10": "1/z11", "z20": "z21/z11"},
    (1, 2): {"z11": "z12/z22", "z21": "1/z22"},
    (2, 0): {"z12": "1/z20", "z22": "z10/z20"},
}

# Which even target coordinate receives the deformation term on each overlap,
# and the bilinear it receives (source-chart odd frame over the pivot square).
CORRECTION = {
    (0, 1): ("z20", "t11*t21/z11^2"),
    (1, 2): ("z11", "t12*t22/z22^2"),
    (2, 0): ("z22", "t10*t20/z20^2"),
}

# The source-chart variable whose reciprocal appears in the even block ("pivot").
PIVOT = {(0, 1): "z11", (1, 2): "z22", (2, 0): "z20"}

_DECOMPOSABLE = {
    (0, 1): {
        "z10": "1/z11",
        "z20": "z21/z11 + l*t11*t21/z11^2",
        "t10": "t11/z11",
        "t20": "t21/z11^2",
    },
    (1, 2): {
        "z11": "z12/z22 + l*t12*t22/z22^2",
        "z21": "1/z22",
        "t11": "t12/z22",
        "t21": "t22/z22^2",
    },
    (2, 0): {
        "z12": "1/z20",
        "z22": "z10/z20 + l*t10*t20/z20^2",
        "t12": "t10/z20",
        "t22": "t20/z20^2",
    },
}

_OMEGA1 = {
    (0, 1): {
        "z10": "1/z11",
        "z20": "z21/z11 + l*t11*t21/z11^2",
        "t10": "-t11/z11^2",
        "t20": "-z21*t11/z11^2 + t21/z11",
    },
    (1, 2): {
        "z11": "z12/z22 - l*t12*t22/z22^2",
        "z21": "1/z22",
        "t11": "t12/z22 - z12*t22/z22^2",
        "t21": "-t22/z22^2",
    },
    (2, 0): {
        "z12": "1/z20",
        "z22": "z10/z20 - l*t10*t20/z20^2",
        "t12": "-t20/z20^2",
        "t22": "t10/z20 - z10*t20/z20^2",
    },
}


def _charts() -> dict[int, Chart]:
    return {i: standard_chart(i) for i in range(3)}


def _atlas_from_strings(table_strings, lam, notes=()) -> Atlas:
    charts = _charts()
    lam = Fraction(lam)
    maps = {}
    for (i, j), assigns in table_strings.items():
        src = charts[j]
        assignment = {
            name: parse(text, src.table, {"l": lam}) for name, text in assigns.items()
        }
        maps[(i, j)] = TransitionMap(src, charts[i], assignment)
    return Atlas(charts.values(), maps, notes)


def build_decomposable(lam) -> Atlas:
    """Family with odd bundle cocycle diag(1/z, 1/z^2) on each overlap.

    The (2<-0) odd denominators are z20 (pivot of that overlap); the variant
    with z10 denominators does not satisfy the loop identity and is rejected
    by the tests.
    """
    notes = (
        "odd blocks: diag(1/pivot, 1/pivot^2) with pivots z11, z22, z20",
        "(2<-0) odd denominators use the pivot z20; the z10 variant fails the loop identity",
    )
    return _atlas_from_strings(_DECOMPOSABLE, lam, notes)


def build_omega1(lam) -> Atlas:
    """Family whose odd bundle is the (parity-shifted) cotangent cocycle.

    Odd coordinates transform like the differentials of the even ones; the
    even deformation terms carry per-overlap signs fixed by the constant frame
    rebasing s = (-1, +1, -1) that normalizes det M to +1/pivot^3.
    """
    notes = (
        "odd blocks: cotangent cocycle in the natural (differential) frames",
        "constant frame rebasing s = (-1, +1, -1) normalizes det M to +1/pivot^3",
        "(2<-0) first odd denominator of t22 is the pivot z20 (forced by the loop identity)",
    )
    return _atlas_from_strings(_OMEGA1, lam, notes)


# -- matrix cocycles ----------------------------------------------------------


@dataclass
class MatrixCocycle:
    """2x2 even matrices M_{i<-j} over the source chart, cyclic overlaps."""

    matrices: dict[tuple[int, int], list]

    def __post_init__(self):
        if set(self.matrices) != set(CYCLIC):
            raise SuperError(f"matrix cocycle must cover exactly the overlaps {CYCLIC}")
        for pair, grid in self.matrices.items():
            if len(grid) != 2 or any(len(row) != 2 for row in grid):
                raise SuperError(f"overlap {pair}: matrix is not 2x2")
            for row in grid:
                for entry in row:
                    if not entry.is_even():
                        raise SuperError(f"overlap {pair}: odd-parity matrix entry")


def _cocycle_from_strings(strings) -> MatrixCocycle:
    charts = _charts()
    mats = {}
    for (i, j), rows in strings.items():
        table = charts[j].table
        mats[(i, j)] = [[parse(text, table) for text in row] for row in rows]
    return MatrixCocycle(mats)


def decomposable_cocycle() -> MatrixCocycle:
    return _cocycle_from_strings(
        {
            (0, 1): [["1/z11", "0"], ["0", "1/z11^2"]],
            (1, 2): [["1/z22", "0"], ["0", "1/z22^2"]],
            (2, 0): [["1/z20", "0"], ["0", "1/z20^2"]],
        }
    )


def cotangent_cocycle() -> MatrixCocycle:
    """How (dz1, dz2) transform between charts, read as a 0|2 bundle cocycle."""
    return _cocycle_from_strings(
        {
            (0, 1): [["-1/z11^2", "0"], ["-z21/z11^2", "1/z11"]],
            (1, 2): [["1/z22", "-z12/z22^2"], ["0", "-1/z22^2"]],
            (2, 0): [["0", "-1/z20^2"], ["1/z20", "-z10/z20^2"]],
        }
    )


def identity_cocycle() -> MatrixCocycle:
    return _cocycle_from_strings(
        {pair: [["1", "0"], ["0", "1"]] for pair in CYCLIC}
    )


def _match_monomial(elem: SuperElem, var: str) -> tuple[int, int]:
    """Match elem == sign * var^k (sign +-1); returns (sign, k)."""
    if len(elem.terms) != 1:
        raise SuperError(f"not a single Laurent term: {format_elem(elem)}")
    (exps, mask), c = next(iter(elem.terms.items()))
    if mask:
        raise SuperError(f"unexpected odd factors in {format_elem(elem)}")
    if c not in (1, -1):
        raise SuperError(f"coefficient {c} is not +-1 in {format_elem(elem)}")
    idx = elem.table.even_index(var)
    for m, e in enumerate(exps):
        if m != idx and e != 0:
            raise SuperError(
                f"{format_elem(elem)} involves {elem.table.even[m]}, expected a power of {var}"
            )
    return (1 if c == 1 else -1, exps[idx])


def det_cocycle(mc: MatrixCocycle) -> int:
    """Identify det M_{i<-j} with a line-bundle cocycle; return its twist k.

    The determinant of each matrix must be sign * pivot^k for the overlap's
    pivot variable; the exponent k must agree on all three overlaps and the
    signs must multiply to +1 (a constant base change then removes them).
    """
    charts = _charts()
    k_vals = {}
    signs = {}
    for pair in CYCLIC:
        det = det_even(mc.matrices[pair], charts[pair[1]].table)
        try:
            sign, k = _match_monomial(det, PIVOT[pair])
        except SuperError as exc:
            raise SuperError(f"overlap {pair[0]}<-{pair[1]}: det does not match any O(k) cocycle: {exc}") from exc
        signs[pair], k_vals[pair] = sign, k
    ks = set(k_vals.values())
    if len(ks) != 1:
        raise SuperError(f"det exponents disagree across overlaps: {k_vals}")
    if signs[(0, 1)] * signs[(1, 2)] * signs[(2, 0)] != 1:
        raise SuperError(f"det signs {signs} are not a coboundary; no O(k) identification")
    return ks.pop()


def frame_signs_from_cocycle(mc: MatrixCocycle) -> dict[int, int]:
    """Constant rebasing s with s_i/s_j = sign(det M_{i<-j}), anchored s_1 = +1.

    After rescaling the first odd frame of chart i by s_i, every det becomes
    +1/pivot^3; the anchor s_1 = +1 keeps the (0<-1) deformation term with a
    plus sign.
    """
    charts = _charts()
    eps = {}
    for pair in CYCLIC:
        det = det_even(mc.matrices[pair], charts[pair[1]].table)
        sign, _k = _match_monomial(det, PIVOT[pair])
        eps[pair] = sign
    s = {1: 1, 0: eps[(0, 1)], 2: eps[(1, 2)]}
    if eps[(2, 0)] != s[2] * s[0]:
        raise SuperError(f"det signs {eps} are not a coboundary")
    return s


def fermionic_cocycle(atlas: Atlas) -> MatrixCocycle:
    """Extract the odd-block matrices M_{i<-j} from the stored cyclic maps."""
    from .superalg import deriv_odd_left

    mats = {}
    for pair in CYCLIC:
        f = atlas.map(*pair)
        mats[pair] = [
            [deriv_odd_left(f.assignment[tn], sn) for sn in f.source.table.odd]
            for tn in f.target.table.odd
        ]
    return MatrixCocycle(mats)


def frame_signs(atlas: Atlas) -> dict[int, int]:
    return frame_signs_from_cocycle(fermionic_cocycle(atlas))


def build_generic(mc: MatrixCocycle, lam) -> Atlas:
    """Atlas with reduced even part + one deformation term per overlap, odd part M.

    Validates the cocycle invariants first: det must identify with the O(-3)
    cocycle (twist -3, pivot powers), and M_{0<-1} M_{1<-2} M_{2<-0} must be
    the identity after substitution into one chart.  The deformation term on
    overlap (i<-j) is lam * s_j * t1j*t2j / pivot^2 with the frame signs s
    solved from the det signs (s_1 = +1), added to the corrected coordinate.
    """
    lam = Fraction(lam)
    twist = det_cocycle(mc)
    if twist != -3:
        raise SuperError(f"matrix cocycle has det twist {twist}, need -3")
    _check_matrix_cocycle(mc)
    s = frame_signs_from_cocycle(mc)

    charts = _charts()
    maps = {}
    for pair in CYCLIC:
        i, j = pair
        src, tgt = charts[j], charts[i]
        assignment = {
            name: parse(text, src.table) for name, text in REDUCED[pair].items()
        }
        corrected, bilinear = CORRECTION[pair]
        assignment[corrected] = assignment[corrected] + parse(
            bilinear, src.table
        ) * (lam * s[j])
        t1s, t2s = (SuperElem.var(src.table, n) for n in src.table.odd)
        M = mc.matrices[pair]
        assignment[tgt.table.odd[0]] = M[0][0] * t1s + M[0][1] * t2s
        assignment[tgt.table.odd[1]] = M[1][0] * t1s + M[1][1] * t2s
        maps[pair] = TransitionMap(src, tgt, assignment)
    notes = (f"generic build: frame signs s = ({s[0]}, {s[1]}, {s[2]})",)
    return Atlas(charts.values(), maps, notes)


def _check_matrix_cocycle(mc: MatrixCocycle) -> None:
    """M_{0<-1} M_{1<-2} M_{2<-0} == identity, composed through the reduced maps."""
    charts = _charts()
    red = {
        pair: {name: parse(text, charts[pair[1]].table) for name, text in REDUCED[pair].items()}
        for pair in CYCLIC
    }
    m01 = [[substitute(e, red[(1, 2)]) for e in row] for row in mc.matrices[(0, 1)]]
    prod = _mm2(m01, mc.matrices[(1, 2)])
    prod = [[substitute(e, red[(2, 0)]) for e in row] for row in prod]
    prod = _mm2(prod, mc.matrices[(2, 0)])
    table = charts[0].table
    ident = [[SuperElem.one(table), SuperElem.zero(table)], [SuperElem.zero(table), SuperElem.one(table)]]
    if prod != ident:
        bad = [
            f"[{a}][{b}] = {format_elem(prod[a][b])}"
            for a in range(2)
            for b in range(2)
            if prod[a][b] != ident[a][b]
        ]
        raise SuperError("matrix cocycle violates M01*M12*M20 = 1: " + "; ".join(bad))


def _mm2(x, y):
    return [
        [x[i][0] * y[0][j] + x[i][1] * y[1][j] for j in range(2)]
        for i in range(2)
    ]


# -- the Pi-projective plane via big cells ------------------------------------


def big_cell(i: int) -> SuperMatrix:
    """The 1|1 x 3|3 big-cell matrix of chart i.

    Even row: identity entry at column i, coordinates at the other columns;
    odd row mirrors it with sign-flipped odd entries (the Pi-symmetry).
    """
    c = standard_chart(i)
    t = c.table
    one, zero = SuperElem.one(t), SuperElem.zero(t)
    z1, z2 = (SuperElem.var(t, n) for n in t.even)
    t1, t2 = (SuperElem.var(t, n) for n in t.odd)
    others = [j for j in range(3) if j != i]
    even_row = [zero, zero, zero]
    odd_row = [zero, zero, zero]
    even_row[i] = one
    odd_row[others[0]] = t1
    odd_row[others[1]] = t2
    even_row[others[0]] = z1
    even_row[others[1]] = z2
    A = [even_row]
    B = [odd_row]
    C = [[-e for e in odd_row]]
    D = [list(even_row)]
    return SuperMatrix(t, A, B, C, D)


def build_pi_plane() -> Atlas:
    """Atlas read off from row-reducing big cells onto each target pivot.

    For the pair (i <- j) the chart-j cell is put in standard form on pivot
    column i; the reduced even row then contains the chart-i coordinates
    expressed over chart j, which is exactly the transition assignment.
    """
    charts = _charts()
    maps = {}
    for i, j in CYCLIC:
        cell = big_cell(j)
        reduced = standard_form(cell, i)
        others = [c for c in range(3) if c != i]
        tgt, src = charts[i], charts[j]
        assignment = {
            tgt.table.even[0]: reduced.A[0][others[0]],
            tgt.table.even[1]: reduced.A[0][others[1]],
            tgt.table.odd[0]: reduced.B[0][others[0]],
            tgt.table.odd[1]: reduced.B[0][others[1]],
        }
        # Pi-symmetry of the reduced cell: the odd row must mirror the even row.
        for col in range(3):
            if reduced.D[0][col] != reduced.A[0][col] or reduced.C[0][col] != -reduced.B[0][col]:
                raise SuperError(f"reduced big cell lost Pi-symmetry at column {col}")
        maps[(i, j)] = TransitionMap(src, tgt, assignment)
    notes = ("transitions read off standard-form reductions of the big cells",)
    return Atlas(charts.values(), maps, notes)


# -- comparisons and bookkeeping ----------------------------------------------


def atlas_equal(a: Atlas, b: Atlas) -> bool:
    """Exact equality of charts and every transition assignment."""
    if sorted(a.charts) != sorted(b.charts):
        raise SuperError("atlases have different chart index sets")
    for idx in a.charts:
        if a.charts[idx].table != b.charts[idx].table:
            raise SuperError(f"chart {idx} variable tables differ")
    if set(a.maps) != set(b.maps):
        raise SuperError("atlases store different overlap sets")
    return all(a.maps[key].assignment == b.maps[key].assignment for key in a.maps)


def rescale_odd(atlas: Atlas, c) -> Atlas:
    """Globally rescale the odd coordinates by c; the deformation scales by 1/c^2.

    Conjugates every stored map by theta -> c*theta on each chart: the odd
    blocks are untouched while an even term bilinear in the source odds picks
    up 1/c^2, so rescale_odd(build_decomposable(4), 2) == build_decomposable(1).
    """
    c = Fraction(c)
    if not c:
        raise SuperError("odd rescaling must be invertible")
    maps = {}
    for key, f in atlas.maps.items():
        scale_tgt = _odd_scaling(f.target, c)
        unscale_src = _odd_scaling(f.source, 1 / c)
        maps[key] = compose(compose(scale_tgt, f), unscale_src)
    return Atlas(atlas.charts.values(), maps, atlas.notes)


def _odd_scaling(chart: Chart, c: Fraction, first_only: bool = False) -> TransitionMap:
    assignment = {}
    for name in chart.table.even:
        assignment[name] = SuperElem.var(chart.table, name)
    odds = chart.table.odd
    for pos, name in enumerate(odds):
        v = SuperElem.var(chart.table, name)
        scale = c if (pos == 0 or not first_only) else Fraction(1)
        assignment[name] = v * scale
    return TransitionMap(chart, chart, assignment)


def sym_restricted_rank(k: int) -> tuple[int, int]:
    """Even|odd rank of the restricted k-th symmetric power of the 2|2 tangent.

    The decomposition Sym^k T + Sym^{k-1} T (x) F* + Sym^{k-2} T (x) Sym^2 F*
    with rank-2 even and rank-2 odd ingredients gives even (k+1) + (k-1) = 2k
    and odd k + k = 2k (summands with negative symmetric degree vanish).
    """
    if k < 1:
        raise SuperError(f"sym_restricted_rank needs k >= 1, got {k}")
    even = (k + 1) + (k - 1)
    odd = 2 * k
    return (even, odd)


# -- Berezinian normal form (per-overlap theorem form) -------------------------

# Row/column arrangement of the theorem: the target coordinate equal to
# 1/pivot comes first, and the source pivot comes first.
_NF_TARGET_ORDER = {(0, 1): ("z10", "z20"), (1, 2): ("z21", "z11"), (2, 0): ("z12", "z22")}
_NF_SOURCE_ORDER = {(0, 1): ("z11", "z21"), (1, 2): ("z22", "z12"), (2, 0): ("z20", "z10")}


def normal_form_map(atlas: Atlas, pair: tuple[int, int]) -> TransitionMap:
    """The overlap map rewritten in the per-overlap theorem arrangement.

    Two explicit, recorded changes: (a) even coordinates are reordered so the
    reciprocal target coordinate and the source pivot come first; (b) the
    first odd frame of chart i is rescaled by the constant s_i that normalizes
    det M to +1/pivot^3 (solved from the stored odd blocks, s_1 = +1).  The
    result is an honest TransitionMap run through the ordinary Jacobian and
    Berezinian pipeline.
    """
    if pair not in CYCLIC:
        raise SuperError(f"normal form defined for the cyclic overlaps, got {pair}")
    s = frame_signs(atlas)
    i, j = pair
    f = atlas.map(i, j)
    tgt_ad = Chart(i, VarTable(_NF_TARGET_ORDER[pair], f.target.table.odd))
    src_ad = Chart(j, VarTable(_NF_SOURCE_ORDER[pair], f.source.table.odd))

    # rebase: adapted_target <- target, applying the frame sign on theta_1i
    r_tgt = TransitionMap(
        f.target,
        tgt_ad,
        {
            **{n: SuperElem.var(f.target.table, n) for n in tgt_ad.table.even},
            tgt_ad.table.odd[0]: SuperElem.var(f.target.table, f.target.table.odd[0]) * s[i],
            tgt_ad.table.odd[1]: SuperElem.var(f.target.table, f.target.table.odd[1]),
        },
    )
    # unbase: source <- adapted_source, removing the sign from theta_1j
    r_src = TransitionMap(
        src_ad,
        f.source,
        {
            **{n: SuperElem.var(src_ad.table, n) for n in f.source.table.even},
            f.source.table.odd[0]: SuperElem.var(src_ad.table, f.source.table.odd[0]) * Fraction(1, s[j]),
            f.source.table.odd[1]: SuperElem.var(src_ad.table, f.source.table.odd[1]),
        },
    )
    return compose(compose(r_tgt, f), r_src)


def berezinian_normal_form(atlas: Atlas, pair: tuple[int, int]) -> SuperElem:
    """Berezinian of the overlap map in the theorem arrangement."""
    return berezinian(jacobian(normal_form_map(atlas, pair)))


def berezinian_raw(atlas: Atlas, pair: tuple[int, int]) -> SuperElem:
    """Berezinian of the stored map under the global z1,z2,t1,t2 ordering."""
    return berezinian(jacobian(atlas.map(*pair)))
