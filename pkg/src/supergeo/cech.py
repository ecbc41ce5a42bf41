"""Cech cohomology of line bundles on projective space, plus the two
connecting-map computations on the 2|2 atlases.

Line-bundle dimensions come from the standard monomial counts; H^n classes
are represented on the basis of totally negative Laurent monomials in the
homogeneous coordinates X0..Xn.  The two delta maps (even Picard group and
obstruction) are computed literally: lift, multiply/sum on the overlaps of
the 3-chart cover, and read the class off the triple overlap.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .superalg import SuperElem, SuperError, format_elem, substitute
from .atlas import Atlas, even_remainder_derivation, invert_map, pushforward_vector_field, compose


def h_line(n: int, k: int, q: int) -> int:
    """dim H^q(P^n, O(k)): monomial count at q = 0, its dual at q = n, else 0."""
    if n < 1 or q < 0 or q > n:
        raise ValueError(f"h_line: bad degree q={q} for P^{n}")
    if q == 0:
        return comb(n + k, n) if k >= 0 else 0
    if q == n:
        return comb(-k - 1, n) if k <= -n - 1 else 0
    return 0


def euler_char(n: int, k: int) -> int:
    """chi(O(k)) = product_{i=1..n} (k+i) / n!, valid for every integer k."""
    num = 1
    for i in range(1, n + 1):
        num *= k + i
    val = Fraction(num, 1)
    for i in range(2, n + 1):
        val /= i
    assert val.denominator == 1
    return int(val)


def serre_dual_params(n: int, k: int, q: int) -> tuple[int, int, int]:
    """(n, k', q') with h^q(O(k)) = h^{q'}(O(k')); k' = -k-n-1, q' = n-q."""
    return (n, -k - n - 1, n - q)


def basis_top(n: int, k: int) -> list[tuple[int, ...]]:
    """Monomial basis of H^n(P^n, O(k)): degree-k exponents, all <= -1."""
    total = -k - (n + 1)
    if total < 0:
        return []
    out = []

    def gen(prefix, remaining, slots):
        if slots == 1:
            out.append(tuple(prefix + [-1 - remaining]))
            return
        for take in range(remaining + 1):
            gen(prefix + [-1 - take], remaining - take, slots - 1)

    gen([], total, n + 1)
    return sorted(out)


def monomial_str(exps: tuple[int, ...]) -> str:
    parts = []
    for i, e in enumerate(exps):
        if e == 0:
            continue
        parts.append(f"X{i}" if e == 1 else f"X{i}^{e}")
    return "*".join(parts) if parts else "1"


def bott(n: int, p: int, k: int, q: int) -> int:
    """dim H^q(P^n, Omega^p(k)) by the Bott formula."""
    if not (0 <= p <= n) or not (0 <= q <= n):
        raise ValueError(f"bott: need 0 <= p,q <= n, got p={p}, q={q}, n={n}")
    if q == p and k == 0:
        return 1
    if q == 0 and k > p:
        return comb(k + n - p, k) * comb(k - 1, p)
    if q == n and k < p - n:
        return comb(-k + p, -k) * comb(-k - 1, n - p)
    return 0


def _rank(rows: list[list[Fraction]]) -> int:
    """Exact rank by fraction Gaussian elimination."""
    rows = [list(r) for r in rows]
    rank = 0
    cols = len(rows[0]) if rows else 0
    row = 0
    for col in range(cols):
        piv = next((r for r in range(row, len(rows)) if rows[r][col]), None)
        if piv is None:
            continue
        rows[row], rows[piv] = rows[piv], rows[row]
        inv = 1 / rows[row][col]
        rows[row] = [v * inv for v in rows[row]]
        for r in range(len(rows)):
            if r != row and rows[r][col]:
                f = rows[r][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[row])]
        row += 1
        rank += 1
    return rank


def h1_tangent(n: int, k: int) -> int:
    """dim H^1(P^n, T(k)), computed from the Euler sequence.

    For n = 2 this is the kernel rank of the multiplication map
    H^2(O(k)) -> H^2(O(k+1))^3 on the totally negative monomial bases
    (H^1 of line bundles vanishes on P^2, so the kernel is the whole group).
    """
    if n < 1:
        raise ValueError("h1_tangent needs n >= 1")
    if n == 1:
        return h_line(1, k + 2, 1)
    if n > 2:
        return 0
    src = basis_top(2, k)
    if not src:
        return 0
    tgt = {m: a for a, m in enumerate(basis_top(2, k + 1))}
    rows = []
    for m in src:
        row = [Fraction(0)] * (3 * len(tgt))
        for i in range(3):
            shifted = list(m)
            shifted[i] += 1
            key = tuple(shifted)
            if key in tgt:
                row[i * len(tgt) + tgt[key]] = Fraction(1)
        rows.append(row)
    if not tgt:
        return len(src)
    return len(src) - _rank(rows)


def h1_tangent_bott(n: int, k: int) -> int:
    """Independent route: Serre duality into the Bott formula.

    H^1(T(k)) is dual to H^{n-1}(Omega^1(-k-n-1)); for n = 2 that is
    bott(2, 1, -k-3, 1).
    """
    if n < 1:
        raise ValueError("h1_tangent_bott needs n >= 1")
    if n == 1:
        return h_line(1, -k - 4, 0)
    if n > 2:
        return 0
    return bott(2, 1, -k - 3, 1)


@dataclass
class CohClass:
    """An H^q(P^n, O(k)) class on the totally-negative monomial basis."""

    n: int
    k: int
    q: int
    coeffs: dict[tuple[int, ...], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        self.coeffs = {m: Fraction(c) for m, c in self.coeffs.items() if c}

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        if not isinstance(other, CohClass):
            return NotImplemented
        return (self.n, self.k, self.q) == (other.n, other.k, other.q) and self.coeffs == other.coeffs

    def to_dict(self) -> dict[str, str]:
        return {monomial_str(m): str(c) for m, c in sorted(self.coeffs.items())}

    def __repr__(self):
        if self.is_zero():
            body = "0"
        else:
            body = " + ".join(f"{c}*[{monomial_str(m)}]" for m, c in sorted(self.coeffs.items()))
        return f"CohClass(H^{self.q}(O({self.k})) on P^{self.n}: {body})"


def class_in_top(n: int, k: int, section: SuperElem, frame_sign: int = 1) -> CohClass:
    """Represent a chart-0 J-degree-2 section as a class in H^n(O(k)).

    The section must be a multiple of t10*t20 over the chart-0 table; the
    trivialization identifies t10*t20 with frame_sign * (top frame), sending
    z10^a z20^b t10 t20 to frame_sign * X0^{k-a-b} X1^a X2^b.  Monomials that
    are not totally negative are Cech coboundaries on the triple overlap and
    are projected away.
    """
    if n != 2:
        raise ValueError("class_in_top is implemented for the 3-chart cover of P^2")
    coeffs: dict[tuple[int, ...], Fraction] = {}
    full_mask = (1 << len(section.table.odd)) - 1
    for (exps, mask), c in section.terms.items():
        if mask != full_mask:
            raise SuperError(
                f"section is not a pure J-degree-2 multiple of the odd frame: {format_elem(section)}"
            )
        a, b = exps
        mono = (k - a - b, a, b)
        if all(e <= -1 for e in mono):
            coeffs[mono] = coeffs.get(mono, Fraction(0)) + c * frame_sign
    return CohClass(n, k, 2, coeffs)


# -- connecting maps on the 2|2 atlases ---------------------------------------

# z{m}{i} represents X_c / X_i; AFFINE[(i, name)] = c.
AFFINE = {
    (0, "z10"): 1,
    (0, "z20"): 2,
    (1, "z11"): 0,
    (1, "z21"): 2,
    (2, "z12"): 0,
    (2, "z22"): 1,
}


def _atlas_frame_signs(atlas: Atlas) -> dict[int, int]:
    from .families import frame_signs

    return frame_signs(atlas)


def default_picard_lift(atlas: Atlas) -> dict[tuple[int, int], SuperElem]:
    """The degree-1 lift whose reductions are the O(1) cocycle X_i/X_j.

    On overlap (i <- j), X_i/X_j written over chart j is a single coordinate:
    z11 for (0<-1), z22 for (1<-2), z20 for (2<-0).
    """
    names = {(0, 1): "z11", (1, 2): "z22", (2, 0): "z20"}
    return {
        pair: SuperElem.var(atlas.charts[pair[1]].table, names[pair])
        for pair in ((0, 1), (1, 2), (2, 0))
    }


def picard_delta(
    atlas: Atlas,
    lifts: dict[tuple[int, int], SuperElem] | None = None,
    frame_signs: dict[int, int] | None = None,
) -> CohClass:
    """Connecting map of the even-units exponential: lift, multiply, read off.

    `lifts` assigns an invertible even function over the source chart to each
    cyclic overlap (default: the O(1) cocycle lift).  All three are rewritten
    over chart 0 and multiplied; the product must be 1 mod J (i.e. the
    reductions really form a cocycle), and the J-degree-2 remainder is the
    class in H^2(O(-3)).
    """
    if lifts is None:
        lifts = default_picard_lift(atlas)
    if frame_signs is None:
        frame_signs = _atlas_frame_signs(atlas)
    for pair in ((0, 1), (1, 2), (2, 0)):
        if pair not in lifts:
            raise SuperError(f"missing lift for overlap {pair[0]}<-{pair[1]}")
        lift = lifts[pair]
        if not lift.is_even():
            raise SuperError(f"lift on {pair} is not even")
        if len(lift.body().terms) != 1:
            raise SuperError(f"lift on {pair} is not invertible (body not a single term)")

    to0_01 = invert_map(atlas.map(0, 1)).assignment  # chart-1 vars over chart 0
    to0_12 = atlas.map(2, 0).assignment  # chart-2 vars over chart 0
    a01 = substitute(lifts[(0, 1)], to0_01)
    a12 = substitute(lifts[(1, 2)], to0_12)
    a20 = lifts[(2, 0)]
    if a20.table != atlas.charts[0].table:
        raise SuperError("lift on (2, 0) must be written over chart 0")
    product = a01 * a12 * a20
    remainder = product - SuperElem.one(product.table)
    if not remainder.body().is_zero():
        raise SuperError(
            f"lift reductions do not form a cocycle; product is {format_elem(product.body())} mod J"
        )
    return class_in_top(2, -3, remainder, frame_signs[0]) if not remainder.is_zero() else CohClass(2, -3, 2)


def obstruction_delta(atlas: Atlas, frame_signs: dict[int, int] | None = None) -> CohClass:
    """Connecting map sending the even-deformation cochain to H^2(O(-3)).

    Reads the J-degree-2 remainders of the even assignments as a 1-cochain of
    vector fields, lifts each d/dz_{mi} to the homogeneous field X_i d/dX_c
    (with coefficients homogenized through the frame identification
    t1j*t2j = s_j / X_j^3), sums over the cyclic overlaps, and factors the
    total as f * (Euler field).  The class of f is the result.
    """
    if frame_signs is None:
        frame_signs = _atlas_frame_signs(atlas)
    # components[c]: homogeneous Laurent coefficients of d/dX_c
    components: list[dict[tuple[int, int, int], Fraction]] = [{}, {}, {}]
    for pair in ((0, 1), (1, 2), (2, 0)):
        i, j = pair
        f = atlas.map(i, j)
        rems = even_remainder_derivation(f)
        for name, coeff in rems.items():
            if coeff.is_zero():
                continue
            c = AFFINE[(i, name)]
            for mono, val in _homogenize(coeff, j, frame_signs[j]).items():
                shifted = list(mono)
                shifted[i] += 1  # the X_i factor of the lift X_i d/dX_c
                key = tuple(shifted)
                bucket = components[c]
                s = bucket.get(key, Fraction(0)) + val
                if s:
                    bucket[key] = s
                else:
                    bucket.pop(key, None)
    # factor the sum as f * Euler field: components[c] == f shifted by e_c
    f_candidates = []
    for c in range(3):
        cand = {}
        for mono, val in components[c].items():
            shifted = list(mono)
            shifted[c] -= 1
            cand[tuple(shifted)] = val
        f_candidates.append(cand)
    if not (f_candidates[0] == f_candidates[1] == f_candidates[2]):
        raise SuperError("obstruction lift is not a multiple of the Euler field")
    f_total = f_candidates[0]
    coeffs = {m: v for m, v in f_total.items() if all(e <= -1 for e in m)}
    return CohClass(2, -3, 2, coeffs)


def _homogenize(coeff: SuperElem, j: int, frame_sign: int) -> dict[tuple[int, int, int], Fraction]:
    """Chart-j J-degree-2 coefficient -> homogeneous Laurent coefficients.

    A term c * z1j^a * z2j^b * t1j*t2j becomes
    c * s_j * (X_{c1}/X_j)^a (X_{c2}/X_j)^b / X_j^3.
    """
    table = coeff.table
    full_mask = (1 << len(table.odd)) - 1
    c1 = AFFINE[(j, table.even[0])]
    c2 = AFFINE[(j, table.even[1])]
    out: dict[tuple[int, int, int], Fraction] = {}
    for (exps, mask), c in coeff.terms.items():
        if mask != full_mask:
            raise SuperError(
                f"even remainder is not a pure J-degree-2 term: {format_elem(coeff)}"
            )
        a, b = exps
        mono = [0, 0, 0]
        mono[c1] += a
        mono[c2] += b
        mono[j] += -a - b - 3
        key = tuple(mono)
        s = out.get(key, Fraction(0)) + c * frame_sign
        if s:
            out[key] = s
        else:
            out.pop(key, None)
    return out


def omega_cocycle_sum(atlas: Atlas) -> dict[str, SuperElem]:
    """Push the three deformation derivations into chart 0 and sum.

    Each overlap (i <- j) contributes the derivation with the J-degree-2 even
    remainders as coefficients (over chart j) on the chart-i coordinate
    fields.  All three are transported to chart 0 exactly; the sum of a true
    cocycle is the zero derivation.
    """
    f01 = atlas.map(0, 1)
    f12 = atlas.map(1, 2)
    f20 = atlas.map(2, 0)
    chart0 = atlas.charts[0]

    total: dict[str, SuperElem] = {
        name: SuperElem.zero(chart0.table) for name in chart0.table.names
    }

    def accumulate(fields: dict[str, SuperElem]):
        for name, val in fields.items():
            total[name] = total[name] + val

    # (0<-1): fields already on chart-0 coordinates; move coefficients to chart 0
    to0 = invert_map(f01).assignment
    accumulate(
        {name: substitute(c, to0) for name, c in even_remainder_derivation(f01).items() if not c.is_zero()}
    )
    # (1<-2): coefficients to chart 1, then push the chart-1 derivation through f01
    to1 = invert_map(f12).assignment
    d12 = {
        name: substitute(c, to1)
        for name, c in even_remainder_derivation(f12).items()
        if not c.is_zero()
    }
    if d12:
        accumulate(pushforward_vector_field(d12, f01))
    # (2<-0): coefficients to chart 2, then push through the (0<-2) composite
    to2 = invert_map(f20).assignment
    d20 = {
        name: substitute(c, to2)
        for name, c in even_remainder_derivation(f20).items()
        if not c.is_zero()
    }
    if d20:
        f02 = compose(f01, f12)
        accumulate(pushforward_vector_field(d20, f02))
    return total
