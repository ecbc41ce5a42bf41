"""Charts, transition maps, and atlases for 2|2 coordinate geometry.

A chart carries an ordered variable table; a transition map (target <- source)
stores one algebra element per target coordinate, written over the source
variables.  Composition is substitution, inversion is exact (monomial body
inversion plus one Newton step, which terminates because J^3 = 0), and the
Jacobian uses left derivatives with rows ordered by target coordinates
(evens first) and columns by source coordinates in the same way.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .superalg import (
    SuperElem,
    SuperError,
    VarTable,
    deriv_even,
    deriv_odd_left,
    format_elem,
    invert_unit,
    parse,
    substitute,
    truncate_J,
)
from .supermat import SuperMatrix, berezinian, matmul


@dataclass(frozen=True)
class Chart:
    index: int
    table: VarTable

    @property
    def even(self) -> tuple[str, ...]:
        return self.table.even

    @property
    def odd(self) -> tuple[str, ...]:
        return self.table.odd


def standard_chart(i: int) -> Chart:
    """Chart i of the 2|2 atlas: evens z1i, z2i and odds t1i, t2i."""
    return Chart(i, VarTable(even=(f"z1{i}", f"z2{i}"), odd=(f"t1{i}", f"t2{i}")))


class TransitionMap:
    """Coordinate change target <- source, one element per target coordinate."""

    __slots__ = ("source", "target", "assignment")

    def __init__(self, source: Chart, target: Chart, assignment: dict[str, SuperElem]):
        self.source = source
        self.target = target
        self.assignment = dict(assignment)
        want = set(target.table.names)
        got = set(self.assignment)
        if want != got:
            raise SuperError(f"assignment keys {sorted(got)} != target coordinates {sorted(want)}")
        for name, elem in self.assignment.items():
            if elem.table != source.table:
                raise SuperError(f"assignment for {name!r} not over the source table")
            if name in target.table.even and not elem.is_even():
                raise SuperError(f"even coordinate {name!r} assigned non-even element")
            if name in target.table.odd and not elem.is_odd():
                raise SuperError(f"odd coordinate {name!r} assigned non-odd element")

    def __eq__(self, other):
        if not isinstance(other, TransitionMap):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and self.assignment == other.assignment
        )

    def __repr__(self):
        rows = [f"{k} = {format_elem(v)}" for k, v in sorted(self.assignment.items())]
        return f"TransitionMap({self.target.index}<-{self.source.index}: " + "; ".join(rows) + ")"


def identity_map(chart: Chart) -> TransitionMap:
    assignment = {name: SuperElem.var(chart.table, name) for name in chart.table.names}
    return TransitionMap(chart, chart, assignment)


def compose(f: TransitionMap, g: TransitionMap) -> TransitionMap:
    """(f o g): target(f) <- source(g); requires source(f) == target(g)."""
    if f.source != g.target:
        raise SuperError(
            f"cannot compose: f has source chart {f.source.index}, g targets {g.target.index}"
        )
    assignment = {name: substitute(elem, g.assignment) for name, elem in f.assignment.items()}
    return TransitionMap(g.source, f.target, assignment)


def invert_map(f: TransitionMap) -> TransitionMap:
    """Exact two-sided inverse of a transition map.

    The even bodies must form an invertible monomial coordinate change (that
    is checked on the integer exponent matrix).  The odd part inverts as a
    linear system over the algebra, and a single Newton correction then kills
    the remaining even J-degree-2 error exactly since J^3 = 0.
    """
    src, tgt = f.source, f.target
    ne = len(src.table.even)
    if len(tgt.table.even) != ne or len(tgt.table.odd) != len(src.table.odd):
        raise SuperError("invert_map needs equal gradings on both charts")

    # 1. invert the monomial body map
    exps_rows: list[list[int]] = []
    coeffs: list[Fraction] = []
    for name in tgt.table.even:
        body = f.assignment[name].body()
        if len(body.terms) != 1:
            raise SuperError(f"body of {name!r} is not a single Laurent term")
        (exps, _mask), c = next(iter(body.terms.items()))
        exps_rows.append(list(exps))
        coeffs.append(c)
    inv_rows = _integer_inverse(exps_rows)

    g_assignment: dict[str, SuperElem] = {}
    for m, xname in enumerate(src.table.even):
        coeff = Fraction(1)
        exps = [0] * ne
        for l in range(ne):
            b = inv_rows[m][l]
            exps[l] = b
            coeff *= Fraction(coeffs[l]) ** -b
        g_assignment[xname] = SuperElem(tgt.table, {(tuple(exps), 0): coeff})

    # 2. odd part: theta'_l = sum_k M[l][k-] theta_k  inverts linearly
    nq = len(src.table.odd)
    if nq:
        M = [
            [deriv_odd_left(f.assignment[tname], sname) for sname in src.table.odd]
            for tname in tgt.table.odd
        ]
        for l, tname in enumerate(tgt.table.odd):
            linear = SuperElem.zero(src.table)
            for k, sname in enumerate(src.table.odd):
                linear = linear + M[l][k] * SuperElem.var(src.table, sname)
            if linear != f.assignment[tname]:
                raise SuperError(f"odd assignment for {tname!r} is not linear in the odd variables")
        even_part = {n: g_assignment[n] for n in src.table.even}
        Mt = [[substitute(entry, even_part) for entry in row] for row in M]
        from .supermat import _inv_even  # adjugate inverse over the algebra

        Minv = _inv_even(Mt, tgt.table)
        for k, sname in enumerate(src.table.odd):
            acc = SuperElem.zero(tgt.table)
            for l, tname in enumerate(tgt.table.odd):
                acc = acc + Minv[k][l] * SuperElem.var(tgt.table, tname)
            g_assignment[sname] = acc

    g = TransitionMap(tgt, src, g_assignment)

    # 3. one Newton step on the even coordinates
    h = compose(f, g)
    ident = identity_map(tgt)
    error = {
        name: h.assignment[name] - ident.assignment[name] for name in tgt.table.names
    }
    if all(e.is_zero() for e in error.values()):
        return g
    for name in tgt.table.odd:
        if not error[name].is_zero():
            raise SuperError(f"odd inversion residual for {name!r}: {format_elem(error[name])}")
    shift = {
        name: ident.assignment[name] - error[name] for name in tgt.table.names
    }
    g_fixed = {name: substitute(elem, shift) for name, elem in g.assignment.items()}
    g = TransitionMap(tgt, src, g_fixed)
    h = compose(f, g)
    if h != ident:
        raise SuperError("Newton correction failed to produce an exact inverse")
    return g


def _integer_inverse(rows: list[list[int]]) -> list[list[int]]:
    """Inverse of an integer matrix, required to be integral."""
    n = len(rows)
    aug = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(rows)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col]), None)
        if piv is None:
            raise SuperError("body exponent matrix is singular; not a coordinate change")
        aug[col], aug[piv] = aug[piv], aug[col]
        scale = aug[col][col]
        aug[col] = [v / scale for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                factor = aug[r][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[col])]
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            v = aug[i][n + j]
            if v.denominator != 1:
                raise SuperError("body map is not invertible as a monomial change")
            row.append(int(v))
        out.append(row)
    return out


def jacobian(f: TransitionMap) -> SuperMatrix:
    """Left-derivative Jacobian of f over the source chart.

    Rows: target coordinates, evens then odds; columns: source coordinates in
    the same order.  Blocks land as A = d(even)/d(even), B = d(even)/d(odd),
    C = d(odd)/d(even), D = d(odd)/d(odd).
    """
    src, tgt = f.source, f.target
    A = [[deriv_even(f.assignment[tn], sn) for sn in src.table.even] for tn in tgt.table.even]
    B = [[deriv_odd_left(f.assignment[tn], sn) for sn in src.table.odd] for tn in tgt.table.even]
    C = [[deriv_even(f.assignment[tn], sn) for sn in src.table.even] for tn in tgt.table.odd]
    D = [[deriv_odd_left(f.assignment[tn], sn) for sn in src.table.odd] for tn in tgt.table.odd]
    return SuperMatrix(src.table, A, B, C, D)


def compose_jacobians(f: TransitionMap, g: TransitionMap) -> SuperMatrix:
    """Chain rule for left-derivative Jacobians.

    For left derivatives the correct product is the graded-ordered one,
        J(f o g)[l][m] = sum_i J(g)[i][m] * (J(f)[l][i] o g),
    with the J(g) factor on the left.  (The naive matmul of the substituted
    matrices differs by Koszul signs and is NOT the chain rule here; this is
    asserted in the tests.)
    """
    if f.source != g.target:
        raise SuperError("compose_jacobians: charts do not line up")
    jf = jacobian(f).grid()
    jg = jacobian(g).grid()
    src_names = g.source.table.names
    mid_names = f.source.table.names
    tgt_names = f.target.table.names
    jf_sub = [[substitute(e, g.assignment) if not e.is_zero() else SuperElem.zero(g.source.table) for e in row] for row in jf]
    grid = []
    for l in range(len(tgt_names)):
        row = []
        for m in range(len(src_names)):
            acc = SuperElem.zero(g.source.table)
            for i in range(len(mid_names)):
                acc = acc + jg[i][m] * jf_sub[l][i]
            row.append(acc)
        grid.append(row)
    p = len(f.target.table.even)
    r = len(g.source.table.even)
    return SuperMatrix.from_grid(g.source.table, grid, p, r)


# -- atlases -----------------------------------------------------------------


class Atlas:
    """Charts plus transition maps keyed by (target, source) chart indices."""

    __slots__ = ("charts", "maps", "notes")

    def __init__(self, charts, maps, notes: tuple[str, ...] = ()):
        self.charts: dict[int, Chart] = {c.index: c for c in charts}
        self.maps: dict[tuple[int, int], TransitionMap] = dict(maps)
        self.notes = tuple(notes)
        for (i, j), f in self.maps.items():
            if f.target.index != i or f.source.index != j:
                raise SuperError(f"map stored at {(i, j)} connects {f.target.index}<-{f.source.index}")
            if i not in self.charts or j not in self.charts:
                raise SuperError(f"map {(i, j)} references an unknown chart")

    def map(self, i: int, j: int) -> TransitionMap:
        """The stored i <- j map."""
        try:
            return self.maps[(i, j)]
        except KeyError:
            raise SuperError(f"no transition map {i}<-{j} in atlas") from None

    def cyclic_pairs(self) -> list[tuple[int, int]]:
        return [(0, 1), (1, 2), (2, 0)]


@dataclass
class LoopReport:
    """Result of composing the three cyclic maps back to the start chart."""

    ok: bool
    residuals: dict[str, SuperElem]

    def nonzero(self) -> dict[str, str]:
        return {k: format_elem(v) for k, v in self.residuals.items() if not v.is_zero()}


def check_cocycle_loop(atlas: Atlas) -> LoopReport:
    """Compose (0<-1)(1<-2)(2<-0) and report per-coordinate residuals."""
    f01 = atlas.map(0, 1)
    f12 = atlas.map(1, 2)
    f20 = atlas.map(2, 0)
    loop = compose(compose(f01, f12), f20)
    ident = identity_map(atlas.charts[0])
    residuals = {
        name: loop.assignment[name] - ident.assignment[name]
        for name in atlas.charts[0].table.names
    }
    return LoopReport(ok=all(v.is_zero() for v in residuals.values()), residuals=residuals)


@dataclass
class CalabiYauReport:
    ok: bool
    berezinians: dict[tuple[int, int], SuperElem]

    def values(self) -> dict[tuple[int, int], Fraction]:
        return {k: v.constant_value() for k, v in self.berezinians.items()}


def is_calabi_yau(atlas: Atlas) -> CalabiYauReport:
    """All transition Berezinians must be nonzero constants."""
    bers: dict[tuple[int, int], SuperElem] = {}
    ok = True
    for key in sorted(atlas.maps):
        ber = berezinian(jacobian(atlas.maps[key]))
        bers[key] = ber
        if not (ber.is_constant() and not ber.is_zero()):
            ok = False
    return CalabiYauReport(ok=ok, berezinians=bers)


def even_remainder_derivation(f: TransitionMap) -> dict[str, SuperElem]:
    """J-degree >= 2 remainders of the even assignments, keyed by target name.

    These are the coefficients of the obstruction cochain: the target-chart
    derivation  sum_l remainder_l d/d(even_l)  with coefficients over the
    source chart.
    """
    out = {}
    for name in f.target.table.even:
        elem = f.assignment[name]
        out[name] = elem - truncate_J(elem, 2)
    return out


def pushforward_vector_field(
    v: dict[str, SuperElem], f: TransitionMap, max_j: int | None = None
) -> dict[str, SuperElem]:
    """Push a derivation through f: coefficients end up over the target chart.

    `v` maps source coordinate names to even coefficients over the source
    chart.  The result maps every target coordinate name to
    sum_m J(f)[l][m] * v[m], rewritten over the target chart through the exact
    inverse of f.  With `max_j` the result is truncated below that J-degree
    (the mod-J tangent computation).  The identity map returns v unchanged.
    """
    src = f.source
    for name, coeff in v.items():
        if name not in src.table.names:
            raise SuperError(f"derivation coefficient for unknown coordinate {name!r}")
        if coeff.table != src.table:
            raise SuperError("derivation coefficients must live over the source chart")
    jac = jacobian(f).grid()
    names_src = src.table.names
    names_tgt = f.target.table.names
    ginv = invert_map(f)
    out: dict[str, SuperElem] = {}
    for l, tname in enumerate(names_tgt):
        acc = SuperElem.zero(src.table)
        for m, sname in enumerate(names_src):
            coeff = v.get(sname)
            if coeff is None or coeff.is_zero():
                continue
            acc = acc + jac[l][m] * coeff
        if acc.is_zero():
            continue
        moved = substitute(acc, ginv.assignment)
        if max_j is not None:
            moved = truncate_J(moved, max_j)
        if not moved.is_zero():
            out[tname] = moved
    return out


# -- serialization -----------------------------------------------------------


def atlas_to_json(atlas: Atlas) -> str:
    """Deterministic JSON; round trips bit-exactly through atlas_from_json."""
    data = {
        "charts": [
            {
                "index": c.index,
                "even": list(c.table.even),
                "odd": list(c.table.odd),
            }
            for _, c in sorted(atlas.charts.items())
        ],
        "maps": {
            f"{i}<-{j}": {
                name: format_elem(elem)
                for name, elem in sorted(atlas.maps[(i, j)].assignment.items())
            }
            for (i, j) in sorted(atlas.maps)
        },
        "notes": list(atlas.notes),
    }
    return json.dumps(data, sort_keys=True, indent=1)


def atlas_from_json(text: str) -> Atlas:
    data = json.loads(text)
    charts = {}
    for entry in data["charts"]:
        c = Chart(int(entry["index"]), VarTable(tuple(entry["even"]), tuple(entry["odd"])))
        charts[c.index] = c
    maps = {}
    for key, assigns in data["maps"].items():
        tgt_s, src_s = key.split("<-")
        tgt, src = charts[int(tgt_s)], charts[int(src_s)]
        assignment = {name: parse(text, src.table) for name, text in assigns.items()}
        maps[(tgt.index, src.index)] = TransitionMap(src, tgt, assignment)
    return Atlas(charts.values(), maps, tuple(data.get("notes", ())))
