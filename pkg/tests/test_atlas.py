"""Charts, transition maps, cocycle loops, Jacobians, pushforwards, JSON."""

from fractions import Fraction

import pytest

from supergeo import (
    Atlas,
    SuperElem,
    SuperError,
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
    matmul,
    parse,
    pushforward_vector_field,
    standard_chart,
    substitute,
)
from supergeo.families import build_decomposable, build_omega1, build_pi_plane
from supergeo.supermat import SuperMatrix


def test_standard_chart_names():
    c = standard_chart(1)
    assert c.table.even == ("z11", "z21")
    assert c.table.odd == ("t11", "t21")
    assert c.index == 1


def test_transition_map_validation():
    c0, c1 = standard_chart(0), standard_chart(1)
    t1 = c1.table
    good = {
        "z10": parse("z11^-1", t1),
        "z20": parse("z21/z11", t1),
        "t10": parse("t11/z11", t1),
        "t20": parse("t21/z11^2", t1),
    }
    TransitionMap(c1, c0, good)
    with pytest.raises(SuperError):
        TransitionMap(c1, c0, {**good, "t10": parse("z11", t1)})  # parity
    with pytest.raises(SuperError):
        TransitionMap(c1, c0, {k: v for k, v in good.items() if k != "z20"})
    with pytest.raises(SuperError):
        TransitionMap(c1, c0, {**good, "z10": parse("z10^-1", c0.table)})


# ---------------------------------------------------------------------------
# composition and inversion
# ---------------------------------------------------------------------------


def test_compose_with_identity():
    atlas = build_decomposable(Fraction(1))
    f = atlas.map(0, 1)
    assert compose(f, identity_map(atlas.charts[1])) == f
    assert compose(identity_map(atlas.charts[0]), f) == f


def test_compose_equals_inverse_of_third():
    atlas = build_decomposable(Fraction(1))
    f02 = compose(atlas.map(0, 1), atlas.map(1, 2))
    assert f02 == invert_map(atlas.map(2, 0))


def test_invert_identity():
    c = standard_chart(0)
    assert invert_map(identity_map(c)) == identity_map(c)


def test_invert_decomposable_01_frozen():
    atlas = build_decomposable(Fraction(1))
    g = invert_map(atlas.map(0, 1))
    t0 = standard_chart(0).table
    assert g.assignment == {
        "z11": parse("z10^-1", t0),
        "z21": parse("-z10^-2*t10*t20 + z10^-1*z20", t0),
        "t11": parse("z10^-1*t10", t0),
        "t21": parse("z10^-2*t20", t0),
    }


def test_invert_linear_diag():
    c = standard_chart(0)
    t = c.table
    f = TransitionMap(
        c,
        c,
        {
            "z10": parse("2*z10", t),
            "z20": parse("3*z20", t),
            "t10": parse("t10", t),
            "t20": parse("t20", t),
        },
    )
    g = invert_map(f)
    assert g.assignment["z10"] == parse("1/2*z10", t)
    assert g.assignment["z20"] == parse("1/3*z20", t)


@pytest.mark.parametrize("family", [build_decomposable, build_omega1])
@pytest.mark.parametrize("lam", [Fraction(1), Fraction(2)])
def test_invert_round_trip(family, lam):
    atlas = family(lam)
    for (i, j), f in atlas.maps.items():
        g = invert_map(f)
        assert compose(f, g) == identity_map(atlas.charts[i])
        assert compose(g, f) == identity_map(atlas.charts[j])


def test_invert_rejects_non_monomial_body():
    c = standard_chart(0)
    t = c.table
    f = TransitionMap(
        c,
        c,
        {
            "z10": parse("z10 + z20", t),
            "z20": parse("z20", t),
            "t10": parse("t10", t),
            "t20": parse("t20", t),
        },
    )
    with pytest.raises(SuperError):
        invert_map(f)


# ---------------------------------------------------------------------------
# cocycle loop
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("family", [build_decomposable, build_omega1])
@pytest.mark.parametrize("lam", [Fraction(0), Fraction(1), Fraction(3, 2)])
def test_loop_closes(family, lam):
    report = check_cocycle_loop(family(lam))
    assert report.ok
    assert report.nonzero() == {}
    assert set(report.residuals) == {"z10", "z20", "t10", "t20"}


def test_loop_detects_flipped_correction_sign():
    atlas = build_decomposable(Fraction(1))
    t1 = standard_chart(1).table
    bad = dict(atlas.map(0, 1).assignment)
    bad["z20"] = parse("z21/z11 - t11*t21/z11^2", t1)
    maps = dict(atlas.maps)
    maps[(0, 1)] = TransitionMap(standard_chart(1), standard_chart(0), bad)
    report = check_cocycle_loop(Atlas(atlas.charts.values(), maps))
    assert not report.ok
    assert set(report.nonzero()) == {"z20"}


# ---------------------------------------------------------------------------
# Jacobians and the graded chain rule
# ---------------------------------------------------------------------------


def test_jacobian_frozen_blocks():
    # target rows z10, z20, t10, t20; source columns z11, z21, t11, t21
    atlas = build_decomposable(Fraction(1))
    t1 = standard_chart(1).table
    grid = jacobian(atlas.map(0, 1)).grid()
    expected = [
        ["-z11^-2", "0", "0", "0"],
        ["-z21*z11^-2 - 2*t11*t21/z11^3", "z11^-1", "t21/z11^2", "-t11/z11^2"],
        ["-t11/z11^2", "0", "z11^-1", "0"],
        ["-2*t21/z11^3", "0", "0", "z11^-2"],
    ]
    for i in range(4):
        for j in range(4):
            assert grid[i][j] == parse(expected[i][j], t1), (i, j)


@pytest.mark.parametrize("family", [build_decomposable, build_omega1])
def test_chain_rule_graded(family):
    atlas = family(Fraction(1))
    for f, g in [
        (atlas.map(0, 1), atlas.map(1, 2)),
        (atlas.map(1, 2), atlas.map(2, 0)),
        (atlas.map(2, 0), atlas.map(0, 1)),
    ]:
        assert compose_jacobians(f, g) == jacobian(compose(f, g))


def test_naive_matrix_chain_rule_fails():
    # multiplying the Jacobian matrices while ignoring the grading of the
    # intermediate coordinates produces a wrong sign on mixed second-order
    # terms; the error is concentrated in one even entry
    atlas = build_decomposable(Fraction(1))
    f, g = atlas.map(0, 1), atlas.map(1, 2)
    Jf, Jg = jacobian(f), jacobian(g)
    moved = [
        [substitute(e, g.assignment) for e in row] for row in Jf.grid()
    ]
    naive = matmul(
        SuperMatrix.from_grid(g.source.table, moved, 2, 2), Jg
    ).grid()
    true = jacobian(compose(f, g)).grid()
    diffs = {
        (i, j): naive[i][j] - true[i][j]
        for i in range(4)
        for j in range(4)
        if naive[i][j] != true[i][j]
    }
    t2 = standard_chart(2).table
    assert diffs == {
        (1, 1): parse("6*z12^-2*z22^-2*t12*t22", t2),
        (2, 2): parse("-2*z12^-2*z22^-1*t12*t22", t2),
        (3, 3): parse("-4*z12^-3*z22^-1*t12*t22", t2),
    }


# ---------------------------------------------------------------------------
# Berezinian flag, remainders, pushforward
# ---------------------------------------------------------------------------


def test_calabi_yau_flag_and_values():
    dec = is_calabi_yau(build_decomposable(Fraction(2)))
    assert dec.ok
    assert dec.values() == {(0, 1): -1, (1, 2): -1, (2, 0): 1}
    om = is_calabi_yau(build_omega1(Fraction(2)))
    assert om.ok
    assert om.values() == {(0, 1): 1, (1, 2): 1, (2, 0): 1}
    pi = is_calabi_yau(build_pi_plane())
    assert pi.ok
    assert pi.values() == {(0, 1): 1, (1, 2): 1, (2, 0): 1}


def test_even_remainder_derivation():
    atlas = build_decomposable(Fraction(2))
    t1 = standard_chart(1).table
    rem = even_remainder_derivation(atlas.map(0, 1))
    assert rem["z10"].is_zero()
    assert rem["z20"] == parse("2*t11*t21/z11^2", t1)


def test_pushforward_identity():
    c = standard_chart(0)
    t = c.table
    v = {"z10": parse("z10^2", t), "t10": parse("3", t)}
    assert pushforward_vector_field(v, identity_map(c)) == v


def test_pushforward_affine_frame():
    atlas = build_decomposable(Fraction(1))
    t0, t1 = standard_chart(0).table, standard_chart(1).table
    v = {"z11": SuperElem.one(t1)}
    out = pushforward_vector_field(v, atlas.map(0, 1), max_j=1)
    assert out == {"z10": parse("-z10^2", t0), "z20": parse("-z10*z20", t0)}


def test_pushforward_rejects_bad_input():
    atlas = build_decomposable(Fraction(1))
    t0 = standard_chart(0).table
    with pytest.raises(SuperError):
        pushforward_vector_field({"bogus": SuperElem.one(t0)}, atlas.map(0, 1))
    with pytest.raises(SuperError):
        pushforward_vector_field({"z11": SuperElem.one(t0)}, atlas.map(0, 1))


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def test_atlas_json_round_trip():
    atlas = build_omega1(Fraction(3, 2))
    text = atlas_to_json(atlas)
    back = atlas_from_json(text)
    assert back.maps == atlas.maps
    assert back.notes == atlas.notes
    assert sorted(back.charts) == sorted(atlas.charts)
    assert atlas_to_json(back) == text


def test_atlas_requires_consistent_keys():
    atlas = build_decomposable(Fraction(1))
    maps = dict(atlas.maps)
    maps[(1, 0)] = maps.pop((0, 1))
    with pytest.raises(SuperError):
        Atlas(atlas.charts.values(), maps)
    with pytest.raises(SuperError):
        Atlas(atlas.charts.values(), atlas.maps).map(0, 2)
