"""Block-graded matrices: product, determinant, inverse, Berezinian, row reduction."""

import random
from fractions import Fraction

import pytest

from supergeo import (
    SuperElem,
    SuperError,
    SuperMatrix,
    VarTable,
    berezinian,
    berezinian_alt,
    det_even,
    inverse,
    matmul,
    parse,
    standard_form,
)
from supergeo.families import big_cell
from supergeo.selfcheck import TABLE, random_supermatrix

from oracles import perm_det

T = VarTable(("z11", "z21"), ("t11", "t21"))


def E(text, table=T):
    return parse(text, table)


def diag_matrix(a_texts, d_texts, table=T):
    p, q = len(a_texts), len(d_texts)
    zero = SuperElem.zero(table)
    A = [[E(a_texts[i], table) if i == j else zero for j in range(p)] for i in range(p)]
    D = [[E(d_texts[i], table) if i == j else zero for j in range(q)] for i in range(q)]
    B = [[zero] * q for _ in range(p)]
    C = [[zero] * p for _ in range(q)]
    return SuperMatrix(table, A, B, C, D)


# ---------------------------------------------------------------------------
# det_even
# ---------------------------------------------------------------------------


def test_det_diag():
    grid = [[E("z11^-1"), E("0")], [E("0"), E("z11^-2")]]
    assert det_even(grid) == E("z11^-3")


def test_det_identity():
    grid = [[E("1"), E("0")], [E("0"), E("1")]]
    assert det_even(grid) == SuperElem.one(T)


def test_det_cotangent_block():
    grid = [[E("-z11^-2"), E("0")], [E("-z21*z11^-2"), E("z11^-1")]]
    assert det_even(grid) == E("-z11^-3")


def test_det_rejects_bad_input():
    with pytest.raises(SuperError):
        det_even([[E("1"), E("0")]])
    with pytest.raises(SuperError):
        det_even([[E("t11")]])


def test_det_matches_permutation_expansion():
    rng = random.Random(20260814)
    for _ in range(25):
        n = rng.choice([2, 3])
        grid = []
        for _ in range(n):
            row = []
            for _ in range(n):
                terms = {}
                for _ in range(rng.randrange(3)):
                    key = ((rng.randint(-2, 2), rng.randint(-2, 2)), rng.choice([0, 3]))
                    terms[key] = terms.get(key, Fraction(0)) + Fraction(
                        rng.randint(-3, 3), rng.randint(1, 3)
                    )
                row.append(SuperElem(T, terms))
            grid.append(row)
        expected = perm_det(grid)
        if expected is None:
            expected = SuperElem.zero(T)
        assert det_even(grid) == expected


def test_det_multiplicative_on_commuting_grids():
    rng = random.Random(99)
    for _ in range(10):
        def rand_grid():
            return [
                [
                    SuperElem(
                        T,
                        {
                            ((rng.randint(-1, 1), rng.randint(-1, 1)), rng.choice([0, 3])): Fraction(
                                rng.randint(1, 3)
                            )
                        },
                    )
                    for _ in range(2)
                ]
                for _ in range(2)
            ]

        X, Y = rand_grid(), rand_grid()
        prod = [
            [sum((X[i][k] * Y[k][j] for k in range(2)), SuperElem.zero(T)) for j in range(2)]
            for i in range(2)
        ]
        assert det_even(prod) == det_even(X) * det_even(Y)


# ---------------------------------------------------------------------------
# construction and product
# ---------------------------------------------------------------------------


def test_parity_check_on_construction():
    zero = SuperElem.zero(T)
    with pytest.raises(SuperError):
        SuperMatrix(T, [[E("t11")]], [[zero]], [[zero]], [[E("1")]])
    with pytest.raises(SuperError):
        SuperMatrix(T, [[E("1")]], [[E("z11")]], [[zero]], [[E("1")]])


def test_matmul_identity():
    X = random_supermatrix(random.Random(5))
    I = SuperMatrix.identity(TABLE, 2, 2)
    assert matmul(X, I) == X
    assert matmul(I, X) == X


def test_matmul_diag_inverse_pair():
    X = diag_matrix(["z11", "z11"], ["1", "1"])
    Y = diag_matrix(["z11^-1", "z11^-1"], ["1", "1"])
    assert matmul(X, Y) == SuperMatrix.identity(T, 2, 2)


def test_matmul_dimension_mismatch():
    X = SuperMatrix.identity(T, 2, 2)
    Y = SuperMatrix.identity(T, 1, 1)
    with pytest.raises(SuperError):
        matmul(X, Y)


def test_matmul_associative():
    rng = random.Random(17)
    X, Y, Z = (random_supermatrix(rng) for _ in range(3))
    assert matmul(matmul(X, Y), Z) == matmul(X, matmul(Y, Z))


# ---------------------------------------------------------------------------
# inverse
# ---------------------------------------------------------------------------


def test_inverse_identity():
    I = SuperMatrix.identity(T, 2, 2)
    assert inverse(I) == I


def test_inverse_diag():
    X = diag_matrix(["z11"], ["z11^2"])
    assert inverse(X) == diag_matrix(["z11^-1"], ["z11^-2"])


def test_inverse_two_sided_random():
    rng = random.Random(4242)
    I = SuperMatrix.identity(TABLE, 2, 2)
    for _ in range(8):
        X = random_supermatrix(rng)
        Xi = inverse(X)
        assert matmul(X, Xi) == I
        assert matmul(Xi, X) == I


def test_inverse_requires_invertible_blocks():
    zero = SuperElem.zero(T)
    X = SuperMatrix(T, [[zero]], [[zero]], [[zero]], [[E("1")]])
    with pytest.raises(SuperError):
        inverse(X)


# ---------------------------------------------------------------------------
# Berezinian
# ---------------------------------------------------------------------------


def test_berezinian_identity():
    assert berezinian(SuperMatrix.identity(T, 2, 2)) == SuperElem.one(T)


def test_berezinian_diag():
    X = diag_matrix(["z11^2"], ["z11^3"])
    assert berezinian(X) == E("z11^-1")


def test_berezinian_multiplicative():
    rng = random.Random(314159)
    for _ in range(8):
        X, Y = random_supermatrix(rng), random_supermatrix(rng)
        assert berezinian(matmul(X, Y)) == berezinian(X) * berezinian(Y)


def test_berezinian_of_inverse():
    rng = random.Random(2718)
    one = SuperElem.one(TABLE)
    for _ in range(6):
        X = random_supermatrix(rng)
        assert berezinian(X) * berezinian(inverse(X)) == one


def test_berezinian_conventions_agree():
    rng = random.Random(1618)
    for _ in range(8):
        X = random_supermatrix(rng)
        assert berezinian(X) == berezinian_alt(X)


# ---------------------------------------------------------------------------
# standard form of big cells
# ---------------------------------------------------------------------------


def test_standard_form_already_reduced():
    Z0 = big_cell(0)
    assert standard_form(Z0, 0) == Z0


def test_standard_form_reads_off_chart_change():
    Z1 = big_cell(1)
    W = standard_form(Z1, 0)
    table = Z1.table
    # even row carries the new even coordinates ...
    assert W.entry(0, 0) == SuperElem.one(table)
    assert W.entry(0, 1) == parse("z11^-1", table)
    assert W.entry(0, 2) == parse("z21/z11 + t11*t21/z11^2", table)
    # ... and, via the odd-column block, the new odd coordinates
    assert W.entry(0, 3).is_zero()
    assert W.entry(0, 4) == parse("-t11/z11^2", table)
    assert W.entry(0, 5) == parse("-z21*t11/z11^2 + t21/z11", table)


def test_standard_form_idempotent():
    W = standard_form(big_cell(2), 1)
    assert standard_form(W, 1) == W


def test_standard_form_rejects_singular_minor():
    zero = SuperElem.zero(T)
    Z = SuperMatrix(
        T,
        [[zero, E("1")]],
        [[E("t11"), zero]],
        [[E("-t11"), zero]],
        [[zero, E("1")]],
    )
    with pytest.raises(SuperError):
        standard_form(Z, 0)
