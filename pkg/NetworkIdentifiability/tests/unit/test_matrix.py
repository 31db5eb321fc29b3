from fractions import Fraction

import pytest
from sympy import Matrix

from netident.errors import DivisionByZero, ImproperEntry, InvariantError, SingularMatrix
from netident.ratfun import (
    ONE,
    ZERO,
    RatMatrix,
    RationalFunction,
    adjugate,
    cofactor,
    determinant,
    evaluate,
    first_order,
    kernel_basis,
    limit_at_infinity,
    mat_inverse,
    normal_rank,
    parse_rational,
    probabilistic_rank,
    product,
    sampled_rank,
)
from netident.settings import load_settings, use_settings


def _crossed_diamond_identity_minus_g():
    # entry (j-1, i-1) holds G_ji for edge (i, j); every weight 1/z
    g = RatMatrix.zeros(5, 5)
    for i, j in [(1, 2), (1, 3), (2, 4), (2, 5), (3, 4), (3, 5)]:
        g = g.with_entry(j - 1, i - 1, "1/z")
    return RatMatrix.identity(5) - g


def test_inverse_of_nilpotent_network():
    t = mat_inverse(_crossed_diamond_identity_minus_g())
    assert t[3, 0] == RationalFunction.from_coeffs([2], [0, 0, 1])
    assert t[3, 1] == parse_rational("1/z")
    assert t[0, 0] == ONE
    assert t[0, 3] == ZERO
    assert determinant(_crossed_diamond_identity_minus_g()) == ONE


def test_inverse_round_trip():
    a = RatMatrix.from_rows([["z", 1], [2, "1/z"]])
    inv = mat_inverse(a)
    assert inv @ a == RatMatrix.identity(2)
    assert a @ inv == RatMatrix.identity(2)


def test_one_by_one():
    a = RatMatrix.from_rows([["(z+1)/z"]])
    assert determinant(a) == parse_rational("(z+1)/z")
    assert mat_inverse(a)[0, 0] == parse_rational("z/(z+1)")
    assert adjugate(a) == RatMatrix.identity(1)
    assert normal_rank(a) == 1


def test_determinant_examples():
    assert determinant(RatMatrix.from_rows([["z", 1], [1, "z"]])) == parse_rational("z^2-1")
    assert determinant(RatMatrix.from_rows([["1/z", 1], [1, "z"]])) == ZERO
    assert determinant(RatMatrix.from_rows([[0, 1], [1, 0]])) == RationalFunction.const(-1)
    assert determinant(RatMatrix(0, 0, ())) == ONE
    with pytest.raises(InvariantError):
        determinant(RatMatrix.zeros(2, 3))


def test_singular_inverse():
    with pytest.raises(SingularMatrix):
        mat_inverse(RatMatrix.from_rows([["1/z", 1], [1, "z"]]))
    with pytest.raises(SingularMatrix):
        mat_inverse(RatMatrix.zeros(3, 3))


@pytest.mark.parametrize(
    "rows, rank",
    [
        ([["1/z", 1], [1, "z"]], 1),
        ([[1, "1/z"], [0, 1]], 2),
        ([[0, 0], [0, 0]], 0),
        ([["1/z", "1/z"], ["1/z", "1/z"], [1, 2]], 2),
        ([["z", "z^2", "z^3"]], 1),
    ],
)
def test_normal_rank(rows, rank):
    assert normal_rank(RatMatrix.from_rows(rows)) == rank


def test_adjugate_identity():
    a = RatMatrix.from_rows([["z", 1], [2, "1/z"]])
    adj = adjugate(a)
    assert adj == RatMatrix.from_rows([["1/z", -1], [-2, "z"]])
    assert a @ adj == RatMatrix.identity(2).scale(determinant(a))
    assert cofactor(a, 0, 1) == RationalFunction.const(-2)


def test_adjugate_three_by_three():
    a = RatMatrix.from_rows([["z", 1, 0], [0, "1/z", 2], [1, 0, "z+1"]])
    assert a @ adjugate(a) == RatMatrix.identity(3).scale(determinant(a))


def test_kernel_basis():
    basis = kernel_basis(RatMatrix.from_rows([[1, 1], [1, 1]]))
    assert basis == [(RationalFunction.const(-1), ONE)]
    assert kernel_basis(RatMatrix.identity(2)) == []
    a = RatMatrix.from_rows([["1/z", "1/z^2"]])
    (w,) = kernel_basis(a)
    assert (a @ RatMatrix.column_vector(w)).is_zero()


def test_limit_at_infinity():
    a = RatMatrix.from_rows([["1/z", "(2*z+1)/(z-1)"], [3, 0]])
    assert limit_at_infinity(a) == [[0, 2], [3, 0]]
    with pytest.raises(ImproperEntry):
        limit_at_infinity(RatMatrix.from_rows([[1, "z"]]))


def test_evaluate():
    a = RatMatrix.from_rows([["1/z", "z+1"]])
    assert evaluate(a, 2) == [[Fraction(1, 2), Fraction(3)]]


def test_probabilistic_rank_matches_normal_rank():
    singular = RatMatrix.from_rows([["1/z", 1], [1, "z"]])
    full = RatMatrix.from_rows([[1, "1/z"], [0, "1/(z-3)"]])
    assert probabilistic_rank(singular, seed=5) == 1
    assert probabilistic_rank(full, seed=5) == 2
    assert probabilistic_rank(RatMatrix.zeros(2, 2)) == 0


def test_sampled_rank_skips_small_points_and_rejected_ones():
    seen = []

    def values_at(x):
        seen.append(x)
        if x % 2:
            raise DivisionByZero(f"pole at {x}")
        return Matrix([[1, 0], [0, 0]])

    assert sampled_rank(values_at, points=4, bound=50, seed=3, coefficient_bound=20) == 1
    assert all(20 < abs(x) <= 50 for x in seen)
    assert sum(1 for x in seen if x % 2 == 0) == 4


def test_probabilistic_rank_uses_oracle_bounds(tmp_path):
    config = tmp_path / "config.yaml"
    config.write_text("oracle:\n  coefficient_bound: 90\n  evaluation_bound: 100\n", encoding="utf-8")
    # a pole at every integer with 90 < |z| <= 100
    poles = RatMatrix.from_rows([[product(first_order(1, b) for b in range(-100, 101) if abs(b) > 90)]])
    assert probabilistic_rank(poles, seed=1) == 1
    use_settings(load_settings(config))
    with pytest.raises(InvariantError):
        probabilistic_rank(poles, seed=1)


def test_shape_checks():
    with pytest.raises(InvariantError):
        RatMatrix.zeros(2, 3) @ RatMatrix.zeros(2, 3)
    with pytest.raises(InvariantError):
        RatMatrix.zeros(2, 2) + RatMatrix.zeros(3, 3)
    with pytest.raises(InvariantError):
        RatMatrix(2, 2, ((ONE, ZERO),))


def test_submatrix_and_transpose():
    a = RatMatrix.from_rows([[1, 2, 3], [4, 5, 6]])
    assert a.submatrix([1], [2, 0]) == RatMatrix.from_rows([[6, 4]])
    assert a.transpose().shape == (3, 2)
    assert a.transpose()[2, 1] == RationalFunction.const(6)
    assert a.nonzero_positions()[0] == (0, 0)
    assert a.to_literals()[1] == ["4", "5", "6"]
