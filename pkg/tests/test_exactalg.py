import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from artifact.exactalg import (
    AffineExpr,
    AmplMatrix,
    DivisionByZero,
    DimensionMismatch,
    LaurentPoly,
    Q,
    RatFunc,
    mat_mul,
    mat_tensor,
    solve_affine,
)
from artifact.kauffman import bracket_event

from conftest import laurent, nonzero_ratfunc, ratfunc

q = LaurentPoly.monomial
CASES = settings(max_examples=1000)


def test_difference_of_squares():
    assert (q(1) + q(-1)) * (q(1) - q(-1)) == q(2) - q(-2)


def test_unit_cancellation():
    assert q(1) * q(-1) == LaurentPoly.const(1)


def test_closed_loop_expansion():
    assert (-q(1)) * q(1) + q(-1) * (-q(-1)) == -q(2) - q(-2)


def test_zero_is_empty():
    assert LaurentPoly({3: 0, -1: 0}).coeffs == {}
    assert not LaurentPoly()


def test_parse_and_print_roundtrip():
    p = LaurentPoly.parse("-2q^-14 + 2q^-4 + 4q^-2 + 5 + 4q^2 + 2q^4 - 2q^14")
    assert str(p) == "-2q^-14 + 2q^-4 + 4q^-2 + 5 + 4q^2 + 2q^4 - 2q^14"
    assert LaurentPoly.parse(str(p)) == p


def test_ratfunc_reduces_common_factor():
    assert RatFunc(q(2) - 1, q(1) - 1) == RatFunc(q(1) + 1)
    assert RatFunc(q(2) - 1, q(1) - 1).is_poly()


def test_ratfunc_sum_and_inverse():
    assert RatFunc(1, q(1)) + RatFunc(1, q(1)) == RatFunc(2, q(1))
    x = RatFunc(q(1) - q(-3))
    assert x * x.inverse() == RatFunc(1)


def test_ratfunc_division_by_zero():
    with pytest.raises(DivisionByZero):
        RatFunc(1, 0)
    with pytest.raises(DivisionByZero):
        RatFunc(q(1)) / RatFunc(0)


def test_ratfunc_canonical_denominator():
    r = RatFunc(q(-1), 2 * q(3) - 4 * q(1))
    den = r.den
    assert den.min_exp() >= 0
    assert den.coeffs[den.max_exp()] > 0
    assert math.gcd(r.num.content(), den.content()) == 1
    assert r == RatFunc(q(-2), q(2) - 2) / 2


@CASES
@given(laurent(), laurent(), laurent())
def test_laurent_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a and a * b == b * a
    assert a - a == LaurentPoly()


@CASES
@given(ratfunc(), ratfunc(), nonzero_ratfunc())
def test_ratfunc_field_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * c) / c == a
    assert c * c.inverse() == RatFunc(1)
    assert a - b + b == a


@CASES
@given(ratfunc(), ratfunc())
def test_ratfunc_equality_matches_cross_multiplication(a, b):
    assert (a == b) == (a.num * b.den == b.num * a.den)


def test_identity_products():
    i4 = AmplMatrix.identity(4)
    assert mat_mul(i4, i4) == i4
    assert mat_tensor(AmplMatrix.identity(2), AmplMatrix.identity(2)) == i4


def test_rii_from_generators():
    assert mat_mul(bracket_event("NW"), bracket_event("NE")) == AmplMatrix.identity(4)


def test_cap_after_cup():
    loop = mat_mul(bracket_event("Cap"), bracket_event("Cup"))
    assert loop.shape == (1, 1)
    assert loop[0, 0] == -q(2) - q(-2)


def test_tensor_with_cup():
    m = mat_tensor(AmplMatrix.identity(2), bracket_event("Cup"))
    assert m.shape == (8, 2)
    # e0 -> e0 (x) cup, e1 -> e1 (x) cup
    assert m[1, 0] == -q(1) and m[2, 0] == q(-1)
    assert m[5, 1] == -q(1) and m[6, 1] == q(-1)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        mat_mul(AmplMatrix.identity(2), AmplMatrix.identity(4))


@st.composite
def small_matrix(draw, rows=None, cols=None):
    r = rows if rows is not None else draw(st.sampled_from([1, 2, 4]))
    c = cols if cols is not None else draw(st.sampled_from([1, 2, 4]))
    ent = {}
    for i in range(r):
        for j in range(c):
            if draw(st.booleans()):
                ent[(i, j)] = draw(laurent(max_terms=2, span=2, bound=3))
    return AmplMatrix(r, c, ent)


@CASES
@given(small_matrix(), small_matrix(), small_matrix())
def test_tensor_shape_and_associativity(a, b, c):
    ab = mat_tensor(a, b)
    assert ab.shape == (a.shape[0] * b.shape[0], a.shape[1] * b.shape[1])
    assert mat_tensor(ab, c) == mat_tensor(a, mat_tensor(b, c))


@settings(max_examples=1000)
@given(st.data())
def test_mixed_product_law(data):
    a = data.draw(small_matrix())
    b = data.draw(small_matrix())
    c = data.draw(small_matrix(cols=None, rows=a.shape[1]))
    d = data.draw(small_matrix(rows=b.shape[1]))
    lhs = mat_mul(mat_tensor(a, b), mat_tensor(c, d))
    assert lhs == mat_tensor(mat_mul(a, c), mat_mul(b, d))


@CASES
@given(small_matrix(), small_matrix(), small_matrix())
def test_matrix_product_associative(a, b, c):
    b2 = AmplMatrix(a.shape[1], b.shape[1], {k: v for k, v in b.items() if k[0] < a.shape[1]})
    c2 = AmplMatrix(b2.shape[1], c.shape[1], {k: v for k, v in c.items() if k[0] < b2.shape[1]})
    assert mat_mul(mat_mul(a, b2), c2) == mat_mul(a, mat_mul(b2, c2))


def test_solve_two_unknowns():
    x, y = AffineExpr.param("x"), AffineExpr.param("y")
    sol = solve_affine([x + y - 1, x - y], ["x", "y"])
    assert (sol.rank, sol.affine_rank) == (2, 0)
    assert sol.particular == {"x": RatFunc.from_fraction(Fraction(1, 2)), "y": RatFunc.from_fraction(Fraction(1, 2))}


def test_solve_empty_system():
    params = [f"p{i}" for i in range(102)]
    sol = solve_affine([], params)
    assert (sol.rank, sol.affine_rank) == (0, 102)


def test_solve_inconsistent():
    x = AffineExpr.param("x")
    sol = solve_affine([x - 1, x - 2], ["x"])
    assert sol.affine_rank == -1 and not sol.consistent


@st.composite
def affine_system(draw):
    names = ["a", "b", "c", "d", "e"]
    eqs = []
    for _ in range(draw(st.integers(1, 4))):
        terms = {n: draw(ratfunc()) for n in names if draw(st.booleans())}
        eqs.append(AffineExpr(draw(ratfunc()), terms))
    return names, eqs


@settings(max_examples=150)
@given(affine_system(), st.lists(st.integers(-5, 5), min_size=5, max_size=5))
def test_solution_family_satisfies_every_equation(system, values):
    names, eqs = system
    sol = solve_affine(eqs, names)
    if not sol.consistent:
        return
    pt = sol.point({f: v for f, v in zip(sol.free_params, values)})
    for e in eqs:
        assert not e.substitute(pt)


def test_solver_deterministic():
    x, y, z = (AffineExpr.param(n) for n in "xyz")
    eqs = [x * RatFunc(Q) + y - 1, y - z * RatFunc(Q + 1)]
    a, b = solve_affine(eqs, "xyz"), solve_affine(eqs, "xyz")
    assert a.general == b.general and a.free_params == b.free_params == ["z"]
