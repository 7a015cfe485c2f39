import random

import pytest

from kronecker.errors import NotInvertibleError, ParseError, SingularMatrixError
from kronecker.polys import interpolate, poly_deriv, poly_eval
from kronecker.rings import QQ, PolyRing, PrimeField
from kronecker.slp import (
    AffineChange,
    compose_affine,
    evaluate,
    evaluate_jacobian,
    parse_system,
)


def test_parse_length_mul_sub():
    slp = parse_system("vars x,y; x*y - 2;")
    assert slp.length == 2
    assert slp.n_vars == 2
    assert slp.degrees == (2,)


def test_parse_length_bare_load():
    slp = parse_system("vars x; x;")
    assert slp.length == 0
    assert slp.degrees == (1,)


def test_parse_length_repeated_squaring():
    slp = parse_system("vars x,y; x^2 + y^2 - 5;")
    assert slp.length == 4


def test_parse_power_chain_counts():
    # x^5 = ((x^2)^2) * x: three multiplications
    slp = parse_system("vars x; x^5;")
    assert slp.length == 3
    assert slp.degrees == (5,)


def test_parse_height_from_dense_coefficients():
    slp = parse_system("vars x; 100*x - 7;")
    assert slp.height == 7  # |100| needs 7 bits


def test_parse_syntax_error_reports_position():
    with pytest.raises(ParseError) as err:
        parse_system("vars x,y; x + $y;")
    assert err.value.position is not None


def test_parse_rejects_overdetermined():
    with pytest.raises(ParseError):
        parse_system("vars x; x; x - 1;")


def test_parse_rejects_zero_polynomial():
    with pytest.raises(ParseError):
        parse_system("vars x,y; x - x;")


def test_parse_rejects_unknown_variable():
    with pytest.raises(ParseError):
        parse_system("vars x; y;")


def test_evaluate_two_squares_at_point():
    slp = parse_system("vars x,y; x^2 + y^2 - 5;")
    assert evaluate(slp, (1, 2), PrimeField(7)) == [0]


def test_evaluate_identity():
    slp = parse_system("vars x; x;")
    F = PrimeField(101)
    for c in (0, 1, 55):
        assert evaluate(slp, (c,), F) == [c]


def test_evaluate_symbolic_point_in_poly_ring():
    # F = x*y - 2 at (p_1, T) over F_p[T] gives p_1*T - 2
    slp = parse_system("vars x,y; x*y - 2;")
    F = PrimeField(7)
    PR = PolyRing(F)
    val = evaluate(slp, (3, PR.gen), PR)[0]
    assert val == (5, 3)  # 3T - 2 = 3T + 5 mod 7


def test_compose_affine_shear():
    # F = x1, y1 = x1 + x2, y2 = x2  =>  composed F(y) = y1 - y2
    slp = parse_system("vars x,y; x;")
    change = AffineChange.from_matrix([[1, 1], [0, 1]])
    comp = compose_affine(slp, change)
    F = PrimeField(10007)
    for y1, y2 in [(5, 2), (0, 9), (123, 123)]:
        assert evaluate(comp, (y1, y2), F) == [(y1 - y2) % 10007]


def test_compose_affine_identity():
    slp = parse_system("vars x,y; x^2 + y^2 - 5;")
    comp = compose_affine(slp, AffineChange.identity(2))
    F = PrimeField(97)
    for pt in [(1, 2), (30, 4)]:
        assert evaluate(comp, pt, F) == evaluate(slp, pt, F)


def test_compose_affine_swap_is_symmetric():
    slp = parse_system("vars x,y; x*y;")
    comp = compose_affine(slp, AffineChange.from_matrix([[0, 1], [1, 0]]))
    F = PrimeField(97)
    for y1, y2 in [(3, 5), (10, 20)]:
        assert evaluate(comp, (y1, y2), F) == [(y1 * y2) % 97]


def test_compose_rejects_singular_matrix():
    with pytest.raises(SingularMatrixError):
        AffineChange.from_matrix([[1, 2], [2, 4]])


def test_compose_evaluation_needs_unit_determinant():
    slp = parse_system("vars x,y; x;")
    comp = compose_affine(slp, AffineChange.from_matrix([[7, 0], [0, 1]]))
    with pytest.raises(NotInvertibleError):
        evaluate(comp, (1, 1), PrimeField(7))


def test_compose_inverse_identity_property():
    # evaluate(compose(slp, change), change * x) == evaluate(slp, x)
    rng = random.Random(5)
    slp = parse_system("vars x,y,z; x^2*y - z + 3; x + y*z; z^3 - 2;")
    for F in (PrimeField(10007), QQ):
        for _ in range(8):
            while True:
                rows = [[rng.randrange(-4, 5) for _ in range(3)] for _ in range(3)]
                try:
                    change = AffineChange.from_matrix(rows)
                    break
                except SingularMatrixError:
                    continue
            comp = compose_affine(slp, change)
            x = tuple(rng.randrange(-9, 10) for _ in range(3))
            y = change.apply(x)
            assert evaluate(comp, y, F) == evaluate(slp, x, F)


def test_compose_length_overhead_is_quadratic():
    slp = parse_system("vars x,y,z; x*y*z - 1;")
    comp = compose_affine(slp, AffineChange.from_matrix(
        [[1, 1, 0], [0, 1, 1], [1, 0, 1]]
    ))
    assert comp.length <= slp.length + 2 * slp.n_vars**2


def test_jacobian_product_rule():
    slp = parse_system("vars x,y; x*y;")
    F = PrimeField(10007)
    vals, rows = evaluate_jacobian(slp, (3, 5), F, wrt=[0, 1], n_out=1)
    assert vals == [15]
    assert rows == [[5, 3]]


def test_jacobian_square_mod_small_prime():
    slp = parse_system("vars x; x^2 - 1;")
    F = PrimeField(7)
    vals, rows = evaluate_jacobian(slp, (3,), F, wrt=[0], n_out=1)
    assert vals == [(9 - 1) % 7]
    assert rows == [[6]]  # 2*3 mod 7


def test_jacobian_constant_row_is_zero():
    slp = parse_system("vars x,y; 5;")
    F = PrimeField(11)
    _, rows = evaluate_jacobian(slp, (1, 2), F, wrt=[0, 1], n_out=1)
    assert rows == [[0, 0]]


def _derivative_by_interpolation(slp, point, F, var, out, width):
    """Exact derivative oracle: interpolate the restriction of the output
    along one coordinate and differentiate the interpolant."""
    samples = []
    for k in range(width + 1):
        moved = list(point)
        moved[var] = F.add(point[var], F.from_int(k))
        samples.append((moved[var], evaluate(slp, moved, F)[out]))
    restriction = interpolate(samples, F)
    return poly_eval(poly_deriv(restriction, F), point[var], F)


def test_jacobian_matches_interpolated_derivatives():
    rng = random.Random(11)
    slp = parse_system(
        "vars x,y,z; x^3*y - 2*z + 1; x*y*z - y^2; z^4 - x - 7;"
    )
    F = PrimeField(10007)
    for _ in range(6):
        pt = tuple(rng.randrange(50) for _ in range(3))
        vals, rows = evaluate_jacobian(slp, pt, F, wrt=[0, 1, 2], n_out=3)
        assert vals == evaluate(slp, pt, F)
        for i in range(3):
            for j in range(3):
                want = _derivative_by_interpolation(slp, pt, F, j, i, 5)
                assert rows[i][j] == want


def test_jacobian_matches_central_differences_on_quadratics():
    # Central differences are exact for total degree <= 2.
    slp = parse_system("vars x,y; x^2 + 3*x*y - y + 4; y^2 - x;")
    F = PrimeField(10007)
    half = F.inv(2)
    for pt in [(3, 4), (100, 200)]:
        _, rows = evaluate_jacobian(slp, pt, F, wrt=[0, 1], n_out=2)
        for i in range(2):
            for j in range(2):
                up = list(pt)
                dn = list(pt)
                up[j] = F.add(up[j], 1)
                dn[j] = F.sub(dn[j], 1)
                diff = F.sub(
                    evaluate(slp, up, F)[i], evaluate(slp, dn, F)[i]
                )
                assert rows[i][j] == F.mul(diff, half)


def test_jacobian_matches_dense_symbolic_derivative():
    slp = parse_system("vars x,y; x^4 - 2*x*y^3 + y - 1; x^2*y^2 + 5;")
    F = PrimeField(101)
    rng = random.Random(3)

    def dense_partial(dense, var, pt):
        total = 0
        for mono, coeff in dense.items():
            if mono[var] == 0:
                continue
            term = coeff * mono[var]
            for v, e in enumerate(mono):
                e2 = e - 1 if v == var else e
                term *= pt[v] ** e2
            total += term
        return total % 101

    for _ in range(10):
        pt = tuple(rng.randrange(101) for _ in range(2))
        _, rows = evaluate_jacobian(slp, pt, F, wrt=[0, 1], n_out=2)
        for i in range(2):
            for j in range(2):
                assert rows[i][j] == dense_partial(slp.dense_forms[i], j, pt)


def test_jacobian_with_affine_change_chain_rule():
    slp = parse_system("vars x,y; x^2*y - 3;")
    change = AffineChange.from_matrix([[2, 1], [1, 1]])
    comp = compose_affine(slp, change)
    F = PrimeField(10007)
    pt = (9, 4)
    _, rows = evaluate_jacobian(comp, pt, F, wrt=[0, 1], n_out=1)
    for j in range(2):
        want = _derivative_by_interpolation(comp, pt, F, j, 0, 4)
        assert rows[0][j] == want
