import random
from fractions import Fraction
from math import gcd

import pytest

from kronecker.errors import (
    CharacteristicTooSmallError,
    DuplicateNodeError,
    ModuliNotCoprimeError,
    NoReconstructionError,
    NotInvertibleError,
)
from kronecker.oracle import sylvester_det
from kronecker.polys import (
    crt_polys,
    degree,
    factor_squarefree,
    from_int_coeffs,
    interpolate,
    is_irreducible,
    monic,
    poly_eval,
    poly_gcd,
    poly_inverse_mod,
    poly_mul,
    poly_rem,
    rational_reconstruct,
    resultant,
    squarefree_part,
)
from kronecker.rings import QQ, PrimeField

F7 = PrimeField(7)
F101 = PrimeField(101)
FBIG = PrimeField(10007)


def fp(coeffs, F=F7):
    return from_int_coeffs(coeffs, F)


# -- gcd ----------------------------------------------------------------------


def test_gcd_shared_linear_factor():
    assert poly_gcd(fp([-1, 0, 1]), fp([-1, 1]), F7) == fp([-1, 1])


def test_gcd_coprime_quadratics():
    assert poly_gcd(fp([-1, 0, 1]), fp([1, 0, 1]), F7) == (1,)


def test_gcd_with_zero_is_monic():
    f = fp([2, 4, 6])
    assert poly_gcd(f, (), F7) == monic(f, F7)


# -- modular inverse ----------------------------------------------------------


def test_inverse_mod_doubled_variable():
    inv = poly_inverse_mod(fp([0, 2]), fp([-1, 0, 1]), F7)
    assert inv == fp([0, 4])  # 2T * 4T = 8T^2 = 8 = 1 mod (T^2-1, 7)


def test_inverse_mod_one():
    assert poly_inverse_mod((1,), fp([-1, 0, 1]), F7) == (1,)


def test_inverse_mod_shared_root_fails():
    with pytest.raises(NotInvertibleError):
        poly_inverse_mod(fp([-1, 1]), fp([-1, 0, 1]), F7)


def test_inverse_mod_property():
    rng = random.Random(0)
    q = fp([3, 0, 1, 1, 1], FBIG)
    for _ in range(25):
        f = from_int_coeffs([rng.randrange(10007) for _ in range(4)], FBIG)
        if not f:
            continue
        try:
            inv = poly_inverse_mod(f, q, FBIG)
        except NotInvertibleError:
            continue
        assert poly_rem(poly_mul(inv, f, FBIG), q, FBIG) == (1,)


# -- resultants ---------------------------------------------------------------


def test_resultant_two_linears():
    # Res(T - a, T - b) = a - b
    for a, b in [(2, 5), (0, 1), (6, 6)]:
        got = resultant(fp([-a, 1]), fp([-b, 1]), F7)
        assert got == (a - b) % 7


def test_resultant_quadratic_linear_over_q():
    f = from_int_coeffs([-1, 0, 1], QQ)
    g = from_int_coeffs([-3, 1], QQ)
    assert resultant(f, g, QQ) == Fraction(8)  # (1-3)(-1-3)


def test_resultant_with_unit_is_one():
    assert resultant(fp([3, 0, 1]), (1,), F7) == 1


def test_resultant_shared_factor_is_zero():
    f = poly_mul(fp([-1, 1]), fp([2, 1]), F7)
    g = poly_mul(fp([-1, 1]), fp([3, 1]), F7)
    assert resultant(f, g, F7) == 0


def test_resultant_matches_sylvester_determinant():
    rng = random.Random(1)
    for _ in range(40):
        df = rng.randrange(1, 7)
        dg = rng.randrange(1, 7)
        f = from_int_coeffs(
            [rng.randrange(101) for _ in range(df)] + [rng.randrange(1, 101)],
            F101,
        )
        g = from_int_coeffs(
            [rng.randrange(101) for _ in range(dg)] + [rng.randrange(1, 101)],
            F101,
        )
        assert resultant(f, g, F101) == sylvester_det(f, g, F101)


# -- squarefree part ----------------------------------------------------------


def test_squarefree_part_strips_multiplicity():
    # (T-1)^2 (T+2) -> (T-1)(T+2)
    sq = poly_mul(poly_mul(fp([-1, 1], FBIG), fp([-1, 1], FBIG), FBIG),
                  fp([2, 1], FBIG), FBIG)
    assert squarefree_part(sq, FBIG) == poly_mul(
        fp([-1, 1], FBIG), fp([2, 1], FBIG), FBIG
    )


def test_squarefree_part_of_squarefree_is_monic_self():
    f = fp([3, 1, 2], FBIG)
    assert squarefree_part(f, FBIG) == monic(f, FBIG)


def test_squarefree_part_of_constant_is_one():
    assert squarefree_part(fp([5], FBIG), FBIG) == (1,)


def test_squarefree_part_characteristic_guard():
    F5 = PrimeField(5)
    f = from_int_coeffs([1, 0, 0, 0, 0, 0, 1], F5)  # degree 6 > 5
    with pytest.raises(CharacteristicTooSmallError):
        squarefree_part(f, F5)


# -- factorization ------------------------------------------------------------


def test_factor_splits_difference_of_squares():
    rng = random.Random(2)
    got = factor_squarefree(fp([-1, 0, 1]), F7, rng)
    assert got == sorted([fp([-1, 1]), fp([1, 1])], key=lambda q: (degree(q), q))


def test_factor_keeps_irreducible_quadratic():
    F3 = PrimeField(3)
    f = from_int_coeffs([1, 0, 1], F3)  # no root in F_3
    got = factor_squarefree(f, F3, random.Random(0))
    assert got == [f]


def test_factor_four_rational_roots():
    rng = random.Random(3)
    f = fp([4, 0, -5, 0, 1])  # T^4 - 5T^2 + 4
    got = factor_squarefree(f, F7, rng)
    assert len(got) == 4
    for q in got:
        assert degree(q) == 1
        root = F7.neg(q[0])
        assert poly_eval(f, root, F7) == 0


def test_factor_product_and_irreducibility_property():
    rng = random.Random(4)
    for _ in range(15):
        deg = rng.randrange(2, 9)
        f = from_int_coeffs(
            [rng.randrange(101) for _ in range(deg)] + [1], F101
        )
        f = squarefree_part(f, F101)
        if degree(f) < 1:
            continue
        factors = factor_squarefree(f, F101, rng)
        prod = (1,)
        for q in factors:
            prod = poly_mul(prod, q, F101)
            assert is_irreducible(q, F101)
        assert prod == f


# -- interpolation ------------------------------------------------------------


def test_interpolate_line_through_origin_offset():
    assert interpolate([(0, 1), (1, 2)], F7) == fp([1, 1])


def test_interpolate_two_generic_points():
    assert interpolate([(1, 2), (2, 3)], F7) == fp([1, 1])


def test_interpolate_single_point_is_constant():
    assert interpolate([(4, 6)], F7) == fp([6])


def test_interpolate_duplicate_node_rejected():
    with pytest.raises(DuplicateNodeError):
        interpolate([(1, 2), (1, 3)], F7)


def test_interpolate_roundtrip_property():
    rng = random.Random(5)
    for _ in range(10):
        deg = rng.randrange(0, 6)
        f = from_int_coeffs(
            [rng.randrange(101) for _ in range(deg + 1)], F101
        )
        nodes = rng.sample(range(101), degree(f) + 1 if f else 1)
        pts = [(a, poly_eval(f, a, F101)) for a in nodes]
        assert interpolate(pts, F101) == f


# -- polynomial CRT -----------------------------------------------------------


def test_crt_two_linear_moduli():
    got = crt_polys([(fp([2]), fp([-1, 1])), (fp([3]), fp([-2, 1]))], F7)
    assert got == fp([1, 1])  # T + 1 hits 2 at T=1 and 3 at T=2


def test_crt_single_modulus_is_identity():
    v, q = fp([3, 1]), fp([1, 1, 1])
    assert crt_polys([(v, q)], F7) == v


def test_crt_all_zero_residues():
    got = crt_polys([((), fp([-1, 1])), ((), fp([-2, 1]))], F7)
    assert got == ()


def test_crt_rejects_non_coprime_moduli():
    with pytest.raises(ModuliNotCoprimeError):
        crt_polys([(fp([1]), fp([-1, 1])), (fp([2]), fp([-1, 0, 1]))], F7)


def test_crt_residues_property():
    rng = random.Random(6)
    for _ in range(10):
        moduli = []
        used = set()
        for _ in range(3):
            while True:
                root = rng.randrange(101)
                if root not in used:
                    used.add(root)
                    break
            moduli.append(from_int_coeffs([-root, 1], F101))
        residues = [
            (from_int_coeffs([rng.randrange(101)], F101), q) for q in moduli
        ]
        v = crt_polys(residues, F101)
        for res, q in residues:
            assert poly_rem(v, q, F101) == res


# -- rational reconstruction --------------------------------------------------


def test_rational_reconstruct_one_third():
    assert rational_reconstruct(3336, 10007) == (1, 3)


def test_rational_reconstruct_small_integer():
    assert rational_reconstruct(5, 1000003) == (5, 1)


def test_rational_reconstruct_half_residue():
    # floor(m/2) is congruent to -1/2: the reconstruction exists and is found.
    num, den = rational_reconstruct(10007 // 2, 10007)
    assert (num, den) == (-1, 2)
    # Cross-check by exhausting every fraction below the default bound.
    matches = [
        (u, v)
        for v in range(1, 71)
        for u in range(-70, 71)
        if (u - (10007 // 2) * v) % 10007 == 0
    ]
    assert (num, den) in matches


def test_rational_reconstruct_failure_detected():
    # m = 101 has bound 7; exhaustion shows no fraction matches a = 37.
    m, a = 101, 37
    bound = 7
    assert not [
        (u, v)
        for v in range(1, bound + 1)
        for u in range(-bound, bound + 1)
        if (u - a * v) % m == 0
    ]
    with pytest.raises(NoReconstructionError):
        rational_reconstruct(a, m)


def test_rational_reconstruct_roundtrip_property():
    rng = random.Random(7)
    p = 2305843009213693951
    m = p**2  # prime power above 2**62
    for _ in range(500):
        num = rng.randrange(-(2**30) + 1, 2**30)
        den = rng.randrange(1, 2**30)
        g = gcd(abs(num), den)
        num //= g
        den //= g
        a = num * pow(den, -1, m) % m
        assert rational_reconstruct(a, m) == (num, den)
