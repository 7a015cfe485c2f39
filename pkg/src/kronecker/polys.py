"""Dense univariate polynomial arithmetic over pluggable coefficient rings.

A polynomial is a tuple of ring elements in ascending order of exponent,
``(a0, a1, ..., an)`` for ``a0 + a1*T + ... + an*T**n``, with no trailing
zeros; the zero polynomial is the empty tuple.  Every function takes the
ring context as its last argument and only ever calls the small ring
protocol (``add``, ``sub``, ``mul``, ``neg``, ``inv``, ``from_int``,
``is_zero``, ``zero``, ``one``), so the same code runs over prime fields,
residue rings, extension fields, truncated power series and the rationals.

Operations that need division by arbitrary leading coefficients (gcd,
resultant, factorization) require a field context; Euclidean division by a
*monic* divisor works over any ring and is what the solver uses elsewhere.
"""

from math import gcd as _int_gcd, isqrt

from .errors import (
    CharacteristicTooSmallError,
    DuplicateNodeError,
    ModuliNotCoprimeError,
    NoReconstructionError,
    NotInvertibleError,
)

ZERO = ()


def normalize(f, R):
    """Strip trailing zero coefficients."""
    n = len(f)
    while n > 0 and R.is_zero(f[n - 1]):
        n -= 1
    return tuple(f[:n])


def degree(f):
    """Degree of f, with -1 for the zero polynomial."""
    return len(f) - 1


def leading(f):
    return f[-1]


def is_monic(f, R):
    return bool(f) and f[-1] == R.one


def from_int_coeffs(coeffs, R):
    return normalize([R.from_int(c) for c in coeffs], R)


def constant(c, R):
    return normalize((c,), R)


def poly_add(f, g, R):
    if len(f) < len(g):
        f, g = g, f
    out = list(f)
    for i, c in enumerate(g):
        out[i] = R.add(out[i], c)
    return normalize(out, R)


def poly_sub(f, g, R):
    n = max(len(f), len(g))
    out = []
    for i in range(n):
        a = f[i] if i < len(f) else R.zero
        b = g[i] if i < len(g) else R.zero
        out.append(R.sub(a, b))
    return normalize(out, R)


def poly_neg(f, R):
    return tuple(R.neg(c) for c in f)


def poly_mul(f, g, R):
    if not f or not g:
        return ZERO
    m = getattr(R, "int_modulus", None)
    if m is not None:
        # Integer coefficients: convolve over Z, one reduction per entry.
        out = [0] * (len(f) + len(g) - 1)
        for i, a in enumerate(f):
            if a:
                for j, b in enumerate(g):
                    out[i + j] += a * b
        return normalize([c % m for c in out], R)
    out = [R.zero] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if R.is_zero(a):
            continue
        for j, b in enumerate(g):
            out[i + j] = R.add(out[i + j], R.mul(a, b))
    return normalize(out, R)


def scalar_mul(c, f, R):
    if R.is_zero(c):
        return ZERO
    return normalize([R.mul(c, a) for a in f], R)


def poly_eval(f, x, R):
    """Horner evaluation at a ring element."""
    acc = R.zero
    for c in reversed(f):
        acc = R.add(R.mul(acc, x), c)
    return acc


def poly_deriv(f, R):
    return normalize([R.mul(R.from_int(i), f[i]) for i in range(1, len(f))], R)


def divmod_monic(f, g, R):
    """Quotient and remainder of f by a monic g, over any ring."""
    if not is_monic(g, R):
        raise ValueError("divisor must be monic")
    dg = degree(g)
    if dg == 0:
        return f, ZERO
    m = getattr(R, "int_modulus", None)
    if m is not None and len(f) > dg:
        # Integer coefficients: reduce multipliers as used, fold once at end.
        rem = list(f)
        quo = [0] * (len(f) - dg)
        for i in range(len(rem) - 1, dg - 1, -1):
            c = rem[i] % m
            if c:
                quo[i - dg] = c
                for j in range(dg):
                    rem[i - dg + j] -= c * g[j]
            rem[i] = 0
        return (
            normalize(quo, R),
            normalize([c % m for c in rem[:dg]], R),
        )
    rem = list(f)
    quo = [R.zero] * max(len(f) - dg, 0)
    for i in range(len(rem) - 1, dg - 1, -1):
        c = rem[i]
        if R.is_zero(c):
            continue
        quo[i - dg] = c
        for j in range(dg):
            rem[i - dg + j] = R.sub(rem[i - dg + j], R.mul(c, g[j]))
        rem[i] = R.zero
    return normalize(quo, R), normalize(rem, R)


def rem_monic(f, g, R):
    return divmod_monic(f, g, R)[1]


def poly_divmod(f, g, F):
    """Euclidean division over a field; g arbitrary nonzero."""
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    if g[-1] == F.one:
        return divmod_monic(f, g, F)
    lcinv = F.inv(g[-1])
    gm = scalar_mul(lcinv, g, F)
    q, r = divmod_monic(f, gm, F)
    return scalar_mul(lcinv, q, F), r


def poly_rem(f, g, F):
    return poly_divmod(f, g, F)[1]


def monic(f, F):
    if not f:
        return ZERO
    if f[-1] == F.one:
        return f
    return scalar_mul(F.inv(f[-1]), f, F)


def poly_pow_mod(f, e, q, R):
    """f**e reduced modulo a monic q, by binary powering."""
    result = (R.one,)
    base = rem_monic(f, q, R)
    while e > 0:
        if e & 1:
            result = rem_monic(poly_mul(result, base, R), q, R)
        e >>= 1
        if e:
            base = rem_monic(poly_mul(base, base, R), q, R)
    return result


def poly_gcd(f, g, F):
    """Monic greatest common divisor over a field."""
    a, b = f, g
    while b:
        a, b = b, poly_rem(a, b, F)
    return monic(a, F)


def poly_xgcd(f, g, F):
    """Extended Euclid over a field: returns (d, u, v) with u*f + v*g = d monic."""
    r0, r1 = f, g
    s0, s1 = (F.one,), ZERO
    t0, t1 = ZERO, (F.one,)
    while r1:
        q, r = poly_divmod(r0, r1, F)
        r0, r1 = r1, r
        s0, s1 = s1, poly_sub(s0, poly_mul(q, s1, F), F)
        t0, t1 = t1, poly_sub(t0, poly_mul(q, t1, F), F)
    if not r0:
        return ZERO, ZERO, ZERO
    c = F.inv(r0[-1])
    return scalar_mul(c, r0, F), scalar_mul(c, s0, F), scalar_mul(c, t0, F)


def poly_inverse_mod(f, q, F):
    """Inverse of f modulo q over a field; raises NotInvertibleError."""
    f = poly_rem(f, q, F)
    d, u, _ = poly_xgcd(f, q, F)
    if degree(d) != 0:
        raise NotInvertibleError(
            f"gcd with the modulus has degree {degree(d)}"
        )
    return poly_rem(u, q, F)


def resultant(f, g, F):
    """Resultant with the convention Res(f,g) = lc(f)**deg(g) * prod g(roots of f).

    Computed by the polynomial remainder sequence over the field, so shared
    roots yield exactly zero.
    """
    f = normalize(f, F)
    g = normalize(g, F)
    if not f:
        raise ValueError("resultant requires a nonzero first argument")
    if not g:
        return F.one if degree(f) == 0 else F.zero
    res = F.one
    a, b = f, g
    while True:
        da, db = degree(a), degree(b)
        if db == 0:
            return F.mul(res, _elem_pow(b[0], da, F))
        if da == 0:
            return F.mul(res, _elem_pow(a[0], db, F))
        r = poly_rem(a, b, F)
        if (da * db) % 2 == 1:
            res = F.neg(res)
        if not r:
            return F.zero
        res = F.mul(res, _elem_pow(b[-1], da - degree(r), F))
        a, b = b, r


def _elem_pow(a, e, R):
    acc = R.one
    base = a
    while e > 0:
        if e & 1:
            acc = R.mul(acc, base)
        e >>= 1
        if e:
            base = R.mul(base, base)
    return acc


def squarefree_part(f, F):
    """f / gcd(f, f'), monic; requires characteristic 0 or > deg f."""
    f = normalize(f, F)
    if degree(f) <= 0:
        return (F.one,) if f else ZERO
    char = getattr(F, "char", 0)
    if char and char <= degree(f):
        raise CharacteristicTooSmallError(
            f"characteristic {char} <= degree {degree(f)}"
        )
    g = poly_gcd(f, poly_deriv(f, F), F)
    if degree(g) == 0:
        return monic(f, F)
    q, r = poly_divmod(f, g, F)
    assert not r
    return monic(q, F)


def is_squarefree(f, F):
    return degree(poly_gcd(f, poly_deriv(f, F), F)) == 0


def _x_poly(F):
    return (F.zero, F.one)


def is_irreducible(f, F):
    """Irreducibility over a prime field via x**(p**d) == x plus proper-divisor gcds."""
    f = monic(f, F)
    d = degree(f)
    if d <= 0:
        return False
    if d == 1:
        return True
    p = F.p
    x = _x_poly(F)
    h = x
    for _ in range(d):
        h = poly_pow_mod(h, p, f, F)
    if poly_sub(h, x, F):
        return False
    for ell in _prime_divisors(d):
        h = x
        for _ in range(d // ell):
            h = poly_pow_mod(h, p, f, F)
        if degree(poly_gcd(poly_sub(h, x, F), f, F)) != 0:
            return False
    return True


def _prime_divisors(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def factor_squarefree(f, F, rng):
    """Irreducible factors of a monic squarefree polynomial over F_p, p odd.

    Distinct-degree splitting followed by Cantor-Zassenhaus equal-degree
    splitting; Las Vegas, retries internally until every split succeeds.
    The factor list is sorted canonically so output does not depend on the
    random path taken.
    """
    f = monic(f, F)
    if degree(f) <= 0:
        return []
    if degree(f) == 1:
        return [f]
    p = F.p
    x = _x_poly(F)
    out = []
    v = f
    h = rem_monic(x, v, F)
    d = 0
    while degree(v) >= 2 * (d + 1):
        d += 1
        h = poly_pow_mod(h, p, v, F)
        g = poly_gcd(poly_sub(h, x, F), v, F)
        if degree(g) > 0:
            out.extend(_equal_degree_split(g, d, F, rng))
            v = poly_divmod(v, g, F)[0]
            h = rem_monic(h, v, F)
    if degree(v) > 0:
        out.append(monic(v, F))
    out.sort(key=lambda q: (degree(q), q))
    return out


def _equal_degree_split(g, d, F, rng):
    if degree(g) == d:
        return [g]
    p = F.p
    exp = (p**d - 1) // 2
    while True:
        a = normalize([F.from_int(rng.randrange(p)) for _ in range(2 * d)], F)
        if degree(a) < 1:
            continue
        c = poly_pow_mod(a, exp, g, F)
        w = poly_gcd(poly_sub(c, (F.one,), F), g, F)
        if 0 < degree(w) < degree(g):
            left = _equal_degree_split(w, d, F, rng)
            right = _equal_degree_split(poly_divmod(g, w, F)[0], d, F, rng)
            return left + right


def interpolate(points, F):
    """Unique polynomial of degree < len(points) through the given nodes.

    Newton's divided differences over a field; nodes must be distinct.
    """
    if not points:
        raise ValueError("at least one interpolation point required")
    xs = [p[0] for p in points]
    seen = set()
    for x in xs:
        if x in seen:
            raise DuplicateNodeError(f"repeated node {x!r}")
        seen.add(x)
    n = len(points)
    coeffs = [p[1] for p in points]
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            num = F.sub(coeffs[i], coeffs[i - 1])
            den = F.sub(xs[i], xs[i - j])
            coeffs[i] = F.mul(num, F.inv(den))
    poly = ZERO
    for i in range(n - 1, -1, -1):
        poly = poly_mul(poly, (F.neg(xs[i]), F.one), F)
        poly = poly_add(poly, (coeffs[i],), F)
    return poly


def crt_polys(residues, F):
    """Chinese remaindering of (value, modulus) pairs with coprime moduli."""
    if not residues:
        raise ValueError("at least one residue required")
    v, q = residues[0]
    v = poly_rem(v, q, F)
    for v2, q2 in residues[1:]:
        d, u, _ = poly_xgcd(q, q2, F)
        if degree(d) != 0:
            raise ModuliNotCoprimeError(
                f"moduli share a factor of degree {degree(d)}"
            )
        diff = poly_sub(poly_rem(v2, q2, F), v, F)
        t = poly_rem(poly_mul(diff, u, F), q2, F)
        v = poly_add(v, poly_mul(q, t, F), F)
        q = poly_mul(q, q2, F)
    return poly_rem(v, q, F)


def rational_reconstruct(a, m, bound=None):
    """Recover num/den from a mod m with |num| <= B, 0 < den <= B, 2B**2 < m.

    The default bound is B = floor(sqrt(m/2)) (shrunk to keep 2B**2 < m
    strict).  Returns the reduced pair (num, den); raises
    NoReconstructionError when no fraction within the bound matches, which
    callers treat as "lift further".
    """
    if m <= 2:
        raise ValueError("modulus too small")
    if not 0 <= a < m:
        raise ValueError("residue out of range")
    if bound is None:
        bound = isqrt(m // 2)
        while bound > 1 and 2 * bound * bound >= m:
            bound -= 1
    if bound < 1 or 2 * bound * bound >= m:
        raise ValueError("bound must satisfy 2*B**2 < m")
    r0, r1 = m, a
    t0, t1 = 0, 1
    while r1 > bound:
        qq = r0 // r1
        r0, r1 = r1, r0 - qq * r1
        t0, t1 = t1, t0 - qq * t1
    if t1 == 0:
        raise NoReconstructionError(f"no fraction below bound {bound}")
    num, den = (r1, t1) if t1 > 0 else (-r1, -t1)
    g = _int_gcd(abs(num), den)
    if g > 1:
        num //= g
        den //= g
    if den > bound or abs(num) > bound or _int_gcd(den, m) != 1:
        raise NoReconstructionError(f"no fraction below bound {bound}")
    if (num - a * den) % m != 0:
        raise NoReconstructionError("candidate failed the congruence check")
    return num, den
