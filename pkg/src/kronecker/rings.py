"""Coefficient ring contexts shared by the circuit and polynomial code.

Each context exposes the same small protocol: ``zero``, ``one``, ``add``,
``sub``, ``mul``, ``neg``, ``from_int``, ``is_zero``, ``is_unit`` and
``inv``.  Elements are ordinary Python values:

* ``PrimeField`` / ``ResidueRing`` -- ints reduced into [0, modulus);
* ``ExtField`` / ``SeriesRing``    -- tuples of ints (ascending powers);
* ``Rationals``                    -- ``fractions.Fraction``;
* ``PolyRing`` / ``PolyQuotient``  -- coefficient tuples over the base ring.

Everything is immutable and hashable, so contexts and elements can be shared
freely across threads.
"""

from fractions import Fraction

from . import polys
from .errors import NotInvertibleError
from .primes import is_probable_prime


def ceil_log2(n):
    """Smallest k with 2**k >= n, for n >= 1."""
    if n < 1:
        raise ValueError("argument must be positive")
    return (n - 1).bit_length()


class PrimeField:
    """F_p for an odd (probable) prime p."""

    is_field = True

    def __init__(self, p, check=True):
        if check and (p <= 2 or not is_probable_prime(p)):
            raise ValueError(f"{p} is not an odd prime")
        self.p = p
        self.char = p
        self.int_modulus = p
        self.zero = 0
        self.one = 1 % p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return -a % self.p

    def from_int(self, n):
        return n % self.p

    def is_zero(self, a):
        return a == 0

    def is_unit(self, a):
        return a % self.p != 0

    def inv(self, a):
        try:
            return pow(a, -1, self.p)
        except ValueError:
            raise NotInvertibleError(f"{a} has no inverse mod {self.p}") from None

    def rand(self, rng):
        return rng.randrange(self.p)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("PrimeField", self.p))

    def __repr__(self):
        return f"PrimeField({self.p})"


class ResidueRing:
    """Z / p**k, the target of one p-adic doubling ladder."""

    is_field = False

    def __init__(self, p, k):
        if k < 1:
            raise ValueError("exponent must be >= 1")
        self.p = p
        self.k = k
        self.modulus = p**k
        self.int_modulus = p**k
        self.char = self.modulus
        self.zero = 0
        self.one = 1 % self.modulus
        # Nilpotency index of the maximal ideal; drives inverse-lifting depth.
        self.nilpotency = k

    def add(self, a, b):
        return (a + b) % self.modulus

    def sub(self, a, b):
        return (a - b) % self.modulus

    def mul(self, a, b):
        return (a * b) % self.modulus

    def neg(self, a):
        return -a % self.modulus

    def from_int(self, n):
        return n % self.modulus

    def is_zero(self, a):
        return a == 0

    def is_unit(self, a):
        return a % self.p != 0

    def inv(self, a):
        try:
            return pow(a, -1, self.modulus)
        except ValueError:
            raise NotInvertibleError(f"{a} has no inverse mod p**{self.k}") from None

    def residue_field(self):
        return PrimeField(self.p, check=False)

    def residue(self, a):
        return a % self.p

    def embed(self, a):
        """Canonical lift of a residue-field element."""
        return a % self.modulus

    def __repr__(self):
        return f"ResidueRing({self.p}, {self.k})"


class Rationals:
    """The field Q with Fraction elements."""

    is_field = True
    char = 0

    def __init__(self):
        self.zero = Fraction(0)
        self.one = Fraction(1)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def from_int(self, n):
        return Fraction(n)

    def is_zero(self, a):
        return a == 0

    def is_unit(self, a):
        return a != 0

    def inv(self, a):
        if a == 0:
            raise NotInvertibleError("zero is not invertible")
        return 1 / Fraction(a)

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("Rationals")

    def __repr__(self):
        return "Rationals()"


QQ = Rationals()


class Integers:
    """The ring Z; division only for units (+-1)."""

    is_field = False
    char = 0
    zero = 0
    one = 1

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def from_int(self, n):
        return int(n)

    def is_zero(self, a):
        return a == 0

    def is_unit(self, a):
        return a in (1, -1)

    def inv(self, a):
        if a in (1, -1):
            return a
        raise NotInvertibleError(f"{a} is not a unit in Z")

    def __repr__(self):
        return "Integers()"


ZZ = Integers()


class ExtField:
    """F_p[x]/(q) for q irreducible; elements are coefficient tuples over F_p."""

    is_field = True

    def __init__(self, base, modulus):
        self.base = base
        self.modulus = polys.normalize(modulus, base)
        if polys.degree(self.modulus) < 1 or not polys.is_monic(self.modulus, base):
            raise ValueError("modulus must be monic of positive degree")
        self.deg = polys.degree(self.modulus)
        self.p = base.p
        self.char = base.p
        self.size = base.p**self.deg
        self.zero = ()
        self.one = (1,)
        self.gen = polys.rem_monic((0, 1), self.modulus, base)

    def add(self, a, b):
        return polys.poly_add(a, b, self.base)

    def sub(self, a, b):
        return polys.poly_sub(a, b, self.base)

    def mul(self, a, b):
        return polys.rem_monic(polys.poly_mul(a, b, self.base), self.modulus, self.base)

    def neg(self, a):
        return polys.poly_neg(a, self.base)

    def from_int(self, n):
        return polys.constant(n % self.p, self.base)

    def embed(self, a):
        """Embed a base-field element."""
        return polys.constant(a, self.base)

    def is_zero(self, a):
        return len(a) == 0

    def is_unit(self, a):
        return len(a) != 0

    def inv(self, a):
        return polys.poly_inverse_mod(a, self.modulus, self.base)

    def rand(self, rng):
        return polys.normalize(
            [rng.randrange(self.p) for _ in range(self.deg)], self.base
        )

    def __repr__(self):
        return f"ExtField(p={self.p}, deg={self.deg})"


class SeriesRing:
    """F[t]/(t**prec): truncated power series over a field."""

    is_field = False

    def __init__(self, field, prec):
        if prec < 1:
            raise ValueError("precision must be >= 1")
        self.field = field
        self.prec = prec
        self.char = field.char
        self.zero = ()
        self.one = (field.one,)
        self.nilpotency = prec

    def _trim(self, coeffs):
        coeffs = coeffs[: self.prec]
        return polys.normalize(coeffs, self.field)

    def add(self, a, b):
        return self._trim(list(polys.poly_add(a, b, self.field)))

    def sub(self, a, b):
        return self._trim(list(polys.poly_sub(a, b, self.field)))

    def mul(self, a, b):
        if not a or not b:
            return ()
        F = self.field
        n = min(len(a) + len(b) - 1, self.prec)
        m = getattr(F, "int_modulus", None)
        if m is not None:
            out = [0] * n
            for i, c in enumerate(a):
                if c and i < n:
                    top = min(len(b), n - i)
                    for j in range(top):
                        out[i + j] += c * b[j]
            return polys.normalize([c % m for c in out], F)
        out = [F.zero] * n
        for i, c in enumerate(a):
            if F.is_zero(c) or i >= n:
                continue
            top = min(len(b), n - i)
            for j in range(top):
                out[i + j] = F.add(out[i + j], F.mul(c, b[j]))
        return polys.normalize(out, F)

    def neg(self, a):
        return polys.poly_neg(a, self.field)

    def from_int(self, n):
        return polys.constant(self.field.from_int(n), self.field)

    def is_zero(self, a):
        return len(a) == 0

    def is_unit(self, a):
        return bool(a) and not self.field.is_zero(a[0])

    def inv(self, a):
        if not self.is_unit(a):
            raise NotInvertibleError("series with zero constant term")
        F = self.field
        inv0 = F.inv(a[0])
        b = (inv0,)
        # Newton: b <- b*(2 - a*b), doubling correct coefficients each pass.
        two = self.from_int(2)
        steps = ceil_log2(self.prec) if self.prec > 1 else 0
        for _ in range(steps):
            b = self.mul(b, self.sub(two, self.mul(a, b)))
        return b

    def residue_field(self):
        return self.field

    def residue(self, a):
        return a[0] if a else self.field.zero

    def embed(self, a):
        return polys.constant(a, self.field)

    def shifted_variable(self, base_value):
        """The series base_value + t."""
        return self._trim([self.field.from_int(base_value), self.field.one])

    def __repr__(self):
        return f"SeriesRing({self.field!r}, prec={self.prec})"


class PolyRing:
    """R[T] with no reduction; used to evaluate circuits at symbolic points."""

    is_field = False

    def __init__(self, base):
        self.base = base
        self.char = base.char
        self.zero = ()
        self.one = (base.one,)
        self.gen = (base.zero, base.one)

    def add(self, a, b):
        return polys.poly_add(a, b, self.base)

    def sub(self, a, b):
        return polys.poly_sub(a, b, self.base)

    def mul(self, a, b):
        return polys.poly_mul(a, b, self.base)

    def neg(self, a):
        return polys.poly_neg(a, self.base)

    def from_int(self, n):
        return polys.constant(self.base.from_int(n), self.base)

    def embed(self, a):
        return polys.constant(a, self.base)

    def is_zero(self, a):
        return len(a) == 0

    def is_unit(self, a):
        return polys.degree(a) == 0 and self.base.is_unit(a[0])

    def inv(self, a):
        if not self.is_unit(a):
            raise NotInvertibleError("only degree-0 units are invertible in R[T]")
        return (self.base.inv(a[0]),)

    def __repr__(self):
        return f"PolyRing({self.base!r})"


class PolyQuotient:
    """R[T]/(q) for a monic q over the base ring R.

    When R is a field, inverses come from the extended Euclidean algorithm
    (failure signals a zero divisor, e.g. a non-squarefree modulus).  When R
    is a truncated local ring (SeriesRing, ResidueRing), an element is a unit
    iff its image in the residue quotient F_p[T]/(q mod m) is, and the inverse
    is Newton-lifted from there.
    """

    is_field = False

    def __init__(self, base, modulus):
        self.base = base
        self.modulus = polys.normalize(modulus, base)
        if not polys.is_monic(self.modulus, base):
            raise ValueError("modulus must be monic")
        self.deg = polys.degree(self.modulus)
        self.char = base.char
        self.zero = ()
        self.one = (base.one,) if self.deg > 0 else ()
        self.gen = polys.rem_monic((base.zero, base.one), self.modulus, base)

    def reduce(self, f):
        return polys.rem_monic(polys.normalize(f, self.base), self.modulus, self.base)

    def add(self, a, b):
        return polys.poly_add(a, b, self.base)

    def sub(self, a, b):
        return polys.poly_sub(a, b, self.base)

    def mul(self, a, b):
        return polys.rem_monic(polys.poly_mul(a, b, self.base), self.modulus, self.base)

    def neg(self, a):
        return polys.poly_neg(a, self.base)

    def from_int(self, n):
        c = self.base.from_int(n)
        if self.deg == 0:
            return ()
        return polys.normalize((c,), self.base)

    def embed(self, a):
        if self.deg == 0:
            return ()
        return polys.normalize((a,), self.base)

    def is_zero(self, a):
        return len(a) == 0

    def _residue_quotient(self):
        F = self.base.residue_field()
        qbar = polys.normalize(
            [self.base.residue(c) for c in self.modulus], F
        )
        return F, qbar

    def is_unit(self, a):
        try:
            self.inv(a)
            return True
        except NotInvertibleError:
            return False

    def _at_precision(self, prec):
        base = self.base
        if isinstance(base, ResidueRing):
            low = ResidueRing(base.p, prec)
            q = tuple(c % low.modulus for c in self.modulus)
            return PolyQuotient(low, q)
        if isinstance(base, SeriesRing):
            low = SeriesRing(base.field, prec)
            q = tuple(low._trim(list(c)) for c in self.modulus)
            return PolyQuotient(low, q)
        raise TypeError(f"no precision ladder over {base!r}")

    def inv(self, a):
        if self.base.is_field:
            return polys.poly_inverse_mod(a, self.modulus, self.base)
        F, qbar = self._residue_quotient()
        abar = polys.normalize([self.base.residue(c) for c in a], F)
        v0 = polys.poly_inverse_mod(abar, qbar, F)
        # Newton-lift the inverse, climbing the precision ladder so early
        # iterations run over small truncations.
        v = polys.normalize([self.base.embed(c) for c in v0], self.base)
        prec = 1
        full = max(self.base.nilpotency, 1)
        while prec < full:
            prec = min(2 * prec, full)
            A = self if prec == full else self._at_precision(prec)
            av = a if prec == full else A.reduce_precision(a)
            vv = v if prec == full else A.reduce_precision(v)
            two = A.from_int(2)
            v = A.mul(vv, A.sub(two, A.mul(av, vv)))
        return v

    def reduce_precision(self, a):
        base = self.base
        if isinstance(base, ResidueRing):
            return polys.normalize([c % base.modulus for c in a], base)
        return polys.normalize([base._trim(list(c)) for c in a], base)

    def __repr__(self):
        return f"PolyQuotient({self.base!r}, deg={self.deg})"


def coerce(R, x):
    """Embed plain ints into R; pass ring elements through unchanged."""
    if isinstance(x, int):
        return R.from_int(x)
    return x
