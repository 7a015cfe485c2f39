"""Runtime certification of fiber representations.

Every "lucky prime" condition the solver relies on is checked directly on
the computed objects: monicity, squarefreeness, Bezout degree budgets,
Jacobian invertibility on the fiber, and the residual membership identity
F_i(point, T, V(T)) = 0 mod Q(T).  Rational representations can additionally
be checked modulo fresh primes (Monte Carlo) or exactly over Q.
"""

import random
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

from .errors import BudgetExceededError, NotInvertibleError, UnluckyError
from .polys import (
    degree,
    divmod_monic,
    is_monic,
    is_squarefree,
    poly_add,
    poly_deriv,
    poly_mul,
)
from .primes import random_prime_in_range
from .rings import ZZ, PolyQuotient, PolyRing, PrimeField, Rationals, ResidueRing
from .slp import evaluate_jacobian
from .solver import (
    FiberRepresentation,
    det_division_free,
    fiber_coordinates,
    kronecker_residuals,
    residuals,
    to_univariate,
)

VERIFY_PRIME_LOW = 2**59
VERIFY_PRIME_HIGH = 2**62 - 1


@dataclass
class CheckReport:
    clauses: list

    @property
    def passed(self):
        return all(ok for _, ok, _ in self.clauses)

    def failed_clauses(self):
        return [(name, detail) for name, ok, detail in self.clauses if not ok]

    def to_dict(self):
        return {
            "passed": self.passed,
            "clauses": [
                {"name": name, "ok": ok, "detail": detail}
                for name, ok, detail in self.clauses
            ],
        }


class _ScaledQuotient:
    """Z[S]/(q) with one tracked denominator per element.

    Elements are (integer coefficient tuple, positive denominator); all
    additions and multiplications stay in Z, so exact rational residual
    checks avoid per-coefficient fraction normalization entirely.
    """

    is_field = False
    char = 0

    def __init__(self, modulus):
        self.modulus = modulus
        self.deg = degree(modulus)
        self.zero = ((), 1)
        self.one = ((1,), 1)
        self.gen = (divmod_monic((0, 1), modulus, ZZ)[1], 1)

    # Content reduction only once the denominator gets heavy: the gcd scans
    # cost more than the size they save on small operands.
    _REDUCE_BITS = 2048

    def _reduce(self, num, den):
        if not num:
            return ((), 1)
        if den == 1 or den.bit_length() < self._REDUCE_BITS:
            return (tuple(num), den)
        g = gcd(den, *(abs(c) for c in num))
        if g > 1:
            num = tuple(c // g for c in num)
            den //= g
        return (tuple(num), den)

    def add(self, a, b):
        (na, da), (nb, db) = a, b
        g = gcd(da, db)
        scale_a = db // g
        scale_b = da // g
        num = poly_add(
            tuple(c * scale_a for c in na),
            tuple(c * scale_b for c in nb),
            ZZ,
        )
        return self._reduce(num, da * scale_a)

    def sub(self, a, b):
        (nb, db) = b
        return self.add(a, (tuple(-c for c in nb), db))

    def neg(self, a):
        (na, da) = a
        return (tuple(-c for c in na), da)

    def mul(self, a, b):
        (na, da), (nb, db) = a, b
        num = divmod_monic(poly_mul(na, nb, ZZ), self.modulus, ZZ)[1]
        return self._reduce(num, da * db)

    def from_int(self, n):
        return ((int(n),), 1) if n else ((), 1)

    def embed(self, x):
        x = Fraction(x)
        return self._reduce((x.numerator,), x.denominator)

    def is_zero(self, a):
        return not a[0]

    def is_unit(self, a):
        return len(a[0]) == 1

    def inv(self, a):
        # Needed only for rational constants (e.g. change-of-variables
        # determinants); general quotient inversion is never used here.
        (num, den) = a
        if len(num) != 1:
            raise NotInvertibleError("only constants are inverted here")
        k = num[0]
        return self._reduce((den if k > 0 else -den,), abs(k))


def _exact_kronecker_residuals(slp, rep):
    """Division-free and fraction-free residuals of a rational Kronecker rep.

    Rescales the primitive variable T = S/c (c clearing the denominators of
    Q) so the modulus becomes integer and monic, then runs the W_j*U
    substitution of kronecker_residuals over the scaled integer quotient.
    """
    q = rep.min_poly
    delta = degree(q)
    c = 1
    for coeff in q:
        c = lcm(c, Fraction(coeff).denominator)
    scaled_modulus = tuple(
        int(Fraction(q[i]) * c ** (delta - i)) for i in range(delta + 1)
    )
    A = _ScaledQuotient(scaled_modulus)

    def convert(coeffs):
        # f(T) with T = S/c: sum a_i S^i / c^i as one (numerator, den) pair
        items = [Fraction(a) / c**i for i, a in enumerate(coeffs)]
        den = 1
        for a in items:
            den = lcm(den, a.denominator)
        num = divmod_monic(
            tuple(int(a * den) for a in items), scaled_modulus, ZZ
        )[1]
        return A._reduce(num, den)

    PR = PolyRing(A)
    coords = []
    for j in range(rep.prim_var):
        coords.append(PR.embed(A.embed(rep.point[j])))
    coords.append(PR.embed(convert((0, 1))))
    for j in range(rep.prim_var + 1, slp.n_vars):
        w = convert(rep.params[j])
        coords.append((A.zero, w) if not A.is_zero(w) else PR.zero)
    from .slp import evaluate

    vals = evaluate(slp, coords, PR)
    qp = convert(poly_deriv(rep.min_poly, rep.ring))
    out = []
    for expansion in vals[: rep.stage]:
        top = len(expansion) - 1
        acc = A.zero
        power = A.one
        for k in range(top, -1, -1):
            acc = A.add(acc, A.mul(expansion[k], power))
            if k:
                power = A.mul(power, qp)
        out.append(acc[0])
    return out


def _residual_clauses(rep, slp, clauses):
    if rep.form == "kronecker" and isinstance(rep.ring, Rationals):
        vals = _exact_kronecker_residuals(slp, rep)
    elif rep.form == "kronecker":
        vals = kronecker_residuals(slp, rep)
    else:
        try:
            uni = to_univariate(rep)
        except NotInvertibleError:
            clauses.append(
                ("residual", False, "cannot convert to univariate form")
            )
            return
        vals = residuals(slp, uni)
    for i, v in enumerate(vals):
        ok = len(v) == 0
        clauses.append(
            (
                f"residual F_{i + 1}",
                ok,
                "vanishes mod Q" if ok else "nonzero residual",
            )
        )


def check_representation(rep, slp, *, exact=False, fresh_primes=1, rng=None):
    """Structural and membership checks for a fiber representation.

    Prime-field and residue-ring representations are checked directly.  For
    rational representations the residual is checked modulo ``fresh_primes``
    independently drawn large primes, plus exactly over Q when ``exact``.
    """
    R = rep.ring
    clauses = []
    clauses.append(
        ("monic", is_monic(rep.min_poly, R), "leading coefficient is one")
    )
    deg = degree(rep.min_poly)
    for j, w in rep.params.items():
        if degree(w) >= deg:
            clauses.append(
                (f"degree W_{j}", False, "parametrization degree >= deg Q")
            )
    if isinstance(R, Rationals):
        clauses.append(
            ("squarefree", is_squarefree(rep.min_poly, R), "gcd(Q, Q') = 1")
        )
        rng = rng or random.Random(0)
        for k in range(fresh_primes):
            p, rep_p = _reduce_with_fresh_prime(rep, rng)
            sub = CheckReport([])
            _residual_clauses(rep_p, slp, sub.clauses)
            clauses.append(
                (
                    f"residual mod fresh prime #{k + 1}",
                    sub.passed,
                    f"p = {p}",
                )
            )
        if exact:
            sub = CheckReport([])
            _residual_clauses(rep, slp, sub.clauses)
            clauses.append(
                ("exact residual over Q", sub.passed, "checked exactly")
            )
    elif isinstance(R, ResidueRing):
        F = R.residue_field()
        qbar = tuple(R.residue(c) for c in rep.min_poly)
        clauses.append(
            ("squarefree mod p", is_squarefree(qbar, F), "gcd(Q, Q') = 1")
        )
        _residual_clauses(rep, slp, clauses)
    else:
        clauses.append(
            ("squarefree", is_squarefree(rep.min_poly, R), "gcd(Q, Q') = 1")
        )
        _residual_clauses(rep, slp, clauses)
    return CheckReport(clauses)


def check_stage(rep, slp, budget):
    """Lucky-prime surrogate checks for one modular stage."""
    F = rep.ring
    clauses = []
    deg = rep.fiber_degree
    clauses.append(
        (
            "degree",
            1 <= deg <= budget,
            f"deg Q = {deg}, Bezout budget {budget}",
        )
    )
    clauses.append(("monic", is_monic(rep.min_poly, F), ""))
    sqf = is_squarefree(rep.min_poly, F)
    clauses.append(("squarefree", sqf, "gcd(Q, Q') = 1"))
    if sqf:
        uni = to_univariate(rep)
        A = PolyQuotient(F, uni.min_poly)
        coords = fiber_coordinates(
            slp.n_vars, uni.prim_var, uni.point, uni.params, A
        )
        wrt = list(range(uni.prim_var, slp.n_vars))
        vals, jac = evaluate_jacobian(slp, coords, A, wrt, n_out=rep.stage)
        for i, v in enumerate(vals):
            clauses.append(
                (f"residual F_{i + 1}", len(v) == 0, "mod (p, Q)")
            )
        det = det_division_free(jac, A)
        try:
            A.inv(det)
            clauses.append(("jacobian", True, "det invertible mod (p, Q)"))
        except NotInvertibleError:
            clauses.append(("jacobian", False, "det not invertible"))
    return CheckReport(clauses)


def gate_stage(rep, slp, budget):
    """Raise the appropriate restart/abort error for a failed stage check."""
    report = check_stage(rep, slp, budget)
    if report.passed:
        return report
    for name, ok, _ in report.clauses:
        if not ok and name == "degree" and rep.fiber_degree > budget:
            raise BudgetExceededError(rep.stage, rep.fiber_degree, budget)
    name, detail = report.failed_clauses()[0]
    raise UnluckyError(rep.stage, f"stage check failed: {name} ({detail})")


def reduce_rational_rep(rep, field):
    """Reduce a rational representation modulo a prime field.

    Raises ValueError when any denominator vanishes mod p, in which case the
    caller should draw a different prime.
    """

    def red(c):
        c = Fraction(c)
        if c.denominator % field.p == 0:
            raise ValueError("denominator divisible by the reduction prime")
        return field.mul(
            field.from_int(c.numerator), field.inv(field.from_int(c.denominator))
        )

    return FiberRepresentation(
        stage=rep.stage,
        prim_var=rep.prim_var,
        point=tuple(int(x) for x in rep.point),
        min_poly=tuple(red(c) for c in rep.min_poly),
        params={j: tuple(red(c) for c in w) for j, w in rep.params.items()},
        form=rep.form,
        ring=field,
        change=rep.change,
    )


def _reduce_with_fresh_prime(rep, rng, tries=16):
    for _ in range(tries):
        p = random_prime_in_range(VERIFY_PRIME_LOW, VERIFY_PRIME_HIGH, rng)
        try:
            return p, reduce_rational_rep(rep, PrimeField(p, check=False))
        except ValueError:
            continue
    raise RuntimeError("could not find a reduction prime avoiding denominators")
