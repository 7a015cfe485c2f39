"""p-adic lifting of the modular fiber and the full rational solve.

The modular Kronecker representation is Newton-lifted from F_p to Z/p^(2^k)
with quadratically growing precision, then every coefficient is recovered as
a fraction by rational reconstruction.  Heuristic mode lifts until the
reconstruction stabilizes at two consecutive precisions and a fresh-prime
verification passes; provable mode lifts straight to the height budget.
"""

import random
from dataclasses import dataclass, replace

from . import verify
from .bounds import BoundSet
from .errors import (
    BudgetExceededError,
    EmptyIntersectionError,
    JacobianNotInvertibleError,
    NoReconstructionError,
    NotInvertibleError,
    ResidualNonzeroError,
    RetryExhaustedError,
    InputNotRegularError,
    SingularMatrixError,
    UnluckyError,
)
from .polys import (
    poly_deriv,
    poly_mul,
    poly_sub,
    rational_reconstruct,
    rem_monic,
)
from .primes import is_probable_prime, random_prime_avoiding, random_prime_in_range
from .rings import QQ, PolyQuotient, PrimeField, ResidueRing
from .slp import AffineChange, compose_affine, evaluate, evaluate_jacobian
from .solver import (
    FiberRepresentation,
    SolveState,
    fiber_coordinates,
    solve_linear,
    solve_mod_p,
    to_kronecker,
    to_univariate,
)

HEURISTIC_PRIME_LOW = 2**59
HEURISTIC_PRIME_HIGH = 2**62 - 1

_MAX_PRECISION_EXPONENT = 2**16


@dataclass(frozen=True)
class LiftedRepresentation:
    """A fiber representation over Z/p^(2^k) plus its precision exponent."""

    rep: FiberRepresentation
    exponent: int

    @property
    def modulus(self):
        return self.rep.ring.modulus


@dataclass
class SolveConfiguration:
    """Knobs for a rational solve; all randomness flows from ``seed``."""

    mode: str = "heuristic"
    seed: int = 0
    retries: int = 5
    verify_primes: int = 1
    exact_check: bool = False
    prime: int | None = None
    lambda_matrix: tuple | None = None
    lifting_point: tuple | None = None
    c_height: int = 16
    c_prime: int = 64
    coefficient_height: int | None = None


@dataclass
class Certificate:
    """Everything needed to audit one accepted solve."""

    mode: str
    seed: int
    attempts: int
    lam: tuple
    point: tuple
    prime: int
    precision_exponent: int
    reconstruction_exponents: tuple
    verify_primes: tuple
    verification: dict
    stage_degrees: tuple
    exact_checked: bool

    def to_dict(self):
        return {
            "mode": self.mode,
            "seed": self.seed,
            "attempts": self.attempts,
            "lambda": [list(row) for row in self.lam],
            "lifting_point": list(self.point),
            "prime": str(self.prime),
            "precision_exponent": self.precision_exponent,
            "reconstruction_exponents": list(self.reconstruction_exponents),
            "verify_primes": [str(p) for p in self.verify_primes],
            "verification": self.verification,
            "stage_degrees": list(self.stage_degrees),
            "exact_checked": self.exact_checked,
        }


def _lift_step(rep, slp, exponent):
    """One Newton doubling: a representation exact mod p^e becomes exact
    mod p^exponent (= 2e), minimal polynomial included."""
    p = rep.ring.p
    RR = ResidueRing(p, exponent)
    n = slp.n_vars
    prim = rep.prim_var
    stage = rep.stage
    q = tuple(c % RR.modulus for c in rep.min_poly)
    params = {j: tuple(c % RR.modulus for c in v) for j, v in rep.params.items()}
    A = PolyQuotient(RR, q)
    coords = fiber_coordinates(n, prim, rep.point, params, A)
    wrt = list(range(prim, n))
    vals, jac = evaluate_jacobian(slp, coords, A, wrt, n_out=stage)
    try:
        corr = solve_linear(jac, vals, A)
    except NotInvertibleError:
        raise JacobianNotInvertibleError(stage) from None
    e_corr = A.neg(corr[0])
    q_new = poly_sub(q, A.mul(poly_deriv(q, RR), e_corr), RR)
    new_params = {}
    for j, v in params.items():
        nj = A.sub(v, corr[j - prim])
        adj = poly_sub(nj, poly_mul(poly_deriv(nj, RR), e_corr, RR), RR)
        new_params[j] = rem_monic(adj, q_new, RR)
    lifted = FiberRepresentation(
        stage=stage,
        prim_var=prim,
        point=rep.point,
        min_poly=q_new,
        params=new_params,
        form="univariate",
        ring=RR,
        change=rep.change,
    )
    A2 = PolyQuotient(RR, q_new)
    coords2 = fiber_coordinates(n, prim, rep.point, new_params, A2)
    check = evaluate(slp, coords2, A2)[:stage]
    if any(not A2.is_zero(v) for v in check):
        raise ResidualNonzeroError(
            f"residual nonzero after lifting to p^{exponent}"
        )
    return lifted


def hensel_lift_rep(rep, slp, target_bits):
    """Lift a modular fiber to Z/p^(2^k) with 2^k * log2(p) >= target_bits.

    The Jacobian of the system on the fiber must be invertible mod (p, Q);
    precision doubles each iteration and the residual is re-checked at every
    level.  The lifted representation comes back in the same form as the
    input (the Newton iteration runs on the univariate form internally; the
    Kronecker form is the one with the small, height-bounded coefficients).
    """
    if target_bits < 1:
        raise ValueError("target_bits must be positive")
    uni = to_univariate(rep)
    p = uni.ring.p
    bits_per_level = p.bit_length() - 1
    target = 1
    while target * bits_per_level < target_bits:
        target *= 2
    rr1 = ResidueRing(p, 1)
    current = replace(uni, ring=rr1)
    exponent = 1
    while exponent < target:
        exponent *= 2
        current = _lift_step(current, slp, exponent)
    if rep.form == "kronecker":
        current = to_kronecker(current)
    return LiftedRepresentation(rep=current, exponent=exponent)


def reconstruct_rep(lifted):
    """Rational reconstruction of every coefficient; raises
    NoReconstructionError when the precision is insufficient."""
    rep = lifted.rep
    m = lifted.modulus

    def recover(c):
        num, den = rational_reconstruct(c % m, m)
        return QQ.from_int(num) / den

    return FiberRepresentation(
        stage=rep.stage,
        prim_var=rep.prim_var,
        point=tuple(int(x) for x in rep.point),
        min_poly=tuple(recover(c) for c in rep.min_poly),
        params={j: tuple(recover(c) for c in v) for j, v in rep.params.items()},
        form=rep.form,
        ring=QQ,
        change=rep.change,
    )


def _sample_change(n, a_bound, rng):
    for _ in range(64):
        rows = [
            [rng.randrange(a_bound + 1) for _ in range(n)] for _ in range(n)
        ]
        try:
            return AffineChange.from_matrix(rows)
        except SingularMatrixError:
            continue
    raise RetryExhaustedError(64, ["could not sample an invertible change"])


def _sample_prime(config, bounds, rng):
    if config.prime is not None:
        if not is_probable_prime(config.prime):
            raise ValueError(f"--prime value {config.prime} is not prime")
        return config.prime
    if config.mode == "provable":
        return random_prime_avoiding(bounds.prime_lower, 256, 1, rng)
    return random_prime_in_range(HEURISTIC_PRIME_LOW, HEURISTIC_PRIME_HIGH, rng)


def _reconstruction_ladder(uni_p, slp, rng):
    """Heuristic stopping rule: double the precision until the reconstructed
    fraction vector is identical at two consecutive precisions.

    Lifting is incremental (one Newton doubling per rung, on the univariate
    form) while reconstruction targets the Kronecker coefficients, which are
    the ones with bounded height.
    """
    p = uni_p.ring.p
    history = []
    previous = None
    current_rep = replace(uni_p, ring=ResidueRing(p, 1))
    exponent = 1
    while exponent <= _MAX_PRECISION_EXPONENT:
        lifted = LiftedRepresentation(
            rep=to_kronecker(current_rep), exponent=exponent
        )
        try:
            candidate = reconstruct_rep(lifted)
            history.append((exponent, True))
        except NoReconstructionError:
            candidate = None
            history.append((exponent, False))
        if candidate is not None and previous is not None:
            if (
                candidate.min_poly == previous.min_poly
                and candidate.params == previous.params
            ):
                return candidate, exponent, tuple(history)
        previous = candidate
        exponent *= 2
        current_rep = _lift_step(current_rep, slp, exponent)
    raise UnluckyError(uni_p.stage, "rational reconstruction did not stabilize")


def _provable_lift(uni_p, slp, bounds, rng):
    target_bits = 2 * bounds.heights[-1] + 2
    lifted = hensel_lift_rep(uni_p, slp, target_bits=target_bits)
    current = lifted.rep
    exponent = lifted.exponent
    history = []
    for _ in range(8):
        kron = LiftedRepresentation(rep=to_kronecker(current), exponent=exponent)
        try:
            rep = reconstruct_rep(kron)
            history.append((exponent, True))
            return rep, exponent, tuple(history)
        except NoReconstructionError:
            history.append((exponent, False))
            exponent *= 2
            current = _lift_step(current, slp, exponent)
    raise UnluckyError(uni_p.stage, "height budget exhausted without reconstruction")


def solve_over_rationals(slp, config=None):
    """Full pipeline: sample coordinates, solve mod p, lift, reconstruct,
    verify.  Returns (kronecker representation over Q, certificate).

    Restartable failures draw fresh randomness up to ``config.retries``
    attempts; consistently structural failures raise InputNotRegularError.
    """
    config = config or SolveConfiguration()
    if config.mode not in ("heuristic", "provable"):
        raise ValueError(f"unknown mode {config.mode!r}")
    rng = random.Random(config.seed)
    n = slp.n_vars
    r = slp.n_outputs
    height = config.coefficient_height or max(slp.height, 1)
    bounds = BoundSet.for_system(
        n, slp.degrees, height, config.c_height, config.c_prime
    )
    causes = []
    structural = []
    for attempt in range(1, config.retries + 1):
        if config.lambda_matrix is not None:
            change = AffineChange.from_matrix(config.lambda_matrix)
        else:
            change = _sample_change(n, bounds.a, rng)
        if config.lifting_point is not None:
            point = tuple(int(x) for x in config.lifting_point)
            if len(point) != n - 1:
                raise ValueError("lifting point must have n-1 coordinates")
        else:
            point = tuple(rng.randrange(bounds.b + 1) for _ in range(n - 1))
        prime = _sample_prime(config, bounds, rng)
        if change.det % prime == 0:
            causes.append((attempt, 0, "determinant vanishes mod p"))
            continue
        field = PrimeField(prime, check=False)
        composed = compose_affine(slp, change)
        state = SolveState(
            slp=composed, change=change, field=field, point=point, rng=rng
        )
        try:
            fiber_p = solve_mod_p(state)
            uni_p = to_univariate(fiber_p)
            if config.mode == "provable":
                rep_q, exponent, history = _provable_lift(
                    uni_p, composed, bounds, rng
                )
            else:
                rep_q, exponent, history = _reconstruction_ladder(
                    uni_p, composed, rng
                )
            fresh = []
            ok = True
            for _ in range(max(config.verify_primes, 0)):
                vp, rep_vp = verify._reduce_with_fresh_prime(rep_q, rng)
                report = verify.check_representation(rep_vp, composed)
                fresh.append(vp)
                ok = ok and report.passed
            final_report = verify.check_representation(
                rep_q,
                composed,
                exact=config.exact_check,
                fresh_primes=0,
                rng=rng,
            )
            ok = ok and final_report.passed
            if not ok:
                raise UnluckyError(r, "verification failed after lifting")
            kron_q = to_kronecker(rep_q)
            certificate = Certificate(
                mode=config.mode,
                seed=config.seed,
                attempts=attempt,
                lam=change.matrix,
                point=point,
                prime=prime,
                precision_exponent=exponent,
                reconstruction_exponents=history,
                verify_primes=tuple(fresh),
                verification=final_report.to_dict(),
                stage_degrees=tuple(state.stage_degrees),
                exact_checked=config.exact_check,
            )
            return kron_q, certificate
        except (BudgetExceededError, EmptyIntersectionError) as err:
            structural.append(str(err))
            causes.append((attempt, getattr(err, "stage", None), str(err)))
        except UnluckyError as err:
            causes.append((attempt, err.stage, err.cause))
        except ResidualNonzeroError as err:
            causes.append((attempt, None, str(err)))
    if structural and len(structural) == len(causes):
        raise InputNotRegularError(config.retries, structural)
    raise RetryExhaustedError(config.retries, causes)
