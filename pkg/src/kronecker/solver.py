"""Staged modular solver: produces the Kronecker representation of the
zero-dimensional lifting fiber of the input system over F_p.

The pipeline runs one stage per input polynomial.  Stage 1 is a univariate
normalization of the first polynomial.  Each later round converts the current
fiber to univariate form, Newton-lifts it to a one-dimensional curve in the
freed coordinate, intersects the curve with the next polynomial through a
specialize-and-interpolate resultant, recovers the new parametrizations
factor by factor over extension fields, and recombines them by Chinese
remaindering.

Variable indexing is 0-based throughout: at stage s the free variables are
Y_0..Y_{n-s-1} (pinned to the lifting point), the primitive variable is
Y_{n-s}, and the parametrized variables are Y_{n-s+1}..Y_{n-1}.
"""

import random
from dataclasses import dataclass, field, replace

from . import polys
from .errors import (
    DegreeDropError,
    EmptyIntersectionError,
    JacobianNotInvertibleError,
    NodeExhaustionError,
    NonlinearGcdError,
    NotInvertibleError,
    PrecisionStallError,
    UnluckyError,
    ZeroResultantError,
)
from .polys import (
    degree,
    interpolate,
    is_squarefree,
    monic,
    normalize,
    poly_deriv,
    poly_eval,
    poly_gcd,
    poly_inverse_mod,
    poly_mul,
    poly_sub,
    rem_monic,
    resultant,
)
from .rings import ExtField, PolyQuotient, PolyRing, SeriesRing
from .slp import evaluate, evaluate_jacobian


@dataclass(frozen=True)
class FiberRepresentation:
    """Monic minimal polynomial plus parametrizations of a lifting fiber.

    ``form`` is "kronecker" (params are the cleared-denominator numerators
    W_j with Q'*Y_j = W_j) or "univariate" (params are the direct values V_j
    with Y_j = V_j).  ``params`` maps a variable index to its coefficient
    tuple over ``ring``; the primitive variable itself is never listed.
    """

    stage: int
    prim_var: int
    point: tuple
    min_poly: tuple
    params: dict
    form: str
    ring: object
    change: object = None

    @property
    def fiber_degree(self):
        return degree(self.min_poly)


@dataclass(frozen=True)
class CurveRepresentation:
    """Kronecker representation of the lifting curve at one stage.

    Bivariate data is stored T-major: coefficient i of T^i is a tuple of
    base-field elements in ascending powers of t, where t is the freed
    coordinate shifted by its base value.
    """

    stage: int
    prim_var: int
    free_var: int
    base: tuple
    base_value: int
    min_poly: tuple
    params: dict
    field: object
    change: object = None
    iterations: int = 0
    precision: int = 0

    @property
    def fiber_degree(self):
        return len(self.min_poly) - 1


@dataclass
class SolveState:
    """Mutable bookkeeping for one modular solve attempt."""

    slp: object
    change: object
    field: object
    point: tuple
    rng: random.Random
    stage_degrees: list = field(default_factory=list)

    @property
    def n(self):
        return self.slp.n_vars

    @property
    def r(self):
        return self.slp.n_outputs


def embed_scalar(A, x):
    if isinstance(x, int):
        return A.from_int(x)
    return A.embed(x)


def fiber_coordinates(n, prim_var, point, params, A):
    """Coordinate vector substituting the fiber parametrization into Y."""
    coords = []
    for j in range(prim_var):
        coords.append(embed_scalar(A, point[j]))
    coords.append(A.gen)
    for j in range(prim_var + 1, n):
        coords.append(params[j])
    return coords


def residuals(slp, rep_uni, count=None):
    """Values of the first ``count`` outputs on the parametrized fiber."""
    A = PolyQuotient(rep_uni.ring, rep_uni.min_poly)
    coords = fiber_coordinates(
        slp.n_vars, rep_uni.prim_var, rep_uni.point, rep_uni.params, A
    )
    vals = evaluate(slp, coords, A)
    if count is None:
        count = rep_uni.stage
    return vals[:count]


def kronecker_residuals(slp, rep, count=None):
    """Division-free residuals of a Kronecker-form fiber.

    Substitutes Y_j = W_j * U with U a formal stand-in for 1/Q', then
    contracts the resulting U-expansion against powers of Q'.  Valid whenever
    Q is squarefree (so Q' is a unit mod Q and the contraction being zero is
    equivalent to the residual being zero); avoids the coefficient blowup of
    inverting Q' over Q.
    """
    if rep.form != "kronecker":
        return residuals(slp, rep, count)
    R = rep.ring
    A = PolyQuotient(R, rep.min_poly)
    PR = PolyRing(A)
    coords = []
    for j in range(rep.prim_var):
        coords.append(PR.embed(embed_scalar(A, rep.point[j])))
    coords.append(PR.embed(A.gen))
    for j in range(rep.prim_var + 1, slp.n_vars):
        w = rep.params[j]
        coords.append((A.zero, w) if w else PR.zero)
    vals = evaluate(slp, coords, PR)
    if count is None:
        count = rep.stage
    qp = rem_monic(poly_deriv(rep.min_poly, R), rep.min_poly, R)
    out = []
    for expansion in vals[:count]:
        top = len(expansion) - 1
        acc = A.zero
        power = A.one
        for k in range(top, -1, -1):
            acc = A.add(acc, A.mul(expansion[k], power))
            if k:
                power = A.mul(power, qp)
        out.append(acc)
    return out


def first_stage(state):
    """Stage-1 fiber: the first polynomial specialized at the lifting point,
    made monic in the last variable."""
    slp = state.slp
    F = state.field
    n = state.n
    PR = PolyRing(F)
    coords = list(state.point[: n - 1]) + [PR.gen]
    q = evaluate(slp, coords, PR)[0]
    d1 = slp.degrees[0]
    if degree(q) != d1:
        raise DegreeDropError(
            1, f"specialized degree {degree(q)} dropped below {d1}"
        )
    return FiberRepresentation(
        stage=1,
        prim_var=n - 1,
        point=tuple(state.point),
        min_poly=monic(q, F),
        params={},
        form="kronecker",
        ring=F,
        change=state.change,
    )


def to_univariate(rep):
    """Kronecker -> univariate: V_j = Q'^{-1} W_j mod Q (needs Q squarefree)."""
    if rep.form == "univariate":
        return rep
    F = rep.ring
    q = rep.min_poly
    inv = poly_inverse_mod(poly_deriv(q, F), q, F)
    params = {
        j: rem_monic(poly_mul(inv, w, F), q, F) for j, w in rep.params.items()
    }
    return replace(rep, params=params, form="univariate")


def to_kronecker(rep):
    """Univariate -> Kronecker: W_j = Q' V_j mod Q."""
    if rep.form == "kronecker":
        return rep
    F = rep.ring
    q = rep.min_poly
    qp = poly_deriv(q, F)
    params = {
        j: rem_monic(poly_mul(qp, v, F), q, F) for j, v in rep.params.items()
    }
    return replace(rep, params=params, form="kronecker")


# -- linear algebra over quotient rings --------------------------------------


def det_division_free(mat, A):
    """Determinant by expansion over column subsets; no divisions, any ring."""
    s = len(mat)
    if s == 0:
        return A.one
    memo = {}

    def minor(row, cols):
        if len(cols) == 1:
            return mat[row][cols[0]]
        key = (row, cols)
        got = memo.get(key)
        if got is not None:
            return got
        acc = A.zero
        positive = True
        for idx in range(len(cols)):
            c = cols[idx]
            entry = mat[row][c]
            if not A.is_zero(entry):
                sub = minor(row + 1, cols[:idx] + cols[idx + 1 :])
                term = A.mul(entry, sub)
                acc = A.add(acc, term) if positive else A.sub(acc, term)
            positive = not positive
        memo[key] = acc
        return acc

    return minor(0, tuple(range(s)))


class _PivotStuck(Exception):
    pass


def _solve_by_elimination(mat, rhs, A):
    s = len(mat)
    aug = [list(mat[i]) + [rhs[i]] for i in range(s)]
    for col in range(s):
        pivot_row = None
        pivot_inv = None
        for r in range(col, s):
            try:
                pivot_inv = A.inv(aug[r][col])
                pivot_row = r
                break
            except NotInvertibleError:
                continue
        if pivot_row is None:
            raise _PivotStuck(col)
        aug[col], aug[pivot_row] = aug[pivot_row], aug[col]
        aug[col] = [A.mul(pivot_inv, v) for v in aug[col]]
        for r in range(s):
            if r != col and not A.is_zero(aug[r][col]):
                f = aug[r][col]
                aug[r] = [
                    A.sub(v, A.mul(f, w)) for v, w in zip(aug[r], aug[col])
                ]
    return [aug[i][s] for i in range(s)]


def _solve_by_adjugate(mat, rhs, A):
    s = len(mat)
    det = det_division_free(mat, A)
    det_inv = A.inv(det)

    def cofactor(i, j):
        sub = [
            [mat[r][c] for c in range(s) if c != j]
            for r in range(s)
            if r != i
        ]
        m = det_division_free(sub, A)
        return m if (i + j) % 2 == 0 else A.neg(m)

    out = []
    for i in range(s):
        acc = A.zero
        for j in range(s):
            acc = A.add(acc, A.mul(cofactor(j, i), rhs[j]))
        out.append(A.mul(det_inv, acc))
    return out


def solve_linear(mat, rhs, A):
    """Solve an s x s system over a quotient ring.

    Gaussian elimination with unit-pivot search first; if no pivot column
    offers a unit (possible over a split algebra even for an invertible
    matrix), falls back to the adjugate formula, which only needs det(M) to
    be a unit.  Raises NotInvertibleError when the matrix is singular.
    """
    if len(mat) == 0:
        return []
    try:
        return _solve_by_elimination(mat, rhs, A)
    except _PivotStuck:
        return _solve_by_adjugate(mat, rhs, A)


def jacobian_is_invertible(jac, A):
    try:
        A.inv(det_division_free(jac, A))
        return True
    except NotInvertibleError:
        return False


# -- curve lifting ------------------------------------------------------------


def _series_const(c, F):
    return () if F.is_zero(c) else (c,)


def _series_poly(coeffs, F):
    return tuple(_series_const(c, F) for c in coeffs)


def lift_curve(fiber, slp, kappa=None):
    """Newton-lift a univariate fiber along its freed coordinate.

    Doubles the t-adic precision each iteration, re-normalizing the minimal
    polynomial and the parametrizations through the first-order primitive
    element correction.  With the default precision (fiber degree + 1, plus
    one internally checked guard coefficient) the returned Kronecker curve is
    exact; passing ``kappa`` truncates at t^kappa instead.
    """
    if fiber.form != "univariate":
        fiber = to_univariate(fiber)
    F = fiber.ring
    s = fiber.stage
    n = fiber.prim_var + fiber.stage
    prim = fiber.prim_var
    free = prim - 1
    if free < 0:
        raise ValueError("stage leaves no coordinate to free")
    delta = fiber.fiber_degree
    guard = kappa is None
    target = delta + 2 if guard else kappa
    base = fiber.point[:free]
    base_value = fiber.point[free]

    q = _series_poly(fiber.min_poly, F)
    vparams = {j: _series_poly(v, F) for j, v in fiber.params.items()}

    def coords_for(A, S):
        coords = []
        for j in range(free):
            coords.append(embed_scalar(A, fiber.point[j]))
        coords.append(A.embed(S.shifted_variable(base_value)))
        coords.append(A.gen)
        for j in range(prim + 1, n):
            coords.append(vparams[j])
        return coords

    wrt = list(range(prim, n))
    m = 1
    iters = 0
    while m < target:
        m2 = min(2 * m, target)
        S = SeriesRing(F, m2)
        A = PolyQuotient(S, q)
        vals, jac = evaluate_jacobian(slp, coords_for(A, S), A, wrt, n_out=s)
        try:
            corr = solve_linear(jac, vals, A)
        except NotInvertibleError:
            raise JacobianNotInvertibleError(s) from None
        e = A.neg(corr[0])
        qp = poly_deriv(q, S)
        q_new = poly_sub(q, A.mul(qp, e), S)
        new_params = {}
        for j, v in vparams.items():
            nj = A.sub(v, corr[j - prim])
            adj = poly_sub(nj, poly_mul(poly_deriv(nj, S), e, S), S)
            new_params[j] = rem_monic(adj, q_new, S)
        q = q_new
        vparams = new_params
        m = m2
        iters += 1
        A = PolyQuotient(S, q)
        check = evaluate(slp, coords_for(A, S), A)[:s]
        if any(not A.is_zero(v) for v in check):
            raise PrecisionStallError(
                f"stage {s} curve residual nonzero at precision t^{m}"
            )

    S = SeriesRing(F, target)
    A = PolyQuotient(S, q)
    qp = poly_deriv(q, S)
    wparams = {j: A.mul(qp, v) for j, v in vparams.items()}

    def finalize(poly_ts, limit):
        out = []
        for c in poly_ts:
            if guard and degree(c) > limit:
                raise UnluckyError(
                    s, "curve coefficients exceed the degree guard"
                )
            out.append(tuple(c[: limit + 1]))
        return tuple(out)

    limit = delta if guard else target - 1
    min_poly = finalize(q, limit)
    params = {j: finalize(w, limit) for j, w in wparams.items()}
    return CurveRepresentation(
        stage=s,
        prim_var=prim,
        free_var=free,
        base=base,
        base_value=base_value,
        min_poly=min_poly,
        params=params,
        field=F,
        change=fiber.change,
        iterations=iters,
        precision=target,
    )


def specialize_curve(curve, a, into=None):
    """Substitute a value for the freed coordinate of the curve.

    ``a`` may be a base-field element or an element of an extension field
    passed as ``into``; the result is a Kronecker fiber over that field.
    """
    K = into if into is not None else curve.field
    value = K.from_int(a) if isinstance(a, int) else a
    ta = K.sub(value, K.from_int(curve.base_value))

    def eval_ts(poly_ts):
        out = []
        for c in poly_ts:
            acc = K.zero
            for coeff in reversed(c):
                acc = K.add(K.mul(acc, ta), embed_scalar(K, coeff))
            out.append(acc)
        return normalize(out, K)

    point = curve.base + (a,)
    return FiberRepresentation(
        stage=curve.stage,
        prim_var=curve.prim_var,
        point=point,
        min_poly=eval_ts(curve.min_poly),
        params={j: eval_ts(w) for j, w in curve.params.items()},
        form="kronecker",
        ring=K,
        change=curve.change,
    )


# -- intersection step --------------------------------------------------------


def _curve_fiber_output(curve, a, slp, out_index, into=None):
    """Specialize, convert to univariate, and evaluate one output mod q_a."""
    fib = specialize_curve(curve, a, into)
    uni = to_univariate(fib)
    K = uni.ring
    A = PolyQuotient(K, uni.min_poly)
    coords = fiber_coordinates(
        slp.n_vars, uni.prim_var, uni.point, uni.params, A
    )
    val = evaluate(slp, coords, A)[out_index]
    return uni, val


def intersect_minimal_poly(curve, slp, out_index, next_degree, rng):
    """Minimal polynomial of the freed coordinate on the next-stage fiber.

    Specializes the curve at distinct nodes, forms the next polynomial modulo
    each specialized fiber, takes scalar resultants and interpolates; monic
    normalization absorbs the unit in front of the resultant identity.
    """
    F = curve.field
    delta = curve.fiber_degree
    needed = next_degree * delta + 1
    if F.p <= needed:
        raise NodeExhaustionError(
            curve.stage, f"prime {F.p} too small for {needed} nodes"
        )
    cap = min(4 * needed, F.p)
    tried = set()
    samples = []
    while len(samples) < needed and len(tried) < cap:
        a = rng.randrange(F.p)
        if a in tried:
            continue
        tried.add(a)
        try:
            uni, h = _curve_fiber_output(curve, a, slp, out_index)
        except NotInvertibleError:
            continue  # bad node: specialized fiber is ramified here
        samples.append((a, resultant(uni.min_poly, h, F)))
    if len(samples) < needed:
        raise NodeExhaustionError(curve.stage)
    if all(F.is_zero(v) for _, v in samples):
        raise ZeroResultantError(curve.stage)
    result = interpolate(samples, F)
    if degree(result) < 1:
        raise EmptyIntersectionError(
            f"stage {curve.stage + 1} intersection is empty"
        )
    return monic(result, F)


def intersect_parametrization(curve, new_min_poly, slp, out_index, rng):
    """Parametrizations of the next-stage fiber, recovered factor by factor.

    For each irreducible factor of the new minimal polynomial, specializes
    the curve at the corresponding root (over the factor's extension field),
    pins the next primitive-element value down as the root of a linear gcd,
    evaluates the old parametrizations there, and recombines the per-factor
    residues by Chinese remaindering.
    """
    F = curve.field
    stage = curve.stage
    n = slp.n_vars
    if not is_squarefree(new_min_poly, F):
        raise UnluckyError(stage + 1, "minimal polynomial is not squarefree")
    factors = polys.factor_squarefree(new_min_poly, F, rng)
    collected = {j: [] for j in range(curve.prim_var, n)}
    for qk in factors:
        if degree(qk) == 1:
            K = F
            a = F.neg(qk[0])

            def to_residue(x):
                return polys.constant(x, F)

        else:
            K = ExtField(F, qk)
            a = K.gen

            def to_residue(x):
                return normalize(x, F)

        try:
            uni, g = _curve_fiber_output(curve, a, slp, out_index, into=K)
        except NotInvertibleError:
            raise UnluckyError(
                stage, "curve specialization at a factor root is ramified"
            ) from None
        linear = poly_gcd(g, uni.min_poly, K)
        if degree(linear) != 1:
            raise NonlinearGcdError(stage + 1)
        b = K.neg(linear[0])
        values = {curve.prim_var: b}
        for j, vp in uni.params.items():
            values[j] = poly_eval(vp, b, K)
        for j, val in values.items():
            collected[j].append((to_residue(val), qk))
    params = {
        j: polys.crt_polys(residues, F) for j, residues in collected.items()
    }
    return FiberRepresentation(
        stage=stage + 1,
        prim_var=curve.free_var,
        point=curve.base,
        min_poly=new_min_poly,
        params=params,
        form="univariate",
        ring=F,
        change=curve.change,
    )


# -- full modular pipeline ----------------------------------------------------


def solve_mod_p(state):
    """Run all stages over F_p and return the final Kronecker fiber.

    Every stage is gated by the verification module; any failed clause maps
    to a restartable UnluckyError (or BudgetExceededError for a Bezout
    violation, which restarts cannot fix).
    """
    from . import verify

    slp = state.slp
    budgets = list(_running_products(slp.degrees))
    fiber = first_stage(state)
    state.stage_degrees = [fiber.fiber_degree]
    verify.gate_stage(fiber, slp, budgets[0])
    for s in range(1, state.r):
        try:
            uni = to_univariate(fiber)
        except NotInvertibleError:
            raise UnluckyError(s, "fiber minimal polynomial not squarefree") from None
        curve = lift_curve(uni, slp)
        q_next = intersect_minimal_poly(
            curve, slp, s, slp.degrees[s], state.rng
        )
        uni_next = intersect_parametrization(curve, q_next, slp, s, state.rng)
        fiber = to_kronecker(uni_next)
        state.stage_degrees.append(fiber.fiber_degree)
        verify.gate_stage(fiber, slp, budgets[s])
    return fiber


def _running_products(degrees):
    acc = 1
    for d in degrees:
        acc *= d
        yield acc
