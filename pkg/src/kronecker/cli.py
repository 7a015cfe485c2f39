"""Command-line front end.

Reads a system in the ``vars`` grammar, runs the rational solver (or only
the modular stage with ``--mod-p-only``), and emits a JSON document with the
representation, the verification report and the solve certificate.  Output
is deterministic for a fixed seed and input: primes, coordinates and node
choices all flow from the single seeded generator.

Exit codes: 0 verified success, 2 retries exhausted (or input rejected as
not a reduced regular sequence), 3 unreadable or malformed input.
"""

import argparse
import json
import os
import random
import sys
from fractions import Fraction

from .errors import (
    InputNotRegularError,
    KroneckerError,
    ParseError,
    RetryExhaustedError,
)
from . import verify
from .bounds import BoundSet
from .padic import (
    SolveConfiguration,
    _sample_change,
    _sample_prime,
    solve_over_rationals,
)
from .rings import QQ, PrimeField
from .slp import AffineChange, compose_affine, parse_system
from .solver import FiberRepresentation, SolveState, solve_mod_p, to_univariate

FORMAT = "kronecker-rep/1"


def _coeff_to_json(c):
    if isinstance(c, Fraction):
        return {"num": str(c.numerator), "den": str(c.denominator)}
    return str(c)


def _poly_to_json(coeffs):
    return [_coeff_to_json(c) for c in coeffs]


def _rep_payload(rep, univariate=None):
    payload = {
        "stage": rep.stage,
        "primitive_index": rep.prim_var,
        "lifting_point": [str(int(x)) for x in rep.point],
        "minimal_poly": _poly_to_json(rep.min_poly),
        "parametrizations": {
            str(j): _poly_to_json(w) for j, w in sorted(rep.params.items())
        },
        "form": rep.form,
    }
    if univariate is not None:
        payload["univariate"] = {
            str(j): _poly_to_json(v) for j, v in sorted(univariate.params.items())
        }
    return payload


def _dump(doc, out_path):
    text = json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _coeff_from_json(c, ring):
    if isinstance(c, dict):
        return Fraction(int(c["num"]), int(c["den"]))
    return ring.from_int(int(c))


def load_representation(doc):
    """Rebuild a FiberRepresentation from an emitted JSON document."""
    body = doc["representation"]
    if doc["coefficients"] == "rational":
        ring = QQ
    else:
        ring = PrimeField(int(doc["modulus"]), check=False)
    min_poly = tuple(_coeff_from_json(c, ring) for c in body["minimal_poly"])
    params = {
        int(j): tuple(_coeff_from_json(c, ring) for c in coeffs)
        for j, coeffs in body["parametrizations"].items()
    }
    return FiberRepresentation(
        stage=body["stage"],
        prim_var=body["primitive_index"],
        point=tuple(int(x) for x in body["lifting_point"]),
        min_poly=min_poly,
        params=params,
        form=body["form"],
        ring=ring,
        change=None,
    )


def _solve_mod_p_only(slp, config):
    rng = random.Random(config.seed)
    n = slp.n_vars
    bounds = BoundSet.for_system(
        n, slp.degrees, config.coefficient_height or max(slp.height, 1)
    )
    last = None
    for attempt in range(1, config.retries + 1):
        if config.lambda_matrix is not None:
            change = AffineChange.from_matrix(config.lambda_matrix)
        else:
            change = _sample_change(n, bounds.a, rng)
        point = tuple(rng.randrange(bounds.b + 1) for _ in range(n - 1))
        prime = _sample_prime(config, bounds, rng)
        if change.det % prime == 0:
            continue
        field = PrimeField(prime, check=False)
        composed = compose_affine(slp, change)
        state = SolveState(
            slp=composed, change=change, field=field, point=point, rng=rng
        )
        try:
            fiber = solve_mod_p(state)
        except KroneckerError as err:
            last = err
            continue
        report = verify.check_representation(fiber, composed)
        return fiber, composed, change, point, prime, state.stage_degrees, report, attempt
    raise RetryExhaustedError(config.retries, [str(last)])


def run(argv):
    parser = argparse.ArgumentParser(
        prog="kronecker-solve",
        description="Solve a polynomial system into a Kronecker representation.",
    )
    parser.add_argument("input", help="path to the system description")
    parser.add_argument(
        "--mode", choices=("heuristic", "provable"), default="heuristic"
    )
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--prime", type=int, default=None)
    parser.add_argument("--retries", type=int, default=5)
    parser.add_argument("--verify-primes", type=int, default=1)
    parser.add_argument("--mod-p-only", action="store_true")
    parser.add_argument("--out", default=None)
    parser.add_argument("--emit-univariate", action="store_true")
    args = parser.parse_args(argv)

    if args.seed is not None:
        seed = args.seed
    else:
        seed = int(os.environ.get("KRONECKER_SEED", "0"))

    try:
        with open(args.input, "r", encoding="utf-8") as fh:
            source = fh.read()
    except OSError as err:
        print(f"error: cannot read {args.input}: {err}", file=sys.stderr)
        return 3
    try:
        slp = parse_system(source)
    except ParseError as err:
        print(f"error: {err}", file=sys.stderr)
        return 3

    config = SolveConfiguration(
        mode=args.mode,
        seed=seed,
        retries=args.retries,
        verify_primes=args.verify_primes,
        prime=args.prime,
    )

    doc = {
        "format": FORMAT,
        "variables": list(slp.var_names),
        "mode": args.mode,
        "seed": seed,
    }
    try:
        if args.mod_p_only:
            (
                fiber,
                composed,
                change,
                point,
                prime,
                stage_degrees,
                report,
                attempts,
            ) = _solve_mod_p_only(slp, config)
            uni = to_univariate(fiber) if args.emit_univariate else None
            doc.update(
                {
                    "coefficients": "modular",
                    "modulus": str(prime),
                    "prime": str(prime),
                    "lambda": [c for row in change.matrix for c in row],
                    "stage_degrees": stage_degrees,
                    "representation": _rep_payload(fiber, uni),
                    "verification": report.to_dict(),
                    "attempts": attempts,
                }
            )
        else:
            rep, cert = solve_over_rationals(slp, config)
            uni = to_univariate(rep) if args.emit_univariate else None
            doc.update(
                {
                    "coefficients": "rational",
                    "lambda": [c for row in cert.lam for c in row],
                    "stage_degrees": list(cert.stage_degrees),
                    "prime": str(cert.prime),
                    "representation": _rep_payload(rep, uni),
                    "verification": cert.verification,
                    "certificate": cert.to_dict(),
                }
            )
    except (RetryExhaustedError, InputNotRegularError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    _dump(doc, args.out)
    return 0


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
