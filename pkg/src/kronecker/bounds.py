"""Degree, sample-size, height and prime budgets.

The degree budget D and the sample sizes (a, b) = (8D, 9D) are exact
formulas.  The height and prime budgets instantiate asymptotic bounds with
frozen constants (C_HEIGHT, C_PRIME, overridable per call) and integer
ceiling-log2 polylog factors; any over-estimate is safe, it only costs
lifting precision or prime size.
"""

from dataclasses import dataclass
from math import prod

from .rings import ceil_log2

C_HEIGHT = 16
C_PRIME = 64


def degree_budget(n, r, delta):
    """D = (2n - r + 4) * r * (delta**3 + 2*delta**2)."""
    if not (n >= r >= 1 and delta >= 1):
        raise ValueError("need n >= r >= 1 and delta >= 1")
    return (2 * n - r + 4) * r * (delta**3 + 2 * delta**2)


def sample_bounds(D):
    """Sample-set sizes (a, b) = (8D, 9D) for coordinates and lifting points."""
    if D < 1:
        raise ValueError("degree budget must be positive")
    return 8 * D, 9 * D


def _polylog(x):
    return 1 + ceil_log2(x)


def height_budget(n, d, h, r, s, c=C_HEIGHT):
    """Bit-size budget for the stage-s output coefficients.

    c * n * d**(s-1) * (h + r*d) * (1 + ceil_log2(n+2)) * (1 + ceil_log2(d+1)).
    """
    if min(n, d, h, r, s) < 1:
        raise ValueError("all arguments must be >= 1")
    return c * n * d ** (s - 1) * (h + r * d) * _polylog(n + 2) * _polylog(d + 1)


def prime_budget(n, d, h, r, c=C_PRIME):
    """Budget H for the bit size of the bad-prime multiple, and B = 12H.

    Primes are then drawn from (B, 2B] = [12H + 1, 24H].  H is floored at
    60 * n**2 * d * bezout**4 so the modular solver's degree assumptions hold.
    """
    if min(n, d, h, r) < 1:
        raise ValueError("all arguments must be >= 1")
    bezout = d**r
    H = c * n**3 * d ** (8 * r - 7) * (h + r * d) * _polylog(n + 2) ** 3
    H = max(H, 60 * n**2 * d * bezout**4)
    return H, 12 * H


@dataclass(frozen=True)
class BoundSet:
    """All budgets for one input system."""

    n: int
    r: int
    d: int
    h: int
    bezout_stages: tuple  # prod(d_1..d_s) for s = 1..r
    D: int
    a: int
    b: int
    heights: tuple  # eta_s for s = 1..r
    prime_bits_budget: int  # H
    prime_lower: int  # B = 12H

    @classmethod
    def for_system(cls, n, degrees, h, c_height=C_HEIGHT, c_prime=C_PRIME):
        r = len(degrees)
        if r < 1 or n < r:
            raise ValueError("need 1 <= r <= n")
        degrees = tuple(max(int(d), 1) for d in degrees)
        d = max(degrees)
        h = max(int(h), 1)
        bez = []
        acc = 1
        for dj in degrees:
            acc *= dj
            bez.append(acc)
        D = degree_budget(n, r, acc)
        a, b = sample_bounds(D)
        heights = tuple(height_budget(n, d, h, r, s, c_height) for s in range(1, r + 1))
        H, B = prime_budget(n, d, h, r, c_prime)
        return cls(
            n=n,
            r=r,
            d=d,
            h=h,
            bezout_stages=tuple(bez),
            D=D,
            a=a,
            b=b,
            heights=heights,
            prime_bits_budget=H,
            prime_lower=B,
        )

    def bezout(self, s):
        return self.bezout_stages[s - 1]


def bezout_products(degrees):
    """prod(d_1..d_s) for each stage s."""
    return tuple(prod(degrees[:s]) for s in range(1, len(degrees) + 1))
