"""Problem parameters, peak geometry, and the two group realizations.

Everything downstream works relative to a frequency register of width
m + ell bits for a generator of (known or unknown) order r.  The model
layer owns the exact integer conventions: the signed residue, the
round-half-up rule used to place distribution peaks, and the derived
quantities beta, L, B_max.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction


class ParameterError(ValueError):
    """Constructor argument violates a documented precondition."""


def round_half_up(x) -> int:
    """Round to the nearest integer, ties toward +infinity.

    The fractional part f - round_half_up(f) lies in [-1/2, 1/2), i.e.
    the rounding error delta = round_half_up(f) - f lies in (-1/2, 1/2].
    Accepts int, Fraction, or float; exact for int and Fraction.
    """
    if isinstance(x, float):
        return math.floor(x + 0.5)
    return math.floor(x + Fraction(1, 2))


def signed_residue(u: int, modulus: int) -> int:
    """Representative of u mod modulus in [-modulus/2, modulus/2)."""
    v = u % modulus
    if 2 * v >= modulus:
        v -= modulus
    return v


@dataclass(frozen=True)
class Params:
    """Instance parameters: order r, register split m + ell, window B, slack c.

    Invariants enforced on construction:
      r >= 2 and 2**m > r, ell >= 1;
      B (if set) satisfies 1 <= B < B_max, i.e. r*(2B+1) < 2**(m+ell);
      c (if set) satisfies c >= 1;
      delta (if set) equals m - ell and is >= 0.
    """

    r: int
    m: int
    ell: int
    B: int | None = None
    c: float | None = None
    delta: int | None = None

    def __post_init__(self):
        if self.r < 2:
            raise ParameterError(f"order r must be >= 2, got {self.r}")
        if self.m < 1 or (1 << self.m) <= self.r:
            raise ParameterError(f"need 2**m > r, got m={self.m}, r={self.r}")
        if self.ell < 1:
            raise ParameterError(f"ell must be >= 1, got {self.ell}")
        if self.B is not None:
            if self.B < 1:
                raise ParameterError(f"B must be >= 1, got {self.B}")
            # B < B_max = (2**n/r - 1)/2, checked without rationals
            if self.r * (2 * self.B + 1) >= (1 << (self.m + self.ell)):
                raise ParameterError(
                    f"B={self.B} reaches past the peak spacing for r={self.r}, "
                    f"m={self.m}, ell={self.ell}"
                )
        if self.c is not None and self.c < 1:
            raise ParameterError(f"c must be >= 1, got {self.c}")
        if self.delta is not None:
            if self.delta != self.m - self.ell or self.delta < 0:
                raise ParameterError(
                    f"delta={self.delta} inconsistent with m-ell={self.m - self.ell}"
                )

    @property
    def n(self) -> int:
        """Total register width m + ell."""
        return self.m + self.ell

    @property
    def two_n(self) -> int:
        return 1 << (self.m + self.ell)


@dataclass(frozen=True)
class DerivedParams:
    """Quantities derived exactly from (r, m, ell)."""

    beta: int        # 2**n mod r
    L: int           # floor(2**n / r)
    B_max: Fraction  # (2**n/r - 1)/2, the half-width of a peak cell

    @property
    def B_max_floor(self) -> int:
        return math.floor(self.B_max)


def derive(params: Params) -> DerivedParams:
    N = params.two_n
    r = params.r
    return DerivedParams(
        beta=N % r,
        L=N // r,
        B_max=Fraction(N - r, 2 * r),
    )


@dataclass(frozen=True)
class Peak:
    """Peak index z with its optimal frequency j0 and argument alpha0."""

    z: int
    j0: int
    alpha0: int


def optimal_frequency(z: int, params: Params) -> int:
    """Frequency nearest to z * 2**n / r, ties rounded up.  Exact."""
    if not 0 <= z < params.r:
        raise ParameterError(f"peak index z={z} outside [0, {params.r})")
    return round_half_up(Fraction(z * params.two_n, params.r))


def peak(z: int, params: Params) -> Peak:
    j0 = optimal_frequency(z, params)
    alpha0 = params.r * j0 - z * params.two_n
    # alpha0 = r * delta_z with delta_z in (-1/2, 1/2]
    assert -params.r < 2 * alpha0 <= params.r
    return Peak(z=z, j0=j0, alpha0=alpha0)


def frequency_argument(j: int, params: Params) -> int:
    """Signed residue {r j} mod 2**n, the argument the distribution is read at."""
    return signed_residue(params.r * j, params.two_n)


class Rng:
    """Deterministic random stream with explicit splitting.

    Every stochastic operation in the package receives one of these
    explicitly; the same seed reproduces the same transcript.  split()
    derives an independent child stream deterministically, so per-trial
    streams do not depend on how much entropy earlier trials consumed.
    """

    def __init__(self, seed: int):
        self.seed = seed
        self._r = random.Random(seed)

    def split(self) -> "Rng":
        return Rng(self._r.getrandbits(128))

    def randrange(self, start: int, stop: int | None = None) -> int:
        """Uniform integer in [0, start) or [start, stop).  Arbitrary precision."""
        return self._r.randrange(start) if stop is None else self._r.randrange(start, stop)

    def getrandbits(self, k: int) -> int:
        return self._r.getrandbits(k)

    def unit_fraction(self, bits: int) -> Fraction:
        """Uniform dyadic rational in [0, 1) with the given resolution."""
        return Fraction(self._r.getrandbits(bits), 1 << bits)


class SimulatedGroup:
    """Cyclic group of known order r, elements stored as exponents mod r.

    Multiplication is addition of exponents, so x**k costs one integer
    multiply regardless of k.  This is the ground-truth realization used
    by the simulation harness.
    """

    def __init__(self, r: int):
        if r < 1:
            raise ParameterError(f"group order must be positive, got {r}")
        self.r = r
        self.identity = 0

    def element(self, k: int) -> int:
        return k % self.r

    def generator(self) -> int:
        return 1 % self.r

    def mul(self, a: int, b: int) -> int:
        return (a + b) % self.r

    def pow(self, a: int, k: int) -> int:
        # negative k is inversion followed by the positive power
        return (a * k) % self.r

    def is_identity(self, a: int) -> bool:
        return a % self.r == 0

    def random_element(self, rng: Rng) -> int:
        return rng.randrange(self.r)

    def element_order(self, a: int) -> int:
        """Exact order of a.  Only the simulated realization can answer this."""
        return self.r // math.gcd(a % self.r, self.r)


class ModNGroup:
    """Multiplicative group of units mod an odd N > 3.

    No ground-truth order is available here; order queries are whatever
    the post-processing pipeline recovers.  Element creation validates
    coprimality.
    """

    def __init__(self, N: int):
        if N <= 3 or N % 2 == 0:
            raise ParameterError(f"modulus must be odd and > 3, got {N}")
        self.N = N
        self.identity = 1

    def element(self, x: int) -> int:
        x %= self.N
        if math.gcd(x, self.N) != 1:
            raise ParameterError(f"{x} is not a unit mod {self.N}")
        return x

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.N

    def pow(self, a: int, k: int) -> int:
        return pow(a, k, self.N)

    def is_identity(self, a: int) -> bool:
        return a % self.N == 1

    def random_element(self, rng: Rng) -> int:
        while True:
            x = rng.randrange(self.N - 2) + 2
            if math.gcd(x, self.N) == 1:
                return x
