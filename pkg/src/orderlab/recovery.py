"""Recovery of the full order from a candidate divisor.

A post-processing solver hands back r~ = r/d for an unknown cofactor d.
When every prime power in d is at most c*m, the algorithms here rebuild
r from r~ using only group operations: a forward pass multiplies in the
prime powers of the smoothness bound, and the backtracking variants
then strip the surplus to land on r exactly.

Every exponentiation is optionally metered by the length of its
exponent, ceil(log2 k): the number of doublings a square-and-multiply
ladder performs for exponent k.  Closed-form budgets for each algorithm
are provided so runs can be checked against the cost analysis they came
with; the budgets hold for every run, not just asymptotically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction


def primes_up_to(bound: int) -> list[int]:
    """Primes <= bound by sieve; empty for bound < 2."""
    if bound < 2:
        return []
    sieve = bytearray([1]) * (bound + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, math.isqrt(bound) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(sieve[p * p :: p]))
    return [i for i, v in enumerate(sieve) if v]


@dataclass(frozen=True)
class SmoothnessContext:
    """Primes q <= c*m with their capped exponents e_q = floor(log_q(c*m)).

    smooth_exponent is the product of all q**e_q: the largest integer
    whose prime powers all stay within the smoothness bound.
    """

    c: float
    m: int
    cm_floor: int
    primes: tuple[int, ...]
    exponents: dict[int, int]
    smooth_exponent: int

    @classmethod
    def build(cls, c: float, m: int) -> "SmoothnessContext":
        if c < 1 or m < 1:
            raise ValueError(f"need c >= 1 and m >= 1, got c={c}, m={m}")
        cm = Fraction(c) * m
        if cm < 2:
            raise ValueError(f"smoothness bound c*m={float(cm)} below 2")
        cm_floor = math.floor(cm)
        primes = tuple(primes_up_to(cm_floor))
        exponents = {}
        smooth = 1
        for q in primes:
            e = 1
            while q ** (e + 1) <= cm:
                e += 1
            exponents[q] = e
            smooth *= q ** e
        return cls(
            c=c,
            m=m,
            cm_floor=cm_floor,
            primes=primes,
            exponents=exponents,
            smooth_exponent=smooth,
        )

    @property
    def exponent_bits(self) -> int:
        """ceil(log2(c*m)): exponent length of any prime power <= c*m."""
        cm = Fraction(self.c) * self.m
        cm_ceil = -((-cm.numerator) // cm.denominator)
        return (cm_ceil - 1).bit_length()


def exponent_length(k: int) -> int:
    """ceil(log2 |k|): doublings in a square-and-multiply ladder for k.

    Zero for |k| <= 1; one less than the bit length when |k| is an
    exact power of two.
    """
    a = abs(k)
    return (a - 1).bit_length() if a > 1 else 0


@dataclass
class ExponentMeter:
    """Accumulates the exponent lengths of all powers applied to the group."""

    total_bits: int = 0
    operations: int = 0

    def add(self, exponent: int):
        self.total_bits += exponent_length(exponent)
        self.operations += 1


def _pow(group, x, k: int, meter: ExponentMeter | None):
    if meter is not None:
        meter.add(k)
    return group.pow(x, k)


def recover_multiple(
    group,
    g,
    r_tilde: int,
    ctx: SmoothnessContext,
    meter: ExponentMeter | None = None,
    trace: list[int] | None = None,
) -> int | None:
    """Forward pass only: some multiple of the order, or None.

    Multiplies r~ by full prime powers q**e_q until g to the running
    product is the identity.  The result is a multiple of the order
    whose cofactor is smooth; it is generally not the order itself.
    When trace is given, the successive values of the running product
    are appended to it, starting with r~.
    """
    if not 1 <= r_tilde < (1 << ctx.m):
        return None
    r_prime = r_tilde
    if trace is not None:
        trace.append(r_prime)
    x = _pow(group, g, r_tilde, meter)
    for q in ctx.primes:
        if group.is_identity(x):
            return r_prime
        e = ctx.exponents[q]
        x = _pow(group, x, q ** e, meter)
        r_prime *= q ** e
        if trace is not None:
            trace.append(r_prime)
    if not group.is_identity(x):
        return None
    return r_prime


def recover_order_stack(
    group,
    g,
    r_tilde: int,
    ctx: SmoothnessContext,
    meter: ExponentMeter | None = None,
    trace: list[int] | None = None,
) -> int | None:
    """Order recovery with a backtracking stack.

    The forward pass records the group element before each prime power
    is applied; the backtracking pass replays them newest-first,
    raising each to the cofactor d found so far and then stripping the
    surplus powers of its own prime one multiplication at a time.
    Returns d * r~ = r, or None when the cofactor is not smooth.
    When trace is given, the successive values of the accumulated
    cofactor d are appended to it, starting with 1.
    """
    if not 1 <= r_tilde < (1 << ctx.m):
        return None
    x = _pow(group, g, r_tilde, meter)
    if group.is_identity(x):
        return r_tilde
    stack: list[tuple[object, int, int]] = []
    for q in ctx.primes:
        e = ctx.exponents[q]
        stack.append((x, q, e))
        x = _pow(group, x, q ** e, meter)
        if group.is_identity(x):
            break
    if not group.is_identity(x):
        return None
    d = 1
    if trace is not None:
        trace.append(d)
    while stack:
        x, q, e = stack.pop()
        x = _pow(group, x, d, meter)
        for _ in range(e):
            if group.is_identity(x):
                break
            x = _pow(group, x, q, meter)
            d *= q
            if trace is not None:
                trace.append(d)
    return d * r_tilde


def recover_order_tree(
    group, g, r_tilde: int, ctx: SmoothnessContext, meter: ExponentMeter | None = None
) -> int | None:
    """Order recovery by binary splitting.

    The prime set is halved recursively: each half receives the element
    raised to the other half's full prime powers, so each leaf holds an
    element whose non-identity part is a power of a single prime.  The
    leaf exponents are then read off one multiplication at a time; a
    leaf that fails to reach the identity within its cap means the
    cofactor was not smooth.
    """
    if not 1 <= r_tilde < (1 << ctx.m):
        return None
    x = _pow(group, g, r_tilde, meter)

    def split(x, qs: tuple[int, ...]):
        if len(qs) == 1:
            return [(qs[0], x)]
        half = len(qs) // 2
        left, right = qs[:half], qs[half:]
        d_left = math.prod(q ** ctx.exponents[q] for q in right)
        d_right = math.prod(q ** ctx.exponents[q] for q in left)
        return split(_pow(group, x, d_left, meter), left) + split(
            _pow(group, x, d_right, meter), right
        )

    d = 1
    for q, leaf in split(x, ctx.primes):
        cap = ctx.exponents[q]
        taken = 0
        while not group.is_identity(leaf):
            if taken == cap:
                return None
            leaf = _pow(group, leaf, q, meter)
            d *= q
            taken += 1
    return d * r_tilde


@dataclass
class FilterState:
    """Reusable state for candidate filtering.

    x is g raised to the full smooth exponent; mu accumulates a
    shrinking multiple of the order (0 until the first acceptance), so
    later candidates are tested through the usually-much-smaller
    exponent gcd(candidate, mu).  Exact-value caches short-circuit
    repeated candidates and repeated dismissed reductions; nothing is
    ever evicted.
    """

    x: object
    mu: int = 0
    accepted: set[int] = field(default_factory=set)
    dismissed: set[int] = field(default_factory=set)


def make_filter_state(
    group, g, ctx: SmoothnessContext, meter: ExponentMeter | None = None
) -> FilterState:
    return FilterState(x=_pow(group, g, ctx.smooth_exponent, meter))


def filter_candidates(
    group,
    g,
    candidates,
    ctx: SmoothnessContext,
    meter: ExponentMeter | None = None,
    state: FilterState | None = None,
) -> tuple[list[int], FilterState]:
    """Keep the candidates r~ in [1, 2**m) with x**r~ = identity,
    where x = g to the full smooth exponent.

    A candidate passes exactly when the order divides r~ times a smooth
    cofactor, so every surviving candidate is worth running recovery on.
    Because mu stays a multiple of the order, testing the reduced
    exponent gcd(r~, mu) accepts and rejects the same candidates as
    testing r~ itself.  Survivors are returned deduplicated in
    first-seen order, together with the (reusable) state.
    """
    if state is None:
        state = make_filter_state(group, g, ctx, meter)
    survivors: list[int] = []
    for cand in candidates:
        if not 1 <= cand < (1 << ctx.m):
            continue
        if cand in state.accepted:
            continue
        reduced = math.gcd(cand, state.mu) if state.mu else cand
        if reduced in state.dismissed:
            continue
        if group.is_identity(_pow(group, state.x, reduced, meter)):
            state.accepted.add(cand)
            state.mu = math.gcd(cand * ctx.smooth_exponent, state.mu)
            survivors.append(cand)
        else:
            state.dismissed.add(reduced)
    return survivors, state


_RECOVERY = {
    "stack": recover_order_stack,
    "tree": recover_order_tree,
}


@dataclass(frozen=True)
class CandidateSolve:
    order: int | None
    survivors: list[int]


def solve_candidate_set(
    group,
    g,
    candidates,
    ctx: SmoothnessContext,
    algorithm: str = "stack",
    meter: ExponentMeter | None = None,
    state: FilterState | None = None,
) -> CandidateSolve:
    """Filter the candidates, recover from each survivor, keep the minimum.

    Every successful recovery returns a positive multiple of the order,
    and the survivor r/d with smooth d recovers the order itself, so the
    minimum over successes is the order whenever any survivor is good.
    """
    recover = _RECOVERY[algorithm]
    survivors, _ = filter_candidates(group, g, candidates, ctx, meter, state)
    best: int | None = None
    for cand in survivors:
        got = recover(group, g, cand, ctx, meter)
        if got is not None and (best is None or got < best):
            best = got
    return CandidateSolve(order=best, survivors=survivors)


def smooth_part_division(
    group, g, r_prime: int, prime_bound: int, meter: ExponentMeter | None = None
) -> int:
    """Strip smooth surplus from a known multiple of the order.

    Divides out each prime q <= prime_bound while the quotient still
    takes g to the identity; returns the reduced multiple (the order
    itself when the surplus r_prime / order was prime_bound-smooth).
    """
    if r_prime < 1:
        raise ValueError(f"need a positive multiple, got {r_prime}")
    for q in primes_up_to(prime_bound):
        while r_prime % q == 0 and group.is_identity(
            _pow(group, g, r_prime // q, meter)
        ):
            r_prime //= q
    return r_prime


def verify_order(group, g, candidate: int, rho_budget: int | None = None) -> bool:
    """Certify that candidate is the exact order of g.

    Precondition (raises ValueError if violated): g**candidate is the
    identity.  The candidate is factored completely, then each maximal
    proper divisor candidate/q is checked to not hit the identity.
    Factorization may raise FactorizationTimeout, which callers report
    distinctly from a False verdict.
    """
    from .factorint import factorization_product, factorize

    if candidate < 1:
        raise ValueError(f"candidate must be positive, got {candidate}")
    if not group.is_identity(group.pow(g, candidate)):
        raise ValueError("candidate is not an identity power; nothing to verify")
    kwargs = {} if rho_budget is None else {"rho_budget": rho_budget}
    factors = factorize(candidate, **kwargs)
    assert factorization_product(factors) == candidate
    for q in factors:
        if group.is_identity(group.pow(g, candidate // q)):
            return False
    return True


def multiple_recovery_exponent_budget(ctx: SmoothnessContext) -> int:
    """Exponent-length budget for recover_multiple:
    m + ceil(log2 cm) * |primes|."""
    return ctx.m + ctx.exponent_bits * len(ctx.primes)


def stack_recovery_exponent_budget(ctx: SmoothnessContext) -> int:
    """Exponent-length budget for recover_order_stack:

    m for the initial power, then per prime the forward power
    (ceil(log2 cm)), the backtracking cofactor power (at most m, since
    the cofactor divides an order below 2**m), and the stripping powers
    (e_q single-prime multiplications of length ceil(log2 q) each).
    """
    return ctx.m + sum(
        ctx.exponent_bits + ctx.m + ctx.exponents[q] * exponent_length(q)
        for q in ctx.primes
    )


def tree_recovery_exponent_budget(ctx: SmoothnessContext) -> int:
    """Exponent-length budget for recover_order_tree:

    m for the initial power; each of the ceil(log2 |primes|) split
    levels applies every prime power at most once across the level; the
    leaf-stripping powers match the stack variant.
    """
    k = len(ctx.primes)
    levels = (k - 1).bit_length() if k >= 2 else 0
    return (
        ctx.m
        + levels * ctx.exponent_bits * k
        + sum(ctx.exponents[q] * exponent_length(q) for q in ctx.primes)
    )


def filter_exponent_budget(ctx: SmoothnessContext, n_candidates: int) -> int:
    """Exponent-length budget for filter_candidates: the one-off smooth
    power plus at most m per candidate tested."""
    return ctx.exponent_bits * len(ctx.primes) + n_candidates * ctx.m
