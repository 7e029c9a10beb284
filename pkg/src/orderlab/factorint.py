"""Desk-scale integer factorization for verification and ground truth.

Trial division, Miller-Rabin, and Brent-cycle rho.  Sized for the
moduli the laboratory actually factors (order candidates and test
semiprimes up to a hundred bits or so); a work budget turns pathological
inputs into a distinct timeout instead of silent failure.
"""

from __future__ import annotations

import math
import random

_SMALL_PRIME_LIMIT = 10 ** 6
_DEFAULT_RHO_BUDGET = 1 << 24


class FactorizationTimeout(RuntimeError):
    """The factorization work budget ran out before completion."""


def is_probable_prime(n: int, rounds: int = 64) -> bool:
    """Miller-Rabin with the given number of bases.

    Bases are drawn from a stream seeded by n itself, so verdicts are
    deterministic per input.
    """
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    s = (d & -d).bit_length() - 1
    d >>= s
    rng = random.Random(n ^ 0x9E3779B97F4A7C15)
    for _ in range(rounds):
        a = rng.randrange(2, n - 1)
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = (x * x) % n
            if x == n - 1:
                break
        else:
            return False
    return True


def iroot(n: int, k: int) -> int:
    """floor(n ** (1/k)) by Newton iteration on integers."""
    if n < 0 or k < 1:
        raise ValueError(f"need n >= 0 and k >= 1, got n={n}, k={k}")
    if n < 2 or k == 1:
        return n
    x = 1 << (-(-n.bit_length() // k))  # upper estimate
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            return x
        x = y


def perfect_power(n: int) -> tuple[int, int] | None:
    """(base, k) with base**k == n and k >= 2, or None."""
    if n < 4:
        return None
    for k in range(2, n.bit_length() + 1):
        b = iroot(n, k)
        if b < 2:
            break
        if b ** k == n:
            return b, k
    return None


def _brent_rho(n: int, rng: random.Random, budget: list[int]) -> int | None:
    """One Brent-cycle attempt; returns a nontrivial factor or None."""
    if n % 2 == 0:
        return 2
    y = rng.randrange(1, n)
    c = rng.randrange(1, n)
    m = 128
    g = r = q = 1
    x = ys = y
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            budget[0] -= min(m, r - k)
            if budget[0] <= 0:
                raise FactorizationTimeout(f"rho budget exhausted on {n}")
            g = math.gcd(q, n)
            k += m
        r *= 2
    if g == n:
        g = 1
        while g == 1:
            ys = (ys * ys + c) % n
            g = math.gcd(abs(x - ys), n)
            budget[0] -= 1
            if budget[0] <= 0:
                raise FactorizationTimeout(f"rho budget exhausted on {n}")
    return g if g != n else None


def factorize(n: int, rho_budget: int = _DEFAULT_RHO_BUDGET) -> dict[int, int]:
    """Complete factorization {prime: exponent}.

    Trial division below 1e6, then recursive Brent rho with Miller-Rabin
    certification.  Raises FactorizationTimeout when the rho budget runs
    out, which callers report distinctly from a wrong-order verdict.
    """
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    out: dict[int, int] = {}
    for p in (2, 3, 5):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    p = 7
    wheel = (4, 2, 4, 2, 4, 6, 2, 6)
    i = 0
    while p * p <= n and p < _SMALL_PRIME_LIMIT:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += wheel[i]
        i = (i + 1) % 8
    if n == 1:
        return out
    if p * p > n:
        out[n] = out.get(n, 0) + 1
        return out
    budget = [rho_budget]
    rng = random.Random(n ^ 0xD1B54A32D192ED03)
    stack = [n]
    while stack:
        v = stack.pop()
        if v == 1:
            continue
        if is_probable_prime(v):
            out[v] = out.get(v, 0) + 1
            continue
        pp = perfect_power(v)
        if pp is not None:
            base, k = pp
            for _ in range(k):
                stack.append(base)
            continue
        f = None
        while f is None:
            f = _brent_rho(v, rng, budget)
        stack.append(f)
        stack.append(v // f)
    return out


def factorization_product(factorization: dict[int, int]) -> int:
    v = 1
    for p, e in factorization.items():
        v *= p ** e
    return v
