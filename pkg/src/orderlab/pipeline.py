"""End-to-end runs: sample, solve, filter, recover, report.

A single run draws one frequency from the exact measurement
distribution, post-processes it (and its 2B neighbors) into order
candidates with the configured solver, filters the candidates with one
smooth power of the generator, and recovers the order from the
survivors.  Monte Carlo wraps independent runs into a deterministic
report whose empirical rate is compared against the analytic bound.

Failures carry one of four reasons:
  tail        the sampled frequency fell outside the offset budget;
  no_candidate  no solver candidate landed in [1, 2**m);
  unsmooth_d  candidates existed but none recovered the order
              (canonically: the hidden cofactor was not smooth);
  budget      a lattice enumeration exceeded its vector budget.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from . import bounds, cf, lattice, recovery
from .distribution import Sampler
from .factorint import factorize, is_probable_prime, perfect_power
from .model import ModNGroup, Params, Rng, SimulatedGroup

WILSON_Z99 = 2.5758293035489004  # two-sided 99% normal quantile

FAILURE_REASONS = ("tail", "no_candidate", "unsmooth_d", "budget")


@dataclass(frozen=True)
class RunConfig:
    """Configuration of one order-finding run.

    strategy: 'cf' (continued fractions), 'lattice' (shortest reduced
    vector), or 'enumerate' (short-vector enumeration with the reduced
    register ell = m - delta).  recovery: 'stack' or 'tree'.
    """

    m: int
    ell: int
    B: int
    c: float
    strategy: str = "cf"
    recovery: str = "stack"
    delta: int | None = None
    t_max: int = 2 ** 24
    prec: int | None = None

    def __post_init__(self):
        if self.strategy not in ("cf", "lattice", "enumerate"):
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.recovery not in ("stack", "tree"):
            raise ValueError(f"unknown recovery {self.recovery!r}")
        if self.B < 1:
            raise ValueError(f"B must be >= 1, got {self.B}")
        if self.t_max < self.B:
            raise ValueError(f"t_max={self.t_max} below window B={self.B}")


@dataclass(frozen=True)
class RunOutcome:
    success: bool
    recovered: int | None
    reason: str | None  # one of FAILURE_REASONS when success is False
    z: int | None
    t: int | None
    j: int | None
    exponent_bits: int


def _candidates_for(j: int, params: Params, config: RunConfig) -> list[int]:
    N = params.two_n
    B = params.B if params.B is not None else config.B
    offsets = [(j + k) % N for k in range(-B, B + 1)]
    out: list[int] = []
    seen: set[int] = set()
    for o in offsets:
        if config.strategy == "cf":
            cands = [cf.solve_cf(o, params)]
        elif config.strategy == "lattice":
            cands = [lattice.solve_shortest(o, params)]
        else:
            cands = lattice.enumerate_candidates(o, params, config.delta).candidates
        for cand in cands:
            if cand not in seen:
                seen.add(cand)
                out.append(cand)
    return out


def run_once(
    group,
    g,
    true_r: int,
    config: RunConfig,
    rng: Rng,
    sampler: Sampler | None = None,
) -> RunOutcome:
    """One simulated measurement plus full classical post-processing.

    true_r drives the measurement simulation only; the solvers, filter,
    and recovery see nothing but frequencies and group elements.
    Success means the recovered order equals true_r exactly.
    """
    # the window never reaches past the peak cell; tiny registers
    # (small factoring moduli) clamp the requested half-width
    n_reg = 1 << (config.m + config.ell)
    b_eff = min(config.B, (n_reg - true_r) // (2 * true_r))
    params = Params(
        r=true_r,
        m=config.m,
        ell=config.ell,
        B=b_eff,
        c=config.c,
        delta=config.delta,
    )
    meter = recovery.ExponentMeter()
    sampler = sampler or Sampler(params, t_max=config.t_max, prec=config.prec)
    drawn = sampler.sample(rng)
    if drawn.tail:
        return RunOutcome(False, None, "tail", drawn.z, None, None, 0)
    try:
        candidates = _candidates_for(drawn.j, params, config)
    except lattice.EnumerationBudgetExceeded:
        return RunOutcome(False, None, "budget", drawn.z, drawn.t, drawn.j, 0)
    in_range = [cand for cand in candidates if 1 <= cand < (1 << config.m)]
    if not in_range:
        return RunOutcome(
            False, None, "no_candidate", drawn.z, drawn.t, drawn.j, 0
        )
    ctx = recovery.SmoothnessContext.build(config.c, config.m)
    solve = recovery.solve_candidate_set(
        group, g, in_range, ctx, algorithm=config.recovery, meter=meter
    )
    if solve.order == true_r:
        return RunOutcome(
            True, solve.order, None, drawn.z, drawn.t, drawn.j, meter.total_bits
        )
    return RunOutcome(
        False, solve.order, "unsmooth_d", drawn.z, drawn.t, drawn.j, meter.total_bits
    )


def wilson_interval(successes: int, trials: int, z: float = WILSON_Z99) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise ValueError("need at least one trial")
    p = successes / trials
    zz = z * z / trials
    center = (p + zz / 2) / (1 + zz)
    half = z * math.sqrt(p * (1 - p) / trials + zz / (4 * trials)) / (1 + zz)
    return max(0.0, center - half), min(1.0, center + half)


def default_order_sampler(rng: Rng, m: int) -> int:
    """Uniform odd integer of exactly m bits (m >= 2)."""
    if m < 2:
        raise ValueError(f"need m >= 2, got {m}")
    if m == 2:
        return 3
    return (1 << (m - 1)) | (rng.randrange(1 << (m - 2)) << 1) | 1


@dataclass(frozen=True)
class MonteCarloReport:
    config: RunConfig
    seed: int
    trials: int
    successes: int
    rate: float
    wilson99: tuple[float, float]
    bound: float
    slack: float
    passed: bool
    failure_counts: dict[str, int]
    exponent_bits_mean: float
    exponent_bits_max: int

    def to_dict(self) -> dict:
        cfg = {
            "m": self.config.m,
            "ell": self.config.ell,
            "B": self.config.B,
            "c": self.config.c,
            "delta": self.config.delta,
            "strategy": self.config.strategy,
            "recovery": self.config.recovery,
            "t_max": self.config.t_max,
            "seed": self.seed,
        }
        return {
            "config": cfg,
            "trials": self.trials,
            "successes": self.successes,
            "rate": self.rate,
            "wilson99": list(self.wilson99),
            "bound": self.bound,
            "slack": self.slack,
            "pass": self.passed,
            "failure_counts": dict(self.failure_counts),
            "exponent_bits": {
                "mean": self.exponent_bits_mean,
                "max": self.exponent_bits_max,
            },
        }


def analytic_bound(config: RunConfig) -> float:
    """The analytic single-run bound matching the configured strategy."""
    elimination = "pow2ell" if config.strategy == "enumerate" else "sqrt"
    return float(
        bounds.single_run_success_bound(
            config.m, config.ell, config.B, config.c, elimination
        )
    )


def monte_carlo(
    config: RunConfig,
    trials: int,
    seed: int,
    r_sampler=None,
) -> MonteCarloReport:
    """Independent seeded runs with freshly drawn orders.

    Each trial gets its own split of the root stream, draws an order
    (uniform odd full-width by default), simulates one measurement of a
    generator of that order, and post-processes blind.  The report
    passes when the empirical rate is no further than
    3 sqrt(bound (1-bound) / trials) below the analytic bound.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    root = Rng(seed)
    successes = 0
    failure_counts = {reason: 0 for reason in FAILURE_REASONS}
    bits_total = 0
    bits_max = 0
    for _ in range(trials):
        rng = root.split()
        r = r_sampler(rng) if r_sampler is not None else default_order_sampler(rng, config.m)
        group = SimulatedGroup(r)
        outcome = run_once(group, group.generator(), r, config, rng)
        if outcome.success:
            successes += 1
        else:
            failure_counts[outcome.reason] += 1
        bits_total += outcome.exponent_bits
        bits_max = max(bits_max, outcome.exponent_bits)
    rate = successes / trials
    bound = analytic_bound(config)
    # the analytic bound can be vacuous (<= 0) for aggressive parameters;
    # clamp only the binomial slack term, never the reported bound
    clamped = min(max(bound, 0.0), 1.0)
    slack = 3 * math.sqrt(clamped * (1 - clamped) / trials)
    return MonteCarloReport(
        config=config,
        seed=seed,
        trials=trials,
        successes=successes,
        rate=rate,
        wilson99=wilson_interval(successes, trials),
        bound=bound,
        slack=slack,
        passed=rate >= bound - slack,
        failure_counts=failure_counts,
        exponent_bits_mean=bits_total / trials,
        exponent_bits_max=bits_max,
    )


def _format_number(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    return format(x, ".12g")


def dumps_report(obj) -> str:
    """Deterministic JSON: insertion-ordered keys, floats at 12 significant
    digits, no whitespace variation across runs."""
    if obj is None:
        return "null"
    if isinstance(obj, (bool, int, float)):
        return _format_number(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(dumps_report(v) for v in obj) + "]"
    if isinstance(obj, dict):
        items = (f"{json.dumps(str(k))}: {dumps_report(v)}" for k, v in obj.items())
        return "{" + ", ".join(items) + "}"
    raise TypeError(f"cannot serialize {type(obj)!r}")


MONTE_CARLO_CSV_COLUMNS = [
    "m", "ell", "B", "c", "delta", "strategy", "recovery", "t_max", "seed",
    "trials", "successes", "rate", "wilson99_low", "wilson99_high",
    "bound", "slack", "pass",
    "fail_tail", "fail_no_candidate", "fail_unsmooth_d", "fail_budget",
    "exponent_bits_mean", "exponent_bits_max",
]


def report_to_csv(report: MonteCarloReport) -> str:
    """Header plus one data row, columns as in MONTE_CARLO_CSV_COLUMNS."""
    d = report.to_dict()
    row = [
        d["config"]["m"], d["config"]["ell"], d["config"]["B"], d["config"]["c"],
        "" if d["config"]["delta"] is None else d["config"]["delta"],
        d["config"]["strategy"], d["config"]["recovery"], d["config"]["t_max"],
        d["config"]["seed"], d["trials"], d["successes"], d["rate"],
        d["wilson99"][0], d["wilson99"][1], d["bound"], d["slack"], d["pass"],
        d["failure_counts"]["tail"], d["failure_counts"]["no_candidate"],
        d["failure_counts"]["unsmooth_d"], d["failure_counts"]["budget"],
        d["exponent_bits"]["mean"], d["exponent_bits"]["max"],
    ]
    cells = [_format_number(v) if isinstance(v, (bool, int, float)) else str(v) for v in row]
    return ",".join(MONTE_CARLO_CSV_COLUMNS) + "\n" + ",".join(cells) + "\n"


def true_order(N: int, g: int) -> int:
    """Ground-truth multiplicative order of g mod N, by factoring.

    Simulation harness only: the measurement sampler needs the real
    order, which at laboratory scale is obtained classically.  The
    post-processing pipeline never sees this value.
    """
    factors = factorize(N)
    lam = 1
    for p, e in factors.items():
        lam = math.lcm(lam, p ** (e - 1) * (p - 1))
    order = lam
    for q in factorize(lam):
        while order % q == 0 and pow(g, order // q, N) == 1:
            order //= q
    return order


def _register_for_modulus(N: int) -> tuple[int, int]:
    """Register split (m, ell): m = bitlen(N) - 1 and the least ell with
    2**(m+ell) >= N**2 / 4."""
    m = N.bit_length() - 1
    ell = max(1, (N * N - 1).bit_length() - 2 - m)
    return m, ell


@dataclass(frozen=True)
class FactorReport:
    N: int
    success: bool
    order: int | None
    factors: dict[int, int] | None
    reason: str | None
    seed: int
    split_iterations: int

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "success": self.success,
            "order": self.order,
            "factors": None
            if self.factors is None
            else {str(p): e for p, e in sorted(self.factors.items())},
            "reason": self.reason,
            "seed": self.seed,
            "split_iterations": self.split_iterations,
        }


def _split_with_order(N: int, order: int, rng: Rng, iterations: int) -> dict[int, int] | None:
    """Complete factorization of N from one multiplicative order.

    Uses the ample even multiple R = order * 2**bitlen(N): for random
    units x, walking x**(odd part of R) through repeated squarings
    either passes a nontrivial square root of 1 (classic +-1 split) or
    stalls at x**R != 1, whose gcd with N separates the components whose
    local order divides R from the rest.  Parts are refined by gcd and
    reduced by perfect powers and primality until all are prime.
    """
    R = order << N.bit_length()
    s = (R & -R).bit_length() - 1
    u = R >> s

    def split_parts(parts: set[int], d: int) -> set[int]:
        out: set[int] = set()
        for p in parts:
            g1 = math.gcd(p, d)
            if 1 < g1 < p:
                out.add(g1)
                out.add(p // g1)
            else:
                out.add(p)
        return out

    def reduce_part(p: int) -> list[int]:
        while True:
            pp = perfect_power(p)
            if pp is None:
                return [p]
            p = pp[0]

    parts = {N}
    for _ in range(iterations):
        composites = [
            b for p in parts for b in reduce_part(p) if not is_probable_prime(b)
        ]
        if not composites:
            break
        x = rng.randrange(N - 2) + 2
        g1 = math.gcd(x, N)
        if g1 > 1:
            parts = split_parts(parts, g1)
            continue
        y = pow(x, u, N)
        if y == 1:
            continue
        prev = None
        steps = 0
        while y != 1 and steps <= s:
            prev = y
            y = (y * y) % N
            steps += 1
        if y == 1:
            if prev is not None and prev != N - 1:
                parts = split_parts(parts, math.gcd(prev - 1, N))
                parts = split_parts(parts, math.gcd(prev + 1, N))
        else:
            parts = split_parts(parts, math.gcd(y - 1, N))

    primes: list[int] = []
    for p in parts:
        for b in reduce_part(p):
            if not is_probable_prime(b):
                return None
            primes.append(b)
    out: dict[int, int] = {}
    for p in set(primes):
        e = 0
        M = N
        while M % p == 0:
            M //= p
            e += 1
        out[p] = e
    if math.prod(q ** e for q, e in out.items()) != N:
        return None
    return out


def factor_completely(
    N: int,
    seed: int,
    B: int = 10,
    c: float = 25.0,
    strategy: str = "cf",
    recovery_algorithm: str = "stack",
    split_iterations: int = 32,
    t_max: int = 2 ** 24,
) -> FactorReport:
    """Factor an odd composite N end to end.

    One simulated order-finding run on a random unit (the measurement
    needs the true order, which the harness computes classically; the
    post-processing stays blind), followed by classical gcd splitting
    driven by the recovered order.  Rejects even, prime, prime-power,
    and trivially small N with guidance.
    """
    if N <= 3 or N % 2 == 0:
        raise ValueError(f"N={N}: need an odd integer above 3")
    if is_probable_prime(N):
        raise ValueError(f"N={N} is prime; nothing to factor")
    pp = perfect_power(N)
    if pp is not None:
        raise ValueError(
            f"N={N} is a perfect power {pp[0]}**{pp[1]}; reduce the base first"
        )
    rng = Rng(seed)
    group = ModNGroup(N)
    g = group.random_element(rng)
    m, ell = _register_for_modulus(N)
    config = RunConfig(
        m=m,
        ell=ell,
        B=B,
        c=c,
        strategy=strategy,
        recovery=recovery_algorithm,
        t_max=t_max,
    )
    r = true_order(N, g)
    outcome = run_once(group, g, r, config, rng)
    if not outcome.success:
        return FactorReport(
            N=N,
            success=False,
            order=outcome.recovered,
            factors=None,
            reason=outcome.reason,
            seed=seed,
            split_iterations=split_iterations,
        )
    factors = _split_with_order(N, outcome.recovered, rng, split_iterations)
    if factors is None:
        return FactorReport(
            N=N,
            success=False,
            order=outcome.recovered,
            factors=None,
            reason="split_incomplete",
            seed=seed,
            split_iterations=split_iterations,
        )
    return FactorReport(
        N=N,
        success=True,
        order=outcome.recovered,
        factors=factors,
        reason=None,
        seed=seed,
        split_iterations=split_iterations,
    )
