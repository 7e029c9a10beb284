"""Continued-fraction expansion and the square-root threshold solver."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from orderlab.cf import cf_expand, convergent_admissibility, solve_cf
from orderlab.model import Params, peak


class TestCfExpand:
    def test_examples(self):
        assert cf_expand(0, 1) == [(0, 1)]
        assert cf_expand(1, 3) == [(0, 1), (1, 3)]
        assert cf_expand(355, 113) == [(3, 1), (22, 7), (355, 113)]

    def test_validation(self):
        with pytest.raises(ValueError):
            cf_expand(1, 0)
        with pytest.raises(ValueError):
            cf_expand(-1, 2)

    @given(st.integers(0, 10 ** 9), st.integers(1, 10 ** 9))
    @settings(max_examples=200)
    def test_recurrence_invariants(self, num, den):
        conv = cf_expand(num, den)
        # final convergent is the value itself, reduced
        g = math.gcd(num, den)
        assert conv[-1] == (num // g if g else 0, den // g if g else 1)
        # determinant identity between consecutive convergents
        for k in range(1, len(conv)):
            p, q = conv[k]
            pp, qp = conv[k - 1]
            assert p * qp - pp * q in (1, -1)
        # denominators never decrease, strictly increase from index 2 on
        qs = [q for _, q in conv]
        assert all(a <= b for a, b in zip(qs, qs[1:]))
        assert all(a < b for a, b in zip(qs[1:], qs[2:]))

    @given(st.integers(0, 10 ** 6), st.integers(1, 10 ** 6))
    @settings(max_examples=100)
    def test_convergents_alternate_around_value(self, num, den):
        x = Fraction(num, den)
        conv = cf_expand(num, den)
        for k, (p, q) in enumerate(conv[:-1]):
            side = Fraction(p, q) - x
            assert (side <= 0) if k % 2 == 0 else (side >= 0)


def _solve_reference(j: int, params: Params) -> int:
    best = 1
    for _, q in cf_expand(j, params.two_n):
        if q * q < params.two_n:
            best = q
        else:
            break
    return best


class TestSolveCf:
    def test_validation(self):
        p = Params(r=5, m=3, ell=3)
        with pytest.raises(ValueError):
            solve_cf(-1, p)
        with pytest.raises(ValueError):
            solve_cf(p.two_n, p)

    def test_degenerate_frequencies(self):
        p = Params(r=5, m=3, ell=3)
        assert solve_cf(0, p) == 1
        # j = N - 1: value just below 1, last small-denominator convergent
        assert solve_cf(p.two_n - 1, p) == _solve_reference(p.two_n - 1, p)

    @given(st.integers(2, 120), st.data())
    @settings(max_examples=150, deadline=None)
    def test_matches_expansion_reference(self, r, data):
        m = r.bit_length()
        p = Params(r=r, m=m, ell=m)
        j = data.draw(st.integers(0, p.two_n - 1))
        assert solve_cf(j, p) == _solve_reference(j, p)

    def test_threshold_is_strict(self):
        # q*q < N, not <=: engineered value with a denominator exactly sqrt(N)
        p = Params(r=3, m=2, ell=2)  # N = 16, threshold q < 4
        # 1/4 has convergents 0/1, 1/4; q = 4 fails 16 > 16 false -> stays 1
        assert solve_cf(4, p) == 1

    def test_recovers_reduced_order_at_peaks(self):
        for r in (7, 12, 30, 41):
            p = Params(r=r, m=r.bit_length(), ell=r.bit_length())
            for z in range(r):
                want = r // math.gcd(r, z)
                assert solve_cf(peak(z, p).j0 % p.two_n, p) == want


class TestAdmissibility:
    def test_peak_frequency_always_admissible(self):
        for r in (5, 13, 64, 99):
            p = Params(r=r, m=r.bit_length(), ell=r.bit_length())
            for z in range(r):
                assert convergent_admissibility(peak(z, p).j0 % p.two_n, z, r, p)

    def test_admissible_implies_convergent_membership(self):
        # |j/N - z/r| < 1/(2 r^2) with gcd(z, r) = 1 forces z/r into the
        # convergent list (the solver may still stop on a later denominator)
        for r in (11, 23, 37):
            m = r.bit_length()
            p = Params(r=r, m=m, ell=m)
            for j in range(p.two_n):
                for z in range(r):
                    if math.gcd(z, r) == 1 and convergent_admissibility(j, z, r, p):
                        assert (z, r) in cf_expand(j, p.two_n)

    def test_integer_comparison(self):
        # |j/N - z/r| < 1/(2 r^2) as exact integers: boundary case not admissible
        p = Params(r=4, m=3, ell=3)
        N = p.two_n
        # choose j with |j*4 - 1*64| = 8 so 2*4*8 = 64 == N: strict inequality fails
        assert not convergent_admissibility(14, 1, 4, p)
        assert convergent_admissibility(15, 1, 4, p)
