import math

import mpmath as mp
import pytest
from hypothesis import given, strategies as st

from cantorext.errors import CancellationError
from cantorext.logreal import ONE, ZERO, LogReal, log_mul_pow, log_sum


def lr(x):
    return LogReal.from_float(x)


class TestLogMulPow:
    def test_two_deltas(self):
        # (e^-4)^1 * (e^-8)^2 = e^-20
        out = log_mul_pow([(LogReal.from_ln(-4.0), 1), (LogReal.from_ln(-8.0), 2)])
        assert out.sign == 1
        assert out.hi + out.lo == -20.0

    def test_zero_exponent_is_empty_product(self):
        out = log_mul_pow([(lr(123.456), 0)])
        assert out == ONE

    def test_example1_nested_product(self):
        # delta_k = e^{-2^{k+1}} (B = 1): delta_1 * delta_2^2 * delta_3^4
        # has log -4 - 2*8 - 4*16 = -84 (plain sum of exponents).
        deltas = [LogReal.from_ln(-(2.0 ** (k + 1))) for k in (1, 2, 3)]
        out = log_mul_pow(list(zip(deltas, (1, 2, 4))))
        assert out.hi == -84 and out.lo == 0.0

    def test_sign_parity(self):
        out = log_mul_pow([(lr(-2.0), 3), (lr(0.5), 1)])
        assert out.sign == -1
        assert math.isclose(out.to_float(), -4.0, rel_tol=1e-15)

    def test_zero_factor(self):
        assert log_mul_pow([(ZERO, 2), (lr(3.0), 1)]) == ZERO
        with pytest.raises(ZeroDivisionError):
            log_mul_pow([(ZERO, -1)])

    def test_huge_exponents_keep_integer_part(self):
        d = LogReal.from_ln(-0.75)
        e = 2 ** 60
        out = log_mul_pow([(d, e)])
        assert out.hi == -(3 * 2 ** 60) // 4
        assert out.lo == 0.0

    @given(st.permutations(range(5)))
    def test_permutation_invariance(self, perm):
        vals = [lr(v) for v in (0.3, 7.25, 1e-200, 1e180, 2.0)]
        exps = [3, -1, 2, 1, 7]
        terms = [(vals[i], exps[i]) for i in range(5)]
        base = log_mul_pow(terms)
        shuffled = log_mul_pow([terms[i] for i in perm])
        assert shuffled == base


class TestLogSum:
    def test_ln2(self):
        out = log_sum([ONE, ONE])
        assert math.isclose(out.ln_mag, math.log(2), rel_tol=1e-15)

    def test_robin_partial_sum_constant_terms(self):
        # ten unit weights sum to 10
        out = log_sum([ONE] * 10)
        assert math.isclose(out.ln_mag, math.log(10), rel_tol=1e-15)

    def test_tiny_pair_against_mpmath(self):
        # reference computed independently at 120 bits
        with mp.workprec(120):
            ref = float(mp.log(mp.exp(-700) + mp.exp(-701)))
        out = log_sum([LogReal.from_ln(-700.0), LogReal.from_ln(-701.0)])
        assert math.isclose(out.ln_mag, ref, rel_tol=1e-15)

    def test_singleton_identity(self):
        x = LogReal.from_ln(-1234.5678, -1)
        assert log_sum([x]) is x

    def test_empty_and_zero(self):
        assert log_sum([]) == ZERO
        assert log_sum([ZERO, ZERO]) == ZERO

    def test_cancellation_raises(self):
        a = ONE
        b = LogReal.from_ln(-(2.0 ** -50), -1)  # -exp(-2^-50), cancels to ~2^-50
        with pytest.raises(CancellationError):
            log_sum([a, b])

    def test_benign_mixed_signs(self):
        out = log_sum([lr(3.0), lr(-1.0)])
        assert math.isclose(out.to_float(), 2.0, rel_tol=1e-14)

    @given(st.lists(st.floats(min_value=-700, max_value=700), min_size=1, max_size=8))
    def test_against_float_reference(self, lns):
        terms = [LogReal.from_ln(v) for v in lns]
        ref = math.log(math.fsum(math.exp(v) for v in lns))
        out = log_sum(terms)
        assert math.isclose(out.ln_mag, ref, rel_tol=1e-12, abs_tol=1e-12)


class TestRoundTrip:
    @given(st.floats(min_value=1e-300, max_value=1e300))
    def test_to_of_from_is_identity(self, x):
        assert LogReal.from_float(x).to_float() == x

    @given(st.floats(min_value=1e-300, max_value=1e300))
    def test_from_of_to_fixes_image(self, x):
        # on LogReals that came from doubles, from(to(.)) reproduces them
        v = LogReal.from_float(x)
        w = LogReal.from_float(v.to_float())
        assert w == v

    def test_negative(self):
        assert LogReal.from_float(-2.5).to_float() == -2.5

    def test_zero(self):
        assert LogReal.from_float(0.0) == ZERO
        assert ZERO.to_float() == 0.0


class TestComparisons:
    def test_ordering_far_apart(self):
        # floats cannot resolve +-1 at 1e18; the integer part can
        a = LogReal.from_parts(1, -(10 ** 18), 0.0)
        b = LogReal.from_parts(1, -(10 ** 18) + 1, 0.0)
        assert a < b < ONE

    def test_huge_hi_comparison_no_overflow(self):
        a = LogReal.from_parts(1, 10 ** 400, 0.1)
        b = LogReal.from_parts(1, 10 ** 400, 0.2)
        assert a < b
        assert a.ln_mag == math.inf  # float view saturates, comparison stays exact

    def test_sign_ordering(self):
        assert LogReal.from_float(-5.0) < ZERO < lr(1e-300)

    @given(st.floats(min_value=-1e15, max_value=1e15),
           st.floats(min_value=-1e15, max_value=1e15))
    def test_matches_float_order(self, u, v):
        assert (LogReal.from_ln(u) < LogReal.from_ln(v)) == (u < v)


class TestPow:
    def test_pow_zero_is_one(self):
        assert lr(0.123).pow(0) == ONE
        assert ZERO.pow(0) == ONE

    def test_negative_base_parity(self):
        assert lr(-2.0).pow(2).sign == 1
        assert lr(-2.0).pow(3).sign == -1

    def test_inverse(self):
        x = lr(8.0)
        assert math.isclose(x.pow(-1).to_float(), 0.125, rel_tol=1e-15)

    def test_ln_scaled_exact(self):
        # B = 1.0 at scale 2^61: integer part exact
        v = LogReal.from_ln_scaled(1.0, 2 ** 61, sign=-1)
        assert v.hi == 2 ** 61 and v.lo == 0.0 and v.sign == -1

    def test_ln_scaled_readback(self):
        v = LogReal.from_ln_scaled(-1.5, 2 ** 40)
        assert v.ln_scaled(-40) == -1.5


@given(st.floats(min_value=1e-10, max_value=1e10),
       st.integers(min_value=-50, max_value=50),
       st.integers(min_value=-50, max_value=50))
def test_pow_homomorphism(x, a, b):
    v = LogReal.from_float(x)
    combined = log_mul_pow([(v, a), (v, b)])
    direct = v.pow(a + b)
    assert combined.sign == direct.sign
    if combined.sign:
        assert combined.hi == direct.hi
        assert math.isclose(combined.lo, direct.lo, rel_tol=0, abs_tol=5e-13)
