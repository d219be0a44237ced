import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cantorext.errors import HorizonError, ValidationError
from cantorext.gamma import (
    CUSTOM, DELTA_FORM, DOUBLY_EXP, EXAMPLE1, EXAMPLE2, EXAMPLE3, EXPONENTIAL,
    NONPOLAR, POLAR, POWER_LAW, UNDETERMINED, build_model, classify_ep,
    condition_diagnostics, profile,
)
from cantorext.logreal import log_mul_pow


class TestBuild:
    def test_example1_gammas(self):
        m = build_model(EXAMPLE1, k_max=10, B=1.0)
        assert math.isclose(m.gamma_float(1), math.exp(-4), rel_tol=1e-15)
        assert math.isclose(m.gamma_float(2), math.exp(-4), rel_tol=1e-15)
        assert math.isclose(m.gamma_float(3), math.exp(-8), rel_tol=1e-15)
        # B >= ln(32)/4 means no clamping
        assert m.clamp_prefix == 0

    def test_example1_small_B_clamps(self):
        m = build_model(EXAMPLE1, k_max=10, B=0.5)
        assert m.clamp_prefix >= 1
        assert m.gamma_float(1) == 1.0 / 32.0

    def test_power_law_clamp(self):
        # k^-2 > 1/32 for k^2 < 32, i.e. k <= 5
        m = build_model(POWER_LAW, k_max=12, a=2.0)
        assert m.clamp_prefix == 5
        assert m.gamma_float(5) == 1.0 / 32.0
        assert math.isclose(m.gamma_float(6), 1.0 / 36.0, rel_tol=1e-15)

    def test_power_law_gamma_sum(self):
        m = build_model(POWER_LAW, k_max=12, a=2.0)
        # independent oracle: brute-force partial sum
        brute = 5 / 32 + sum(k ** -2.0 for k in range(6, 2 * 10 ** 6))
        assert math.isclose(m.gamma_sum, brute, rel_tol=1e-5)

    def test_custom_rejects_large_gamma(self):
        with pytest.raises(ValidationError):
            build_model(CUSTOM, gammas=[0.3])

    def test_custom_roundtrip(self):
        m = build_model(CUSTOM, gammas=[2.0 ** -6, 2.0 ** -7])
        assert m.k_max == 2
        assert math.isclose(m.gamma_float(2), 2.0 ** -7, rel_tol=1e-15)

    def test_nonsummable_family_rejected(self):
        with pytest.raises(ValidationError):
            build_model(POWER_LAW, a=1.0)

    def test_delta_form_keeps_formula(self):
        m = build_model(DELTA_FORM, k_max=10, b=2.0)
        assert m.eq2_exceptions == (1, 2)  # e^-2 > 1/32 at k=1,2, kept as-is
        assert m.clamp_prefix == 0
        p = profile(m)
        for k in range(1, 11):
            assert p.ln_inv_delta(k) == Fraction(2) ** k

    def test_horizon_guard(self):
        m = build_model(EXAMPLE1, k_max=5, B=1.0)
        with pytest.raises(HorizonError):
            m.gamma(6)


class TestProfile:
    def test_example1_constant_B(self):
        p = profile(build_model(EXAMPLE1, k_max=12, B=1.0))
        for k in range(1, 13):
            assert math.isclose(p.B[k], 1.0, rel_tol=1e-14)
        assert p.polar_verdict == POLAR

    def test_seed_values(self):
        p = profile(build_model(EXAMPLE1, k_max=4, B=1.0))
        assert p.delta[0].hi == 0 and p.delta[0].lo == 0.0
        assert p.r[0].hi == 0 and p.r[0].lo == 0.0
        assert math.isnan(p.B[0])

    def test_custom_delta_and_B(self):
        # gamma_k = 2^-k-5: delta_2 = 2^-13, B_2 = 13 ln2 / 8
        p = profile(build_model(CUSTOM, gammas=[2.0 ** -6, 2.0 ** -7]))
        assert math.isclose(p.delta[2].ln_mag, -13 * math.log(2), rel_tol=1e-15)
        assert math.isclose(p.B[2], 13 * math.log(2) / 8, rel_tol=1e-14)
        assert p.polar_verdict == UNDETERMINED

    def test_delta_is_product_of_gammas_exactly(self):
        m = build_model(EXAMPLE2, k_max=20)
        p = profile(m)
        for s in (1, 5, 17, 20):
            prod = log_mul_pow([(m.gamma(k), 1) for k in range(1, s + 1)])
            assert prod == p.delta[s]

    def test_r_recursion_exact(self):
        m = build_model(POWER_LAW, k_max=15, a=2.0)
        p = profile(m)
        for s in (1, 7, 15):
            direct = log_mul_pow([(m.gamma(k), 2 ** (s - k)) for k in range(1, s + 1)])
            assert direct == p.r[s]

    def test_B_definition_crosscheck(self):
        # 2^{-n-1} ln(1/delta_n) = B_n for every n
        p = profile(build_model(EXPONENTIAL, k_max=25, a=3.0))
        for n in range(1, 26):
            expect = float(p.ln_inv_delta(n) / 2 ** (n + 1))
            assert math.isclose(p.B[n], expect, rel_tol=1e-15)

    def test_robin_partial_monotone(self):
        p = profile(build_model(DOUBLY_EXP, k_max=20, a=3.0))
        assert all(a <= b for a, b in zip(p.robin_partial, p.robin_partial[1:]))

    def test_polar_verdicts(self):
        cases = [
            (build_model(POWER_LAW, a=2.0), NONPOLAR),
            (build_model(EXPONENTIAL, a=2.0), NONPOLAR),
            (build_model(DOUBLY_EXP, a=1.5), NONPOLAR),
            (build_model(DOUBLY_EXP, a=2.0), POLAR),
            (build_model(EXAMPLE1, B=1.0), POLAR),
            (build_model(EXAMPLE2, variant="A"), POLAR),
            (build_model(EXAMPLE2, variant="B"), NONPOLAR),
            (build_model(DELTA_FORM, b=2.0), POLAR),
            (build_model(DELTA_FORM, b=1.9), NONPOLAR),
        ]
        for model, want in cases:
            assert profile(model).polar_verdict == want, model.family


class TestDiagnostics:
    def test_example1_uniform_ratio_exact(self):
        p = profile(build_model(EXAMPLE1, k_max=30, B=2.0))
        rep = condition_diagnostics(p, s_grid=[1, 5, 9], n_grid=[4, 8, 16], eps=0.25, m=2)
        for row in rep.rows:
            assert math.isclose(row.ratio_uniform, 1.0 / (row.n + 1), rel_tol=1e-12)
        assert rep.all_consistent

    def test_delta_form_closed_form_agreement(self):
        # ratio at (s=5, n=10) two ways: via profile sums vs (b/2)^k/2 closed form
        b = 2.0
        p = profile(build_model(DELTA_FORM, k_max=20, b=b))
        rep = condition_diagnostics(p, s_grid=[5], n_grid=[10], eps=0.25, m=3)
        row = rep.rows[0]
        closed = [0.5 * (b / 2.0) ** k for k in range(5, 16)]
        want = closed[-1] / math.fsum(closed)
        assert math.isclose(row.ratio_uniform, want, rel_tol=1e-12)

    def test_example2_witness_fires(self):
        m = build_model(EXAMPLE2, k_max=40, variant="A")
        p = profile(m)
        kj = m.meta["kj"]
        # dip window s=k_j, n=k_{j+1}-k_j with eps=1/4, m=0: negation holds from j=3 on
        for j in (3, 4):
            s, n = kj[j - 1], kj[j] - kj[j - 1]
            rep = condition_diagnostics(p, [s], [n], eps=0.25, m=0)
            row = rep.rows[0]
            assert p.B[s + n] > 0.5
            assert not row.block_holds  # negation of the block inequality
        assert rep.all_consistent

    def test_monotone_rule_bound(self):
        # nonincreasing B_k gives ratio <= 1/(n+1)
        p = profile(build_model(POWER_LAW, k_max=40, a=2.0))
        rep = condition_diagnostics(p, s_grid=[8, 12], n_grid=[4, 9, 20], eps=0.5, m=1)
        for row in rep.rows:
            Bs = p.B[row.s:row.s + row.n + 1]
            if all(x >= y for x, y in zip(Bs, Bs[1:])):
                assert row.ratio_uniform <= 1.0 / (row.n + 1) + 1e-15

    def test_product_vs_recent_sign_agreement(self):
        for fam, kw in [(EXAMPLE1, {"B": 1.0}), (DELTA_FORM, {"b": 3.0}),
                        (EXAMPLE2, {"variant": "A"})]:
            p = profile(build_model(fam, k_max=36, **kw))
            rep = condition_diagnostics(p, s_grid=[2, 6], n_grid=[6, 12],
                                        eps=0.125, m=4)
            assert rep.all_consistent

    def test_horizon_error(self):
        p = profile(build_model(EXAMPLE1, k_max=10, B=1.0))
        with pytest.raises(HorizonError):
            condition_diagnostics(p, [5], [10], eps=0.25, m=1)


class TestClassifier:
    def test_verdict_table(self):
        table = [
            (build_model(POWER_LAW, a=2.0), "yes"),
            (build_model(EXPONENTIAL, a=2.0), "yes"),
            (build_model(DOUBLY_EXP, a=2.0), "yes"),
            (build_model(DOUBLY_EXP, a=3.0), "no"),
            (build_model(EXAMPLE1, B=1.0), "yes"),
            (build_model(EXAMPLE2, variant="A"), "no"),
            (build_model(EXAMPLE3, k_max=60), "yes"),
            (build_model(DELTA_FORM, b=2.0), "yes"),
            (build_model(DELTA_FORM, b=3.0), "no"),
        ]
        for model, want in table:
            got = classify_ep(model)
            assert got.ep == want, (model.family, model.params, got)
            assert got.rule

    def test_example2_variant_b(self):
        m = build_model(EXAMPLE2, k_max=40, variant="B")
        assert classify_ep(m).ep == "no"

    def test_custom_undetermined(self):
        m = build_model(CUSTOM, gammas=[1 / 64] * 8)
        assert classify_ep(m).ep == "undetermined"


class TestExample3:
    def test_starts_on_increasing_branch(self):
        m = build_model(EXAMPLE3, k_max=60, m=3)
        k0 = m.meta["k_start"]
        assert k0 >= 17
        p = profile(m)
        Bs = [p.B[k] for k in range(k0, 61)]
        assert all(x < y for x, y in zip(Bs, Bs[1:]))
        betas = [p.beta[k] for k in range(k0, 61)]
        assert all(x > y for x, y in zip(betas, betas[1:]))  # beta decreasing
        assert betas[-1] > 0

    def test_prefix_is_exactly_1_over_32(self):
        m = build_model(EXAMPLE3, k_max=40, m=3)
        for k in range(1, m.meta["k_start"]):
            assert m.gamma_float(k) == 1.0 / 32.0


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=1, max_value=24), st.integers(min_value=1, max_value=24))
def test_delta_product_identity_random_prefixes(i, j):
    # associativity of the delta product: splitting the product anywhere agrees
    m = build_model(EXAMPLE2, k_max=48)
    p = profile(m)
    s = i + j
    split = log_mul_pow([(p.delta[i], 1)] + [(m.gamma(k), 1) for k in range(i + 1, s + 1)])
    assert split == p.delta[s]


class TestFromDimensionFunction:
    def test_log_measure_gives_constant_weights(self):
        from cantorext.dimension import LogPower
        from cantorext.gamma import FROM_DIMENSION_FUNCTION
        h = LogPower(alpha0=1.0)
        m = build_model(FROM_DIMENSION_FUNCTION, k_max=20, h=h)
        p = profile(m)
        # ln(1/h^{-1}(2^-k)) = 2^k; the clamped prefix (k <= 2) adds the
        # constant 2 ln 32 - 4 to ln(1/delta_k), so B_k = 1/2 + c 2^{-k-1}
        assert m.clamp_prefix == 2
        c = 2 * math.log(32.0) - 4.0
        for k in (5, 10, 20):
            assert math.isclose(p.B[k], 0.5 + c / 2.0 ** (k + 1), rel_tol=1e-9)
        assert classify_ep(m).ep == "yes"

    def test_half_exponent_classified_no(self):
        from cantorext.dimension import LogPower
        from cantorext.gamma import FROM_DIMENSION_FUNCTION
        m = build_model(FROM_DIMENSION_FUNCTION, k_max=12, h=LogPower(alpha0=0.5))
        assert classify_ep(m).ep == "no"
        assert profile(m).polar_verdict == POLAR

    def test_custom_diagnostics_flagged_heuristic(self):
        m = build_model(CUSTOM, gammas=[1 / 64] * 12)
        rep = condition_diagnostics(profile(m), [1, 3], [4, 8], eps=0.25, m=1)
        assert rep.heuristic
        m2 = build_model(EXAMPLE1, k_max=12, B=1.0)
        assert not condition_diagnostics(profile(m2), [1], [4], eps=0.25, m=1).heuristic
