import math

import numpy as np
import pytest

from cxsect import (
    ComplexDim,
    ComplexEllipsoid,
    ComplexLqBall,
    EuclideanBall,
    InvalidInputError,
    PerturbedBall,
    VerificationContext,
    corollary1_verify,
    gamma_lemma_check,
    parseval_check,
    positivity_check,
    section_gap,
    separation_verify,
    stability_verify,
)


@pytest.fixture(scope="module")
def ctx():
    return VerificationContext()


d2 = ComplexDim(2)
d3 = ComplexDim(3)


class TestSectionGap:
    def test_identical_bodies(self, ctx, ball2):
        assert section_gap(ball2, ball2, context=ctx).epsilon == 0.0

    def test_scaled_ball_gap(self, ctx, ball2):
        # sections pi * 1.21 vs pi: gap 0.21 pi
        gap = section_gap(EuclideanBall(d2, 1.1), ball2, context=ctx)
        assert gap.epsilon == pytest.approx(0.21 * math.pi, rel=1e-10)

    def test_dominated_body_clamps_to_zero(self, ctx, ball2):
        gap = section_gap(ball2, EuclideanBall(d2, 1.1), context=ctx)
        assert gap.epsilon == 0.0
        assert gap.refined_max < 0

    def test_ball_below_polydisc(self, ctx, ball2, polydisc2):
        # polydisc sections are at least pi, with equality at the coordinate axes
        gap = section_gap(ball2, polydisc2, context=ctx)
        assert gap.epsilon <= 1e-8


class TestStability:
    def test_equal_bodies_margin_zero(self, ctx, ball2):
        rep = stability_verify(ball2, ball2, context=ctx)
        assert rep.passed and rep.epsilon == 0.0 and rep.margin == 0.0

    def test_scaled_ball_golden_numbers(self, ctx, ball2):
        rep = stability_verify(EuclideanBall(d2, 1.1), ball2, context=ctx)
        assert rep.epsilon == pytest.approx(0.21 * math.pi, rel=1e-9)
        assert rep.lhs == pytest.approx(1.1 ** 2 * math.pi / math.sqrt(2), rel=1e-10)
        assert rep.rhs == pytest.approx(math.pi / math.sqrt(2) + 0.21 * math.pi, rel=1e-9)
        assert rep.margin == pytest.approx(0.1933, abs=2e-4)
        assert rep.passed

    def test_ball_vs_polydisc(self, ctx, ball2, polydisc2):
        rep = stability_verify(ball2, polydisc2, context=ctx)
        assert rep.passed and rep.margin > 0

    def test_dimension_guard(self, ctx):
        with pytest.raises(InvalidInputError):
            stability_verify(EuclideanBall(ComplexDim(4), 1.0),
                             EuclideanBall(ComplexDim(4), 1.0), context=ctx)

    def test_mixed_dimensions_rejected(self, ctx, ball2, ball3):
        with pytest.raises(InvalidInputError):
            stability_verify(ball2, ball3, context=ctx)

    def test_invalid_body_rejected(self, ctx, ball2):
        broken = PerturbedBall(d2, 1.0, ((2, 0, 10.0),), certify=False)
        with pytest.raises(InvalidInputError, match="validation"):
            stability_verify(broken, ball2, context=ctx)

    def test_supplied_epsilon_mode(self, ctx, ball2):
        # hypothesis-driven run: epsilon given by the caller, no grid sweep
        rep = stability_verify(EuclideanBall(d2, 1.1), ball2, context=ctx,
                               epsilon=0.21 * math.pi)
        assert rep.passed
        assert rep.extra.get("epsilon_source") == "supplied"
        assert rep.epsilon == pytest.approx(0.21 * math.pi)
        too_small = stability_verify(EuclideanBall(d2, 1.1), ball2, context=ctx,
                                     epsilon=0.0)
        assert not too_small.passed  # false hypothesis, conclusion fails

    def test_supplied_epsilon_rejects_negative(self, ctx, ball2):
        with pytest.raises(InvalidInputError):
            stability_verify(ball2, ball2, context=ctx, epsilon=-1.0)

    def test_scale_consistency_of_pass_flag(self, ctx, ell12, ball2):
        base = stability_verify(ell12, ball2.scaled(1.4), context=ctx)
        scaled = stability_verify(ell12.scaled(1.7), ball2.scaled(1.4 * 1.7), context=ctx)
        r = 1.7 ** 2  # both sides scale by r^{2n-2} = r^2 at n=2
        assert scaled.epsilon == pytest.approx(r * base.epsilon, rel=1e-9)
        assert scaled.lhs == pytest.approx(r * base.lhs, rel=1e-10)
        assert scaled.passed == base.passed


class TestCorollary1:
    def test_equal_bodies(self, ctx, ball2):
        rep = corollary1_verify(ball2, ball2, context=ctx)
        assert rep.passed and rep.volume_difference == 0.0

    def test_scaled_ball_golden_numbers(self, ctx, ball2):
        rep = corollary1_verify(ball2, EuclideanBall(d2, 1.1), context=ctx)
        assert rep.volume_difference == pytest.approx(0.21 * math.pi / math.sqrt(2), rel=1e-9)
        assert rep.max_section_difference == pytest.approx(0.21 * math.pi, rel=1e-9)
        assert rep.passed

    def test_asymmetric_pair(self, ctx, ball2, polydisc2):
        rep = corollary1_verify(ball2, polydisc2, context=ctx)
        assert rep.passed
        assert rep.forward.passed and rep.reverse.passed


class TestSeparation:
    def test_scaled_ball_equality_n2(self, ctx, ball2):
        rep = separation_verify(ball2, EuclideanBall(d2, 1.2), context=ctx)
        assert not rep.degenerate
        assert rep.epsilon == pytest.approx((1.2 ** 2 - 1) * math.pi, rel=1e-10)
        assert rep.inradius_sq == pytest.approx(math.sqrt(2) / math.pi, rel=1e-9)
        assert abs(rep.margin) <= 1e-9
        assert rep.passed

    def test_scaled_ball_equality_n3(self, ctx, ball3):
        rep = separation_verify(ball3, EuclideanBall(d3, 1.5), context=ctx)
        assert not rep.degenerate and rep.passed
        assert abs(rep.margin) <= 1e-6 * abs(rep.lhs)

    def test_degenerate_labeled(self, ctx, ball2):
        rep = separation_verify(EuclideanBall(d2, 1.2), ball2, context=ctx)
        assert rep.degenerate
        assert rep.epsilon == 0.0
        assert "degenerate" in rep.note

    def test_identical_bodies_degenerate_pass(self, ctx, ball2):
        rep = separation_verify(ball2, ball2, context=ctx)
        assert rep.degenerate and rep.passed

    def test_supplied_epsilon_mode(self, ctx, ball2):
        rep = separation_verify(ball2, EuclideanBall(d2, 1.2), context=ctx,
                                epsilon=(1.2 ** 2 - 1) * math.pi)
        assert rep.passed and not rep.degenerate
        assert "supplied" in rep.note
        assert abs(rep.margin) <= 1e-9


class TestParseval:
    def test_euclidean_golden(self, ctx, ball2):
        res = parseval_check(ball2, ball2, 2.0)
        exact = 32 * math.pi ** 6
        assert res.lhs == pytest.approx(exact, rel=1e-10)
        assert res.rhs == pytest.approx(exact, rel=1e-10)
        assert res.relative_error <= 1e-10

    def test_scaling_both_sides(self, ball2):
        r = 1.25
        base = parseval_check(ball2, ball2, 2.0)
        scaled = parseval_check(ball2.scaled(r), ball2.scaled(r), 2.0)
        # both sides are homogeneous of total order 2n in the body scale
        assert scaled.lhs == pytest.approx(r ** 4 * base.lhs, rel=1e-10)
        assert scaled.rhs == pytest.approx(r ** 4 * base.rhs, rel=1e-10)

    def test_mixed_pair_within_tolerance(self, ball2):
        res = parseval_check(ComplexLqBall(d2, 3.0), ball2, 2.0, jmax=16)
        assert res.relative_error <= 1e-2

    def test_error_decreases_with_jmax(self, ball2, ell12):
        errs = [parseval_check(ell12, ball2, 2.0, jmax=j).relative_error
                for j in (12, 16, 20)]
        assert errs[0] > errs[1] > errs[2]

    def test_exponent_range(self, ball2):
        with pytest.raises(InvalidInputError):
            parseval_check(ball2, ball2, 4.0)

    def test_exponent_pairing_nontrivial(self, ball3):
        # n=3 with p = 2n-2 pairs against exponent 2, mirroring the stability proof;
        # closed form: lhs = |S^5| * lam_0(6,4) * lam_0(6,2) = pi^3 * 4pi^3 * 16pi^3
        res = parseval_check(ball3, ball3, 4.0)
        assert res.lhs == pytest.approx(64 * math.pi ** 9, rel=1e-10)
        assert res.relative_error <= 1e-10


class TestPositivity:
    def test_euclidean_constant_n3(self, ctx, ball3):
        res = positivity_check(ball3, context=ctx)
        assert res.passed
        assert res.min_value == pytest.approx(16 * math.pi ** 3, rel=1e-10)
        assert res.max_value == pytest.approx(16 * math.pi ** 3, rel=1e-10)

    def test_lq1_passes_n2(self, ctx):
        res = positivity_check(ComplexLqBall(d2, 1.0), context=ctx)
        assert res.passed
        assert res.min_value >= -1e-6 * res.max_value

    def test_exploratory_dimension4(self):
        res = positivity_check(ComplexLqBall(ComplexDim(4), 6.0),
                               config=None)
        assert res.exploratory and res.passed is None
        assert res.min_value < 0  # sign failure expected in dimension 4

    def test_dimension_guard(self, ctx):
        with pytest.raises(InvalidInputError):
            positivity_check(EuclideanBall(ComplexDim(5), 1.0), context=ctx)


class TestGammaLemma:
    def test_full_sweep(self):
        rows = gamma_lemma_check(170)
        assert len(rows) == 170
        assert all(r.passed for r in rows)

    def test_equality_at_one(self):
        row = gamma_lemma_check(1)[0]
        assert row.lhs == pytest.approx(1.0, abs=1e-14)
        assert row.rhs == 1.0

    def test_strict_from_two(self):
        rows = gamma_lemma_check(10)
        assert all(r.log_margin > 0 for r in rows[1:])

    def test_n2_values(self):
        row = gamma_lemma_check(2)[1]
        assert row.lhs == pytest.approx(1.0, rel=1e-14)
        assert row.rhs == pytest.approx(math.sqrt(2), rel=1e-14)

    def test_n5_values(self):
        row = gamma_lemma_check(5)[4]
        assert row.lhs == pytest.approx(24 ** 0.2, rel=1e-12)
        assert row.rhs == pytest.approx(5 ** 0.8, rel=1e-12)

    def test_range_guard(self):
        with pytest.raises(InvalidInputError):
            gamma_lemma_check(171)
