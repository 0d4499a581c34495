"""Metrics tests: internal statistics vs independent library oracles."""

import math

import numpy as np
import pytest
import scipy.special
import scipy.stats
from hypothesis import given, settings
from hypothesis import strategies as st

from gaitfeedback.core import AgrfEstimate, Limb, SegmentId, zero_motion_frame
from gaitfeedback.feedback import StanceOutcome
from gaitfeedback.gaitevents import EventKind, GaitEvent, make_stance
from gaitfeedback.metrics import (
    AnovaResult,
    Condition,
    CorruptReport,
    DegenerateGeometry,
    DegenerateVariance,
    DVariant,
    EmptyStance,
    IncompleteMatrix,
    InsufficientMarkers,
    MissingCondition,
    StanceMetrics,
    TrialAggregate,
    ZeroBaseline,
    ZeroErrorVariance,
    aggregate_trial,
    build_report,
    cohens_d,
    f_sf,
    gait_speed,
    mean_percent_change,
    paired_ci,
    peak_agrf,
    pearson_r,
    percent_change,
    read_report,
    reg_inc_beta,
    render_text,
    report_from_records,
    report_to_records,
    rm_anova,
    stance_metrics,
    step_length,
    t_cdf,
    t_ppf,
    tla_at,
    trigger_metrics,
    write_report,
)
from gaitfeedback.synthgait import GaitProfile, generate

FRAME_US = 20_000


def _estimates(values, start_frame=0, warmed=True):
    return [
        AgrfEstimate((start_frame + i) * FRAME_US, v, warmed_up=warmed)
        for i, v in enumerate(values)
    ]


def _frame_with_positions(positions, timestamp_us=0):
    frame = zero_motion_frame(timestamp_us)
    pos = np.array(frame.position, dtype=np.float64)
    for seg, xyz in positions.items():
        pos[seg] = xyz
    from gaitfeedback.core import KinematicFrame

    return KinematicFrame(
        timestamp_us=timestamp_us,
        quat=frame.quat,
        free_accel=frame.free_accel,
        ang_vel=frame.ang_vel,
        position=pos,
    )


class TestNumerics:
    @given(
        a=st.floats(min_value=0.5, max_value=30.0),
        b=st.floats(min_value=0.5, max_value=30.0),
        x=st.floats(min_value=0.0, max_value=1.0),
    )
    @settings(max_examples=200)
    def test_reg_inc_beta_vs_scipy(self, a, b, x):
        ours = reg_inc_beta(a, b, x)
        ref = float(scipy.special.betainc(a, b, x))
        assert ours == pytest.approx(ref, abs=1e-10)

    @given(
        p=st.floats(min_value=0.001, max_value=0.999),
        df=st.integers(min_value=1, max_value=60),
    )
    @settings(max_examples=150)
    def test_t_ppf_vs_scipy(self, p, df):
        ours = t_ppf(p, df)
        ref = float(scipy.stats.t.ppf(p, df))
        assert ours == pytest.approx(ref, abs=1e-4, rel=1e-6)

    @given(
        t=st.floats(min_value=-30.0, max_value=30.0),
        df=st.integers(min_value=1, max_value=60),
    )
    @settings(max_examples=150)
    def test_t_cdf_vs_scipy(self, t, df):
        assert t_cdf(t, df) == pytest.approx(
            float(scipy.stats.t.cdf(t, df)), abs=1e-9
        )

    @given(
        f=st.floats(min_value=0.0, max_value=50.0),
        d1=st.integers(min_value=1, max_value=20),
        d2=st.integers(min_value=1, max_value=60),
    )
    @settings(max_examples=150)
    def test_f_sf_vs_scipy(self, f, d1, d2):
        assert f_sf(f, d1, d2) == pytest.approx(
            float(scipy.stats.f.sf(f, d1, d2)), abs=1e-9
        )

    def test_t_quantile_accuracy_criterion(self):
        # the stated accuracy contract is 1e-4
        for df in (1, 2, 5, 7, 11, 29, 59):
            ours = t_ppf(0.975, df)
            ref = float(scipy.stats.t.ppf(0.975, df))
            assert abs(ours - ref) < 1e-4

    def test_incomplete_beta_accuracy_criterion(self):
        # the stated accuracy contract is 1e-6
        for a, b, x in [(0.5, 0.5, 0.3), (2, 10, 0.1), (15, 3, 0.9), (30, 30, 0.5)]:
            assert abs(reg_inc_beta(a, b, x) - float(scipy.special.betainc(a, b, x))) < 1e-6

    def test_bad_domains(self):
        with pytest.raises(ValueError):
            reg_inc_beta(0.0, 1.0, 0.5)
        with pytest.raises(ValueError):
            t_ppf(0.0, 5)
        with pytest.raises(ValueError):
            t_ppf(0.5, 0)
        with pytest.raises(ValueError):
            f_sf(1.0, 0, 5)


class TestPeakAgrf:
    def test_max_and_frame(self):
        series = _estimates([0.01, 0.05, 0.095, 0.03])
        value, idx = peak_agrf(series)
        assert value == pytest.approx(0.095)
        assert idx == 2

    def test_braking_only_returns_least_negative(self):
        series = _estimates([-0.08, -0.02, -0.05])
        value, idx = peak_agrf(series)
        assert value == pytest.approx(-0.02)
        assert idx == 1

    def test_non_warmed_excluded(self):
        series = _estimates([0.5 / 10], warmed=False) + _estimates([0.03], 1)
        value, idx = peak_agrf(series)
        assert value == pytest.approx(0.03)
        assert idx == 1

    def test_empty_stance(self):
        with pytest.raises(EmptyStance):
            peak_agrf([])
        with pytest.raises(EmptyStance):
            peak_agrf(_estimates([0.1, 0.2], warmed=False))

    def test_matches_generator_truth_within_bound(self):
        frames, truth = generate(GaitProfile(noise_sd=0.0), 20.0)
        series = [
            AgrfEstimate(f.timestamp_us, float(truth.agrf_bw[i]), warmed_up=True)
            for i, f in enumerate(frames)
        ]
        for st_truth in truth.stances[:5]:
            window = series[st_truth.contact_frame : st_truth.swing_frame]
            value, idx = peak_agrf(window)
            sampled = truth.agrf_bw[st_truth.contact_frame : st_truth.swing_frame]
            assert value == pytest.approx(float(np.max(sampled)), abs=1e-12)
            assert st_truth.contact_frame + idx == st_truth.peak_frame
            # the 50 Hz sample grid sits close to the continuous peak
            assert value == pytest.approx(st_truth.peak_bw, abs=0.005)


class TestTla:
    def test_posterior_foot_example(self):
        frame = _frame_with_positions(
            {
                SegmentId.PELVIS: (0.25, 0.0, 0.95),
                SegmentId.FOOT_PARETIC: (0.0, 0.08, 0.05),
            }
        )
        # positions are stored single-precision, so compare at that scale
        assert tla_at(frame, Limb.PARETIC) == pytest.approx(
            math.degrees(math.atan2(0.25, 0.9)), abs=1e-5
        )
        assert tla_at(frame, Limb.PARETIC) == pytest.approx(15.524, abs=1e-3)

    def test_foot_below_pelvis_zero(self):
        frame = _frame_with_positions(
            {
                SegmentId.PELVIS: (1.0, 0.0, 0.95),
                SegmentId.FOOT_PARETIC: (1.0, 0.08, 0.05),
            }
        )
        assert tla_at(frame, Limb.PARETIC) == pytest.approx(0.0, abs=1e-12)

    def test_degenerate_geometry(self):
        frame = _frame_with_positions(
            {
                SegmentId.PELVIS: (0.0, 0.0, 0.10),
                SegmentId.FOOT_PARETIC: (0.0, 0.08, 0.05),
            }
        )
        with pytest.raises(DegenerateGeometry):
            tla_at(frame, Limb.PARETIC)

    def test_synthetic_gait_magnitude(self):
        # trailing-limb angle at peak AGRF for default synthetic gait:
        # posterior-positive and in the plausible hemiparetic band
        frames, truth = generate(GaitProfile(noise_sd=0.0), 20.0)
        angles = [
            tla_at(frames[st_truth.peak_frame], Limb.PARETIC)
            for st_truth in truth.stances
        ]
        assert all(2.0 < a < 25.0 for a in angles)

    def test_anterior_foot_negative(self):
        frame = _frame_with_positions(
            {
                SegmentId.PELVIS: (0.0, 0.0, 0.95),
                SegmentId.FOOT_PARETIC: (0.2, 0.08, 0.05),
            }
        )
        assert tla_at(frame, Limb.PARETIC) < 0


class TestStepLength:
    def test_lead_minus_trail(self):
        frame = _frame_with_positions(
            {
                SegmentId.FOOT_PARETIC: (0.15, 0.08, 0.05),
                SegmentId.FOOT_NONPARETIC: (-0.10, -0.08, 0.05),
            }
        )
        assert step_length(frame, Limb.PARETIC) == pytest.approx(0.25, abs=1e-7)

    def test_level_feet_zero(self):
        frame = _frame_with_positions(
            {
                SegmentId.FOOT_PARETIC: (0.0, 0.08, 0.05),
                SegmentId.FOOT_NONPARETIC: (0.0, -0.08, 0.05),
            }
        )
        assert step_length(frame, Limb.PARETIC) == pytest.approx(0.0, abs=1e-12)

    def test_synthetic_gait_magnitude(self):
        # paretic step length at contact for default profile: near 0.256 m
        frames, truth = generate(GaitProfile(noise_sd=0.0), 20.0)
        contacts = [
            e.frame_index
            for e in truth.events
            if e.kind is EventKind.FOOT_CONTACT and e.side is Limb.PARETIC
        ]
        lengths = [step_length(frames[i], Limb.PARETIC) for i in contacts]
        assert np.mean(lengths) == pytest.approx(0.256, abs=0.02)


class TestStanceMetricsBundle:
    def test_bundle(self):
        frames, truth = generate(GaitProfile(noise_sd=0.0), 20.0)
        series = [
            AgrfEstimate(f.timestamp_us, float(truth.agrf_bw[i]), warmed_up=True)
            for i, f in enumerate(frames)
        ]
        st_truth = truth.stances[2]
        bundle = stance_metrics(
            series, frames, st_truth.contact_frame, st_truth.swing_frame
        )
        sampled_peak = float(
            np.max(truth.agrf_bw[st_truth.contact_frame : st_truth.swing_frame])
        )
        assert bundle.peak_agrf_bw == pytest.approx(sampled_peak, abs=1e-12)
        assert bundle.peak_frame == st_truth.peak_frame
        assert not bundle.non_propulsive
        assert 2.0 < bundle.tla_deg < 25.0
        assert 0.1 < bundle.step_length_m < 0.5

    def test_invalid_interval(self):
        with pytest.raises(ValueError):
            stance_metrics([], [], 3, 3)


class TestGaitSpeed:
    def test_two_minute_mark(self):
        assert gait_speed([38.0, 76.8]) == pytest.approx(0.64)

    def test_zero_distance(self):
        assert gait_speed([0.0, 0.0]) == 0.0

    def test_three_minute_bout_uses_first_two(self):
        assert gait_speed([40.0, 84.0, 130.0]) == pytest.approx(0.70)

    def test_insufficient_markers(self):
        with pytest.raises(InsufficientMarkers):
            gait_speed([42.0])

    def test_negative_distance(self):
        with pytest.raises(ValueError):
            gait_speed([1.0, -1.0])


class TestPercentChange:
    def test_table_example(self):
        assert percent_change(0.088, 0.095) == pytest.approx(7.9545, abs=1e-3)

    def test_identity(self):
        assert percent_change(0.7, 0.7) == 0.0

    def test_halving(self):
        assert percent_change(0.10, 0.05) == pytest.approx(-50.0)

    def test_zero_baseline(self):
        with pytest.raises(ZeroBaseline):
            percent_change(0.0, 0.1)

    @given(
        baseline=st.floats(min_value=0.01, max_value=10.0),
        condition=st.floats(min_value=-10.0, max_value=10.0),
        scale=st.floats(min_value=0.01, max_value=100.0),
    )
    def test_rescaling_invariance(self, baseline, condition, scale):
        a = percent_change(baseline, condition)
        b = percent_change(baseline * scale, condition * scale)
        assert a == pytest.approx(b, rel=1e-9, abs=1e-9)

    def test_mean_of_participant_changes(self):
        # group figure is the mean of per-participant changes, not the
        # change of group means
        baselines = [0.05, 0.10]
        conditions = [0.10, 0.10]
        assert mean_percent_change(baselines, conditions) == pytest.approx(50.0)
        change_of_means = percent_change(np.mean(baselines), np.mean(conditions))
        assert change_of_means == pytest.approx(100.0 / 3.0)


class TestCohensD:
    def test_identical_samples_zero(self):
        assert cohens_d([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == pytest.approx(0.0)

    def test_speed_row_arithmetic(self):
        # two-point samples with exactly the stated means and SDs
        half_a = 0.29 / math.sqrt(2.0)
        half_b = 0.33 / math.sqrt(2.0)
        a = [0.64 - half_a, 0.64 + half_a]
        b = [0.75 - half_b, 0.75 + half_b]
        expected = (0.75 - 0.64) / math.sqrt((0.29**2 + 0.33**2) / 2.0)
        assert cohens_d(a, b, DVariant.POOLED) == pytest.approx(expected, abs=1e-12)
        assert cohens_d(a, b, DVariant.POOLED) == pytest.approx(0.35410, abs=1e-5)

    @given(
        a=st.lists(st.floats(min_value=-50, max_value=50), min_size=2, max_size=12),
        b=st.lists(st.floats(min_value=-50, max_value=50), min_size=2, max_size=12),
    )
    @settings(max_examples=150)
    def test_pooled_vs_oracle(self, a, b):
        sa, sb = np.std(a, ddof=1), np.std(b, ddof=1)
        denom = math.sqrt((sa**2 + sb**2) / 2.0)
        if denom < 1e-12:
            return
        expected = (np.mean(b) - np.mean(a)) / denom
        assert cohens_d(a, b) == pytest.approx(expected, rel=1e-9, abs=1e-9)

    @given(
        pairs=st.lists(
            st.tuples(
                st.floats(min_value=-50, max_value=50),
                st.floats(min_value=-50, max_value=50),
            ),
            min_size=2,
            max_size=12,
        )
    )
    @settings(max_examples=150)
    def test_paired_vs_oracle(self, pairs):
        a = [p[0] for p in pairs]
        b = [p[1] for p in pairs]
        diffs = np.array(b) - np.array(a)
        sd = np.std(diffs, ddof=1)
        if sd < 1e-12:
            return
        expected = float(np.mean(diffs) / sd)
        assert cohens_d(a, b, DVariant.PAIRED) == pytest.approx(
            expected, rel=1e-9, abs=1e-9
        )

    @given(
        a=st.lists(st.floats(min_value=-5, max_value=5), min_size=3, max_size=8),
        b=st.lists(st.floats(min_value=-5, max_value=5), min_size=3, max_size=8),
        shift=st.floats(min_value=-100, max_value=100),
    )
    @settings(max_examples=60)
    def test_shift_invariance(self, a, b, shift):
        try:
            base = cohens_d(a, b)
        except DegenerateVariance:
            return
        shifted = cohens_d([x + shift for x in a], [y + shift for y in b])
        assert shifted == pytest.approx(base, rel=1e-6, abs=1e-7)

    def test_paired_requires_equal_lengths(self):
        with pytest.raises(ValueError):
            cohens_d([1, 2, 3], [1, 2], DVariant.PAIRED)

    def test_too_few_points(self):
        with pytest.raises(DegenerateVariance):
            cohens_d([1.0], [1.0, 2.0])

    def test_constant_unequal_raises(self):
        with pytest.raises(DegenerateVariance):
            cohens_d([1.0, 1.0], [2.0, 2.0])


class TestPairedCi:
    def test_all_zero_diffs(self):
        assert paired_ci([0.0, 0.0, 0.0]) == (0.0, 0.0)

    def test_symmetric_diffs(self):
        lo, hi = paired_ci([-0.5, 0.5, -0.5, 0.5])
        assert lo == pytest.approx(-hi, abs=1e-12)

    def test_fixture_vs_scipy(self):
        diffs = [0.3, -0.1, 0.4, 0.2, 0.0, 0.5, -0.2, 0.25]
        lo, hi = paired_ci(diffs)
        n = len(diffs)
        t_crit = float(scipy.stats.t.ppf(0.975, n - 1))
        m = float(np.mean(diffs))
        half = t_crit * float(np.std(diffs, ddof=1)) / math.sqrt(n)
        assert lo == pytest.approx(m - half, abs=1e-6)
        assert hi == pytest.approx(m + half, abs=1e-6)

    @given(
        diffs=st.lists(
            st.floats(min_value=-10, max_value=10), min_size=2, max_size=12
        ),
        level=st.sampled_from([0.90, 0.95, 0.99]),
    )
    @settings(max_examples=100)
    def test_vs_scipy_property(self, diffs, level):
        sd = np.std(diffs, ddof=1)
        lo, hi = paired_ci(diffs, level)
        if sd == 0.0:
            assert lo == hi
            return
        n = len(diffs)
        t_crit = float(scipy.stats.t.ppf(0.5 * (1 + level), n - 1))
        m = float(np.mean(diffs))
        half = t_crit * float(sd) / math.sqrt(n)
        assert lo == pytest.approx(m - half, rel=1e-6, abs=1e-6)
        assert hi == pytest.approx(m + half, rel=1e-6, abs=1e-6)

    def test_too_few(self):
        with pytest.raises(DegenerateVariance):
            paired_ci([0.1])


def _anova_oracle(matrix):
    """Independent numpy-route RM-ANOVA for cross-checking."""
    m = np.asarray(matrix, dtype=np.float64)
    n, k = m.shape
    grand = m.mean()
    ss_subj = k * np.sum((m.mean(axis=1) - grand) ** 2)
    ss_cond = n * np.sum((m.mean(axis=0) - grand) ** 2)
    ss_total = np.sum((m - grand) ** 2)
    ss_err = ss_total - ss_subj - ss_cond
    df_c, df_e = k - 1, (n - 1) * (k - 1)
    f = (ss_cond / df_c) / (ss_err / df_e)
    return f, df_c, df_e, float(scipy.stats.f.sf(f, df_c, df_e))


class TestRmAnova:
    def test_equal_condition_means_f_zero(self):
        matrix = [[1.0, 2.0, 3.0], [3.0, 2.0, 1.0], [2.0, 2.0, 2.0]]
        result = rm_anova(matrix)
        assert result.f_value == pytest.approx(0.0, abs=1e-12)

    def test_statsmodels_fixture(self):
        # published-style fixture: 6 subjects x 4 conditions
        matrix = [
            [45.0, 50.0, 55.0, 65.0],
            [42.0, 42.0, 45.0, 50.0],
            [36.0, 41.0, 43.0, 49.0],
            [39.0, 35.0, 40.0, 51.0],
            [51.0, 55.0, 59.0, 63.0],
            [44.0, 49.0, 56.0, 58.0],
        ]
        result = rm_anova(matrix)
        import pandas as pd
        from statsmodels.stats.anova import AnovaRM

        rows = [
            {"subject": i, "condition": j, "value": matrix[i][j]}
            for i in range(6)
            for j in range(4)
        ]
        fitted = AnovaRM(
            pd.DataFrame(rows), "value", "subject", within=["condition"]
        ).fit()
        f_ref = float(fitted.anova_table["F Value"].iloc[0])
        p_ref = float(fitted.anova_table["Pr > F"].iloc[0])
        assert result.f_value == pytest.approx(f_ref, abs=1e-3)
        assert result.p_value == pytest.approx(p_ref, abs=1e-3)

    def test_injected_effect_significant(self):
        rng = np.random.default_rng(7)
        base = rng.normal(0.0, 1.0, size=(8, 1))
        noise = rng.normal(0.0, 0.2, size=(8, 4))
        effect = np.array([0.0, 0.5, 1.0, 1.5])
        matrix = base + effect + noise
        result = rm_anova(matrix.tolist())
        assert result.p_value < 0.01

    @given(
        n=st.integers(min_value=2, max_value=8),
        k=st.integers(min_value=2, max_value=5),
        seed=st.integers(min_value=0, max_value=10_000),
    )
    @settings(max_examples=80)
    def test_vs_numpy_oracle(self, n, k, seed):
        rng = np.random.default_rng(seed)
        matrix = rng.normal(0.0, 1.0, size=(n, k)).tolist()
        result = rm_anova(matrix)
        f_ref, df_c, df_e, p_ref = _anova_oracle(matrix)
        assert result.f_value == pytest.approx(f_ref, rel=1e-9, abs=1e-9)
        assert result.df_conditions == df_c
        assert result.df_error == df_e
        assert result.p_value == pytest.approx(p_ref, abs=1e-6)

    @given(
        seed=st.integers(min_value=0, max_value=1000),
        shifts=st.lists(
            st.floats(min_value=-100, max_value=100), min_size=4, max_size=4
        ),
    )
    @settings(max_examples=40)
    def test_subject_shift_invariance(self, seed, shifts):
        rng = np.random.default_rng(seed)
        matrix = rng.normal(0.0, 1.0, size=(4, 3))
        shifted = matrix + np.array(shifts)[:, None]
        f_a = rm_anova(matrix.tolist()).f_value
        f_b = rm_anova(shifted.tolist()).f_value
        assert f_b == pytest.approx(f_a, rel=1e-6, abs=1e-8)

    def test_incomplete_matrix(self):
        with pytest.raises(IncompleteMatrix):
            rm_anova([[1.0, 2.0]])
        with pytest.raises(IncompleteMatrix):
            rm_anova([[1.0], [2.0]])
        with pytest.raises(IncompleteMatrix):
            rm_anova([[1.0, 2.0], [1.0, 2.0, 3.0]])
        with pytest.raises(IncompleteMatrix):
            rm_anova([[1.0, float("nan")], [1.0, 2.0]])

    def test_zero_error_variance(self):
        with pytest.raises(ZeroErrorVariance):
            rm_anova([[1.0, 2.0], [2.0, 3.0]])  # identical per-subject diffs


class TestPearson:
    def test_identity(self):
        assert pearson_r([1, 2, 3], [1, 2, 3]) == pytest.approx(1.0)

    def test_negation(self):
        assert pearson_r([1, 2, 3], [-1, -2, -3]) == pytest.approx(-1.0)

    @given(
        pairs=st.lists(
            st.tuples(
                st.floats(min_value=-100, max_value=100),
                st.floats(min_value=-100, max_value=100),
            ),
            min_size=3,
            max_size=12,
        )
    )
    @settings(max_examples=150)
    def test_vs_numpy(self, pairs):
        x = [p[0] for p in pairs]
        y = [p[1] for p in pairs]
        if np.std(x) < 1e-9 or np.std(y) < 1e-9:
            return
        ref = float(np.corrcoef(x, y)[0, 1])
        assert pearson_r(x, y) == pytest.approx(ref, rel=1e-9, abs=1e-12)

    def test_degenerate(self):
        with pytest.raises(DegenerateVariance):
            pearson_r([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])
        with pytest.raises(DegenerateVariance):
            pearson_r([1.0, 2.0], [1.0, 2.0])


def _outcome(index, pulse, success=None, active=None):
    contact = GaitEvent(index * 1_000_000, index * 50, EventKind.FOOT_CONTACT)
    swing = GaitEvent(index * 1_000_000 + 700_000, index * 50 + 35, EventKind.SWING_INIT)
    if success is None:
        success = pulse
    if active is None:
        active = pulse
    return StanceOutcome(
        stance=make_stance(contact, swing),
        peak_agrf_bw=0.1 if success else 0.05,
        success=success,
        feedback_active=active,
        pulse_sent=pulse,
        trigger_time_us=swing.timestamp_us if pulse else None,
    )


class TestTriggerMetrics:
    def test_runs_3_and_1(self):
        # stances 0..9; pulses at 3,4,5 and 9
        outcomes = [_outcome(i, pulse=i in (3, 4, 5, 9)) for i in range(10)]
        tm = trigger_metrics(outcomes, first_bout_start_us=0)
        assert tm.total_triggers == 4
        assert tm.max_consecutive == 3
        assert tm.run_lengths == (3, 1)
        assert tm.cv_consecutive == pytest.approx(0.5)
        assert tm.time_to_first_s == pytest.approx(3.7)

    def test_no_triggers(self):
        outcomes = [_outcome(i, pulse=False) for i in range(5)]
        tm = trigger_metrics(outcomes, first_bout_start_us=0)
        assert tm.total_triggers == 0
        assert tm.max_consecutive == 0
        assert tm.time_to_first_s is None
        assert tm.cv_consecutive is None
        assert tm.cv_low_confidence

    def test_single_full_run(self):
        outcomes = [_outcome(i, pulse=True) for i in range(6)]
        tm = trigger_metrics(outcomes, first_bout_start_us=0)
        assert tm.run_lengths == (6,)
        assert tm.cv_consecutive == 0.0
        assert tm.cv_low_confidence  # one run carries no spread information

    @given(
        flags=st.lists(st.booleans(), min_size=1, max_size=40),
    )
    @settings(max_examples=100)
    def test_vs_naive_rescan(self, flags):
        outcomes = [_outcome(i, pulse=f) for i, f in enumerate(flags)]
        tm = trigger_metrics(outcomes, first_bout_start_us=0)
        # naive oracle re-scan
        runs = []
        count = 0
        for f in flags:
            if f:
                count += 1
            else:
                if count:
                    runs.append(count)
                count = 0
        if count:
            runs.append(count)
        assert tm.total_triggers == sum(flags)
        assert tm.max_consecutive == (max(runs) if runs else 0)
        assert tm.run_lengths == tuple(runs)
        if len(runs) >= 2:
            mean = np.mean(runs)
            assert tm.cv_consecutive == pytest.approx(
                float(np.std(runs) / mean), rel=1e-12
            )


def _aggregate(condition, peak, tla=10.0, step=0.25, speed=0.64):
    return TrialAggregate(
        condition=condition,
        n_stances=20,
        peak_agrf_mean_bw=peak,
        peak_agrf_sd_bw=0.01,
        tla_mean_deg=tla,
        tla_sd_deg=1.0,
        step_length_mean_m=step,
        step_length_sd_m=0.02,
        speed_mps=speed,
    )


def _participant(peaks):
    return {
        Condition.BASELINE: _aggregate(Condition.BASELINE, peaks[0]),
        Condition.DURING_FEEDBACK: _aggregate(Condition.DURING_FEEDBACK, peaks[1]),
        Condition.POST_FEEDBACK: _aggregate(Condition.POST_FEEDBACK, peaks[2]),
        Condition.RETENTION: _aggregate(Condition.RETENTION, peaks[3]),
    }


class TestReport:
    def test_missing_condition(self):
        incomplete = _participant([0.08, 0.09, 0.09, 0.09])
        del incomplete[Condition.RETENTION]
        with pytest.raises(MissingCondition):
            build_report([incomplete])
        with pytest.raises(MissingCondition):
            build_report([])

    def test_identical_conditions_null_report(self):
        participants = [_participant([0.08] * 4), _participant([0.10] * 4)]
        report = build_report(participants)
        peak = report.metrics[0]
        for cond in ("during_feedback", "post_feedback", "retention"):
            assert peak.mean_pct_change[cond] == pytest.approx(0.0, abs=1e-12)
            assert peak.pct_change_of_means[cond] == pytest.approx(0.0, abs=1e-12)
            assert peak.d_paired[cond] == pytest.approx(0.0, abs=1e-12)
        # no condition variance at all: ANOVA error variance is zero-flagged
        assert peak.anova is None

    def test_responder_positive_retention_change(self):
        participants = [
            _participant([0.080, 0.095, 0.090, 0.092]),
            _participant([0.085, 0.100, 0.096, 0.097]),
            _participant([0.090, 0.104, 0.099, 0.101]),
        ]
        report = build_report(participants)
        peak = report.metrics[0]
        assert peak.mean_pct_change["retention"] > 0
        assert peak.anova is not None
        assert peak.anova.p_value < 0.05

    def test_round_trip_records(self):
        participants = [
            _participant([0.080, 0.095, 0.090, 0.092]),
            _participant([0.085, 0.100, 0.096, 0.097]),
        ]
        outcomes = [_outcome(i, pulse=i in (2, 3)) for i in range(6)]
        report = build_report(
            participants, triggers=[trigger_metrics(outcomes, 0)]
        )
        rebuilt = report_from_records(report_to_records(report))
        assert rebuilt == report

    def test_round_trip_file(self, tmp_path):
        participants = [_participant([0.08, 0.09, 0.091, 0.095])]
        report = build_report(participants)
        path = tmp_path / "session.report"
        write_report(path, report)
        assert read_report(path) == report

    def test_corrupt_file(self, tmp_path):
        path = tmp_path / "bad.report"
        path.write_text('{"record": "report_meta", "version": 99, "n_participants": 1}\n')
        with pytest.raises(CorruptReport):
            read_report(path)
        path.write_text("not json\n")
        with pytest.raises(CorruptReport):
            read_report(path)

    def test_render_text_mentions_all_metrics(self):
        participants = [_participant([0.08, 0.09, 0.091, 0.095])] * 2
        text = render_text(build_report(participants))
        for label in ("Peak AGRF", "TLA", "Step length", "Gait speed"):
            assert label in text
        assert "RM-ANOVA" not in text or "F(" in text


class TestAggregateTrial:
    def test_mean_sd(self):
        stances = [
            StanceMetrics(0.08, 10.0, 0.24),
            StanceMetrics(0.10, 12.0, 0.26),
            StanceMetrics(0.09, 11.0, 0.25),
        ]
        agg = aggregate_trial(Condition.BASELINE, stances, speed_mps=0.64)
        assert agg.peak_agrf_mean_bw == pytest.approx(0.09)
        assert agg.peak_agrf_sd_bw == pytest.approx(np.std([0.08, 0.10, 0.09], ddof=1))
        assert agg.low_confidence  # 3 < 5 stances

    def test_enough_stances_confident(self):
        stances = [StanceMetrics(0.09, 10.0, 0.25)] * 5
        agg = aggregate_trial(Condition.RETENTION, stances, speed_mps=0.6)
        assert not agg.low_confidence

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            aggregate_trial(Condition.BASELINE, [], speed_mps=0.6)
