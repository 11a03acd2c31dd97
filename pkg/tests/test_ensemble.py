"""Monte Carlo ensembles, the few-zero construction, and scaling fits."""

import math

import numpy as np
import pytest

from coslab import (
    CoeffMask,
    construct_few_zeros,
    count_total,
    DiffPoly,
    fit_scaling,
    mask_bits,
    mc_envelope_measure,
    mc_expected_zeros,
    mc_sign_change_prob,
    mc_small_ball,
    optimal_m,
    sample_mask,
)
from coslab.ensemble import ExperimentRecord
from coslab.errors import DomainError, ParameterError, RankError


class TestSampling:
    def test_mask_bits_frozen_streams(self):
        # Counter-based generator: keyed by (seed, trial), platform stable.
        assert tuple(int(b) for b in mask_bits(8, 0, 0)) == (1, 1, 1, 0, 0, 1, 1, 0, 1)
        assert tuple(int(b) for b in mask_bits(8, 0, 1)) == (0, 1, 1, 1, 1, 1, 0, 1, 0)

    def test_streams_are_reproducible_and_distinct(self):
        a = mask_bits(64, 7, 3)
        b = mask_bits(64, 7, 3)
        c = mask_bits(64, 7, 4)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_bits_are_roughly_fair(self):
        total = sum(int(mask_bits(99, 1, t).sum()) for t in range(200))
        frac = total / (200 * 100)
        assert 0.49 <= frac <= 0.51

    def test_sample_mask_degree(self):
        assert sample_mask(17, 0).m == 17


class TestMonteCarlo:
    def test_expected_zeros_frozen_cell(self):
        rec = mc_expected_zeros(32, 8, 5, 1)
        assert rec.mean == pytest.approx(36.4)
        assert rec.per_trial == (32.0, 24.0, 40.0, 42.0, 44.0)
        assert rec.stderr == pytest.approx(3.709447398198281)

    def test_expected_zeros_thread_count_does_not_change_results(self):
        one = mc_expected_zeros(48, 12, 8, 5, threads=1)
        four = mc_expected_zeros(48, 12, 8, 5, threads=4)
        assert one.per_trial == four.per_trial
        assert one.mean == four.mean

    def test_stderr_formula(self):
        rec = mc_expected_zeros(24, 6, 4, 2)
        vals = np.array(rec.per_trial)
        want = vals.std(ddof=1) / math.sqrt(len(vals))
        assert rec.stderr == pytest.approx(want)

    def test_envelope_measure_bounded_by_half_period(self):
        rec = mc_envelope_measure(64, 30, 11)
        assert 0.0 < rec.mean <= math.pi

    def test_sign_change_prob_is_a_frequency(self):
        rec = mc_sign_change_prob(64, 16, 12, 50, 3)
        assert 0.0 <= rec.mean <= 1.0
        assert rec.kind == "sign_change"

    def test_sign_change_rejects_bad_j(self):
        with pytest.raises(ParameterError):
            mc_sign_change_prob(64, 16, 3, 10, 0)

    def test_small_ball_rejects_x_near_pi_multiples(self):
        with pytest.raises(DomainError):
            mc_small_ball(64, 3.14159, (0.25, 0.25), 10, 0)

    def test_small_ball_unreachable_center_has_zero_frequency(self):
        rec = mc_small_ball(256, 1.0, (1e6, 0.0), 500, 0)
        assert rec.mean == 0.0

    def test_record_round_trip(self):
        rec = mc_expected_zeros(24, 6, 3, 9)
        d = rec.to_dict()
        back = ExperimentRecord(
            kind=d["kind"],
            params=d["params"],
            seed=d["seed"],
            trials=d["trials"],
            mean=d["mean"],
            stderr=d["stderr"],
            per_trial=tuple(d["per_trial"]),
        )
        assert back.mean == rec.mean
        assert back.per_trial == rec.per_trial


class TestOptimalM:
    def test_frozen_values(self):
        assert optimal_m(100) == 2
        assert optimal_m(1000) == 2
        assert optimal_m(10000) == 822

    def test_matches_brute_force(self):
        for n in (16, 97, 3000):
            q = lambda m: n * math.log(m) / math.sqrt(m) + m
            best = min(range(2, n + 1), key=q)
            assert optimal_m(n) == best

    def test_rejects_small_n(self):
        with pytest.raises(ParameterError):
            optimal_m(8)


class TestConstruction:
    def test_small_construction_properties(self):
        res = construct_few_zeros(100, attempts=5, seed=1)
        assert len(res.index_set) == 100
        assert res.m == round((100 * math.log(100)) ** (2.0 / 3.0))
        # The reported count must match a recount of the chosen instance,
        # rebuilt from the complementary index set.
        member = set(res.index_set.a)
        bits = tuple(0 if k in member else 1 for k in range(res.n + 1))
        f = DiffPoly(res.n, CoeffMask(bits))
        rep = count_total(f)
        assert res.zeros == rep.certified + rep.uncertified

    def test_rejects_tiny_n(self):
        with pytest.raises(ParameterError):
            construct_few_zeros(32, attempts=2, seed=0)


class TestScalingFit:
    def synthetic_records(self, c1, c2):
        recs = []
        for n in (256, 512, 1024):
            for m in (8, 32, 128):
                mean = c1 * n * math.log(m) / math.sqrt(m) + c2 * m
                recs.append(
                    ExperimentRecord(
                        kind="zeros",
                        params={"n": n, "m": m},
                        seed=0,
                        trials=10,
                        mean=mean,
                        stderr=0.0,
                    )
                )
        return recs

    def test_exact_recovery(self):
        fit = fit_scaling(self.synthetic_records(3.0, 0.5))
        assert fit.c1 == pytest.approx(3.0, abs=1e-9)
        assert fit.c2 == pytest.approx(0.5, abs=1e-9)
        assert max(c["ratio"] for c in fit.cells) == pytest.approx(1.0, abs=1e-12)

    def test_rank_deficient_input_rejected(self):
        # Choosing n = m^1.5 / log m makes the model term n log(m)/sqrt(m)
        # equal to m, so the two design columns are identical.
        recs = []
        for m in (8, 32, 128):
            n = m**1.5 / math.log(m)
            for rep in range(2):
                recs.append(
                    ExperimentRecord(
                        kind="zeros",
                        params={"n": n, "m": m},
                        seed=rep,
                        trials=10,
                        mean=float(m),
                        stderr=0.0,
                    )
                )
        with pytest.raises(RankError):
            fit_scaling(recs)

    def test_too_few_records_rejected(self):
        with pytest.raises(ParameterError):
            fit_scaling(self.synthetic_records(3.0, 0.5)[:3])
