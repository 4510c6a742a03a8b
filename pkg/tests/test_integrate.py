import math
from fractions import Fraction

import numpy as np
import pytest

from kontsevich_weights import (Family, WeightQuery, convergence_report, full_mc, reduced_gamma_mc,
                                reduced_upsilon_quad, weight_upsilon)
from kontsevich_weights.integrate import (ORIENTATION, WEDGE_ORIENTATION, DiskMap, HalfPlaneMap,
                                          SamplerSpec, exact_value)


def z_score(est, exact):
    return (est.mean - exact) / est.std_error


class TestOrientation:
    def test_calibrated_constants(self):
        # calibrated once against 1/24, 1/12 and 1/2; all come out positive
        assert WEDGE_ORIENTATION == 1
        assert ORIENTATION == {Family.GAMMA: 1, Family.UPSILON: 1, Family.LAMBDA: 1}

    @pytest.mark.parametrize("family,n,exact", [("gamma", 1, 1 / 24), ("upsilon", 2, 1 / 12),
                                                ("lambda", 1, 0.5)])
    def test_sign_is_positive(self, family, n, exact):
        est = full_mc(WeightQuery(family, n), 100_000, seed=11, chunks=4)
        assert est.mean > 0
        assert abs(z_score(est, exact)) < 5


class TestQuadrature:
    @pytest.mark.parametrize("n,points,tol", [(2, 256, 1e-10), (0, 8, 1e-12), (3, 256, 1e-10),
                                              (6, 512, 1e-9)])
    def test_examples(self, n, points, tol):
        assert abs(reduced_upsilon_quad(n, points) - float(weight_upsilon(n))) <= tol

    def test_fast_convergence(self):
        for n in range(7):
            exact = float(weight_upsilon(n))
            errs = [abs(reduced_upsilon_quad(n, p) - exact) for p in (2, 4, 8, 16)]
            assert errs[-1] < 1e-14
            for a, b in zip(errs, errs[1:]):
                assert b <= max(a / 2, 1e-14)

    def test_points_check(self):
        with pytest.raises(ValueError):
            reduced_upsilon_quad(2, 1)


class TestSamplers:
    @pytest.mark.parametrize("sampler", [
        HalfPlaneMap(0.0, 1.0),
        DiskMap(1j, 1.0),
        SamplerSpec([HalfPlaneMap(0.0, 1.0), DiskMap(0.5 + 2j, 0.5)]),
    ])
    def test_density_normalized(self, sampler):
        # E[1/density] over a bounded box equals the box area only if the
        # density is normalized and matches the samples
        rng = np.random.default_rng(1)
        z = sampler.sample(rng, 400_000)
        assert np.all(z.imag > 0)
        inside = (np.abs(z.real) < 1) & (z.imag < 1)
        vals = np.where(inside, 1.0 / sampler.density(z), 0.0)
        assert vals.mean() == pytest.approx(2.0, rel=0.03)


class TestMonteCarlo:
    def test_deterministic(self):
        q = WeightQuery("gamma", 1)
        a = full_mc(q, 20_000, seed=5, chunks=4)
        b = full_mc(q, 20_000, seed=5, chunks=4)
        c = full_mc(q, 20_000, seed=5, chunks=4, workers=1)
        d = full_mc(q, 20_000, seed=5, chunks=4, workers=4)
        assert a.mean == b.mean == c.mean == d.mean
        assert a.std_error == d.std_error

    def test_seed_changes_value(self):
        q = WeightQuery("lambda", 2)
        assert full_mc(q, 5_000, seed=1).mean != full_mc(q, 5_000, seed=2).mean

    def test_upsilon_zero_exact(self):
        est = full_mc(WeightQuery("upsilon", 0), 10_000, seed=1, chunks=1)
        assert est.mean == pytest.approx(1.0, abs=1e-12)

    def test_lambda_zero(self):
        est = full_mc(WeightQuery("lambda", 0), 1_000, seed=1, chunks=2)
        assert est.mean == 1.0

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_lambda(self, n):
        est = full_mc(WeightQuery("lambda", n), 200_000, seed=100 + n, chunks=8)
        assert abs(z_score(est, 2.0 ** -n)) <= 4

    def test_lambda_wedge_integral(self):
        # one wedge over two boundary points integrates to 2 pi^2 before normalization
        est = full_mc(WeightQuery("lambda", 1), 200_000, seed=3, chunks=8)
        raw = est.mean * (2 * math.pi) ** 2
        assert abs(raw - 2 * math.pi**2) <= 4 * est.std_error * (2 * math.pi) ** 2

    @pytest.mark.parametrize("n,exact", [(1, 1 / 24), (2, 0.0), (3, 1 / 320)])
    def test_reduced_gamma(self, n, exact):
        est = reduced_gamma_mc(n, 400_000, seed=20 + n, chunks=8)
        assert abs(z_score(est, exact)) <= 4

    def test_reduced_and_full_agree(self):
        a = reduced_gamma_mc(1, 400_000, seed=7, chunks=8)
        b = full_mc(WeightQuery("gamma", 1), 400_000, seed=8, chunks=8)
        assert abs(a.mean - b.mean) <= 4 * math.hypot(a.std_error, b.std_error)

    def test_statistical_coverage(self):
        # at least 95 of 100 seeds land within 4 standard errors
        q = WeightQuery("lambda", 1)
        hits = 0
        for seed in range(100):
            est = full_mc(q, 4_000, seed=seed, chunks=4)
            hits += abs(z_score(est, 0.5)) <= 4
        assert hits >= 95

    def test_statistical_coverage_upsilon(self):
        q = WeightQuery("upsilon", 2)
        hits = sum(abs(z_score(full_mc(q, 4_000, seed=1000 + s, chunks=4), 1 / 12)) <= 4 for s in range(100))
        assert hits >= 95

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            full_mc(WeightQuery("gamma", 1), 0, seed=1)
        with pytest.raises(ValueError):
            full_mc(WeightQuery("gamma", 1), 10, seed=1, chunks=0)


class TestConvergenceReport:
    def test_scaling(self):
        rows = convergence_report(WeightQuery("gamma", 1), [10_000, 100_000, 1_000_000], seed=9, chunks=8)
        assert [r["samples"] for r in rows] == [10_000, 100_000, 1_000_000]
        for a, b in zip(rows, rows[1:]):
            ratio = a["std_error"] / b["std_error"]
            assert math.sqrt(10) / 2 <= ratio <= 2 * math.sqrt(10)

    @pytest.mark.parametrize("family,n", [("lambda", 2), ("upsilon", 2)])
    def test_final_row(self, family, n):
        rows = convergence_report(WeightQuery(family, n), [10_000, 200_000], seed=4, chunks=8)
        assert abs(rows[-1]["z"]) <= 4
        assert rows[-1]["abs_error"] == pytest.approx(abs(rows[-1]["estimate"] - exact_value(WeightQuery(family, n))))

    def test_ladder_must_ascend(self):
        with pytest.raises(ValueError):
            convergence_report(WeightQuery("lambda", 1), [100, 10], seed=1)
