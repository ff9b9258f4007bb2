"""Dual-bound, spectrum-check, and case-2bb residual tests."""

import math

import numpy as np
import pytest
from scipy import integrate, optimize

from autocorr import (
    BetaPowerBump,
    CosineBump,
    Indicator,
    MixedMeasure,
    StandardBump,
    case2bb_residual,
    case2bb_scan,
    dual_mass_report,
    negative_part_bound_check,
    nu_spectrum_check,
    positive_part_mass,
    sample,
    sinc_min_roots,
)
from autocorr.dualcheck import NormalizationError

PI = math.pi
LOWER = 0.41076748818940534  # 1/(2(1+theta0))

ALL_BUMPS = [StandardBump(), CosineBump(), BetaPowerBump(2), BetaPowerBump(3)]


class TestBumpFamilies:
    @pytest.mark.parametrize("bump", ALL_BUMPS, ids=lambda b: b.label + str(getattr(b, "k", "")))
    def test_probability_density(self, bump):
        total, _ = integrate.quad(lambda x: float(bump.density(x)), -1, 1,
                                  epsabs=1e-12, limit=200)
        assert total == pytest.approx(1.0, abs=1e-10)
        xs = np.linspace(-1.3, 1.3, 301)
        dens = bump.density(xs)
        assert np.all(dens >= 0)
        assert np.allclose(dens, bump.density(-xs))  # evenness
        assert float(bump.hat(0.0)) == pytest.approx(1.0, abs=1e-10)

    def test_hat_against_direct_quadrature(self):
        for bump in (CosineBump(), BetaPowerBump(2)):
            for xi in (0.31, 0.8, 2.7):
                direct, _ = integrate.quad(lambda x: float(bump.density(x)), 0, 1,
                                           weight="cos", wvar=2 * PI * xi,
                                           epsabs=1e-13, limit=200)
                assert float(bump.hat(xi)) == pytest.approx(2 * direct, abs=1e-10)


class TestPositivePartMass:
    # frozen from the sign-split quadrature, cross-checked against brute
    # half-period splitting
    EXPECTED = {
        "cosine": 1.0204507,
        "beta-power": 0.9705560,
        "standard-bump": 0.9232850,
    }

    @pytest.mark.parametrize("bump", [StandardBump(), CosineBump(), BetaPowerBump(2)],
                             ids=lambda b: b.label)
    def test_lower_bound_and_refinement(self, bump):
        rep = dual_mass_report(bump)
        assert rep.positive_mass >= LOWER - 1e-4
        assert rep.positive_mass >= rep.refined_bound - 1e-4
        assert rep.positive_mass == pytest.approx(self.EXPECTED[rep.bump], abs=1e-5)

    @pytest.mark.parametrize("bump", [StandardBump(), CosineBump(), BetaPowerBump(2)],
                             ids=lambda b: b.label)
    def test_sum_diff_identity(self, bump):
        rep = dual_mass_report(bump)
        # phi(0) = pos - neg and pos <= |phihat| mass
        assert rep.sum_diff_gap <= 2e-8
        assert rep.positive_mass <= rep.abs_mass + 1e-12

    def test_positive_part_mass_shortcut(self):
        assert positive_part_mass(CosineBump()) == pytest.approx(1.0204507, abs=1e-5)

    def test_density_below_abs_mass(self):
        # phi(x) <= ||phihat||_1 pointwise
        for bump in (CosineBump(), BetaPowerBump(2)):
            absm = dual_mass_report(bump).abs_mass
            for x in (-1.0, -0.5, 0.0, 0.5, 1.0):
                assert float(bump.density(x)) <= absm + 1e-9


class TestNegativePartBound:
    @pytest.mark.parametrize("bump", [StandardBump(), CosineBump(), BetaPowerBump(2)],
                             ids=lambda b: b.label)
    def test_identity_and_inequality(self, bump):
        rep = negative_part_bound_check(bump)
        assert rep.identity_gap <= 1e-8
        assert rep.inequality_slack >= -1e-8


def _tuned_atom_density_measure():
    """Atom pair at +-1/2 plus a scaled unit-interval density, with the scale
    tuned so the 1025-point window-ratio lattice infimum is exactly 1/2."""
    from autocorr.correlate import measure_correlation

    def make(c):
        d = sample(Indicator(0.5), cells=1024).scaled(c)
        return MixedMeasure(atoms=((-0.5, 0.5), (0.5, 0.5)), density=d)

    def lattice_inf(c):
        ts = np.linspace(0.0, 1.0, 1025)
        mc = measure_correlation(make(c))
        return float(np.min(np.asarray(mc.interval_mass(ts[:-1], ts[1:])) / (ts[1] - ts[0])))

    c = optimize.brentq(lambda c: lattice_inf(c) - 0.5, 0.4, 0.6, xtol=1e-12)
    return make(c)


class TestNuSpectrumCheck:
    def test_tuned_construction(self):
        mu = _tuned_atom_density_measure()
        rep = nu_spectrum_check(mu)
        assert abs(rep.window_inf - 0.5) <= 1e-6
        assert rep.nu_min >= -1e-6
        theta0 = sinc_min_roots().theta0
        assert rep.nu_hat_xi0 >= theta0 - 1e-6
        assert rep.nu_hat_xi0 <= rep.nu_hat_0 + 1e-6
        assert rep.nu_hat_0 == pytest.approx(rep.tv ** 2 - 1.0, abs=1e-8)

    def test_near_extremal_density(self):
        # renormalized pure density whose window infimum is 1/2: scaled
        # indicator of halfwidth 1, correlation triangle 2 - |t| on [0, 1]
        from autocorr.correlate import measure_correlation

        def make(c):
            return MixedMeasure(density=sample(Indicator(1.0), cells=2048).scaled(c))

        def lattice_inf(c):
            ts = np.linspace(0.0, 1.0, 1025)
            mc = measure_correlation(make(c))
            return float(np.min(np.asarray(mc.interval_mass(ts[:-1], ts[1:])) / (ts[1] - ts[0])))

        c = optimize.brentq(lambda c: lattice_inf(c) - 0.5, 0.5, 1.0, xtol=1e-12)
        rep = nu_spectrum_check(make(c))
        assert rep.nu_hat_xi0 >= sinc_min_roots().theta0 - 1e-4

    def test_renormalized_search_output(self):
        # a genuine min01 search output over [-1, 1], renormalized to the
        # window infimum 1/2, passes the full spectrum check
        from autocorr import search
        from autocorr.correlate import measure_correlation
        from autocorr.funcspace import GridFunction

        rec = search("min01", "piecewise", budget=1600, seed=2, dimension=8,
                     halfwidth=1.0)
        assert rec.best_value > 0
        vals = np.asarray(rec.best_params) ** 2

        def make(c):
            return MixedMeasure(density=GridFunction(-1.0, 0.25, c * vals))

        def lattice_inf(c):
            ts = np.linspace(0.0, 1.0, 1025)
            mc = measure_correlation(make(c))
            return float(np.min(np.asarray(mc.interval_mass(ts[:-1], ts[1:])) / (ts[1] - ts[0])))

        hi = 1.0
        while lattice_inf(hi) < 0.5:
            hi *= 2.0
        c = optimize.brentq(lambda c: lattice_inf(c) - 0.5, 1e-3, hi, xtol=1e-12)
        rep = nu_spectrum_check(make(c))
        assert rep.nu_hat_xi0 >= sinc_min_roots().theta0 - 1e-4
        assert rep.nu_min >= -1e-6

    def test_normalization_failure_names_interval(self):
        mu = MixedMeasure(density=sample(Indicator(1.0), cells=512))
        with pytest.raises(NormalizationError) as err:
            nu_spectrum_check(mu)
        lo, hi = err.value.interval
        assert 0.0 <= lo < hi <= 1.0


class TestCase2bb:
    def test_residual_at_one(self):
        assert case2bb_residual(1.0) > 0.05

    def test_scan_floor(self):
        grid, residuals = case2bb_scan()
        assert len(grid) == 81
        assert grid[0] == pytest.approx(0.01) and grid[-1] == pytest.approx(100.0)
        assert residuals.min() >= 0.01

    def test_continuity_in_a(self):
        grid, residuals = case2bb_scan()
        ratios = residuals[1:] / residuals[:-1]
        assert np.all(ratios < 10.0) and np.all(ratios > 0.1)

    def test_structural_constants(self):
        r = sinc_min_roots()
        assert r.alpha0 == pytest.approx(0.6992, abs=1e-4)
        assert r.alpha0 > 2.0 / 3.0
        assert 2.0 * (1.0 - r.alpha0) < 1.0  # f0*f0 support stays inside [-1, 1]

    def test_rejects_nonpositive_a(self):
        with pytest.raises(ValueError):
            case2bb_residual(-1.0)
