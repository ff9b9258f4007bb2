"""Domain-type tests: grids, analytic families, measures."""

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from autocorr import (
    BSExample,
    Gaussian,
    GridFunction,
    Indicator,
    MixedMeasure,
    PiecewiseConstant,
    bs_l1,
    family_from_spec,
    norms,
    sample,
)


class TestGridFunction:
    def test_basic_norms(self):
        f = GridFunction(0.0, 0.5, [1.0, 2.0, 3.0])
        assert f.l1_norm == pytest.approx(3.0, abs=0)
        assert f.l2_norm == pytest.approx(math.sqrt(0.5 * 14.0), rel=1e-15)
        assert f.support == (0.0, 1.5)
        assert f.total_variation == pytest.approx(1 + 1 + 1 + 3)

    def test_validation(self):
        with pytest.raises(ValueError):
            GridFunction(0.0, -1.0, [1.0])
        with pytest.raises(ValueError):
            GridFunction(0.0, 1.0, [])
        with pytest.raises(ValueError):
            GridFunction(0.0, 1.0, [np.nan])

    def test_negative_clamp_warns_when_large(self):
        with pytest.warns(UserWarning):
            f = GridFunction(0.0, 1.0, [1.0, -1e-6])
        assert f.samples[1] == 0.0

    def test_negative_clamp_silent_when_fp_noise(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            f = GridFunction(0.0, 1.0, [1.0, -1e-16])
        assert f.samples[1] == 0.0

    def test_value_at_and_integral(self):
        f = GridFunction(-1.0, 0.5, [1.0, 2.0, 0.0, 4.0])
        assert f.value_at(-0.75) == 1.0
        assert f.value_at(0.75) == 4.0
        assert f.value_at(5.0) == 0.0
        assert f.integral(-1.0, 1.0) == pytest.approx(f.l1_norm, abs=0)
        assert f.integral(-0.75, -0.5) == pytest.approx(0.25)
        assert f.integral(2.0, 3.0) == 0.0

    def test_immutable(self):
        f = GridFunction(0.0, 1.0, [1.0])
        with pytest.raises(ValueError):
            f.samples[0] = 2.0

    def test_rebinned_preserves_mass(self):
        rng = np.random.default_rng(5)
        f = GridFunction(-0.3, 0.07, rng.uniform(0, 1, 17))
        g = f.rebinned(-1.0, 0.011, 200)
        assert g.l1_norm == pytest.approx(f.l1_norm, rel=1e-12)

    @settings(max_examples=25, deadline=None)
    @given(c=st.floats(min_value=1e-3, max_value=1e3),
           n=st.integers(min_value=1, max_value=40), seed=st.integers(0, 2**31))
    def test_norm_homogeneity(self, c, n, seed):
        rng = np.random.default_rng(seed)
        f = GridFunction(-1.0, 0.1, rng.uniform(0, 1, n))
        g = f.scaled(c)
        assert g.l1_norm == pytest.approx(c * f.l1_norm, rel=1e-12)
        assert g.l2_norm == pytest.approx(c * f.l2_norm, rel=1e-12)


class TestSampling:
    def test_indicator_geometry(self):
        f = sample(Indicator(0.5), support=(-1, 1), cells=4)
        assert f.spacing == 0.5
        assert list(f.samples) == [0.0, 1.0, 1.0, 0.0]

    def test_gaussian_l1(self):
        f = sample(Gaussian(1.0), support=(-8, 8), cells=2001)
        assert abs(f.l1_norm - math.sqrt(math.pi)) < 1e-6

    def test_gaussian_l2(self):
        f = sample(Gaussian(2.0), cells=4001)
        assert abs(f.l2_norm - (math.pi / 4) ** 0.25) < 1e-6

    def test_bs_l1_quadrature(self):
        # exact value 11 pi/24 via the substitution x = sin(u)/2
        assert abs(bs_l1() - 11 * math.pi / 24) < 1e-4
        assert abs(bs_l1() - 1.4398966328953218) < 1e-10

    def test_bs_grid_sampling_support(self):
        f = sample(BSExample(), support=(-0.75, 0.75), cells=300)
        assert np.all(np.isfinite(f.samples))
        with pytest.raises(ValueError):
            sample(BSExample(), support=(-0.4, 0.6), cells=100)

    def test_bad_parameters_rejected(self):
        for bad in (Gaussian, Indicator):
            with pytest.raises(ValueError):
                bad(-1.0)
        with pytest.raises(ValueError):
            PiecewiseConstant(0.0, [1.0])
        with pytest.raises(ValueError):
            sample(Indicator(1.0), cells=1)

    def test_norms_tuple(self):
        f = sample(Indicator(0.5), cells=16)
        assert norms(f) == (f.l1_norm, f.l2_norm)

    @pytest.mark.parametrize("family,exact_l1,exact_l2", [
        (Gaussian(1.0), math.sqrt(math.pi), (math.pi / 2) ** 0.25),
        (Gaussian(3.0), math.sqrt(math.pi / 3), (math.pi / 6) ** 0.25),
        (Indicator(0.7), 1.4, math.sqrt(1.4)),
    ])
    def test_refinement_convergence(self, family, exact_l1, exact_l2):
        # doubling the cell count never grows the error beyond 10% plus an
        # FP-noise floor (smooth families plateau at the support truncation)
        errs = []
        for k in range(8, 15):
            f = sample(family, cells=2 ** k)
            errs.append(abs(f.l1_norm - exact_l1) + abs(f.l2_norm - exact_l2))
        for a, b in zip(errs, errs[1:]):
            assert b <= 1.1 * a + 1e-12 * exact_l1

    def test_family_from_spec(self):
        assert isinstance(family_from_spec({"family": "gaussian", "b": 2.0}), Gaussian)
        assert isinstance(family_from_spec({"family": "indicator", "a": 0.5}), Indicator)
        assert isinstance(family_from_spec({"family": "bs-example"}), BSExample)
        pc = family_from_spec({"family": "piecewise-constant", "s": 0.5,
                               "values": [1.0, 2.0]})
        assert isinstance(pc, PiecewiseConstant)
        with pytest.raises(ValueError):
            family_from_spec({"family": "gaussian", "b": 2.0, "junk": 1})
        with pytest.raises(ValueError):
            family_from_spec({"family": "unknown"})


class TestMixedMeasure:
    def test_canonical_form(self):
        mu = MixedMeasure(atoms=((1.0, 0.5), (0.0, 1.0), (1.0, 0.25), (2.0, 0.0)))
        assert mu.atoms == ((0.0, 1.0), (1.0, 0.75))
        locs = mu.atom_locations
        assert np.all(np.diff(locs) > 0)

    def test_total_variation(self):
        d = sample(Indicator(0.5), cells=32)
        mu = MixedMeasure(atoms=((0.0, 2.0),), density=d)
        assert mu.total_variation == pytest.approx(2.0 + d.l1_norm, rel=1e-14)

    def test_negative_mass_rejected(self):
        with pytest.raises(ValueError):
            MixedMeasure(atoms=((0.0, -1.0),))

    def test_flags(self):
        assert MixedMeasure(density=sample(Indicator(1.0), cells=8)).is_atomic_free
        assert not MixedMeasure(atoms=((0.0, 1.0),)).is_atomic_free
