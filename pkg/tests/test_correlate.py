"""Autocorrelation engine tests: grid, singular, periodization, measures."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from autocorr import (
    BSExample,
    GridFunction,
    Indicator,
    Gaussian,
    MixedMeasure,
    autocorrelate,
    autocorrelate_singular,
    convolution_structure,
    dilate,
    dilate_mollify,
    measure_autocorrelate,
    periodize,
    sample,
)

PI = math.pi


def random_grid(seed: int, n_max: int = 40) -> GridFunction:
    rng = np.random.default_rng(seed)
    n = int(rng.integers(4, n_max))
    return GridFunction(float(rng.uniform(-1, 0)), float(rng.uniform(0.02, 0.2)),
                        rng.uniform(0, 1, n))


class TestAutocorrelate:
    def test_indicator_triangle(self):
        f = sample(Indicator(0.5), cells=128)
        c = autocorrelate(f)
        for t in (0.0, 0.25, 0.5, 0.75, 1.0, 1.5):
            assert c.value(t) == pytest.approx(max(0.0, 1.0 - abs(t)), abs=1e-12)

    def test_gaussian_closed_form(self):
        f = sample(Gaussian(1.0), cells=4001)
        c = autocorrelate(f)
        assert c.value(0.0) == pytest.approx(math.sqrt(PI / 2), abs=1e-6)
        assert c.value(0.7) == pytest.approx(math.sqrt(PI / 2) * math.exp(-0.49 / 2),
                                             abs=1e-6)

    def test_single_cell_self_overlap(self):
        h, m = 0.25, 3.0
        f = GridFunction(0.0, h, [m / h])  # one cell of mass m
        c = autocorrelate(f)
        assert c.value(0.0) == pytest.approx(m * m / h, rel=1e-14)

    def test_method_agreement(self):
        for seed in range(5):
            rng = np.random.default_rng(seed)
            f = GridFunction(-1.0, 2.0 / 2 ** 14, rng.uniform(0, 1, 2 ** 14))
            a = autocorrelate(f, "direct")
            b = autocorrelate(f, "fft")
            scale = np.max(a.values)
            assert np.max(np.abs(a.values - b.values)) <= 1e-9 * scale

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            autocorrelate(sample(Indicator(1.0), cells=8), "magic")

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 2**31))
    def test_invariants(self, seed):
        f = random_grid(seed)
        c = autocorrelate(f)
        vals = c.values
        # evenness, peak at zero, Fubini mass
        assert np.array_equal(vals, vals[::-1])
        assert np.all(vals <= vals[vals.size // 2] + 1e-12)
        assert c.mass == pytest.approx(f.l1_norm ** 2, rel=1e-8)

    def test_integral_window_exact(self):
        f = sample(Indicator(0.5), cells=64)
        c = autocorrelate(f)
        # int over [-1/2, 1/2] of the unit triangle
        assert c.integral_window(-0.5, 0.5) == pytest.approx(0.75, abs=1e-14)
        assert c.integral_window(-2, 2) == pytest.approx(1.0, abs=1e-14)

    def test_min_on(self):
        f = sample(Indicator(0.75), cells=96)
        c = autocorrelate(f)
        assert c.min_on(-0.5, 0.5) == pytest.approx(1.0, abs=1e-12)
        assert c.min_on(0.0, 2.0) == 0.0  # window exits the support


class TestSingularBS:
    def test_floor_on_sweep(self):
        bs = BSExample()
        for t in np.arange(0.0, 1.0001, 0.1):
            v = autocorrelate_singular(bs, float(t))
            assert v >= PI / 4 - 1e-4

    def test_endpoint_value(self):
        # outer-arc overlap only; the substitution extends continuously to pi/4
        assert autocorrelate_singular(BSExample(), 1.0) == pytest.approx(PI / 4, abs=1e-9)

    def test_evenness(self):
        v1 = autocorrelate_singular(BSExample(), 0.3)
        v2 = autocorrelate_singular(BSExample(), -0.3)
        assert v1 == pytest.approx(v2, abs=1e-8)

    def test_divergence_at_zero(self):
        assert math.isinf(autocorrelate_singular(BSExample(), 0.0))

    def test_domain_error(self):
        with pytest.raises(ValueError):
            autocorrelate_singular(BSExample(), 1.2)


class TestPeriodize:
    def test_indicator(self):
        g = sample(Indicator(0.5), cells=64)
        G = periodize(g)
        assert G.support == (-1.0, 1.0)
        assert np.allclose(G.samples, 1.0)
        cG = autocorrelate(G)
        for t in (0.0, 0.3, 0.7, 1.0):
            assert cG.value(t) == pytest.approx(2.0 - abs(t), abs=1e-12)
            assert cG.value(t) >= max(0.0, 1.0 - abs(t))

    def test_random_domination_and_mass(self):
        rng = np.random.default_rng(42)
        for _ in range(50):
            n = int(rng.choice([8, 16, 32]))
            g = GridFunction(-0.5, 1.0 / n, rng.uniform(0, 1, n))
            G = periodize(g)
            assert G.l1_norm == pytest.approx(2 * g.l1_norm, rel=1e-10)
            cg, cG = autocorrelate(g), autocorrelate(G)
            ts = cg.lattice
            keep = (ts >= 0) & (ts <= 1)
            assert np.all(cG.value(ts[keep]) - cg.values[keep] >= -1e-9)

    def test_incompatible_grid_rejected(self):
        with pytest.raises(ValueError):
            periodize(GridFunction(-0.5, 0.3, [1.0, 1.0, 1.0]))
        with pytest.raises(ValueError):
            periodize(GridFunction(-0.55, 0.25, [1.0] * 4))


class TestDilateMollify:
    def test_dilation_identity(self):
        f = sample(Indicator(0.6), cells=240)
        lam = 0.8
        ca = autocorrelate(dilate(f, lam))
        cb = autocorrelate(f)
        # f_lam * f_lam (x) = (1/lam) (f*f)(lam x), exact on the shared lattice
        assert np.max(np.abs(ca.values - cb.values / lam)) <= 1e-9 * f.l1_norm ** 2

    def test_mass_preservation(self):
        f = sample(Indicator(0.75), cells=192)
        out = dilate_mollify(f, 0.9, 0.05)
        assert out.l1_norm == pytest.approx(dilate(f, 0.9).l1_norm, abs=1e-9)
        assert np.all(out.samples >= 0)

    def test_min_domination(self):
        f = sample(Indicator(0.75), cells=192)
        lam = 0.9
        fl = dilate(f, lam)
        out = dilate_mollify(f, lam, 0.05)
        lhs = autocorrelate(out).min_on(0.0, 1.0)
        rhs = autocorrelate(fl).min_on(0.0, 1.0 / lam)
        assert lhs >= rhs - 1e-6 * f.l1_norm ** 2

    def test_identity_limit(self):
        f = sample(Indicator(0.5), cells=200)
        lam = 0.999
        out = dilate_mollify(f, lam, 2e-4)
        ca, cb = autocorrelate(out), autocorrelate(f)
        ts = np.linspace(-1, 1, 101)
        assert np.max(np.abs(ca.value(ts) - cb.value(ts))) < 5e-3

    def test_precondition(self):
        f = sample(Indicator(0.5), cells=64)
        with pytest.raises(ValueError):
            dilate_mollify(f, 0.9, 0.1)   # t >= (1/lam - 1)/2
        with pytest.raises(ValueError):
            dilate_mollify(f, 1.1, 0.01)  # lam outside (0, 1)


class TestMeasureAutocorrelate:
    def test_single_atom(self):
        mu = MixedMeasure(atoms=((0.0, 1.0),))
        for eps in (0.01, 0.5, 3.0):
            assert measure_autocorrelate(mu, -eps, eps) == 1.0

    def test_two_atoms_sumset(self):
        mu = MixedMeasure(atoms=((0.0, 1.0), (1.0, 1.0)))
        st = convolution_structure(mu, mu)
        assert st.atoms == ((-1.0, 1.0), (0.0, 2.0), (1.0, 1.0))
        assert st.density is None

    def test_lebesgue_differentiation(self):
        mu = MixedMeasure(density=sample(Indicator(0.5), cells=256))
        t = 0.3
        vals = [measure_autocorrelate(mu, t - eps, t) / eps for eps in (0.1, 0.01, 0.001)]
        errs = [abs(v - 0.7) for v in vals]
        assert errs[0] > errs[1] > errs[2]
        assert errs[2] < 1e-3

    def test_symmetry_and_nonnegativity(self):
        d = sample(Indicator(0.4), cells=64)
        mu = MixedMeasure(atoms=((0.3, 0.7),), density=d)
        a, b = 0.2, 0.9
        left = measure_autocorrelate(mu, a, b)
        right = measure_autocorrelate(mu, -b, -a)
        assert left == pytest.approx(right, rel=1e-12)
        assert left >= 0


class TestConvolutionStructure:
    def test_atom_free_kills_atoms(self):
        d = sample(Indicator(0.5), cells=32)
        mu = MixedMeasure(density=d)
        nu = MixedMeasure(atoms=((0.0, 1.0), (2.0, 0.5)), density=d)
        st = convolution_structure(mu, nu)
        assert st.atoms == ()
        assert st.has_density

    def test_pure_density_is_ac(self):
        d = sample(Indicator(0.5), cells=32)
        st = convolution_structure(MixedMeasure(density=d),
                                   MixedMeasure(atoms=((1.0, 2.0),)))
        assert not st.has_atoms
        assert st.has_density
        # total mass of the product measure is preserved
        assert st.density.l1_norm == pytest.approx(2.0 * d.l1_norm, rel=1e-9)

    def test_identity_atom(self):
        d = sample(Indicator(0.5), cells=64)
        mu = MixedMeasure(atoms=((0.0, 1.0),), density=d)
        nu = MixedMeasure(atoms=((0.0, 1.0),))
        st = convolution_structure(mu, nu)
        assert st.atoms == ((0.0, 1.0),)
        assert st.density.l1_norm == pytest.approx(d.l1_norm, rel=1e-9)
        # density is carried across unshifted
        ts = np.linspace(-0.45, 0.45, 10)
        assert np.allclose(st.density.value_at(ts), d.value_at(ts), atol=1e-9)

    def test_shifted_atom_shifts_density(self):
        d = sample(Indicator(0.25), cells=32)
        mu = MixedMeasure(density=d)
        nu = MixedMeasure(atoms=((1.0, 1.0),))
        st = convolution_structure(mu, nu)  # density at t = x - 1
        assert st.density.integral(-1.3, -0.7) == pytest.approx(d.l1_norm, rel=1e-9)
