"""Autocorrelation engines.

For a grid function the correlation g(t) = int f(x) f(x+t) dx of the cell
model is piecewise linear with breakpoints on the lattice {k*h}, and its
lattice values are exactly h * sum_k s_k s_{k+m}.  Everything downstream
(window integrals, minima, weighted means) is therefore computed exactly from
the lattice values; linear interpolation between them is not an approximation.

The singular BS example is handled separately through substitution-based
adaptive quadrature that absorbs the inverse-square-root endpoint blowup.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from .funcspace import BSExample, GridFunction, MixedMeasure

__all__ = [
    "Correlation",
    "autocorrelate",
    "autocorrelate_singular",
    "periodize",
    "dilate",
    "dilate_mollify",
    "mollify",
    "measure_autocorrelate",
    "MeasureCorrelation",
    "measure_correlation",
    "ConvolutionStructure",
    "convolution_structure",
]


@dataclass(frozen=True, eq=False)
class Correlation:
    """Sampled autocorrelation f*f on the symmetric window [-W, W].

    ``grid`` stores the lattice values c_m = (f*f)(m h) as a cell-centered
    GridFunction (cell midpoints sit on the lattice), so ``grid.l1_norm``
    equals the Fubini mass ||f||_1^2 exactly.  ``value`` interpolates
    linearly, which reproduces the cell-model correlation exactly.
    """

    grid: GridFunction
    method: str

    @property
    def spacing(self) -> float:
        return self.grid.spacing

    @property
    def halfwidth(self) -> float:
        # largest lattice point; correlation vanishes there
        return self.grid.origin + self.grid.width - 0.5 * self.grid.spacing

    @property
    def lattice(self) -> np.ndarray:
        return self.grid.midpoints

    @property
    def values(self) -> np.ndarray:
        return self.grid.samples

    @property
    def mass(self) -> float:
        """int f*f = ||f||_1^2 (lattice trapezoid; endpoints vanish)."""
        return self.grid.l1_norm

    def value(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=np.float64)
        W, h = self.halfwidth, self.spacing
        u = (np.abs(t) + W) / h  # evenness; position in lattice coordinates
        k = np.minimum(np.floor(u).astype(np.int64), self.values.size - 2)
        k = np.maximum(k, 0)
        frac = u - k
        c = self.values
        out = c[k] * (1.0 - frac) + c[k + 1] * frac
        out = np.where(np.abs(t) > W, 0.0, out)
        return out if out.ndim else float(out)

    def min_on(self, lo: float, hi: float) -> float:
        """Exact minimum of the piecewise-linear correlation over [lo, hi]."""
        if hi < lo:
            raise ValueError("empty window")
        W = self.halfwidth
        cands = [float(self.value(lo)), float(self.value(hi))]
        if lo < -W or hi > W:
            cands.append(0.0)  # window sticks out of the support
        ts = self.lattice
        inside = (ts >= lo) & (ts <= hi)
        if inside.any():
            cands.append(float(self.values[inside].min()))
        return min(cands)

    def integral_window(self, lo: float, hi: float) -> float:
        """Exact integral of the piecewise-linear correlation over [lo, hi]."""
        if hi <= lo:
            return 0.0
        c = self.values
        h = self.spacing
        t0 = self.grid.origin + 0.5 * h  # leftmost lattice point (-W)
        # antiderivative at lattice points
        trap = np.concatenate(([0.0], np.cumsum(0.5 * h * (c[:-1] + c[1:]))))
        n = c.size

        def F(x: float) -> float:
            u = (x - t0) / h
            if u <= 0.0:
                return 0.0
            if u >= n - 1:
                return float(trap[-1])
            k = int(u)
            frac = u - k
            ck = c[k] * (1 - frac) + c[k + 1] * frac
            return float(trap[k] + 0.5 * frac * h * (c[k] + ck))

        return F(hi) - F(lo)

    def weighted_integral(self, weight: Callable[[np.ndarray], np.ndarray],
                          halfrange: Optional[float] = None, nodes: int = 8) -> float:
        """int (f*f)(t) w(t) dt by per-cell Gauss rules on the linear model.

        ``halfrange`` restricts to [-R, R] (the caller certifies the weight is
        negligible beyond); per-cell Gauss of (linear) x (smooth weight) at
        ``nodes`` points is accurate to machine level for smooth weights.
        """
        ts = self.lattice
        c = self.values
        lo = -self.halfwidth if halfrange is None else max(-self.halfwidth, -halfrange)
        hi = self.halfwidth if halfrange is None else min(self.halfwidth, halfrange)
        if hi <= lo:
            return 0.0
        x_gl, w_gl = np.polynomial.legendre.leggauss(nodes)
        lefts = ts[:-1]
        keep = (ts[1:] > lo) & (lefts < hi)
        a = np.maximum(lefts[keep], lo)
        b = np.minimum(ts[1:][keep], hi)
        mid = 0.5 * (a + b)[:, None]
        rad = 0.5 * (b - a)[:, None]
        pts = mid + rad * x_gl[None, :]
        k = keep.nonzero()[0]
        frac = (pts - lefts[keep][:, None]) / self.spacing
        vals = c[k][:, None] * (1 - frac) + c[k + 1][:, None] * frac
        integ = (vals * weight(pts) * w_gl[None, :] * rad).sum()
        return float(integ)


def _next_pow2(n: int) -> int:
    return 1 << (int(n - 1).bit_length())


def autocorrelate(f: GridFunction, method: str = "fft") -> Correlation:
    """Autocorrelation of a grid function, exact on the lattice {k*h}.

    ``direct`` is the O(n^2) reference summation; ``fft`` is zero-padded fast
    correlation.  Both return lattice values padded with the exact zeros at
    t = +-(support length).
    """
    s = f.samples
    h = f.spacing
    n = s.size
    if method == "direct":
        core = np.correlate(s, s, mode="full") * h
    elif method == "fft":
        L = _next_pow2(2 * n)
        S = np.fft.rfft(s, L)
        c = np.fft.irfft(S * np.conj(S), L)
        pos = c[:n] * h  # lags 0 .. n-1
        core = np.concatenate((pos[:0:-1], pos))
    else:
        raise ValueError(f"unknown method {method!r}; expected 'direct' or 'fft'")
    core = 0.5 * (core + core[::-1])  # exact evenness
    vals = np.concatenate(([0.0], core, [0.0]))  # zeros at +-(n h)
    grid = GridFunction(origin=-(n + 0.5) * h, spacing=h, samples=vals)
    return Correlation(grid=grid, method=method)


# ---------------------------------------------------------------------------
# singular BS-example correlation
# ---------------------------------------------------------------------------


def autocorrelate_singular(f: BSExample, t: float, tol: float = 1e-8) -> float:
    """f*f(t) for the BS example by singularity-absorbing quadrature.

    Over the overlap [a, b] = [-1/2, 1/2 - |t|] the integrand factors as
    (1/4) [(x-a)(b-x)]^(-1/2) G(x) with bounded G; the substitution
    x = (a+b)/2 + ((b-a)/2) sin(theta) absorbs both endpoint singularities and
    extends continuously to t = 1 (value pi/4).  At t = 0 the self-overlap
    diverges (the example is not in L^2) and +inf is returned.
    """
    t = float(t)
    if not np.isfinite(t) or abs(t) > 1.0:
        raise ValueError(f"t must lie in [-1, 1], got {t}")
    t = abs(t)
    if t == 0.0:
        return math.inf
    a, b = -0.5, 0.5 - t
    mid, rad = 0.5 * (a + b), 0.5 * (b - a)
    bs = BSExample()

    def g(theta: float) -> float:
        x = mid + rad * math.sin(theta)
        bounded = (0.5 - x) * (x + t + 0.5)
        return 0.25 / math.sqrt(bounded) * float(bs.multiplier(x)) * float(bs.multiplier(x + t))

    pts = []
    if rad > 0:
        for xc in (-0.25, 0.25, -0.25 - t, 0.25 - t):
            if a < xc < b:
                pts.append(math.asin((xc - mid) / rad))
    val, err = integrate.quad(
        g, -math.pi / 2, math.pi / 2, points=sorted(pts) or None,
        epsabs=tol, epsrel=tol, limit=300,
    )
    if err > max(100 * tol, 1e-6):
        raise RuntimeError(f"singular correlation quadrature failed at t={t} (err={err:.2e})")
    return val


# ---------------------------------------------------------------------------
# periodization and dilate-mollify
# ---------------------------------------------------------------------------


def periodize(g: GridFunction) -> GridFunction:
    """Window the 1-periodization onto [-1, 1]: G = 1_[-1,1] * sum_n g(. - n).

    Requires the grid to be compatible with the unit lattice (1/h integer and
    the origin on that lattice), so that integer translates land exactly on
    grid cells; then ||G||_1 = 2 ||g||_1 holds exactly.
    """
    h = g.spacing
    k = round(1.0 / h)
    if k < 1 or abs(k * h - 1.0) > 1e-9:
        raise ValueError(f"periodize needs 1/spacing integral, got spacing={h}")
    r = (g.origin + 1.0) / h
    if abs(r - round(r)) > 1e-6:
        raise ValueError("periodize needs the grid origin on the [-1,1] lattice")
    out = np.zeros(2 * k, dtype=np.float64)
    glo, ghi = g.support
    n_lo = math.floor(-1.0 - ghi) - 1
    n_hi = math.ceil(1.0 - glo) + 1
    for n in range(n_lo, n_hi + 1):
        # source cell i maps to target cell j = i + off
        off = round((g.origin + n + 1.0) / h)
        i0 = max(0, -off)
        i1 = min(g.cells, 2 * k - off)
        if i1 > i0:
            out[i0 + off:i1 + off] += g.samples[i0:i1]
    return GridFunction(origin=-1.0, spacing=h, samples=out)


def dilate(f: GridFunction, lam: float) -> GridFunction:
    """f_lambda(x) = f(lambda x); exact on the rescaled grid."""
    if not lam > 0:
        raise ValueError("dilation factor must be positive")
    return GridFunction(f.origin / lam, f.spacing / lam, f.samples)


def _bump_cdf_kernel(t: float, h: float) -> np.ndarray:
    """Cell-averaged mollifier weights W_m, sum exactly 1.

    W_m = (1/h) int (h-|w|) psi_t(m h + w) dw over |w| <= h, with psi_t the
    normalized bump exp(-1/(1-(x/t)^2))/ (t Z) on [-t, t].
    """
    Z, _ = integrate.quad(lambda u: math.exp(-1.0 / (1.0 - u * u)) if abs(u) < 1 else 0.0,
                          -1, 1, epsabs=1e-14, limit=100)

    def psi(x: float) -> float:
        u = x / t
        if abs(u) >= 1.0:
            return 0.0
        return math.exp(-1.0 / (1.0 - u * u)) / (t * Z)

    M = int(math.ceil((t + h) / h)) + 1
    W = np.zeros(2 * M + 1, dtype=np.float64)
    for m in range(-M, M + 1):
        lo = max(-h, -t - m * h)
        hi = min(h, t - m * h)
        if hi <= lo:
            continue
        v, _ = integrate.quad(lambda w: (h - abs(w)) * psi(m * h + w), lo, hi,
                              epsabs=1e-13, limit=100)
        W[m + M] = v / h
    total = W.sum()
    if not total > 0:
        raise ValueError(f"mollifier width {t} is unresolvable at spacing {h}")
    return W / total


def mollify(f: GridFunction, t: float) -> GridFunction:
    """Convolve with the normalized bump of width t, cell-averaged.

    The discrete kernel is a probability vector, so nonnegativity and the L1
    norm are preserved exactly.
    """
    if not t > 0:
        raise ValueError("mollifier width must be positive")
    W = _bump_cdf_kernel(t, f.spacing)
    M = (W.size - 1) // 2
    out = np.convolve(f.samples, W, mode="full")
    return GridFunction(f.origin - M * f.spacing, f.spacing, out)


def dilate_mollify(f: GridFunction, lam: float, t: float) -> GridFunction:
    """Dilation then mollification, f~ = f_lambda * psi_t.

    Requires 0 < lambda < 1 and t < (1/lambda - 1)/2 so that the smoothed
    minimum over [0, 1] dominates the dilated minimum over [0, 1/lambda].
    """
    if not (0 < lam < 1):
        raise ValueError(f"lambda must lie in (0, 1), got {lam}")
    bound = 0.5 * (1.0 / lam - 1.0)
    if not (0 < t < bound):
        raise ValueError(f"mollifier width must lie in (0, {bound:.6g}), got {t}")
    return mollify(dilate(f, lam), t)


# ---------------------------------------------------------------------------
# measure autocorrelation
# ---------------------------------------------------------------------------


class MeasureCorrelation:
    """Precomputed pieces of mu*mu for repeated interval evaluations.

    mu*mu([b,a]) = sum over atom pairs with x_i - x_j in [b,a]
                 + sum_i m_i [ Fd(x_i - b) - Fd(x_i - a) ]    (atom x, density y)
                 + sum_i m_i [ Fd(x_i + a) - Fd(x_i + b) ]    (density x, atom y)
                 + int_b^a (fd * fd)(t) dt
    with Fd the density antiderivative.
    """

    def __init__(self, mu: MixedMeasure):
        self.mu = mu
        locs, masses = mu.atom_locations, mu.atom_masses
        if len(locs):
            diff = locs[:, None] - locs[None, :]
            prod = masses[:, None] * masses[None, :]
            order = np.argsort(diff, axis=None)
            self._pair_locs = diff.ravel()[order]
            self._pair_masses = prod.ravel()[order]
        else:
            self._pair_locs = np.zeros(0)
            self._pair_masses = np.zeros(0)
        self._pair_cum = np.concatenate(([0.0], np.cumsum(self._pair_masses)))
        self.density_corr = autocorrelate(mu.density) if mu.density is not None else None

    def _atom_pair_mass(self, lo, hi) -> np.ndarray:
        i = np.searchsorted(self._pair_locs, lo, side="left")
        j = np.searchsorted(self._pair_locs, hi, side="right")
        return self._pair_cum[j] - self._pair_cum[i]

    def interval_mass(self, lo, hi) -> np.ndarray:
        lo = np.asarray(lo, dtype=np.float64)
        hi = np.asarray(hi, dtype=np.float64)
        if np.any(hi < lo):
            raise ValueError("interval endpoints must satisfy lo <= hi")
        total = self._atom_pair_mass(lo, hi).astype(np.float64)
        mu = self.mu
        if mu.density is not None:
            d = mu.density
            for x, m in mu.atoms:
                total = total + m * np.vectorize(d.integral)(x - hi, x - lo)
                total = total + m * np.vectorize(d.integral)(x + lo, x + hi)
            cc = self.density_corr
            total = total + np.vectorize(cc.integral_window)(lo, hi)
        return total if total.ndim else float(total)


def measure_correlation(mu: MixedMeasure) -> MeasureCorrelation:
    return MeasureCorrelation(mu)


def measure_autocorrelate(mu: MixedMeasure, lo: float, hi: float) -> float:
    """mu*mu([lo, hi]) = iint 1_[lo,hi](x - y) dmu(x) dmu(y)."""
    if not hi > lo:
        raise ValueError(f"need hi > lo, got [{lo}, {hi}]")
    return float(measure_correlation(mu).interval_mass(lo, hi))


# ---------------------------------------------------------------------------
# convolution structure (correlation convention)
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ConvolutionStructure:
    """Structural decomposition of mu*nu in the atoms-plus-density model."""

    atoms: tuple[tuple[float, float], ...]
    density: Optional[GridFunction]

    @property
    def has_atoms(self) -> bool:
        return bool(self.atoms)

    @property
    def has_density(self) -> bool:
        return self.density is not None


def _accumulate(target: np.ndarray, origin: float, h: float,
                contribution: GridFunction, weight: float) -> None:
    reb = contribution.rebinned(origin, h, target.size)
    target += weight * reb.samples


def convolution_structure(mu: MixedMeasure, nu: MixedMeasure) -> ConvolutionStructure:
    """Decompose mu*nu (correlation convention: locations x - y).

    Atom part: products of atoms at {x_i - y_j}.  Density part: the two
    atom-density cross terms (shifted / reflected copies, conservatively
    rebinned) plus the density-density cross correlation.
    """
    atoms: dict[float, float] = {}
    for x, m in mu.atoms:
        for y, w in nu.atoms:
            loc = x - y
            atoms[loc] = atoms.get(loc, 0.0) + m * w
    atom_tuple = tuple(sorted(atoms.items()))

    pieces: list[tuple[GridFunction, float]] = []
    if nu.density is not None:
        refl = nu.density.reflected()
        for x, m in mu.atoms:
            pieces.append((refl.shifted(x), m))  # t -> d_nu(x - t)
    if mu.density is not None:
        for y, w in nu.atoms:
            pieces.append((mu.density.shifted(-y), w))  # t -> d_mu(t + y)
    if mu.density is not None and nu.density is not None:
        a, b = mu.density, nu.density
        if abs(a.spacing - b.spacing) > 1e-12 * min(a.spacing, b.spacing):
            h = min(a.spacing, b.spacing)
            a = a.rebinned(a.origin, h, int(math.ceil(a.width / h)) + 1)
            b = b.rebinned(b.origin, h, int(math.ceil(b.width / h)) + 1)
        h = a.spacing
        # np.correlate(a, b, 'full')[i] = sum_n a[n+m] b[n] at m = i - (len(b)-1)
        cross = np.correlate(a.samples, b.samples, mode="full") * h
        # c(t) = int a(t+y) b(y) dy; lattice from a.origin - (b.origin + width_b)
        t0 = a.origin - (b.origin + b.width)
        pieces.append((GridFunction(t0 + 0.5 * h, h, np.maximum(cross, 0.0)), 1.0))

    density = None
    if pieces:
        h = min(p.spacing for p, _ in pieces)
        lo = min(p.support[0] for p, _ in pieces)
        hi = max(p.support[1] for p, _ in pieces)
        cells = int(math.ceil((hi - lo) / h)) + 1
        acc = np.zeros(cells, dtype=np.float64)
        for piece, wt in pieces:
            _accumulate(acc, lo, h, piece, wt)
        density = GridFunction(lo, h, acc)
    return ConvolutionStructure(atoms=atom_tuple, density=density)
