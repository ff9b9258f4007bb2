"""Domain types for nonnegative test functions and finite measures.

The workhorse type is :class:`GridFunction`, a nonnegative piecewise-constant
function on a uniform grid (samples are cell-midpoint values, which for the
cell model are also the cell values).  Analytic families (Gaussian, interval
indicator, piecewise-constant, and the singular boundary-blowup
counterexample :class:`BSExample`) carry exact norms where closed forms exist
and can be sampled onto grids.  :class:`MixedMeasure` represents a finite
nonnegative measure as an atom list plus an optional absolutely continuous
part.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy import integrate

__all__ = [
    "GridFunction",
    "Gaussian",
    "Indicator",
    "PiecewiseConstant",
    "BSExample",
    "AnalyticFamily",
    "MixedMeasure",
    "sample",
    "norms",
    "family_from_spec",
    "bs_l1",
]

#: Relative clamp size above which clamping negative samples emits a warning.
CLAMP_WARN_REL = 1e-12


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Nonnegative piecewise-constant function on a uniform grid.

    Cell ``k`` covers ``[origin + k*h, origin + (k+1)*h)`` and holds the value
    ``samples[k]``; the sample is read as the midpoint value of the cell.
    Instances are immutable and safe to share across workers.
    """

    origin: float
    spacing: float
    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.float64)
        if s.ndim != 1 or s.size == 0:
            raise ValueError("samples must be a nonempty 1-D array")
        if not np.all(np.isfinite(s)):
            raise ValueError("samples must be finite")
        if not (np.isfinite(self.spacing) and self.spacing > 0):
            raise ValueError(f"spacing must be positive, got {self.spacing}")
        if not np.isfinite(self.origin):
            raise ValueError("origin must be finite")
        neg = s < 0
        if neg.any():
            worst = float(-s[neg].min())
            scale = float(np.max(np.abs(s)))
            if worst > CLAMP_WARN_REL * max(scale, 1e-300):
                warnings.warn(
                    f"clamped negative samples to 0 (worst {worst:.3e}, "
                    f"scale {scale:.3e})",
                    stacklevel=3,
                )
            s = np.where(neg, 0.0, s)
        object.__setattr__(self, "samples", _readonly(s))
        object.__setattr__(self, "origin", float(self.origin))
        object.__setattr__(self, "spacing", float(self.spacing))

    # -- geometry ----------------------------------------------------------

    @property
    def cells(self) -> int:
        return int(self.samples.size)

    @property
    def width(self) -> float:
        return self.cells * self.spacing

    @property
    def support(self) -> tuple[float, float]:
        return (self.origin, self.origin + self.width)

    @property
    def midpoints(self) -> np.ndarray:
        return self.origin + (np.arange(self.cells) + 0.5) * self.spacing

    # -- norms ---------------------------------------------------------------

    @property
    def l1_norm(self) -> float:
        return float(self.spacing * self.samples.sum())

    @property
    def l2_norm(self) -> float:
        return float(math.sqrt(self.spacing * float(np.dot(self.samples, self.samples))))

    @property
    def sup_norm(self) -> float:
        return float(self.samples.max())

    @property
    def total_variation(self) -> float:
        """Total variation of the cell model (edge jumps included)."""
        s = self.samples
        return float(s[0] + np.abs(np.diff(s)).sum() + s[-1])

    # -- evaluation ----------------------------------------------------------

    def value_at(self, x) -> np.ndarray:
        """Piecewise-constant evaluation; 0 outside the support window."""
        x = np.asarray(x, dtype=np.float64)
        idx = np.floor((x - self.origin) / self.spacing).astype(np.int64)
        inside = (idx >= 0) & (idx < self.cells)
        out = np.zeros_like(x, dtype=np.float64)
        out[inside] = self.samples[idx[inside]]
        return out if out.ndim else float(out)

    def _cumulative(self) -> np.ndarray:
        # antiderivative values at cell boundaries
        return np.concatenate(([0.0], np.cumsum(self.samples) * self.spacing))

    def integral(self, lo: float, hi: float) -> float:
        """Exact integral of the cell model over ``[lo, hi]``."""
        if hi <= lo:
            return 0.0
        cum = self._cumulative()
        n, h, o = self.cells, self.spacing, self.origin

        def F(x: float) -> float:
            t = (x - o) / h
            if t <= 0.0:
                return 0.0
            if t >= n:
                return float(cum[-1])
            k = int(t)
            return float(cum[k] + self.samples[k] * (t - k) * h)

        return F(hi) - F(lo)

    # -- algebra ---------------------------------------------------------------

    def scaled(self, c: float) -> "GridFunction":
        if c < 0:
            raise ValueError("scale factor must be nonnegative")
        return GridFunction(self.origin, self.spacing, self.samples * c)

    def shifted(self, dx: float) -> "GridFunction":
        return GridFunction(self.origin + dx, self.spacing, self.samples)

    def reflected(self) -> "GridFunction":
        """The function x -> f(-x)."""
        return GridFunction(-(self.origin + self.width), self.spacing, self.samples[::-1])

    def rebinned(self, origin: float, spacing: float, cells: int) -> "GridFunction":
        """Conservative mass-preserving rebinning onto a target grid.

        Target cell values are average densities of the exact cell-model mass
        falling into each target cell; total mass is preserved whenever the
        target window covers the support.
        """
        edges = origin + spacing * np.arange(cells + 1)
        cum = self._cumulative()
        n, h, o = self.cells, self.spacing, self.origin
        t = np.clip((edges - o) / h, 0.0, float(n))
        k = np.minimum(t.astype(np.int64), n - 1)
        F = cum[k] + self.samples[k] * (t - k) * h
        masses = np.diff(F)
        return GridFunction(origin, spacing, masses / spacing)


def norms(f: GridFunction) -> tuple[float, float]:
    """(L1, L2) norms of the cell model."""
    return (f.l1_norm, f.l2_norm)


# ---------------------------------------------------------------------------
# analytic families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Gaussian:
    """f(x) = exp(-b x^2), b > 0.  Exact norms sqrt(pi/b), (pi/(2b))^(1/4)."""

    b: float

    def __post_init__(self):
        if not (np.isfinite(self.b) and self.b > 0):
            raise ValueError(f"Gaussian width parameter must be positive, got {self.b}")

    @property
    def exact_l1(self) -> float:
        return math.sqrt(math.pi / self.b)

    @property
    def exact_l2(self) -> float:
        return (math.pi / (2 * self.b)) ** 0.25

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        return np.exp(-self.b * x * x)

    def default_support(self) -> tuple[float, float]:
        # tail mass of exp(-b x^2) beyond sqrt(25/b) is below 1e-10 relative
        s = math.sqrt(25.0 / self.b)
        return (-s, s)


@dataclass(frozen=True)
class Indicator:
    """f = 1_[-A, A], A > 0.  Exact norms 2A and sqrt(2A)."""

    halfwidth: float

    def __post_init__(self):
        if not (np.isfinite(self.halfwidth) and self.halfwidth > 0):
            raise ValueError(f"Indicator halfwidth must be positive, got {self.halfwidth}")

    @property
    def exact_l1(self) -> float:
        return 2.0 * self.halfwidth

    @property
    def exact_l2(self) -> float:
        return math.sqrt(2.0 * self.halfwidth)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        return (np.abs(x) <= self.halfwidth).astype(np.float64)

    def default_support(self) -> tuple[float, float]:
        return (-self.halfwidth, self.halfwidth)


@dataclass(frozen=True, eq=False)
class PiecewiseConstant:
    """Nonnegative piecewise-constant function on [-S, S] with equal cells."""

    halfwidth: float
    values: np.ndarray

    def __post_init__(self):
        if not (np.isfinite(self.halfwidth) and self.halfwidth > 0):
            raise ValueError(f"halfwidth must be positive, got {self.halfwidth}")
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("values must be a nonempty 1-D array")
        if np.any(v < 0) or not np.all(np.isfinite(v)):
            raise ValueError("cell values must be finite and nonnegative")
        object.__setattr__(self, "values", _readonly(v))

    def as_grid(self) -> GridFunction:
        """Exact grid representation (no sampling error)."""
        h = 2.0 * self.halfwidth / self.values.size
        return GridFunction(-self.halfwidth, h, self.values)

    @property
    def exact_l1(self) -> float:
        return self.as_grid().l1_norm

    @property
    def exact_l2(self) -> float:
        return self.as_grid().l2_norm

    def __call__(self, x) -> np.ndarray:
        return self.as_grid().value_at(x)

    def default_support(self) -> tuple[float, float]:
        return (-self.halfwidth, self.halfwidth)


@dataclass(frozen=True)
class BSExample:
    """The singular compactly supported counterexample of the min problem.

    f(x) = 1_[-1/2,1/2](x)/sqrt(1-4x^2) - 1_[-1/4,1/4](x)/(4 sqrt(1-4x^2)),
    nonnegative on [-1/2, 1/2], zero outside, with inverse-square-root blowup
    at |x| = 1/2.  Not square integrable.  Certified integrals against it go
    through substitution-based quadrature (see :func:`bs_l1` and the singular
    autocorrelation in :mod:`autocorr.correlate`); grid sampling is for
    plotting only.
    """

    singular: bool = True

    def multiplier(self, x) -> np.ndarray:
        """The bounded factor m(x) = 1 - (1/4) 1_[-1/4,1/4](x)."""
        x = np.asarray(x, dtype=np.float64)
        return np.where(np.abs(x) <= 0.25, 0.75, 1.0)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        inside = np.abs(x) < 0.5
        out = np.zeros_like(x)
        xs = x[inside]
        out[inside] = self.multiplier(xs) / np.sqrt(1.0 - 4.0 * xs * xs)
        return out if out.ndim else float(out)

    @property
    def exact_l1(self) -> float:
        # pi/2 - pi/24, via the substitution x = sin(u)/2
        return 11.0 * math.pi / 24.0

    def default_support(self) -> tuple[float, float]:
        return (-0.5, 0.5)


AnalyticFamily = Union[Gaussian, Indicator, PiecewiseConstant, BSExample]


def bs_l1(tol: float = 1e-12) -> float:
    """L1 norm of the BS example by singularity-absorbing quadrature.

    With x = sin(u)/2 the integrand becomes m(sin(u)/2)/2, bounded with two
    jump points at u = +-pi/6; the result should match 11*pi/24.
    """
    bs = BSExample()

    def g(u: float) -> float:
        return 0.5 * float(bs.multiplier(math.sin(u) / 2.0))

    val, err = integrate.quad(
        g, -math.pi / 2, math.pi / 2, points=[-math.pi / 6, math.pi / 6],
        epsabs=tol, epsrel=tol, limit=200,
    )
    if err > 100 * tol:
        raise RuntimeError(f"bs_l1 quadrature failed to converge (err={err:.2e})")
    return val


def sample(family: AnalyticFamily, support: Optional[tuple[float, float]] = None,
           cells: int = 1024) -> GridFunction:
    """Midpoint-sample an analytic family onto a uniform grid.

    For :class:`BSExample` the support must contain [-1/2, 1/2]; the singular
    endpoints are never evaluated because midpoints with |x| >= 1/2 read 0.
    """
    if cells < 2:
        raise ValueError(f"cells must be >= 2, got {cells}")
    if support is None:
        support = family.default_support()
    lo, hi = float(support[0]), float(support[1])
    if not hi > lo:
        raise ValueError(f"support must be a nonempty interval, got {support}")
    if isinstance(family, BSExample) and not (lo <= -0.5 and hi >= 0.5):
        raise ValueError("BSExample support must contain [-1/2, 1/2]")
    h = (hi - lo) / cells
    mids = lo + (np.arange(cells) + 0.5) * h
    vals = np.asarray(family(mids), dtype=np.float64)
    return GridFunction(lo, h, vals)


_FAMILY_KEYS = {
    "gaussian": {"b"},
    "indicator": {"a"},
    "piecewise-constant": {"s", "values"},
    "bs-example": set(),
}


def family_from_spec(spec: dict) -> AnalyticFamily:
    """Build a family from a CLI/config record like {"family": "gaussian", "b": 2.0}."""
    if "family" not in spec:
        raise ValueError("family record is missing the 'family' key")
    name = spec["family"]
    if name not in _FAMILY_KEYS:
        raise ValueError(f"unknown family {name!r}; expected one of {sorted(_FAMILY_KEYS)}")
    extra = set(spec) - {"family"} - _FAMILY_KEYS[name]
    if extra:
        raise ValueError(f"unknown keys for family {name!r}: {sorted(extra)}")
    if name == "gaussian":
        return Gaussian(b=float(spec["b"]))
    if name == "indicator":
        return Indicator(halfwidth=float(spec["a"]))
    if name == "piecewise-constant":
        return PiecewiseConstant(halfwidth=float(spec["s"]),
                                 values=np.asarray(spec["values"], dtype=np.float64))
    return BSExample()


# ---------------------------------------------------------------------------
# mixed measures
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MixedMeasure:
    """Finite nonnegative measure: atoms plus an absolutely continuous part.

    Canonical form: atom locations strictly increasing, duplicates merged,
    zero-mass atoms dropped.  Singular continuous parts are not representable.
    """

    atoms: tuple[tuple[float, float], ...] = ()
    density: Optional[GridFunction] = None

    def __post_init__(self):
        canon: dict[float, float] = {}
        for loc, mass in self.atoms:
            loc, mass = float(loc), float(mass)
            if not (np.isfinite(loc) and np.isfinite(mass)):
                raise ValueError("atom locations and masses must be finite")
            if mass < 0:
                raise ValueError(f"atom mass must be nonnegative, got {mass}")
            canon[loc] = canon.get(loc, 0.0) + mass
        merged = tuple(sorted((loc, m) for loc, m in canon.items() if m > 0.0))
        object.__setattr__(self, "atoms", merged)

    @property
    def atom_locations(self) -> np.ndarray:
        return np.array([a[0] for a in self.atoms], dtype=np.float64)

    @property
    def atom_masses(self) -> np.ndarray:
        return np.array([a[1] for a in self.atoms], dtype=np.float64)

    @property
    def total_variation(self) -> float:
        tv = float(self.atom_masses.sum()) if self.atoms else 0.0
        if self.density is not None:
            tv += self.density.l1_norm
        return tv

    @property
    def is_atomic_free(self) -> bool:
        return not self.atoms

    @property
    def is_absolutely_continuous(self) -> bool:
        return not self.atoms
