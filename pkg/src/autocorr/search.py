"""Derivative-free maximization of the inequality ratios over test families.

A seeded multi-restart Nelder-Mead simplex (reflection / expansion /
contraction / shrink) runs on unconstrained parameters; nonnegativity is
enforced by squaring (cell value or family parameter = theta^2), which keeps
the landscape smooth instead of projecting onto a boundary.  The merged
record is independent of restart execution order: traces are concatenated in
restart-index order and the winner is the best value with ties broken by the
lowest restart index.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .funcspace import BSExample, GridFunction, Indicator, sample
from .functionals import q_gauss, q_mean, q_min_01, q_min_01_bs, q_min_12

__all__ = [
    "SearchRecord",
    "SearchError",
    "search",
    "baseline",
    "OBJECTIVES",
    "FAMILIES",
    "worker_count",
]

DEFAULT_BUDGET = 2000
OBJECTIVES = ("mean", "gauss", "min12", "min01")
FAMILIES = ("indicator", "gaussian", "piecewise", "bs-example")


class SearchError(RuntimeError):
    """Objective evaluation failed; carries the offending parameter vector."""

    def __init__(self, message: str, params: np.ndarray):
        super().__init__(message)
        self.params = np.asarray(params, dtype=np.float64)


@dataclass(frozen=True, eq=False)
class SearchRecord:
    """Outcome of one seeded multi-restart search."""

    objective: str
    family: str
    dimension: int
    best_params: tuple[float, ...]
    best_value: float
    evaluations: int
    seed: int
    trace: tuple[tuple[int, float], ...]  # (evaluation index, best so far)


def worker_count() -> int:
    """Worker cap from AUTOCORR_THREADS (default 1 = sequential)."""
    raw = os.environ.get("AUTOCORR_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# families and objectives
# ---------------------------------------------------------------------------


def _build_indicator(params: np.ndarray) -> GridFunction:
    A = float(params[0]) ** 2
    A = max(A, 1e-6)
    return sample(Indicator(A), cells=512)


def _build_gaussian(params: np.ndarray, cells: int = 1024) -> GridFunction:
    from .funcspace import Gaussian

    b = float(params[0]) ** 2
    b = min(max(b, 1e-4), 1e6)
    return sample(Gaussian(b), cells=cells)


def _build_piecewise(params: np.ndarray, halfwidth: float) -> GridFunction:
    vals = np.asarray(params, dtype=np.float64) ** 2
    h = 2.0 * halfwidth / vals.size
    return GridFunction(-halfwidth, h, vals)


def _objective_fn(objective: str, a: Optional[float]) -> Callable:
    if objective == "mean":
        return lambda f: q_mean(f, method="time").value
    if objective == "gauss":
        if a is None or not a > 0:
            raise ValueError("the gauss objective needs a > 0")
        return lambda f: q_gauss(f, a, method="time").value
    if objective == "min12":
        return lambda f: q_min_12(f).value
    if objective == "min01":
        return lambda f: q_min_01(f).value
    raise ValueError(f"unknown objective {objective!r}; expected one of {OBJECTIVES}")


def _family_builder(family: str, dimension: int, halfwidth: float) -> tuple[Callable, int]:
    if family == "indicator":
        return _build_indicator, 1
    if family == "gaussian":
        return _build_gaussian, 1
    if family == "piecewise":
        dim = dimension if dimension >= 1 else 16
        return (lambda p: _build_piecewise(p, halfwidth)), dim
    if family == "bs-example":
        # amplitude parameter only; every objective here is scale invariant
        return (lambda p: BSExample()), 1
    raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")


# ---------------------------------------------------------------------------
# simplex core
# ---------------------------------------------------------------------------


def _nelder_mead(fn: Callable[[np.ndarray], float], x0: np.ndarray, max_evals: int,
                 record: Callable[[float], None], step: float = 0.25) -> tuple[np.ndarray, float]:
    """Minimize fn from x0 under an evaluation budget, reporting every eval.

    The running best is tracked at every evaluation, so the returned pair is
    consistent no matter where the budget runs out.
    """
    alpha, gamma, rho, sigma = 1.0, 2.0, 0.5, 0.5
    dim = x0.size
    evals = 0
    best_x: np.ndarray = np.asarray(x0, dtype=np.float64)
    best_f = math.inf

    def call(x: np.ndarray) -> float:
        nonlocal evals, best_x, best_f
        if evals >= max_evals:
            raise _BudgetExhausted
        evals += 1
        v = fn(x)
        record(v)
        if v < best_f:
            best_x, best_f = x.copy(), v
        return v

    simplex = [np.asarray(x0, dtype=np.float64)]
    for i in range(dim):
        x = x0.copy()
        x[i] += step * (abs(x[i]) if x[i] != 0 else 1.0)
        simplex.append(x)
    try:
        scores = [call(x) for x in simplex]
        while True:
            order = np.argsort(scores)
            simplex = [simplex[i] for i in order]
            scores = [scores[i] for i in order]
            spread = max(np.max(np.abs(s - simplex[0])) for s in simplex[1:])
            if spread < 1e-10:
                break
            centroid = np.mean(simplex[:-1], axis=0)
            xr = centroid + alpha * (centroid - simplex[-1])
            fr = call(xr)
            if scores[0] <= fr < scores[-2]:
                simplex[-1], scores[-1] = xr, fr
                continue
            if fr < scores[0]:
                xe = centroid + gamma * (centroid - simplex[-1])
                fe = call(xe)
                if fe < fr:
                    simplex[-1], scores[-1] = xe, fe
                else:
                    simplex[-1], scores[-1] = xr, fr
                continue
            xc = centroid + rho * (simplex[-1] - centroid)
            fc = call(xc)
            if fc < scores[-1]:
                simplex[-1], scores[-1] = xc, fc
                continue
            best = simplex[0]
            simplex = [best] + [best + sigma * (x - best) for x in simplex[1:]]
            scores = [scores[0]] + [call(x) for x in simplex[1:]]
    except _BudgetExhausted:
        pass
    if not math.isfinite(best_f):
        raise SearchError("evaluation budget too small to seed the simplex", x0)
    return best_x, best_f


class _BudgetExhausted(Exception):
    pass


# ---------------------------------------------------------------------------
# public entry points
# ---------------------------------------------------------------------------


def _evaluate(build: Callable, objective_fn: Callable, params: np.ndarray) -> float:
    try:
        return objective_fn(build(params))
    except Exception as exc:  # noqa: BLE001 - abort with the failing vector
        raise SearchError(f"objective evaluation failed: {exc}", params) from exc


def baseline(objective: str, family: str, a: Optional[float] = None,
             halfwidth: float = 0.5) -> float:
    """Floor value for search acceptance: dense 1-D scan or fixed candidate."""
    value, _ = _baseline_full(objective, family, a=a, halfwidth=halfwidth)
    return value


def _baseline_full(objective: str, family: str, a: Optional[float] = None,
                   halfwidth: float = 0.5) -> tuple[float, Optional[np.ndarray]]:
    if family == "bs-example":
        if objective != "min01":
            raise ValueError("the BS example is evaluated through the min01 functional")
        return q_min_01_bs().value, np.array([1.0])
    obj = _objective_fn(objective, a)
    if family == "indicator":
        grid = np.linspace(0.26, 6.0, 288)
        build = _build_indicator
    elif family == "gaussian":
        grid = np.geomspace(0.05, 200.0, 288)
        build = _build_gaussian
    else:
        raise ValueError(f"no scannable baseline for family {family!r}")
    best_v, best_p = -math.inf, None
    for g in grid:
        params = np.array([math.sqrt(g)])
        v = _evaluate(build, obj, params)
        if v > best_v:
            best_v, best_p = v, params
    return best_v, best_p


def _run_restart(build, obj_fn, x0: np.ndarray, max_evals: int) -> tuple[list[float], np.ndarray, float]:
    values: list[float] = []

    def g(x: np.ndarray) -> float:
        return -_evaluate(build, obj_fn, x)

    best_x, best_neg = _nelder_mead(g, x0, max_evals, record=lambda v: values.append(-v))
    return values, best_x, -best_neg


def search(objective: str, family: str, budget: int = DEFAULT_BUDGET, seed: int = 0,
           a: Optional[float] = None, dimension: int = 0,
           halfwidth: float = 0.5) -> SearchRecord:
    """Seeded multi-restart simplex maximization of an inequality ratio.

    Deterministic given (objective, family, budget, seed): restarts have
    independent seeded starting points, restart 0 starting from the family
    baseline optimum when one is scannable.
    """
    if budget < 100:
        raise ValueError(f"budget must be at least 100, got {budget}")
    build, dim = _family_builder(family, dimension, halfwidth)
    if family == "bs-example":
        if objective != "min01":
            raise ValueError("the BS example is evaluated through the min01 functional")
        # scale invariant in the amplitude parameter: one singular-quadrature
        # evaluation serves the whole search
        bs_value = q_min_01_bs().value

        def obj_fn(f):
            return bs_value
    else:
        obj_fn = _objective_fn(objective, a)

    try:
        _, base_params = _baseline_full(objective, family, a=a, halfwidth=halfwidth)
    except ValueError:
        base_params = None
    x_base = (np.abs(base_params) if base_params is not None
              else np.ones(dim, dtype=np.float64))
    if x_base.size != dim:
        x_base = np.ones(dim, dtype=np.float64)

    restarts = max(4, dim)
    per_restart = budget // restarts
    starts = []
    for r in range(restarts):
        if r == 0:
            starts.append(x_base.copy())
        else:
            rng = np.random.default_rng([seed, r])
            starts.append(x_base * np.exp(rng.uniform(-math.log(4.0), math.log(4.0), dim)))

    def job(r: int):
        return _run_restart(build, obj_fn, starts[r], per_restart)

    workers = worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job, range(restarts)))
    else:
        results = [job(r) for r in range(restarts)]

    # merge deterministically in restart-index order
    trace: list[tuple[int, float]] = []
    best_so_far = -math.inf
    idx = 0
    best_value, best_params, best_restart = -math.inf, None, -1
    for r, (values, bx, bv) in enumerate(results):
        for v in values:
            idx += 1
            if v > best_so_far:
                best_so_far = v
            trace.append((idx, best_so_far))
        if bv > best_value:
            best_value, best_params, best_restart = bv, bx, r

    check = _evaluate(build, obj_fn, best_params)
    if abs(check - best_value) > 1e-10 * max(1.0, abs(best_value)):
        raise SearchError(
            f"best value {best_value!r} failed re-evaluation ({check!r})", best_params)
    label = objective if a is None else f"{objective}(a={a:.6g})"
    return SearchRecord(objective=label, family=family, dimension=dim,
                        best_params=tuple(float(x) for x in best_params),
                        best_value=float(best_value), evaluations=idx, seed=seed,
                        trace=tuple(trace))
