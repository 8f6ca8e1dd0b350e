"""Numerical kernels: adaptive quadrature, bracketed roots, finite differences
and a symmetric tridiagonal eigensolver.

All routines are pure functions of their inputs. Integrands may be written
for scalars or for numpy arrays; array evaluation is attempted first.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = [
    "QuadratureResult",
    "QuadratureError",
    "Bracket",
    "TridiagonalSystem",
    "integrate",
    "integrate_to_infinity",
    "cumulative_integral",
    "panel_integrals",
    "refine_root",
    "derivative",
    "eigenvalues_tridiagonal",
    "sturm_count",
]

_EPS = np.finfo(float).eps

# Gauss-Kronrod 7/15 pair on [-1, 1] (QUADPACK qk15 abscissae and weights).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD_W = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS_W = np.zeros(15)
# Gauss nodes are the odd-indexed Kronrod abscissae (1, 3, 5) plus the centre.
_GAUSS_W[[1, 3, 5]] = _WG[:3]
_GAUSS_W[[13, 11, 9]] = _WG[:3]
_GAUSS_W[7] = _WG[3]


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    evaluations: int
    cutoff: Optional[float] = None

    def __float__(self) -> float:
        return self.value


class QuadratureError(ArithmeticError):
    """Raised when a quadrature fails; carries the best available estimate."""

    def __init__(self, message, value=math.nan, abs_error=math.inf, abscissa=None):
        super().__init__(message)
        self.value = value
        self.abs_error = abs_error
        self.abscissa = abscissa


def _evaluate(f, x: np.ndarray) -> np.ndarray:
    try:
        y = np.asarray(f(x), dtype=float)
        if y.shape != x.shape:
            y = np.broadcast_to(y, x.shape).astype(float)
    except (TypeError, ValueError):
        y = np.array([float(f(float(xi))) for xi in x.ravel()]).reshape(x.shape)
    if not np.all(np.isfinite(y)):
        bad = np.argwhere(~np.isfinite(y))[0]
        at = float(x[tuple(bad)])
        raise QuadratureError(f"integrand is not finite at s={at!r}", abscissa=at)
    return y


def _gk15(f, lo: np.ndarray, hi: np.ndarray):
    """Apply the 7/15 rule to a batch of panels.

    Returns (kronrod, error, floor) where ``floor`` is the roundoff level
    below which the error estimate is meaningless.
    """
    centre = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = centre[:, None] + half[:, None] * _NODES[None, :]
    y = _evaluate(f, x)
    kronrod = half * (y @ _KRONROD_W)
    gauss = half * (y @ _GAUSS_W)
    resabs = np.abs(half) * (np.abs(y) @ _KRONROD_W)
    floor = 50.0 * _EPS * resabs
    err = np.maximum(np.abs(kronrod - gauss), floor)
    return kronrod, err, floor


def panel_integrals(f: Callable, lo, hi) -> np.ndarray:
    """One 15-point Kronrod rule per panel ``[lo[i], hi[i]]`` (signed widths allowed)."""
    return _gk15(f, np.atleast_1d(np.asarray(lo, float)), np.atleast_1d(np.asarray(hi, float)))[0]


def integrate(
    f: Callable,
    a: float,
    b: float,
    abs_tol: float = 1e-12,
    rel_tol: float = 1e-12,
    max_depth: int = 50,
    max_panels: int = 5000,
) -> QuadratureResult:
    """Adaptive Gauss-Kronrod (7/15) integral of ``f`` over ``[a, b]``.

    The panel with the largest error estimate is bisected until the summed
    estimate is below ``max(abs_tol, rel_tol * |value|)``.

    Raises
    ------
    QuadratureError
        If ``f`` returns a non-finite value (the offending abscissa is
        attached) or if the tolerance is not met within ``max_depth``
        bisections / ``max_panels`` panels (the best estimate is attached).
    """
    a = float(a)
    b = float(b)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("integration limits must be finite")
    if not a < b:
        raise ValueError(f"need a < b, got a={a}, b={b}")
    if abs_tol <= 0 or rel_tol <= 0:
        raise ValueError("tolerances must be positive")

    val, err, floor = _gk15(f, np.array([a]), np.array([b]))
    evaluations = 15
    # max-heap on error: entries are (-err, lo, hi, val, at_floor)
    heap = [(-float(err[0]), a, b, float(val[0]), bool(err[0] <= floor[0]))]
    total = float(val[0])
    total_err = float(err[0])
    min_width = (b - a) * 2.0 ** (-max_depth)

    while total_err > max(abs_tol, rel_tol * abs(total)):
        if len(heap) >= max_panels:
            raise QuadratureError(
                f"no convergence after {len(heap)} panels", total, total_err
            )
        neg_err, lo, hi, v, at_floor = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if at_floor:
            heapq.heappush(heap, (neg_err, lo, hi, v, at_floor))
            raise QuadratureError(
                "requested tolerance is below the roundoff level of the integrand",
                total,
                total_err,
                abscissa=mid,
            )
        if hi - lo <= min_width or not lo < mid < hi:
            heapq.heappush(heap, (neg_err, lo, hi, v, at_floor))
            raise QuadratureError(
                f"maximum refinement depth reached near s={mid!r}",
                total,
                total_err,
                abscissa=mid,
            )
        vals, errs, floors = _gk15(f, np.array([lo, mid]), np.array([mid, hi]))
        evaluations += 30
        for i, (l_, h_) in enumerate(((lo, mid), (mid, hi))):
            heapq.heappush(
                heap, (-float(errs[i]), l_, h_, float(vals[i]), bool(errs[i] <= floors[i]))
            )
        # re-sum instead of updating incrementally to avoid drift
        total = math.fsum(item[3] for item in heap)
        total_err = math.fsum(-item[0] for item in heap)

    return QuadratureResult(total, total_err, evaluations)


def cumulative_integral(
    f: Callable,
    grid: Sequence[float],
    abs_tol: float = 1e-13,
    rel_tol: float = 1e-12,
    max_depth: int = 40,
) -> np.ndarray:
    """Running integral ``F[i] = int_{grid[0]}^{grid[i]} f`` on a sorted grid.

    Every panel ``[grid[i], grid[i+1]]`` is integrated with the 7/15 rule and
    bisected until its own estimate is below
    ``max(abs_tol * width / span, rel_tol * |panel|)``. Panels are processed
    in batches so ``f`` is called with large arrays.
    """
    edges = np.asarray(grid, dtype=float)
    if edges.ndim != 1 or edges.size < 1:
        raise ValueError("grid must be a non-empty 1-D sequence")
    if edges.size == 1:
        return np.zeros(1)
    if np.any(np.diff(edges) < 0):
        raise ValueError("grid must be nondecreasing")
    span = edges[-1] - edges[0]
    out = np.zeros(edges.size - 1)

    owner = np.arange(edges.size - 1)
    lo = edges[:-1].copy()
    hi = edges[1:].copy()
    keep = hi > lo
    owner, lo, hi = owner[keep], lo[keep], hi[keep]
    depth = 0
    while lo.size:
        vals, errs, floors = _gk15(f, lo, hi)
        width = hi - lo
        ok = errs <= np.maximum(abs_tol * width / span, rel_tol * np.abs(vals))
        ok |= errs <= floors
        if depth >= max_depth:
            ok[:] = True
        np.add.at(out, owner[ok], vals[ok])
        bad = ~ok
        mid = 0.5 * (lo[bad] + hi[bad])
        owner = np.concatenate([owner[bad], owner[bad]])
        lo, hi = np.concatenate([lo[bad], mid]), np.concatenate([mid, hi[bad]])
        depth += 1
    return np.concatenate([[0.0], np.cumsum(out)])


def _geometric_tail(previous: list) -> float:
    if len(previous) < 3:
        return math.inf
    p2, p1, p0 = (abs(v) for v in previous[-3:])
    if p0 == 0.0 and p1 == 0.0:
        return 0.0
    if p1 == 0.0 or p2 == 0.0:
        return math.inf
    r1, r0 = p1 / p2, p0 / p1
    if r0 >= 1.0 or r1 >= 1.0:
        return math.inf
    r = max(r0, r1)
    return p0 * r / (1.0 - r)


def integrate_to_infinity(
    f: Callable,
    a: float,
    abs_tol: float = 1e-10,
    tail_bound: Optional[Callable[[float], float]] = None,
    panel_width: float = 1.0,
    hard_cutoff: float = 200.0,
) -> QuadratureResult:
    """Integral of a decaying ``f`` over ``[a, inf)`` by truncation.

    Unit panels are accumulated until the tail beyond the current edge is
    below ``abs_tol / 10``. The tail is ``tail_bound(edge)`` when supplied
    (an analytic bound), otherwise a geometric-series estimate from the last
    three panel integrals, which requires them to be shrinking.
    The cutoff actually used is reported in ``QuadratureResult.cutoff``.
    """
    a = float(a)
    if not math.isfinite(a):
        raise ValueError("lower limit must be finite")
    if abs_tol <= 0:
        raise ValueError("abs_tol must be positive")
    target = abs_tol / 10.0
    edge = a
    pieces: list = []
    total_err = 0.0
    evaluations = 0
    while True:
        if edge >= hard_cutoff:
            value = math.fsum(pieces)
            raise QuadratureError(
                f"tail bound not reached before s={hard_cutoff}", value, math.inf, edge
            )
        nxt = min(edge + panel_width, hard_cutoff)
        res = integrate(f, edge, nxt, abs_tol=target / 100.0, rel_tol=1e-13)
        pieces.append(res.value)
        total_err += res.abs_error_estimate
        evaluations += res.evaluations
        edge = nxt
        tail = tail_bound(edge) if tail_bound is not None else _geometric_tail(pieces)
        if tail < target:
            return QuadratureResult(math.fsum(pieces), total_err + tail, evaluations, edge)


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float
    f_lo: float
    f_hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"bracket needs lo < hi, got [{self.lo}, {self.hi}]")
        if self.f_lo * self.f_hi > 0:
            raise ValueError(
                f"no sign change on [{self.lo}, {self.hi}]: "
                f"f(lo)={self.f_lo!r}, f(hi)={self.f_hi!r}"
            )

    @classmethod
    def around(cls, f: Callable[[float], float], lo: float, hi: float) -> "Bracket":
        return cls(float(lo), float(hi), float(f(lo)), float(f(hi)))


def refine_root(
    f: Callable[[float], float],
    bracket: Bracket,
    tol: float = 1e-12,
    fprime: Optional[Callable[[float], float]] = None,
    maxiter: int = 500,
) -> float:
    """Root of ``f`` inside ``bracket``, located to a bracket of width <= tol.

    Newton steps (when ``fprime`` is given) or false-position steps are
    taken while they stay inside the bracket and halve it at least every
    other step; otherwise the step is a bisection, so convergence is
    guaranteed. The returned point always lies inside the original bracket.
    """
    if not isinstance(bracket, Bracket):
        raise TypeError("bracket must be a Bracket")
    if tol <= 0:
        raise ValueError("tol must be positive")
    lo, hi, flo, fhi = bracket.lo, bracket.hi, bracket.f_lo, bracket.f_hi
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi

    def update(x, fx):
        nonlocal lo, hi, flo, fhi
        if (fx < 0) == (flo < 0):
            lo, flo = x, fx
        else:
            hi, fhi = x, fx

    widths = [hi - lo]
    x = 0.5 * (lo + hi)
    fx = f(x)
    for _ in range(maxiter):
        if fx == 0.0:
            return x
        update(x, fx)
        widths.append(hi - lo)
        if hi - lo <= tol:
            return lo if abs(flo) <= abs(fhi) else hi

        cand = math.nan
        if fprime is not None:
            d = fprime(x)
            if d != 0.0 and math.isfinite(d):
                cand = x - fx / d
        elif fhi != flo:
            cand = lo - flo * (hi - lo) / (fhi - flo)
        stalled = len(widths) >= 3 and widths[-1] > 0.5 * widths[-3]
        if not (lo < cand < hi) or stalled:
            cand = 0.5 * (lo + hi)
        elif fprime is not None and abs(cand - x) < 0.5 * tol:
            # Newton has converged from one side: close the bracket around it
            for probe in (cand - 0.5 * tol, cand + 0.5 * tol):
                if lo < probe < hi:
                    fp = f(probe)
                    if fp == 0.0:
                        return probe
                    update(probe, fp)
        x = cand
        fx = f(x)
    raise RuntimeError(f"refine_root did not converge; last bracket [{lo}, {hi}]")


def derivative(f: Callable, s, order: int = 1, step: Optional[float] = None):
    """Central finite difference of ``f`` at ``s`` (order 1 or 2).

    Default steps: 1e-5 for the first derivative, 1e-4 for the second.
    """
    if order == 1:
        h = 1e-5 if step is None else step
        if h <= 0:
            raise ValueError("step must be positive")
        return (f(s + h) - f(s - h)) / (2.0 * h)
    if order == 2:
        h = 1e-4 if step is None else step
        if h <= 0:
            raise ValueError("step must be positive")
        return (f(s + h) - 2.0 * f(s) + f(s - h)) / (h * h)
    raise ValueError(f"unsupported derivative order {order}; use 1 or 2")


@dataclass(frozen=True)
class TridiagonalSystem:
    """Symmetric tridiagonal matrix stored as its diagonal and one off-diagonal."""

    diagonal: np.ndarray
    off_diagonal: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diagonal, dtype=float).reshape(-1)
        e = np.asarray(self.off_diagonal, dtype=float).reshape(-1)
        if d.size < 1:
            raise ValueError("diagonal must be non-empty")
        if e.size != d.size - 1:
            raise ValueError(
                f"off_diagonal must have length {d.size - 1}, got {e.size}"
            )
        object.__setattr__(self, "diagonal", d)
        object.__setattr__(self, "off_diagonal", e)

    @property
    def size(self) -> int:
        return self.diagonal.size

    def to_dense(self) -> np.ndarray:
        return (
            np.diag(self.diagonal)
            + np.diag(self.off_diagonal, 1)
            + np.diag(self.off_diagonal, -1)
        )


def sturm_count(system: TridiagonalSystem, x: float) -> int:
    """Number of eigenvalues strictly below ``x`` (LDL^T inertia count)."""
    d = system.diagonal.tolist()
    e2 = (system.off_diagonal ** 2).tolist()
    pivmin = _pivot_floor(system)
    count = 0
    q = d[0] - x
    if abs(q) < pivmin:
        q = -pivmin
    if q < 0:
        count += 1
    for i in range(1, len(d)):
        q = d[i] - x - e2[i - 1] / q
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0:
            count += 1
    return count


def _pivot_floor(system: TridiagonalSystem) -> float:
    e2max = float(np.max(system.off_diagonal ** 2)) if system.off_diagonal.size else 0.0
    return max(np.finfo(float).tiny, np.finfo(float).tiny * e2max)


def eigenvalues_tridiagonal(system: TridiagonalSystem, k: int) -> np.ndarray:
    """The ``k`` smallest eigenvalues, ascending, by Sturm-sequence bisection.

    Each eigenvalue is bisected down to a few ulps of the matrix norm. Every
    inertia count also tightens the brackets of the other wanted eigenvalues.
    """
    n = system.size
    if not isinstance(k, (int, np.integer)) or k <= 0 or k > n:
        raise ValueError(f"k must be an integer in [1, {n}], got {k!r}")
    d = system.diagonal
    if n == 1:
        return d.copy()
    if not np.any(system.off_diagonal):
        return np.sort(d)[:k]

    radius = np.zeros(n)
    radius[:-1] += np.abs(system.off_diagonal)
    radius[1:] += np.abs(system.off_diagonal)
    glo = float(np.min(d - radius))
    ghi = float(np.max(d + radius))
    norm = max(abs(glo), abs(ghi))
    slack = 2.0 * _EPS * norm * n + _pivot_floor(system)
    glo -= slack
    ghi += slack

    lower = [glo] * k
    upper = [ghi] * k
    abs_floor = 4.0 * _EPS * norm
    for j in range(k):
        while True:
            lo, hi = lower[j], upper[j]
            if hi - lo <= max(abs_floor, 2.0 * _EPS * max(abs(lo), abs(hi))):
                break
            mid = 0.5 * (lo + hi)
            if not lo < mid < hi:
                break
            c = sturm_count(system, mid)
            # eigenvalue i (0-based) is < mid iff i < c
            for i in range(j, k):
                if i < c:
                    if mid < upper[i]:
                        upper[i] = mid
                elif mid > lower[i]:
                    lower[i] = mid
    out = np.array([0.5 * (lo + hi) for lo, hi in zip(lower, upper)])
    return np.maximum.accumulate(out)
