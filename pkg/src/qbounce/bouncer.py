"""The quantum bouncer: physical scaling, Airy eigenmodes and I0(s).

Two sets of ground-state constants coexist:

* ``Convention.EXACT``: S_n = a_n (true zero of Ai) and N_n = 1/|Ai'(-a_n)|.
* ``Convention.PAPER``: the WKB constants S_1 = (9 pi/8)^{2/3},
  N_1 = (8 pi^2/9)^{1/6}; only defined for the ground state.
"""

from __future__ import annotations

import enum
import math
import threading
from dataclasses import dataclass

import numpy as np

from . import airy
from .numerics import (
    QuadratureResult,
    cumulative_integral,
    integrate,
    integrate_to_infinity,
    panel_integrals,
)

__all__ = [
    "Convention",
    "PhysicalScaling",
    "Eigenmode",
    "make_scaling",
    "eigenmode",
    "psi",
    "psi_prime",
    "normalization_integral",
    "cumulative_I0",
    "I0Table",
    "i0_table",
    "count_nodes",
    "PAPER_S1",
    "PAPER_N1",
]

PAPER_S1 = (9.0 * math.pi / 8.0) ** (2.0 / 3.0)
PAPER_N1 = (8.0 * math.pi ** 2 / 9.0) ** (1.0 / 6.0)


class Convention(str, enum.Enum):
    PAPER = "paper"
    EXACT = "exact"

    @classmethod
    def parse(cls, value) -> "Convention":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown convention {value!r}; use 'paper' or 'exact'") from None


@dataclass(frozen=True)
class PhysicalScaling:
    mass: float
    gravity: float
    hbar: float
    length_unit: float
    energy_unit: float

    def to_dimensionless_height(self, z):
        return np.asarray(z) / self.length_unit

    def to_dimensionless_energy(self, energy):
        return np.asarray(energy) / self.energy_unit


def make_scaling(mass: float, gravity: float, hbar: float) -> PhysicalScaling:
    """Gravitational length l_g = (hbar^2 / (2 m^2 g))^{1/3} and energy unit m g l_g."""
    for name, value in (("mass", mass), ("gravity", gravity), ("hbar", hbar)):
        if not (math.isfinite(value) and value > 0):
            raise ValueError(f"{name} must be positive and finite, got {value!r}")
    length = (hbar ** 2 / (2.0 * mass ** 2 * gravity)) ** (1.0 / 3.0)
    return PhysicalScaling(mass, gravity, hbar, length, mass * gravity * length)


@dataclass(frozen=True)
class Eigenmode:
    n: int
    S: float
    N: float
    convention: Convention

    def __call__(self, s):
        return psi(self, s)


def eigenmode(n: int, convention="exact") -> Eigenmode:
    convention = Convention.parse(convention)
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"mode index must be a positive integer, got {n!r}")
    if convention is Convention.PAPER:
        if n != 1:
            raise ValueError("WKB constants are defined for the ground state n=1 only")
        return Eigenmode(1, PAPER_S1, PAPER_N1, convention)
    a_n = airy.airy_zero(int(n)).a_n
    slope = airy.airy_eval(-a_n).ai_prime
    return Eigenmode(int(n), a_n, 1.0 / abs(slope), convention)


def _check_domain(s):
    arr = np.asarray(s, dtype=float)
    if np.any(arr < 0):
        raise ValueError("psi is only defined for s >= 0 (hard wall at s = 0)")
    return arr


def psi(mode: Eigenmode, s):
    """N_n Ai(s - S_n) for s >= 0.

    With the exact constants the wall value psi_n(0) = 0 is returned exactly
    rather than as the rounding residue of Ai at its zero.
    """
    arr = _check_domain(s)
    out = mode.N * airy.airy_eval(arr - mode.S).ai
    if mode.convention is Convention.EXACT:
        out = np.where(arr == 0.0, 0.0, out)
        return float(out) if out.ndim == 0 else out
    return out


def psi_prime(mode: Eigenmode, s):
    arr = _check_domain(s)
    return mode.N * airy.airy_eval(arr - mode.S).ai_prime


def _psi_squared(mode):
    def f(s):
        return psi(mode, s) ** 2

    return f


def _tail_bound(mode):
    # |Ai(x)| <= exp(-2/3 x^{3/2}) for x >= 1, so the tail of Ai^2 beyond x is
    # below exp(-4/3 x^{3/2}) / (2 sqrt(x)).
    def bound(s):
        x = s - mode.S
        if x < 1.0:
            return math.inf
        return mode.N ** 2 * math.exp(-4.0 / 3.0 * x ** 1.5) / (2.0 * math.sqrt(x))

    return bound


def normalization_integral(mode: Eigenmode, abs_tol: float = 1e-12) -> QuadratureResult:
    """int_0^inf psi_n^2 ds (1 for the exact constants)."""
    return integrate_to_infinity(_psi_squared(mode), 0.0, abs_tol, tail_bound=_tail_bound(mode))


class I0Table:
    """Monotone cubic interpolant of I0(s) = int_0^s psi^2 on a fixed grid.

    Node values come from panel-wise Gauss-Kronrod quadrature; node slopes
    are the exact derivative psi^2, limited (Fritsch-Carlson) only where
    needed to keep the interpolant monotone. Beyond the last node the
    table returns its limit.
    """

    STEP = 0.01
    REACH = 30.0  # Airy argument at the last node; psi^2 there is ~exp(-219)

    def __init__(self, mode: Eigenmode):
        self.mode = mode
        upper = mode.S + self.REACH
        count = int(math.ceil(upper / self.STEP))
        grid = np.linspace(0.0, count * self.STEP, count + 1)
        f = _psi_squared(mode)
        values = cumulative_integral(f, grid, abs_tol=1e-15, rel_tol=1e-14)
        slopes = f(grid)
        self.grid = grid
        self.values = values
        self.slopes = self._limit(grid, values, slopes)
        self.limit = float(values[-1])

    @staticmethod
    def _limit(grid, values, slopes):
        d = slopes.copy()
        h = np.diff(grid)
        delta = np.diff(values) / h
        for i in range(delta.size):
            if delta[i] <= 0.0:
                d[i] = d[i + 1] = 0.0
                continue
            a = d[i] / delta[i]
            b = d[i + 1] / delta[i]
            r = a * a + b * b
            if r > 9.0:
                tau = 3.0 / math.sqrt(r)
                d[i] = tau * a * delta[i]
                d[i + 1] = tau * b * delta[i]
        return d

    def __call__(self, s):
        arr = np.asarray(s, dtype=float)
        if np.any(arr < 0):
            raise ValueError("I0 is only defined for s >= 0")
        flat = np.atleast_1d(arr).ravel()
        out = np.full(flat.shape, self.limit)
        inside = flat < self.grid[-1]
        x = flat[inside]
        i = np.clip(np.searchsorted(self.grid, x, side="right") - 1, 0, self.grid.size - 2)
        h = self.grid[i + 1] - self.grid[i]
        t = (x - self.grid[i]) / h
        y0, y1 = self.values[i], self.values[i + 1]
        m0, m1 = self.slopes[i] * h, self.slopes[i + 1] * h
        t2 = t * t
        t3 = t2 * t
        out[inside] = (
            (2 * t3 - 3 * t2 + 1) * y0
            + (t3 - 2 * t2 + t) * m0
            + (-2 * t3 + 3 * t2) * y1
            + (t3 - t2) * m1
        )
        if arr.ndim == 0:
            return float(out[0])
        return out.reshape(arr.shape)

    def precise(self, s):
        """I0(s) as the nearest knot value plus a 7/15 Gauss-Kronrod panel to ``s``.

        The panel is at most half a grid step wide, so the result is accurate
        to rounding and, unlike the cubic, smooth enough for finite differences.
        """
        arr = np.asarray(s, dtype=float)
        if np.any(arr < 0):
            raise ValueError("I0 is only defined for s >= 0")
        flat = np.atleast_1d(arr).ravel()
        out = np.full(flat.shape, self.limit)
        inside = flat < self.grid[-1]
        x = flat[inside]
        k = np.clip(np.rint(x / self.STEP).astype(int), 0, self.grid.size - 1)
        knot = self.grid[k]
        panel = np.zeros_like(x)
        moved = x != knot
        if moved.any():
            panel[moved] = panel_integrals(_psi_squared(self.mode), knot[moved], x[moved])
        out[inside] = self.values[k] + panel
        if arr.ndim == 0:
            return float(out[0])
        return out.reshape(arr.shape)


_TABLES: dict = {}
_TABLE_LOCK = threading.Lock()


def i0_table(mode: Eigenmode) -> I0Table:
    """Shared, lazily built I0 table for ``mode`` (construction is locked)."""
    with _TABLE_LOCK:
        table = _TABLES.get(mode)
        if table is None:
            table = I0Table(mode)
            _TABLES[mode] = table
        return table


CACHE_TOLERANCE = 1e-9


def cumulative_I0(mode: Eigenmode, s, tol: float = CACHE_TOLERANCE):
    """I0(s) = int_0^s psi_1(y)^2 dy.

    Tolerances at or above ``CACHE_TOLERANCE`` are served from the cached
    interpolant; tighter requests integrate directly.
    """
    if mode.n != 1:
        raise ValueError("I0 is defined for the ground state only")
    if tol >= CACHE_TOLERANCE:
        return i0_table(mode)(s)
    arr = np.asarray(s, dtype=float)
    if np.any(arr < 0):
        raise ValueError("I0 is only defined for s >= 0")
    f = _psi_squared(mode)
    reach = mode.S + airy.AIRY_MAX

    def one(x):
        if x == 0.0:
            return 0.0
        return integrate(f, 0.0, min(x, reach), abs_tol=tol, rel_tol=tol).value

    if arr.ndim == 0:
        return one(float(arr))
    return np.vectorize(one, otypes=[float])(arr)


def count_nodes(values) -> int:
    """Number of sign changes in a sampled function, ignoring exact zeros."""
    v = np.asarray(values, dtype=float)
    v = v[v != 0.0]
    return int(np.count_nonzero(np.signbit(v[1:]) != np.signbit(v[:-1])))
