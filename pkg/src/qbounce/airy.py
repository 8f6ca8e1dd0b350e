"""Airy functions Ai, Bi and their derivatives on [-40, 100], and zeros of Ai.

Evaluation strategy
-------------------
* ``|x| <= 8``: Taylor expansion about the nearest node of a 0.5-spaced
  table (the node at 0 is the Maclaurin series with the closed-form
  constants). Coefficients follow from ``y'' = x y`` by recurrence.
* ``x > 8``: the exponential asymptotic series in ``zeta = 2/3 x^{3/2}``.
* ``x < -8``: the oscillatory asymptotic forms.

The node table is built once at import. Ai on the positive half-line is
propagated downward from its asymptotic value at x = 10; everything else is
propagated outward from the closed forms at x = 0. Each direction is the
numerically stable one for the solution being carried.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .numerics import Bracket, refine_root

__all__ = [
    "AIRY_MIN",
    "AIRY_MAX",
    "AiryValues",
    "AiryZero",
    "airy_eval",
    "ai",
    "ai_prime",
    "bi",
    "airy_zero",
    "zero_seed",
    "WRONSKIAN",
]

AIRY_MIN = -40.0
AIRY_MAX = 100.0
WRONSKIAN = 1.0 / math.pi

AI0 = 1.0 / (3.0 ** (2.0 / 3.0) * math.gamma(2.0 / 3.0))
AIP0 = -1.0 / (3.0 ** (1.0 / 3.0) * math.gamma(1.0 / 3.0))
BI0 = 1.0 / (3.0 ** (1.0 / 6.0) * math.gamma(2.0 / 3.0))
BIP0 = 3.0 ** (1.0 / 6.0) / math.gamma(1.0 / 3.0)

_SWITCH = 8.0
_NODE_STEP = 0.5
_TAYLOR_TERMS = 34
_SQRT_PI = math.sqrt(math.pi)

ArrayOrFloat = Union[float, np.ndarray]


@dataclass(frozen=True)
class AiryValues:
    ai: ArrayOrFloat
    bi: ArrayOrFloat
    ai_prime: ArrayOrFloat
    bi_prime: ArrayOrFloat

    @property
    def wronskian(self) -> ArrayOrFloat:
        return self.ai * self.bi_prime - self.ai_prime * self.bi


@dataclass(frozen=True)
class AiryZero:
    n: int
    a_n: float


def _asymptotic_coefficients(count: int = 80):
    u = [1.0]
    for k in range(1, count):
        u.append(u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k))
    v = [1.0] + [-(6 * k + 1) / (6 * k - 1) * u[k] for k in range(1, count)]
    return np.array(u), np.array(v)


_U, _V = _asymptotic_coefficients()


def _truncated_sum(coef: np.ndarray, zeta: np.ndarray, sign: float) -> np.ndarray:
    """sum_k sign^k coef_k / zeta^k, stopped at the smallest term for each zeta."""
    total = np.zeros_like(zeta)
    active = np.ones(zeta.shape, dtype=bool)
    prev = np.full(zeta.shape, np.inf)
    power = np.ones_like(zeta)
    for k in range(coef.size):
        term = coef[k] * power
        mag = np.abs(term)
        active &= mag < prev
        total = np.where(active, total + term, total)
        prev = np.where(active, mag, prev)
        active &= mag > 1e-18 * np.abs(total)
        if not active.any():
            break
        power = power * (sign / zeta)
    return total


def _split_sums(coef: np.ndarray, zeta: np.ndarray):
    """Even and odd alternating sums used in the oscillatory expansions.

    Returns (sum_k (-1)^k c_{2k}/zeta^{2k}, sum_k (-1)^k c_{2k+1}/zeta^{2k+1}).
    """
    even = np.zeros_like(zeta)
    odd = np.zeros_like(zeta)
    active = np.ones(zeta.shape, dtype=bool)
    prev = np.full(zeta.shape, np.inf)
    for k in range(coef.size):
        term = coef[k] / zeta ** k
        mag = np.abs(term)
        active &= mag < prev
        sgn = -1.0 if (k // 2) % 2 else 1.0
        if k % 2 == 0:
            even = np.where(active, even + sgn * term, even)
        else:
            odd = np.where(active, odd + sgn * term, odd)
        prev = np.where(active, mag, prev)
        active &= mag > 1e-18
        if not active.any():
            break
    return even, odd


def _asymptotic_positive(x: np.ndarray):
    zeta = (2.0 / 3.0) * x * np.sqrt(x)
    q = x ** 0.25
    e_minus = np.exp(-zeta)
    e_plus = np.exp(zeta)
    su_alt = _truncated_sum(_U, zeta, -1.0)
    sv_alt = _truncated_sum(_V, zeta, -1.0)
    su = _truncated_sum(_U, zeta, 1.0)
    sv = _truncated_sum(_V, zeta, 1.0)
    ai = e_minus / (2.0 * _SQRT_PI * q) * su_alt
    aip = -q * e_minus / (2.0 * _SQRT_PI) * sv_alt
    bi = e_plus / (_SQRT_PI * q) * su
    bip = q * e_plus / _SQRT_PI * sv
    return ai, aip, bi, bip


def _asymptotic_negative(x: np.ndarray):
    z = -x
    zeta = (2.0 / 3.0) * z * np.sqrt(z)
    q = z ** 0.25
    phase = zeta - 0.25 * math.pi
    c, s = np.cos(phase), np.sin(phase)
    ue, uo = _split_sums(_U, zeta)
    ve, vo = _split_sums(_V, zeta)
    ai = (c * ue + s * uo) / (_SQRT_PI * q)
    aip = q * (s * ve - c * vo) / _SQRT_PI
    bi = (-s * ue + c * uo) / (_SQRT_PI * q)
    bip = q * (c * ve + s * vo) / _SQRT_PI
    return ai, aip, bi, bip


def _taylor(x0, y0, dy0, t, terms=_TAYLOR_TERMS):
    """Value and slope at x0 + t of the solution of y'' = x y with data (y0, dy0) at x0.

    Coefficients obey k (k - 1) c_k = x0 c_{k-2} + c_{k-3}.
    """
    c3, c2, c1 = 0.0, y0, dy0  # c_{k-3}, c_{k-2}, c_{k-1}
    y = y0 + dy0 * t
    dy = dy0 + 0.0 * t
    tpow = t  # t^{k-1}
    for k in range(2, terms):
        ck = (x0 * c2 + c3) / (k * (k - 1))
        dy = dy + k * ck * tpow
        tpow = tpow * t
        y = y + ck * tpow
        c3, c2, c1 = c2, c1, ck
    return y, dy


def _build_nodes():
    nodes = np.arange(-_SWITCH, _SWITCH + _NODE_STEP / 2, _NODE_STEP)
    n = nodes.size
    zero = int(round(_SWITCH / _NODE_STEP))
    ai_t = np.empty(n)
    aip_t = np.empty(n)
    bi_t = np.empty(n)
    bip_t = np.empty(n)

    def march(values, slopes, start, stop, y, dy, x):
        step = -_NODE_STEP if stop < start else _NODE_STEP
        idx = start
        values[idx], slopes[idx] = y, dy
        while idx != stop:
            y, dy = _taylor(x, y, dy, step, terms=48)
            x += step
            idx += 1 if step > 0 else -1
            values[idx], slopes[idx] = y, dy

    # Bi: outward from the origin in both directions
    march(bi_t, bip_t, zero, n - 1, BI0, BIP0, 0.0)
    march(bi_t, bip_t, zero, 0, BI0, BIP0, 0.0)
    # Ai: leftward from the origin over the oscillatory side
    march(ai_t, aip_t, zero, 0, AI0, AIP0, 0.0)
    # Ai on x > 0: start from the asymptotic series at x = 10 and march down
    start = 10.0
    a10, ap10, _, _ = (float(v[0]) for v in _asymptotic_positive(np.array([start])))
    y, dy, x = a10, ap10, start
    while x > _SWITCH + 1e-12:
        y, dy = _taylor(x, y, dy, -_NODE_STEP, terms=48)
        x -= _NODE_STEP
    ai_pos = np.empty(n - zero)
    aip_pos = np.empty(n - zero)
    march(ai_pos, aip_pos, n - zero - 1, 0, y, dy, x)
    # keep the closed-form value at the origin, downward march elsewhere
    ai_t[zero + 1:] = ai_pos[1:]
    aip_t[zero + 1:] = aip_pos[1:]
    return nodes, ai_t, aip_t, bi_t, bip_t, ai_pos[0], aip_pos[0]


_NODES, _AI_T, _AIP_T, _BI_T, _BIP_T, _AI0_MARCHED, _AIP0_MARCHED = _build_nodes()


def _eval_array(x: np.ndarray):
    ai = np.empty_like(x)
    aip = np.empty_like(x)
    bi = np.empty_like(x)
    bip = np.empty_like(x)

    mid = np.abs(x) <= _SWITCH
    if mid.any():
        xm = x[mid]
        idx = np.rint((xm + _SWITCH) / _NODE_STEP).astype(int)
        x0 = _NODES[idx]
        t = xm - x0
        ai[mid], aip[mid] = _taylor(x0, _AI_T[idx], _AIP_T[idx], t)
        bi[mid], bip[mid] = _taylor(x0, _BI_T[idx], _BIP_T[idx], t)
    pos = x > _SWITCH
    if pos.any():
        ai[pos], aip[pos], bi[pos], bip[pos] = _asymptotic_positive(x[pos])
    neg = x < -_SWITCH
    if neg.any():
        ai[neg], aip[neg], bi[neg], bip[neg] = _asymptotic_negative(x[neg])
    return ai, aip, bi, bip


def _check_range(x: np.ndarray):
    if np.any(np.isnan(x)):
        raise ValueError("Airy argument is NaN")
    bad = (x < AIRY_MIN) | (x > AIRY_MAX)
    if bad.any():
        raise ValueError(
            f"Airy argument {float(x[bad][0])!r} outside the accurate range "
            f"[{AIRY_MIN}, {AIRY_MAX}]"
        )


def airy_eval(x) -> AiryValues:
    """Ai, Bi, Ai', Bi' at ``x`` (scalar or array) in [-40, 100].

    Absolute error <= 1e-10 where |value| <= 1, relative error <= 1e-10
    otherwise.

    Raises
    ------
    ValueError
        If any argument lies outside [-40, 100].
    """
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    flat = np.atleast_1d(arr).ravel()
    _check_range(flat)
    ai, aip, bi, bip = _eval_array(flat)
    if scalar:
        return AiryValues(float(ai[0]), float(bi[0]), float(aip[0]), float(bip[0]))
    shape = arr.shape
    return AiryValues(ai.reshape(shape), bi.reshape(shape), aip.reshape(shape), bip.reshape(shape))


def ai(x):
    return airy_eval(x).ai


def ai_prime(x):
    return airy_eval(x).ai_prime


def bi(x):
    return airy_eval(x).bi


def zero_seed(n: int) -> float:
    """Asymptotic estimate (3 pi (4n - 1) / 8)^{2/3} of the n-th zero magnitude."""
    return (3.0 * math.pi * (4 * n - 1) / 8.0) ** (2.0 / 3.0)


_ZERO_CACHE: dict = {}


def airy_zero(n: int) -> AiryZero:
    """The n-th zero of Ai, returned as the positive magnitude ``a_n``.

    The root is bracketed by ``zero_seed(n) +/- 0.05`` and refined by
    safeguarded Newton iteration to a bracket width of 1e-12.
    """
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or not 1 <= n <= 50:
        raise ValueError(f"zero index must be an integer in [1, 50], got {n!r}")
    n = int(n)
    cached = _ZERO_CACHE.get(n)
    if cached is not None:
        return cached
    seed = zero_seed(n)

    def f(t):
        return airy_eval(-t).ai

    def fprime(t):
        return -airy_eval(-t).ai_prime

    bracket = Bracket.around(f, seed - 0.05, seed + 0.05)
    zero = AiryZero(n, refine_root(f, bracket, tol=1e-12, fprime=fprime))
    _ZERO_CACHE[n] = zero
    return zero
