"""Strictly isospectral deformations of the bouncer (Mielnik construction).

With psi_1 the ground state and I0(s) = int_0^s psi_1^2, the general
Riccati solution w_g = w_p + psi_1^2 / (I0 + lambda) produces the family

    V(s; lambda) = s - 2 d^2/ds^2 ln(I0(s) + lambda)

whose ground state N(lambda) psi_1 / (I0 + lambda), N = sqrt(lambda (lambda + 1)),
sits at the undeformed energy S_1. Everything is defined for lambda > 0.

Sign conventions: V_minus = w^2 - w' is the bosonic side (equal to s - S_1
for w = w_p), V_plus = w^2 + w' the fermionic partner. The family potential
is S_1 + w_g^2 - w_g'.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import bouncer
from .bouncer import Convention, Eigenmode, eigenmode
from .numerics import derivative

__all__ = [
    "PSI_FLOOR",
    "S_MIN",
    "IsospectralPotential",
    "isospectral_potential",
    "witten_superpotential",
    "bernoulli_v",
    "bernoulli_residual",
    "general_superpotential",
    "riccati_residual",
    "partner_potential",
    "family_potential",
    "family_potential_log_form",
    "deformed_ground_state",
    "normalization_factor",
    "schrodinger_residual",
    "wall_limits",
]

# |psi_1| below this is treated as underflow for quantities dividing by psi_1
PSI_FLOOR = 1e-200
# documented small-s cutoff for grid emission of superpotential quantities
S_MIN = 1e-3


def normalization_factor(lam: float) -> float:
    """N(lambda) = sqrt(lambda (lambda + 1))."""
    return math.sqrt(lam * (lam + 1.0))


@dataclass(frozen=True)
class IsospectralPotential:
    lam: float
    mode: Eigenmode
    _table: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if not (math.isfinite(self.lam) and self.lam > 0):
            raise ValueError(f"lambda must be positive and finite, got {self.lam!r}")
        if self.mode.n != 1:
            raise ValueError("the deformation is built on the ground state only")
        # build the I0 cache eagerly so evaluation is read-only afterwards
        object.__setattr__(self, "_table", bouncer.i0_table(self.mode))

    @property
    def S(self) -> float:
        return self.mode.S

    @property
    def norm(self) -> float:
        return normalization_factor(self.lam)

    def i0(self, s):
        return self._table.precise(s)

    def psi(self, s):
        return bouncer.psi(self.mode, s)

    def psi_prime(self, s):
        return bouncer.psi_prime(self.mode, s)


def isospectral_potential(lam: float, convention="exact") -> IsospectralPotential:
    return IsospectralPotential(float(lam), eigenmode(1, convention))


def _positive(s):
    arr = np.asarray(s, dtype=float)
    if np.any(arr <= 0):
        raise ValueError("superpotential quantities need s > 0 (1/psi_1 is singular at the wall)")
    return arr


def _guarded_psi(mode: Eigenmode, s):
    p = bouncer.psi(mode, s)
    small = np.abs(p) < PSI_FLOOR
    if np.any(small):
        at = float(np.atleast_1d(s)[np.atleast_1d(small)][0])
        raise ValueError(f"|psi_1| < {PSI_FLOOR:g} at s={at!r}; beyond the underflow cutoff")
    return p


def witten_superpotential(mode: Eigenmode, s):
    """w_p(s) = -psi_1'(s) / psi_1(s) for s > 0."""
    arr = _positive(s)
    p = _guarded_psi(mode, arr)
    return -bouncer.psi_prime(mode, arr) / p


def bernoulli_v(pot: IsospectralPotential, s):
    """v(s) = (I0(s) + lambda) / psi_1(s)^2."""
    arr = _positive(s)
    p = _guarded_psi(pot.mode, arr)
    return (pot.i0(arr) + pot.lam) / (p * p)


def bernoulli_residual(pot: IsospectralPotential, s, relative: bool = True, step: float = 1e-5):
    """Residual of dv/ds - 2 v w_p - 1 = 0 with dv/ds by central differences.

    ``relative=True`` returns the residual divided by v, evaluated as
    d(ln v)/ds - 2 w_p - 1/v. v grows like 1/psi_1^2, so the raw residual
    is dominated by rounding in dv/ds well before s = 10.
    """
    s = float(s)
    wp = witten_superpotential(pot.mode, s)
    if relative:
        def log_v(x):
            p = bouncer.psi(pot.mode, x)
            return math.log(pot.i0(x) + pot.lam) - 2.0 * math.log(abs(p))

        return derivative(log_v, s, 1, step) - 2.0 * wp - 1.0 / bernoulli_v(pot, s)
    v = bernoulli_v(pot, s)
    return derivative(lambda x: bernoulli_v(pot, x), s, 1, step) - 2.0 * v * wp - 1.0


def general_superpotential(pot: IsospectralPotential, s):
    """w_g(s; lambda) = w_p(s) + psi_1^2 / (I0 + lambda)."""
    arr = _positive(s)
    p = bouncer.psi(pot.mode, arr)
    return witten_superpotential(pot.mode, arr) + p * p / (pot.i0(arr) + pot.lam)


def partner_potential(w, s, step: float = 1e-5):
    """w^2 + w' for a superpotential callable ``w`` (w' by central differences)."""
    return w(s) ** 2 + derivative(w, s, 1, step)


def riccati_residual(pot: IsospectralPotential, s, step: float = 1e-5):
    """(w_g^2 + w_g') - (w_p^2 + w_p'): both sides are the same partner potential."""
    wg = partner_potential(lambda x: general_superpotential(pot, x), s, step)
    wp = partner_potential(lambda x: witten_superpotential(pot.mode, x), s, step)
    return wg - wp


def family_potential(pot: IsospectralPotential, s):
    """V(s; lambda) = s - 4 psi psi' / (I0 + lambda) + 2 psi^4 / (I0 + lambda)^2, s >= 0.

    For the exact constants the wall value V(0) = 0 is returned in closed form.
    """
    arr = np.asarray(s, dtype=float)
    if np.any(arr < 0):
        raise ValueError("V(s; lambda) is defined for s >= 0")
    p = bouncer.psi(pot.mode, arr)
    dp = bouncer.psi_prime(pot.mode, arr)
    denom = pot.i0(arr) + pot.lam
    v = arr - 4.0 * p * dp / denom + 2.0 * p ** 4 / denom ** 2
    if pot.mode.convention is Convention.EXACT:
        v = np.where(arr == 0.0, 0.0, v)
    return float(v) if np.ndim(v) == 0 else v


def family_potential_log_form(pot: IsospectralPotential, s: float, step: float = 1e-4) -> float:
    """s - 2 d^2/ds^2 ln(I0 + lambda), second derivative by central differences."""
    s = float(s)

    def log_term(x):
        return math.log(pot.i0(x) + pot.lam)

    return s - 2.0 * derivative(log_term, s, 2, step)


def deformed_ground_state(pot: IsospectralPotential, s):
    """phi_1(s; lambda) = N(lambda) psi_1(s) / (I0(s) + lambda), s >= 0."""
    arr = np.asarray(s, dtype=float)
    if np.any(arr < 0):
        raise ValueError("phi_1 is defined for s >= 0")
    out = pot.norm * bouncer.psi(pot.mode, arr) / (pot.i0(arr) + pot.lam)
    return float(out) if np.ndim(out) == 0 else out


def schrodinger_residual(pot: IsospectralPotential, s: float, step: float = 1e-4) -> float:
    """-phi_1'' + V phi_1 - S_1 phi_1 at ``s`` > 0, phi_1'' by central differences."""
    s = float(s)
    if s <= 0:
        raise ValueError("residual needs s > 0")

    def phi(x):
        return deformed_ground_state(pot, x)

    f = phi(s)
    return -derivative(phi, s, 2, step) + family_potential(pot, s) * f - pot.S * f


def wall_limits(pot: IsospectralPotential) -> dict:
    """Closed-form s -> 0+ behaviour of the superpotential quantities (exact constants).

    psi_1 ~ N Ai'(-a_1) s near the wall, so s w_p -> -1 and
    s^2 v -> lambda / (N Ai'(-a_1))^2.
    """
    slope = bouncer.psi_prime(pot.mode, 0.0)
    return {
        "s_times_w_p": -1.0,
        "s2_times_v": pot.lam / slope ** 2,
        "V": 0.0,
        "phi_1": 0.0,
    }

