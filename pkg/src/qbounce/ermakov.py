"""Classical Ermakov-Lewis machinery for the bouncer.

The Schroedinger equation psi'' = (s - S) psi is read as Hamilton's
equations of H = p^2/2 - (s - S) q^2/2 with s as time. The Pinney function
is built from the ground-state Airy pair u = Ai(s - S), v = Bi(s - S) as

    rho^2 = A u^2 + 2 B u v + C v^2,   (A, B, C) = (N^2, N^2, 2 N^2)

and solves rho'' - (s - S) rho = h^2 / rho^3 with h^2 = (AC - B^2) W^2,
W = 1/pi the Airy Wronskian. For the constants used here h^2 = N^4/pi^2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import airy
from .bouncer import Convention, Eigenmode, eigenmode
from .numerics import cumulative_integral, derivative

__all__ = [
    "PinneyFunction",
    "EpsilonTriplet",
    "AngleBreakdown",
    "ClassicalState",
    "HamiltonianValue",
    "pinney",
    "eliezer_gray_h_squared",
    "mp_residual",
    "epsilon_triplet",
    "epsilon_rates",
    "epsilon_system_residual",
    "lewis_invariant",
    "invariant_constant",
    "paper_unit_drift",
    "angle_rate",
    "lewis_angles",
    "lewis_angle_series",
    "hamiltonian_value",
    "poisson_bracket",
    "structure_constants",
    "hamiltonian_coefficients",
]


def eliezer_gray_h_squared(A: float, B: float, C: float, wronskian: float = airy.WRONSKIAN) -> float:
    """Strength h^2 for which A u^2 + 2B uv + C v^2 = rho^2 solves the Pinney equation."""
    return (A * C - B * B) * wronskian ** 2


@dataclass(frozen=True)
class PinneyFunction:
    """rho(s) = sqrt(A u^2 + 2B uv + C v^2) with u, v = Ai, Bi at s - S."""

    S: float
    N: float
    h_squared: float
    A: float
    B: float
    C: float
    convention: Optional[Convention] = None

    def _airy(self, s):
        return airy.airy_eval(np.asarray(s, dtype=float) - self.S)

    def _forms(self, s):
        v = self._airy(s)
        u, up, w, wp = v.ai, v.ai_prime, v.bi, v.bi_prime
        R = self.A * u * u + 2.0 * self.B * u * w + self.C * w * w
        Q = self.A * u * up + self.B * (up * w + u * wp) + self.C * w * wp
        return R, Q, u * wp - up * w

    def rho(self, s):
        return np.sqrt(self._forms(s)[0])

    def rho_prime(self, s):
        R, Q, _ = self._forms(s)
        return Q / np.sqrt(R)

    def rho_double_prime(self, s):
        # Differentiating rho' = Q/rho with u'' = x u, v'' = x v gives
        # rho'' = x rho + (P R - Q^2) / rho^3, and P R - Q^2 = (AC - B^2) W^2
        # (Lagrange identity), W taken from the computed Airy values.
        R, _, W = self._forms(s)
        x = np.asarray(s, dtype=float) - self.S
        rho = np.sqrt(R)
        return x * rho + (self.A * self.C - self.B * self.B) * W * W / (rho * R)

    def __call__(self, s):
        return self.rho(s)

    def derivatives(self, s):
        """(rho, rho', rho'') at ``s``."""
        R, Q, W = self._forms(s)
        x = np.asarray(s, dtype=float) - self.S
        rho = np.sqrt(R)
        rpp = x * rho + (self.A * self.C - self.B * self.B) * W * W / (rho * R)
        return rho, Q / rho, rpp


def pinney(convention="paper") -> PinneyFunction:
    """Pinney function of the ground state for the given constants."""
    mode = eigenmode(1, convention)
    n2 = mode.N ** 2
    A, B, C = n2, n2, 2.0 * n2
    return PinneyFunction(
        mode.S, mode.N, eliezer_gray_h_squared(A, B, C), A, B, C, mode.convention
    )


def mp_residual(pf: PinneyFunction, s, h_squared_test: Optional[float] = None):
    """rho'' - (s - S) rho - h_test / rho^3 (default h_test = pf.h_squared)."""
    h2 = pf.h_squared if h_squared_test is None else h_squared_test
    rho, _, rpp = pf.derivatives(s)
    x = np.asarray(s, dtype=float) - pf.S
    return rpp - x * rho - h2 / rho ** 3


@dataclass(frozen=True)
class EpsilonTriplet:
    eps1: float
    eps2: float
    eps3: float

    @property
    def first_integral(self):
        """eps1 eps3 - eps2^2, which equals h^2 along a Pinney solution."""
        return self.eps1 * self.eps3 - self.eps2 ** 2


def epsilon_triplet(pf: PinneyFunction, s, h_squared_test: Optional[float] = None) -> EpsilonTriplet:
    h2 = pf.h_squared if h_squared_test is None else h_squared_test
    rho, rp, _ = pf.derivatives(s)
    return EpsilonTriplet(rho * rho, -rho * rp, rp * rp + h2 / (rho * rho))


# Quadratic phase-space forms are stored as (a, b, c) for a p^2 + b pq + c q^2.
_T_FORMS = np.array([[0.5, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.5]])


def poisson_bracket(f, g):
    """{f, g} = f_q g_p - f_p g_q for quadratic forms given as (a, b, c)."""
    a1, b1, c1 = f
    a2, b2, c2 = g
    return np.array([2.0 * (a2 * b1 - a1 * b2), 4.0 * (a2 * c1 - a1 * c2), 2.0 * (b2 * c1 - b1 * c2)])


def structure_constants() -> np.ndarray:
    """C[r, n, m] with {T_n, T_m} = sum_r C[r, n, m] T_r for T = (p^2/2, pq, q^2/2)."""
    C = np.zeros((3, 3, 3))
    for n in range(3):
        for m in range(3):
            a, b, c = poisson_bracket(_T_FORMS[n], _T_FORMS[m])
            C[:, n, m] = (2.0 * a, b, 2.0 * c)
    return C


_STRUCTURE = structure_constants()


def hamiltonian_coefficients(s, S: float) -> np.ndarray:
    """h_m(s) in H = sum_m h_m T_m, i.e. (1, 0, -(s - S))."""
    return np.array([1.0, 0.0, -(s - S)])


def epsilon_rates(eps, s, S: float) -> np.ndarray:
    """Right-hand sides d(eps_r)/ds = -sum_{n,m} C[r,n,m] h_m eps_n."""
    h = hamiltonian_coefficients(s, S)
    return -np.einsum("rnm,m,n->r", _STRUCTURE, h, np.asarray(eps, dtype=float))


def epsilon_system_residual(
    pf: PinneyFunction,
    s: float,
    h_squared_test: Optional[float] = None,
    step: float = 1e-5,
    scaled: bool = False,
):
    """Residuals (rhs_r - d eps_r/ds) of the epsilon system at ``s``.

    Derivatives are central differences of the triplet built from ``pf``.
    With ``scaled=True`` each residual is divided by the summed magnitude
    of the terms of its equation, which is what remains meaningful once
    rho grows like Bi.
    """
    s = float(s)

    def triplet(x):
        t = epsilon_triplet(pf, x, h_squared_test)
        return np.array([t.eps1, t.eps2, t.eps3])

    eps = triplet(s)
    slope = derivative(triplet, s, order=1, step=step)
    rhs = epsilon_rates(eps, s, pf.S)
    res = rhs - slope
    if not scaled:
        return tuple(float(r) for r in res)
    terms = np.abs(np.einsum("rnm,m,n->rn", _STRUCTURE, hamiltonian_coefficients(s, pf.S), eps))
    scale = np.abs(slope) + terms.sum(axis=1)
    return tuple(float(r / m) if m > 0 else float(r) for r, m in zip(res, scale))


def lewis_invariant(pf: PinneyFunction, mode: Eigenmode, s, h_squared_test: Optional[float] = None):
    """1/2 (rho psi' - rho' psi)^2 + 1/2 h_test (psi/rho)^2.

    ``h_squared_test = 1`` is the unit-strength form; the default
    ``pf.h_squared`` is the value for which the expression is conserved.
    """
    if mode.convention is not pf.convention or mode.S != pf.S:
        raise ValueError("mode and Pinney function must use the same constants")
    h2 = pf.h_squared if h_squared_test is None else h_squared_test
    v = airy.airy_eval(np.asarray(s, dtype=float) - mode.S)
    psi = mode.N * v.ai
    dpsi = mode.N * v.ai_prime
    rho, rp, _ = pf.derivatives(s)
    return 0.5 * (rho * dpsi - rp * psi) ** 2 + 0.5 * h2 * (psi / rho) ** 2


def invariant_constant(pf: PinneyFunction, mode: Eigenmode) -> float:
    """Closed-form value 1/2 N_psi^2 W^2 C of the conserved invariant."""
    return 0.5 * mode.N ** 2 * airy.WRONSKIAN ** 2 * pf.C


@dataclass(frozen=True)
class AngleBreakdown:
    T: float
    dynamical: float
    geometric: float
    total: float


def lewis_angle_series(pf: PinneyFunction, T, tol: float = 1e-12) -> list:
    """Dynamical, geometric and total angles for every upper limit in ``T``.

    The total-derivative term d(rho rho')/ds is applied as the boundary
    value [rho rho']_0^T; the remaining integrands 1/rho^2 and rho'^2 are
    integrated panel-by-panel between the sorted limits.
    """
    limits = np.atleast_1d(np.asarray(T, dtype=float))
    if np.any(limits < 0) or not np.all(np.isfinite(limits)):
        raise ValueError("upper limits must be finite and >= 0")
    order = np.argsort(limits, kind="stable")
    edges = np.concatenate([[0.0], limits[order]])

    def inv_rho2(s):
        return 1.0 / pf.rho(s) ** 2

    def rho_prime2(s):
        return pf.rho_prime(s) ** 2

    total = cumulative_integral(inv_rho2, edges, abs_tol=tol, rel_tol=tol)[1:]
    kinetic = cumulative_integral(rho_prime2, edges, abs_tol=tol, rel_tol=tol)[1:]
    rho0, rp0, _ = pf.derivatives(0.0)
    rho_t, rp_t, _ = pf.derivatives(limits[order])
    boundary = rho_t * rp_t - rho0 * rp0
    out = [None] * limits.size
    for j, idx in enumerate(order):
        if limits[idx] == 0.0:
            out[idx] = AngleBreakdown(0.0, 0.0, 0.0, 0.0)
            continue
        dyn = total[j] + kinetic[j] - 0.5 * boundary[j]
        geo = 0.5 * boundary[j] - kinetic[j]
        out[idx] = AngleBreakdown(float(limits[idx]), float(dyn), float(geo), float(total[j]))
    return out


def lewis_angles(pf: PinneyFunction, T: float, tol: float = 1e-12) -> AngleBreakdown:
    return lewis_angle_series(pf, [T], tol)[0]


@dataclass(frozen=True)
class ClassicalState:
    q: float
    p: float
    s: float


@dataclass(frozen=True)
class HamiltonianValue:
    H: float
    T1: float
    T2: float
    T3: float


def hamiltonian_value(state: ClassicalState, S: float) -> HamiltonianValue:
    """H = T1 - (s - S) T3 with T1 = p^2/2, T2 = pq, T3 = q^2/2."""
    t1 = 0.5 * state.p ** 2
    t2 = state.p * state.q
    t3 = 0.5 * state.q ** 2
    return HamiltonianValue(t1 - (state.s - S) * t3, t1, t2, t3)


def paper_unit_drift(pf: PinneyFunction, mode: Eigenmode, grid) -> dict:
    """Summary of the unit-strength invariant on ``grid`` (mean, spread, range)."""
    values = np.asarray(lewis_invariant(pf, mode, grid, h_squared_test=1.0))
    return {
        "mean": float(values.mean()),
        "min": float(values.min()),
        "max": float(values.max()),
        "relative_spread": float((values.max() - values.min()) / abs(values.mean())),
        "claimed": 0.5,
    }


def angle_rate(pf: PinneyFunction, T) -> float:
    """d(total angle)/dT = 1/rho(T)^2."""
    return 1.0 / pf.rho(T) ** 2

