"""Finite-difference check that V(s; lambda) and the bouncer share a spectrum.

-d^2/ds^2 + V(s) on (0, L) with Dirichlet walls at both ends is discretized
by the three-point stencil on ``points`` interior nodes s_i = i L/(points+1).
The wall at L is artificial; ``compare_spectra`` checks that the wanted
levels do not feel it.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from . import airy
from .numerics import TridiagonalSystem, eigenvalues_tridiagonal, sturm_count
from .susy import family_potential, isospectral_potential

__all__ = [
    "SpectralComparison",
    "discretize",
    "compare_spectra",
    "bouncer_potential",
    "level_count_below",
    "richardson_ratio",
    "BOX_TOLERANCE",
]

BOX_TOLERANCE = 1e-12


def bouncer_potential(s):
    return np.asarray(s, dtype=float)


def discretize(potential: Callable, L: float, points: int) -> TridiagonalSystem:
    if not (math.isfinite(L) and L > 0):
        raise ValueError(f"box size L must be positive, got {L!r}")
    if isinstance(points, bool) or not isinstance(points, (int, np.integer)) or points < 10:
        raise ValueError(f"need at least 10 interior points, got {points!r}")
    step = L / (points + 1)
    nodes = step * np.arange(1, points + 1)
    values = np.asarray(potential(nodes), dtype=float)
    if values.shape != nodes.shape:
        values = np.broadcast_to(values, nodes.shape).astype(float)
    bad = ~np.isfinite(values)
    if bad.any():
        i = int(np.argmax(bad))
        raise ValueError(f"potential is not finite at node {i + 1} (s={nodes[i]!r})")
    inv = 1.0 / (step * step)
    return TridiagonalSystem(2.0 * inv + values, np.full(points - 1, -inv))


@dataclass(frozen=True)
class SpectralComparison:
    lam: float
    L: float
    points: int
    k: int
    eigenvalues_qbb: np.ndarray
    eigenvalues_lambda: np.ndarray
    airy_reference: np.ndarray

    @property
    def max_pairwise_gap(self) -> float:
        return float(np.max(np.abs(self.eigenvalues_qbb - self.eigenvalues_lambda)))

    @property
    def max_reference_gap(self) -> float:
        return float(np.max(np.abs(self.eigenvalues_qbb - self.airy_reference)))

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("eigenvalues_qbb", "eigenvalues_lambda", "airy_reference"):
            d[key] = [float(v) for v in d[key]]
        d["max_pairwise_gap"] = self.max_pairwise_gap
        d["max_reference_gap"] = self.max_reference_gap
        return d


def _check_box(L: float, k: int):
    a_k = airy.airy_zero(k).a_n
    x = L - a_k
    if x >= airy.AIRY_MAX:
        return
    if x <= 0 or abs(airy.airy_eval(x).ai) >= BOX_TOLERANCE:
        raise ValueError(
            f"box L={L} is too small for {k} levels: Ai(L - a_{k}) must be below "
            f"{BOX_TOLERANCE:g}; increase L"
        )


def compare_spectra(lam: float, L: float = 40.0, points: int = 4000, k: int = 6) -> SpectralComparison:
    """Lowest ``k`` levels of the bouncer and of V(s; lam) in the same box."""
    if not (math.isfinite(lam) and lam > 0):
        raise ValueError(f"lambda must be positive, got {lam!r}")
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or not 1 <= k <= 10:
        raise ValueError(f"k must be an integer in [1, 10], got {k!r}")
    _check_box(L, k)
    pot = isospectral_potential(lam, "exact")
    qbb = eigenvalues_tridiagonal(discretize(bouncer_potential, L, points), k)
    deformed = eigenvalues_tridiagonal(discretize(lambda s: family_potential(pot, s), L, points), k)
    reference = np.array([airy.airy_zero(n).a_n for n in range(1, k + 1)])
    return SpectralComparison(float(lam), float(L), int(points), int(k), qbb, deformed, reference)


def level_count_below(energy: float, L: float, points: int, potential: Callable = bouncer_potential) -> int:
    """Number of discrete levels below ``energy`` (Sturm count)."""
    return sturm_count(discretize(potential, L, points), energy)


def richardson_ratio(L: float = 40.0, points: int = 1999) -> float:
    """|E_1(h) - a_1| / |E_1(h/2) - a_1| for the bouncer; about 4 for a second-order stencil."""
    a1 = airy.airy_zero(1).a_n
    coarse = eigenvalues_tridiagonal(discretize(bouncer_potential, L, points), 1)[0]
    fine = eigenvalues_tridiagonal(discretize(bouncer_potential, L, 2 * points + 1), 1)[0]
    return abs(coarse - a1) / abs(fine - a1)
