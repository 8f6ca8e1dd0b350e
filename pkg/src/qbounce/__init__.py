"""Quantum bouncer in a gravitational field: Airy eigenmodes, the
Ermakov-Lewis invariant with its Lewis angles, and the strictly isospectral
supersymmetric family V(s; lambda)."""

from .airy import AiryValues, AiryZero, airy_eval, airy_zero
from .bouncer import Convention, Eigenmode, eigenmode, psi, psi_prime
from .ermakov import PinneyFunction, lewis_angles, lewis_invariant, pinney
from .series import SampledSeries
from .spectra import SpectralComparison, compare_spectra
from .susy import IsospectralPotential, family_potential, isospectral_potential

__version__ = "0.1.0"

__all__ = [
    "AiryValues",
    "AiryZero",
    "airy_eval",
    "airy_zero",
    "Convention",
    "Eigenmode",
    "eigenmode",
    "psi",
    "psi_prime",
    "PinneyFunction",
    "pinney",
    "lewis_invariant",
    "lewis_angles",
    "IsospectralPotential",
    "isospectral_potential",
    "family_potential",
    "SampledSeries",
    "SpectralComparison",
    "compare_spectra",
]
