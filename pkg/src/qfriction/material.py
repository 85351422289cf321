"""Dielectric response of the surface.

The half-space is a single-resonance Drude-Lorentz dielectric,

    eps(w) = 1 + omega_p**2 / (omega_0**2 - w**2 - i*w*gamma_big),

and the quantity the force integrals actually consume is the evanescent-wave
reflection response Delta(w) = (eps(w) - 1)/(eps(w) + 1).  Its imaginary part
Delta_I is the surface absorption spectrum: a single resonance at
w_res = sqrt(omega_0**2 + omega_p**2/2) of half-width gamma_big/2, odd in w,
positive for w > 0, and linear in w as w -> 0+ whenever omega_0 > 0.  That
low-frequency linearity is what the cubic velocity law of the oscillator
model rides on, so it gets its own accessor and tests.

Frequencies are in reduced units (the atomic transition frequency is the
scale).  Complex values are returned as plain complex numbers; all functions
accept scalars or numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class PoleError(ArithmeticError):
    """eps(w) = -1 exactly, so (eps-1)/(eps+1) has no value."""


@dataclass(frozen=True)
class MaterialParams:
    """Drude-Lorentz half-space parameters, frequencies in reduced units."""

    omega_p: float = 1.0  # plasma frequency, > 0
    omega_0: float = 1.0  # bound-charge resonance, >= 0 (0 recovers a Drude metal)
    gamma_big: float = 0.1  # absorption width, > 0

    def __post_init__(self):
        if not (math.isfinite(self.omega_p) and self.omega_p > 0):
            raise ValueError(f"omega_p must be positive and finite, got {self.omega_p}")
        if not (math.isfinite(self.omega_0) and self.omega_0 >= 0):
            raise ValueError(f"omega_0 must be >= 0 and finite, got {self.omega_0}")
        if not (math.isfinite(self.gamma_big) and self.gamma_big > 0):
            raise ValueError(f"gamma_big must be positive and finite, got {self.gamma_big}")


def permittivity(p: MaterialParams, omega):
    """eps(w) for real w.  Crossing symmetry eps(-w) = conj(eps(w)) holds by
    construction since the denominator conjugates under w -> -w."""
    w = np.asarray(omega, dtype=float)
    den = p.omega_0**2 - w**2 - 1j * w * p.gamma_big
    eps = 1.0 + p.omega_p**2 / den
    return complex(eps) if np.isscalar(omega) else eps


def surface_response(p: MaterialParams, omega):
    """Delta(w) = (eps - 1)/(eps + 1).

    The denominator eps + 1 cannot vanish for real w while gamma_big > 0
    (its imaginary part is nonzero wherever the real part could cross -1),
    but the pole is guarded anyway.
    """
    eps = permittivity(p, omega)
    den = np.asarray(eps) + 1.0
    if np.any(den == 0):
        raise PoleError("eps(omega) = -1: surface response pole")
    out = (np.asarray(eps) - 1.0) / den
    return complex(out) if np.isscalar(omega) else out


def delta_imag(p: MaterialParams, omega):
    """Im Delta(w), evaluated in closed form.

    Substituting eps into (eps-1)/(eps+1) gives
    Delta(w) = omega_p**2 / (2*omega_0**2 + omega_p**2 - 2*w**2 - 2i*w*gamma_big),
    so
    Delta_I(w) = 2*omega_p**2*gamma_big*w
                 / ((2*omega_0**2 + omega_p**2 - 2*w**2)**2 + 4*gamma_big**2*w**2).

    Odd in w, positive for w > 0, and ~ w * 2*omega_p**2*gamma_big /
    (2*omega_0**2 + omega_p**2)**2 as w -> 0.
    """
    w = np.asarray(omega, dtype=float)
    a = 2.0 * p.omega_0**2 + p.omega_p**2 - 2.0 * w**2
    b = 2.0 * p.gamma_big * w
    out = p.omega_p**2 * b / (a * a + b * b)
    return float(out) if np.isscalar(omega) else out


def surface_resonance(p: MaterialParams) -> float:
    """Center of the Delta_I peak: sqrt(omega_0**2 + omega_p**2/2).  Its
    half-width is gamma_big/2; both feed the quadrature peak annotations."""
    return math.sqrt(p.omega_0**2 + 0.5 * p.omega_p**2)
