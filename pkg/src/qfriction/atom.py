"""Two-level atom: polarizability spectrum and state bookkeeping.

The absorptive part of the isotropic polarizability is a difference of two
Lorentzian lines of half-width gamma/2 placed at +/- the transition
frequency,

    alpha_I(w) = (d2/3) * [ L(w - omega_a) - L(w + omega_a) ],
    L(x) = (gamma/2) / (x**2 + gamma**2/4),

which is odd in w and positive for w > 0.  hbar is absorbed into the
reduced units, d2 is the squared dipole moment |d|^2 (kept as a plain
number; forces are reported in units of |d|^2 over the fourth power of the
reference distance).

The level populations p_lower/p_upper enter the force kernels through the
inversion <sigma_z> = p_upper - p_lower.  The linear-oscillator comparison
model corresponds to pinning <sigma_z> at -1 regardless of state.

gamma is meant to be a near-field (distance-dependent) spontaneous decay
rate; gamma_at_distance applies the cube-law rescaling between distances.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class AtomParams:
    """Two-level atom in reduced units.  Defaults: ground state, d2 = 3 so
    that alpha_I carries unit line strength, narrow line gamma = 1e-4."""

    d2: float = 3.0  # |d|^2, > 0
    omega_a: float = 1.0  # transition frequency, > 0 (the frequency unit)
    gamma: float = 1e-4  # linewidth, 0 < gamma < omega_a
    p_lower: float = 1.0
    p_upper: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.d2) and self.d2 > 0):
            raise ValueError(f"d2 must be positive and finite, got {self.d2}")
        if not (math.isfinite(self.omega_a) and self.omega_a > 0):
            raise ValueError(f"omega_a must be positive and finite, got {self.omega_a}")
        if not (math.isfinite(self.gamma) and 0 < self.gamma < self.omega_a):
            raise ValueError(
                f"gamma must satisfy 0 < gamma < omega_a, got gamma={self.gamma}"
            )
        if self.gamma > 0.1 * self.omega_a:
            # the Lorentzian-line treatment assumes a narrow resonance
            warnings.warn(
                f"gamma = {self.gamma} is not small against omega_a = {self.omega_a};"
                " the narrow-line model is dubious here",
                stacklevel=2,
            )
        if self.p_lower < 0 or self.p_upper < 0:
            raise ValueError("populations must be nonnegative")
        if abs(self.p_lower + self.p_upper - 1.0) > 1e-12:
            raise ValueError(
                f"populations must sum to 1, got {self.p_lower} + {self.p_upper}"
            )


def line_profile(gamma: float, x):
    """Lorentzian line L(x) = (gamma/2) / (x**2 + gamma**2/4), unit area."""
    hw = 0.5 * gamma
    return hw / (np.asarray(x, dtype=float) ** 2 + hw * hw)


def alpha_imag(p: AtomParams, omega):
    """Im alpha(w) as the odd Lorentzian-line difference above."""
    w = np.asarray(omega, dtype=float)
    out = (p.d2 / 3.0) * (line_profile(p.gamma, w - p.omega_a) - line_profile(p.gamma, w + p.omega_a))
    return float(out) if np.isscalar(omega) else out


def sigma_z(p: AtomParams) -> float:
    """Inversion <sigma_z> = p_upper - p_lower; -1 for the ground state."""
    return p.p_upper - p.p_lower


def gamma_at_distance(gamma_ref: float, z_ref: float, z: float) -> float:
    """Rescale a near-field decay rate between atom-surface distances.

    The nonretarded rate scales as the inverse cube of distance, so
    gamma(z) = gamma_ref * (z_ref / z)**3 with gamma_ref quoted at z_ref.
    """
    if not (math.isfinite(gamma_ref) and gamma_ref > 0):
        raise ValueError(f"gamma_ref must be positive, got {gamma_ref}")
    if not (math.isfinite(z_ref) and z_ref > 0):
        raise ValueError(f"z_ref must be positive, got {z_ref}")
    if not (math.isfinite(z) and z > 0):
        raise ValueError(f"z must be positive, got {z}")
    return gamma_ref * (z_ref / z) ** 3
