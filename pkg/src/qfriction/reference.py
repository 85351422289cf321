"""Brute-force reference evaluation of every force integral.

This is the slow, independent cross-check for the adaptive evaluator in
forces.py.  It deliberately shares nothing with that path except the
response functions themselves:

* polar coordinates (k, phi) over the original integration domain - the
  full k-plane for the kernels stated that way, the half-plane
  k_x > 0 for the two oscillator kernels stated that way - with no
  antisymmetrization of the kernels and no omega/k_y factorization;
* plain dense trapezoid grids in k and phi (both superconvergent here:
  the integrand's derivative vanishes at every grid edge);
* oracle_integrate, the non-adaptive tangent-substitution trapezoid, for
  the omega axis.

So agreement between reference_force and the force operations checks the
half-plane folding, the factorization, the prefactors, and the adaptive
machinery all at once.  Cost is a few seconds per force: with the default
grid the effective point count is n_k * n_phi * n_omega ~ 5e7.
"""

from __future__ import annotations

import math

import numpy as np

from .atom import alpha_imag, line_profile
from .material import delta_imag, surface_resonance
from .forces import Model, Scenario, _require
from .quadrature import PeakedIntegrand, oracle_integrate

_PI2 = math.pi**2

REFERENCE_KINDS = (
    "tla_free", "tla_source", "tla_total", "tla_ground",
    "osc_free", "osc_source", "osc_combined",
)


def _peaks(s: Scenario, u: float):
    hw = 0.5 * s.atom.gamma
    wa = s.atom.omega_a
    return (
        (wa + u, hw), (wa - u, hw), (u - wa, hw), (-wa - u, hw),
        (surface_resonance(s.material), 0.5 * s.material.gamma_big),
    )


def _plan(kind: str, s: Scenario):
    """Prefactor, omega-kernel, phi domain ('full' or 'half'), and step
    restriction for each force, in the original stated form."""
    atom, mat = s.atom, s.material
    g, wa = atom.gamma, atom.omega_a
    if kind == "tla_free":
        _require(s, Model.TLA, kind)
        pref = -(atom.p_upper - atom.p_lower) / _PI2
        fn = lambda w, u: delta_imag(mat, w) * alpha_imag(atom, w - u)
        return pref, fn, "full", False
    if kind == "tla_source":
        _require(s, Model.TLA, kind)
        pref = -atom.d2 / (3.0 * _PI2)
        fn = lambda w, u: delta_imag(mat, w) * (
            line_profile(g, wa + w - u) + line_profile(g, wa - w + u))
        return pref, fn, "full", False
    if kind == "tla_total":
        _require(s, Model.TLA, kind)
        pref = -2.0 * atom.d2 / (3.0 * _PI2)
        p1, p2 = atom.p_lower, atom.p_upper
        fn = lambda w, u: delta_imag(mat, w) * (
            p1 * line_profile(g, wa + w - u) + p2 * line_profile(g, wa - w + u))
        return pref, fn, "full", False
    if kind == "tla_ground":
        _require(s, Model.TLA, kind)
        pref = -2.0 * atom.d2 / (3.0 * _PI2)
        fn = lambda w, u: delta_imag(mat, w) * line_profile(g, wa + w - u)
        return pref, fn, "full", False
    if kind == "osc_free":
        _require(s, Model.OSCILLATOR, kind)
        pref = 1.0 / _PI2
        fn = lambda w, u: delta_imag(mat, w) * alpha_imag(atom, w - u)
        return pref, fn, "full", False
    if kind == "osc_source":
        _require(s, Model.OSCILLATOR, kind)
        pref = 1.0 / _PI2

        def fn(w, u):
            x = w - u
            return delta_imag(mat, w) * (alpha_imag(atom, w + u) - alpha_imag(atom, x) * np.sign(x))

        return pref, fn, "half", False
    if kind == "osc_combined":
        _require(s, Model.OSCILLATOR, kind)
        pref = 2.0 / _PI2
        fn = lambda w, u: delta_imag(mat, w) * alpha_imag(atom, w - u)
        return pref, fn, "half", True
    raise ValueError(f"unknown force kind {kind!r}; choose from {REFERENCE_KINDS}")


def _trapz(y: np.ndarray, h: float) -> float:
    return h * (float(np.sum(y)) - 0.5 * (y[0] + y[-1]))


def reference_force(kind: str, s: Scenario, n_k: int = 120, n_phi: int = 64,
                    n_omega: int = 6000) -> float:
    """Dense-grid value of one force integral; see module docstring.

    The omega truncation (60 reduced units or the furthest declared peak,
    whichever is larger) matches the adaptive path's tail bound of
    ~ 1e-10 relative, far below the grid resolution.
    """
    pref, fn, domain, stepped = _plan(kind, s)
    v, z = s.v, s.z

    def w_integral(u):
        if stepped:
            if u <= 0.0:
                return 0.0
            top = u
        else:
            top = max(60.0, max(c + 41.0 * hw for c, hw in _peaks(s, u)))
        integrand = PeakedIntegrand(
            lambda w: fn(w, u),
            peaks=_peaks(s, u),
            discontinuities=(u,) if (kind == "osc_source" and u > 0) else ())
        return oracle_integrate(integrand, 0.0, top, n_omega)

    phi_top = math.pi if domain == "full" else 0.5 * math.pi
    phis = np.linspace(0.0, phi_top, n_phi)
    cphis = np.cos(phis)
    h_phi = phis[1] - phis[0]

    k_top = 22.0 / z  # exp(-2kz) down to ~ 1e-20
    ks = np.linspace(0.0, k_top, n_k)
    h_k = ks[1] - ks[0]

    fk = np.zeros(n_k)
    for i, k in enumerate(ks):
        if k == 0.0:
            continue
        wvals = np.array([w_integral(k * v * c) for c in cphis])
        fk[i] = k**3 * math.exp(-2.0 * k * z) * 2.0 * _trapz(cphis * wvals, h_phi)
    return pref * _trapz(fk, h_k)
