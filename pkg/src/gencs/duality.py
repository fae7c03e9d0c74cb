"""Gazeau-Klauder states, their duals and temporal stabilization.

A label (J, theta, t, omega) maps to z = sqrt(J) e^{i theta} and the
stabilization parameter alpha = omega t, so that every constructor here is a
thin layer over :func:`gencs.fock.build_state`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .families import Family, dual_family
from .fock import FockExpansion, TruncationPolicy, build_state


@dataclass(frozen=True)
class GKLabel:
    J: float
    theta: float = 0.0
    t: float = 0.0
    omega: float = 1.0

    def __post_init__(self):
        if not self.J >= 0:
            raise ValueError("J must be non-negative")
        if not self.omega > 0:
            raise ValueError("omega must be positive")

    @property
    def z(self) -> complex:
        return math.sqrt(self.J) * complex(math.cos(self.theta), math.sin(self.theta))

    @property
    def alpha(self) -> float:
        return self.omega * self.t

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.J, self.theta, self.t, self.omega)


def _labelled(state: FockExpansion, label: GKLabel) -> FockExpansion:
    return replace(state, gk_label=label.as_tuple())


def generalized_gk_state(family: Family, label: GKLabel,
                         trunc: TruncationPolicy | None = None) -> FockExpansion:
    """c_n ~ J^{n/2} e^{i n theta} e^{-i omega t e_n} / sqrt(rho(n))."""
    z = label.z if label.theta else complex(math.sqrt(label.J), 0.0)
    return _labelled(build_state(family, z, label.alpha, trunc), label)


def gk_state(family: Family, label: GKLabel, trunc: TruncationPolicy | None = None) -> FockExpansion:
    """The (J, gamma) state with gamma = omega t; theta must be 0."""
    if label.theta != 0:
        raise ValueError("gk_state takes theta = 0; use generalized_gk_state otherwise")
    return generalized_gk_state(family, label, trunc)


def dual_gk_state(family: Family, z: complex, alpha: float,
                  trunc: TruncationPolicy | None = None) -> FockExpansion:
    """c_n ~ z^n e^{-i alpha eps_n} / sqrt(mu(n)), mu(n) = (n!)^2 / rho(n)."""
    return build_state(dual_family(family), z, alpha, trunc)


def dual_generalized_gk_state(family: Family, label: GKLabel,
                              trunc: TruncationPolicy | None = None) -> FockExpansion:
    return generalized_gk_state(dual_family(family), label, trunc)


def stabilize(state: FockExpansion, alpha: float) -> FockExpansion:
    """Multiply c_n by exp(-i alpha e_n); phases add across repeated calls."""
    if alpha == 0:
        return state
    e = state.family.energy_table(state.truncation_N)
    coeffs = state.coefficients * np.exp(-1j * alpha * e)
    old = state.stabilization_alpha or 0.0
    gk = state.gk_label
    if gk is not None:
        J, theta, t, omega = gk
        gk = (J, theta, t + alpha / omega, omega)
    return replace(state, coefficients=coeffs, stabilization_alpha=old + alpha, gk_label=gk)


def dual_weight_from_spectrum(family: Family, n_max: int) -> np.ndarray:
    """log mu(n) as the running product eps_1 ... eps_n of the dual spectrum."""
    e = family.energy_table(n_max)
    ns = np.arange(1, n_max + 1, dtype=float)
    log_eps = 2.0 * np.log(ns) - np.log(e[1:])
    return np.concatenate([[0.0], np.cumsum(log_eps)])
