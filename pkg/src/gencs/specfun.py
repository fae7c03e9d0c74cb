"""Real special functions used by the coherent-state families.

Gamma ratios go through :func:`log_gamma` so that weights for large ``n`` never
overflow before the final exponentiation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quadrature import integrate, integrate_semi_infinite

SERIES_TOL = 1e-15
SERIES_MAX_TERMS = 100_000


class DomainError(ValueError):
    """Argument outside the domain of a special function."""


class DivergenceError(ArithmeticError):
    """A series or integral that does not converge for the given arguments."""


@dataclass(frozen=True)
class EvalResult:
    """Value of a series or quadrature evaluation.

    When ``log_scale`` is set the true value is ``value * exp(log_scale)``.
    """

    value: float | complex
    log_scale: float | None
    terms_used: int
    converged: bool

    @property
    def full(self) -> float | complex:
        if self.log_scale is None:
            return self.value
        return self.value * math.exp(self.log_scale)

    def _rescaled(self) -> "EvalResult":
        if self.log_scale is None or abs(self.log_scale) > 700 or self.value == 0:
            return self
        return EvalResult(self.value * math.exp(self.log_scale), None, self.terms_used,
                          self.converged)

    @property
    def log_abs(self) -> float:
        return math.log(abs(self.value)) + (self.log_scale or 0.0)


def log_gamma(x: float) -> float:
    """Natural log of the Gamma function for ``x > 0``."""
    if not x > 0:
        raise DomainError(f"log_gamma requires x > 0, got {x!r}")
    return math.lgamma(x)


def log_factorial(n: int) -> float:
    return math.lgamma(n + 1.0)


def _pole_check(gamma: float, n: int) -> None:
    if gamma <= 0 and float(gamma).is_integer() and -gamma < n:
        raise DomainError(f"pochhammer({gamma}, {n}) hits a pole of the Gamma ratio")


def pochhammer(gamma: float, n: int) -> float:
    """Rising factorial ``(gamma)_n = gamma (gamma+1) ... (gamma+n-1)``."""
    if n < 0:
        raise DomainError("pochhammer requires n >= 0")
    _pole_check(gamma, n)
    if n <= 64:
        out = 1.0
        for k in range(n):
            out *= gamma + k
        return out
    sign, mag = log_pochhammer(gamma, n)
    return sign * math.exp(mag)


def log_pochhammer(gamma: float, n: int) -> tuple[float, float]:
    """Return ``(sign, log|(gamma)_n|)``."""
    if n < 0:
        raise DomainError("pochhammer requires n >= 0")
    if n == 0:
        return 1.0, 0.0
    if gamma > 0:
        return 1.0, math.lgamma(gamma + n) - math.lgamma(gamma)
    sign, mag = 1.0, 0.0
    for k in range(n):
        v = gamma + k
        if v == 0:
            raise DomainError(f"pochhammer({gamma}, {n}) hits a pole of the Gamma ratio")
        if v < 0:
            sign = -sign
        mag += math.log(abs(v))
    return sign, mag


def generalized_hypergeometric(alphas, betas, x, tol: float = SERIES_TOL,
                               max_terms: int = SERIES_MAX_TERMS) -> EvalResult:
    """Partial sum of pFq(alphas; betas; x).

    Stops when two consecutive terms fall below ``tol * |sum|``.  Large sums
    are carried as a mantissa with a running log scale.
    """
    alphas = [float(a) for a in alphas]
    betas = [float(b) for b in betas]
    p, q = len(alphas), len(betas)
    if p > q + 1:
        raise DomainError(f"{p}F{q} with p > q+1 diverges for every x != 0")
    if p == q + 1 and abs(x) >= 1:
        raise DivergenceError(f"{p}F{q} requires |x| < 1, got {x!r}")
    for b in betas:
        if b <= 0 and b.is_integer():
            raise DomainError(f"beta parameter {b} is a non-positive integer")

    # negative arguments alternate and cancel; reflect where an identity exists
    if isinstance(x, (int, float)) and x < 0 and p == q and p <= 1:
        if p == 0:
            inner = generalized_hypergeometric([], [], -x, tol, max_terms)
            return EvalResult(1.0 / inner.value, None if inner.log_scale is None else -inner.log_scale,
                              inner.terms_used, inner.converged)
        # Kummer: 1F1(a; b; x) = e^x 1F1(b - a; b; -x)
        inner = generalized_hypergeometric([betas[0] - alphas[0]], betas, -x, tol, max_terms)
        return EvalResult(inner.value, x + (inner.log_scale or 0.0), inner.terms_used,
                          inner.converged)._rescaled()

    total = 1.0 + 0.0 * x
    term = 1.0 + 0.0 * x
    log_scale = 0.0
    small = 0
    n = 0
    for n in range(max_terms):
        num = 1.0
        for a in alphas:
            num *= a + n
        den = float(n + 1)
        for b in betas:
            den *= b + n
        term = term * num / den * x
        total = total + term
        if abs(term) < tol * abs(total):
            small += 1
            if small >= 2:
                break
        else:
            small = 0
        if term == 0 and any(a + n == 0 for a in alphas):
            # terminating series
            small = 2
            break
        if abs(total) > 1e8:
            total /= 1e8
            term /= 1e8
            log_scale += math.log(1e8)
    converged = small >= 2
    if log_scale == 0.0:
        return EvalResult(total, None, n + 1, converged)
    return EvalResult(total, log_scale, n + 1, converged)


def _log_tricomi_integrand(a: float, b: float, z: float):
    c = b - a - 1.0

    def log_h(t):
        return -z * t + (a - 1.0) * np.log(t) + c * np.log1p(t)

    return log_h


def log_tricomi_u(a: float, b: float, z: float, rtol: float = 1e-12) -> float:
    """``ln U(a, b, z)`` from the integral representation (a > 0, z > 0)."""
    if not a > 0:
        raise DomainError(f"tricomi_u requires a > 0, got {a!r}")
    if not z > 0:
        raise DomainError(f"tricomi_u requires z > 0, got {z!r}")
    c = b - a - 1.0
    if a >= 1.0:
        # peak of t^(a-1) (1+t)^c e^(-zt)
        qb = z + 2.0 - b
        disc = qb * qb + 4.0 * z * (a - 1.0)
        t_peak = (-qb + math.sqrt(disc)) / (2.0 * z) if a > 1.0 else 0.0
        t_peak = max(t_peak, 0.0)
        if t_peak > 0:
            log_peak = -z * t_peak + (a - 1.0) * math.log(t_peak) + c * math.log1p(t_peak)
            curv = (a - 1.0) / t_peak**2 - c / (1.0 + t_peak) ** 2
            width = 1.0 / math.sqrt(curv) if curv > 0 else 1.0
        else:
            log_peak = 0.0
            width = 1.0 / z
        log_h = _log_tricomi_integrand(a, b, z)

        def g(t):
            t = np.asarray(t, dtype=float)
            with np.errstate(divide="ignore", invalid="ignore", over="ignore", under="ignore"):
                v = np.exp(log_h(t) - log_peak)
            return np.where(t > 0, v, 0.0 if a > 1.0 else 1.0)

        if t_peak > 0:
            left, ok1, _ = integrate(g, 0.0, t_peak, rtol=rtol)
            right, ok2, _ = integrate_semi_infinite(g, t_peak, scale=max(width, 1e-3 * t_peak),
                                                    rtol=rtol)
            total = left + right
        else:
            total, ok1, _ = integrate_semi_infinite(g, 0.0, scale=min(width, 1.0 / z), rtol=rtol)
        return math.log(total) + log_peak - math.lgamma(a)

    # 0 < a < 1: substitute t = s**(1/a) to remove the endpoint singularity
    inv = 1.0 / a

    def g_small(s):
        s = np.asarray(s, dtype=float)
        t = s**inv
        with np.errstate(over="ignore", under="ignore"):
            return np.exp(-z * t + c * np.log1p(t))

    total, _, _ = integrate_semi_infinite(g_small, 0.0, scale=max(z**-a, 1e-3), rtol=rtol)
    return math.log(total * inv) - math.lgamma(a)


def tricomi_u(a: float, b: float, z: float) -> float:
    """Tricomi confluent hypergeometric function U(a, b, z) for a > 0, z > 0."""
    return math.exp(log_tricomi_u(a, b, z))


def modified_bessel_i(nu: float, x: float) -> float:
    """I_nu(x) by its ascending series."""
    if nu < 0 or x < 0:
        raise DomainError("modified_bessel_i requires nu >= 0 and x >= 0")
    if x == 0:
        return 1.0 if nu == 0 else 0.0
    half = 0.5 * x
    q = half * half
    term = math.exp(nu * math.log(half) - math.lgamma(nu + 1.0))
    total = term
    small = 0
    for k in range(1, SERIES_MAX_TERMS):
        term *= q / (k * (k + nu))
        total += term
        if term < SERIES_TOL * total:
            small += 1
            if small >= 2:
                break
        else:
            small = 0
    return total


def laguerre(m: int, x: float) -> float:
    """Laguerre polynomial L_m(x) via the three-term recurrence."""
    if m < 0:
        raise DomainError("laguerre requires m >= 0")
    prev, cur = 1.0, 1.0 - x
    if m == 0:
        return prev
    for k in range(1, m):
        prev, cur = cur, ((2 * k + 1 - x) * cur - k * prev) / (k + 1)
    return cur
