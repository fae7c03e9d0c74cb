"""Composite Gauss-Legendre quadrature with dyadic panel refinement.

Both routines return ``(value, converged, panels)``.  Integrands must accept
numpy arrays.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

_ORDER = 20


@lru_cache(maxsize=8)
def _nodes(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def _composite(f, a: float, b: float, panels: int, order: int) -> float:
    x, w = _nodes(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    pts = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    vals = np.asarray(f(pts)).reshape(panels, order)
    return float(np.sum(half[:, None] * w[None, :] * vals))


def integrate(f, a: float, b: float, rtol: float = 1e-10, atol: float = 0.0,
              max_level: int = 14, order: int = _ORDER):
    """Integrate ``f`` over ``[a, b]``.

    The panel count doubles until two successive composite sums agree to
    ``rtol`` (relative) or ``atol`` (absolute).
    """
    prev = _composite(f, a, b, 1, order)
    panels = 1
    for _ in range(max_level):
        panels *= 2
        cur = _composite(f, a, b, panels, order)
        if abs(cur - prev) <= max(rtol * abs(cur), atol):
            return cur, True, panels
        prev = cur
    return prev, False, panels


def integrate_semi_infinite(f, a: float = 0.0, scale: float = 1.0,
                            rtol: float = 1e-10, atol: float = 0.0,
                            max_level: int = 14, order: int = _ORDER):
    """Integrate ``f`` over ``[a, inf)`` via ``x = a + scale * u / (1 - u)``."""

    def mapped(u):
        u = np.asarray(u, dtype=float)
        one_minus = 1.0 - u
        x = a + scale * u / one_minus
        jac = scale / one_minus**2
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            v = np.asarray(f(x), dtype=float) * jac
        return np.where(np.isfinite(v), v, 0.0)

    return integrate(mapped, 0.0, 1.0, rtol=rtol, atol=atol,
                     max_level=max_level, order=order)
