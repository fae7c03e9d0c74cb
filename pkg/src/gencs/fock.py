"""Coherent-state expansions on the truncated Fock basis."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .families import Family, convergence_radius, format_family, parse_family
from .specfun import DivergenceError

RADIUS_MARGIN = 0.99


class TruncationError(ArithmeticError):
    """Tail tolerance not reached under the truncation cap."""

    def __init__(self, msg: str, tail_mass: float):
        super().__init__(msg)
        self.tail_mass = tail_mass


class DegenerateStateError(ValueError):
    """The requested superposition is the zero vector."""


@dataclass(frozen=True)
class TruncationPolicy:
    tol: float = 1e-12
    max_n: int = 512
    fixed_n: int | None = None


DEFAULT_POLICY = TruncationPolicy()


@dataclass(frozen=True, eq=False)
class FockExpansion:
    """Coefficients c_0..c_N of a state, plus how they were produced.

    ``sum |c_n|^2 + tail_mass == 1``: the estimated probability beyond the
    truncation is kept out of the stored coefficients rather than
    renormalized away.
    """

    coefficients: np.ndarray
    family: Family
    label_z: complex
    stabilization_alpha: float | None
    truncation_N: int
    tail_mass: float
    gk_label: tuple[float, float, float, float] | None = None  # (J, theta, t, omega)

    @property
    def dim(self) -> int:
        return self.truncation_N + 1

    def norm(self) -> float:
        return float(np.linalg.norm(self.coefficients))

    def padded(self, size: int) -> np.ndarray:
        out = np.zeros(size, dtype=complex)
        k = min(size, self.coefficients.size)
        out[:k] = self.coefficients[:k]
        return out

    def __eq__(self, other):
        if not isinstance(other, FockExpansion):
            return NotImplemented
        return (np.array_equal(self.coefficients, other.coefficients)
                and format_family(self.family) == format_family(other.family)
                and self.label_z == other.label_z
                and self.stabilization_alpha == other.stabilization_alpha
                and self.truncation_N == other.truncation_N
                and self.tail_mass == other.tail_mass
                and self.gk_label == other.gk_label)

    __hash__ = None


@dataclass(frozen=True)
class PhotonStatistics:
    distribution: np.ndarray
    mean_n: float
    variance_n: float
    mandel_q: float
    vacuum: bool = False


# ---------------------------------------------------------------------------


def _log_moduli(family: Family, r: float, n_max: int) -> np.ndarray:
    ns = np.arange(n_max + 1)
    lr = family.log_rho_table(n_max)
    if r == 0:
        out = np.full(n_max + 1, -np.inf)
        out[0] = 0.0
        return out
    return ns * math.log(r) - 0.5 * lr


def _tail_after(logp: np.ndarray, N: int) -> float:
    """Geometric tail estimate of sum_{n>N} p_n from p_{N+1} / p_N (log input)."""
    if N + 1 >= logp.size:
        return 0.0
    lp_next, lp_cur = logp[N + 1], logp[N]
    if lp_next == -np.inf:
        return 0.0
    log_ratio = lp_next - lp_cur
    if log_ratio >= 0:
        return math.inf
    return math.exp(lp_next - math.log1p(-math.exp(log_ratio)))


def _check_radius(family: Family, z: complex) -> None:
    if math.isfinite(family.dimension()):
        return
    R = convergence_radius(family)
    if abs(z) == 0:
        return
    if R == 0 or (math.isfinite(R) and abs(z) > RADIUS_MARGIN * R):
        raise DivergenceError(
            f"|z| = {abs(z):.6g} is not inside {RADIUS_MARGIN} x the radius {R:.6g} of {format_family(family)}")


def _choose_truncation(family: Family, r: float, policy: TruncationPolicy):
    """Return (unnormalized log|c_n|, reaching N+1 where available, and N)."""
    dim = family.dimension()
    if math.isfinite(dim):
        top = int(dim) - 1
        N = top if policy.fixed_n is None else min(policy.fixed_n, top)
        logc = _log_moduli(family, r, top)
        return logc, N

    if policy.fixed_n is not None:
        N = policy.fixed_n
        return _log_moduli(family, r, N + 1), N

    size = 64
    while True:
        size = min(size, policy.max_n + 1)
        logc = _log_moduli(family, r, size)
        logp = 2.0 * logc
        log_total = logsumexp(logp)
        for N in range(size):
            # weighting by N^2 keeps the dropped part of <n^2> below tol as well
            tail = _tail_after(logp, N) * max(N, 1) ** 2
            if tail <= policy.tol * math.exp(log_total):
                return logc, N
        if size >= policy.max_n + 1:
            N = policy.max_n
            tail = _tail_after(logp, N) / math.exp(log_total)
            raise TruncationError(
                f"tail mass {tail:.3g} above tolerance {policy.tol:g} at the cap N = {N}", tail)
        size *= 2


def build_state(family: Family, z: complex, alpha: float | None = None,
                trunc: TruncationPolicy | None = None) -> FockExpansion:
    """Normalized |z> (or the stabilized |z, alpha>) of ``family``.

    c_n is proportional to z^n exp(-i alpha e_n) / sqrt(rho(n)).  The
    expansion is assembled from log-moduli so that weights spanning hundreds
    of decades normalize cleanly.
    """
    policy = trunc or DEFAULT_POLICY
    z = complex(z)
    _check_radius(family, z)
    r = abs(z)
    logc, N = _choose_truncation(family, r, policy)
    logp = 2.0 * logc
    kept = logp[:N + 1]
    if math.isfinite(family.dimension()):
        tail_unnorm = float(np.exp(logsumexp(logp[N + 1:]))) if logp.size > N + 1 else 0.0
    else:
        tail_unnorm = _tail_after(logp, N)
    if not math.isfinite(tail_unnorm):
        # ratios still growing at a fixed N: the tail is unbounded by this estimate
        tail_mass = 1.0
        log_norm = logsumexp(kept)
    elif tail_unnorm > 0:
        log_norm = float(np.logaddexp(logsumexp(kept), math.log(tail_unnorm)))
        tail_mass = tail_unnorm / math.exp(log_norm)
    else:
        log_norm = logsumexp(kept)
        tail_mass = 0.0
    mod = np.exp(logc[:N + 1] - 0.5 * log_norm)
    ns = np.arange(N + 1)
    phase = np.exp(1j * math.atan2(z.imag, z.real) * ns) if r > 0 else np.ones(N + 1)
    coeffs = mod * phase
    if alpha is not None and alpha != 0:
        e = family.energy_table(N)
        coeffs = coeffs * np.exp(-1j * alpha * e)
    return FockExpansion(coeffs.astype(complex), family, z, alpha, N, float(tail_mass))


def normalization_value(family: Family, x: float, trunc: TruncationPolicy | None = None) -> float:
    """N(x) = sum_n x^n / rho(n)."""
    if x < 0:
        raise ValueError("normalization_value requires x >= 0")
    policy = trunc or DEFAULT_POLICY
    _check_radius(family, math.sqrt(x))
    r = math.sqrt(x)
    logc, N = _choose_truncation(family, r, policy)
    logp = 2.0 * logc
    total = float(np.exp(logsumexp(logp[:N + 1])))
    if math.isfinite(family.dimension()):
        return total
    tail = _tail_after(logp, N)
    return total + (tail if math.isfinite(tail) else 0.0)


def overlap(s1: FockExpansion, s2: FockExpansion) -> complex:
    """<s1|s2> with zero-padding to the larger truncation."""
    size = max(s1.coefficients.size, s2.coefficients.size)
    return complex(np.vdot(s1.padded(size), s2.padded(size)))


def photon_statistics(s: FockExpansion) -> PhotonStatistics:
    P = np.abs(s.coefficients) ** 2
    total = P.sum()
    ns = np.arange(P.size)
    mean = float(np.dot(ns, P) / total)
    var = float(np.dot((ns - mean) ** 2, P) / total)
    if mean == 0.0:
        return PhotonStatistics(P, 0.0, var, 0.0, vacuum=True)
    return PhotonStatistics(P, mean, var, var / mean - 1.0)


def cat_superposition(family: Family, z: complex, alpha: float | None = None,
                      parity: str = "even", trunc: TruncationPolicy | None = None) -> FockExpansion:
    """Normalized |z, alpha> + |-z, alpha> (even) or the difference (odd)."""
    if parity not in ("even", "odd"):
        raise ValueError("parity must be 'even' or 'odd'")
    base = build_state(family, z, alpha, trunc)
    ns = np.arange(base.coefficients.size)
    keep = (ns % 2 == 0) if parity == "even" else (ns % 2 == 1)
    c = np.where(keep, base.coefficients, 0.0)
    kept = float(np.sum(np.abs(c) ** 2))
    if kept == 0.0 or kept < 1e-300:
        raise DegenerateStateError(f"{parity} superposition at z = {z} is the zero vector")
    tail = min(1.0, base.tail_mass / (kept + base.tail_mass))
    c = c * math.sqrt((1.0 - tail) / kept)
    return FockExpansion(c, family, complex(z), alpha, base.truncation_N, tail, base.gk_label)


# ---------------------------------------------------------------------------
# JSON shape


def state_to_dict(s: FockExpansion) -> dict:
    out = {
        "family": format_family(s.family),
        "z": [s.label_z.real, s.label_z.imag],
        "alpha": s.stabilization_alpha,
        "coefficients": [[float(c.real), float(c.imag)] for c in s.coefficients],
        "tail_mass": s.tail_mass,
    }
    if s.gk_label is not None:
        J, theta, t, omega = s.gk_label
        out.update({"J": J, "theta": theta, "t": t, "omega": omega})
    return out


def state_from_dict(d: dict) -> FockExpansion:
    coeffs = np.array([complex(re, im) for re, im in d["coefficients"]], dtype=complex)
    gk = None
    if "J" in d:
        gk = (d["J"], d["theta"], d["t"], d.get("omega", 1.0))
    alpha = d.get("alpha")
    return FockExpansion(coeffs, parse_family(d["family"]), complex(*d["z"]),
                         alpha, coeffs.size - 1, d["tail_mass"], gk)


def state_to_json(s: FockExpansion) -> str:
    return json.dumps(state_to_dict(s))


def state_from_json(text: str) -> FockExpansion:
    return state_from_dict(json.loads(text))
