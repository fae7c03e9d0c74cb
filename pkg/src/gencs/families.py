"""Registry of coherent-state families.

Every family is a frozen dataclass that knows its weight sequence rho(n) in
log form, normalized so that rho(0) = 1.  Spectra and nonlinearity functions
are derived from it:

    e_n = rho(n) / rho(n-1),    f(n) = sqrt(e_n / n).

Families with simple closed-form spectra override :meth:`Family.energies_at`
so the derived quantities do not inherit cancellation from log-gamma
differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, ClassVar, Sequence

import numpy as np
from scipy.special import gammaln

from . import specfun

INF = math.inf


class FamilyDomainError(ValueError):
    """Invalid family parameters or an index outside the family's Fock space."""


class FamilyParseError(ValueError):
    """Malformed text form of a family specification."""


def _idx(ns) -> np.ndarray:
    return np.atleast_1d(np.asarray(ns, dtype=np.int64))


@dataclass(frozen=True)
class Family:
    """Base class.  Subclasses implement ``_log_rho_raw``."""

    name: ClassVar[str] = "family"

    # -- to override -------------------------------------------------------
    def _log_rho_raw(self, ns: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def dimension(self) -> float:
        return INF

    def radius_closed_form(self) -> float | None:
        """Convergence radius in |z| units when known analytically."""
        return None

    def published_f(self, n: int) -> float | None:
        """Nonlinearity as printed for this family in the literature, if any."""
        return None

    def params(self) -> dict:
        return {}

    # -- derived -------------------------------------------------------------
    def check_index(self, ns) -> np.ndarray:
        ns = _idx(ns)
        if ns.size and ns.min() < 0:
            raise FamilyDomainError("Fock index must be non-negative")
        dim = self.dimension()
        if ns.size and ns.max() >= dim:
            raise FamilyDomainError(
                f"index {int(ns.max())} outside the {int(dim)}-dimensional space of {format_family(self)}")
        return ns

    def log_rho_at(self, ns) -> np.ndarray:
        ns = self.check_index(ns)
        raw = self._log_rho_raw(ns)
        zero = self._log_rho_raw(np.array([0], dtype=np.int64))[0]
        return np.where(ns == 0, 0.0, raw - zero)

    def energies_at(self, ns) -> np.ndarray:
        ns = self.check_index(ns)
        pos = np.maximum(ns, 1)
        both = np.unique(np.concatenate([pos, pos - 1]))
        lr = self.log_rho_at(both)
        e = np.exp(lr[np.searchsorted(both, pos)] - lr[np.searchsorted(both, pos - 1)])
        return np.where(ns == 0, 0.0, e)

    def log_rho_table(self, n_max: int) -> np.ndarray:
        return self.log_rho_at(np.arange(n_max + 1))

    def energy_table(self, n_max: int) -> np.ndarray:
        return self.energies_at(np.arange(n_max + 1))

    def __str__(self) -> str:
        return format_family(self)


# ---------------------------------------------------------------------------
# concrete families


@dataclass(frozen=True)
class Canonical(Family):
    name: ClassVar[str] = "canonical"

    def _log_rho_raw(self, ns):
        return gammaln(ns + 1.0)

    def energies_at(self, ns):
        return self.check_index(ns).astype(float)

    def radius_closed_form(self):
        return INF

    def published_f(self, n):
        return 1.0


@dataclass(frozen=True)
class KPSCustom(Family):
    """User-supplied weight: pass ``rho`` (n -> rho(n)) or ``log_rho``."""

    rho: Callable[[int], float] | None = None
    log_rho: Callable[[int], float] | None = None
    label: str = "custom"
    dim: float = INF

    name: ClassVar[str] = "kps_custom"

    def __post_init__(self):
        if (self.rho is None) == (self.log_rho is None):
            raise FamilyDomainError("KPSCustom needs exactly one of rho or log_rho")

    def _log_rho_raw(self, ns):
        if self.log_rho is not None:
            return np.array([float(self.log_rho(int(n))) for n in ns])
        vals = np.array([float(self.rho(int(n))) for n in ns])
        if np.any(~(vals > 0)) or np.any(~np.isfinite(vals)):
            raise FamilyDomainError("custom rho(n) must be finite and positive")
        return np.log(vals)

    def dimension(self):
        return self.dim

    def params(self):
        return {"label": self.label}


@dataclass(frozen=True)
class MittagLeffler(Family):
    alpha: float = 1.0
    beta: float = 1.0

    name: ClassVar[str] = "mittag_leffler"

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise FamilyDomainError("Mittag-Leffler needs alpha > 0 and beta > 0")

    def _log_rho_raw(self, ns):
        return gammaln(self.alpha * ns + self.beta) - gammaln(self.beta)

    def radius_closed_form(self):
        return INF

    def params(self):
        return {"alpha": self.alpha, "beta": self.beta}


@dataclass(frozen=True)
class Hypergeometric(Family):
    alphas: tuple[float, ...] = ()
    betas: tuple[float, ...] = ()

    name: ClassVar[str] = "hypergeometric"

    def __post_init__(self):
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        object.__setattr__(self, "betas", tuple(float(b) for b in self.betas))
        p, q = len(self.alphas), len(self.betas)
        if not (max(q - 1, 0) <= p <= q + 1):
            raise FamilyDomainError(f"hypergeometric family needs q-1 <= p <= q+1, got p={p}, q={q}")
        if any(not a > 0 for a in self.alphas + self.betas):
            raise FamilyDomainError("hypergeometric parameters must be positive")

    def _log_rho_raw(self, ns):
        out = gammaln(ns + 1.0)
        for b in self.betas:
            out = out + gammaln(b + ns) - gammaln(b)
        for a in self.alphas:
            out = out - gammaln(a + ns) + gammaln(a)
        return out

    def energies_at(self, ns):
        ns = self.check_index(ns)
        pos = np.maximum(ns, 1)
        e = pos.astype(float)
        for b in self.betas:
            e = e * (b + pos - 1.0)
        for a in self.alphas:
            e = e / (a + pos - 1.0)
        return np.where(ns == 0, 0.0, e)

    def radius_closed_form(self):
        return 1.0 if len(self.alphas) == len(self.betas) + 1 else INF

    def published_f(self, n):
        # printed with an extra (n - 1) factor under the root
        val = float(n - 1)
        for b in self.betas:
            val *= b + n - 1
        for a in self.alphas:
            val /= a + n - 1
        return math.sqrt(val) if val >= 0 else float("nan")

    def params(self):
        return {"alphas": list(self.alphas), "betas": list(self.betas)}


# Tricomi weights cost one quadrature each; memoize the pure scalar pieces.
@lru_cache(maxsize=8192)
def _tc1_log_d(p: float, n: int) -> float:
    z = 1.0 / (4.0 * p)
    return -0.5 * n * math.log(p) - n * math.log(2.0) + specfun.log_tricomi_u(0.5 * (n + 1), 0.5, z)


@lru_cache(maxsize=8192)
def _tc2_log_term(lam: float, beta: float, n: int) -> float:
    return n * math.log(beta) + specfun.log_tricomi_u(n + 1.0, n + 2.0 - lam, beta)


@dataclass(frozen=True)
class TricomiFirst(Family):
    p: float = 1.0

    name: ClassVar[str] = "tricomi1"

    def __post_init__(self):
        if not self.p > 0:
            raise FamilyDomainError("Tricomi family of the first kind needs p > 0")

    def _log_rho_raw(self, ns):
        return np.array([math.lgamma(n + 1.0) + _tc1_log_d(self.p, int(n)) for n in ns])

    def radius_closed_form(self):
        return INF

    def published_f(self, n):
        z = 1.0 / (4.0 * self.p)
        ratio = math.exp(specfun.log_tricomi_u(0.5 * (n + 1), 0.5, z)
                         - specfun.log_tricomi_u(0.5 * n, 0.5, z))
        return math.sqrt(2.0 / math.sqrt(self.p) * ratio)

    def params(self):
        return {"p": self.p}


@dataclass(frozen=True)
class TricomiSecond(Family):
    lam: float = 0.0
    beta: float = 1.0

    name: ClassVar[str] = "tricomi2"

    def __post_init__(self):
        if not self.beta > 0:
            raise FamilyDomainError("Tricomi family of the second kind needs beta > 0")
        if not math.isfinite(self.lam):
            raise FamilyDomainError("lambda must be finite")

    def _log_rho_raw(self, ns):
        return np.array([math.lgamma(n + 1.0) + _tc2_log_term(self.lam, self.beta, int(n))
                         for n in ns])

    def radius_closed_form(self):
        return INF

    def published_f(self, n):
        b = self.beta
        ratio = math.exp(specfun.log_tricomi_u(n + 1.0, n + 2.0 - self.lam, b)
                         - specfun.log_tricomi_u(float(n), n + 1.0 - self.lam, b))
        return math.sqrt(b * ratio)

    def params(self):
        return {"lambda": self.lam, "beta": self.beta}


@dataclass(frozen=True)
class PensonSolomon(Family):
    q: float = 1.0

    name: ClassVar[str] = "penson_solomon"

    def __post_init__(self):
        if not 0 < self.q <= 1:
            raise FamilyDomainError("Penson-Solomon family needs 0 < q <= 1")

    def _log_rho_raw(self, ns):
        return gammaln(ns + 1.0) - ns * (ns - 1.0) * math.log(self.q)

    def energies_at(self, ns):
        ns = self.check_index(ns)
        return ns * np.exp(-2.0 * (ns - 1.0) * math.log(self.q))

    def radius_closed_form(self):
        return INF

    def published_f(self, n):
        return self.q ** (1 - n)

    def params(self):
        return {"q": self.q}


def _check_kappa(kappa: float) -> None:
    if not (kappa >= 1 and float(2 * kappa).is_integer()):
        raise FamilyDomainError(f"kappa must be one of 1, 3/2, 2, ...; got {kappa}")


@dataclass(frozen=True)
class BarutGirardello(Family):
    kappa: float = 1.0

    name: ClassVar[str] = "bg"

    def __post_init__(self):
        _check_kappa(self.kappa)

    def _log_rho_raw(self, ns):
        return gammaln(ns + 1.0) + gammaln(ns + 2.0 * self.kappa)

    def energies_at(self, ns):
        ns = self.check_index(ns)
        return ns * (ns + 2.0 * self.kappa - 1.0)

    def radius_closed_form(self):
        return INF

    def published_f(self, n):
        return math.sqrt(n + 2.0 * self.kappa - 1.0)

    def params(self):
        return {"kappa": self.kappa}


@dataclass(frozen=True)
class GilmorePerelomov(Family):
    kappa: float = 1.0

    name: ClassVar[str] = "gp"

    def __post_init__(self):
        _check_kappa(self.kappa)

    def _log_rho_raw(self, ns):
        return gammaln(ns + 1.0) - gammaln(ns + 2.0 * self.kappa)

    def energies_at(self, ns):
        ns = self.check_index(ns)
        return ns / (ns + 2.0 * self.kappa - 1.0)

    def radius_closed_form(self):
        return 1.0

    def published_f(self, n):
        return 1.0 / math.sqrt(n + 2.0 * self.kappa - 1.0)

    def params(self):
        return {"kappa": self.kappa}


@dataclass(frozen=True)
class LandauLevel(Family):
    """Landau-level states re-indexed by k = n - m (k = 0 is the lowest state)."""

    m: int = 0
    alpha: float = 0.0

    name: ClassVar[str] = "landau_level"

    def __post_init__(self):
        if not (float(self.m).is_integer() and self.m >= 0):
            raise FamilyDomainError("Landau-level m must be a non-negative integer")
        object.__setattr__(self, "m", int(self.m))
        if not self.alpha > -1:
            raise FamilyDomainError("Landau-level alpha must exceed -1")

    def _log_rho_raw(self, ks):
        s = self.alpha + self.m + 1.0
        return gammaln(ks + 1.0) + gammaln(s + ks) - gammaln(s)

    def energies_at(self, ks):
        ks = self.check_index(ks)
        return ks * (ks + self.alpha + self.m)

    def radius_closed_form(self):
        return INF

    def published_f(self, k):
        # printed expression, in the original Landau index n = k + m
        n = k + self.m
        return (n - self.m + 1) * (n + self.alpha + 1) / math.sqrt(n + 1)

    def params(self):
        return {"m": self.m, "alpha": self.alpha}


@dataclass(frozen=True)
class GazeauKlauderFromSpectrum(Family):
    """Family fixed by its spectrum: rho(n) = e_1 e_2 ... e_n.

    ``energies`` is either a finite sequence starting with 0 (the family is
    then finite dimensional) or a callable n -> e_n.
    """

    energies: tuple[float, ...] | Callable[[int], float] = ()
    label: str = "gk"

    name: ClassVar[str] = "gk_spectrum"

    def __post_init__(self):
        if not callable(self.energies):
            vals = tuple(float(v) for v in self.energies)
            if len(vals) < 2 or vals[0] != 0.0:
                raise FamilyDomainError("spectrum must start with e_0 = 0 and have length >= 2")
            if any(not (v > 0 and math.isfinite(v)) for v in vals[1:]):
                raise FamilyDomainError("spectrum values e_n (n >= 1) must be finite and positive")
            object.__setattr__(self, "energies", vals)

    def dimension(self):
        return INF if callable(self.energies) else len(self.energies)

    def _e(self, n: int) -> float:
        if callable(self.energies):
            v = 0.0 if n == 0 else float(self.energies(n))
            if n and not v > 0:
                raise FamilyDomainError(f"spectrum value e_{n} = {v} is not positive")
            return v
        return self.energies[n]

    def energies_at(self, ns):
        ns = self.check_index(ns)
        return np.array([self._e(int(n)) for n in ns])

    def _log_rho_raw(self, ns):
        top = int(ns.max()) if ns.size else 0
        cum = np.concatenate([[0.0], np.cumsum(np.log([self._e(k) for k in range(1, top + 1)]))])
        return cum[ns]

    def radius_closed_form(self):
        return None if callable(self.energies) else INF

    def params(self):
        if callable(self.energies):
            return {"label": self.label}
        return {"e": list(self.energies)}


@dataclass(frozen=True)
class PoschlTeller(Family):
    nu: float = 3.0

    name: ClassVar[str] = "poschl_teller"

    def __post_init__(self):
        if not self.nu > 2:
            raise FamilyDomainError("Poschl-Teller family needs nu > 2")

    def _log_rho_raw(self, ns):
        return gammaln(ns + 1.0) + gammaln(ns + self.nu + 1.0) - gammaln(self.nu + 1.0)

    def energies_at(self, ns):
        ns = self.check_index(ns)
        return ns * (ns + self.nu)

    def radius_closed_form(self):
        return INF

    def params(self):
        return {"nu": self.nu}


@dataclass(frozen=True)
class InfiniteWell(Family):
    name: ClassVar[str] = "infinite_well"

    def _log_rho_raw(self, ns):
        return gammaln(ns + 1.0) + gammaln(ns + 3.0) - math.log(2.0)

    def energies_at(self, ns):
        ns = self.check_index(ns)
        return ns * (ns + 2.0)

    def radius_closed_form(self):
        return INF


@dataclass(frozen=True)
class HydrogenLike(Family):
    name: ClassVar[str] = "hydrogen_like"

    def _log_rho_raw(self, ns):
        return np.log(ns + 2.0) - math.log(2.0) - np.log(ns + 1.0)

    def energies_at(self, ns):
        ns = self.check_index(ns)
        return ns * (ns + 2.0) / (ns + 1.0) ** 2

    def radius_closed_form(self):
        return 1.0


@dataclass(frozen=True)
class Morse(Family):
    M: int = 1

    name: ClassVar[str] = "morse"

    def __post_init__(self):
        if not (float(self.M).is_integer() and self.M >= 1):
            raise FamilyDomainError("Morse family needs a positive integer M")
        object.__setattr__(self, "M", int(self.M))

    def dimension(self):
        return self.M + 1

    def _log_rho_raw(self, ns):
        M = self.M
        return (gammaln(ns + 1.0) + math.lgamma(M + 1.0) - ns * math.log(M + 2.0)
                - gammaln(M + 1.0 - ns))

    def energies_at(self, ns):
        ns = self.check_index(ns)
        return ns * (self.M + 1.0 - ns) / (self.M + 2.0)

    def radius_closed_form(self):
        return INF

    def params(self):
        return {"M": self.M}


@dataclass(frozen=True)
class DualOf(Family):
    """Dual family: mu(n) = (n!)^2 / rho(n), eps_n = n^2 / e_n.

    Build through :func:`dual_family` so that the dual of a dual unwraps.
    """

    inner: Family = field(default_factory=Canonical)

    name: ClassVar[str] = "dual"

    def dimension(self):
        return self.inner.dimension()

    def log_rho_at(self, ns):
        ns = self.check_index(ns)
        return 2.0 * gammaln(ns + 1.0) - self.inner.log_rho_at(ns)

    def _log_rho_raw(self, ns):
        return self.log_rho_at(ns)

    def energies_at(self, ns):
        ns = self.check_index(ns)
        e = self.inner.energies_at(ns)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = ns.astype(float) ** 2 / e
        return np.where(ns == 0, 0.0, out)

    def radius_closed_form(self):
        inner = self.inner
        if isinstance(inner, Canonical):
            return INF
        if isinstance(inner, GilmorePerelomov):
            return INF
        if isinstance(inner, (BarutGirardello, PoschlTeller, InfiniteWell, LandauLevel)):
            return 1.0
        if isinstance(inner, HydrogenLike):
            return INF
        if isinstance(inner, PensonSolomon):
            return INF if inner.q == 1 else 0.0
        if isinstance(inner, Hypergeometric):
            # eps_n grows like n^(1 + p - q) when p >= q, tends to 1 when p = q - 1
            p, q = len(inner.alphas), len(inner.betas)
            return 1.0 if p == q - 1 else INF
        if isinstance(inner, MittagLeffler):
            # eps_n ~ n^(2 - alpha) / alpha^alpha
            if inner.alpha < 2:
                return INF
            return 0.5 if inner.alpha == 2 else 0.0
        if isinstance(inner, (TricomiFirst, TricomiSecond)):
            return INF
        if math.isfinite(inner.dimension()):
            return INF
        return None

    def published_f(self, n):
        f = self.inner.published_f(n)
        if f is None:
            return None
        return 1.0 / f if f != 0 else INF

    def params(self):
        return {}


# ---------------------------------------------------------------------------
# value types


@dataclass(frozen=True)
class WeightSequence:
    log_values: np.ndarray
    normalized_at_zero: bool = True

    @property
    def values(self) -> np.ndarray:
        return np.exp(self.log_values)


@dataclass(frozen=True)
class Spectrum:
    values: np.ndarray
    monotone_up_to: int


@dataclass(frozen=True)
class NonlinearityFn:
    """f(n) for n >= 1 (index 0 holds n = 1) and the GK phase increments."""

    modulus: np.ndarray
    phase_rate: np.ndarray | None = None
    alpha: float | None = None

    def complex_values(self) -> np.ndarray:
        if self.alpha is None or self.phase_rate is None:
            return self.modulus.astype(complex)
        return self.modulus * np.exp(1j * self.alpha * self.phase_rate)


@dataclass(frozen=True)
class RadiusEstimate:
    value: float
    method: str
    flagged: bool = False


# ---------------------------------------------------------------------------
# operations


def dimension(family: Family) -> float:
    return family.dimension()


def weight(family: Family, n: int) -> float:
    """rho(n), normalized so that rho(0) = 1."""
    return float(math.exp(family.log_rho_at([n])[0]))


def log_weight(family: Family, n: int) -> float:
    return float(family.log_rho_at([n])[0])


def weights(family: Family, n_max: int) -> WeightSequence:
    return WeightSequence(family.log_rho_table(n_max))


def spectrum(family: Family, n: int) -> float:
    return float(family.energies_at([n])[0])


def monotone_up_to(values: np.ndarray) -> int:
    """Largest n with values[0] < values[1] < ... < values[n]."""
    inc = np.diff(values) > 0
    bad = np.flatnonzero(~inc)
    return int(bad[0]) if bad.size else len(values) - 1


def spectrum_table(family: Family, n_max: int) -> Spectrum:
    vals = family.energy_table(n_max)
    return Spectrum(vals, monotone_up_to(vals))


def nonlinearity(family: Family, n: int) -> float:
    """f(n) = sqrt(e_n / n) for n >= 1."""
    if n < 1:
        raise FamilyDomainError("nonlinearity is defined for n >= 1")
    return math.sqrt(spectrum(family, n) / n)


def nonlinearity_fn(family: Family, n_max: int, alpha: float | None = None) -> NonlinearityFn:
    e = family.energy_table(n_max)
    ns = np.arange(1, n_max + 1)
    return NonlinearityFn(np.sqrt(e[1:] / ns), np.diff(e), alpha)


def dual_family(family: Family) -> Family:
    """Dual family; the dual of a dual returns the original family."""
    if isinstance(family, DualOf):
        return family.inner
    if isinstance(family, Canonical):
        return family
    return DualOf(family)


def known_dual(family: Family) -> Family | None:
    """A registered family whose weights equal the dual weights, if any."""
    if isinstance(family, Canonical):
        return family
    if isinstance(family, BarutGirardello):
        return GilmorePerelomov(family.kappa)
    if isinstance(family, GilmorePerelomov):
        return BarutGirardello(family.kappa)
    if isinstance(family, DualOf):
        return family.inner
    return None


def estimate_radius(family: Family, n_probe: int = 8192) -> RadiusEstimate:
    """Convergence radius in |z| units; radius**2 is lim e_n."""
    closed = family.radius_closed_form()
    if closed is not None:
        return RadiusEstimate(closed, "closed_form")
    dim = family.dimension()
    if math.isfinite(dim):
        return RadiusEstimate(INF, "finite_dimension")
    ns = np.array([2**k for k in range(6, int(math.log2(n_probe)) + 1)])
    e = family.energies_at(ns)
    if not np.all(np.isfinite(e)):
        return RadiusEstimate(float("nan"), "tail_probe", True)
    monotone = bool(np.all(np.diff(e) > 0) or np.all(np.diff(e) < 0))
    slope = math.log(e[-1] / e[-2]) / math.log(2.0) if e[-1] > 0 and e[-2] > 0 else -INF
    if slope > 0.1:
        return RadiusEstimate(INF, "tail_probe", not monotone)
    if slope < -0.1:
        return RadiusEstimate(0.0, "tail_probe", not monotone)
    # Richardson step assuming e_n = L + c / n
    limit = 2.0 * e[-1] - e[-2]
    return RadiusEstimate(math.sqrt(max(limit, 0.0)), "tail_probe", not monotone)


def convergence_radius(family: Family) -> float:
    return estimate_radius(family).value


# ---------------------------------------------------------------------------
# text form


@dataclass(frozen=True)
class _Param:
    key: str
    attr: str
    kind: str  # "float", "int", "list"
    domain: str


@dataclass(frozen=True)
class _Entry:
    cls: type
    aliases: tuple[str, ...]
    params: tuple[_Param, ...]
    summary: str


REGISTRY: dict[str, _Entry] = {
    "canonical": _Entry(Canonical, ("ccs",), (), "canonical coherent states, rho(n) = n!"),
    "mittag_leffler": _Entry(MittagLeffler, ("ml",), (
        _Param("alpha", "alpha", "float", "> 0"), _Param("beta", "beta", "float", "> 0")),
        "rho(n) = Gamma(alpha n + beta) / Gamma(beta)"),
    "hypergeometric": _Entry(Hypergeometric, ("hg",), (
        _Param("alphas", "alphas", "list", "positive, length p"),
        _Param("betas", "betas", "list", "positive, length q, q-1 <= p <= q+1")),
        "rho(n) = n! prod (beta)_n / prod (alpha)_n"),
    "tricomi1": _Entry(TricomiFirst, ("tc1",), (_Param("p", "p", "float", "> 0"),),
                       "rho(n) = n! d_p(n), Tricomi U in d_p"),
    "tricomi2": _Entry(TricomiSecond, ("tc2",), (
        _Param("lambda", "lam", "float", "real"), _Param("beta", "beta", "float", "> 0")),
        "rho(n) = n! beta^n U(n+1, n+2-lambda, beta) / U(1, 2-lambda, beta)"),
    "penson_solomon": _Entry(PensonSolomon, ("ps",), (_Param("q", "q", "float", "(0, 1]"),),
                             "rho(n) = n! q^(-n(n-1))"),
    "bg": _Entry(BarutGirardello, ("barut_girardello",), (
        _Param("kappa", "kappa", "float", "1, 3/2, 2, ..."),),
        "rho(n) = n! (2 kappa)_n"),
    "gp": _Entry(GilmorePerelomov, ("gilmore_perelomov",), (
        _Param("kappa", "kappa", "float", "1, 3/2, 2, ..."),),
        "rho(n) = n! / (2 kappa)_n, |z| < 1"),
    "landau_level": _Entry(LandauLevel, ("ll", "landau"), (
        _Param("m", "m", "int", ">= 0"), _Param("alpha", "alpha", "float", "> -1")),
        "rho(k) = k! Gamma(alpha+m+k+1) / Gamma(alpha+m+1), k = n - m"),
    "gk_spectrum": _Entry(GazeauKlauderFromSpectrum, ("gk",), (
        _Param("e", "energies", "list", "e_0 = 0, e_n > 0"),),
        "rho(n) = e_1 e_2 ... e_n (finite dimension = len(e))"),
    "poschl_teller": _Entry(PoschlTeller, ("pt",), (_Param("nu", "nu", "float", "> 2"),),
                            "e_n = n (n + nu)"),
    "infinite_well": _Entry(InfiniteWell, ("iw",), (), "e_n = n (n + 2)"),
    "hydrogen_like": _Entry(HydrogenLike, ("hydrogen",), (), "e_n = 1 - 1/(n+1)^2, |z| < 1"),
    "morse": _Entry(Morse, (), (_Param("M", "M", "int", "positive integer"),),
                    "e_n = n (M + 1 - n) / (M + 2), n <= M"),
}

_NAME_OF_CLASS = {entry.cls: key for key, entry in REGISTRY.items()}
_ALIASES = {alias: key for key, entry in REGISTRY.items() for alias in entry.aliases}


def _fmt_value(v) -> str:
    if isinstance(v, (list, tuple)):
        return "[" + ",".join(_fmt_value(x) for x in v) + "]"
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return str(int(v)) if v.is_integer() and abs(v) < 1e15 else repr(v)
    return str(v)


def format_family(family: Family) -> str:
    """Text form accepted by :func:`parse_family`."""
    if isinstance(family, DualOf):
        return f"dual({format_family(family.inner)})"
    if isinstance(family, KPSCustom):
        return f"kps_custom(label={family.label})"
    key = _NAME_OF_CLASS[type(family)]
    if isinstance(family, GazeauKlauderFromSpectrum) and callable(family.energies):
        return f"gk_spectrum(label={family.label})"
    parts = []
    for prm in REGISTRY[key].params:
        parts.append(f"{prm.key}={_fmt_value(getattr(family, prm.attr))}")
    return f"{key}({','.join(parts)})" if parts else key


class _Parser:
    def __init__(self, text: str):
        self.s = text
        self.i = 0

    def error(self, msg: str):
        raise FamilyParseError(f"{msg} at position {self.i} in {self.s!r}")

    def ws(self):
        while self.i < len(self.s) and self.s[self.i].isspace():
            self.i += 1

    def peek(self) -> str:
        self.ws()
        return self.s[self.i] if self.i < len(self.s) else ""

    def expect(self, ch: str):
        if self.peek() != ch:
            self.error(f"expected {ch!r}")
        self.i += 1

    def ident(self) -> str:
        self.ws()
        j = self.i
        while self.i < len(self.s) and (self.s[self.i].isalnum() or self.s[self.i] == "_"):
            self.i += 1
        if j == self.i:
            self.error("expected a name")
        return self.s[j:self.i]

    def number(self) -> float:
        self.ws()
        j = self.i
        while self.i < len(self.s) and self.s[self.i] in "0123456789+-.eE/":
            self.i += 1
        tok = self.s[j:self.i]
        try:
            if "/" in tok:
                num, den = tok.split("/")
                return float(num) / float(den)
            return float(tok)
        except ValueError:
            self.error(f"bad number {tok!r}")

    def value(self):
        if self.peek() == "[":
            self.i += 1
            items = []
            if self.peek() == "]":
                self.i += 1
                return items
            while True:
                items.append(self.number())
                if self.peek() == ",":
                    self.i += 1
                    continue
                self.expect("]")
                return items
        return self.number()

    def family(self) -> Family:
        name = self.ident().lower()
        if name == "dual":
            self.expect("(")
            inner = self.family()
            self.expect(")")
            return dual_family(inner)
        if name == "kps_custom":
            self.error("kps_custom takes a callable and is only available from Python")
        key = name if name in REGISTRY else _ALIASES.get(name)
        if key is None:
            self.error(f"unknown family {name!r}")
        entry = REGISTRY[key]
        kwargs = {}
        if self.peek() == "(":
            self.i += 1
            if self.peek() != ")":
                while True:
                    k = self.ident()
                    self.expect("=")
                    v = self.value()
                    prm = next((p for p in entry.params if p.key == k), None)
                    if prm is None:
                        self.error(f"unknown parameter {k!r} for {key}")
                    if prm.attr in kwargs:
                        self.error(f"parameter {k!r} given twice")
                    if prm.kind == "list" and not isinstance(v, list):
                        v = [v]
                    if prm.kind != "list" and isinstance(v, list):
                        self.error(f"parameter {k!r} takes a single number")
                    if prm.kind == "int":
                        if not float(v).is_integer():
                            self.error(f"parameter {k!r} must be an integer")
                        v = int(v)
                    if prm.kind == "list":
                        v = tuple(v)
                    kwargs[prm.attr] = v
                    if self.peek() == ",":
                        self.i += 1
                        continue
                    break
            self.expect(")")
        try:
            return entry.cls(**kwargs)
        except FamilyDomainError:
            raise
        except TypeError as exc:
            raise FamilyParseError(str(exc)) from exc


def parse_family(text: str) -> Family:
    """Parse ``name(key=value, ...)``; ``dual(<family>)`` wraps any family.

    Values are numbers (``1.5``, ``3/2``) or bracketed lists (``[1,2]``).
    """
    p = _Parser(text)
    fam = p.family()
    if p.peek() != "":
        p.error("trailing characters")
    return fam


def catalog() -> list[dict]:
    rows = []
    for key, entry in REGISTRY.items():
        rows.append({
            "name": key,
            "aliases": list(entry.aliases),
            "params": {p.key: p.domain for p in entry.params},
            "summary": entry.summary,
        })
    rows.append({"name": "dual", "aliases": [], "params": {"<family>": "any family"},
                 "summary": "mu(n) = (n!)^2 / rho(n), eps_n = n^2 / e_n"})
    return rows
