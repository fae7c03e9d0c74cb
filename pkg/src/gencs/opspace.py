"""Operators on the truncated Fock space |0>, ..., |N>.

Every operator carries ``valid_interior``: the largest index up to which
algebraic identities of the infinite-dimensional operators still hold
entrywise.  Products that touch index N+1 in the full space are corrupted
in the last row/column, so commutators lose one more index.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.special import gammaln

from .families import Family, FamilyDomainError, format_family
from .fock import TruncationError
from .specfun import laguerre


class SingularityError(ArithmeticError):
    """A ladder entry divides by a vanishing nonlinearity f(n)."""


@dataclass(frozen=True, eq=False)
class TruncatedOperator:
    entries: np.ndarray
    label: str
    valid_interior: int
    flags: tuple[str, ...] = field(default=())

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 2:
            raise FamilyDomainError("operator must be a square matrix of size >= 2")
        if not np.all(np.isfinite(m)):
            raise ArithmeticError(f"operator {self.label} has non-finite entries")
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def N(self) -> int:
        return self.dim - 1

    def dag(self) -> "TruncatedOperator":
        return TruncatedOperator(self.entries.conj().T, self.label + "^dag", self.valid_interior,
                                 self.flags)

    def __matmul__(self, other):
        if isinstance(other, TruncatedOperator):
            _match(self, other)
            return TruncatedOperator(self.entries @ other.entries, f"{self.label}*{other.label}",
                                     min(self.valid_interior, other.valid_interior) - 1,
                                     self.flags + other.flags)
        return self.entries @ np.asarray(other)

    def interior(self) -> np.ndarray:
        k = self.valid_interior + 1
        return self.entries[:k, :k]

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "dim": self.dim,
            "valid_interior": self.valid_interior,
            "flags": list(self.flags),
            "real": self.entries.real.tolist(),
            "imag": self.entries.imag.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TruncatedOperator":
        m = np.asarray(d["real"], dtype=float) + 1j * np.asarray(d["imag"], dtype=float)
        return cls(m, d["label"], d["valid_interior"], tuple(d.get("flags", ())))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_csc_text(self) -> str:
        """Column-compressed text: a header, then per column ``col j nnz`` and
        ``i re im`` lines for its nonzero entries."""
        lines = [f"# {self.label} dim={self.dim} valid_interior={self.valid_interior}"]
        for j in range(self.dim):
            rows = np.flatnonzero(self.entries[:, j])
            lines.append(f"col {j} {rows.size}")
            for i in rows:
                v = self.entries[i, j]
                lines.append(f"{i} {float(v.real)!r} {float(v.imag)!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csc_text(cls, text: str) -> "TruncatedOperator":
        lines = text.strip().splitlines()
        head = lines[0][2:].rsplit(" ", 2)
        label = head[0]
        dim = int(head[1].split("=")[1])
        vi = int(head[2].split("=")[1])
        m = np.zeros((dim, dim), dtype=complex)
        j = 0
        for line in lines[1:]:
            parts = line.split()
            if parts[0] == "col":
                j = int(parts[1])
            else:
                m[int(parts[0]), j] = complex(float(parts[1]), float(parts[2]))
        return cls(m, label, vi)


def _match(X: TruncatedOperator, Y: TruncatedOperator) -> None:
    if X.dim != Y.dim:
        raise FamilyDomainError(f"dimension mismatch: {X.dim} vs {Y.dim}")


def _check_N(N: int) -> None:
    if N < 1:
        raise FamilyDomainError("truncation N must be at least 1")


def _family_dims(family: Family, N: int) -> None:
    _check_N(N)
    if N + 1 > family.dimension():
        raise FamilyDomainError(
            f"N + 1 = {N + 1} exceeds the dimension {int(family.dimension())} of {format_family(family)}")


# ---------------------------------------------------------------------------
# ladders


def ladder_matrices(N: int):
    """(a, a^dag, n) on span{|0>, ..., |N>}."""
    _check_N(N)
    a = np.diag(np.sqrt(np.arange(1, N + 1, dtype=float)), 1).astype(complex)
    num = np.diag(np.arange(N + 1, dtype=float)).astype(complex)
    return (TruncatedOperator(a, "a", N - 1),
            TruncatedOperator(a.conj().T, "a^dag", N - 1),
            TruncatedOperator(num, "n", N))


def _phase_steps(e: np.ndarray, alpha: float | None) -> np.ndarray:
    if not alpha:
        return np.ones(e.size - 1, dtype=complex)
    return np.exp(1j * alpha * np.diff(e))


def deformed_ladder(family: Family, N: int, alpha: float | None = None):
    """(A, A^dag) with A|n> = sqrt(e_n) e^{i alpha (e_n - e_{n-1})} |n-1>."""
    _family_dims(family, N)
    e = family.energy_table(N)
    sub = np.sqrt(e[1:]) * _phase_steps(e, alpha)
    A = np.diag(sub, 1)
    tag = f"A[{format_family(family)}]" + (f"(alpha={alpha!r})" if alpha else "")
    A_op = TruncatedOperator(A, tag, N - 1)
    return A_op, A_op.dag()


def conjugate_ladder(family: Family, N: int, alpha: float | None = None):
    """(B, B^dag) with B|n> = (n / sqrt(e_n)) e^{i alpha (e_n - e_{n-1})} |n-1>.

    B carries the same phase as A so that [A, B^dag] = 1 on the interior; in
    the generator z B^dag - conj(z) A this makes B^dag carry -alpha.
    """
    _family_dims(family, N)
    e = family.energy_table(N)
    bad = np.flatnonzero(~(e[1:] > 0))
    if bad.size:
        raise SingularityError(f"f(n) vanishes at n = {int(bad[0]) + 1} for {format_family(family)}")
    ns = np.arange(1, N + 1, dtype=float)
    sub = ns / np.sqrt(e[1:]) * _phase_steps(e, alpha)
    tag = f"B[{format_family(family)}]" + (f"(alpha={alpha!r})" if alpha else "")
    B_op = TruncatedOperator(np.diag(sub, 1), tag, N - 1)
    return B_op, B_op.dag()


def hamiltonian(family: Family, N: int, variant: str = "normal_ordered") -> TruncatedOperator:
    """Diagonal Hamiltonian: A^dag A (normal_ordered) or (A A^dag + A^dag A)/2 (manko)."""
    _family_dims(family, N)
    if variant == "normal_ordered":
        e = family.energy_table(N)
        return TruncatedOperator(np.diag(e).astype(complex), f"H[{format_family(family)}]", N)
    if variant != "manko":
        raise ValueError("variant must be 'normal_ordered' or 'manko'")
    if N + 2 <= family.dimension():
        e = family.energy_table(N + 1)
        diag = 0.5 * (e[1:] + e[:-1])
        return TruncatedOperator(np.diag(diag).astype(complex), f"H_manko[{format_family(family)}]", N)
    e = family.energy_table(N)
    nxt = np.append(e[1:], 0.0)
    diag = 0.5 * (nxt + e)
    return TruncatedOperator(np.diag(diag).astype(complex), f"H_manko[{format_family(family)}]",
                             N - 1, ("top_entry_missing_f(N+1)",))


def diagonal_transform(family: Family, N: int, kind: str = "T",
                       alpha: float | None = None) -> TruncatedOperator:
    """T = sqrt(n!/rho(n)), its inverse, or S(alpha) = exp(-i alpha e_n)."""
    _family_dims(family, N)
    ns = np.arange(N + 1, dtype=float)
    if kind in ("T", "T_inverse"):
        log_t = 0.5 * (gammaln(ns + 1.0) - family.log_rho_table(N))
        if kind == "T_inverse":
            log_t = -log_t
        return TruncatedOperator(np.diag(np.exp(log_t)).astype(complex),
                                 f"{kind}[{format_family(family)}]", N)
    if kind == "S":
        if alpha is None:
            raise ValueError("S needs alpha")
        e = family.energy_table(N)
        return TruncatedOperator(np.diag(np.exp(-1j * alpha * e)),
                                 f"S[{format_family(family)}](alpha={alpha!r})", N)
    raise ValueError("kind must be 'T', 'T_inverse' or 'S'")


def displacement_interior(N: int, z: complex) -> int:
    return max(N - math.ceil(8.0 * abs(z) * math.sqrt(N)), 0)


def displacement(family: Family, z: complex, N: int, kind: str = "D",
                 alpha: float | None = None) -> TruncatedOperator:
    """exp(z B^dag - conj(z) A) (kind "D") or exp(z A^dag - conj(z) B) ("D_tilde")."""
    A, Ad = deformed_ladder(family, N, alpha)
    B, Bd = conjugate_ladder(family, N, alpha)
    z = complex(z)
    if kind == "D":
        G = z * Bd.entries - z.conjugate() * A.entries
    elif kind == "D_tilde":
        G = z * Ad.entries - z.conjugate() * B.entries
    else:
        raise ValueError("kind must be 'D' or 'D_tilde'")
    # scaling-and-squaring (Pade): the series is summed on G / 2^s with s taken
    # from the 1-norm, so large generators (e.g. Penson-Solomon) stay convergent
    M = scipy.linalg.expm(G)
    if not np.all(np.isfinite(M)):
        raise TruncationError("matrix exponential overflowed", math.inf)
    return TruncatedOperator(M, f"{kind}[{format_family(family)}](z={z!r})",
                             displacement_interior(N, z))


def _triangular_shift(N: int, x: float, upper: bool) -> np.ndarray:
    """Entries x^(d) / d! * sqrt(hi! / lo!) for d = hi - lo >= 0."""
    idx = np.arange(N + 1)
    hi, lo = (idx[None, :], idx[:, None]) if upper else (idx[:, None], idx[None, :])
    d = hi - lo
    mask = d >= 0
    dd = np.where(mask, d, 0)
    with np.errstate(divide="ignore"):
        log_mag = (dd * (math.log(abs(x)) if x != 0 else 0.0) - gammaln(dd + 1.0)
                   + 0.5 * (gammaln(hi + 1.0) - gammaln(lo + 1.0)))
    sign = np.where((dd % 2 == 1) & (x < 0), -1.0, 1.0)
    out = np.where(mask, sign * np.exp(log_mag), 0.0)
    if x == 0:
        out = np.eye(N + 1)
    return out


def exp_shift(N: int, kind: str, param: float) -> TruncatedOperator:
    """exp(lambda a^dag) ("raise", lower triangular) or exp(mu a) ("lower")."""
    _check_N(N)
    if kind == "raise":
        return TruncatedOperator(_triangular_shift(N, float(param), upper=False).astype(complex),
                                 f"exp({param!r} a^dag)", N)
    if kind == "lower":
        # exp(mu a) needs components above N; rows near the top are truncated
        return TruncatedOperator(_triangular_shift(N, float(param), upper=True).astype(complex),
                                 f"exp({param!r} a)", N)
    raise ValueError("kind must be 'raise' or 'lower'")


def commutator(X: TruncatedOperator, Y: TruncatedOperator) -> TruncatedOperator:
    _match(X, Y)
    return TruncatedOperator(X.entries @ Y.entries - Y.entries @ X.entries,
                             f"[{X.label},{Y.label}]",
                             min(X.valid_interior, Y.valid_interior) - 1,
                             X.flags + Y.flags)


def jaynes_cummings_h(family: Family, g: float, N: int) -> TruncatedOperator:
    """g (A x |a><b| + A^dag x |b><a|) in the basis (|a,0..N>, |b,0..N>)."""
    A, Ad = deformed_ladder(family, N)
    n1 = N + 1
    H = np.zeros((2 * n1, 2 * n1), dtype=complex)
    H[:n1, n1:] = g * A.entries
    H[n1:, :n1] = g * Ad.entries
    return TruncatedOperator(H, f"H_JC[{format_family(family)}](g={g!r})", N - 1)


# ---------------------------------------------------------------------------
# states in the shifted bases


def canonical_vector(z: complex, N: int) -> np.ndarray:
    """Truncated canonical coherent state exp(-|z|^2/2) z^n / sqrt(n!)."""
    ns = np.arange(N + 1)
    z = complex(z)
    if z == 0:
        v = np.zeros(N + 1, dtype=complex)
        v[0] = 1.0
        return v
    log_mod = ns * math.log(abs(z)) - 0.5 * gammaln(ns + 1.0) - 0.5 * abs(z) ** 2
    return np.exp(log_mod) * np.exp(1j * np.angle(z) * ns)


def photon_added_state(lam: float, z: complex, N: int) -> np.ndarray:
    """exp(lambda a^dag) applied to the canonical state, unnormalized."""
    return exp_shift(N, "raise", lam).entries @ canonical_vector(z, N)


def binomial_state(mu: float, z: complex, N: int) -> np.ndarray:
    """exp(mu a) applied to the canonical state (= exp(mu z) |z>), unnormalized."""
    return exp_shift(N, "lower", mu).entries @ canonical_vector(z, N)


def bound_binomial_state(mu: float, m: int, N: int | None = None) -> np.ndarray:
    """exp(mu a)|m> / sqrt(L_m(-mu^2)); unit norm, supported on 0..m."""
    N = m if N is None else N
    if N < m:
        raise FamilyDomainError("bound binomial state needs N >= m")
    basis = np.zeros(N + 1, dtype=complex)
    basis[m] = 1.0
    v = exp_shift(max(N, 1), "lower", mu).entries[: N + 1, : N + 1] @ basis
    return v / math.sqrt(laguerre(m, -mu * mu))
