import cmath
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gencs.duality import (GKLabel, dual_generalized_gk_state, dual_gk_state, dual_weight_from_spectrum,
                           generalized_gk_state, gk_state, stabilize)
from gencs.families import (Canonical, DualOf, HydrogenLike, InfiniteWell, Morse, PoschlTeller,
                            convergence_radius, dimension, parse_family)
from gencs.fock import TruncationPolicy, build_state, normalization_value, overlap, state_from_json, state_to_json
from gencs.opspace import deformed_ladder, diagonal_transform

from conftest import ALL_FAMILIES, BASE_FAMILIES


def _J(fam):
    R = convergence_radius(fam)
    return 1.0 if math.isinf(R) else 0.16 * R * R


class TestLabel:
    def test_z_and_alpha(self):
        lab = GKLabel(J=4.0, theta=math.pi / 2, t=0.5, omega=2.0)
        assert lab.z == pytest.approx(2j)
        assert lab.alpha == pytest.approx(1.0)

    @pytest.mark.parametrize("kw", [{"J": -1.0}, {"J": 1.0, "omega": 0.0}])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            GKLabel(**kw)


class TestGK:
    def test_canonical_coefficients(self):
        gamma = 0.8
        s = gk_state(Canonical(), GKLabel(J=1.0, t=gamma))
        ns = np.arange(s.coefficients.size)
        want = np.exp(-0.5) * np.exp(-1j * ns * gamma) / np.sqrt([math.factorial(n) for n in ns])
        np.testing.assert_allclose(s.coefficients, want, atol=1e-12)
        assert s.coefficients[0].real == pytest.approx(math.exp(-0.5))

    def test_vacuum(self):
        s = gk_state(PoschlTeller(3), GKLabel(J=0.0, t=1.0))
        assert abs(s.coefficients[0]) == pytest.approx(1.0) and np.all(s.coefficients[1:] == 0)

    def test_theta_rejected(self):
        with pytest.raises(ValueError):
            gk_state(Canonical(), GKLabel(J=1.0, theta=0.1))

    @pytest.mark.parametrize("text", ALL_FAMILIES)
    def test_reduces_to_build_state(self, text):
        fam = parse_family(text)
        lab = GKLabel(J=_J(fam), theta=0.7)
        a = generalized_gk_state(fam, lab)
        b = build_state(fam, lab.z)
        np.testing.assert_allclose(a.coefficients, b.coefficients, atol=1e-13)

    def test_json_extension(self):
        s = generalized_gk_state(HydrogenLike(), GKLabel(J=0.3, theta=0.2, t=1.5, omega=2.0))
        text = state_to_json(s)
        for k in ("J", "theta", "t", "omega"):
            assert f'"{k}"' in text
        assert state_from_json(text) == s


class TestDual:
    def test_canonical_self_dual(self):
        lab = GKLabel(J=1.3, theta=0.4, t=0.9)
        a = dual_generalized_gk_state(Canonical(), lab)
        b = generalized_gk_state(Canonical(), lab)
        np.testing.assert_allclose(a.coefficients, b.coefficients, atol=1e-15)
        np.testing.assert_allclose(dual_gk_state(Canonical(), 1.1, 0.3).coefficients,
                                   build_state(Canonical(), 1.1, 0.3).coefficients, atol=1e-15)

    @pytest.mark.parametrize("text", BASE_FAMILIES)
    def test_reduction_to_dual_cs(self, text):
        fam = parse_family(text)
        dual = DualOf(fam) if not isinstance(fam, Canonical) else fam
        lab = GKLabel(J=_J(dual))
        np.testing.assert_allclose(dual_generalized_gk_state(fam, lab).coefficients,
                                   build_state(dual, lab.z).coefficients, atol=1e-13)

    @pytest.mark.parametrize("text", BASE_FAMILIES)
    def test_mu_from_spectrum(self, text):
        fam = parse_family(text)
        d = dimension(fam)
        n = 40 if math.isinf(d) else int(d) - 1
        np.testing.assert_allclose(dual_weight_from_spectrum(fam, n), DualOf(fam).log_rho_table(n),
                                   rtol=1e-11, atol=1e-11)

    @pytest.mark.parametrize("text", ALL_FAMILIES)
    def test_eps_e(self, text):
        fam = parse_family(text)
        d = dimension(fam)
        n = 50 if math.isinf(d) else int(d) - 1
        e = fam.energy_table(n)
        eps = DualOf(fam).energy_table(n) if not isinstance(fam, DualOf) else fam.inner.energy_table(n)
        ns = np.arange(1, n + 1)
        np.testing.assert_allclose(e[1:] * eps[1:], ns.astype(float) ** 2, rtol=1e-11)

    @pytest.mark.parametrize("text", ["poschl_teller(nu=3)", "infinite_well", "hydrogen_like", "bg(kappa=1)",
                                      "morse(M=8)"])
    def test_dual_ladder_eigen(self, text):
        fam = parse_family(text)
        dual = DualOf(fam)
        R = convergence_radius(dual)
        z = 0.3 * cmath.exp(0.5j) if math.isinf(R) else 0.3 * R * cmath.exp(0.5j)
        if math.isfinite(dimension(fam)):
            # finite space: A z-eigenstate holds only below the top level
            s = dual_gk_state(fam, z, 0.8)
            A, _ = deformed_ladder(dual, s.truncation_N, 0.8)
            r = A @ s.coefficients - z * s.coefficients
            assert np.linalg.norm(r[:-1]) < 1e-8
            return
        N = 256
        s = dual_gk_state(fam, z, 0.8, TruncationPolicy(fixed_n=N))
        A, _ = deformed_ladder(dual, N, 0.8)
        r = A @ s.coefficients - z * s.coefficients
        assert np.linalg.norm(r[:N]) < 1e-8

    def test_overlap_series(self):
        fam = PoschlTeller(3)
        dual = DualOf(fam)
        (z1, a1), (z2, a2) = (0.3 + 0.2j, 0.4), (-0.1 + 0.5j, 1.3)
        got = overlap(dual_gk_state(fam, z1, a1), dual_gk_state(fam, z2, a2))
        # direct series: sum (conj z1 z2)^n e^{i(a1-a2) eps_n} / mu(n), normalized
        mp.mp.dps = 30
        nu = 3

        def mu(n):
            return mp.factorial(n) * mp.gamma(nu + 1) / mp.gamma(n + nu + 1)

        def eps(n):
            return mp.mpf(n) / (n + nu)

        x = mp.mpc(z1.conjugate() * z2)
        series = mp.nsum(lambda n: x**n * mp.exp(1j * (a1 - a2) * eps(n)) / mu(n), [0, mp.inf])
        n1 = (1 - abs(z1) ** 2) ** -(nu + 1)
        n2 = (1 - abs(z2) ** 2) ** -(nu + 1)
        want = complex(series / mp.sqrt(n1 * n2))
        assert abs(got - want) < 1e-10

    def test_morse_dual_normalization(self):
        assert normalization_value(DualOf(Morse(3)), 1.0) == pytest.approx(1.728, rel=1e-12)
        s = dual_gk_state(Morse(3), 1.0, 0.5)
        assert s.tail_mass == 0 and np.linalg.norm(s.coefficients) == pytest.approx(1.0, abs=1e-14)


class TestStabilize:
    def test_zero(self):
        s = build_state(InfiniteWell(), 0.5)
        assert stabilize(s, 0.0) is s

    @pytest.mark.parametrize("text", ALL_FAMILIES)
    def test_matches_S_operator(self, text):
        fam = parse_family(text)
        lab = GKLabel(J=_J(fam), theta=0.3, t=0.2)
        s = generalized_gk_state(fam, lab)
        if s.truncation_N == 0:
            # zero radius: only the vacuum exists, and e_0 = 0 leaves it alone
            assert stabilize(s, 1.1).coefficients[0] == s.coefficients[0]
            return
        S = diagonal_transform(fam, s.truncation_N, "S", alpha=1.1)
        np.testing.assert_allclose(stabilize(s, 1.1).coefficients, S @ s.coefficients, atol=1e-13)

    def test_time_bookkeeping(self):
        s = generalized_gk_state(HydrogenLike(), GKLabel(J=0.2, t=0.5, omega=2.0))
        moved = stabilize(s, 1.0)
        assert moved.gk_label[2] == pytest.approx(1.0)
        assert moved.stabilization_alpha == pytest.approx(2.0)
        direct = generalized_gk_state(HydrogenLike(), GKLabel(J=0.2, t=1.0, omega=2.0))
        np.testing.assert_allclose(moved.coefficients, direct.coefficients, atol=1e-13)

    @settings(max_examples=30, deadline=None)
    @given(st.floats(0.0, 0.8), st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3))
    def test_temporal_stability_property(self, r, theta, alpha, t):
        fam = DualOf(HydrogenLike())
        z = r * cmath.exp(1j * theta)
        a = stabilize(build_state(fam, z, alpha), t)
        b = build_state(fam, z, alpha + t)
        np.testing.assert_allclose(a.coefficients, b.coefficients, atol=1e-12)
