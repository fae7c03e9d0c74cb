import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gencs.families import (BarutGirardello, Canonical, DualOf, GilmorePerelomov, HydrogenLike, InfiniteWell,
                            Morse, PoschlTeller, parse_family)
from gencs.verify import (SUITES, CanonicalWeight, CustomWeight, IWWeight, PTWeight, VerifyReport,
                          closed_form_dual_moments, default_J, make_report, published_f_crosscheck,
                          reports_table, reports_to_jsonl, run_suite, spectrum_diagnostics,
                          verify_action_identity, verify_algebra, verify_duality, verify_eigenstate,
                          verify_moment_targets, verify_moments, verify_temporal_stability)

from conftest import ALL_FAMILIES


def _by_n(reports):
    return {r.n: r for r in reports}


class TestReports:
    @settings(max_examples=50, deadline=None)
    @given(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3), st.floats(1e-14, 1.0), st.sampled_from(["abs", "rel"]))
    def test_passed_is_pure(self, target, computed, tol, mode):
        r = make_report("x", target, computed, tol, mode=mode)
        res = r.abs_residual if mode == "abs" else r.rel_residual
        assert r.passed == (res <= tol)

    def test_status_and_failure(self):
        ok = make_report("a", 1.0, 1.0, 1e-12)
        bad = make_report("b", 1.0, 2.0, 1e-12)
        assert ok.status == "pass" and not ok.is_failure
        assert bad.status == "fail" and bad.is_failure

    def test_serialization(self):
        reps = [make_report("a", 1.0, 1.0 + 1e-13, 1e-12, n=3), make_report("c", 1j, 1j, 1e-12)]
        lines = reports_to_jsonl(reps).splitlines()
        assert len(lines) == 2
        d = json.loads(lines[1])
        assert d["target"] == [0.0, 1.0] and d["status"] == "pass"
        table = reports_table(reps)
        assert "check" in table.splitlines()[0] and len(table.splitlines()) == 3


class TestMoments:
    def test_iw_example(self):
        reps = _by_n(verify_moments(IWWeight(), DualOf(InfiniteWell()), 10))
        assert all(r.passed for r in reps.values())
        assert DualOf(InfiniteWell()).log_rho_at([3])[0] == pytest.approx(math.log(0.1), rel=1e-14)

    def test_pt_example(self):
        reps = verify_moments(PTWeight(nu=3), DualOf(PoschlTeller(3)), 10)
        assert len(reps) == 11 and all(r.passed for r in reps)
        assert math.exp(DualOf(PoschlTeller(3)).log_rho_at([2])[0]) == pytest.approx(0.1, rel=1e-14)

    def test_canonical_weight(self):
        reps = verify_moments(CanonicalWeight(), Canonical(), 20)
        assert all(r.passed and r.rel_residual < 1e-8 for r in reps)

    def test_custom_weight(self):
        # the nu = 5 PT weight passed as a plain callback
        w = CustomWeight(support=1.0, func=lambda x: 5.0 * (1 - x) ** 4)
        assert all(r.passed for r in verify_moments(w, DualOf(PoschlTeller(5)), 8))

    def test_wrong_weight_fails(self):
        reps = verify_moments(IWWeight(), DualOf(PoschlTeller(3)), 4)
        assert not all(r.passed for r in reps)

    def test_support_mismatch(self):
        with pytest.raises(ValueError):
            verify_moments(CanonicalWeight(), DualOf(InfiniteWell()), 3)

    def test_closed_form_targets(self):
        h = np.exp(closed_form_dual_moments(HydrogenLike(), 3))
        np.testing.assert_allclose(h, [1.0, 4 / 3, 6.0, 57.6], rtol=1e-13)
        reps = verify_moment_targets(HydrogenLike(), 20)
        assert all(r.passed for r in reps)
        reps = verify_moment_targets(Morse(3), 10)
        assert len(reps) == 4 and all(r.passed for r in reps)

    def test_no_target_skipped(self):
        (r,) = verify_moment_targets(BarutGirardello(1), 5)
        assert r.skipped and not r.is_failure


class TestEigenstate:
    def test_vacuum(self):
        r = verify_eigenstate(Canonical(), 0)
        assert r.computed == 0 and r.passed

    def test_bg(self):
        assert verify_eigenstate(BarutGirardello(1), 0.4, N=128).computed < 1e-9

    def test_gk_pt(self):
        assert verify_eigenstate(PoschlTeller(3), 0.4, alpha=2.0).computed < 1e-9


class TestAction:
    def test_canonical(self):
        r = verify_action_identity(Canonical(), 2.0)
        assert r.passed and r.computed == pytest.approx(2.0, abs=1e-9)

    def test_pt(self):
        assert verify_action_identity(PoschlTeller(3), 0.5, tol=1e-9).passed

    def test_morse_skipped(self):
        r = verify_action_identity(Morse(3), 0.5)
        assert r.skipped and "finite" in r.notes

    @pytest.mark.parametrize("text", ["canonical", "poschl_teller(nu=3)", "infinite_well", "hydrogen_like",
                                      "bg(kappa=1)", "gp(kappa=1)", "mittag_leffler(alpha=2,beta=1)",
                                      "penson_solomon(q=0.8)"])
    def test_default_J(self, text):
        fam = parse_family(text)
        assert verify_action_identity(fam, default_J(fam)).passed


class TestTemporal:
    def test_t_zero(self):
        assert verify_temporal_stability(PoschlTeller(3), 0.3, 1.0, 0.0).computed == 0

    def test_pt(self):
        assert verify_temporal_stability(PoschlTeller(3), 0.3, 1.0, 0.7).computed < 1e-12

    def test_dual_hydrogen(self):
        r = verify_temporal_stability(DualOf(HydrogenLike()), 0.3, 1.0, 0.7)
        assert r.passed and "stabilize vs S(t)" in r.notes


class TestAlgebra:
    def test_canonical(self):
        assert all(r.passed for r in verify_algebra(Canonical(), 16))

    def test_iw_value(self):
        fam = InfiniteWell()
        e = fam.energy_table(4)
        assert e[3] - e[2] == pytest.approx(7.0)
        assert all(r.passed for r in verify_algebra(fam, 16))

    def test_gp_pair(self):
        reps = verify_algebra(GilmorePerelomov(1), 32)
        names = [r.check_name for r in reps]
        assert any(n.startswith("[A_gp,A_gp^dag]=GP4") for n in names)
        assert all(r.passed for r in reps)
        n = 1
        assert (2 - 1) / ((n + 2) * (n + 1)) == pytest.approx(1 / 6)

    def test_small_N(self):
        with pytest.raises(ValueError):
            verify_algebra(Canonical(), 3)

    def test_detects_wrong_identity(self):
        # an impossible tolerance must surface as failing reports
        reps = verify_algebra(PoschlTeller(3), 16, tol=1e-30)
        assert any(not r.passed for r in reps)


class TestDuality:
    def test_canonical(self):
        reps = verify_duality(Canonical(), 30)
        assert all(r.passed for r in reps)
        assert any(r.check_name.startswith("dual(canonical)=canonical") for r in reps)

    def test_bg_gp(self):
        reps = verify_duality(BarutGirardello(1.5), 50)
        assert any(r.check_name == "dual(bg(kappa=1.5))=gp(kappa=1.5)" for r in reps)
        assert all(r.passed for r in reps)

    def test_pt_value(self):
        e2 = PoschlTeller(3).energy_table(2)[2]
        eps2 = DualOf(PoschlTeller(3)).energy_table(2)[2]
        assert eps2 == pytest.approx(0.4) and eps2 * e2 == pytest.approx(4.0)

    @pytest.mark.parametrize("text", ALL_FAMILIES)
    def test_all_families(self, text):
        assert all(r.passed for r in verify_duality(parse_family(text), 50))


class TestDiagnostics:
    def test_canonical(self):
        r = spectrum_diagnostics(Canonical(), 30)
        assert "monotone_up_to=30" in r.notes and r.passed

    def test_morse(self):
        r = spectrum_diagnostics(Morse(3), 50)
        assert "monotone_up_to=2" in r.notes and "dimension=4" in r.notes

    def test_hydrogen(self):
        r = spectrum_diagnostics(HydrogenLike(), 50)
        assert "monotone_up_to=50" in r.notes and "radius=1.0" in r.notes

    @pytest.mark.parametrize("text,status", [("bg(kappa=1)", "pass"), ("gp(kappa=1.5)", "pass"),
                                             ("penson_solomon(q=0.8)", "pass"),
                                             ("tricomi2(lambda=0.5,beta=2)", "pass"),
                                             ("hypergeometric(alphas=[1],betas=[2])", "flagged"),
                                             ("tricomi1(p=0.5)", "flagged"),
                                             ("landau_level(m=1,alpha=0.5)", "flagged"),
                                             ("poschl_teller(nu=3)", "skipped")])
    def test_published_f(self, text, status):
        r = published_f_crosscheck(parse_family(text))
        assert r.status == status and not r.is_failure


@pytest.mark.parametrize("suite", SUITES + ("all",))
def test_run_suite_clean(suite):
    reps = run_suite(PoschlTeller(3), suite)
    assert reps and not any(r.is_failure for r in reps)


def test_run_suite_unknown():
    with pytest.raises(ValueError):
        run_suite(Canonical(), "everything")


def test_report_type():
    assert isinstance(run_suite(Canonical(), "spectrum")[0], VerifyReport)
