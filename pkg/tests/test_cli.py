import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from gencs.cli import Command, UsageError, main, parse, run
from gencs.families import GilmorePerelomov, PoschlTeller, parse_family
from gencs.fock import build_state, state_from_json, state_to_json
from gencs.opspace import TruncatedOperator


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestParse:
    def test_state(self):
        cmd = parse(["state", "--family", "poschl_teller(nu=3)", "--z", "0.4", "--alpha", "1.0"])
        assert isinstance(cmd, Command) and cmd.subcommand == "state"
        assert cmd.options["family"] == PoschlTeller(3)
        assert cmd.options["z"] == 0.4 and cmd.options["alpha"] == 1.0

    def test_verify(self):
        cmd = parse(["verify", "--suite", "all", "--family", "bg(kappa=1)"])
        assert cmd.subcommand == "verify" and cmd.options["suite"] == "all"

    def test_complex_z(self):
        assert parse(["state", "--family", "canonical", "--z", "0.1,-0.2"]).options["z"] == complex(0.1, -0.2)

    @pytest.mark.parametrize("argv", [
        ["state", "--family", "nosuch()"],
        ["state", "--family", "canonical", "--z", "1", "--bogus"],
        ["state", "--family", "kps_custom()", "--z", "1"],
        ["state", "--family", "canonical"],
        ["state", "--family", "canonical", "--z", "1", "--J", "1"],
        ["op", "--kind", "deformed"],
        ["op", "--kind", "displacement", "--family", "canonical"],
        ["frobnicate"],
        [],
    ])
    def test_usage_errors(self, argv, capsys):
        with pytest.raises(UsageError):
            parse(argv)
        assert main(argv) == 2


class TestRun:
    def test_state_round_trip(self, capsys):
        code, out, _ = _run(capsys, "state", "--family", "poschl_teller(nu=3)", "--z", "0.4,0.1", "--alpha", "1.0")
        assert code == 0
        s = state_from_json(out)
        assert s == build_state(PoschlTeller(3), complex(0.4, 0.1), 1.0)
        assert state_to_json(s) == out.strip()

    def test_evolve_fields(self, capsys):
        code, out, _ = _run(capsys, "evolve", "--family", "hydrogen_like", "--J", "0.2", "--theta", "0.3",
                            "--t", "1.5", "--dual")
        d = json.loads(out)
        assert code == 0 and {"J", "theta", "t", "omega"} <= set(d)
        assert d["family"] == "dual(hydrogen_like)"

    def test_stats_canonical(self, capsys):
        code, out, _ = _run(capsys, "stats", "--family", "canonical", "--z", "1.2")
        d = json.loads(out)
        assert code == 0 and abs(d["mandel_q"]) < 1e-10

    def test_stats_scan_csv(self, capsys):
        code, out, _ = _run(capsys, "stats", "--family", "gp(kappa=1)", "--scan", "0.5,5", "--format", "csv")
        rows = list(csv.reader(io.StringIO(out)))
        assert code == 0 and len(rows) == 6
        assert all(float(r[-1]) >= 0 for r in rows[1:])

    def test_overlap(self, capsys):
        code, out, _ = _run(capsys, "overlap", "--family", "canonical", "--z", "1", "--z2", "-1")
        d = json.loads(out)
        val = d["overlap"]
        assert code == 0 and val[0] == pytest.approx(np.exp(-2), rel=1e-9)

    def test_verify_moments(self, capsys):
        code, out, _ = _run(capsys, "verify", "--suite", "moments", "--family", "infinite_well", "--n-max", "10")
        reps = [json.loads(line) for line in out.splitlines()]
        assert code == 0 and len(reps) == 11 and all(r["status"] == "pass" for r in reps)

    def test_verify_all_table(self, capsys):
        code, out, _ = _run(capsys, "verify", "--family", "hypergeometric(alphas=[1],betas=[2])", "--format",
                            "table")
        assert code == 0 and "flagged" in out

    def test_verify_failure_exit(self, capsys, monkeypatch):
        import gencs.verify as v
        from gencs.verify import make_report
        monkeypatch.setattr(v, "run_suite", lambda *a, **k: [make_report("forced", 0.0, 1.0, 1e-12)])
        code, _, _ = _run(capsys, "verify", "--family", "canonical", "--suite", "spectrum")
        assert code == 1

    def test_dual_table(self, capsys):
        code, out, _ = _run(capsys, "dual", "--family", "bg(kappa=1)", "--n-max", "5", "--format", "table")
        assert code == 0
        lines = out.strip().splitlines()
        head = lines[0].split()
        mu = head.index("mu")
        partner = [i for i, h in enumerate(head) if h.startswith("rho[")][0]
        gp = GilmorePerelomov(1)
        for n, line in enumerate(lines[1:]):
            cells = line.split()
            assert float(cells[mu]) == pytest.approx(float(cells[partner]), rel=1e-9)
            assert float(cells[mu]) == pytest.approx(np.exp(gp.log_rho_at([n])[0]), rel=1e-9)

    def test_op_json_and_csc(self, capsys):
        code, out, _ = _run(capsys, "op", "--kind", "deformed", "--family", "bg(kappa=1)", "--dim", "6")
        op = TruncatedOperator.from_dict(json.loads(out))
        assert code == 0 and op.dim == 6 and op.entries[0, 1].real == pytest.approx(np.sqrt(2))
        code, out, _ = _run(capsys, "op", "--kind", "deformed", "--family", "bg(kappa=1)", "--dim", "6",
                            "--format", "table")
        np.testing.assert_array_equal(TruncatedOperator.from_csc_text(out).entries, op.entries)

    @pytest.mark.parametrize("extra", [
        ["--kind", "ladder"], ["--kind", "b", "--family", "gp(kappa=1)"],
        ["--kind", "hamiltonian", "--family", "morse(M=3)", "--variant", "manko", "--dim", "4"],
        ["--kind", "displacement", "--family", "pt(nu=3)", "--z", "0.2,0.1", "--tilde"],
        ["--kind", "t", "--family", "infinite_well", "--transform", "T_inverse"],
        ["--kind", "s", "--family", "hydrogen_like", "--alpha", "0.3"],
        ["--kind", "jc", "--family", "canonical", "--g", "0.2"],
        ["--kind", "shift", "--shift", "lower", "--param", "0.4"],
    ])
    def test_op_kinds(self, capsys, extra):
        code, out, _ = _run(capsys, "op", *extra)
        assert code == 0 and "real" in json.loads(out)

    def test_catalog(self, capsys):
        code, out, _ = _run(capsys, "catalog", "--format", "json")
        names = {r["name"] for r in json.loads(out)}
        assert code == 0 and "morse" in names

    def test_numeric_error(self, capsys):
        code, out, _ = _run(capsys, "state", "--family", "gp(kappa=1)", "--z", "1.5")
        rec = json.loads(out)
        assert code == 3 and rec["error"] == "DivergenceError"

    def test_truncation_error_record(self, capsys):
        code, out, _ = _run(capsys, "state", "--family", "canonical", "--z", "20", "--n-max", "100")
        rec = json.loads(out)
        assert code == 3 and rec["tail_mass"] > 0

    def test_out_file(self, tmp_path, capsys):
        path = tmp_path / "s.json"
        code, out, _ = _run(capsys, "state", "--family", "canonical", "--z", "0.5", "--out", str(path))
        assert code == 0 and out == ""
        assert state_from_json(path.read_text()).family == parse_family("canonical")

    @pytest.mark.parametrize("argv", [
        ["state", "--family", "dual(poschl_teller(nu=3))", "--z", "0.3,0.2", "--alpha", "0.7"],
        ["stats", "--family", "penson_solomon(q=0.8)", "--z", "0.6", "--format", "csv"],
        ["verify", "--family", "tricomi1(p=0.5)", "--suite", "all"],
    ])
    def test_deterministic(self, capsys, argv):
        _, first, _ = _run(capsys, *argv)
        _, second, _ = _run(capsys, *argv)
        assert first == second and first


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "gencs", "state", "--family", "canonical", "--z", "0"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert json.loads(res.stdout)["coefficients"][0] == [1.0, 0.0]
