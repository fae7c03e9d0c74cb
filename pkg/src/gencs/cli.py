"""Command-line front end.

Family grammar (shared by every ``--family`` flag)::

    family  := name | name "(" [param ("," param)*] ")" | "dual(" family ")"
    param   := key "=" value
    value   := number | number "/" number | "[" [number ("," number)*] "]"

Names and aliases are listed by ``gencs catalog``; ``kps_custom`` takes a
Python callable and is not available here.

Exit codes: 0 success, 1 a verification check failed, 2 usage error,
3 numerical failure (an error record is written to the output).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import duality, fock, opspace, verify
from .families import (FamilyDomainError, FamilyParseError, catalog, convergence_radius,
                       dual_family, format_family, known_dual, parse_family)
from .fock import TruncationPolicy

EXIT_OK, EXIT_VERIFY_FAILED, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

SUBCOMMANDS = ("state", "stats", "overlap", "op", "verify", "dual", "evolve", "catalog")
OP_KINDS = ("ladder", "deformed", "b", "hamiltonian", "displacement", "t", "s", "jc", "shift")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class Command:
    subcommand: str
    options: dict = field(default_factory=dict)
    output: str | None = None
    format: str = "json"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _complex(text: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected re[,im], got {text!r}")


def _family(text: str):
    try:
        return parse_family(text)
    except (FamilyParseError, FamilyDomainError) as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _common(p: argparse.ArgumentParser, family_required: bool = True) -> None:
    p.add_argument("--family", type=_family, required=family_required)
    p.add_argument("--format", choices=("json", "csv", "table"), default="json")
    p.add_argument("--out", default=None, help="output path (default: stdout)")


def _state_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--z", type=_complex, default=None, help="re[,im]")
    p.add_argument("--J", type=float, default=None)
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--trunc-tol", type=float, default=1e-12)
    p.add_argument("--n-max", type=int, default=None, help="cap on the truncation index")


def build_parser() -> argparse.ArgumentParser:
    root = _Parser(prog="gencs", description="Generalized coherent states on truncated Fock spaces.")
    sub = root.add_subparsers(dest="subcommand", parser_class=_Parser)

    p = sub.add_parser("state", help="build a coherent state")
    _common(p)
    _state_flags(p)

    p = sub.add_parser("stats", help="photon statistics of a state, or a Mandel Q scan")
    _common(p)
    _state_flags(p)
    p.add_argument("--scan", default=None, metavar="ZMAX,STEPS",
                   help="emit |z| vs <n>, Q over a grid instead of one state")

    p = sub.add_parser("overlap", help="overlap of two states of one family")
    _common(p)
    _state_flags(p)
    p.add_argument("--z2", type=_complex, required=True)
    p.add_argument("--alpha2", type=float, default=None)

    p = sub.add_parser("op", help="emit an operator matrix")
    _common(p, family_required=False)
    p.add_argument("--kind", choices=OP_KINDS, required=True)
    p.add_argument("--dim", type=int, default=16, help="matrix dimension N+1")
    p.add_argument("--z", type=_complex, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--variant", choices=("normal_ordered", "manko"), default="normal_ordered")
    p.add_argument("--transform", choices=("T", "T_inverse"), default="T")
    p.add_argument("--tilde", action="store_true", help="displacement: exp(z A^dag - conj(z) B)")
    p.add_argument("--shift", choices=("raise", "lower"), default="raise")
    p.add_argument("--param", type=float, default=0.5, help="shift: lambda or mu")
    p.add_argument("--g", type=float, default=1.0, help="jc coupling")

    p = sub.add_parser("verify", help="run verification suites")
    _common(p)
    p.add_argument("--suite", choices=verify.SUITES + ("all",), default="all")
    p.add_argument("--n-max", type=int, default=10)
    p.add_argument("--z", type=_complex, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--J", type=float, default=None)
    p.add_argument("--t", type=float, default=0.7)
    p.add_argument("--dim", type=int, default=65, help="matrix dimension N+1 for algebra checks")

    p = sub.add_parser("dual", help="weights and spectra of a family and its dual")
    _common(p)
    p.add_argument("--n-max", type=int, default=10)

    p = sub.add_parser("evolve", help="generalized Gazeau-Klauder state at (J, theta, t)")
    _common(p)
    _state_flags(p)
    p.add_argument("--dual", action="store_true")

    p = sub.add_parser("catalog", help="list families and parameter domains")
    p.add_argument("--format", choices=("json", "csv", "table"), default="table")
    p.add_argument("--out", default=None)
    return root


def parse(argv: list[str]) -> Command:
    ns = build_parser().parse_args(argv)
    if ns.subcommand is None:
        raise UsageError(f"a subcommand is required: {', '.join(SUBCOMMANDS)}")
    opts = {k: v for k, v in vars(ns).items() if k not in ("subcommand", "out", "format")}
    if ns.subcommand in ("state", "stats", "overlap", "evolve"):
        scan = ns.subcommand == "stats" and ns.scan is not None
        if ns.z is None and ns.J is None and not scan:
            raise UsageError("one of --z or --J is required")
        if ns.z is not None and ns.J is not None:
            raise UsageError("--z and --J are mutually exclusive")
    if ns.subcommand == "op" and ns.kind not in ("ladder", "shift") and ns.family is None:
        raise UsageError(f"op --kind {ns.kind} needs --family")
    if ns.subcommand == "op" and ns.kind == "displacement" and ns.z is None:
        raise UsageError("op --kind displacement needs --z")
    if ns.subcommand == "op" and ns.kind == "s" and ns.alpha is None:
        raise UsageError("op --kind s needs --alpha")
    return Command(ns.subcommand, opts, ns.out, ns.format)


# ---------------------------------------------------------------------------
# output helpers


def _num(x) -> list | float:
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def _csv(rows: list[list], header: list[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


def _table(rows: list[list], header: list[str]) -> str:
    def fmt(v):
        if isinstance(v, (float, np.floating)):
            return f"{float(v):.10g}"
        return str(v)
    cells = [header] + [[fmt(v) for v in r] for r in rows]
    widths = [max(len(c[i]) for c in cells) for i in range(len(header))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in cells) + "\n"


def _emit_rows(fmt: str, rows, header, payload) -> str:
    if fmt == "csv":
        return _csv(rows, header)
    if fmt == "table":
        return _table(rows, header)
    return json.dumps(payload) + "\n"


def _policy(o: dict) -> TruncationPolicy:
    return TruncationPolicy(tol=o.get("trunc_tol", 1e-12),
                            max_n=o["n_max"] if o.get("n_max") is not None else 512)


def _state_from_opts(o: dict, dual: bool = False):
    fam = dual_family(o["family"]) if dual else o["family"]
    if o.get("J") is not None or o.get("t"):
        J = o["J"] if o.get("J") is not None else abs(o["z"]) ** 2
        theta = o["theta"] if o.get("J") is not None else math.atan2(o["z"].imag, o["z"].real)
        label = duality.GKLabel(J, theta, o.get("t", 0.0), o.get("omega", 1.0))
        s = duality.generalized_gk_state(fam, label, _policy(o))
        if o.get("alpha"):
            s = duality.stabilize(s, o["alpha"])
        return s
    return fock.build_state(fam, o["z"], o.get("alpha"), _policy(o))


def _state_rows(s):
    return [[n, c.real, c.imag, abs(c) ** 2] for n, c in enumerate(s.coefficients)]


# ---------------------------------------------------------------------------
# subcommands


def _cmd_state(cmd: Command) -> tuple[str, int]:
    s = _state_from_opts(cmd.options)
    return _emit_rows(cmd.format, _state_rows(s), ["n", "re", "im", "prob"],
                      fock.state_to_dict(s)), EXIT_OK


def _cmd_evolve(cmd: Command) -> tuple[str, int]:
    o = dict(cmd.options)
    if o.get("J") is None:
        o["J"] = abs(o["z"]) ** 2
        o["theta"] = math.atan2(o["z"].imag, o["z"].real)
    fam = dual_family(o["family"]) if o["dual"] else o["family"]
    label = duality.GKLabel(o["J"], o["theta"], o["t"], o["omega"])
    s = duality.generalized_gk_state(fam, label, _policy(o))
    if o.get("alpha"):
        s = duality.stabilize(s, o["alpha"])
    return _emit_rows(cmd.format, _state_rows(s), ["n", "re", "im", "prob"],
                      fock.state_to_dict(s)), EXIT_OK


def _cmd_stats(cmd: Command) -> tuple[str, int]:
    o = cmd.options
    if o.get("scan"):
        try:
            zmax, steps = o["scan"].split(",")
            zmax, steps = float(zmax), int(steps)
        except ValueError:
            raise UsageError("--scan expects ZMAX,STEPS")
        rows = []
        for k in range(1, steps + 1):
            r = zmax * k / steps
            st = fock.photon_statistics(fock.build_state(o["family"], r, o.get("alpha"), _policy(o)))
            rows.append([r, st.mean_n, st.variance_n, st.mandel_q])
        header = ["abs_z", "mean_n", "variance_n", "mandel_q"]
        payload = {"family": format_family(o["family"]), "scan": [dict(zip(header, r)) for r in rows]}
        return _emit_rows(cmd.format, rows, header, payload), EXIT_OK
    s = _state_from_opts(o)
    st = fock.photon_statistics(s)
    payload = {
        "family": format_family(s.family),
        "z": _num(s.label_z),
        "alpha": s.stabilization_alpha,
        "mean_n": st.mean_n,
        "variance_n": st.variance_n,
        "mandel_q": st.mandel_q,
        "vacuum": st.vacuum,
        "tail_mass": s.tail_mass,
        "distribution": st.distribution.tolist(),
    }
    rows = [[n, p] for n, p in enumerate(st.distribution)]
    return _emit_rows(cmd.format, rows, ["n", "P"], payload), EXIT_OK


def _cmd_overlap(cmd: Command) -> tuple[str, int]:
    o = cmd.options
    s1 = _state_from_opts(o)
    o2 = dict(o, z=o["z2"], alpha=o["alpha2"], J=None)
    s2 = _state_from_opts(o2)
    ov = fock.overlap(s1, s2)
    payload = {"family": format_family(o["family"]), "z1": _num(s1.label_z), "z2": _num(s2.label_z),
               "overlap": [ov.real, ov.imag], "abs2": abs(ov) ** 2}
    return _emit_rows(cmd.format, [[ov.real, ov.imag, abs(ov) ** 2]], ["re", "im", "abs2"],
                      payload), EXIT_OK


def _cmd_op(cmd: Command) -> tuple[str, int]:
    o = cmd.options
    N = o["dim"] - 1
    fam = o.get("family")
    kind = o["kind"]
    if kind == "ladder":
        op = opspace.ladder_matrices(N)[0]
    elif kind == "deformed":
        op = opspace.deformed_ladder(fam, N, o["alpha"])[0]
    elif kind == "b":
        op = opspace.conjugate_ladder(fam, N, o["alpha"])[0]
    elif kind == "hamiltonian":
        op = opspace.hamiltonian(fam, N, o["variant"])
    elif kind == "displacement":
        op = opspace.displacement(fam, o["z"], N, "D_tilde" if o["tilde"] else "D", o["alpha"])
    elif kind == "t":
        op = opspace.diagonal_transform(fam, N, o["transform"])
    elif kind == "s":
        op = opspace.diagonal_transform(fam, N, "S", o["alpha"])
    elif kind == "jc":
        op = opspace.jaynes_cummings_h(fam, o["g"], N)
    else:
        op = opspace.exp_shift(N, o["shift"], o["param"])
    if cmd.format == "json":
        return op.to_json() + "\n", EXIT_OK
    if cmd.format == "table":
        return op.to_csc_text(), EXIT_OK
    rows = [[i, j, op.entries[i, j].real, op.entries[i, j].imag]
            for j in range(op.dim) for i in np.flatnonzero(op.entries[:, j])]
    return _csv(rows, ["row", "col", "re", "im"]), EXIT_OK


def _cmd_verify(cmd: Command) -> tuple[str, int]:
    o = cmd.options
    reports = verify.run_suite(o["family"], o["suite"], o["n_max"], o["z"], o["alpha"], o["J"],
                               o["t"], o["dim"] - 1)
    code = EXIT_VERIFY_FAILED if any(r.is_failure for r in reports) else EXIT_OK
    if cmd.format == "json":
        return verify.reports_to_jsonl(reports), code
    if cmd.format == "table":
        return verify.reports_table(reports), code
    rows = [[r.check_name, "" if r.n is None else r.n,
             r.abs_residual if r.mode == "abs" else r.rel_residual, r.tolerance, r.status]
            for r in reports]
    return _csv(rows, ["check", "n", "residual", "tolerance", "status"]), code


def _cmd_dual(cmd: Command) -> tuple[str, int]:
    o = cmd.options
    fam = o["family"]
    n_max = int(min(o["n_max"], fam.dimension() - 1))
    dual = dual_family(fam)
    rho = np.exp(fam.log_rho_table(n_max))
    mu = np.exp(dual.log_rho_table(n_max))
    e = fam.energy_table(n_max)
    eps = dual.energy_table(n_max)
    header = ["n", "rho", "mu", "e", "eps"]
    cols = [rho, mu, e, eps]
    partner = known_dual(fam)
    if partner is not None and format_family(partner) != format_family(fam):
        header.append(f"rho[{format_family(partner)}]")
        cols.append(np.exp(partner.log_rho_table(n_max)))
    rows = [[n] + [float(c[n]) for c in cols] for n in range(n_max + 1)]
    payload = {"family": format_family(fam), "dual": format_family(dual),
               "dual_radius": convergence_radius(dual),
               "rows": [dict(zip(header, r)) for r in rows]}
    if not math.isfinite(payload["dual_radius"]):
        payload["dual_radius"] = "inf"
    return _emit_rows(cmd.format, rows, header, payload), EXIT_OK


def _cmd_catalog(cmd: Command) -> tuple[str, int]:
    rows_d = catalog()
    if cmd.format == "json":
        return json.dumps(rows_d) + "\n", EXIT_OK
    rows = [[r["name"], "|".join(r["aliases"]),
             "; ".join(f"{k}: {v}" for k, v in r["params"].items()), r["summary"]] for r in rows_d]
    header = ["name", "aliases", "params", "summary"]
    if cmd.format == "csv":
        return _csv(rows, header), EXIT_OK
    widths = [max(len(str(c)) for c in col) for col in zip(header, *rows)]
    lines = ["  ".join(str(c).ljust(w) for c, w in zip(r, widths)).rstrip() for r in [header] + rows]
    return "\n".join(lines) + "\n", EXIT_OK


_DISPATCH = {
    "state": _cmd_state, "stats": _cmd_stats, "overlap": _cmd_overlap, "op": _cmd_op,
    "verify": _cmd_verify, "dual": _cmd_dual, "evolve": _cmd_evolve, "catalog": _cmd_catalog,
}


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def run(cmd: Command) -> int:
    try:
        text, code = _DISPATCH[cmd.subcommand](cmd)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except (ArithmeticError, FamilyDomainError, ValueError) as exc:
        record = {"error": type(exc).__name__, "message": str(exc)}
        if hasattr(exc, "tail_mass"):
            record["tail_mass"] = exc.tail_mass
        _write(json.dumps(record) + "\n", cmd.output)
        return EXIT_NUMERIC
    _write(text, cmd.output)
    return code


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cmd = parse(argv)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    return run(cmd)


if __name__ == "__main__":
    sys.exit(main())
