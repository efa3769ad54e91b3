"""Command line front end.

Exit codes: 0 success, 1 infeasible certificate, 2 usage or input error,
3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io as _stdio
import logging
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .constructions import ConstructionError, build_g1, build_g_ell, lift_linear_valued
from .cube import EXACT, FLOAT, DenseCapError
from .io import FormatError, read_json, read_table, write_json, write_table
from .lp import GENERAL, LINEAR, LINEAR_VALUED, Instance, verify_dual, verify_dual_linear_valued
from .oracle import OracleCapError, max_code_size, max_linear_code_size

EXIT_OK, EXIT_INFEASIBLE, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3

log = logging.getLogger("ddl")


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    target: str | None
    n: int | None
    d: int | None
    ell: int
    eps: Fraction | None
    m: int | None
    mode: str
    denominator_cap: int | None
    dense_cap: int | None
    out: str | None
    fmt: str
    linear: bool
    grid: str
    table: str | None
    sidecar: str | None
    oracle: bool

    def instance(self, variant: str = GENERAL) -> Instance:
        if self.n is None or self.d is None:
            raise UsageError("--n and --d are required")
        if not 1 <= self.d <= self.n:
            raise UsageError("need 1 <= d <= n")
        if self.ell < 1:
            raise UsageError("--ell must be >= 1")
        return Instance(self.n, self.d, self.ell, variant)


def _fraction(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {s!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int)
    common.add_argument("--d", type=int)
    common.add_argument("--ell", type=int, default=1)
    common.add_argument("--eps", type=_fraction)
    common.add_argument("--m", type=int)
    mode = common.add_mutually_exclusive_group()
    mode.add_argument("--exact", dest="mode", action="store_const", const=EXACT)
    mode.add_argument("--float", dest="mode", action="store_const", const=FLOAT)
    common.set_defaults(mode=EXACT)
    common.add_argument("--dense-cap", type=int, help="largest l*n for dense tables")
    common.add_argument("--denominator-cap", type=int, help="largest denominator searched for 2*eps")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", dest="fmt", choices=("json", "csv"))
    common.add_argument("--threads", type=int, help="cap on worker threads")
    common.add_argument("--linear", action="store_true")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="ddl", description="Dual certificates for Delsarte-type LP bounds on binary codes.")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bound", parents=[common], help="build and verify a certificate, or emit rate curves")
    b.add_argument("target", choices=("first-lp", "hierarchy", "linear-valued", "curve"))
    b.add_argument("--grid", default="0.05:0.45:0.05", help="delta grid lo:hi:step or a comma list")
    b.add_argument("--table", help="also write the dense table here (with a .json sidecar)")
    b.add_argument("--no-oracle", dest="oracle", action="store_false", help="skip the ground-truth comparison")

    v = sub.add_parser("verify", parents=[common], help="re-verify a table file against its sidecar")
    v.add_argument("table")
    v.add_argument("--sidecar", help="sidecar JSON (default: TABLE.json)")

    sub.add_parser("oracle", parents=[common], help="exact A(n, d) or A_Lin(n, d)")
    return p


def _config(ns: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=ns.command,
        target=getattr(ns, "target", None),
        n=ns.n,
        d=ns.d,
        ell=ns.ell,
        eps=ns.eps,
        m=ns.m,
        mode=ns.mode,
        denominator_cap=ns.denominator_cap,
        dense_cap=ns.dense_cap,
        out=ns.out,
        fmt=ns.fmt or ("csv" if getattr(ns, "target", None) == "curve" else "json"),
        linear=ns.linear,
        grid=getattr(ns, "grid", ""),
        table=getattr(ns, "table", None),
        sidecar=getattr(ns, "sidecar", None),
        oracle=getattr(ns, "oracle", True),
    )


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _emit_json(obj, cfg: RunConfig) -> None:
    if cfg.fmt != "json":
        raise UsageError("this command only writes JSON")
    _emit(write_json(obj, None), cfg.out)


def _write_table(cert, report, cfg: RunConfig) -> None:
    if not cfg.table:
        return
    table = cert.dense(cfg.dense_cap)
    write_table(table, cfg.table)
    sidecar = {"instance": cert.inst.to_json(), "certificate": cert.to_json(cfg.dense_cap), "table_sha256": table.sha256()}
    write_json(sidecar, cfg.table + ".json")


def cmd_bound(cfg: RunConfig) -> int:
    if cfg.target == "curve":
        return _cmd_curve(cfg)
    if cfg.target == "first-lp":
        inst = cfg.instance()
        if inst.ell != 1:
            raise UsageError("first-lp is the l = 1 certificate")
        if inst.d < 2:
            raise UsageError("first-lp needs d >= 2")
        cert = build_g1(inst.n, inst.d, cfg.eps if cfg.eps is not None else 1, cfg.mode, dense_cap=cfg.dense_cap)
        report = verify_dual(cert.g, inst)
        out = {"certificate": cert.to_json(cfg.dense_cap), "report": report.to_json()}
        if cfg.oracle:
            out["comparison"] = _compare(report.value, inst, 1, linear=False)
    elif cfg.target == "hierarchy":
        variant = LINEAR if cfg.linear else GENERAL
        inst = cfg.instance(variant)
        if inst.d < 2 or inst.d >= inst.n:
            raise UsageError("hierarchy needs 2 <= d < n")
        cert = build_g_ell(inst.n, inst.d, inst.ell, variant, cfg.m, cfg.eps, cfg.denominator_cap, cfg.mode)
        try:
            table = cert.dense(cfg.dense_cap)
        except DenseCapError:
            table = cert.g
        report = verify_dual(table, inst)
        out = {"certificate": cert.to_json(cfg.dense_cap), "report": report.to_json()}
        if cfg.oracle:
            out["comparison"] = _compare(report.value, inst, inst.ell, linear=cfg.linear)
    elif cfg.target == "linear-valued":
        inst = cfg.instance(LINEAR_VALUED)
        if inst.d < 2:
            raise UsageError("linear-valued needs d >= 2")
        g1 = build_g1(inst.n, inst.d, cfg.eps if cfg.eps is not None else 1, cfg.mode).g
        cert = lift_linear_valued(g1, inst.ell, inst.d, dense_cap=cfg.dense_cap)
        report = verify_dual_linear_valued(cert.g, inst)
        out = {"certificate": cert.to_json(cfg.dense_cap), "report": report.to_json()}
        if cfg.oracle:
            out["comparison"] = _compare(report.value, inst, 1, linear=True)
    else:
        raise UsageError(f"unknown bound target {cfg.target!r}")
    _write_table(cert, report, cfg)
    _emit_json(out, cfg)
    if "comparison" in out and out["comparison"].get("oracle_size") is not None:
        c = out["comparison"]
        print(f"value^(1/{c['root']}) = {c['value_root']:.6g}  oracle = {c['oracle_size']}", file=sys.stderr)
    return EXIT_OK if report.feasible else EXIT_INFEASIBLE


def _compare(value, inst: Instance, root: int, linear: bool) -> dict:
    out = {"root": root, "value_root": None, "oracle_size": None}
    if value is None:
        return out
    out["value_root"] = float(value) ** (1 / root)
    try:
        res = max_linear_code_size(inst.n, inst.d) if linear else max_code_size(inst.n, inst.d)
    except OracleCapError:
        return out
    out["oracle_size"] = res.size
    out["dominates"] = out["value_root"] >= res.size * (1 - 1e-12)
    return out


def _cmd_curve(cfg: RunConfig) -> int:
    from .bounds import finite_n_rate, gv_rate, mrrw_rate, parse_grid

    try:
        grid = parse_grid(cfg.grid)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad grid {cfg.grid!r}: {exc}") from exc
    if not grid or any(not 0 < x < 0.5 for x in grid):
        raise UsageError("grid values must lie in (0, 1/2)")
    rows = []
    for delta in grid:
        finite = ""
        if cfg.n is not None:
            _, finite = finite_n_rate(cfg.n, delta, cfg.eps if cfg.eps is not None else 1)
        rows.append({"delta": delta, "gv_rate": gv_rate(delta), "mrrw_rate": mrrw_rate(delta), "finite_n_rate": finite})
    if cfg.fmt == "json":
        _emit(write_json({"n": cfg.n, "rows": rows}, None), cfg.out)
        return EXIT_OK
    buf = _stdio.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["delta", "gv_rate", "mrrw_rate", "finite_n_rate"])
    for r in rows:
        w.writerow([repr(r["delta"]), repr(r["gv_rate"]), repr(r["mrrw_rate"]), "" if r["finite_n_rate"] == "" else repr(r["finite_n_rate"])])
    _emit(buf.getvalue(), cfg.out)
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    sidecar_path = cfg.sidecar or cfg.table + ".json"
    try:
        table = read_table(cfg.table)
        side = read_json(sidecar_path)
        inst = Instance(**side["instance"])
    except (OSError, FormatError, KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"cannot read certificate: {exc}") from exc
    if table.dim != inst.dim:
        raise UsageError(f"instance mismatch: table has dimension {table.dim}, sidecar declares l*n = {inst.dim}")
    if cfg.mode == FLOAT:
        table = table.astype(FLOAT)
    if inst.variant == LINEAR_VALUED:
        report = verify_dual_linear_valued(table, inst)
    else:
        report = verify_dual(table, inst)
    _emit_json({"report": report.to_json(), "table_sha256": table.sha256()}, cfg)
    return EXIT_OK if report.feasible else EXIT_INFEASIBLE


def cmd_oracle(cfg: RunConfig) -> int:
    if cfg.n is None or cfg.d is None:
        raise UsageError("--n and --d are required")
    if not 1 <= cfg.d <= cfg.n:
        raise UsageError("need 1 <= d <= n")
    res = max_linear_code_size(cfg.n, cfg.d) if cfg.linear else max_code_size(cfg.n, cfg.d)
    log.info("oracle finished in %.2fs", res.elapsed)
    _emit_json(res.to_json(), cfg)
    return EXIT_OK


def _set_threads(k: int | None) -> None:
    if k is None:
        return
    if k < 1:
        raise UsageError("--threads must be >= 1")
    import numba

    numba.set_num_threads(min(k, numba.config.NUMBA_NUM_THREADS))


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, format="%(message)s")
    cfg = _config(ns)
    try:
        _set_threads(ns.threads)
        if cfg.command == "bound":
            return cmd_bound(cfg)
        if cfg.command == "verify":
            return cmd_verify(cfg)
        return cmd_oracle(cfg)
    except (DenseCapError, OracleCapError) as exc:
        print(f"ddl: {exc}", file=sys.stderr)
        return EXIT_CAP
    except ConstructionError as exc:
        print(f"ddl: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (UsageError, ValueError) as exc:
        print(f"ddl: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
