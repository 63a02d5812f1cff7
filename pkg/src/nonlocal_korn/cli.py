"""``nonlocal-korn``: parameter sweeps, inequality reports and plot data.

Exit codes: 0 when every check passed, 2 when a mathematical check failed,
1 on usage or configuration errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import os
import sys
from dataclasses import dataclass, field, fields as dc_fields
from pathlib import Path
from typing import Any, Callable

import numpy as np

from .constants import ConstantValue, Method, constants_table
from .constants import to_csv as constants_csv
from .core import DomainTag, FieldSpec, FracParams, field_library
from .errors import NonlocalKornError
from .quad import QuadConfig
from .spectral import korn_bounds, spectral_constants
from .verify import (VerificationReport, default_sweep, extension_check, ground_state_limit_check, hardy_check,
                     hardy_constant, hardy_remainder_check, korn_halfspace_check, korn_sweep,
                     korn_wholespace_check, pointwise_inequalities, run_jobs, scaling_check, to_jsonl,
                     to_summary_csv)

SUBCOMMANDS = ("constants", "hardy", "korn", "extend", "scaling", "groundstate", "pointwise", "sweep", "all")
SWEEPS = ("default", "korn", "quick")
QUAD_KEYS = ("n_samples", "truncation_pad", "diagonal_cutoff", "n_strata", "chunk")
DEFAULT_SWEEP = {"constants": "quick", "hardy": "default", "korn": "korn", "extend": "default",
                 "scaling": "default", "groundstate": "quick", "pointwise": "quick", "sweep": "default",
                 "all": "default"}
DEFAULT_LAMBDAS = (2.0, 3.0, 5.0)
POINTWISE_P = (1.0, 1.5, 2.0, 3.0)


class UsageError(Exception):
    pass


def sweep_params(name: str) -> list[FracParams]:
    if name == "default":
        return default_sweep()
    if name == "korn":
        return korn_sweep()
    if name == "quick":
        return [FracParams(2, 2.0, 0.25), FracParams(2, 2.0, 0.75)]
    raise UsageError(f"unknown sweep {name!r}; choose from {', '.join(SWEEPS)}")


@dataclass(frozen=True)
class RunConfig:
    """Everything that determines the content of the outputs.

    Execution settings (output path, parallelism) are kept out so that the
    echoed header, and hence the output bytes, do not depend on them.
    """

    subcommand: str
    params: tuple[FracParams, ...]
    fields: Any = None
    quad: dict = field(default_factory=lambda: {k: getattr(QuadConfig(), k) for k in QUAD_KEYS})
    format: str = "json"
    seed: int = QuadConfig().seed
    lambdas: tuple[float, ...] = DEFAULT_LAMBDAS

    def quad_config(self) -> QuadConfig:
        return QuadConfig(seed=self.seed, **self.quad)

    def to_dict(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "params": [P.as_dict() for P in self.params],
            "fields": self.fields,
            "quad": dict(self.quad),
            "format": self.format,
            "seed": self.seed,
            "lambdas": list(self.lambdas),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        unknown = set(data) - {f.name for f in dc_fields(cls)}
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        return cls(
            subcommand=data["subcommand"],
            params=tuple(_params_from(data.get("params", []))),
            fields=data.get("fields"),
            quad=_quad_from(data.get("quad", {})),
            format=data.get("format", "json"),
            seed=int(data.get("seed", QuadConfig().seed)),
            lambdas=tuple(float(x) for x in data.get("lambdas", DEFAULT_LAMBDAS)),
        )

    def header_json(self) -> str:
        return json.dumps({"config": self.to_dict()}, sort_keys=True)


def _params_from(items) -> list[FracParams]:
    out = []
    for it in items:
        if isinstance(it, dict):
            if set(it) != {"d", "p", "s"}:
                raise UsageError(f"params entries need exactly the keys d, p, s: {it!r}")
            out.append(FracParams(it["d"], it["p"], it["s"]))
        else:
            out.append(FracParams(*it))
    return out


def _quad_from(data: dict) -> dict:
    unknown = set(data) - set(QUAD_KEYS)
    if unknown:
        raise UsageError(f"unknown quad keys: {sorted(unknown)}")
    base = {k: getattr(QuadConfig(), k) for k in QUAD_KEYS}
    base.update(data)
    QuadConfig(**base)  # validation
    return base


def parse_header(text: str) -> RunConfig:
    """Recover the RunConfig from the first line of an output file."""
    first = text.splitlines()[0]
    if first.startswith("# config: "):
        first = first[len("# config: "):]
    return RunConfig.from_dict(json.loads(first)["config"])


# -- argument handling ----------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--d", type=int, action="append", help="dimension (repeatable)")
    common.add_argument("--p", type=float, action="append", help="integrability exponent (repeatable)")
    common.add_argument("--s", type=float, action="append", help="fractional order (repeatable)")
    common.add_argument("--sweep", choices=SWEEPS, help="named parameter sweep")
    common.add_argument("--fields", help="JSON file: list of library names and/or field dicts")
    common.add_argument("--samples", type=int, help="Monte Carlo samples per seminorm")
    common.add_argument("--seed", type=int, help="master seed (fallback: NONLOCAL_KORN_SEED)")
    common.add_argument("--out", help="output path")
    common.add_argument("--format", choices=("json", "csv"), help="output format")
    common.add_argument("--jobs", type=int, help="parallel jobs")
    common.add_argument("--lambda", dest="lambdas", type=float, action="append", help="scaling factor (repeatable)")
    common.add_argument("--config", help="JSON config file; its values win over flags")

    parser = _Parser(prog="nonlocal-korn", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common])
    plot = sub.add_parser("plot-data", help="CSV for plotting from report files")
    plot.add_argument("inputs", nargs="+", help="JSON-lines report files")
    plot.add_argument("--out", required=True)
    return parser


def _warn(msg: str) -> None:
    print(f"warning: {msg}", file=sys.stderr)


def resolve(args: argparse.Namespace) -> tuple[RunConfig, str | None, int]:
    """Merge flags, the config file and the environment into (RunConfig, out, jobs)."""
    flags: dict[str, Any] = {}
    if args.d or args.p or args.s:
        if args.sweep:
            raise UsageError("--sweep cannot be combined with --d/--p/--s")
        ds, ps_, ss = args.d or [2], args.p or [2.0], args.s or [0.75]
        try:
            flags["params"] = [FracParams(d, p, s) for d, p, s in itertools.product(ds, ps_, ss)]
        except NonlocalKornError as exc:
            raise UsageError(str(exc)) from exc
        flags["explicit_params"] = True
    elif args.sweep:
        flags["params"] = sweep_params(args.sweep)
    for key in ("fields", "format", "out", "jobs"):
        if getattr(args, key) is not None:
            flags[key] = getattr(args, key)
    if args.lambdas:
        flags["lambdas"] = args.lambdas
    if args.samples is not None:
        flags["samples"] = args.samples
    if args.seed is not None:
        flags["seed"] = args.seed
    elif os.environ.get("NONLOCAL_KORN_SEED"):
        try:
            flags["seed"] = int(os.environ["NONLOCAL_KORN_SEED"], 0)
        except ValueError as exc:
            raise UsageError("NONLOCAL_KORN_SEED must be an integer") from exc

    file_cfg: dict[str, Any] = {}
    if args.config:
        try:
            file_cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        allowed = {"subcommand", "params", "sweep", "fields", "quad", "samples", "format", "seed", "lambdas", "out",
                   "jobs"}
        unknown = set(file_cfg) - allowed
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        if file_cfg.get("subcommand", args.subcommand) != args.subcommand:
            raise UsageError("config subcommand differs from the command line")
        if "params" in file_cfg or "sweep" in file_cfg:
            file_cfg["params"] = (_params_from(file_cfg["params"]) if "params" in file_cfg
                                  else sweep_params(file_cfg["sweep"]))
            flags.pop("explicit_params", None)
        for key, val in file_cfg.items():
            if key in flags and key not in ("subcommand", "sweep") and flags[key] != val:
                _warn(f"config file value for {key!r} overrides the command line")
            flags[key] = val

    params = flags.get("params") or sweep_params(DEFAULT_SWEEP[args.subcommand])
    quad = _quad_from(file_cfg.get("quad", {}))
    if "samples" in flags:
        quad["n_samples"] = int(flags["samples"])
        QuadConfig(**quad)
    cfg = RunConfig(
        subcommand=args.subcommand,
        params=tuple(params),
        fields=flags.get("fields"),
        quad=quad,
        format=flags.get("format", "json"),
        seed=int(flags.get("seed", QuadConfig().seed)) % 2**64,
        lambdas=tuple(float(x) for x in flags.get("lambdas", DEFAULT_LAMBDAS)),
    )
    if cfg.format not in ("json", "csv"):
        raise UsageError(f"format must be json or csv, got {cfg.format!r}")
    jobs = int(flags.get("jobs", 1))
    if jobs < 1:
        raise UsageError("--jobs must be positive")
    _check_preconditions(cfg, explicit=bool(flags.get("explicit_params")))
    return cfg, flags.get("out"), jobs


def _check_preconditions(cfg: RunConfig, explicit: bool) -> None:
    """Explicitly requested parameters must satisfy the command's hypotheses."""
    for P in cfg.params:
        try:
            if cfg.subcommand in ("hardy", "extend", "groundstate", "sweep", "all") and explicit:
                P.require_ps_not_one()
            if cfg.subcommand == "korn":
                # s = 1/2 only drops the half-space checks; the whole-space band still applies
                P.require_p2()
        except NonlocalKornError as exc:
            raise UsageError(str(exc)) from exc


# -- field selection ------------------------------------------------------------

def load_fields(cfg: RunConfig, d: int) -> list[FieldSpec]:
    """Library fields of dimension d, or the selection named in the fields file."""
    if cfg.fields is None:
        return field_library(d)
    try:
        items = json.loads(Path(cfg.fields).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read fields file {cfg.fields}: {exc}") from exc
    if not isinstance(items, list):
        raise UsageError("fields file must hold a JSON list")
    lib = {u.name: u for u in field_library(d)}
    out = []
    for it in items:
        if isinstance(it, str):
            if it not in lib:
                raise UsageError(f"no library field named {it!r}")
            out.append(lib[it])
        else:
            try:
                u = FieldSpec.from_dict(it)
            except (NonlocalKornError, KeyError, TypeError) as exc:
                raise UsageError(f"bad field entry {it!r}: {exc}") from exc
            if u.d == d:
                out.append(u)
    return out


def _half(cfg, d):
    return [u for u in load_fields(cfg, d) if u.domain_tag is DomainTag.HALF_SPACE]


def _whole(cfg, d):
    return [u for u in load_fields(cfg, d) if u.domain_tag is DomainTag.WHOLE_SPACE]


def groundstate_points(d: int) -> list[tuple[float, list[float]]]:
    """Five (x_d, v) configurations."""
    def vec(head, tail):
        v = np.full(d, head, dtype=float)
        v[-1] = tail
        return (v / np.linalg.norm(v)).tolist()
    return [(0.5, vec(0.0, 1.0)), (1.0, vec(1.0, 0.0) if d > 1 else [1.0]), (2.0, vec(1.0, 1.0)),
            (0.3, vec(-1.0, 1.0)), (1.5, vec(0.2, -1.0))]


# -- jobs -------------------------------------------------------------------------

Job = Callable[[], VerificationReport]


def hardy_jobs(cfg: RunConfig) -> list[Job]:
    q = cfg.quad_config()
    return [lambda u=u, P=P: hardy_check(u, P, q)
            for P in cfg.params if abs(P.ps - 1.0) > 1e-12 for u in _half(cfg, P.d)]


def remainder_jobs(cfg: RunConfig) -> list[Job]:
    q = cfg.quad_config()
    return [lambda u=u, P=P: hardy_remainder_check(u, P, q)
            for P in cfg.params if P.p >= 2 and abs(P.ps - 1.0) > 1e-12 for u in _half(cfg, P.d)]


def korn_jobs(cfg: RunConfig) -> list[Job]:
    q = cfg.quad_config()
    jobs: list[Job] = []
    for P in cfg.params:
        if P.p != 2.0:
            continue
        jobs += [lambda u=u, P=P: korn_wholespace_check(u, P, q) for u in _whole(cfg, P.d)]
        if abs(P.s - 0.5) > 1e-12:
            jobs += [lambda u=u, P=P: korn_halfspace_check(u, P, q) for u in _half(cfg, P.d)]
    return jobs


def extend_jobs(cfg: RunConfig) -> list[Job]:
    q = cfg.quad_config()
    return [lambda u=u, P=P: extension_check(u, P, q)
            for P in cfg.params if abs(P.ps - 1.0) > 1e-12 for u in _half(cfg, P.d)]


def scaling_jobs(cfg: RunConfig) -> list[Job]:
    q = cfg.quad_config()
    return [lambda u=u, P=P, lam=lam: scaling_check(u, lam, P, q)
            for P in cfg.params for u in _half(cfg, P.d) for lam in cfg.lambdas]


def groundstate_jobs(cfg: RunConfig) -> list[Job]:
    return [lambda P=P, x=x, v=v: ground_state_limit_check(P, x, v)
            for P in cfg.params if abs(P.ps - 1.0) > 1e-12 for x, v in groundstate_points(P.d)]


def pointwise_jobs(cfg: RunConfig, explicit_p: bool) -> list[Job]:
    ps_ = sorted({P.p for P in cfg.params}) if explicit_p else list(POINTWISE_P)
    return [lambda p=p: pointwise_inequalities(p, seed=cfg.seed) for p in ps_]


def korn_summaries(cfg: RunConfig, reports: list[VerificationReport]) -> list[dict]:
    out = []
    for P in cfg.params:
        if P.p != 2.0:
            continue
        sc = spectral_constants(P)
        lo, hi = korn_bounds(P, sc)
        ratios = [{"field_id": r.field_id, "ratio": r.details["ratio"], "passed": r.passed} for r in reports
                  if r.check_name == "korn_wholespace" and r.params == P]
        out.append({"korn_summary": {"d": P.d, "s": P.s, "l1": sc.l1, "l2": sc.l2, "kappa": sc.kappa,
                                     "band_lower": lo, "band_upper": hi, "per_field_ratios": ratios}})
    return out


def constant_rows(cfg: RunConfig) -> list[ConstantValue]:
    rows: list[ConstantValue] = []
    for P in cfg.params:
        rows.extend(constants_table(P))
        if P.p == 2.0:
            sc = spectral_constants(P)
            rows.append(ConstantValue("l1", P, sc.l1, sc.l1_error, Method.ADAPTIVE_QUADRATURE))
            if sc.l2 is not None:
                rows.append(ConstantValue("l2", P, sc.l2, sc.l2_error, Method.ADAPTIVE_QUADRATURE))
            rows.append(ConstantValue("kappa", P, sc.kappa, sc.kappa_error, Method.ADAPTIVE_QUADRATURE))
        if abs(P.ps - 1.0) > 1e-12:
            rows.append(ConstantValue("kappa_hardy", P, hardy_constant(P)["kappa"], 0.0, Method.CLOSED_FORM))
    return rows


# -- output -------------------------------------------------------------------------

def summary_table(reports: list[VerificationReport]) -> str:
    head = f"{'check':<18} {'d':>2} {'p':>4} {'s':>5} {'field':<22} {'passed':<6} {'margin':>11}"
    lines = [head, "-" * len(head)]
    for r in reports:
        P = r.params
        d, p, s = (P.d, f"{P.p:g}", f"{P.s:g}") if P else ("", "", "")
        lines.append(f"{r.check_name:<18} {d:>2} {p:>4} {s:>5} {(r.field_id or '-'):<22} "
                     f"{str(r.passed).lower():<6} {r.margin:>11.4g}")
    n_fail = sum(not r.passed for r in reports)
    lines.append(f"{len(reports)} checks, {n_fail} failed")
    return "\n".join(lines)


def render(cfg: RunConfig, reports: list[VerificationReport], extra: list[dict] | None = None) -> str:
    if cfg.format == "csv":
        return f"# config: {cfg.header_json()}\n" + to_summary_csv(reports)
    body = to_jsonl(reports)
    body += "".join(json.dumps(e, sort_keys=True) + "\n" for e in (extra or []))
    return cfg.header_json() + "\n" + body


def _write(path: str | None, text: str) -> None:
    if path is None:
        return
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def emit_plot_data(reports: list[VerificationReport], out: str) -> int:
    """CSV of (s, ratio, band) for Korn reports and (s, kappa_hardy) for Hardy reports.

    Mixed check types go to one file per type, named <stem>_<check><suffix>.
    """
    if not reports:
        print("error: no reports to plot", file=sys.stderr)
        return 1
    groups: dict[str, list[VerificationReport]] = {}
    for r in reports:
        groups.setdefault(r.check_name, []).append(r)
    base = Path(out)
    for check, rs in groups.items():
        path = base if len(groups) == 1 else base.with_name(f"{base.stem}_{check}{base.suffix or '.csv'}")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if check.startswith("korn"):
            w.writerow(["field_id", "d", "p", "s", "ratio", "band_lower", "band_upper"])
            for r in rs:
                dt = r.details
                w.writerow([r.field_id, r.params.d, repr(r.params.p), repr(r.params.s), repr(dt["ratio"]),
                            repr(dt.get("band_lower", "")) if "band_lower" in dt else "",
                            repr(dt.get("band_upper", "")) if "band_upper" in dt else ""])
        elif check == "hardy":
            w.writerow(["field_id", "d", "p", "s", "kappa_hardy", "ratio"])
            for r in rs:
                w.writerow([r.field_id, r.params.d, repr(r.params.p), repr(r.params.s), repr(r.constant_used),
                            repr(r.details["ratio_lhs_over_rhs"])])
        else:
            w.writerow(["field_id", "d", "p", "s", "lhs", "rhs", "constant", "passed"])
            for r in rs:
                P = r.params
                w.writerow([r.field_id or "", P.d if P else "", repr(P.p) if P else "", repr(P.s) if P else "",
                            repr(r.lhs.value), repr(r.rhs.value), repr(r.constant_used), str(r.passed).lower()])
        _write(str(path), buf.getvalue())
    return 0


def _read_reports(paths: list[str]) -> list[VerificationReport]:
    out = []
    for path in paths:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc}") from exc
        for line in text.splitlines():
            if not line.strip():
                continue
            obj = json.loads(line)
            if "check_name" in obj:
                out.append(VerificationReport.from_dict(obj))
    return out


# -- entry point -------------------------------------------------------------------

def run(cfg: RunConfig, out: str | None = None, jobs: int = 1, explicit_p: bool = True) -> int:
    """Execute the configured checks; returns the exit code."""
    sc = cfg.subcommand
    if sc == "constants":
        rows = constant_rows(cfg)
        if cfg.format == "csv":
            text = f"# config: {cfg.header_json()}\n" + constants_csv(rows)
        else:
            text = cfg.header_json() + "\n" + "".join(json.dumps(r.row(), sort_keys=True) + "\n" for r in rows)
        _write(out, text)
        print(constants_csv(rows), end="")
        return 0
    builders = {
        "hardy": [hardy_jobs],
        "korn": [korn_jobs],
        "extend": [extend_jobs],
        "scaling": [scaling_jobs],
        "groundstate": [groundstate_jobs],
        "sweep": [hardy_jobs, extend_jobs, scaling_jobs],
        "all": [hardy_jobs, remainder_jobs, korn_jobs, extend_jobs, scaling_jobs, groundstate_jobs],
    }
    job_list: list[Job] = []
    if sc == "pointwise":
        job_list = pointwise_jobs(cfg, explicit_p)
    else:
        for b in builders[sc]:
            job_list += b(cfg)
        if sc == "all":
            job_list += pointwise_jobs(cfg, False)
    if not job_list:
        raise UsageError("the selection produced no checks")
    reports = run_jobs(job_list, jobs)
    extra = korn_summaries(cfg, reports) if sc in ("korn", "all") else None
    _write(out, render(cfg, reports, extra))
    print(summary_table(reports))
    return 0 if all(r.passed for r in reports) else 2


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.subcommand == "plot-data":
            return emit_plot_data(_read_reports(args.inputs), args.out)
        cfg, out, jobs = resolve(args)
        return run(cfg, out, jobs, explicit_p=bool(args.p or args.config))
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NonlocalKornError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
