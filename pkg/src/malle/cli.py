"""Command-line entry point: ``malle <subcommand> ...``.

Exit codes: 0 success, 2 invariant violation, 3 input validation error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import __version__
from .arith import primes_between
from .cover import ModelError, bad_primes, load_model, prime_frame
from .diophantine import DiophantineError, report as walkowiak_report
from .distinct import DEFAULT_PMAX, DistinctError, count_distinct
from .estimates import Constants, EstimateError, density_experiment, exponents, lower_bound_rhs
from .frobenius import check_prop41, lang_weil_violations, scan_primes
from .models import irrational_branch_model, quadratic_model, s3_model
from .polyalg import BiPoly, PolyError, UniPoly, parse_bipoly
from .sieve import (
    RECORD_FIELDS, SieveError, assemble, certify, load_frobenius, parse_frobenius, plan,
)
from .twist2 import TwistError, verify_grid

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 2, 3
BUILTIN = {"quadratic": quadratic_model, "s3_cubic": s3_model, "irrational": irrational_branch_model}
INPUT_ERRORS = (ModelError, SieveError, PolyError, TwistError, DistinctError, DiophantineError,
                EstimateError, OSError, json.JSONDecodeError, KeyError)


class InputError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def get_model(spec: str):
    if spec.startswith("builtin:"):
        name = spec.split(":", 1)[1]
        if name not in BUILTIN:
            raise InputError(f"unknown builtin model {name!r}; choose from {sorted(BUILTIN)}")
        return BUILTIN[name]()
    return load_model(spec)


def parse_range(text: str) -> tuple[int, int]:
    try:
        a, b = text.split("..")
        a, b = int(a), int(b)
    except ValueError as exc:
        raise InputError(f"expected a range A..B, got {text!r}") from exc
    if b < a:
        raise InputError(f"empty range {text!r}")
    return a, b


def parse_int_list(text) -> list[int]:
    if text is None or text == "":
        return []
    if isinstance(text, list):
        return [int(v) for v in text]
    return [int(v) for v in str(text).split(",") if v.strip()]


def _json_out(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=str) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _csv_text(fields, rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def _frac_parts(q: Fraction) -> tuple[int, int]:
    q = Fraction(q)
    return q.numerator, q.denominator


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_analyze(args) -> int:
    model = get_model(args.model)
    frame = prime_frame(model)
    rep = {
        "name": model.name,
        "model_hash": model.model_hash,
        "group_order": model.group_order,
        "delta_P": model.delta_P,
        "disc": str(model.disc),
        "height_disc": model.height_disc,
        "bad_primes": sorted(bad_primes(model)),
        "p_minus1": frame.p_minus1,
        "p0": frame.p0,
        "S0": {str(p): c.id for p, c in zip(frame.s0_primes, model.nontrivial_classes)},
        "rational_branch_points": [str(t) for t in model.rational_branch_points],
        "t1": model.t1,
        "genus": model.genus,
        "branch_count": model.branch_count,
    }
    _emit(_json_out(rep), args.out)
    return EXIT_OK


LOCAL_FIELDS = ["p", "class_id", "nu", "lower_bound_num", "lower_bound_den",
                "upper_bound_num", "upper_bound_den", "pass"]


def cmd_local(args) -> int:
    model = get_model(args.model)
    a, b = parse_range(args.prime_range)
    primes = [p for p in primes_between(a - 1, b) if p not in bad_primes(model)]
    rows, violations = [], []
    for data in scan_primes(model, primes):
        rep = check_prop41(data, model)
        violations.extend((data.p, r.class_id) for r in lang_weil_violations(rep))
        for cid in sorted(rep):
            r = rep[cid]
            ln, ld = _frac_parts(r.lower)
            un, ud = _frac_parts(r.upper)
            rows.append({"p": data.p, "class_id": cid, "nu": r.nu, "lower_bound_num": ln,
                         "lower_bound_den": ld, "upper_bound_num": un, "upper_bound_den": ud,
                         "pass": int(r.passed)})
    _emit(_csv_text(LOCAL_FIELDS, rows), args.out)
    if violations:
        print(f"Lang-Weil window violated at {violations[:10]}", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def _frobenius_arg(value):
    if value is None:
        return {}
    if isinstance(value, dict):
        return parse_frobenius(value)
    return load_frobenius(value)


def _certify_all(pl, limit):
    records = []
    for t0 in assemble(pl):
        if limit is not None and len(records) >= limit:
            break
        records.append(certify(t0, pl))
    return records


def cmd_sieve(args) -> int:
    model = get_model(args.model)
    pl = plan(model, float(args.x), S=parse_int_list(args.ram_primes),
              frobenius=_frobenius_arg(args.frobenius), t1=args.t1)
    records = _certify_all(pl, args.limit)
    _emit(_csv_text(RECORD_FIELDS, [r.to_row() for r in records]), args.out)
    summary = pl.summary()
    summary["records_written"] = len(records)
    summary["full_group_certified"] = sum(r.full_group_certified for r in records)
    sys.stderr.write(_json_out(summary))
    if not all(r.within_rho for r in records):
        return EXIT_VIOLATION
    return EXIT_OK


def _read_t0s(path) -> list[int]:
    with open(path, newline="") as fh:
        return [int(row["t0"]) for row in csv.DictReader(fh)]


FIELD_FIELDS = ["field_key", "representative_t0", "multiplicity"]


def cmd_distinct(args) -> int:
    model = get_model(args.model)
    res = count_distinct(_read_t0s(args.records), model, args.pmax)
    _emit(_csv_text(FIELD_FIELDS, res.rows()), args.out)
    sys.stderr.write(_json_out({"lower_bound": res.lower_bound, "exact": res.exact,
                                "fingerprint_count": res.fingerprint_count,
                                "dropped": list(res.dropped)}))
    return EXIT_OK


def parse_coeffs(text: str) -> UniPoly:
    """Ascending integer coefficients, e.g. "0,-1,1" for t^2 - t."""
    try:
        return UniPoly(tuple(int(c) for c in text.split(",")))
    except ValueError as exc:
        raise InputError(f"bad coefficient list {text!r}") from exc


def cmd_twist2(args) -> int:
    f = parse_coeffs(args.f)
    a, b = parse_range(args.prime_range)
    t_range = parse_range(args.t_range) if args.t_range else None
    rep = verify_grid(f, [args.d], t_range, primes_between(a - 1, b))
    _emit(_json_out(rep.to_json()), args.out)
    return EXIT_VIOLATION if rep.violations else EXIT_OK


def _load_poly(args) -> BiPoly:
    if args.expr:
        return parse_bipoly(args.expr)
    if not args.poly:
        raise InputError("give --poly F.json or --expr")
    return BiPoly.from_json(json.loads(Path(args.poly).read_text()))


def cmd_walkowiak(args) -> int:
    F = _load_poly(args)
    rep = walkowiak_report(F, parse_int_list(args.b_grid), lattice=args.lattice)
    _emit(_json_out(rep), args.out)
    return EXIT_OK


def _constants(path) -> Constants:
    if not path:
        return Constants()
    return _config_constants(json.loads(Path(path).read_text()))


def cmd_estimates(args) -> int:
    model = get_model(args.model)
    delta = Fraction(args.delta) if args.delta else None
    rep = {"exponents": exponents(model, delta).to_json(),
           "lower_bounds": lower_bound_rhs(model, float(args.x), constants=_constants(args.constants))}
    _emit(_json_out(rep), args.out)
    return EXIT_OK


DENSITY_FIELDS = ["x", "Sx_size", "exact_density", "exact_density_float", "observed", "N",
                  "frequency", "sigma", "within_3sigma", "corollary_bound", "small_sample"]


def cmd_density(args) -> int:
    model = get_model(args.model)
    grid = [float(v) for v in args.x_grid.split(",")]
    rows = density_experiment(model, grid, args.n)
    _emit(_csv_text(DENSITY_FIELDS, [r.to_row() for r in rows]), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# run: the end-to-end pipeline
# ---------------------------------------------------------------------------


@dataclass
class ExperimentConfig:
    model: str
    x: float | None = None
    y: float | None = None
    log_y: float | None = None
    delta: float | None = None
    frobenius: object = None
    ram_primes: list = field(default_factory=list)
    pmax: int = DEFAULT_PMAX
    limit: int | None = None
    seed: int = 0
    out_dir: str = "runs/default"
    constants: dict = field(default_factory=dict)

    def validate(self, delta_P: int) -> None:
        modes = sum(v is not None for v in (self.x, self.y, self.log_y))
        if modes != 1:
            raise InputError("give exactly one of x, y, log_y")
        if self.x is None:
            if self.delta is None or not Fraction(str(self.delta)) > delta_P:
                raise InputError(f"y-mode needs delta > delta_P = {delta_P}")
            if self.y is not None and self.y <= 1:
                raise InputError("y must exceed 1")

    def resolve_x(self, delta_P: int) -> tuple[float, float | None, float | None]:
        """(x, log y, delta^-) with x = log(y)/delta^- and delta^- = (delta + delta_P)/2."""
        if self.x is not None:
            return float(self.x), None, None
        log_y = float(self.log_y) if self.log_y is not None else math.log(self.y)
        dminus = (float(self.delta) + delta_P) / 2
        return log_y / dminus, log_y, dminus


def load_config(args) -> ExperimentConfig:
    base = {}
    if args.config:
        base = json.loads(Path(args.config).read_text())
    for key in ("model", "x", "y", "log_y", "delta", "frobenius", "pmax", "limit", "seed", "out_dir"):
        val = getattr(args, key, None)
        if val is not None:
            base[key] = val
    if args.ram_primes is not None:
        base["ram_primes"] = parse_int_list(args.ram_primes)
    if "model" not in base:
        raise InputError("no model given")
    known = set(ExperimentConfig.__dataclass_fields__)
    extra = set(base) - known
    if extra:
        raise InputError(f"unknown config keys {sorted(extra)}")
    return ExperimentConfig(**base)


def _config_constants(values: dict) -> Constants:
    # a1..a4 are reported with the config only; no evaluator consumes them
    known = set(Constants.__dataclass_fields__)
    extra = set(values) - known - {"a1", "a2", "a3", "a4"}
    if extra:
        raise InputError(f"unknown constants {sorted(extra)}")
    return Constants(**{k: float(v) for k, v in values.items() if k in known})


def run_theorem_main(cfg: ExperimentConfig) -> tuple[dict, list, object]:
    model = get_model(cfg.model)
    cfg.validate(model.delta_P)
    x, log_y, dminus = cfg.resolve_x(model.delta_P)
    pl = plan(model, x, S=parse_int_list(cfg.ram_primes), frobenius=_frobenius_arg(cfg.frobenius))
    records = _certify_all(pl, cfg.limit)
    certified = [r for r in records if r.full_group_certified]
    res = count_distinct([r.t0 for r in certified], model, cfg.pmax)
    n_lower = res.lower_bound
    summary = {
        "model": model.name,
        "model_hash": model.model_hash,
        "seed": cfg.seed,
        "constants": dict(sorted(cfg.constants.items())),
        "x": x,
        "delta_minus": dminus,
        "log_y": log_y,
        "plan": pl.summary(),
        "records": len(records),
        "certified_records": len(certified),
        "within_rho_all": all(r.within_rho for r in records),
        "N_lower": n_lower,
        "N_lower_exact": res.exact,
        "fields_multiplicity_sum": sum(len(p) for p in res.parts),
        "dropped_records": len(res.dropped),
        "cross_foot_ok": sum(len(p) for p in res.parts) + len(res.dropped) == len(certified),
        "log_N_lower": math.log(n_lower) if n_lower else None,
        "lower_bounds": lower_bound_rhs(model, x, pl.S, chi=pl.chi, constants=_config_constants(cfg.constants)),
    }
    if log_y is not None:
        a = float((1 - Fraction(1, model.group_order)) / Fraction(str(cfg.delta)))
        log_rho = math.log(pl.rho_x)
        summary.update({
            "alpha": a,
            "alpha_log_y": a * log_y,
            "log_rho_x": log_rho,
            "rho_x_le_y": log_rho <= log_y,
            "warnings": [] if log_rho <= log_y else ["rho(x) > y: y is below the range of the count"],
        })
    return summary, records, res


def cmd_run(args) -> int:
    cfg = load_config(args)
    summary, records, res = run_theorem_main(cfg)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "records.csv").write_text(_csv_text(RECORD_FIELDS, [r.to_row() for r in records]))
    (out / "fields.csv").write_text(_csv_text(FIELD_FIELDS, res.rows()))
    (out / "summary.json").write_text(_json_out(summary))
    sys.stdout.write(_json_out(summary))
    if not summary["within_rho_all"] or not summary["cross_foot_ok"]:
        return EXIT_VIOLATION
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="malle", description="Specialization counting toolkit for Galois covers of the line.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    model_help = "model JSON path or builtin:quadratic|s3_cubic|irrational"

    p = sub.add_parser("analyze", help="structural data of a model")
    p.add_argument("--model", required=True, help=model_help)
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("local", help="per-prime residue classification and Lang-Weil windows")
    p.add_argument("--model", required=True, help=model_help)
    p.add_argument("--prime-range", required=True, help="A..B")
    p.add_argument("--out")
    p.set_defaults(func=cmd_local)

    p = sub.add_parser("sieve", help="CRT enumeration and certification")
    p.add_argument("--model", required=True, help=model_help)
    p.add_argument("--x", required=True, type=float)
    p.add_argument("--ram-primes", default="")
    p.add_argument("--frobenius", help='JSON {"p": ["2A"] | "*"}')
    p.add_argument("--t1", type=int)
    p.add_argument("--limit", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sieve)

    p = sub.add_parser("distinct", help="lower bound on distinct specialized fields")
    p.add_argument("--model", required=True, help=model_help)
    p.add_argument("--records", required=True)
    p.add_argument("--pmax", type=int, default=DEFAULT_PMAX)
    p.add_argument("--out")
    p.set_defaults(func=cmd_distinct)

    p = sub.add_parser("twist2", help="quadratic twisting equivalences")
    p.add_argument("--f", required=True, help='ascending coefficients, e.g. "0,-1,1" for t^2 - t')
    p.add_argument("--d", required=True, type=int)
    p.add_argument("--prime-range", required=True)
    p.add_argument("--t-range")
    p.add_argument("--out")
    p.set_defaults(func=cmd_twist2)

    p = sub.add_parser("walkowiak", help="integral points, Liouville bound, case selection")
    p.add_argument("--poly", help="BiPoly JSON file")
    p.add_argument("--expr", help='polynomial text, e.g. "Y^2 - T"')
    p.add_argument("--b-grid", required=True)
    p.add_argument("--lattice", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_walkowiak)

    p = sub.add_parser("estimates", help="exponents and lower-bound right-hand sides")
    p.add_argument("--model", required=True, help=model_help)
    p.add_argument("--x", required=True, type=float)
    p.add_argument("--delta")
    p.add_argument("--constants", help="JSON with C1..C7")
    p.add_argument("--out")
    p.set_defaults(func=cmd_estimates)

    p = sub.add_parser("density", help="totally split density along an x grid")
    p.add_argument("--model", required=True, help=model_help)
    p.add_argument("--x-grid", required=True)
    p.add_argument("--n", type=int, default=10**6)
    p.add_argument("--out")
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("run", help="end-to-end pipeline from a config file")
    p.add_argument("--config")
    p.add_argument("--model")
    p.add_argument("--x", type=float)
    p.add_argument("--y", type=float)
    p.add_argument("--log-y", dest="log_y", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--frobenius")
    p.add_argument("--ram-primes")
    p.add_argument("--pmax", type=int)
    p.add_argument("--limit", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out-dir", dest="out_dir")
    p.set_defaults(func=cmd_run)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, *INPUT_ERRORS) as exc:
        print(f"malle: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except AssertionError as exc:
        print(f"malle: invariant violation: {exc}", file=sys.stderr)
        return EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
