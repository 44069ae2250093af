"""Command-line front end.

Every command can read its settings from a declarative experiment file
(``--config``, JSON or YAML); flags given on the command line override the
file.  JSON output is validated against ``schemas/report.schema.json``.

CSV columns:
  moments        N, order, value, reference, residual
  catalan-audit  n, recursion, closed_form, noncrossing_count, ordered_count, double_factorial, ok
  cluster-check  condition, model, verdict, max_residual, tolerance, exact, horizon

Exit status: 0 on success, 1 when ``--strict`` is set and a verdict fails (or
an audit disagrees), 2 on configuration or budget errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

from . import __version__
from .averaging import AverageConfig, evaluate_phi_infinity
from .clustering import CONDITIONS, catmap_counterexample, check_implication_chain, run_condition
from .fluctuations import BRUTE_FORCE_BUDGET, centre, finite_n_moment, FluctuationSpec, reference_moment
from .models import CatMapModel, load_model_config, resolve_model
from .partitions import ENUMERATION_CAP, SizeGuardError, catalan_audit
from .scalars import format_scalar, to_complex
from .words import format_word, parse_word

SCHEMA_VERSION = "1.0"
COMMANDS = ("moments", "cluster-check", "phi-infinity", "catalan-audit", "catmap-counterexample")
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

DEFAULTS = {
    "moments": {"model": "freeshift", "observable": "e0", "orders": [2, 4, 6], "ladder": [4, 16, 64], "format": "csv"},
    "cluster-check": {"model": "freeshift", "condition": "all", "horizon": 64, "tolerance": 1e-6, "format": "json"},
    "phi-infinity": {"model": "freeshift", "word": "e0@1 e0@2 e0@1 e0@2", "method": "auto", "horizon": 256, "tolerance": 1e-6, "format": "json"},
    "catalan-audit": {"n": 8, "format": "json"},
    "catmap-counterexample": {"theta": "1/3", "T": [1, 1, 1, 2], "p": [1, 0], "q": [0, 1], "horizon": 720, "format": "json"},
}


class UsageError(Exception):
    """Configuration problem reported with a hint and exit status 2."""


@dataclass
class ExperimentConfig:
    command: str
    parameters: dict = field(default_factory=dict)
    output: str | None = None
    strict: bool = False

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}; expected one of {', '.join(COMMANDS)}")
        merged = dict(DEFAULTS[self.command])
        merged.update({k: v for k, v in self.parameters.items() if v is not None})
        self.parameters = merged
        if self.parameters.get("format") not in ("json", "csv"):
            raise UsageError("format must be json or csv")
        tol = self.parameters.get("tolerance")
        if tol is not None and not float(tol) > 0:
            raise UsageError("tolerance must be positive")

    @property
    def format(self) -> str:
        return self.parameters["format"]

    def to_dict(self) -> dict:
        return {"command": self.command, "parameters": _jsonable(self.parameters), "output": self.output, "strict": self.strict}


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, Fraction):
        return str(value)
    return value


def _int_list(text) -> list[int]:
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    try:
        return [int(v) for v in str(text).replace(" ", "").split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def load_report_schema() -> dict:
    return json.loads(resources.files("asymfluct").joinpath("schemas/report.schema.json").read_text())


def validate_report(report: dict) -> None:
    import jsonschema

    jsonschema.validate(report, load_report_schema())


# -- commands ----------------------------------------------------------------------


def _model(ref):
    try:
        return resolve_model(ref)
    except FileNotFoundError:
        raise UsageError(f"model {ref!r} is neither a built-in kind nor a readable config file") from None
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad model config: {exc}") from None


def _observable(model, name: str):
    try:
        return model.observable(name)
    except KeyError as exc:
        raise UsageError(f"{exc.args[0]}; registered: {', '.join(sorted(model.registry))}") from None


def cmd_catalan_audit(p: dict) -> tuple[dict, list[dict], int]:
    n = int(p["n"])
    if n > ENUMERATION_CAP:
        raise SizeGuardError(f"n={n} exceeds the enumeration cap {ENUMERATION_CAP}; try --n {ENUMERATION_CAP}")
    rows = catalan_audit(n)
    ok = all(r["ok"] for r in rows)
    return {"rows": rows, "ok": ok}, rows, EXIT_OK if ok else EXIT_FAIL


def cmd_moments(p: dict) -> tuple[dict, list[dict], int]:
    model = _model(p["model"])
    x = _observable(model, p["observable"])
    orders = _int_list(p["orders"])
    ladder = _int_list(p["ladder"])
    if not orders or min(orders) < 1 or not ladder or min(ladder) < 1:
        raise UsageError("orders and ladder must be nonempty lists of positive integers")
    xc, _ = centre(model, x)
    variance = model.state(xc * xc)
    law = model.fluctuation_law
    rows = []
    for N in ladder:
        for r in orders:
            mv = finite_n_moment(model, FluctuationSpec((x,) * r, N), "grouped")
            value = mv.value
            reference = reference_moment(law, r, variance) if law != "none" else None
            residual = None if reference is None else abs(to_complex(value) - to_complex(reference))
            rows.append(
                {
                    "N": N,
                    "order": r,
                    "value": format_scalar(value),
                    "reference": None if reference is None else format_scalar(reference),
                    "residual": residual,
                }
            )
    result = {"model": model.describe(), "observable": p["observable"], "law": law, "rows": rows}
    return result, rows, EXIT_OK


def cmd_cluster_check(p: dict) -> tuple[dict, list[dict], int]:
    model = _model(p["model"])
    cond = str(p["condition"])
    conditions = CONDITIONS if cond == "all" else tuple(c.strip() for c in cond.split(","))
    for c in conditions:
        if c not in CONDITIONS:
            raise UsageError(f"unknown condition {c!r}; expected 'all' or any of {', '.join(CONDITIONS)}")
    horizon = int(p["horizon"])
    if horizon < 2:
        raise UsageError("horizon must be at least 2")
    reports = {c: run_condition(model, c, horizon, float(p["tolerance"])) for c in conditions}
    dicts = [r.to_dict() for r in reports.values()]
    result = {
        "model": model.describe(),
        "reports": dicts,
        "implication_violations": check_implication_chain(reports),
    }
    rows = [{k: d[k] for k in ("condition", "model", "verdict", "max_residual", "tolerance", "exact", "horizon")} for d in dicts]
    failed = any(d["verdict"] == "fails" for d in dicts)
    return result, rows, EXIT_FAIL if failed else EXIT_OK


def cmd_phi_infinity(p: dict) -> tuple[dict, list[dict], int]:
    model = _model(p["model"])
    try:
        w = parse_word(p["word"], model)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    cfg = AverageConfig(horizon=int(p["horizon"]), tolerance=float(p["tolerance"]))
    try:
        res = evaluate_phi_infinity(model, w, cfg, p["method"])
    except (NotImplementedError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    out = res.to_dict()
    out.update({"model": model.describe(), "word": format_word(w)})
    failed = res.agree is False or (res.average is not None and not res.average.converged)
    row = {"word": out["word"], "value": out["value"], "method": out["method"]}
    return out, [row], EXIT_FAIL if failed else EXIT_OK


def cmd_catmap_counterexample(p: dict) -> tuple[dict, list[dict], int]:
    T = _int_list(p["T"])
    if len(T) != 4:
        raise UsageError("T needs four entries a,b,c,d for [[a,b],[c,d]]")
    try:
        model = CatMapModel(Fraction(str(p["theta"])), ((T[0], T[1]), (T[2], T[3])))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(str(exc)) from None
    pv, qv = _int_list(p["p"]), _int_list(p["q"])
    if len(pv) != 2 or len(qv) != 2:
        raise UsageError("p and q are two-component integer labels such as 1,0")
    result = catmap_counterexample(model, pv, qv, int(p["horizon"]))
    row = {k: result[k] for k in ("ray_limit", "cesaro_average", "period", "oracle_max_error", "independent")}
    return result, [row], EXIT_OK if result["independent"] and result["oracle_agrees"] else EXIT_FAIL


HANDLERS = {
    "moments": cmd_moments,
    "cluster-check": cmd_cluster_check,
    "phi-infinity": cmd_phi_infinity,
    "catalan-audit": cmd_catalan_audit,
    "catmap-counterexample": cmd_catmap_counterexample,
}


def run(config: ExperimentConfig) -> tuple[int, str]:
    """Execute one experiment; returns the exit status and the rendered output."""
    result, rows, status = HANDLERS[config.command](config.parameters)
    if not config.strict and config.command in ("cluster-check", "phi-infinity"):
        status = EXIT_OK
    if config.format == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]) if rows else [], lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: "" if v is None else v for k, v in row.items()})
        text = buf.getvalue()
    else:
        report = {
            "schema_version": SCHEMA_VERSION,
            "command": config.command,
            "config": config.to_dict(),
            "exit_status": status,
            "result": _jsonable(result),
        }
        validate_report(report)
        text = json.dumps(report, indent=2) + "\n"
    if config.output:
        Path(config.output).write_text(text)
    return status, text


# -- argument parsing ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="asymfluct", description="Asymptotic states, clustering and fluctuation experiments.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command")

    def common(sp):
        sp.add_argument("--config", help="experiment file (JSON or YAML); flags override its values")
        sp.add_argument("--format", choices=("json", "csv"), default=None)
        sp.add_argument("--output", help="write the report here instead of stdout")
        sp.add_argument("--strict", action="store_true", default=None, help="exit 1 on any failing verdict")

    sp = sub.add_parser("catalan-audit", help="Catalan numbers against exhaustive pair-partition counts")
    common(sp)
    sp.add_argument("--n", type=int)

    sp = sub.add_parser("moments", help="finite-N fluctuation moments (CSV: N, order, value, reference, residual)")
    common(sp)
    sp.add_argument("--model", help="built-in kind or model config file")
    sp.add_argument("--observable")
    sp.add_argument("--orders", type=_int_list)
    sp.add_argument("--ladder", type=_int_list)

    sp = sub.add_parser("cluster-check", help="clustering and asymptotic Abelianess verdicts")
    common(sp)
    sp.add_argument("--model")
    sp.add_argument("--condition", help=f"'all' or comma-separated ids from {', '.join(CONDITIONS)}")
    sp.add_argument("--horizon", type=int)
    sp.add_argument("--tolerance", type=float)

    sp = sub.add_parser("phi-infinity", help="asymptotic state of a word such as 'e0@1 e1@2'")
    common(sp)
    sp.add_argument("--model")
    sp.add_argument("--word")
    sp.add_argument("--method", choices=("auto", "exact", "average", "both"))
    sp.add_argument("--horizon", type=int)
    sp.add_argument("--tolerance", type=float)

    sp = sub.add_parser("catmap-counterexample", help="ray limit versus Cesaro mean on the cat map")
    common(sp)
    sp.add_argument("--theta")
    sp.add_argument("--T", type=_int_list, help="matrix entries a,b,c,d")
    sp.add_argument("--p", type=_int_list)
    sp.add_argument("--q", type=_int_list)
    sp.add_argument("--horizon", type=int)
    return parser


_META = ("command", "config", "output", "strict")


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    file_values: dict = {}
    if args.config:
        try:
            file_values = load_model_config(args.config) or {}
        except FileNotFoundError:
            raise UsageError(f"config file {args.config!r} not found") from None
        if not isinstance(file_values, dict):
            raise UsageError("config file must hold a mapping")
        if file_values.get("command", args.command) != args.command:
            raise UsageError(f"config file is for {file_values['command']!r}, not {args.command!r}")
    params = dict(file_values.get("parameters", {}))
    for key in ("model", "format"):
        if key in file_values:
            params.setdefault(key, file_values[key])
    flags = {k: v for k, v in vars(args).items() if k not in _META and v is not None}
    params.update(flags)
    output = args.output if args.output is not None else file_values.get("output")
    strict = args.strict if args.strict is not None else bool(file_values.get("strict", False))
    return ExperimentConfig(args.command, params, output, strict)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    try:
        config = config_from_args(args)
        status, text = run(config)
    except UsageError as exc:
        print(f"asymfluct {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SizeGuardError as exc:
        print(f"asymfluct {args.command}: budget exceeded: {exc}", file=sys.stderr)
        print(
            f"hint: keep n <= {ENUMERATION_CAP} for enumeration and N**r <= {BRUTE_FORCE_BUDGET} for brute force",
            file=sys.stderr,
        )
        return EXIT_USAGE
    if not config.output:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
