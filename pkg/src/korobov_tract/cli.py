"""Command-line front end.

Data goes to stdout as CSV (header row first) or as a JSON array of row
objects; every float is written with 17 significant digits. Diagnostics go
to stderr. Exit status: 0 success, 1 domain or usage error, 2 resource cap.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from pathlib import Path

from .approx import GaussianDrawConfig, mc_avg_error
from .caps import Caps, default_caps, parse_caps
from .complexity import (Criterion, error_curve, info_complexity_avg, info_complexity_worst)
from .entropy import LpBallQuery, chain_check, grid_count, load_points
from .errors import KorobovError, ResourceCapError, SpecError
from .sequences import SequenceFamily, WeightSpec, validate
from .spectrum import top_exponents
from .tractability import TractabilityQuery, classify, probe_ratio

EXIT_OK, EXIT_DOMAIN, EXIT_CAP = 0, 1, 2


class UsageError(KorobovError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage().rstrip()}")


# -- spec files ---------------------------------------------------------------

def _key_line(text: str, key: str) -> int:
    m = re.search(rf'"{re.escape(key)}"\s*:', text)
    return text.count("\n", 0, m.start()) + 1 if m else 1


def _family(value, where: str) -> SequenceFamily:
    if isinstance(value, str):
        return SequenceFamily.parse(value)
    if isinstance(value, dict):
        params = dict(value)
        kind = params.pop("kind", None)
        if kind is None:
            raise SpecError(f"{where}: family object needs a 'kind'", constraint="grammar")
        return SequenceFamily.from_params(str(kind), params)
    raise SpecError(f"{where}: expected a family string or object", constraint="grammar")


def load_spec_with_caps(path) -> tuple[WeightSpec, Caps]:
    """Read a JSON spec file ``{"omega": .., "a": .., "b": .., "caps": ..}``."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise KorobovError(f"{path}: cannot read: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise KorobovError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise KorobovError(f"{path}:1: top level must be an object")
    for key in ("omega", "a", "b"):
        if key not in doc:
            raise KorobovError(f"{path}:1: missing key {key!r}")
    unknown = set(doc) - {"omega", "a", "b", "caps"}
    if unknown:
        key = sorted(unknown)[0]
        raise KorobovError(f"{path}:{_key_line(text, key)}: unknown key {key!r}")

    fams = {}
    for key in ("a", "b"):
        try:
            fams[key] = _family(doc[key], key)
        except (SpecError, KeyError, TypeError, ValueError) as exc:
            raise SpecError(f"{path}:{_key_line(text, key)}: {key}: {exc}",
                            getattr(exc, "constraint", "grammar")) from None
    omega = doc["omega"]
    if isinstance(omega, bool) or not isinstance(omega, (int, float)):
        raise SpecError(f"{path}:{_key_line(text, 'omega')}: omega must be a number", "omega")
    report = validate(float(omega), fams["a"], fams["b"], K=1000)
    if not report.valid:
        key = {"omega": "omega", "a-monotone": "a", "b-infimum": "b"}.get(report.constraint, "omega")
        raise SpecError(f"{path}:{_key_line(text, key)}: {report.message} (constraint: {report.constraint})",
                        report.constraint, report.index)
    caps = default_caps()
    if "caps" in doc:
        raw = doc["caps"]
        try:
            if isinstance(raw, dict):
                raw = ",".join(f"{k}={v}" for k, v in raw.items())
            caps = parse_caps(str(raw), caps)
        except ValueError as exc:
            raise KorobovError(f"{path}:{_key_line(text, 'caps')}: {exc}") from None
    return WeightSpec(float(omega), fams["a"], fams["b"]), caps


def load_spec(path) -> WeightSpec:
    return load_spec_with_caps(path)[0]


# -- output -------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _json_value(value) -> str:
    if value is None or (isinstance(value, float) and not math.isfinite(value)):
        return "null"
    if isinstance(value, (bool, int, float)):
        return _fmt(value)
    return json.dumps(str(value))


def render(columns, rows, fmt: str = "csv") -> str:
    if fmt == "json":
        objs = ["{" + ", ".join(f"{json.dumps(c)}: {_json_value(v)}" for c, v in zip(columns, row)) + "}"
                for row in rows]
        return "[\n" + ",\n".join("  " + o for o in objs) + ("\n" if objs else "") + "]\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(["" if v is None else _fmt(v) for v in row])
    return buf.getvalue()


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    """``1,2,5`` or ``1..8``."""
    out = []
    for part in filter(None, (p.strip() for p in text.split(","))):
        lo, sep, hi = part.partition("..")
        try:
            out.extend(range(int(lo), int(hi) + 1) if sep else [int(part)])
        except ValueError:
            raise UsageError(f"expected integers or ranges like 1..8, got {text!r}") from None
    return out


# -- subcommands ----------------------------------------------------------------

def _cmd_spectrum(args):
    spec, caps = load_spec_with_caps(args.spec)
    exps = top_exponents(spec, args.d, args.n, caps=caps)
    rows = [(r, float(e), float(spec.omega ** e)) for r, e in enumerate(exps, start=1)]
    return ["rank", "exponent", "eigenvalue"], rows


def _cmd_complexity(args):
    spec, caps = load_spec_with_caps(args.spec)
    crit = Criterion.parse(args.criterion)
    if args.setting == "worst":
        n = info_complexity_worst(spec, args.d, args.eps, caps=caps)
    else:
        n = info_complexity_avg(spec, args.d, args.eps, crit, caps=caps)
    return ["d", "eps", "setting", "criterion", "n"], [(args.d, args.eps, args.setting, crit.value, n)]


def _cmd_error_curve(args):
    spec, caps = load_spec_with_caps(args.spec)
    rows = error_curve(spec, args.d, args.n_max, caps=caps)
    if args.setting == "worst":
        return ["n", "e_wor"], [(n, w) for n, w, _ in rows]
    if args.setting == "avg":
        return ["n", "e_avg"], [(n, a) for n, _, a in rows]
    return ["n", "e_wor", "e_avg"], rows


def _cmd_sample_avg(args):
    spec, caps = load_spec_with_caps(args.spec)
    cfg = GaussianDrawConfig(threshold=args.threshold, seed=args.seed, samples=args.samples)
    r = mc_avg_error(spec, args.d, args.n, cfg, jobs=args.jobs, caps=caps)
    cols = ["d", "n", "samples", "seed", "estimate", "std_error", "oracle", "z", "neglected", "allowance"]
    return cols, [(args.d, args.n, r.samples, args.seed, r.estimate, r.std_error, r.oracle, r.z,
                   r.neglected, r.allowance)]


def _cmd_grid_count(args):
    q = LpBallQuery(args.p, args.m, args.d)
    return ["p", "m", "d", "count"], [(args.p, args.m, args.d, grid_count(q))]


def _cmd_chain_check(args):
    pts = load_points(args.points)
    cands = load_points(args.candidates) if args.candidates else None
    c = chain_check(pts, args.eps, cands)
    return (["eps", "points", "packing_2eps", "covering_eps", "packing_eps", "holds"],
            [(args.eps, len(pts), c.packing_2eps, c.covering_eps, c.packing_eps, c.holds)])


def _cmd_classify(args):
    spec = load_spec(args.spec)
    q = TractabilityQuery(args.notion, args.setting, args.s, args.t)
    v = classify(spec, q)
    limits = ";".join(f"{k}={val}" for k, val in v.limits.items())
    return (["notion", "setting", "s", "t", "outcome", "tag", "condition", "limits", "note"],
            [(q.notion, q.setting, q.s, q.t, v.outcome.value, v.tag, v.condition, limits, v.note)])


def _cmd_probe(args):
    spec, caps = load_spec_with_caps(args.spec)
    table = probe_ratio(spec, args.s, args.t, args.setting, _floats(args.eps), _ints(args.d),
                        jobs=args.jobs, caps=caps)
    if args.table == "trend":
        rows = [(k, hi, lo) for k, (hi, lo) in enumerate(zip(table.antidiagonal_max, table.antidiagonal_min))]
        print(f"maxima strictly decreasing: {table.maxima_strictly_decreasing}; "
              f"last below first: {table.last_below_first} (qualitative)", file=sys.stderr)
        return ["antidiagonal", "max_ratio", "min_ratio"], rows
    return ["eps", "d", "n", "ratio"], list(table.rows)


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _nonneg_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="korobov-tract", description="Spectra, complexity and EC-tractability "
                     "for approximation in analytic Korobov spaces.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_text, spec=True):
        p = sub.add_parser(name, help=help_text)
        if spec:
            p.add_argument("--spec", required=True, help="JSON spec file")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.set_defaults(func=func)
        return p

    p = add("spectrum", _cmd_spectrum, "leading eigenvalues")
    p.add_argument("--d", type=_positive_int, required=True)
    p.add_argument("--n", type=_positive_int, required=True)

    p = add("complexity", _cmd_complexity, "information complexity n(eps, d)")
    p.add_argument("--d", type=_positive_int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--setting", choices=("worst", "avg"), default="worst")
    p.add_argument("--criterion", choices=("abs", "nor"), default="abs")

    p = add("error-curve", _cmd_error_curve, "minimal errors for n = 0..n_max")
    p.add_argument("--d", type=_positive_int, required=True)
    p.add_argument("--n-max", type=_nonneg_int, required=True)
    p.add_argument("--setting", choices=("worst", "avg", "both"), default="both")

    p = add("sample-avg", _cmd_sample_avg, "Monte Carlo check of the average-case error")
    p.add_argument("--d", type=_positive_int, required=True)
    p.add_argument("--n", type=_nonneg_int, required=True)
    p.add_argument("--samples", type=_positive_int, default=1000)
    p.add_argument("--seed", type=_nonneg_int, default=0)
    p.add_argument("--threshold", type=float, default=1e-8)
    p.add_argument("--jobs", type=_positive_int, default=1)

    ent = sub.add_parser("entropy", help="grid numbers and packing/covering")
    esub = ent.add_subparsers(dest="entropy_command", required=True, parser_class=_Parser)
    p = esub.add_parser("grid-count", help="integer points in an l_p ball")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--m", type=float, required=True)
    p.add_argument("--d", type=_positive_int, required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=_cmd_grid_count)
    p = esub.add_parser("chain-check", help="M_2eps <= N_eps <= M_eps on a point file")
    p.add_argument("--points", required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--candidates")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=_cmd_chain_check)

    tr = sub.add_parser("tractability", help="EC-tractability verdicts and probes")
    tsub = tr.add_subparsers(dest="tractability_command", required=True, parser_class=_Parser)
    settings = ("worst", "avg-abs", "avg-nor")
    p = tsub.add_parser("classify", help="decide a tractability notion")
    p.add_argument("--spec", required=True)
    p.add_argument("--notion", required=True)
    p.add_argument("--s", type=float)
    p.add_argument("--t", type=float)
    p.add_argument("--setting", choices=settings, default="worst")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=_cmd_classify)
    p = tsub.add_parser("probe", help="ln n(eps, d) / ((ln 1/eps)**s + d**t) on a grid")
    p.add_argument("--spec", required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--setting", choices=settings, default="worst")
    p.add_argument("--eps", required=True, help="comma-separated list")
    p.add_argument("--d", required=True, help="comma-separated list or range like 1..8")
    p.add_argument("--table", choices=("rows", "trend"), default="rows")
    p.add_argument("--jobs", type=_positive_int, default=1)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=_cmd_probe)
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        columns, rows = args.func(args)
    except ResourceCapError as exc:
        print(f"error: resource cap {exc.cap_name or ''} hit: {exc}", file=stderr)
        if exc.lower_bound is not None:
            print(f"best lower bound: {exc.lower_bound}", file=stderr)
        return EXIT_CAP
    except (KorobovError, ValueError, OverflowError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_DOMAIN
    stdout.write(render(columns, rows, args.format))
    return EXIT_OK


def main() -> None:
    try:
        code = run()
    except SystemExit as exc:  # --help
        code = exc.code if isinstance(exc.code, int) else EXIT_OK
    sys.exit(code)
