"""Command-line front end.

Exit codes: 0 when every check passes, 2 when a numerical certificate fails,
1 on usage errors (bad flags, unparsable states, cutoffs that are too small).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass

import numpy as np

from . import config
from .errors import (
    CutoffTooSmallError,
    IndistinguishableError,
    InvalidDimensionError,
    InvalidStateError,
    NoFeasibleGaussianError,
    ResourceLimitError,
    WitnessViolationError,
)
from .examples import MixtureSpec, figure_data, mixture_state
from .fock import fock_state, load_operator, save_operator, thermal_state, von_neumann_entropy
from .gaussian import GaussianParams, gaussian_entropy, moments_of, synthesize
from .optimize import OptimizerConfig
from .schemas import validate

CERTIFICATE_FAIL = 2
USAGE_ERROR = 1


class UsageError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


@dataclass
class RunConfig:
    cutoff: int = None
    cutoff2: int = config.CUTOFF_TWO_COPY
    cutoff4: int = config.CUTOFF_FOUR_COPY
    seed: int = config.OPTIMIZER["seed"]
    starts: int = config.OPTIMIZER["starts"]
    max_evals: int = config.OPTIMIZER["max_evals"]
    tol: float = None
    format: str = "csv"
    out: str = None
    bits: bool = False

    @classmethod
    def from_args(cls, args):
        return cls(**{k: getattr(args, k) for k in cls.__dataclass_fields__ if hasattr(args, k)})

    def optimizer(self) -> OptimizerConfig:
        return OptimizerConfig(starts=self.starts, max_evals=self.max_evals, seed=self.seed)

    def to_json(self):
        d = asdict(self)
        d.pop("out")
        return d


# --- state specs ---------------------------------------------------------------


def _kv(body):
    out = {}
    for part in filter(None, body.split(",")):
        if "=" not in part:
            raise UsageError(f"expected key=value, got {part!r}")
        k, v = part.split("=", 1)
        try:
            out[k.strip()] = float(v)
        except ValueError:
            raise UsageError(f"{k}: {v!r} is not a number") from None
    return out


def parse_state(spec: str, cutoff: int):
    """``fock:n``, ``thermal:nbar``, ``mixture:q=..,d=..``,
    ``gaussian:vacuum`` or ``gaussian:nbar=..,r=..,phi=..,ax=..,ay=..``."""
    kind, _, body = spec.partition(":")
    try:
        if kind == "fock":
            return fock_state(int(body), cutoff)
        if kind == "thermal":
            st = thermal_state(float(body), cutoff)
            if st.tail_mass > config.TAIL_TOL:
                raise CutoffTooSmallError(
                    f"cutoff {cutoff} drops probability {st.tail_mass:.3e} of {spec}",
                    tail_mass=st.tail_mass,
                )
            return st
        if kind == "mixture":
            kv = _kv(body)
            return mixture_state(MixtureSpec(kv.get("q", 0.0), kv.get("d", 0.0)), cutoff)
        if kind == "gaussian":
            kv = {} if body == "vacuum" else _kv(body)
            p = GaussianParams(kv.get("nbar", 0.0), kv.get("r", 0.0), kv.get("phi", 0.0),
                               (kv.get("ax", 0.0), kv.get("ay", 0.0)))
            st = synthesize(p, cutoff)
            return type(st)(st.op, st.tail_mass, label=spec)
    except (InvalidStateError, InvalidDimensionError) as exc:
        raise UsageError(f"state {spec!r}: {exc}") from None
    except ValueError as exc:
        if isinstance(exc, CutoffTooSmallError):
            raise
        raise UsageError(f"state {spec!r}: {exc}") from None
    raise UsageError(f"unknown state kind {kind!r} in {spec!r}")


def _state_index(spec):
    kind, _, body = spec.partition(":")
    if kind == "fock":
        return int(body)
    if kind == "mixture":
        return _kv(body).get("d", 0.0)
    return ""


def _parse_range(text):
    """``a..b`` (inclusive integers)."""
    try:
        lo, hi = text.split("..")
        lo, hi = int(lo), int(hi)
    except ValueError:
        raise UsageError(f"expected an integer range like 1..3, got {text!r}") from None
    if hi < lo:
        return []
    return list(range(lo, hi + 1))


def _parse_grid(text):
    """``start:stop:step`` (inclusive of ``stop`` up to rounding) or a comma list."""
    try:
        if ":" in text:
            a, b, h = (float(t) for t in text.split(":"))
            if h <= 0:
                raise ValueError
            n = int(math.floor((b - a) / h + 1e-9)) + 1
            return [round(a + k * h, 12) for k in range(max(n, 0))]
        return [float(t) for t in text.split(",") if t]
    except ValueError:
        raise UsageError(f"cannot parse grid {text!r}; use start:stop:step") from None


# --- output --------------------------------------------------------------------


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _csv(columns, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in columns])
    return buf.getvalue()


def _emit(text, rc: RunConfig):
    if rc.out:
        with open(rc.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj, schema):
    validate(obj, schema)
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _table(command, rc, columns, rows, failures):
    passed = not failures
    if rc.format == "json":
        doc = {"command": command, "run_config": rc.to_json(), "columns": list(columns),
               "rows": rows, "passed": passed, "failures": failures}
        _emit(_json(doc, "table_output"), rc)
    else:
        _emit(_csv(columns, rows), rc)
    for f in failures:
        print(f"FAIL: {f}", file=sys.stderr)
    return 0 if passed else CERTIFICATE_FAIL


# --- subcommands -----------------------------------------------------------------


def cmd_fock(args, rc):
    ns = _parse_range(args.n_range)
    tol = 0.01 if rc.tol is None else rc.tol
    opt = None if args.no_optimizer else rc.optimizer()
    rows = figure_data("fig3", ns, optimizer=opt, cutoff=rc.cutoff)
    failures = [
        f"n={r['n']}: relative error {r['rel_err']:.3e} > {tol:g}"
        for r in rows if r["rel_err"] is not None and r["rel_err"] > tol
    ]
    return _table("fock", rc, ("n", "closed_form", "optimizer_value", "rel_err"), rows, failures)


def cmd_mixture(args, rc):
    from .robustness import robustness_gaussian

    ds = _parse_grid(args.d_grid)
    rows = figure_data("fig4", ds, q=args.q)
    failures = []
    columns = ["d", "relent_bound", "homodyne_bound", "x_opt"]
    for r in rows:
        if r["homodyne_bound"] is not None and r["d"] >= 0.6 - 1e-12:
            if r["homodyne_bound"] < r["relent_bound"] - 1e-12:
                failures.append(f"d={r['d']}: homodyne bound below relative-entropy bound")
    if args.optimize:
        columns.append("optimizer_value")
        N = rc.cutoff or config.CUTOFF_SINGLE
        for r in rows:
            s = MixtureSpec(args.q, r["d"])
            r["optimizer_value"] = robustness_gaussian(mixture_state(s, N), rc.optimizer()).value
            lower = max(r["relent_bound"], r["homodyne_bound"] or 0.0)
            if r["optimizer_value"] < lower - 1e-6:
                failures.append(f"d={r['d']}: optimizer value below a lower bound")
    return _table("mixture", rc, columns, rows, failures)


def _witness_stage(args, rc):
    from .witness import build_witness, check_witness_soundness, robustness_lower_from_witness

    m = args.copies
    N = rc.cutoff2 if m == 2 else rc.cutoff4
    rho = parse_state(args.state, N)
    w = build_witness(rho, m, rc.optimizer())
    value = w.evaluations[-1][1]
    metrics = {
        "epsilon": w.epsilon,
        "op_norm": w.op_norm,
        "witness_on_state": value,
        "obiwan_bound": robustness_lower_from_witness(rho, w),
    }
    failures = []
    if not value < 0:
        failures.append(f"witness is not negative on the state: {value:.3e}")
    soundness = None
    if args.sobol or args.adversarial:
        try:
            rep = check_witness_soundness(
                w, rc.optimizer(), n_sobol=args.sobol, n_adversarial=args.adversarial,
                adversarial_evals=args.adversarial_evals,
            )
        except WitnessViolationError as exc:
            failures.append(str(exc))
            soundness = {"min_value": exc.value, "argmin": exc.params.to_json()}
            metrics["soundness_min"] = exc.value
        else:
            soundness = rep.to_json()
            metrics["soundness_min"] = rep.min_value
    return rho, w, metrics, soundness, failures


def _demo_output(command, args, rc, w, metrics, soundness, failures, task=None, csv_cols=None, row=None):
    passed = not failures
    if rc.format == "json":
        doc = {"command": command, "run_config": rc.to_json(), "state": args.state,
               "witness": w.to_json(), "metrics": metrics, "soundness": soundness,
               "passed": passed, "failures": failures}
        if task is not None:
            doc["task"] = task.to_json()
        _emit(_json(doc, "demo_output"), rc)
    else:
        _emit(_csv(csv_cols, [row]), rc)
    for f in failures:
        print(f"FAIL: {f}", file=sys.stderr)
    return 0 if passed else CERTIFICATE_FAIL


def cmd_witness_demo(args, rc):
    rho, w, metrics, soundness, failures = _witness_stage(args, rc)
    cols = ("state_label", "m", "epsilon", "op_norm", "witness_on_state", "obiwan_bound",
            "soundness_min")
    row = {"state_label": args.state, "m": w.m, **metrics}
    return _demo_output("witness-demo", args, rc, w, metrics, soundness, failures,
                        csv_cols=cols, row=row)


def cmd_discrim_demo(args, rc):
    from .discrimination import CSV_FIELDS, gaussian_sup_p_succ, task_from_witness, task_row
    from .robustness import robustness_gaussian

    rho, w, metrics, soundness, failures = _witness_stage(args, rc)
    task = task_from_witness(w)
    R = None
    if not args.no_robustness:
        single = parse_state(args.state, rc.cutoff or config.CUTOFF_SINGLE)
        R = robustness_gaussian(single, rc.optimizer()).value
    row = task_row(task, rho, R if R is not None else math.nan, args.state, _state_index(args.state))
    if R is None:
        row["theorem2_cap"] = None
    metrics.update({k: row[k] for k in ("x_norm", "p_rho", "cap", "ratio", "theorem2_cap")})
    metrics["robustness"] = R
    if args.gaussian_sup:
        metrics["gaussian_sup_numeric"], _ = gaussian_sup_p_succ(task, rc.optimizer())
        if metrics["gaussian_sup_numeric"] > row["cap"] + 1e-8:
            failures.append("a Gaussian beat the analytic cap")
    if not row["ratio"] > 1 + 1e-9:
        failures.append(f"advantage ratio {row['ratio']:.12f} is not above 1")
    if R is not None and row["ratio"] > row["theorem2_cap"] + 1e-6:
        failures.append("advantage ratio exceeds (1 + R)^m")
    return _demo_output("discrim-demo", args, rc, w, metrics, soundness, failures, task=task,
                        csv_cols=CSV_FIELDS, row=row)


def cmd_entropy(args, rc):
    rho = parse_state(args.state, rc.cutoff or config.CUTOFF_SINGLE)
    base = 2 if rc.bits else None
    m = moments_of(rho)
    S = von_neumann_entropy(rho, base=base)
    Sref = gaussian_entropy(m, base=base)
    doc = {"command": "entropy", "state": args.state, "unit": "bits" if rc.bits else "nats",
           "entropy": S, "reference_entropy": Sref, "rel_entropy_nongaussianity": Sref - S,
           "reference": m.to_json()}
    if rc.format == "json":
        _emit(_json(doc, "entropy_output"), rc)
    else:
        cols = ("state", "unit", "entropy", "reference_entropy", "rel_entropy_nongaussianity")
        _emit(_csv(cols, [doc]), rc)
    return 0


def cmd_config(args, rc):
    doc = config.dump()
    doc.pop("threads")
    _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", rc)
    return 0


def cmd_export_op(args, rc):
    if not rc.out:
        raise UsageError("export-op needs --out")
    rho = parse_state(args.state, rc.cutoff or config.CUTOFF_SINGLE)
    save_operator(rho.op, rc.out)
    return 0


def cmd_inspect_op(args, rc):
    try:
        A = load_operator(args.path)
    except OSError as exc:
        raise UsageError(str(exc)) from None
    tr = A.trace()
    doc = {"cutoff": A.cutoff, "modes": A.modes, "side": A.side, "hermitian": A.hermitian,
           "trace": [tr.real, tr.imag]}
    if rc.format == "json":
        _emit(_json(doc, "operator_info"), rc)
    else:
        row = dict(doc, trace=f"{tr.real!r}{tr.imag:+}j")
        _emit(_csv(("cutoff", "modes", "side", "hermitian", "trace"), [row]), rc)
    return 0


def _common():
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("run configuration")
    g.add_argument("--cutoff", type=int, default=None, help="single-copy cutoff")
    g.add_argument("--cutoff2", type=int, default=config.CUTOFF_TWO_COPY,
                   help="per-factor cutoff for two-copy operators (default %(default)s)")
    g.add_argument("--cutoff4", type=int, default=config.CUTOFF_FOUR_COPY,
                   help="per-factor cutoff for four-copy operators (default %(default)s)")
    g.add_argument("--seed", type=int, default=config.OPTIMIZER["seed"])
    g.add_argument("--starts", type=int, default=config.OPTIMIZER["starts"])
    g.add_argument("--max-evals", type=int, default=config.OPTIMIZER["max_evals"])
    g.add_argument("--tol", type=float, default=None)
    g.add_argument("--format", choices=("csv", "json"), default="csv")
    g.add_argument("--out", default=None, help="write output here instead of stdout")
    g.add_argument("--bits", action="store_true", help="report entropies in bits")
    return p


def _witness_flags(p):
    p.add_argument("--state", required=True)
    p.add_argument("--copies", type=int, choices=(2, 4), default=2)
    p.add_argument("--sobol", type=int, default=500, help="Sobol probes for the soundness check")
    p.add_argument("--adversarial", type=int, default=50, help="adversarial search starts")
    p.add_argument("--adversarial-evals", type=int, default=500)


def build_parser():
    common = _common()
    parser = _Parser(prog="cvrl", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fock", parents=[common], help="Fock-state robustness table")
    p.add_argument("--n-range", default="1..3")
    p.add_argument("--no-optimizer", action="store_true")
    p.set_defaults(func=cmd_fock)

    p = sub.add_parser("mixture", parents=[common], help="coherent-mixture bounds table")
    p.add_argument("--q", type=float, default=0.0)
    p.add_argument("--d-grid", default="0:5:0.25")
    p.add_argument("--optimize", action="store_true", help="add the optimizer column")
    p.set_defaults(func=cmd_mixture)

    p = sub.add_parser("witness-demo", parents=[common], help="build and check a witness")
    _witness_flags(p)
    p.set_defaults(func=cmd_witness_demo)

    p = sub.add_parser("discrim-demo", parents=[common], help="witness-derived discrimination task")
    _witness_flags(p)
    p.add_argument("--no-robustness", action="store_true", help="skip the (1+R)^m check")
    p.add_argument("--gaussian-sup", action="store_true", help="also search the Gaussian optimum")
    p.set_defaults(func=cmd_discrim_demo)

    p = sub.add_parser("entropy", parents=[common], help="entropies and relative-entropy bound")
    p.add_argument("--state", required=True)
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("config", parents=[common], help="print all numerical defaults")
    p.set_defaults(func=cmd_config)

    p = sub.add_parser("export-op", parents=[common], help="write a state in the binary operator format")
    p.add_argument("--state", required=True)
    p.set_defaults(func=cmd_export_op)

    p = sub.add_parser("inspect-op", parents=[common], help="describe a binary operator file")
    p.add_argument("path")
    p.set_defaults(func=cmd_inspect_op)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    rc = RunConfig.from_args(args)
    try:
        with np.errstate(over="ignore", under="ignore"):
            return args.func(args, rc)
    except (UsageError, CutoffTooSmallError, InvalidDimensionError, ResourceLimitError) as exc:
        print(f"cvrl: error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (IndistinguishableError, NoFeasibleGaussianError) as exc:
        print(f"cvrl: certificate failed: {exc}", file=sys.stderr)
        return CERTIFICATE_FAIL


if __name__ == "__main__":
    sys.exit(main())
