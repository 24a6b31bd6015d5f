"""Command-line surface: scoring, CI decisions, audits, learning,
dataset generation, and the sweep experiments behind the package's
claims about split-weight versus flat-weight priors.

Reports are JSON (schema_version field, inputs echoed); sweeps emit
plot-ready CSV.  Every float is printed with repr-faithful precision
(17 significant digits) so re-ingesting a report loses nothing.

Exit codes: 0 success, 2 bad input (unreadable data, unknown variable,
invalid parameter), 3 an audit that found violations.  Finding
violations is a successful run; the distinct code is for scripting.

Randomized subcommands draw from numpy's PCG64 generator with an
explicit 64-bit seed; the same seed and flags give byte-identical
output on any platform.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass

import numpy as np

from .citest import asymptotic_residuals, bdeu_correction, ci_decide_cond, ci_statistics
from .dataset import (
    DataFormatError,
    Dataset,
    UnknownVariableError,
    empirical_cond_entropy,
    load_csv,
)
from .regularity import (
    DeterministicSpec,
    audit,
    j_statistic_profile,
    make_deterministic_dataset,
)
from .scores import (
    BDeu,
    CustomDirichlet,
    InvalidPriorError,
    Jeffreys,
    PriorSpec,
    conditional_score_local,
    conditional_score_ratio,
    marginal_score,
    network_score,
)
from .search import class_posterior, enumerate_n3_classes, learn_exact

__all__ = ["EXIT_INPUT_ERROR", "EXIT_OK", "EXIT_VIOLATIONS", "SCHEMA_VERSION", "main", "main_entry"]

SCHEMA_VERSION = 1
EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_VIOLATIONS = 3

MAX_SEED = 2**64 - 1


def _fmt(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"refusing to emit non-finite value {x!r}")
    return f"{x:.17g}"


def _json_text(obj, indent: int = 0) -> str:
    """Serialize a report with floats at full precision.

    The stdlib encoder offers no hook for float formatting, so this
    walks the (plain dict/list/scalar) report tree itself.
    """
    import json as _json

    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        parts = [f"{inner}{_json.dumps(k)}: {_json_text(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(parts) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        parts = [f"{inner}{_json_text(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(parts) + "\n" + pad + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, float):
        return _fmt(obj)
    if isinstance(obj, int):
        return str(obj)
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return _json.dumps(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _write(text: str, path: str | None) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _emit_report(report: dict, path: str | None) -> None:
    _write(_json_text(report) + "\n", path)


def _emit_csv(header: str, rows: list[str], path: str | None) -> None:
    _write("\n".join([header] + rows) + "\n", path)


def _parse_names(text: str | None) -> list[str]:
    if not text:
        return []
    return [token.strip() for token in text.split(",") if token.strip()]


def _parse_seed(text: str) -> int:
    value = int(text)
    if not 0 <= value <= MAX_SEED:
        raise argparse.ArgumentTypeError(f"seed must fit in 64 bits, got {text}")
    return value


def _parse_int_map(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(token) for token in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


@dataclass(frozen=True)
class RunConfig:
    """Shared run parameters resolved from flags."""

    prior_kind: str = "jeffreys"
    ess: float = 1.0
    custom_weight: float = 0.5
    p: float = 0.5
    log_base: str = "e"
    seed: int = 0
    fmt: str = "json"

    def prior(self) -> PriorSpec:
        if self.prior_kind == "jeffreys":
            return Jeffreys()
        if self.prior_kind == "bdeu":
            return BDeu(ess=self.ess)
        w = self.custom_weight
        if not w > 0.0:
            raise InvalidPriorError(f"custom weight must be positive, got {w!r}")
        return CustomDirichlet(lambda subset, cell: w)

    def prior_echo(self) -> dict:
        if self.prior_kind == "bdeu":
            return {"kind": "bdeu", "ess": self.ess}
        if self.prior_kind == "custom":
            return {"kind": "custom", "weight": self.custom_weight}
        return {"kind": "jeffreys"}


def _config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        prior_kind=getattr(args, "prior", "jeffreys"),
        ess=getattr(args, "ess", 1.0),
        custom_weight=getattr(args, "custom_weight", 0.5),
        p=getattr(args, "p", 0.5),
        log_base=getattr(args, "log_base", "e"),
        seed=getattr(args, "seed", 0),
        fmt=getattr(args, "format", "json"),
    )


def _base_report(command: str, args: argparse.Namespace) -> dict:
    report: dict = {"schema_version": SCHEMA_VERSION, "command": command}
    if getattr(args, "data", None) is not None:
        report["dataset"] = args.data
    return report


# ---------------------------------------------------------------- score


def _cmd_score(args: argparse.Namespace) -> int:
    cfg = _config(args)
    ds = load_csv(args.data)
    prior = cfg.prior()
    report = _base_report("score", args)
    report["prior"] = cfg.prior_echo()
    if "|" in args.spec:
        child_part, _, parent_part = args.spec.partition("|")
        child = child_part.strip()
        if not child:
            raise ValueError(f"conditional spec needs a child before '|', got {args.spec!r}")
        parents = _parse_names(parent_part)
        if args.form == "ratio":
            value = conditional_score_ratio(ds, child, parents, prior)
        else:
            weighting = "coupled" if args.form == "local-coupled" else "independent"
            value = conditional_score_local(ds, child, parents, prior, parent_weight=weighting)
        report.update({"child": child, "parents": parents, "form": args.form})
    else:
        names = _parse_names(args.spec)
        value = marginal_score(ds, names, prior)
        report["subset"] = names
    report["log_score"] = value
    report["score"] = math.exp(value)
    _emit_report(report, args.output)
    return EXIT_OK


# -------------------------------------------------------------- entropy


def _cmd_entropy(args: argparse.Namespace) -> int:
    ds = load_csv(args.data)
    given = _parse_names(args.given)
    value = empirical_cond_entropy(ds, args.of, given, base=args.log_base)
    report = _base_report("entropy", args)
    report.update({"of": args.of, "given": given, "log_base": args.log_base, "value": value})
    _emit_report(report, args.output)
    return EXIT_OK


# --------------------------------------------------------------- citest


def _cmd_citest(args: argparse.Namespace) -> int:
    cfg = _config(args)
    ds = load_csv(args.data)
    prior = cfg.prior()
    xs = _parse_names(args.x)
    ys = _parse_names(args.y)
    zs = _parse_names(args.z)
    verdict = ci_decide_cond(ds, xs, ys, zs, prior, cfg.p)
    stats = ci_statistics(ds, xs, ys, zs, prior, base=cfg.log_base)
    report = _base_report("citest", args)
    report.update(
        {
            "prior": cfg.prior_echo(),
            "x": xs,
            "y": ys,
            "z": zs,
            "p": cfg.p,
            "independent": verdict.independent,
            "left": verdict.left,
            "right": verdict.right,
            "statistics": {
                "j": stats.j,
                "penalized_mi": stats.penalized_mi,
                "correction": stats.correction,
                "x_arity": stats.x_arity,
                "y_arity": stats.y_arity,
                "z_arity": stats.z_arity,
                "log_base": cfg.log_base,
            },
        }
    )
    _emit_report(report, args.output)
    return EXIT_OK


# ---------------------------------------------------------------- audit


def _cmd_audit(args: argparse.Namespace) -> int:
    cfg = _config(args)
    ds = load_csv(args.data)
    prior = cfg.prior()
    candidates = _parse_names(args.candidates)
    if not candidates:
        candidates = [name for name in ds.names if name != args.child]
    found = audit(
        ds,
        args.child,
        prior,
        candidates,
        max_parent_size=args.max_parents,
        criterion=args.criterion,
    )
    report = _base_report("audit", args)
    report.update(
        {
            "prior": cfg.prior_echo(),
            "child": args.child,
            "candidates": candidates,
            "criterion": args.criterion,
            "max_parents": args.max_parents,
            "violation_count": len(found),
            "violations": [
                {
                    "smaller_parents": [ds.names[i] for i in v.u.indices],
                    "larger_parents": [ds.names[i] for i in v.u_prime.indices],
                    "entropy_smaller": v.h_u,
                    "entropy_larger": v.h_u_prime,
                    "score_smaller": v.score_u,
                    "score_larger": v.score_u_prime,
                }
                for v in found
            ],
        }
    )
    _emit_report(report, args.output)
    return EXIT_VIOLATIONS if found else EXIT_OK


# ---------------------------------------------------------------- learn


def _cmd_learn(args: argparse.Namespace) -> int:
    cfg = _config(args)
    ds = load_csv(args.data)
    prior = cfg.prior()
    net = learn_exact(ds, prior, cap=args.cap)
    report = _base_report("learn", args)
    report.update(
        {
            "prior": cfg.prior_echo(),
            "cap": net.num_variables - 1 if args.cap is None else args.cap,
            "parents": {ds.names[v]: [ds.names[p] for p in ps] for v, ps in enumerate(net.parents)},
            "edges": [[ds.names[p], ds.names[v]] for p, v in net.edges()],
            "log_score": network_score(ds, net, prior),
        }
    )
    if args.classes:
        scored = enumerate_n3_classes(ds, prior)
        posterior = dict(class_posterior(scored))
        report["classes"] = [
            {"id": label, "log_score": value, "posterior": posterior[label]}
            for label, value in scored
        ]
    _emit_report(report, args.output)
    return EXIT_OK


# ----------------------------------------------------- gen-deterministic


def _cmd_gen_deterministic(args: argparse.Namespace) -> int:
    if args.repeat_each is not None:
        z_seq = tuple(z for z in range(args.z_arity) for _ in range(args.repeat_each))
    else:
        z_seq = args.z_seq
    spec = DeterministicSpec(
        z_arity=args.z_arity,
        f=args.f,
        g=args.g,
        z_sequence=z_seq,
        x_arity=args.x_arity,
        y_arity=args.y_arity,
    )
    ds = make_deterministic_dataset(spec)
    _write(ds.to_csv_text(), args.output)
    return EXIT_OK


# ----------------------------------------------------------- experiments


def _rows_dn_sweep(cfg: RunConfig, n_min: int, n_max: int, points: int) -> list[str]:
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    grid = [int(v) for v in np.rint(np.geomspace(n_min, n_max, points))]
    rows = []
    for n in grid:
        p = float(n) ** -0.75
        x = (rng.random(n) < p).astype(np.int64)
        y = (rng.random(n) < p).astype(np.int64)
        ds = Dataset.from_columns([("X", 2, x.tolist()), ("Y", 2, y.tolist())])
        correction = bdeu_correction(ds, "X", "Y", (), ess=cfg.ess, base=2)
        threshold = 0.5 * math.log2(n)
        above = 1 if correction > threshold else 0
        rows.append(f"{n},{_fmt(correction)},{_fmt(threshold)},{above}")
    return rows


def _cmd_dn_sweep(args: argparse.Namespace) -> int:
    cfg = _config(args)
    if args.n_min < 1 or args.n_max < args.n_min or args.points < 1:
        raise ValueError("grid needs 1 <= n-min <= n-max and at least one point")
    rows = _rows_dn_sweep(cfg, args.n_min, args.n_max, args.points)
    _emit_csv("n,correction,threshold,above", rows, args.output)
    return EXIT_OK


def _cmd_jn_vs_r(args: argparse.Namespace) -> int:
    cfg = _config(args)
    if args.n < 1:
        raise ValueError(f"n must be at least 1, got {args.n}")
    split = BDeu(ess=cfg.ess)
    flat = Jeffreys()
    rows = []
    for r in range(args.n // 2 + 1):
        j_split = j_statistic_profile(args.n, r, split)
        j_flat = j_statistic_profile(args.n, r, flat)
        rows.append(f"{r},{_fmt(j_split)},{_fmt(j_flat)}")
    _emit_csv("r,j_bdeu,j_jeffreys", rows, args.output)
    return EXIT_OK


def _cmd_residuals(args: argparse.Namespace) -> int:
    cfg = _config(args)
    theta = tuple(float(t) for t in args.theta.split(","))
    if len(theta) != 4 or any(t <= 0.0 for t in theta):
        raise ValueError(f"theta needs four positive cell probabilities, got {args.theta!r}")
    if abs(math.fsum(theta) - 1.0) > 1e-9:
        raise ValueError(f"theta must sum to 1, got {math.fsum(theta)!r}")
    grid = sorted(set(_parse_int_map(args.grid)))
    if not grid or grid[0] < 1:
        raise ValueError(f"grid sizes must be positive, got {args.grid!r}")

    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    total = grid[-1]
    edges = np.cumsum(theta)
    codes = np.searchsorted(edges, rng.random(total), side="right")
    x_all = (codes >> 1).astype(np.int64)
    y_all = (codes & 1).astype(np.int64)
    prefixes = [
        Dataset.from_columns([("X", 2, x_all[:n].tolist()), ("Y", 2, y_all[:n].tolist())])
        for n in grid
    ]
    flat = asymptotic_residuals(prefixes, "X", "Y", (), Jeffreys())
    split = asymptotic_residuals(prefixes, "X", "Y", (), BDeu(ess=cfg.ess))
    rows = [
        f"{n},{_fmt(rj)},{_fmt(rb)}"
        for (n, rj), (_, rb) in zip(flat, split)
    ]
    _emit_csv("n,residual_jeffreys,residual_bdeu", rows, args.output)
    return EXIT_OK


# ----------------------------------------------------------------- parser


def _add_prior_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--prior", choices=["jeffreys", "bdeu", "custom"], default="jeffreys",
                     help="hyperparameter strategy (default: jeffreys)")
    sub.add_argument("--ess", type=float, default=1.0,
                     help="equivalent sample size for --prior bdeu (default: 1.0)")
    sub.add_argument("--custom-weight", type=float, default=0.5,
                     help="constant per-cell weight for --prior custom (default: 0.5)")


def _add_output_flag(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("-o", "--output", default="-", help="output path, - for stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bdscore",
        description="Dirichlet-multinomial scores for discrete structure learning: "
        "score subsets, test conditional independence, audit score regularity, "
        "and learn exact structures.",
    )
    subs = parser.add_subparsers(dest="subcommand", required=True)

    p = subs.add_parser("score", help="marginal or conditional score of a subset spec")
    p.add_argument("data", help="dataset CSV path")
    p.add_argument("spec", help="variable spec: 'X,Y' for a subset, 'X|Z,W' for child|parents")
    p.add_argument("--form", choices=["ratio", "local-coupled", "local-independent"],
                   default="ratio", help="conditional form (default: ratio)")
    _add_prior_flags(p)
    _add_output_flag(p)
    p.set_defaults(handler=_cmd_score)

    p = subs.add_parser("entropy", help="empirical conditional entropy of one variable")
    p.add_argument("data")
    p.add_argument("--of", required=True, help="target variable")
    p.add_argument("--given", default="", help="comma-separated conditioning variables")
    p.add_argument("--log-base", choices=["2", "e"], default="e")
    _add_output_flag(p)
    p.set_defaults(handler=_cmd_entropy)

    p = subs.add_parser("citest", help="Bayesian conditional-independence decision")
    p.add_argument("data")
    p.add_argument("--x", required=True, help="first variable group (comma-separated)")
    p.add_argument("--y", required=True, help="second variable group")
    p.add_argument("--z", default="", help="conditioning group, may be empty")
    p.add_argument("--p", type=float, default=0.5, help="prior probability of independence")
    p.add_argument("--log-base", choices=["2", "e"], default="e")
    _add_prior_flags(p)
    _add_output_flag(p)
    p.set_defaults(handler=_cmd_citest)

    p = subs.add_parser("audit", help="scan nested parent sets for regularity violations")
    p.add_argument("data")
    p.add_argument("--child", required=True)
    p.add_argument("--candidates", default="",
                   help="candidate parent pool (default: all other variables)")
    p.add_argument("--max-parents", type=int, default=3)
    p.add_argument("--criterion", choices=["bd", "aic", "bic"], default="bd")
    _add_prior_flags(p)
    _add_output_flag(p)
    p.set_defaults(handler=_cmd_audit)

    p = subs.add_parser("learn", help="exact maximum-score structure")
    p.add_argument("data")
    p.add_argument("--cap", type=int, default=None, help="max parent-set size (default: N-1)")
    p.add_argument("--classes", action="store_true",
                   help="also list the eleven 3-variable class scores (N=3 only)")
    _add_prior_flags(p)
    _add_output_flag(p)
    p.set_defaults(handler=_cmd_learn)

    p = subs.add_parser("gen-deterministic",
                        help="emit a dataset where two children are functions of one source")
    p.add_argument("--z-arity", type=int, required=True)
    p.add_argument("--f", type=_parse_int_map, required=True,
                   help="first child's value per source state, comma-separated")
    p.add_argument("--g", type=_parse_int_map, required=True,
                   help="second child's value per source state")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--z-seq", type=_parse_int_map,
                       help="explicit source-state sequence")
    group.add_argument("--repeat-each", type=int,
                       help="each source state in order, repeated this many times")
    p.add_argument("--x-arity", type=int, default=None)
    p.add_argument("--y-arity", type=int, default=None)
    _add_output_flag(p)
    p.set_defaults(handler=_cmd_gen_deterministic)

    p = subs.add_parser("experiment", help="seeded sweep experiments (CSV output)")
    esubs = p.add_subparsers(dest="experiment", required=True)

    e = esubs.add_parser("dn-sweep",
                         help="split-weight correction vs 0.5*log2(n) on rare-marginal draws")
    e.add_argument("--seed", type=_parse_seed, default=0)
    e.add_argument("--points", type=int, default=200)
    e.add_argument("--n-min", type=int, default=10)
    e.add_argument("--n-max", type=int, default=1000)
    e.add_argument("--ess", type=float, default=1.0)
    _add_output_flag(e)
    e.set_defaults(handler=_cmd_dn_sweep)

    e = esubs.add_parser("jn-vs-r",
                         help="per-sample score gap of a constant pair vs the number of ones")
    e.add_argument("--n", type=int, default=100)
    e.add_argument("--ess", type=float, default=1.0)
    _add_output_flag(e)
    e.set_defaults(handler=_cmd_jn_vs_r)

    e = esubs.add_parser("residuals",
                         help="expansion residuals over prefix datasets of one stream")
    e.add_argument("--seed", type=_parse_seed, default=0)
    e.add_argument("--theta", default="0.2,0.3,0.2,0.3",
                   help="joint cell probabilities th(0,0),th(0,1),th(1,0),th(1,1)")
    e.add_argument("--grid", default="100,1000,10000,100000",
                   help="comma-separated prefix sizes")
    e.add_argument("--ess", type=float, default=1.0)
    _add_output_flag(e)
    e.set_defaults(handler=_cmd_residuals)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (DataFormatError, UnknownVariableError, InvalidPriorError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


def main_entry() -> None:
    raise SystemExit(main(sys.argv[1:]))
