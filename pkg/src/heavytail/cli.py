"""Command-line driver: ``heavytail <command> [options]``.

Options may also come from a JSON file given with ``--config``; flags win over
the file, and ``HEAVYTAIL_SEED`` wins over the file's seed.  Exit status is 0 on
success, 1 on usage or input errors, and 2 when a check fails (a lemma
dominance failure, a membership violation, or a violated non-vacuous
pre-asymptotic bound).
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import math
import os
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

from . import bounds as _bounds
from .distributions import DIVERGENT, expectation_tail_sum, parse_dist, from_json as dist_from_json
from .errors import HeavyTailError
from .exact_engine import GRID_ALPHAS, GRID_EPSILONS, GRID_NS, lemma_grid
from .montecarlo import ComparisonVerdict, ExperimentPlan, Side, compare, report_csv, report_row, run_experiment
from .tail_model import TailClassSpec, verify_membership

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION = 0, 1, 2
COMMANDS = ("bound", "expectation", "verify-membership", "lemma-grid", "simulate", "full-report")
SEED_ENV = "HEAVYTAIL_SEED"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# -- configuration -------------------------------------------------------------------

_CONFIG_KEYS = {
    "command", "dist", "grid", "seed", "trials", "workers", "out", "format",
    "kind", "n", "eps", "epsilon", "v", "w", "alpha", "alpha_r", "alpha_l", "side", "mu",
    "spec", "k_max", "experiments",
}


def load_config(path: Optional[str]) -> dict[str, Any]:
    if path is None:
        return {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(cfg, dict):
        raise UsageError(f"config {path}: top level must be a JSON object")
    unknown = sorted(set(cfg) - _CONFIG_KEYS)
    if unknown:
        raise UsageError(f"config {path}: unknown field(s) {unknown}")
    if "epsilon" in cfg and "eps" not in cfg:
        cfg["eps"] = cfg.pop("epsilon")
    return cfg


def _pick(args: argparse.Namespace, cfg: dict, key: str, default=None):
    val = getattr(args, key, None)
    if val is not None:
        return val
    if key == "seed" and os.environ.get(SEED_ENV):
        try:
            return int(os.environ[SEED_ENV])
        except ValueError:
            raise UsageError(f"{SEED_ENV} must be an integer") from None
    return cfg.get(key, default)


def _require(value, name: str):
    if value is None:
        raise UsageError(f"missing required option --{name.replace('_', '-')}")
    return value


def _dist(value):
    if value is None:
        raise UsageError("missing required option --dist")
    if isinstance(value, dict):
        return dist_from_json(value)
    return parse_dist(str(value))


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _timestamp() -> str:
    return _dt.datetime.now(_dt.timezone.utc).replace(microsecond=0).isoformat()


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


# -- commands ----------------------------------------------------------------------


def _spec_from(args, cfg, use_dist: bool = True) -> TailClassSpec:
    if _pick(args, cfg, "spec") is not None:
        raw = _pick(args, cfg, "spec")
        try:
            obj = json.loads(raw) if isinstance(raw, str) else raw
        except json.JSONDecodeError as exc:
            raise UsageError(f"--spec: column {exc.colno}: {exc.msg}") from None
        return TailClassSpec.from_json(obj)
    if use_dist and _pick(args, cfg, "dist") is not None:
        return _dist(_pick(args, cfg, "dist")).certified
    alpha = _pick(args, cfg, "alpha")
    alpha_r = _pick(args, cfg, "alpha_r", alpha)
    alpha_l = _pick(args, cfg, "alpha_l", alpha)
    v, w = _pick(args, cfg, "v"), _pick(args, cfg, "w")
    if v is None and w is None:
        raise UsageError("give --v and/or --w, a --spec, or a --dist")
    v = w if v is None else v
    w = v if w is None else w
    alpha_r = _require(alpha_r if alpha_r is not None else alpha_l, "alpha")
    alpha_l = alpha_l if alpha_l is not None else alpha_r
    return TailClassSpec(alpha_r, v, alpha_l, w)


_BOUND_FUNCS = {
    "thm1": _bounds.thm1_bound,
    "thm2": _bounds.thm2_bound,
    "thm3": _bounds.thm3_bound,
    "thm4": _bounds.thm4_bound,
    "centered_abs": _bounds.centered_abs_bound,
}


def cmd_bound(args, cfg) -> int:
    kind = _require(_pick(args, cfg, "kind"), "kind")
    spec = _spec_from(args, cfg)
    n = int(_require(_pick(args, cfg, "n"), "n"))
    eps = float(_require(_pick(args, cfg, "eps"), "eps"))
    if kind == "preasymptotic":
        ev = _bounds.preasymptotic_bound(spec, n, eps, side=_pick(args, cfg, "side", "right"), mu=_pick(args, cfg, "mu"))
    elif kind in _BOUND_FUNCS:
        ev = _BOUND_FUNCS[kind](spec, n, eps)
    else:
        raise UsageError(f"unknown bound kind {kind!r}; choose from {sorted(_BOUND_FUNCS) + ['preasymptotic']}")
    _emit(_dumps(ev.to_json()), _pick(args, cfg, "out"))
    return EXIT_OK


def cmd_expectation(args, cfg) -> int:
    dist = _dist(_pick(args, cfg, "dist"))
    value = expectation_tail_sum(dist)
    if _pick(args, cfg, "format", "text") == "json":
        _emit(_dumps({"dist": dist.to_json(), "expectation": None if value is DIVERGENT else value,
                      "divergent": value is DIVERGENT}), _pick(args, cfg, "out"))
    else:
        _emit("Divergent" if value is DIVERGENT else repr(value), _pick(args, cfg, "out"))
    return EXIT_OK


def cmd_verify_membership(args, cfg) -> int:
    dist = _dist(_pick(args, cfg, "dist"))
    spec = _spec_from(args, cfg, use_dist=False) if (
        _pick(args, cfg, "spec") is not None or _pick(args, cfg, "v") is not None or _pick(args, cfg, "w") is not None
    ) else dist.certified
    report = verify_membership(dist, spec, int(_pick(args, cfg, "k_max", 10_000)))
    out = {"dist": dist.to_json(), "spec": spec.to_json(), **report.__dict__}
    _emit(_dumps(out), _pick(args, cfg, "out"))
    return EXIT_OK if report.passed else EXIT_VIOLATION


def _grid_lists(args, cfg) -> tuple[list, list, list]:
    grid = _pick(args, cfg, "grid", "default")
    if isinstance(grid, str):
        if grid == "default":
            grid = {}
        else:
            try:
                grid = json.loads(grid)
            except json.JSONDecodeError as exc:
                raise UsageError(f"--grid: column {exc.colno}: {exc.msg}") from None
    if not isinstance(grid, dict):
        raise UsageError("grid must be 'default' or a JSON object with alphas/ns/epsilons")
    unknown = set(grid) - {"alphas", "ns", "epsilons"}
    if unknown:
        raise UsageError(f"grid: unknown field(s) {sorted(unknown)}")
    alphas = grid.get("alphas", list(GRID_ALPHAS))
    ns = grid.get("ns", list(GRID_NS))
    epss = grid.get("epsilons", list(GRID_EPSILONS))
    for name, lst in (("alphas", alphas), ("ns", ns), ("epsilons", epss)):
        if not isinstance(lst, list) or not lst:
            raise UsageError(f"grid.{name} must be a non-empty list")
    return [float(a) for a in alphas], [int(n) for n in ns], [float(e) for e in epss]


def cmd_lemma_grid(args, cfg) -> int:
    alphas, ns, epss = _grid_lists(args, cfg)
    result = lemma_grid(alphas, ns, epss)
    if _pick(args, cfg, "format", "csv") == "json":
        text = _dumps({
            "generated_at": _timestamp(),
            "rows": [r.__dict__ for r in result.rows],
            "skipped": [list(s) for s in result.skipped],
            "failures": len(result.failures),
        })
    else:
        text = result.to_csv()
    _emit(text, _pick(args, cfg, "out"))
    print(f"lemma-grid: {len(result.rows)} checks, {len(result.failures)} failures, "
          f"{len(result.skipped)} cells skipped", file=sys.stderr)
    return EXIT_OK if not result.failures else EXIT_VIOLATION


def _bounds_for(plan: ExperimentPlan) -> list:
    """Theorem and pre-asymptotic bounds applicable to the plan's side, if any."""
    spec, n, eps, side = plan.spec, plan.n, plan.epsilon, plan.side
    out = []
    candidates = {
        Side.RIGHT: [lambda: _bounds.thm1_bound(spec, n, eps), lambda: _bounds.preasymptotic_bound(spec, n, eps, side="right")],
        Side.LEFT: [lambda: _bounds.thm2_bound(spec, n, eps), lambda: _bounds.preasymptotic_bound(spec, n, eps, side="left")],
        Side.CENTERED_RIGHT: [lambda: _bounds.thm3_bound(spec, n, eps), lambda: _bounds.preasymptotic_bound(spec, n, eps, side="right")],
        Side.CENTERED_LEFT: [lambda: _bounds.thm4_bound(spec, n, eps), lambda: _bounds.preasymptotic_bound(spec, n, eps, side="left")],
        Side.CENTERED_ABS: [lambda: _bounds.centered_abs_bound(spec, n, eps), lambda: _bounds.preasymptotic_bound(spec, n, eps, side="abs")],
    }[side]
    for make in candidates:
        try:
            ev = make()
        except HeavyTailError:
            continue
        if ev.side == side.value and math.isclose(abs(ev.threshold_x), plan.threshold(), rel_tol=1e-12):
            out.append(ev)
    return out


def run_simulation(plan: ExperimentPlan) -> tuple[list[list[str]], bool]:
    """CSV rows for one experiment and whether a non-vacuous pre-asymptotic bound was violated."""
    est = run_experiment(plan)
    evs = _bounds_for(plan)
    if not evs:
        return [report_row(est)], False
    rows, red = [], False
    for ev in evs:
        rows.append(report_row(est, ev))
        if (ev.kind is _bounds.BoundKind.PRE_ASYMPTOTIC and not ev.vacuous
                and compare(est, ev) is ComparisonVerdict.BOUND_VIOLATED):
            red = True
    return rows, red


def _plan_from(spec: dict, args, cfg) -> ExperimentPlan:
    return ExperimentPlan(
        dist=_dist(spec.get("dist")),
        n=int(_require(spec.get("n"), "n")),
        trials=int(spec.get("trials", 10_000)),
        epsilon=float(_require(spec.get("eps", spec.get("epsilon")), "eps")),
        side=Side(spec.get("side", "right")),
        seed=int(spec.get("seed", 0)),
        workers=int(spec.get("workers", 1)),
    )


def cmd_simulate(args, cfg) -> int:
    fields = {k: _pick(args, cfg, k) for k in ("dist", "n", "trials", "eps", "side", "seed", "workers")}
    fields = {k: v for k, v in fields.items() if v is not None}
    try:
        plan = _plan_from(fields, args, cfg)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rows, red = run_simulation(plan)
    _emit(report_csv(rows), _pick(args, cfg, "out"))
    return EXIT_VIOLATION if red else EXIT_OK


def cmd_full_report(args, cfg) -> int:
    """Lemma grid, schedule identities and the configured experiments in one directory."""
    out_dir = Path(_pick(args, cfg, "out", "heavytail-report"))
    out_dir.mkdir(parents=True, exist_ok=True)
    alphas, ns, epss = _grid_lists(args, cfg)
    grid = lemma_grid(alphas, ns, epss)
    (out_dir / "lemmas.csv").write_text(grid.to_csv())

    identities = []
    for a in alphas:
        for n in (10**2, 10**3, 10**4, 10**5, 10**6):
            for e in epss:
                d = _bounds.drift_identity(1.0, a, n, e)
                ok = d.equal if a <= 2 else d.lhs <= d.rhs
                identities.append({"alpha": a, "n": n, "epsilon": e, "lhs": d.lhs, "rhs": d.rhs, "pass": ok})

    seed = _pick(args, cfg, "seed", 0)
    workers = _pick(args, cfg, "workers", 1)
    experiments = cfg.get("experiments", [])
    sim_rows, red = [], False
    for exp in experiments:
        exp = {"seed": seed, "workers": workers, **exp}
        rows, bad = run_simulation(_plan_from(exp, args, cfg))
        sim_rows.extend(rows)
        red = red or bad
    (out_dir / "simulations.csv").write_text(report_csv(sim_rows))

    summary = {
        "generated_at": _timestamp(),
        "lemma_checks": len(grid.rows),
        "lemma_failures": len(grid.failures),
        "lemma_cells_skipped": len(grid.skipped),
        "identities": identities,
        "experiments": len(experiments),
        "preasymptotic_violations": red,
    }
    (out_dir / "report.json").write_text(_dumps(summary) + "\n")
    failed = grid.failures or red or not all(i["pass"] for i in identities)
    return EXIT_VIOLATION if failed else EXIT_OK


# -- parser --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="heavytail", description=__doc__.splitlines()[0])
    parser.add_argument("--config", default=None, help="JSON file with default option values")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    common = _Parser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help=argparse.SUPPRESS)
    common.add_argument("--out", default=None, help="output path (default: stdout)")

    def spec_opts(p):
        p.add_argument("--v", type=float, default=None)
        p.add_argument("--w", type=float, default=None)
        p.add_argument("--alpha", type=float, default=None, help="exponent for both tails")
        p.add_argument("--alpha-r", dest="alpha_r", type=float, default=None)
        p.add_argument("--alpha-l", dest="alpha_l", type=float, default=None)
        p.add_argument("--spec", default=None, help='tail spec JSON, e.g. {"alpha_r":1,"v":1}')

    p = sub.add_parser("bound", parents=[common], help="evaluate a tail bound")
    p.add_argument("--kind", default=None, help="thm1, thm2, thm3, thm4, centered_abs or preasymptotic")
    spec_opts(p)
    p.add_argument("--dist", default=None, help="use this distribution's certified spec")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--side", default=None, choices=["right", "left", "abs"])
    p.add_argument("--mu", type=float, default=None, help="override the schedule's mu")

    p = sub.add_parser("expectation", parents=[common], help="mean via the tail-sum formula")
    p.add_argument("--dist", default=None)
    p.add_argument("--format", default=None, choices=["text", "json"])

    p = sub.add_parser("verify-membership", parents=[common], help="check tails against a spec")
    p.add_argument("--dist", default=None)
    spec_opts(p)
    p.add_argument("--k-max", dest="k_max", type=int, default=None)

    p = sub.add_parser("lemma-grid", parents=[common], help="interval-lemma dominance grid")
    p.add_argument("--grid", default=None, help="'default' or JSON with alphas/ns/epsilons")
    p.add_argument("--format", default=None, choices=["csv", "json"])

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo tail estimate vs bounds")
    p.add_argument("--dist", default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--side", default=None, choices=[s.value for s in Side])
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)

    p = sub.add_parser("full-report", parents=[common], help="grid, identities and experiments")
    p.add_argument("--grid", default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    return parser


_HANDLERS = {
    "bound": cmd_bound,
    "expectation": cmd_expectation,
    "verify-membership": cmd_verify_membership,
    "lemma-grid": cmd_lemma_grid,
    "simulate": cmd_simulate,
    "full-report": cmd_full_report,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parser.parse_args(argv)
        cfg = load_config(args.config)
        command = args.command or cfg.get("command")
        if command is None:
            raise UsageError("no command given; choose from " + ", ".join(COMMANDS))
        if command not in _HANDLERS:
            raise UsageError(f"unknown command {command!r}")
        if args.command is None:
            # command came from the config file: re-parse so subcommand defaults exist
            args = parser.parse_args([command] + argv)
        return _HANDLERS[command](args, cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (HeavyTailError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
