"""Command-line interface.

Subcommands: retention, cost, compare, threshold, sweep, figures.
Exit codes: 0 success, 2 validation/domain error, 3 degenerate threshold,
4 internal numeric failure.
"""

from __future__ import annotations

import argparse
import sys

from .costs import CostParams, Scenario, generalized_cost, scenario_cost
from .errors import (
    CapacityError,
    DegenerateThreshold,
    DomainError,
    MemcostError,
    ValidationError,
)
from .model import SystemSpec
from .montecarlo import McConfig, estimate_retention
from .exact import retention_time_exact
from .sweeps import (
    RULES,
    TOPOLOGIES,
    SweepSpec,
    SweepTable,
    emit,
    figure_table,
    run_sweep,
    write_table,
)
from .costs import scenario_system
from .thresholds import (
    critical_line_vs_triangle,
    critical_single,
    critical_three_uncoupled,
    generic_crossover,
)

# flag name -> (sweep/fixed parameter key, type)
_PARAM_FLAGS = {
    "beta": ("beta", float),
    "mu": ("mu", float),
    "h": ("h", float),
    "sf": ("s_f", float),
    "cm": ("cm", float),
    "cr": ("cr", float),
    "k": ("k", float),
    "m": ("m", float),
    "n": ("n", float),
    "seed": ("seed", int),
    "trials": ("trials", int),
}

_DEFAULTS = {
    "beta": 1.0, "mu": 1.0, "h": 0.0, "s_f": 0.0,
    "cm": 1.0, "cr": 1.0, "k": 1.0, "m": 1.0, "n": 1.0,
    "seed": 0, "trials": 100_000,
}


def _add_common(parser: argparse.ArgumentParser) -> None:
    for flag, (_, typ) in _PARAM_FLAGS.items():
        parser.add_argument(f"--{flag}", type=typ, default=None)
    parser.add_argument("--format", choices=("csv", "json", "dat"), default=None)
    parser.add_argument("--out", default=None)


def _params(args: argparse.Namespace, file_values: dict | None = None) -> dict:
    """Merge defaults, config-file values and explicit flags (flags win)."""
    merged = dict(_DEFAULTS)
    if file_values:
        merged.update(file_values)
    for flag, (key, _) in _PARAM_FLAGS.items():
        v = getattr(args, flag, None)
        if v is not None:
            merged[key] = v
    return merged


def _cost_params(p: dict) -> CostParams:
    return CostParams(c_m=p["cm"], c_r=p["cr"], mu=p["mu"],
                      k=p["k"], m=p["m"], n_exp=p["n"])


def _system(topology: str, p: dict) -> SystemSpec:
    if topology not in TOPOLOGIES:
        raise ValidationError(f"unknown topology {topology!r}")
    return SystemSpec(TOPOLOGIES[topology](p["s_f"]), h=p["h"], beta=p["beta"])


def _config_descriptor(name: str, p: dict):
    """A scenario id (s1..s6) or topology name -> (label, SystemSpec, breakdown fn)."""
    name = name.lower()
    if name in (s.value for s in Scenario):
        s = Scenario(name)
        spec = scenario_system(s, h=p["h"], s_f=p["s_f"], beta=p["beta"])
        def cost(cp):
            return scenario_cost(s, cp, h=p["h"], s_f=p["s_f"], beta=p["beta"])
        return name, spec, cost
    if name in TOPOLOGIES:
        spec = _system(name, p)
        def cost(cp):
            return generalized_cost(spec, cp)
        return name, spec, cost
    raise ValidationError(f"unknown configuration {name!r} (scenario id or topology)")


def _print_or_write(text: str, out: str | None) -> None:
    if out:
        with open(out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _write_table(table: SweepTable, args: argparse.Namespace,
                 fmt_override: str | None = None) -> None:
    fmt = fmt_override or args.format or "csv"
    if args.out:
        paths = write_table(table, fmt, args.out)
        print("wrote " + " ".join(paths))
    else:
        sys.stdout.write(emit(table, fmt).decode())


def _cmd_retention(args) -> int:
    p = _params(args)
    spec = _system(args.topology, p)
    rule = RULES[args.rule]
    if args.mc:
        est = estimate_retention(
            spec, rule, McConfig(trials=p["trials"], seed=p["seed"]),
            workers=args.workers,
        )
        text = (f"tau = {est.mean:.9g}\nstderr = {est.stderr:.9g}\n"
                f"trials_truncated = {est.trials_truncated}\n")
    else:
        res = retention_time_exact(spec, rule)
        text = f"tau = {res.tau:.9g}\n"
    _print_or_write(text, args.out)
    return 0


def _breakdown_text(b) -> str:
    return (
        f"material = {b.material:.9g}\n"
        f"coupling = {b.coupling:.9g}\n"
        f"field = {b.field:.9g}\n"
        f"replenishment = {b.replenishment:.9g}\n"
        f"total = {b.total:.9g}\n"
        f"tau_used = {b.tau_used:.9g}\n"
    )


def _cmd_cost(args) -> int:
    p = _params(args)
    cp = _cost_params(p)
    if (args.scenario is None) == (args.topology is None):
        raise ValidationError("give exactly one of --scenario or --topology")
    if args.scenario:
        _, _, costfn = _config_descriptor(args.scenario, p)
        b = costfn(cp)
    else:
        b = generalized_cost(_system(args.topology, p), cp)
    _print_or_write(_breakdown_text(b), args.out)
    return 0


def _cmd_compare(args) -> int:
    p = _params(args)
    cp = _cost_params(p)
    name_a, _, cost_a = _config_descriptor(args.a, p)
    name_b, _, cost_b = _config_descriptor(args.b, p)
    ta = cost_a(cp).total
    tb = cost_b(cp).total
    if ta < tb:
        verdict = f"{name_a} cheaper"
    elif tb < ta:
        verdict = f"{name_b} cheaper"
    else:
        verdict = "equal cost"
    text = (f"total[{name_a}] = {ta:.9g}\ntotal[{name_b}] = {tb:.9g}\n"
            f"verdict = {verdict}\n")
    _print_or_write(text, args.out)
    return 0


def _cmd_threshold(args) -> int:
    p = _params(args)
    if args.kind == "single":
        r = critical_single(p["h"], p["beta"], p["mu"])
    elif args.kind == "three":
        r = critical_three_uncoupled(p["h"], p["beta"], p["mu"])
    elif args.kind == "line-vs-triangle":
        r = critical_line_vs_triangle(p["h"], p["s_f"], p["beta"], _cost_params(p))
    else:
        if not args.a or not args.b:
            raise ValidationError("threshold generic requires --a and --b")
        name_a, spec_a, _ = _config_descriptor(args.a, p)
        name_b, spec_b, _ = _config_descriptor(args.b, p)
        r = generic_crossover(spec_a, spec_b, _cost_params(p),
                              label_a=name_a, label_b=name_b)
    text = (f"c_r0 = {r.c_r0:.9g}\n"
            f"comparison = {r.comparison[0]} vs {r.comparison[1]}\n"
            f"regime_above = {r.regime_above}\n")
    _print_or_write(text, args.out)
    return 0


def parse_config_file(path: str) -> dict:
    """Flat key=value text; '#' starts a comment; keys match the flag names."""
    values: dict = {}
    with open(path) as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValidationError(f"{path}:{lineno}: expected key=value")
            key, _, val = line.partition("=")
            values[key.strip()] = val.strip()
    return values


_SWEEP_KEYS = {
    "variable": str, "start": float, "stop": float, "points": int, "target": str,
    "topology": str, "scenario": str, "rule": str,
}


def _cmd_sweep(args) -> int:
    raw = parse_config_file(args.config)
    typed: dict = {}
    for key, val in raw.items():
        if key in _SWEEP_KEYS:
            typed[key] = _SWEEP_KEYS[key](val)
        elif key in _PARAM_FLAGS:
            pkey, typ = _PARAM_FLAGS[key]
            typed[pkey] = typ(val)
        elif key in ("format", "out"):
            typed[key] = val
        else:
            raise ValidationError(f"unknown config key {key!r}")
    for field in ("variable", "start", "stop", "points", "target"):
        if field not in typed:
            raise ValidationError(f"sweep config missing {field!r}")
    fmt = typed.pop("format", None)
    out = typed.pop("out", None)
    variable = typed.pop("variable")
    sweep = SweepSpec(
        variable=variable,
        start=typed.pop("start"),
        stop=typed.pop("stop"),
        points=typed.pop("points"),
        target=typed.pop("target"),
        fixed=_sweep_fixed(typed, args, variable),
    )
    if args.out is None and out is not None:
        args.out = out
    if args.format is None and fmt is not None:
        args.format = fmt
    _write_table(run_sweep(sweep), args)
    return 0


def _sweep_fixed(file_fixed: dict, args, variable: str) -> dict:
    fixed = dict(file_fixed)
    for flag, (key, _) in _PARAM_FLAGS.items():
        v = getattr(args, flag, None)
        if v is not None:
            fixed[key] = v
    fixed.pop(variable, None)
    return fixed


def _cmd_figures(args) -> int:
    table = figure_table(args.which)
    fmt = args.format or ("dat" if args.out and args.out.endswith(".dat") else "csv")
    _write_table(table, args, fmt_override=fmt)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="memcost",
        description="Retention times and energy cost rates of small dipole memories",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_ret = sub.add_parser("retention", help="retention time of a topology")
    p_ret.add_argument("--topology", required=True, choices=sorted(TOPOLOGIES))
    p_ret.add_argument("--rule", choices=sorted(RULES), default="majority")
    p_ret.add_argument("--mc", action="store_true", help="Monte Carlo instead of exact")
    p_ret.add_argument("--workers", type=int, default=1)
    _add_common(p_ret)
    p_ret.set_defaults(func=_cmd_retention)

    p_cost = sub.add_parser("cost", help="cost breakdown of a scenario or topology")
    p_cost.add_argument("--scenario", default=None)
    p_cost.add_argument("--topology", default=None, choices=sorted(TOPOLOGIES))
    _add_common(p_cost)
    p_cost.set_defaults(func=_cmd_cost)

    p_cmp = sub.add_parser("compare", help="compare total cost of two configurations")
    p_cmp.add_argument("a")
    p_cmp.add_argument("b")
    _add_common(p_cmp)
    p_cmp.set_defaults(func=_cmd_compare)

    p_thr = sub.add_parser("threshold", help="critical replenishment cost")
    p_thr.add_argument("kind", choices=("single", "three", "line-vs-triangle",
                                        "generic"))
    p_thr.add_argument("--a", default=None)
    p_thr.add_argument("--b", default=None)
    _add_common(p_thr)
    p_thr.set_defaults(func=_cmd_threshold)

    p_swp = sub.add_parser("sweep", help="run a sweep described by a config file")
    p_swp.add_argument("config")
    _add_common(p_swp)
    p_swp.set_defaults(func=_cmd_sweep)

    p_fig = sub.add_parser("figures", help="reproduce the data of one figure")
    p_fig.add_argument("which", type=int, choices=(1, 2, 3))
    _add_common(p_fig)
    p_fig.set_defaults(func=_cmd_figures)

    return parser


def cli_main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, DomainError, CapacityError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DegenerateThreshold as exc:
        print(f"degenerate threshold: {exc}", file=sys.stderr)
        return 3
    except (MemcostError, ArithmeticError, ValueError) as exc:
        print(f"internal numeric failure: {exc}", file=sys.stderr)
        return 4


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
