"""Parameter sweeps and table serialization (csv, json, gnuplot-style dat)."""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .costs import CostParams, Scenario, generalized_cost, scenario_cost
from .costs import coupling_cost as _coupling_cost
from .costs import field_cost as _field_cost
from .errors import DegenerateThreshold, ValidationError
from .exact import AbsorptionRule, retention_time_exact
from .model import SystemSpec, Topology
from .montecarlo import McConfig, estimate_retention
from .thresholds import (
    critical_line_vs_triangle,
    critical_single,
    critical_three_uncoupled,
)

SWEEP_VARIABLES = ("h", "s_f", "beta")

TOPOLOGIES = {
    "isolated": lambda s_f: Topology.isolated(),
    "uncoupled3": lambda s_f: Topology.uncoupled3(),
    "line3": Topology.line3,
    "triangle3": Topology.triangle3,
}

RULES = {
    "majority": AbsorptionRule.MAJORITY_WRONG,
    "all": AbsorptionRule.ALL_WRONG,
    "any": AbsorptionRule.ANY_WRONG,
}


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    start: float
    stop: float
    points: int
    target: str
    fixed: dict = field(default_factory=dict)


@dataclass
class SweepTable:
    columns: list[str]
    rows: list[tuple]
    metadata: dict


def _spec_from(params: dict) -> SystemSpec:
    name = params.get("topology", "isolated")
    if name not in TOPOLOGIES:
        raise ValidationError(f"unknown topology {name!r}")
    topo = TOPOLOGIES[name](params.get("s_f", 0.0))
    return SystemSpec(topo, h=params.get("h", 0.0), beta=params.get("beta", 1.0))


def _cost_params(params: dict) -> CostParams:
    return CostParams(
        c_m=params.get("cm", 1.0),
        c_r=params.get("cr", 1.0),
        mu=params.get("mu", 1.0),
        k=params.get("k", 1.0),
        m=params.get("m", 1.0),
        n_exp=params.get("n", 1.0),
    )


def _rule_from(params: dict) -> AbsorptionRule:
    name = params.get("rule", "majority")
    if name not in RULES:
        raise ValidationError(f"unknown absorption rule {name!r}")
    return RULES[name]


def _t_field_cost(params):
    return {"cost": _field_cost(params.get("h", 0.0), params.get("mu", 1.0))}


def _t_coupling_cost(params):
    return {"cost": _coupling_cost(params.get("s_f", 0.0), _cost_params(params))}


def _t_retention_exact(params):
    res = retention_time_exact(_spec_from(params), _rule_from(params))
    return {"tau": res.tau}


def _t_retention_mc(params):
    cfg = McConfig(
        trials=int(params.get("trials", 10_000)),
        seed=int(params.get("seed", 0)),
    )
    est = estimate_retention(_spec_from(params), _rule_from(params), cfg)
    return {"tau": est.mean, "stderr": est.stderr}


def _cost_columns(b):
    return {
        "material": b.material,
        "coupling": b.coupling,
        "field": b.field,
        "replenishment": b.replenishment,
        "total": b.total,
    }


def _t_scenario_cost(params):
    sid = str(params.get("scenario", "s1")).lower()
    try:
        s = Scenario(sid)
    except ValueError:
        raise ValidationError(f"unknown scenario {sid!r}") from None
    b = scenario_cost(
        s, _cost_params(params),
        h=params.get("h", 0.0), s_f=params.get("s_f", 0.0),
        beta=params.get("beta", 1.0),
    )
    return _cost_columns(b)


def _t_generalized_cost(params):
    b = generalized_cost(_spec_from(params), _cost_params(params), _rule_from(params))
    return _cost_columns(b)


def _t_critical_single(params):
    r = critical_single(params.get("h", 0.0), params.get("beta", 1.0),
                        params.get("mu", 1.0))
    return {"c_r0": r.c_r0}


def _t_critical_three(params):
    r = critical_three_uncoupled(params.get("h", 0.0), params.get("beta", 1.0),
                                 params.get("mu", 1.0))
    return {"c_r0": r.c_r0}


def _t_critical_line_vs_triangle(params):
    r = critical_line_vs_triangle(
        params.get("h", 0.0), params.get("s_f", 0.0), params.get("beta", 1.0),
        _cost_params(params),
    )
    return {"c_r0": r.c_r0}


# target name -> (function, variables it can be swept over)
TARGETS = {
    "field_cost": (_t_field_cost, {"h"}),
    "coupling_cost": (_t_coupling_cost, {"s_f"}),
    "retention_exact": (_t_retention_exact, {"h", "s_f", "beta"}),
    "retention_mc": (_t_retention_mc, {"h", "s_f", "beta"}),
    "scenario_cost": (_t_scenario_cost, {"h", "s_f", "beta"}),
    "generalized_cost": (_t_generalized_cost, {"h", "s_f", "beta"}),
    "critical_single": (_t_critical_single, {"h", "beta"}),
    "critical_three_uncoupled": (_t_critical_three, {"h", "beta"}),
    "critical_line_vs_triangle": (_t_critical_line_vs_triangle, {"h", "s_f", "beta"}),
}


def run_sweep(s: SweepSpec) -> SweepTable:
    """Evaluate the target on a uniform grid of the swept variable.

    Grid points where the target raises DegenerateThreshold are dropped from
    the rows and listed under metadata["degenerate"].
    """
    if s.target not in TARGETS:
        raise ValidationError(f"unknown sweep target {s.target!r}")
    fn, allowed = TARGETS[s.target]
    if s.variable not in SWEEP_VARIABLES:
        raise ValidationError(f"unknown sweep variable {s.variable!r}")
    if s.variable not in allowed:
        raise ValidationError(
            f"target {s.target!r} cannot be swept over {s.variable!r}"
        )
    if s.points < 2:
        raise ValidationError(f"points must be >= 2, got {s.points}")
    if not s.start < s.stop:
        raise ValidationError("sweep range requires start < stop")
    if s.variable in s.fixed:
        raise ValidationError(f"swept variable {s.variable!r} also given as fixed")

    grid = np.linspace(s.start, s.stop, s.points)
    rows: list[tuple] = []
    degenerate: list[dict] = []
    columns: list[str] | None = None
    for x in grid:
        params = dict(s.fixed)
        params[s.variable] = float(x)
        try:
            result = fn(params)
        except DegenerateThreshold as exc:
            degenerate.append({s.variable: float(x), "reason": str(exc)})
            continue
        if columns is None:
            columns = [s.variable, *result.keys()]
        rows.append((float(x), *result.values()))
    if columns is None:
        columns = [s.variable]
    metadata = {
        "target": s.target,
        "variable": s.variable,
        "start": s.start,
        "stop": s.stop,
        "points": s.points,
        "fixed": dict(s.fixed),
        "version": __version__,
        "degenerate": degenerate,
    }
    if "seed" in s.fixed:
        metadata["seed"] = s.fixed["seed"]
    return SweepTable(columns=columns, rows=rows, metadata=metadata)


def _fmt(x) -> str:
    return format(float(x), ".9g")


def emit(table: SweepTable, fmt: str) -> bytes:
    """Serialize a table; numbers carry 9 significant digits in every format."""
    if fmt == "csv":
        buf = io.StringIO()
        for line in json.dumps(table.metadata, sort_keys=True).splitlines():
            buf.write(f"# {line}\n")
        buf.write(",".join(table.columns) + "\n")
        for row in table.rows:
            buf.write(",".join(_fmt(x) for x in row) + "\n")
        return buf.getvalue().encode()
    if fmt == "json":
        doc = {
            "columns": table.columns,
            "rows": [[_fmt(x) for x in row] for row in table.rows],
            "metadata": table.metadata,
        }
        return (json.dumps(doc, sort_keys=True, indent=1) + "\n").encode()
    if fmt == "dat":
        if len(table.columns) > 2:
            raise ValidationError(
                "dat output is two-column; write multi-curve tables with write_table"
            )
        buf = io.StringIO()
        for row in table.rows:
            buf.write(" ".join(_fmt(x) for x in row[:2]) + "\n")
        return buf.getvalue().encode()
    raise ValidationError(f"unknown output format {fmt!r}")


def parse_json_table(data: bytes) -> SweepTable:
    doc = json.loads(data.decode())
    return SweepTable(
        columns=list(doc["columns"]),
        rows=[tuple(float(x) for x in row) for row in doc["rows"]],
        metadata=doc["metadata"],
    )


def write_table(table: SweepTable, fmt: str, path: str) -> list[str]:
    """Write a table to disk; multi-curve dat tables split into one file per
    curve with suffixed names. Returns the paths written."""
    if fmt == "dat" and len(table.columns) > 2:
        stem, dot, ext = path.rpartition(".")
        if not dot:
            stem, ext = path, "dat"
        paths = []
        for ci, name in enumerate(table.columns[1:], start=1):
            sub = SweepTable(
                columns=[table.columns[0], name],
                rows=[(row[0], row[ci]) for row in table.rows],
                metadata=table.metadata,
            )
            suffix = name.replace("[", "_").replace("]", "").replace("=", "")
            p = f"{stem}_{suffix}.{ext}"
            with open(p, "wb") as f:
                f.write(emit(sub, "dat"))
            paths.append(p)
        return paths
    with open(path, "wb") as f:
        f.write(emit(table, fmt))
    return [path]


def figure_table(which: int) -> SweepTable:
    """The data behind the three threshold figures, on documented default grids."""
    if which == 1:
        return run_sweep(SweepSpec(
            variable="h", start=0.05, stop=5.0, points=100,
            target="critical_single", fixed={"beta": 1.0, "mu": 1.0},
        ))
    if which == 2:
        return run_sweep(SweepSpec(
            variable="h", start=0.05, stop=5.0, points=100,
            target="critical_three_uncoupled", fixed={"beta": 1.0, "mu": 1.0},
        ))
    if which == 3:
        curves = {}
        degenerate = []
        sf_values = (0.001, 0.01, 0.1, 1.0, 2.0, 3.0)
        base = None
        for sf in sf_values:
            t = run_sweep(SweepSpec(
                variable="h", start=0.05, stop=3.0, points=60,
                target="critical_line_vs_triangle",
                fixed={"beta": 1.0, "s_f": sf, "cm": 1.0, "k": 1.0, "m": 1.0, "n": 1.0},
            ))
            curves[sf] = dict(t.rows)
            degenerate.extend(
                {**d, "s_f": sf} for d in t.metadata["degenerate"]
            )
            if base is None:
                base = t
        grid = np.linspace(0.05, 3.0, 60)
        columns = ["h"] + [f"c_r0[sf={sf:g}]" for sf in sf_values]
        rows = []
        for x in grid:
            x = float(x)
            if all(x in curves[sf] for sf in sf_values):
                rows.append((x, *(curves[sf][x] for sf in sf_values)))
            else:
                degenerate.append({"h": x, "reason": "missing on some curve"})
        metadata = dict(base.metadata)
        metadata.update(target="critical_line_vs_triangle", figure=3,
                        s_f_values=list(sf_values), degenerate=degenerate)
        metadata.pop("fixed", None)
        return SweepTable(columns=columns, rows=rows, metadata=metadata)
    raise ValidationError(f"unknown figure {which}; choose 1, 2 or 3")
