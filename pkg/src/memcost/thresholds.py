"""Critical replenishment costs: where two configurations' cost rates cross.

Every total cost rate is affine in c_r (slope n/tau), so any pair of
configurations either crosses at a single c_r or never does. The three
named comparisons follow the printed closed forms; ``generic_crossover``
computes the exact affine intersection for any pair.

Note: the printed single-dipole closed form (H^2/mu)*tanh(beta*H) is NOT
the exact intersection of the corresponding cost lines, which works out to
(H^2/mu)/tanh(beta*H). ``critical_single`` returns the printed form;
``generic_crossover`` returns the exact intersection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .costs import CostParams, coupling_cost, generalized_cost
from .errors import DegenerateThreshold, DomainError
from .exact import AbsorptionRule, retention_time_exact
from .model import SystemSpec, Topology

_TAU_GAP_TOL = 1e-12


@dataclass(frozen=True)
class ThresholdResult:
    c_r0: float
    comparison: tuple[str, str]
    regime_above: str


def critical_single(h: float, beta: float = 1.0, mu: float = 1.0) -> ThresholdResult:
    """Single dipole, field on vs off: printed closed form (h^2/mu)*tanh(beta*h).

    Returns 0 at h=0 by continuity (the comparison is vacuous there).
    """
    if h < 0:
        raise DomainError(f"comparison is meaningful for h >= 0, got {h}")
    if mu <= 0:
        raise DomainError(f"permeability must be positive, got {mu}")
    value = (h * h / mu) * math.tanh(beta * h)
    return ThresholdResult(
        c_r0=value,
        comparison=("single, no field", "single, field on"),
        regime_above="field-on (S2) cheaper",
    )


def critical_three_uncoupled(
    h: float, beta: float = 1.0, mu: float = 1.0
) -> ThresholdResult:
    """Three uncoupled dipoles, field on vs off: (h^2/mu) * tau4/(tau4-6)."""
    if h < 0:
        raise DomainError(f"comparison is meaningful for h >= 0, got {h}")
    if mu <= 0:
        raise DomainError(f"permeability must be positive, got {mu}")
    tau4 = retention_time_exact(SystemSpec(Topology.uncoupled3(), h=h, beta=beta)).tau
    if tau4 <= 6.0 + _TAU_GAP_TOL:
        raise DegenerateThreshold(
            f"tau4={tau4:.12g} does not exceed 6; no finite crossover"
        )
    value = (h * h / mu) * tau4 / (tau4 - 6.0)
    return ThresholdResult(
        c_r0=value,
        comparison=("three uncoupled, no field", "three uncoupled, field on"),
        regime_above="field-on (S4) cheaper",
    )


def critical_line_vs_triangle(
    h: float,
    s_f: float,
    beta: float = 1.0,
    p: CostParams = CostParams(),
) -> ThresholdResult:
    """Triangle vs line coupling: coupling_cost(s_f)/3 * tau5*tau6/(tau6-tau5)."""
    if s_f < 0:
        raise DomainError(f"coupling strength must be nonnegative, got {s_f}")
    if s_f == 0:
        raise DegenerateThreshold(
            "s_f=0: identical retention with strictly ordered coupling cost; "
            "the triangle never wins"
        )
    tau5 = retention_time_exact(SystemSpec(Topology.line3(s_f), h=h, beta=beta)).tau
    tau6 = retention_time_exact(SystemSpec(Topology.triangle3(s_f), h=h, beta=beta)).tau
    if tau6 <= tau5 + _TAU_GAP_TOL:
        raise DegenerateThreshold(
            f"tau6={tau6:.12g} does not exceed tau5={tau5:.12g}; no finite crossover"
        )
    value = coupling_cost(s_f, p) / 3.0 * tau5 * tau6 / (tau6 - tau5)
    return ThresholdResult(
        c_r0=value,
        comparison=("line coupling", "triangle coupling"),
        regime_above="triangle cheaper",
    )


def generic_crossover(
    spec_a: SystemSpec,
    spec_b: SystemSpec,
    p: CostParams,
    rule: AbsorptionRule = AbsorptionRule.MAJORITY_WRONG,
    label_a: str = "A",
    label_b: str = "B",
) -> ThresholdResult:
    """Exact intersection of the two affine total-cost lines in c_r.

    total(c_r) = fixed + (n/tau) * c_r per configuration; the crossover is
    (fixed_b - fixed_a) / (slope_a - slope_b).
    """
    p0 = replace(p, c_r=0.0)
    fixed_a = generalized_cost(spec_a, p0, rule).total
    fixed_b = generalized_cost(spec_b, p0, rule).total
    slope_a = spec_a.n / retention_time_exact(spec_a, rule).tau
    slope_b = spec_b.n / retention_time_exact(spec_b, rule).tau
    if math.isclose(slope_a, slope_b, rel_tol=1e-12, abs_tol=1e-15):
        raise DegenerateThreshold("parallel cost lines: equal replenishment slope")
    c_r0 = (fixed_b - fixed_a) / (slope_a - slope_b)
    if c_r0 < 0:
        raise DegenerateThreshold(
            f"cost lines cross at negative c_r ({c_r0:.6g}); one configuration "
            "dominates for all nonnegative replenishment costs"
        )
    regime = label_a if slope_a < slope_b else label_b
    return ThresholdResult(
        c_r0=c_r0,
        comparison=(label_a, label_b),
        regime_above=f"{regime} cheaper",
    )
