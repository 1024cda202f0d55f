import math
from dataclasses import replace

import numpy as np
import pytest

from memcost import (
    CostParams,
    DegenerateThreshold,
    DomainError,
    SystemSpec,
    Topology,
    critical_line_vs_triangle,
    critical_single,
    critical_three_uncoupled,
    generalized_cost,
    generic_crossover,
    retention_time_exact,
)
from memcost.model import flip_probability

P1 = CostParams()


def lumped_line3_tau(h: float, s_f: float, beta: float) -> float:
    """Hand oracle over (wrong-count, position) classes: {all-correct, end
    dipole wrong, middle dipole wrong}; majority failure absorbs."""
    p = lambda de: flip_probability(de, beta)
    # transition probabilities between the three transient classes
    p0e = (2 / 3) * p(2 * (h + s_f))
    p0m = (1 / 3) * p(2 * (h + 2 * s_f))
    pe0 = (1 / 3) * p(-2 * (h + s_f))
    pe_abs = (1 / 3) * p(2 * h) + (1 / 3) * p(2 * (h + s_f))
    pm0 = (1 / 3) * p(-2 * (h + 2 * s_f))
    pm_abs = (2 / 3) * p(2 * (h - s_f))
    a = np.array([
        [p0e + p0m, -p0e, -p0m],
        [-pe0, pe0 + pe_abs, 0.0],
        [-pm0, 0.0, pm0 + pm_abs],
    ])
    t = np.linalg.solve(a, np.ones(3))
    return float(t[0])


def lumped_triangle3_tau(h: float, s_f: float, beta: float) -> float:
    """Hand oracle over wrong counts {0, 1}; majority failure absorbs."""
    p = lambda de: flip_probability(de, beta)
    p01 = p(2 * (h + 2 * s_f))
    p10 = (1 / 3) * p(-2 * (h + 2 * s_f))
    p1_abs = (2 / 3) * p(2 * h)
    a = np.array([[p01, -p01], [-p10, p10 + p1_abs]])
    t = np.linalg.solve(a, np.ones(2))
    return float(t[0])


def crossover_by_bisection(spec_a, spec_b, p, lo=0.0, hi=1e6) -> float:
    """Independent oracle: root of total_a(c_r) - total_b(c_r) by bisection."""
    def diff(c_r):
        pc = replace(p, c_r=c_r)
        return generalized_cost(spec_a, pc).total - generalized_cost(spec_b, pc).total
    assert diff(lo) * diff(hi) < 0, "no sign change on the bracket"
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if diff(lo) * diff(mid) <= 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def test_critical_single_values():
    assert critical_single(0.0).c_r0 == 0.0
    assert critical_single(1.0).c_r0 == pytest.approx(math.tanh(1.0), rel=1e-12)
    assert critical_single(2.0).c_r0 == pytest.approx(4 * math.tanh(2.0), rel=1e-12)
    assert critical_single(2.0).c_r0 == pytest.approx(3.8561103, abs=1e-6)


def test_critical_single_matches_printed_expression_on_grid():
    for h in np.linspace(0.05, 5.0, 50):
        for beta, mu in ((1.0, 1.0), (0.5, 2.0)):
            printed = (h * h / mu) * (1 - math.exp(-2 * beta * h)) / (
                1 + math.exp(-2 * beta * h))
            assert critical_single(h, beta, mu).c_r0 == pytest.approx(
                printed, rel=1e-12)


def test_critical_single_rejects_negative_field():
    with pytest.raises(DomainError):
        critical_single(-1.0)


def test_critical_single_strictly_increasing():
    grid = np.linspace(0.01, 5.0, 120)
    vals = [critical_single(h).c_r0 for h in grid]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_critical_three_golden():
    r = critical_three_uncoupled(1.0, 1.0, 1.0)
    tau4 = retention_time_exact(SystemSpec(Topology.uncoupled3(), h=1.0)).tau
    assert r.c_r0 == pytest.approx(tau4 / (tau4 - 6.0), rel=1e-12)
    assert r.c_r0 == pytest.approx(1.13053, abs=1e-5)


def test_critical_three_degenerate_without_field():
    with pytest.raises(DegenerateThreshold):
        critical_three_uncoupled(0.0)
    with pytest.raises(DegenerateThreshold):
        critical_three_uncoupled(1e-15)


def test_critical_three_close_to_single_at_large_field():
    r3 = critical_three_uncoupled(3.0).c_r0
    r1 = critical_single(3.0).c_r0
    assert abs(r3 / r1 - 1) < 0.01
    assert r1 == pytest.approx(9 * math.tanh(3.0), rel=1e-12)


def test_line_vs_triangle_degenerate_at_zero_coupling():
    with pytest.raises(DegenerateThreshold):
        critical_line_vs_triangle(0.5, 0.0)


def test_line_vs_triangle_golden_against_lumped_oracle():
    h, s_f, beta = 0.5, 0.5, 1.0
    tau5 = lumped_line3_tau(h, s_f, beta)
    tau6 = lumped_triangle3_tau(h, s_f, beta)
    expected = (s_f * 1.0 / 3.0) * tau5 * tau6 / (tau6 - tau5)
    r = critical_line_vs_triangle(h, s_f, beta, P1)
    assert r.c_r0 == pytest.approx(expected, rel=1e-9)
    # frozen golden from the oracle above
    assert r.c_r0 == pytest.approx(15.0033503, rel=1e-7)


def test_line_vs_triangle_increasing_in_coupling():
    lo = critical_line_vs_triangle(0.5, 0.1).c_r0
    hi = critical_line_vs_triangle(0.5, 1.0).c_r0
    assert hi > lo


def test_generic_matches_three_uncoupled_closed_form():
    a = SystemSpec(Topology.uncoupled3(), h=0.0)
    b = SystemSpec(Topology.uncoupled3(), h=1.0)
    r = generic_crossover(a, b, P1, label_a="no-field", label_b="field")
    assert r.c_r0 == pytest.approx(critical_three_uncoupled(1.0).c_r0, rel=1e-9)
    assert r.regime_above == "field cheaper"


def test_generic_matches_line_vs_triangle_closed_form():
    h, s_f = 0.5, 0.5
    a = SystemSpec(Topology.line3(s_f), h=h)
    b = SystemSpec(Topology.triangle3(s_f), h=h)
    r = generic_crossover(a, b, P1, label_a="line", label_b="triangle")
    assert r.c_r0 == pytest.approx(
        critical_line_vs_triangle(h, s_f, 1.0, P1).c_r0, rel=1e-9)
    assert r.regime_above == "triangle cheaper"


def test_generic_matches_bisection_oracle_for_single_dipole():
    # The exact cost crossover of the single-dipole pair; note it differs
    # from the tanh closed form by a factor tanh^2(beta*h).
    a = SystemSpec(Topology.isolated(), h=0.0)
    b = SystemSpec(Topology.isolated(), h=1.0)
    r = generic_crossover(a, b, P1)
    expected = crossover_by_bisection(a, b, P1, hi=10.0)
    assert r.c_r0 == pytest.approx(expected, rel=1e-9)
    assert r.c_r0 == pytest.approx(1.0 / math.tanh(1.0), rel=1e-9)


def test_generic_identical_specs_degenerate():
    spec = SystemSpec(Topology.line3(0.5), h=0.5)
    with pytest.raises(DegenerateThreshold):
        generic_crossover(spec, spec, P1)


@pytest.mark.parametrize(
    "make",
    [
        lambda: (SystemSpec(Topology.uncoupled3(), h=0.0),
                 SystemSpec(Topology.uncoupled3(), h=1.0),
                 critical_three_uncoupled(1.0)),
        lambda: (SystemSpec(Topology.line3(0.5), h=0.5),
                 SystemSpec(Topology.triangle3(0.5), h=0.5),
                 critical_line_vs_triangle(0.5, 0.5, 1.0, P1)),
    ],
)
def test_crossover_semantics(make):
    spec_a, spec_b, r = make()
    eps = 1e-3
    above = replace(P1, c_r=r.c_r0 * (1 + eps))
    below = replace(P1, c_r=r.c_r0 * (1 - eps))
    # above the threshold, the higher-retention configuration (B) is cheaper
    assert generalized_cost(spec_b, above).total < generalized_cost(spec_a, above).total
    assert generalized_cost(spec_b, below).total > generalized_cost(spec_a, below).total


def test_fig3_shape_increasing_in_s_f_and_h():
    legend = (0.001, 0.01, 0.1, 1.0, 2.0, 3.0)
    for h in (0.5, 1.0):
        vals = [critical_line_vs_triangle(h, s).c_r0 for s in legend]
        assert all(b > a for a, b in zip(vals, vals[1:]))
    for s in (0.1, 1.0):
        vals = [critical_line_vs_triangle(h, s).c_r0 for h in (0.25, 0.5, 1.0, 2.0)]
        assert all(b > a for a, b in zip(vals, vals[1:]))
