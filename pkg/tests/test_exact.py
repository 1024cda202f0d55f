import math

import numpy as np
import pytest

from memcost import (
    AbsorptionRule,
    CapacityError,
    ClosedFormScenario,
    Method,
    ModelError,
    SystemSpec,
    Topology,
    build_transition_matrix,
    retention_time_exact,
    tau_closed_form,
)
from memcost.exact import absorbing_states
from memcost.model import state_energies

MAJ = AbsorptionRule.MAJORITY_WRONG


def lumped_tau4(beta: float, h: float) -> float:
    """Independent 2-unknown solve of the uncoupled-3 chain lumped by wrong count.

    T0 = (1 + e^{2 beta h}) + T1
    T1 = (1 + (p_minus/3) T0) / ((2/3) p_plus + (1/3) p_minus)
    """
    p_plus = 1.0 / (1.0 + math.exp(2 * beta * h))
    p_minus = 1.0 - p_plus
    d = (2 / 3) * p_plus + (1 / 3) * p_minus
    tau2 = 1.0 + math.exp(2 * beta * h)
    return (tau2 * d + 1.0) / (d - p_minus / 3)


def mfpt_by_survival(p: np.ndarray, absorbing: np.ndarray, max_iter=2_000_000) -> float:
    """Independent oracle: E[T] = sum_k P(T > k) by forward iteration."""
    transient = ~absorbing
    dist = np.zeros(p.shape[0])
    dist[0] = 1.0
    total = 0.0
    for _ in range(max_iter):
        mass = dist[transient].sum()
        if mass < 1e-14:
            return total
        total += mass
        nxt = dist @ p
        nxt[absorbing] = 0.0  # first passage: freeze absorbed mass
        dist = nxt
    raise AssertionError("survival iteration did not converge")


def test_matrix_free_spin():
    p = build_transition_matrix(SystemSpec(Topology.isolated(), h=0.0))
    assert np.allclose(p, [[0.5, 0.5], [0.5, 0.5]])


def test_matrix_single_dipole_with_field():
    p = build_transition_matrix(SystemSpec(Topology.isolated(), h=1.0, beta=1.0))
    q = 1.0 / (1.0 + math.e**2)
    assert p[0, 1] == pytest.approx(q, abs=1e-12)
    assert p[0, 0] == pytest.approx(1 - q, abs=1e-12)


@pytest.mark.parametrize(
    "spec",
    [
        SystemSpec(Topology.line3(0.5), h=0.5),
        SystemSpec(Topology.triangle3(2.0), h=1.0, beta=2.0),
        SystemSpec(Topology(4, ((0, 1, 0.7), (1, 2, 0.3), (2, 3, 1.1))), h=0.25),
    ],
)
def test_rows_sum_to_one(spec):
    p = build_transition_matrix(spec)
    assert np.abs(p.sum(axis=1) - 1.0).max() < 1e-12


def test_anchor_isolated_no_field():
    res = retention_time_exact(SystemSpec(Topology.isolated(), h=0.0, beta=3.0))
    assert res.method is Method.EXACT
    assert res.tau == pytest.approx(2.0, rel=1e-12)


@pytest.mark.parametrize("beta", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("h", [0.25, 1.0, 2.0])
def test_anchor_single_dipole_field(beta, h):
    res = retention_time_exact(SystemSpec(Topology.isolated(), h=h, beta=beta))
    assert res.tau == pytest.approx(1.0 + math.exp(2 * beta * h), rel=1e-9)


def test_anchor_three_uncoupled():
    res = retention_time_exact(SystemSpec(Topology.uncoupled3(), h=0.0))
    assert res.tau == pytest.approx(6.0, rel=1e-9)


def test_tau4_matches_lumped_oracle():
    res = retention_time_exact(SystemSpec(Topology.uncoupled3(), h=1.0, beta=1.0))
    assert res.tau == pytest.approx(lumped_tau4(1.0, 1.0), rel=1e-12)
    assert res.tau == pytest.approx(51.9663, abs=1e-4)


@pytest.mark.parametrize("topo", [Topology.line3(0.0), Topology.triangle3(0.0)])
def test_zero_coupling_reduces_to_uncoupled(topo):
    res = retention_time_exact(SystemSpec(topo, h=0.0))
    assert res.tau == pytest.approx(6.0, rel=1e-9)


def test_survival_oracle_agrees():
    for spec in [
        SystemSpec(Topology.uncoupled3(), h=1.0),
        SystemSpec(Topology.line3(0.5), h=0.5),
        SystemSpec(Topology.triangle3(0.5), h=0.25),
    ]:
        p = build_transition_matrix(spec)
        expected = mfpt_by_survival(p, absorbing_states(MAJ, spec.n))
        assert retention_time_exact(spec).tau == pytest.approx(expected, rel=1e-8)


def test_all_wrong_and_any_wrong_rules():
    spec = SystemSpec(Topology.uncoupled3(), h=0.0)
    p = build_transition_matrix(spec)
    for rule in (AbsorptionRule.ALL_WRONG, AbsorptionRule.ANY_WRONG):
        expected = mfpt_by_survival(p, absorbing_states(rule, 3))
        assert retention_time_exact(spec, rule).tau == pytest.approx(expected, rel=1e-8)
    # n=1: all three rules coincide
    iso = SystemSpec(Topology.isolated(), h=0.0)
    taus = {retention_time_exact(iso, r).tau for r in AbsorptionRule}
    assert all(abs(t - 2.0) < 1e-12 for t in taus)


def test_closed_forms():
    assert tau_closed_form(ClosedFormScenario.SINGLE_ISOLATED).tau == 2.0
    assert tau_closed_form(ClosedFormScenario.SINGLE_FIELD, beta=1.0, h=0.0).tau == 2.0
    assert tau_closed_form(ClosedFormScenario.THREE_UNCOUPLED_NO_FIELD).tau == 6.0
    r = tau_closed_form(ClosedFormScenario.SINGLE_FIELD, beta=1.0, h=1.0)
    assert r.method is Method.CLOSED_FORM
    assert r.tau == pytest.approx(1 + math.e**2, rel=1e-12)


def test_exact_matches_closed_forms():
    pairs = [
        (SystemSpec(Topology.isolated(), h=0.0),
         tau_closed_form(ClosedFormScenario.SINGLE_ISOLATED)),
        (SystemSpec(Topology.isolated(), h=0.7, beta=1.3),
         tau_closed_form(ClosedFormScenario.SINGLE_FIELD, beta=1.3, h=0.7)),
        (SystemSpec(Topology.uncoupled3(), h=0.0),
         tau_closed_form(ClosedFormScenario.THREE_UNCOUPLED_NO_FIELD)),
    ]
    for spec, closed in pairs:
        assert retention_time_exact(spec).tau == pytest.approx(closed.tau, rel=1e-9)


@pytest.mark.parametrize(
    "spec",
    [
        SystemSpec(Topology.line3(0.5), h=0.5),
        SystemSpec(Topology.triangle3(1.0), h=0.25, beta=0.8),
        SystemSpec(Topology(4, ((0, 1, 0.7), (1, 2, 0.3), (2, 3, 1.1), (0, 3, 0.5))),
                   h=0.4),
        SystemSpec(Topology.line3(0.5), h=0.5, stored_pattern=(1, 0, 1)),
    ],
)
def test_detailed_balance_exhaustive(spec):
    p = build_transition_matrix(spec)
    e = state_energies(spec)
    n = spec.n
    for x in range(1 << n):
        for i in range(n):
            y = x ^ (1 << i)
            lhs = math.exp(-spec.beta * e[x]) * p[x, y]
            rhs = math.exp(-spec.beta * e[y]) * p[y, x]
            assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-300)


@pytest.mark.parametrize("s_f", [0.1, 0.5, 1.0, 2.0])
@pytest.mark.parametrize("h", [0.25, 0.5, 1.0])
def test_topology_ordering(s_f, h):
    tau_un = retention_time_exact(SystemSpec(Topology.uncoupled3(), h=h)).tau
    tau_line = retention_time_exact(SystemSpec(Topology.line3(s_f), h=h)).tau
    tau_tri = retention_time_exact(SystemSpec(Topology.triangle3(s_f), h=h)).tau
    assert tau_tri > tau_line > tau_un


@pytest.mark.parametrize(
    "spec",
    [
        SystemSpec(Topology.isolated(), h=1.0),
        SystemSpec(Topology.uncoupled3(), h=0.5, stored_pattern=(1, 0, 1)),
        SystemSpec(Topology.line3(0.5), h=0.5),
        SystemSpec(Topology.triangle3(0.5), h=0.75, stored_pattern=(0, 0, 1)),
    ],
)
def test_field_sign_pattern_flip_symmetry(spec):
    flipped = SystemSpec(spec.topology, -spec.h, spec.beta).complemented() \
        if spec.stored_pattern is None else \
        SystemSpec(spec.topology, -spec.h, spec.beta, spec.stored_pattern).complemented()
    t1 = retention_time_exact(spec).tau
    t2 = retention_time_exact(flipped).tau
    assert t1 == pytest.approx(t2, rel=1e-10)


def test_tau_invariant_under_automorphism():
    # line reversal maps end couplings onto each other
    a = SystemSpec(Topology(3, ((0, 1, 0.4), (1, 2, 0.9))), h=0.5)
    b = SystemSpec(Topology(3, ((0, 1, 0.9), (1, 2, 0.4))), h=0.5)
    assert retention_time_exact(a).tau == pytest.approx(
        retention_time_exact(b).tau, rel=1e-10
    )
    # triangle: cycling the edge weights around the vertices
    c = SystemSpec(Topology(3, ((0, 1, 0.4), (1, 2, 0.9), (0, 2, 1.3))), h=0.5)
    d = SystemSpec(Topology(3, ((0, 1, 0.9), (1, 2, 1.3), (0, 2, 0.4))), h=0.5)
    assert retention_time_exact(c).tau == pytest.approx(
        retention_time_exact(d).tau, rel=1e-10
    )


def test_tau_at_least_one():
    for h in (0.0, 2.0, -2.0):
        assert retention_time_exact(SystemSpec(Topology.isolated(), h=h)).tau >= 1.0


def test_capacity_error():
    with pytest.raises(CapacityError):
        build_transition_matrix(SystemSpec(Topology(13)))


def test_unreachable_absorbing_set_is_model_error():
    # the flip probability underflows to exactly zero: absorption unreachable
    with pytest.raises(ModelError):
        retention_time_exact(SystemSpec(Topology.isolated(), h=500.0, beta=2.0))
