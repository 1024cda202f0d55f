"""Exact retention times via absorbing-Markov-chain mean first-passage analysis.

The block holds its data while the decoder can still recover the stored
pattern; retention time is the expected number of update steps until the
chain first enters the failure set.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, ModelError, ValidationError
from .linalg import SingularMatrixError, residual_inf, solve_mp, solve_partial_pivot
from .model import SystemSpec, flip_probability, state_energies, validate

# Exact mode is meant for small blocks; beyond this, use Monte Carlo.
STATE_CAP = 12

_RESIDUAL_TOL = 1e-9
_MP_FALLBACK_STATES = 256


class AbsorptionRule(enum.Enum):
    """Which wrong-masks count as data loss."""

    MAJORITY_WRONG = "majority"  # strictly more than n/2 dipoles wrong
    ALL_WRONG = "all"
    ANY_WRONG = "any"


class Method(enum.Enum):
    EXACT = "exact"
    CLOSED_FORM = "closed-form"
    MONTE_CARLO = "monte-carlo"


class ClosedFormScenario(enum.Enum):
    SINGLE_ISOLATED = "single-isolated"
    SINGLE_FIELD = "single-field"
    THREE_UNCOUPLED_NO_FIELD = "three-uncoupled-no-field"


@dataclass(frozen=True)
class RetentionResult:
    tau: float
    method: Method
    stderr: float = 0.0


def flip_probability_table(spec: SystemSpec) -> np.ndarray:
    """Table p[x, i] = probability that dipole i flips once selected, in state x."""
    n = spec.n
    energies = state_energies(spec)
    table = np.empty((1 << n, n), dtype=np.float64)
    for x in range(1 << n):
        for i in range(n):
            de = energies[x ^ (1 << i)] - energies[x]
            table[x, i] = flip_probability(de, spec.beta)
    return table


def build_transition_matrix(spec: SystemSpec) -> np.ndarray:
    """Row-stochastic single-flip Glauber chain over all 2^n wrong-masks."""
    validate(spec)
    n = spec.n
    if n > STATE_CAP:
        raise CapacityError(f"n={n} exceeds exact-mode cap {STATE_CAP}")
    table = flip_probability_table(spec)
    nstates = 1 << n
    p = np.zeros((nstates, nstates), dtype=np.float64)
    for x in range(nstates):
        acc = 0.0
        for i in range(n):
            q = table[x, i] / n
            p[x, x ^ (1 << i)] = q
            acc += q
        p[x, x] = 1.0 - acc
    return p


def absorbing_states(rule: AbsorptionRule, n: int) -> np.ndarray:
    """Boolean vector over wrong-masks marking the failure set."""
    masks = np.arange(1 << n)
    wrong = np.array([bin(m).count("1") for m in masks])
    if rule is AbsorptionRule.MAJORITY_WRONG:
        return wrong * 2 > n
    if rule is AbsorptionRule.ALL_WRONG:
        return wrong == n
    return wrong > 0


def retention_time_exact(
    spec: SystemSpec, rule: AbsorptionRule = AbsorptionRule.MAJORITY_WRONG
) -> RetentionResult:
    """Mean first-passage time from the all-correct state into the failure set.

    Solves (I - Q) t = 1 over the transient states with a dense
    partial-pivoting factorization and checks the residual.
    """
    p = build_transition_matrix(spec)
    absorbing = absorbing_states(rule, spec.n)
    if not absorbing.any():
        raise ModelError("absorbing set is empty")
    if absorbing[0]:
        raise ModelError("all-correct state is itself absorbing")
    transient = np.flatnonzero(~absorbing)
    q = p[np.ix_(transient, transient)]
    a = np.eye(len(transient)) - q
    b = np.ones(len(transient))
    try:
        t = solve_partial_pivot(a, b)
        residual = residual_inf(a, t, b)
        if residual > _RESIDUAL_TOL and len(transient) <= _MP_FALLBACK_STATES:
            # very slow chains (hitting times ~1e10) exceed what extended
            # precision can certify; redo tiny systems at full precision
            t, residual = solve_mp(a, b)
    except SingularMatrixError as exc:
        raise ModelError(f"singular first-passage system: {exc}") from exc
    if not np.isfinite(residual) or residual > _RESIDUAL_TOL:
        raise ModelError(f"first-passage solve residual {residual:g} too large")
    # all-correct is mask 0, always first in the transient ordering
    return RetentionResult(tau=float(t[0]), method=Method.EXACT)


def tau_closed_form(
    scenario: ClosedFormScenario, beta: float = 1.0, h: float = 0.0
) -> RetentionResult:
    """The three special retention times with printed closed forms."""
    if scenario is ClosedFormScenario.SINGLE_ISOLATED:
        tau = 2.0
    elif scenario is ClosedFormScenario.SINGLE_FIELD:
        if beta < 0:
            raise ValidationError(f"negative beta {beta}")
        tau = 1.0 + np.exp(2.0 * beta * h)
    elif scenario is ClosedFormScenario.THREE_UNCOUPLED_NO_FIELD:
        tau = 6.0
    else:  # pragma: no cover - exhaustive enum
        raise ValidationError(f"unknown scenario {scenario}")
    return RetentionResult(tau=float(tau), method=Method.CLOSED_FORM)
