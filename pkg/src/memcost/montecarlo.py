"""Seeded Monte Carlo Glauber simulation of retention and refresh cycles.

Every trial owns a counter-based Philox stream keyed by (seed, trial index),
so estimates are bit-identical no matter how trials are batched or how many
workers run them. Each update step consumes exactly two uniforms from the
trial's stream: one to pick the dipole, one to decide the flip.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numba import njit

from .costs import CostParams
from .errors import EstimateError, ValidationError
from .exact import (
    STATE_CAP,
    AbsorptionRule,
    absorbing_states,
    flip_probability_table,
    retention_time_exact,
)
from .model import SystemSpec, validate

_CHUNK_STEPS = 64  # uniforms drawn per trial per refill (2 per step)
_BATCH_TRIALS = 1 << 15
_LEDGER_CHUNK = 1 << 19
_LEDGER_STREAM = 0xFFFFFFFFFFFFFFFF  # stream index reserved for the ledger


@dataclass(frozen=True)
class McConfig:
    trials: int
    seed: int
    max_steps_per_trial: int = 10**9


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    trials_truncated: int


@dataclass(frozen=True)
class LedgerResult:
    """Replenishment cost charged per unit time over a long refresh-cycle run."""

    rate: float
    stderr: float
    refreshes: int
    horizon: int
    mean_cycle: float


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """The dedicated random stream of one trial."""
    key = np.array([seed, index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


@njit(cache=True, nogil=True)
def _advance(states, steps, done, usite, uflip, p_table, absorbing, nsites, cap):
    nb, k = usite.shape
    for b in range(nb):
        s = states[b]
        t = steps[b]
        for j in range(k):
            site = int(usite[b, j] * nsites)
            if site == nsites:
                site = nsites - 1
            t += 1
            if uflip[b, j] < p_table[s, site]:
                s ^= 1 << site
            if absorbing[s]:
                done[b] = True
                break
            if t >= cap:
                break
        states[b] = s
        steps[b] = t


@njit(cache=True, nogil=True)
def _advance_ledger(carry, usite, uflip, p_table, absorbing, nsites, horizon):
    """One chunk of the refresh-cycle run.

    carry = [state, total_steps, current_cycle_steps, n_cycles, cycle_sum,
    cycle_sumsq]; refresh resets the state to all-correct at the absorption
    step.
    """
    s = carry[0]
    t = carry[1]
    cyc = carry[2]
    ncyc = carry[3]
    csum = carry[4]
    csumsq = carry[5]
    k = usite.shape[0]
    for j in range(k):
        if t >= horizon:
            break
        site = int(usite[j] * nsites)
        if site == nsites:
            site = nsites - 1
        t += 1
        cyc += 1
        if uflip[j] < p_table[s, site]:
            s ^= 1 << site
        if absorbing[s]:
            ncyc += 1
            csum += cyc
            csumsq += cyc * cyc
            cyc = 0
            s = 0
    carry[0] = s
    carry[1] = t
    carry[2] = cyc
    carry[3] = ncyc
    carry[4] = csum
    carry[5] = csumsq


def simulate_trial(
    spec: SystemSpec,
    rule: AbsorptionRule,
    rng: np.random.Generator,
    max_steps: int = 10**9,
) -> int:
    """Run one trial from the all-correct state; returns the step count.

    Reference implementation of the step loop used by the batched kernel;
    returns ``max_steps`` if the cap is hit before absorption.
    """
    validate(spec)
    n = spec.n
    p_table = flip_probability_table(spec)
    absorbing = absorbing_states(rule, n)
    if absorbing[0]:
        raise ValidationError("all-correct state is absorbing under this rule")
    state = 0
    steps = 0
    while steps < max_steps:
        u1 = rng.random()
        u2 = rng.random()
        site = min(int(u1 * n), n - 1)
        steps += 1
        if u2 < p_table[state, site]:
            state ^= 1 << site
        if absorbing[state]:
            break
    return steps


def _run_trials(
    lo: int,
    hi: int,
    seed: int,
    cap: int,
    n: int,
    p_table: np.ndarray,
    absorbing: np.ndarray,
    steps_out: np.ndarray,
    absorbed_out: np.ndarray,
) -> None:
    for start in range(lo, hi, _BATCH_TRIALS):
        stop = min(start + _BATCH_TRIALS, hi)
        nb = stop - start
        gens = [trial_rng(seed, i) for i in range(start, stop)]
        states = np.zeros(nb, dtype=np.int64)
        steps = np.zeros(nb, dtype=np.int64)
        done = np.zeros(nb, dtype=np.bool_)
        active = np.arange(nb)
        while active.size:
            usite = np.empty((active.size, _CHUNK_STEPS))
            uflip = np.empty((active.size, _CHUNK_STEPS))
            for r, idx in enumerate(active):
                u = gens[idx].random(2 * _CHUNK_STEPS)
                usite[r] = u[0::2]
                uflip[r] = u[1::2]
            sub_states = states[active].copy()
            sub_steps = steps[active].copy()
            sub_done = np.zeros(active.size, dtype=np.bool_)
            _advance(
                sub_states, sub_steps, sub_done, usite, uflip, p_table, absorbing, n, cap
            )
            states[active] = sub_states
            steps[active] = sub_steps
            done[active] = sub_done
            finished = sub_done | (sub_steps >= cap)
            active = active[~finished]
        steps_out[start:stop] = steps
        absorbed_out[start:stop] = done


def estimate_retention(
    spec: SystemSpec,
    rule: AbsorptionRule = AbsorptionRule.MAJORITY_WRONG,
    cfg: McConfig = McConfig(trials=10_000, seed=0),
    workers: int = 1,
) -> McEstimate:
    """Monte Carlo retention estimate; bit-identical for any worker count.

    Truncated trials (cap hit before absorption) are counted and excluded
    from the mean, never averaged in silently.
    """
    validate(spec)
    if cfg.trials < 1 or cfg.max_steps_per_trial < 1:
        raise ValidationError("trials and max_steps_per_trial must be >= 1")
    n = spec.n
    p_table = flip_probability_table(spec)
    absorbing = absorbing_states(rule, n)
    if absorbing[0]:
        raise ValidationError("all-correct state is absorbing under this rule")

    steps = np.zeros(cfg.trials, dtype=np.int64)
    absorbed = np.zeros(cfg.trials, dtype=np.bool_)
    workers = max(1, int(workers))
    bounds = np.linspace(0, cfg.trials, workers + 1).astype(int)
    if workers == 1:
        _run_trials(
            0, cfg.trials, cfg.seed, cfg.max_steps_per_trial, n, p_table, absorbing,
            steps, absorbed,
        )
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(
                    _run_trials, int(lo), int(hi), cfg.seed, cfg.max_steps_per_trial,
                    n, p_table, absorbing, steps, absorbed,
                )
                for lo, hi in zip(bounds[:-1], bounds[1:])
                if hi > lo
            ]
            for f in futures:
                f.result()

    valid = steps[absorbed]
    truncated = int(cfg.trials - valid.size)
    if truncated:
        warnings.warn(f"{truncated} trial(s) hit the step cap and were excluded")
    if valid.size == 0:
        raise EstimateError("all trials truncated before absorption")
    mean = float(valid.mean())
    stderr = float(valid.std(ddof=1) / math.sqrt(valid.size)) if valid.size > 1 else 0.0
    return McEstimate(mean=mean, stderr=stderr, trials_truncated=truncated)


def simulate_energy_ledger(
    spec: SystemSpec,
    rule: AbsorptionRule,
    cfg: McConfig,
    cost: CostParams,
    horizon: int,
) -> LedgerResult:
    """Write -> decay -> refresh cycles over ``horizon`` steps.

    Each refresh recharges all n dipoles instantaneously and charges
    n * c_r; the returned rate is total charge / horizon. The stderr uses
    the renewal central limit for the refresh count.
    """
    validate(spec)
    if horizon < 1:
        raise ValidationError("horizon must be >= 1")
    n = spec.n
    if n <= STATE_CAP:
        tau = retention_time_exact(spec, rule).tau
        if horizon < 50 * tau:
            warnings.warn(
                f"horizon {horizon} < 50 * expected retention {tau:.3g}; "
                "the rate estimate will be noisy"
            )
    p_table = flip_probability_table(spec)
    absorbing = absorbing_states(rule, n)
    if absorbing[0]:
        raise ValidationError("all-correct state is absorbing under this rule")

    rng = trial_rng(cfg.seed, _LEDGER_STREAM)
    carry = np.zeros(6, dtype=np.int64)
    while carry[1] < horizon:
        u = rng.random(2 * _LEDGER_CHUNK)
        _advance_ledger(carry, u[0::2], u[1::2], p_table, absorbing, n, horizon)
    refreshes = int(carry[3])
    csum = float(carry[4])
    csumsq = float(carry[5])
    charge = refreshes * n * cost.c_r
    rate = charge / horizon
    if refreshes > 1:
        mean_cycle = csum / refreshes
        var_cycle = max(0.0, (csumsq - refreshes * mean_cycle**2) / (refreshes - 1))
        # Var N(t) ~ t * var / tau^3 for a renewal process
        stderr = n * cost.c_r * math.sqrt(var_cycle * horizon / mean_cycle**3) / horizon
    else:
        mean_cycle = float(csum) if refreshes else float("nan")
        stderr = float("nan")
    return LedgerResult(
        rate=rate,
        stderr=stderr,
        refreshes=refreshes,
        horizon=horizon,
        mean_cycle=mean_cycle,
    )
