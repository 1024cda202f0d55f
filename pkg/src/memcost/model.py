"""Physical model of a small dipole memory block.

A block is a set of n dipoles on a weighted coupling graph. Each dipole is
a two-state spin; the block stores one pattern written at t=0 and degrades
under single-site heat-bath (Glauber) dynamics: per update step one dipole
is picked uniformly at random and flipped with probability 1/(1+e^{beta*dE}).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class Topology:
    """Dipole count plus weighted coupling edges (i, j, strength)."""

    n: int
    edges: tuple[tuple[int, int, float], ...] = ()

    @classmethod
    def isolated(cls) -> "Topology":
        return cls(1)

    @classmethod
    def uncoupled3(cls) -> "Topology":
        return cls(3)

    @classmethod
    def line3(cls, s_f: float) -> "Topology":
        s_f = float(s_f)
        return cls(3, ((0, 1, s_f), (1, 2, s_f)))

    @classmethod
    def triangle3(cls, s_f: float) -> "Topology":
        s_f = float(s_f)
        return cls(3, ((0, 1, s_f), (1, 2, s_f), (0, 2, s_f)))

    def neighbors(self, i: int) -> list[tuple[int, float]]:
        """Neighbors of dipole i with their coupling strengths."""
        out = []
        for a, b, s in self.edges:
            if a == i:
                out.append((b, s))
            elif b == i:
                out.append((a, s))
        return out


@dataclass(frozen=True)
class SystemSpec:
    """A concrete block: topology, external field, inverse temperature, pattern.

    ``stored_pattern`` is the bit vector written at t=0 (bit 1 = spin up);
    defaults to all ones, the field-aligned pattern assumed by the named
    scenarios.
    """

    topology: Topology
    h: float = 0.0
    beta: float = 1.0
    stored_pattern: tuple[int, ...] | None = None

    @property
    def n(self) -> int:
        return self.topology.n

    def pattern_spins(self) -> np.ndarray:
        """Stored pattern as +/-1 spins (+1 for bit 1)."""
        if self.stored_pattern is None:
            return np.ones(self.n, dtype=np.int64)
        return np.array([1 if b else -1 for b in self.stored_pattern], dtype=np.int64)

    def complemented(self) -> "SystemSpec":
        """Same block with the stored pattern bit-complemented."""
        if self.stored_pattern is None:
            pat = tuple(0 for _ in range(self.n))
        else:
            pat = tuple(0 if b else 1 for b in self.stored_pattern)
        return SystemSpec(self.topology, self.h, self.beta, pat)


@dataclass(frozen=True)
class SpinState:
    """Block state as a wrong-mask: bit i set iff dipole i disagrees with the pattern."""

    wrong_mask: int
    n: int

    @classmethod
    def all_correct(cls, n: int) -> "SpinState":
        return cls(0, n)

    def flipped(self, i: int) -> "SpinState":
        return SpinState(self.wrong_mask ^ (1 << i), self.n)

    def wrong_count(self) -> int:
        return bin(self.wrong_mask).count("1")

    def spins(self, spec: SystemSpec) -> np.ndarray:
        """Actual +/-1 spin values given the stored pattern."""
        pat = spec.pattern_spins()
        correct = np.array(
            [-1 if (self.wrong_mask >> i) & 1 else 1 for i in range(self.n)],
            dtype=np.int64,
        )
        return pat * correct


def validate(spec: SystemSpec) -> None:
    """Raise ValidationError on the first violated invariant."""
    topo = spec.topology
    if topo.n < 1:
        raise ValidationError(f"dipole count must be positive, got {topo.n}")
    seen = set()
    for a, b, s in topo.edges:
        if a == b:
            raise ValidationError(f"self-loop on dipole {a}")
        if not (0 <= a < topo.n and 0 <= b < topo.n):
            raise ValidationError(f"edge ({a},{b}) out of range for n={topo.n}")
        key = (min(a, b), max(a, b))
        if key in seen:
            raise ValidationError(f"duplicate edge {key}")
        seen.add(key)
        if not math.isfinite(s):
            raise ValidationError(f"non-finite coupling on edge {key}")
    if not math.isfinite(spec.h):
        raise ValidationError("non-finite field")
    if not math.isfinite(spec.beta):
        raise ValidationError("non-finite beta")
    if spec.beta < 0:
        raise ValidationError(f"negative beta {spec.beta}")
    if spec.stored_pattern is not None:
        if len(spec.stored_pattern) != topo.n:
            raise ValidationError(
                f"pattern length {len(spec.stored_pattern)} != n={topo.n}"
            )
        if any(b not in (0, 1) for b in spec.stored_pattern):
            raise ValidationError("pattern bits must be 0 or 1")


def total_energy(spec: SystemSpec, state: SpinState) -> float:
    """Ising energy -H*sum(s_i) - sum_edges s_f*s_i*s_j over actual spins."""
    if state.n != spec.n:
        raise ValidationError(f"state length {state.n} != n={spec.n}")
    s = state.spins(spec)
    e = -spec.h * float(s.sum())
    for a, b, w in spec.topology.edges:
        e -= w * float(s[a] * s[b])
    return e


def delta_energy(spec: SystemSpec, state: SpinState, i: int) -> float:
    """Energy change from flipping dipole i, without re-evaluating the total."""
    if state.n != spec.n:
        raise ValidationError(f"state length {state.n} != n={spec.n}")
    if not (0 <= i < spec.n):
        raise ValidationError(f"dipole index {i} out of range for n={spec.n}")
    s = state.spins(spec)
    local = spec.h
    for j, w in spec.topology.neighbors(i):
        local += w * float(s[j])
    return 2.0 * float(s[i]) * local


def flip_probability(delta_e: float, beta: float) -> float:
    """Heat-bath acceptance 1/(1+e^{beta*dE}), overflow-safe."""
    x = beta * delta_e
    if x >= 0:
        e = math.exp(-x)
        return e / (1.0 + e)
    return 1.0 / (1.0 + math.exp(x))


def state_energies(spec: SystemSpec) -> np.ndarray:
    """Energies of all 2^n wrong-mask states, indexed by mask."""
    n = spec.n
    nstates = 1 << n
    masks = np.arange(nstates, dtype=np.int64)
    # spins[x, i] = actual spin of dipole i in state x
    correct = 1 - 2 * ((masks[:, None] >> np.arange(n)) & 1)
    spins = correct * spec.pattern_spins()[None, :]
    e = -spec.h * spins.sum(axis=1).astype(np.float64)
    for a, b, w in spec.topology.edges:
        e -= w * (spins[:, a] * spins[:, b]).astype(np.float64)
    return e
