"""Ergodic measures with computable pressure: Markov chains and periodic
orbits, plus a sampler sweeping the ergodic pressure spectrum.

The sampler combines three constructive families: all primitive cycles up
to a length cap (entropy zero, pressure = mean potential along the cycle),
the Gibbs-type chain built from the weighted Perron eigenvectors (attains
the topological pressure), and row-renormalized interpolations between the
two, whose stationary data is recomputed per grid point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import ShiftSystem, count_words, word_matrix
from .potentials import Potential
from .thermo import transfer_spectrum, pressure_floor, pressure_oracle, _Lift
from .errors import ConfigError, StructuralError

STOCHASTIC_TOL = 1e-12
MERGE_TOL = 1e-12


def _stationary(Q: np.ndarray, tol: float = 1e-12, maxiter: int = 200_000) -> np.ndarray:
    """Stationary row vector of a stochastic matrix restricted to its
    recurrent support. The lazy half-step kills periodicity without moving
    the fixed point."""
    V = Q.shape[0]
    M = 0.5 * (Q.T + np.eye(V))
    pi = np.ones(V) / V
    for _ in range(maxiter):
        new = M @ pi
        s = new.sum()
        if s <= 0:
            raise StructuralError("stochastic matrix has no recurrent mass")
        new /= s
        if np.abs(new - pi).max() < tol:
            return new
        pi = new
    return pi


class MarkovMeasure:
    """Row-stochastic chain supported inside the transition structure."""

    def __init__(self, sys: ShiftSystem, stochastic, stationary=None):
        Q = np.asarray(stochastic, dtype=float)
        A = sys.alphabet_size
        if Q.shape != (A, A):
            raise ConfigError(f"stochastic matrix must be {A}x{A}, got {Q.shape}")
        if (Q < 0).any():
            raise ConfigError("stochastic matrix has negative entries")
        rowsum = Q.sum(axis=1)
        if np.abs(rowsum - 1.0).max() > 1e-9:
            raise ConfigError(f"rows must sum to 1, worst deviation {np.abs(rowsum-1).max():.3g}")
        if ((Q > 0) & ~sys.transitions).any():
            raise ConfigError("chain puts mass on a forbidden transition")
        self.sys = sys
        self.stochastic = Q / rowsum[:, None]
        if stationary is None:
            self.stationary = _stationary(self.stochastic)
        else:
            pi = np.asarray(stationary, dtype=float)
            if pi.shape != (A,) or (pi < -STOCHASTIC_TOL).any() or abs(pi.sum() - 1) > 1e-9:
                raise ConfigError("stationary vector must be a probability vector")
            if np.abs(pi @ self.stochastic - pi).max() > 1e-8:
                raise ConfigError("stationary vector is not invariant for the chain")
            self.stationary = np.clip(pi, 0, None) / np.clip(pi, 0, None).sum()

    @classmethod
    def bernoulli(cls, sys: ShiftSystem, probs) -> "MarkovMeasure":
        p = np.asarray(probs, dtype=float)
        Q = np.tile(p, (sys.alphabet_size, 1))
        return cls(sys, Q)


class PeriodicOrbitMeasure:
    """Equidistribution on the orbit of a primitive cycle word."""

    def __init__(self, sys: ShiftSystem, cycle):
        w = tuple(int(s) for s in cycle)
        p = len(w)
        if p < 1:
            raise ConfigError("cycle must be nonempty")
        for k in range(p):
            if not sys.transitions[w[k], w[(k + 1) % p]]:
                raise ConfigError(f"cycle {w} is not admissible at position {k}")
        for d in range(1, p):
            if p % d == 0 and w == w[:d] * (p // d):
                raise ConfigError(f"cycle {w} is a power of the shorter cycle {w[:d]}")
        self.sys = sys
        self.cycle = w

    @property
    def period(self) -> int:
        return len(self.cycle)


def markov_entropy(mu: MarkovMeasure) -> float:
    """Entropy rate -sum_a pi_a sum_b Q[ab] ln Q[ab] (0 ln 0 = 0)."""
    Q = mu.stochastic
    pi = mu.stationary
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(Q > 0, Q * np.log(Q), 0.0)
    return float(-(pi @ terms.sum(axis=1)))


def _markov_integral(sys: ShiftSystem, phi: Potential, mu: MarkovMeasure) -> float:
    """integral of phi: sum over admissible memory-words of mu(cylinder) * phi."""
    m = phi.memory
    total = 0.0
    for w, v in phi.table.items():
        prob = mu.stationary[w[0]]
        for k in range(m - 1):
            prob *= mu.stochastic[w[k], w[k + 1]]
        total += prob * v
    return total


def measure_pressure(sys: ShiftSystem, phi: Potential, mu) -> float:
    """h_mu + integral(phi) for a Markov chain; mean of phi along the cycle
    (entropy zero) for a periodic-orbit measure."""
    if isinstance(mu, MarkovMeasure):
        return markov_entropy(mu) + _markov_integral(sys, phi, mu)
    if isinstance(mu, PeriodicOrbitMeasure):
        w = mu.cycle
        p = len(w)
        ext = w * (1 + (phi.memory + p - 2) // p)
        return math.fsum(phi.table[tuple(ext[k : k + phi.memory])] for k in range(p)) / p
    raise ConfigError(f"unsupported measure type {type(mu).__name__}")


# ---------------------------------------------------------------------------
# chains on the memory lift (used for memory >= 2 potentials)
# ---------------------------------------------------------------------------

@dataclass
class _LiftChain:
    """Markov chain on the transfer-lift states with its pressure data."""

    lift: _Lift
    Q: np.ndarray
    pi: np.ndarray

    def entropy(self) -> float:
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(self.Q > 0, self.Q * np.log(self.Q), 0.0)
        return float(-(self.pi @ terms.sum(axis=1)))

    def integral(self) -> float:
        total = 0.0
        for i, w in enumerate(self.lift.states):
            for j, b in self.lift.transitions[i]:
                if self.Q[i, j] > 0:
                    total += self.pi[i] * self.Q[i, j] * self.lift.window_value(w, b)
        return total

    def pressure(self) -> float:
        return self.entropy() + self.integral()


def gibbs_chain(sys: ShiftSystem, phi: Potential, tol: float = 1e-13) -> _LiftChain:
    """Chain built from the weighted Perron eigenvectors; its pressure equals
    the topological pressure (exactly for the lift, to eigen-precision here)."""
    _, lift, right, _left, _ = transfer_spectrum(sys, phi, tol=tol)
    L = lift.weighted_matrix(shift=phi.max_value)
    lam = float(right @ (L @ right)) / float(right @ right)
    V = len(lift.states)
    Q = np.zeros((V, V))
    for i in range(V):
        for j, _b in lift.transitions[i]:
            Q[i, j] = L[i, j] * right[j] / (lam * right[i])
    Q /= Q.sum(axis=1, keepdims=True)
    return _LiftChain(lift=lift, Q=Q, pi=_stationary(Q))


def _cycle_lift_chain(lift: _Lift, cycle: tuple) -> np.ndarray:
    """Empirical transition frequencies of the cycle read on lift states."""
    c = lift.context
    p = len(cycle)
    ext = cycle * (2 + c // p)
    V = len(lift.states)
    counts = np.zeros((V, V))
    for k in range(p):
        u = lift.index[tuple(ext[k : k + c])]
        v = lift.index[tuple(ext[k + 1 : k + 1 + c])]
        counts[u, v] += 1.0
    rows = counts.sum(axis=1, keepdims=True)
    with np.errstate(invalid="ignore"):
        Q = np.where(rows > 0, counts / np.where(rows > 0, rows, 1.0), 0.0)
    return Q


def primitive_cycles(sys: ShiftSystem, max_len: int, budget: int = 2_000_000):
    """All primitive cycles up to the length cap, canonical rotation only.

    Returns (cycles, truncated): truncated is the first length whose word
    count exceeded the budget, or None.
    """
    cycles = []
    for p in range(1, max_len + 1):
        if count_words(sys, p) > budget:
            return cycles, p
        words = word_matrix(sys, p, budget)
        wrap_ok = sys.transitions[words[:, -1].astype(np.intp), words[:, 0].astype(np.intp)]
        for row in words[wrap_ok]:
            w = tuple(int(s) for s in row)
            rots = [w[k:] + w[:k] for k in range(p)]
            if w != min(rots):
                continue
            if any(p % d == 0 and w == w[:d] * (p // d) for d in range(1, p)):
                continue
            cycles.append(w)
    return cycles, None


@dataclass
class SpectrumEntry:
    kind: str
    parameter: str
    entropy: float
    integral: float
    pressure: float


@dataclass
class SpectrumResult:
    entries: list
    values: list
    floor: float
    ceiling: float
    max_gap: float
    partial: bool
    notes: list = field(default_factory=list)


def spectrum_sample(
    sys: ShiftSystem,
    phi: Potential,
    cycle_cap: int = 8,
    grid: int = 20,
    max_measures: int = 50_000,
    budget: int = 2_000_000,
) -> SpectrumResult:
    """Sample the ergodic pressure spectrum.

    Emits every primitive cycle up to the cap, the Gibbs chain, and the
    row-renormalized interpolation from the Gibbs chain toward each cycle's
    empirical chain over a `grid`-point parameter grid in [0, 1). Pressures
    within 1e-12 are merged in the deduplicated value list. Exceeding a
    budget flags the result as partial rather than failing.
    """
    sys.require_strongly_connected()
    if cycle_cap > 12:
        raise ConfigError("cycle length cap is limited to 12")
    notes = []
    partial = False

    floor = pressure_floor(sys, phi)
    ceiling = pressure_oracle(sys, phi).value

    entries = []
    chain = gibbs_chain(sys, phi)
    entries.append(
        SpectrumEntry(
            kind="gibbs",
            parameter="",
            entropy=chain.entropy(),
            integral=chain.integral(),
            pressure=chain.pressure(),
        )
    )

    cycles, truncated_at = primitive_cycles(sys, cycle_cap, budget)
    if truncated_at is not None:
        partial = True
        notes.append(f"cycle enumeration stopped before length {truncated_at} (budget)")

    lift = chain.lift
    for w in cycles:
        mu = PeriodicOrbitMeasure(sys, w)
        p_cycle = measure_pressure(sys, phi, mu)
        entries.append(
            SpectrumEntry(
                kind="cycle",
                parameter="".join(map(str, w)),
                entropy=0.0,
                integral=p_cycle,
                pressure=p_cycle,
            )
        )
        if len(entries) >= max_measures:
            partial = True
            notes.append("measure count budget reached during cycle sweep")
            break
        Qc = _cycle_lift_chain(lift, w)
        # uniform steps toward the deterministic end produce pressure jumps
        # ~ H(eps) there; the squared ramp equalizes the jump sizes
        ts = 1.0 - (1.0 - np.arange(1, grid) / grid) ** 2
        for t in ts:
            Q = (1.0 - t) * chain.Q + t * Qc
            rows = Q.sum(axis=1, keepdims=True)
            Q = Q / rows
            pi = _stationary(Q)
            mixed = _LiftChain(lift=lift, Q=Q, pi=pi)
            entries.append(
                SpectrumEntry(
                    kind="interp",
                    parameter=f"{''.join(map(str, w))}:{t:.6f}",
                    entropy=mixed.entropy(),
                    integral=mixed.integral(),
                    pressure=mixed.pressure(),
                )
            )
            if len(entries) >= max_measures:
                partial = True
                notes.append("measure count budget reached during interpolation")
                break
        if len(entries) >= max_measures:
            break

    entries.sort(key=lambda e: (e.pressure, e.kind, e.parameter))
    values = []
    for e in entries:
        if not values or e.pressure - values[-1] > MERGE_TOL:
            values.append(e.pressure)

    anchors = sorted(set(values) | {floor, ceiling})
    inside = [v for v in anchors if floor - 1e-12 <= v <= ceiling + 1e-12]
    max_gap = max(
        (b - a for a, b in zip(inside, inside[1:])), default=ceiling - floor
    )
    return SpectrumResult(
        entries=entries,
        values=values,
        floor=floor,
        ceiling=ceiling,
        max_gap=max_gap,
        partial=partial,
        notes=notes,
    )
