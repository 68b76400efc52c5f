"""Partition functions, pressure estimators, the transfer-operator oracle,
potential variation bounds, and the expansivity obstruction report.

Two independent routes to pressure are kept side by side:

* `pressure_enumerate` evaluates the finite-n partition function Theta
  exactly (explicit word enumeration for arbitrary segment classes, an
  exact transfer recursion for the unrestricted class) and reports the
  growth sequence (1/n) ln Theta with its spread;
* `pressure_oracle` computes ln of the dominant eigenvalue of the weighted
  transfer matrix by power iteration.

All values are in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import gcd

import numpy as np

from .core import ShiftSystem, Resolution, count_words, word_matrix, DEFAULT_WORD_BUDGET
from .potentials import Potential, birkhoff_batch, variation
from .segments import SegmentClass
from .errors import ConfigError, PreconditionError, ResourceBudgetError
from . import kernels

NEG_INF = float("-inf")


@dataclass
class PressureReport:
    """A pressure value with its provenance.

    error_bound is the Rayleigh-quotient log spread for oracle reports and
    the spread of (1/n) ln Theta over the top half of the sampled range for
    enumeration reports; math.inf encodes "unbounded".
    """

    value: float
    method: str
    params: dict
    error_bound: float
    extras: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "value": self.value,
            "method": self.method,
            "params": self.params,
            "error_bound": "unbounded" if math.isinf(self.error_bound) else self.error_bound,
            "extras": {
                k: v for k, v in self.extras.items() if not isinstance(v, np.ndarray)
            },
        }


def log_sum_exp(values) -> float:
    vals = [v for v in values if v != NEG_INF]
    if not vals:
        return NEG_INF
    mx = max(vals)
    return mx + math.log(math.fsum(math.exp(v - mx) for v in vals))


def _row_group_ids(mat: np.ndarray):
    """Group identical rows; returns (n_groups, inverse index per row)."""
    _, inverse = np.unique(mat, axis=0, return_inverse=True)
    return int(inverse.max()) + 1, inverse.reshape(-1)


# ---------------------------------------------------------------------------
# context-state machinery for the transfer recursion
# ---------------------------------------------------------------------------

class _Lift:
    """States are admissible words of length max(memory-1, 1); appending a
    symbol steps the state and, when a full memory window closes, applies phi."""

    def __init__(self, sys: ShiftSystem, phi: Potential):
        self.sys = sys
        self.phi = phi
        self.context = max(phi.memory - 1, 1)
        self.states = [tuple(int(s) for s in row) for row in word_matrix(sys, self.context)]
        self.index = {w: i for i, w in enumerate(self.states)}
        # transitions[i] = list of (j, new_symbol)
        self.transitions = []
        for w in self.states:
            row = []
            for b in range(sys.alphabet_size):
                if sys.transitions[w[-1], b]:
                    nxt = (w + (b,))[-self.context:]
                    row.append((self.index[nxt], b))
            self.transitions.append(row)

    def window_value(self, state_word, b) -> float:
        """phi of the memory window ending at the appended symbol b."""
        m = self.phi.memory
        if m == 1:
            return self.phi.table[(b,)]
        return self.phi.table[state_word[-(m - 1):] + (b,)]

    def initial_window_values(self, n: int):
        """Per-state sum of the windows fully inside the first `context` symbols
        (only nonempty for memory 1, where the leading symbol carries a window)."""
        m = self.phi.memory
        out = np.zeros(len(self.states))
        for i, w in enumerate(self.states):
            total = 0.0
            for k in range(min(n, self.context - m + 1)):
                total += self.phi.table[w[k : k + m]]
            out[i] = total
        return out

    def weighted_matrix(self, shift: float = 0.0) -> np.ndarray:
        """Transfer matrix L[i][j] = exp(phi(window) - shift) on allowed steps."""
        V = len(self.states)
        L = np.zeros((V, V))
        for i, w in enumerate(self.states):
            for j, b in self.transitions[i]:
                L[i, j] = math.exp(self.window_value(w, b) - shift)
        return L

    def edge_list(self):
        """(src, dst, phi-weight) arrays for cycle-mean computations."""
        src, dst, wgt = [], [], []
        for i, w in enumerate(self.states):
            for j, b in self.transitions[i]:
                src.append(i)
                dst.append(j)
                wgt.append(self.window_value(w, b))
        return (
            np.array(src, dtype=np.int64),
            np.array(dst, dtype=np.int64),
            np.array(wgt, dtype=np.float64),
        )


def _graph_period(adj: np.ndarray) -> int:
    """gcd of cycle lengths of a strongly connected boolean digraph."""
    V = adj.shape[0]
    depth = {0: 0}
    frontier = [0]
    while frontier:
        nxt = []
        for u in frontier:
            for v in np.nonzero(adj[u])[0]:
                v = int(v)
                if v not in depth:
                    depth[v] = depth[u] + 1
                    nxt.append(v)
        frontier = nxt
    g = 0
    for u in range(V):
        for v in np.nonzero(adj[u])[0]:
            g = gcd(g, depth[u] + 1 - depth[int(v)])
    return abs(g) if g else 1


def perron_log(L: np.ndarray, tol: float = 1e-12, maxiter: int = 10**6):
    """ln of the dominant eigenvalue of a nonnegative matrix with strongly
    connected support, by power iteration from the all-ones vector.

    Periodic support is handled by iterating the period-th power, which is
    primitive on each cyclic class; the report flags it. Returns
    (log_lambda, right_vector, info dict).
    """
    V = L.shape[0]
    period = _graph_period(L > 0)
    x = np.ones(V) / math.sqrt(V)
    prev = None
    spread = math.inf
    steps = 0
    max_outer = max(2, maxiter // max(period, 1))
    converged = False
    for _ in range(max_outer):
        y = x
        for _ in range(period):
            y = L @ y
        rayleigh = float(x @ y)
        steps += 1
        if rayleigh <= 0:
            raise PreconditionError("power iteration collapsed; matrix support not strongly connected?")
        log_lam = math.log(rayleigh) / period
        if prev is not None:
            spread = abs(log_lam - prev)
            if spread < tol:
                converged = True
                x = y / np.linalg.norm(y)
                break
        prev = log_lam
        x = y / np.linalg.norm(y)
    info = {
        "period": period,
        "iterations": steps,
        "converged": converged,
        "periodic_fallback": period > 1,
        "residual": spread,
    }
    if not converged:
        # Cesaro fallback over one period of Rayleigh quotients
        logs = []
        for _ in range(max(period, 1)):
            y = L @ x
            r = float(x @ y)
            logs.append(math.log(r) if r > 0 else NEG_INF)
            x = y / np.linalg.norm(y)
        log_lam = float(np.mean(logs))
        info["nonconvergent_average"] = True
    return log_lam, x, info


def transfer_spectrum(sys: ShiftSystem, phi: Potential, tol: float = 1e-12):
    """(log lambda, lift, right eigvec, left eigvec, info) of the weighted lift."""
    sys.require_strongly_connected()
    lift = _Lift(sys, phi)
    shift = phi.max_value
    L = lift.weighted_matrix(shift=shift)
    log_lam, right, info = perron_log(L, tol=tol)
    _, left, _ = perron_log(L.T, tol=tol)
    return log_lam + shift, lift, right, left, info


# ---------------------------------------------------------------------------
# partition function
# ---------------------------------------------------------------------------

def partition_function(
    sys: ShiftSystem,
    phi: Potential,
    seg: SegmentClass,
    n: int,
    delta: Resolution,
    eps: Resolution | None = None,
    budget: int | None = DEFAULT_WORD_BUDGET,
) -> float:
    """ln Theta(seg, phi, n, delta, eps).

    A maximal (n, delta)-separated set is the family of admissible words of
    length n + delta.level - 1 meeting the class; the supremum picks, per
    cylinder, the member maximizing the (eps-smeared) length-n Birkhoff sum.
    For the unrestricted class an exact transfer recursion replaces explicit
    enumeration, which keeps large n and alphabets feasible; general classes
    enumerate under the word budget and never truncate silently.
    """
    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n}")
    if seg.kind == "empty":
        return NEG_INF
    m = phi.memory
    l_sep = delta.level
    l_eps = eps.level if eps is not None else None
    L_sep = n + l_sep - 1
    L_eval = n + max(m, l_sep, l_eps or 1) - 1

    if seg.kind == "all" and (l_eps is None or l_eps >= m) and L_sep >= max(m - 1, 1):
        return _partition_all_dp(sys, phi, n, L_sep)

    total = count_words(sys, L_eval)
    if budget is not None and total > budget:
        raise ResourceBudgetError(
            f"partition function at n={n} needs {total} words of length {L_eval}, "
            f"budget is {budget}",
            n=n,
        )
    words = word_matrix(sys, L_eval, budget)
    if words.shape[0] == 0:
        return NEG_INF
    phis = birkhoff_batch(phi, words, n)
    member = seg.batch(words, n)
    if not member.any():
        return NEG_INF

    if l_eps is not None:
        # smearing: the ball around x is unrestricted by the class
        ball_len = n + l_eps - 1
        n_ball, ball_ids = _row_group_ids(words[:, :ball_len])
        ball_max = np.full(n_ball, NEG_INF)
        np.maximum.at(ball_max, ball_ids, phis)
        values = ball_max[ball_ids]
    else:
        values = phis

    # per separation cylinder: best class member
    n_sep, sep_ids = _row_group_ids(words[:, :L_sep])
    cyl_best = np.full(n_sep, NEG_INF)
    np.maximum.at(cyl_best, sep_ids[member], values[member])
    return log_sum_exp(cyl_best[cyl_best > NEG_INF])


def _partition_all_dp(sys: ShiftSystem, phi: Potential, n: int, L_sep: int) -> float:
    """Exact ln Theta for the unrestricted class via the transfer recursion.

    Weights are shifted by max phi so the running vector stays bounded by
    the word count; the shift is restored at the end. When the memory
    window outruns the separation cylinder (memory > delta level), the
    remaining windows are resolved by a per-state best-extension tail.
    """
    lift = _Lift(sys, phi)
    m = phi.memory
    c = lift.context
    shift = phi.max_value
    if m == 1:
        vec = np.exp(lift.initial_window_values(n) - shift)
        applied = 1
    else:
        vec = np.ones(len(lift.states))
        applied = 0
    for j in range(c, L_sep):
        k = j - m + 1
        use_phi = 0 <= k < n
        new = np.zeros_like(vec)
        for i, row in enumerate(lift.transitions):
            if vec[i] == 0.0:
                continue
            w = lift.states[i]
            for jdx, b in row:
                wgt = math.exp(lift.window_value(w, b) - shift) if use_phi else 1.0
                new[jdx] += vec[i] * wgt
        vec = new
        if use_phi:
            applied += 1
    extra = n - applied
    if extra > 0:
        # best shifted window-sum over length-`extra` extensions starting at
        # each boundary state (all remaining windows close during them)
        tail = np.zeros(len(lift.states))
        for _ in range(extra):
            new_tail = np.full(len(lift.states), NEG_INF)
            for i, row in enumerate(lift.transitions):
                w = lift.states[i]
                for jdx, b in row:
                    if tail[jdx] == NEG_INF:
                        continue
                    cand = (lift.window_value(w, b) - shift) + tail[jdx]
                    if cand > new_tail[i]:
                        new_tail[i] = cand
            tail = new_tail
        total = float(vec @ np.exp(tail))
    else:
        total = float(vec.sum())
    if total <= 0:
        return NEG_INF
    return math.log(total) + shift * n


def pressure_enumerate(
    sys: ShiftSystem,
    phi: Potential,
    seg: SegmentClass,
    delta: Resolution,
    eps: Resolution | None,
    n_range: tuple,
    budget: int | None = DEFAULT_WORD_BUDGET,
) -> PressureReport:
    """Finite-range pressure estimate with the spread over the top half of
    the range as the error bound.

    The reported value is the least of (1/n) ln Theta over the sampled
    range: the partition function is submultiplicative for finite-memory
    potentials, so every sampled quotient upper-bounds the limiting growth
    rate and the least one is the tightest finite-n proxy. It also makes
    the estimate monotonically improve as n_max grows.
    """
    n_min, n_max = n_range
    if n_min < 2 or n_max < n_min:
        raise ConfigError(f"n_range must satisfy 2 <= n_min <= n_max, got {n_range}")
    ns = list(range(n_min, n_max + 1))
    seq = []
    for n in ns:
        logtheta = partition_function(sys, phi, seg, n, delta, eps, budget)
        seq.append(logtheta / n if logtheta != NEG_INF else NEG_INF)
    value = min(a for a in seq if a != NEG_INF) if any(a != NEG_INF for a in seq) else NEG_INF
    top = seq[len(seq) // 2 :]
    finite_top = [a for a in top if a != NEG_INF]
    if value == NEG_INF:
        error = 0.0
    elif len(finite_top) == len(top):
        error = max(finite_top) - min(finite_top)
    else:
        error = math.inf
    return PressureReport(
        value=value,
        method="enumeration",
        params={
            "n_min": n_min,
            "n_max": n_max,
            "delta_level": delta.level,
            "eps_level": eps.level if eps is not None else 0,
        },
        error_bound=error,
        extras={"sequence": seq, "class": seg.description},
    )


def pressure_oracle(sys: ShiftSystem, phi: Potential, tol: float = 1e-12) -> PressureReport:
    """Topological pressure as ln of the dominant transfer eigenvalue."""
    log_lam, lift, _, _, info = transfer_spectrum(sys, phi, tol=tol)
    return PressureReport(
        value=log_lam,
        method="oracle",
        params={"memory": phi.memory, "states": len(lift.states), "tol": tol},
        error_bound=info["residual"] if info["converged"] else math.inf,
        extras=info,
    )


# ---------------------------------------------------------------------------
# maximal Birkhoff averages
# ---------------------------------------------------------------------------

def pressure_floor(sys: ShiftSystem, phi: Potential) -> float:
    """liminf_n sup_x (1/n) * (n-step Birkhoff sum): the floor of the ergodic
    pressure interval. For finite-memory potentials on a transitive SFT this
    equals the maximum mean cycle weight of the weighted lift, computed by
    Karp's dynamic program."""
    sys.require_strongly_connected()
    lift = _Lift(sys, phi)
    src, dst, wgt = lift.edge_list()
    return float(kernels.karp_kernel(len(lift.states), src, dst, wgt))


def birkhoff_sup(sys: ShiftSystem, phi: Potential, n: int) -> float:
    """sup over admissible words of the n-step Birkhoff sum (max-plus recursion)."""
    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n}")
    lift = _Lift(sys, phi)
    m = phi.memory
    c = lift.context
    best = lift.initial_window_values(n) if m == 1 else np.zeros(len(lift.states))
    applied = min(n, c) if m == 1 else 0
    j = c
    while applied < n:
        new = np.full(len(lift.states), NEG_INF)
        k = j - m + 1
        use_phi = 0 <= k < n
        for i, row in enumerate(lift.transitions):
            if best[i] == NEG_INF:
                continue
            w = lift.states[i]
            for jdx, b in row:
                cand = best[i] + (lift.window_value(w, b) if use_phi else 0.0)
                if cand > new[jdx]:
                    new[jdx] = cand
        best = new
        if use_phi:
            applied += 1
        j += 1
    return float(best.max())


def birkhoff_sup_sequence(sys: ShiftSystem, phi: Potential, n_max: int = 20):
    """The finite-n means sup_x (1/n) Phi(x, n), n = 1..n_max, reported next to
    the cycle value so a liminf/limit discrepancy would be visible."""
    return [birkhoff_sup(sys, phi, n) / n for n in range(1, n_max + 1)]


# ---------------------------------------------------------------------------
# Bowen-property bounds and expansivity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BowenBound:
    """Certified upper bound for the Birkhoff-sum variation over (n, eps)-balls
    on a segment class (segments up to n_cap), plus the exhaustively sampled
    maximum as a lower estimate. exact marks the locally-constant case where
    the bound is identically zero."""

    certified: float
    sampled: float
    exact: bool
    n_cap: int


def bowen_bound(
    sys: ShiftSystem,
    phi: Potential,
    seg: SegmentClass,
    eps: Resolution,
    n_cap: int = 6,
    budget: int | None = DEFAULT_WORD_BUDGET,
) -> BowenBound:
    if eps.level >= phi.memory:
        return BowenBound(certified=0.0, sampled=0.0, exact=True, n_cap=n_cap)
    var = variation(phi, eps)
    certified = n_cap * var
    sampled = 0.0
    if seg.kind != "empty":
        m = phi.memory
        for n in range(1, n_cap + 1):
            L = n + max(m, eps.level) - 1
            words = word_matrix(sys, L, budget)
            phis = birkhoff_batch(phi, words, n)
            member = seg.batch(words, n)
            if not member.any():
                continue
            ball_len = n + eps.level - 1
            n_grp, ids = _row_group_ids(words[:, :ball_len])
            grp_max = np.full(n_grp, NEG_INF)
            grp_min = np.full(n_grp, math.inf)
            np.maximum.at(grp_max, ids, phis)
            np.minimum.at(grp_min, ids, phis)
            mem_max = np.full(n_grp, NEG_INF)
            mem_min = np.full(n_grp, math.inf)
            np.maximum.at(mem_max, ids[member], phis[member])
            np.minimum.at(mem_min, ids[member], phis[member])
            occupied = mem_max > NEG_INF
            if occupied.any():
                d1 = (mem_max - grp_min)[occupied].max()
                d2 = (grp_max - mem_min)[occupied].max()
                sampled = max(sampled, float(d1), float(d2))
    return BowenBound(certified=certified, sampled=sampled, exact=False, n_cap=n_cap)


@dataclass(frozen=True)
class ExpansivityReport:
    h_star: float
    ne_empty: bool
    p_exp_bot: float


def expansivity_report(sys: ShiftSystem, eps: Resolution) -> ExpansivityReport:
    """One-sided subshifts are expansive below scale 1: if two points stay
    within 2^-level (level >= 1) under every shift, their symbols agree
    everywhere blockwise, so they are equal. The shadowing class of every
    point is trivial, no point obstructs expansivity, and the obstruction
    pressure is empty-supremum -inf."""
    if eps.level < 1:
        raise ConfigError("resolution level must be >= 1")
    return ExpansivityReport(h_star=0.0, ne_empty=True, p_exp_bot=NEG_INF)
