"""Construction of compact invariant subsystems with prescribed pressure.

Given a target alpha strictly between the pressure floor (max cycle mean)
and the topological pressure, the driver selects a set E of length-N core
words whose weight sum is pinned to the e^{N alpha} scale, then closes the
set of all connector-glued concatenations of E-words under the shift. The
resulting subsystem is materialized as a word-position presentation whose
dominant eigenvalue is computed exactly by a junction-renewal solve; its
pressure certifiably lands within eta0 of alpha.

Memory >= 2 potentials are handled by recoding to the block system, where
they become memory-1; reported quantities are mapped back.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    ShiftSystem,
    Resolution,
    count_words,
    word_matrix,
    word_str,
    DEFAULT_WORD_BUDGET,
)
from .potentials import Potential, birkhoff_batch, variation
from .segments import SegmentClass, OrbitDecomposition, affix_bounded, complement, union
from .gluing import GluingCertificate, check_gluing, glue_words
from .thermo import (
    PressureReport,
    partition_function,
    pressure_enumerate,
    pressure_oracle,
    pressure_floor,
    birkhoff_sup,
    bowen_bound,
    expansivity_report,
    log_sum_exp,
    NEG_INF,
)
from .errors import (
    ConfigError,
    InfeasibleError,
    PreconditionError,
    ResourceBudgetError,
)


@dataclass
class ConstructConfig:
    """Tunable knobs of the construction driver."""

    level_eps: int = 1
    level_gamma: int = 5
    level_delta: int = 7
    n_cap: int = 24
    c0_n_cap: int = 10
    affix_caps: tuple = (0, 1, 2, 4)
    budget: int = 6_000_000
    seed: int = 0
    enum_blocks: tuple = (2, 3, 4)
    exact_words_limit: int = 200_000

    def resolutions(self):
        if not (self.level_gamma >= self.level_eps + 4 and self.level_delta >= self.level_gamma + 2):
            raise ConfigError(
                "resolution levels must satisfy gamma >= eps + 4 and delta >= gamma + 2 "
                f"(got eps={self.level_eps}, gamma={self.level_gamma}, delta={self.level_delta}); "
                "this is the dyadic form of the strict scale ordering 16*delta < 8*gamma < eps"
            )
        return (
            Resolution(self.level_eps),
            Resolution(self.level_gamma),
            Resolution(self.level_delta),
        )


# ---------------------------------------------------------------------------
# memory-1 recoding
# ---------------------------------------------------------------------------

@dataclass
class _Recoding:
    base: ShiftSystem
    blocks: list  # recoded symbol -> base m-word

    def project_word(self, w) -> tuple:
        """Base word spelled by a recoded word (overlapping block decode)."""
        out = list(self.blocks[w[0]])
        for s in w[1:]:
            out.append(self.blocks[s][-1])
        return tuple(out)


def _recode_memory_one(sys: ShiftSystem, phi: Potential, dec: OrbitDecomposition):
    """Recode a memory-m potential to a memory-1 one on the m-block system.

    The block map is a conjugacy, so pressures, cycle means and the glued
    subsystem transfer exactly; decomposition membership is evaluated on the
    projected base words.
    """
    m = phi.memory
    if m == 1:
        return sys, phi, dec, None
    blocks = [tuple(int(s) for s in row) for row in word_matrix(sys, m)]
    index = {w: i for i, w in enumerate(blocks)}
    B = len(blocks)
    trans = np.zeros((B, B), dtype=bool)
    for i, u in enumerate(blocks):
        for b in range(sys.alphabet_size):
            if sys.transitions[u[-1], b]:
                j = index.get(u[1:] + (b,))
                if j is not None:
                    trans[i, j] = True
    sys_c = ShiftSystem(trans)
    phi_c = Potential(sys_c, 1, {(i,): phi.table[w] for i, w in enumerate(blocks)})
    rec = _Recoding(base=sys, blocks=blocks)

    def member_through(cls: SegmentClass) -> SegmentClass:
        if cls.kind in ("all", "empty"):
            return SegmentClass(cls.membership, cls.description, kind=cls.kind)
        return SegmentClass(
            lambda w, n: cls.membership(rec.project_word(w), n),
            f"recoded({cls.description})",
        )

    dec_c = OrbitDecomposition(
        base=member_through(dec.base),
        prefix_class=member_through(dec.prefix_class),
        core_class=member_through(dec.core_class),
        suffix_class=member_through(dec.suffix_class),
        split=lambda w, n: dec.split(rec.project_word(w), n),
        name=dec.name,
    )
    return sys_c, phi_c, dec_c, rec


# ---------------------------------------------------------------------------
# core word selection
# ---------------------------------------------------------------------------

def class_log_weight_sum(
    sys: ShiftSystem,
    phi: Potential,
    seg: SegmentClass,
    n: int,
    budget: int | None = DEFAULT_WORD_BUDGET,
) -> float:
    """ln of the sum of e^{Birkhoff(w, n)} over class words of length n.

    Only defined for memory-1 potentials (construction world)."""
    if phi.memory != 1:
        raise PreconditionError("class_log_weight_sum expects a memory-1 potential")
    if seg.kind == "empty":
        return NEG_INF
    if seg.kind == "all":
        return partition_function(sys, phi, seg, n, Resolution(1), None, budget)
    words = word_matrix(sys, n, budget)
    member = seg.batch(words, n)
    if not member.any():
        return NEG_INF
    phis = birkhoff_batch(phi, words[member], n)
    return log_sum_exp(phis.tolist())


def select_words(
    sys: ShiftSystem,
    phi: Potential,
    core: SegmentClass,
    alpha: float,
    eta: float,
    N: int,
    budget: int | None = DEFAULT_WORD_BUDGET,
):
    """Greedy selection of core words with pinned total weight.

    Orders candidates by descending weight (lexicographic tie-break) and
    keeps adding while the running sum is still <= e^{N(alpha-eta)}; the
    resulting total lies strictly between e^{N(alpha-eta)} and
    e^{N(alpha+eta)} provided no single word overshoots (checked) and the
    class carries enough weight (checked).
    Returns (word matrix, per-word Birkhoff sums, selection info).
    """
    if phi.memory != 1:
        raise PreconditionError("select_words expects a memory-1 potential")
    lower = N * (alpha - eta)
    upper = N * (alpha + eta)
    sup_phi = birkhoff_sup(sys, phi, N)
    if not sup_phi < lower:
        raise InfeasibleError(
            f"single-word weight bound fails: sup Birkhoff(x,{N}) = {sup_phi:.6f} "
            f">= N(alpha-eta) = {lower:.6f}",
            diagnostics=[("sup_birkhoff < N(alpha-eta)", sup_phi, lower)],
        )
    total_log = class_log_weight_sum(sys, phi, core, N, budget)
    if not total_log > upper:
        raise InfeasibleError(
            f"class weight too small: ln sum e^Birkhoff = {total_log:.6f} "
            f"<= N(alpha+eta) = {upper:.6f}",
            diagnostics=[("ln_total > N(alpha+eta)", total_log, upper)],
        )
    words = word_matrix(sys, N, budget)
    member = core.batch(words, N)
    words = words[member]
    phis = birkhoff_batch(phi, words, N)
    # descending weight, then lexicographic: lexsort uses the last key as primary
    keys = tuple(words[:, j] for j in range(N - 1, -1, -1)) + (-phis,)
    order = np.lexsort(keys)
    words = words[order]
    phis = phis[order]
    weights = np.exp(phis)
    cum = np.cumsum(weights)
    lo_val = math.exp(lower)
    hi_val = math.exp(upper)
    k = int(np.searchsorted(cum, lo_val, side="right")) + 1
    k = min(k, len(cum))
    total = float(cum[k - 1])
    if not (lo_val < total < hi_val):
        raise InfeasibleError(
            f"greedy sum {total:.6g} escaped the window ({lo_val:.6g}, {hi_val:.6g})",
            diagnostics=[("lower < sum < upper", lo_val, total)],
        )
    info = {
        "count": k,
        "log_sum": math.log(total),
        "target_low": lower,
        "target_high": upper,
    }
    return words[:k], phis[:k], info


# ---------------------------------------------------------------------------
# the glued subsystem
# ---------------------------------------------------------------------------

class GluedSubshift:
    """Shift-closure of all connector-glued concatenations of the chosen words.

    The presentation walks word positions (i, p) and connector positions;
    every bi-infinite walk spells an admissible base sequence, the spelled
    subshift is shift-invariant, and all pressure computations happen on
    this finite object. Cross edges at word boundaries factor through the
    (last symbol, first symbol) pair, which keeps every operation linear in
    the number of words rather than quadratic.
    """

    def __init__(self, sys: ShiftSystem, phi: Potential, words: np.ndarray, cert: GluingCertificate, params: dict | None = None):
        if phi.memory != 1:
            raise PreconditionError("GluedSubshift expects a memory-1 potential")
        words = np.asarray(words, dtype=np.uint8)
        if words.ndim != 2 or words.shape[0] == 0:
            raise ConfigError("the selected word set must be a nonempty matrix")
        self.sys = sys
        self.phi = phi
        self.words = words
        self.cert = cert
        self.params = dict(params or {})
        self.K, self.N = words.shape
        self.first = words[:, 0].astype(np.intp)
        self.last = words[:, -1].astype(np.intp)
        self.phis = birkhoff_batch(phi, words, self.N)
        A = sys.alphabet_size
        # connector data per ordered pair
        self.conn = {}
        for a in range(A):
            for b in range(A):
                c = cert.connector(a, b)
                if not all(
                    sys.transitions[x, y]
                    for x, y in zip((a,) + c + (b,), c + (b,))
                ):
                    raise ConfigError(f"certificate connector for ({a},{b}) is stale")
                self.conn[(a, b)] = c
        self.conn_phi = {
            pair: math.fsum(phi.table[(s,)] for s in c) for pair, c in self.conn.items()
        }
        self.tau = max(len(c) for c in self.conn.values())

    # -- junction renewal ---------------------------------------------------

    def _pair_log_weight(self):
        """logW[b][a'] = ln sum over words starting at b and ending at a'."""
        A = self.sys.alphabet_size
        logW = np.full((A, A), NEG_INF)
        for b in range(A):
            for a2 in range(A):
                sel = (self.first == b) & (self.last == a2)
                if sel.any():
                    logW[b, a2] = log_sum_exp(self.phis[sel].tolist())
        return logW

    def _junction_matrix(self, s: float, logW: np.ndarray) -> np.ndarray:
        A = self.sys.alphabet_size
        B = np.zeros((A, A))
        for a in range(A):
            for b in range(A):
                c = self.conn[(a, b)]
                steps = len(c) + self.N
                base = self.conn_phi[(a, b)] - s * steps
                for a2 in range(A):
                    if logW[b, a2] > NEG_INF:
                        # clamp: during bracket expansion the rate can be far
                        # off and the entry only needs to stay > 1
                        B[a, a2] += math.exp(min(base + logW[b, a2], 700.0))
        return B

    def log_pressure(self, tol: float = 1e-13):
        """ln of the dominant presentation eigenvalue via the renewal equation.

        The spectral radius of the junction-to-junction transfer with rate
        discount e^{-s per step} is strictly decreasing in s and crosses 1
        exactly at s = ln lambda; bisection pins it to `tol`.
        """
        logW = self._pair_log_weight()

        def rho(s):
            return float(np.abs(np.linalg.eigvals(self._junction_matrix(s, logW))).max())

        guess = float(log_sum_exp(self.phis.tolist()) / self.N)
        lo, hi = guess - 2.0, guess + 2.0
        for _ in range(200):
            if rho(lo) > 1.0:
                break
            lo -= 2.0
        for _ in range(200):
            if rho(hi) < 1.0:
                break
            hi += 2.0
        if not (rho(lo) > 1.0 > rho(hi)):
            raise PreconditionError("failed to bracket the presentation eigenvalue")
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if rho(mid) >= 1.0:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi), hi - lo

    # -- finite-window partition sums ----------------------------------------

    def _symbol_weights(self, shift: float) -> np.ndarray:
        A = self.sys.alphabet_size
        return np.exp(
            np.array([self.phi.table[(a,)] for a in range(A)]) - shift
        )

    def log_theta(self, n: int, level: int, anchored: bool) -> float:
        """ln Theta over presentation paths: windows of n weighted symbols plus
        level-1 trailing symbols. Paths are counted, not spelled words, so
        phase-ambiguous spellings may be counted more than once; reports flag
        this. anchored=True restricts windows to start at word starts."""
        L = n + level - 1
        shift = self.phi.max_value
        wsym = self._symbol_weights(shift)
        A = self.sys.alphabet_size
        word_w = wsym[self.words.astype(np.intp)]  # (K, N) per-position weights
        word_1 = np.ones_like(word_w)
        conn_w = {p: wsym[np.array(c, dtype=np.intp)] if c else np.empty(0) for p, c in self.conn.items()}
        conn_1 = {p: np.ones(len(c)) for p, c in self.conn.items()}

        if anchored:
            x_word = np.zeros((self.K, self.N))
            x_word[:, 0] = word_w[:, 0]
            x_conn = {p: np.zeros(len(c)) for p, c in self.conn.items()}
        else:
            x_word = word_w.copy()
            x_conn = {p: conn_w[p].copy() for p in self.conn}

        for t in range(1, L):
            weighted = t < n
            ww = word_w if weighted else word_1
            cw = conn_w if weighted else conn_1
            end_mass = np.bincount(self.last, weights=x_word[:, self.N - 1], minlength=A)
            inflow = np.zeros(A)
            new_conn = {}
            for (a, b), c in self.conn.items():
                arr = x_conn[(a, b)]
                if len(c) == 0:
                    inflow[b] += end_mass[a]
                    new_conn[(a, b)] = arr
                    continue
                out = np.empty(len(c))
                out[0] = end_mass[a] * cw[(a, b)][0]
                if len(c) > 1:
                    out[1:] = arr[:-1] * cw[(a, b)][1:]
                inflow[b] += arr[-1]
                new_conn[(a, b)] = out
            new_word = np.zeros_like(x_word)
            new_word[:, 1:] = x_word[:, :-1] * ww[:, 1:]
            new_word[:, 0] = inflow[self.first] * ww[:, 0]
            x_word = new_word
            x_conn = new_conn

        total = float(x_word.sum()) + float(sum(arr.sum() for arr in x_conn.values()))
        if total <= 0:
            return NEG_INF
        return math.log(total) + shift * n

    def _explicit_successors(self):
        """Vertex table of the presentation (small systems only): per-vertex
        spelled symbol and successor ids. Word positions come first, then
        connector chain positions."""
        if getattr(self, "_succ_cache", None) is not None:
            return self._succ_cache
        A = self.sys.alphabet_size
        n_word = self.K * self.N
        conn_base = {}
        off = n_word
        for pair, c in sorted(self.conn.items()):
            conn_base[pair] = off
            off += len(c)
        sym = np.empty(off, dtype=np.intp)
        for i in range(self.K):
            sym[i * self.N : (i + 1) * self.N] = self.words[i].astype(np.intp)
        for pair, c in self.conn.items():
            for q, s in enumerate(c):
                sym[conn_base[pair] + q] = s
        succ = [[] for _ in range(off)]
        starts_by_first = {b: np.nonzero(self.first == b)[0] for b in range(A)}
        for i in range(self.K):
            for p in range(self.N - 1):
                succ[i * self.N + p].append(i * self.N + p + 1)
            a = int(self.last[i])
            end = i * self.N + self.N - 1
            for b in range(A):
                c = self.conn[(a, b)]
                if len(c) == 0:
                    for j in starts_by_first[b]:
                        succ[end].append(int(j) * self.N)
                else:
                    succ[end].append(conn_base[(a, b)])
        for (a, b), c in self.conn.items():
            if len(c) == 0:
                continue
            base = conn_base[(a, b)]
            for q in range(len(c) - 1):
                succ[base + q].append(base + q + 1)
            for j in starts_by_first[b]:
                succ[base + len(c) - 1].append(int(j) * self.N)
        self._succ_cache = (sym, succ)
        return self._succ_cache

    def word_theta(self, n: int, level: int, anchored: bool = False, state_cap: int = 100_000) -> float:
        """Exact ln Theta over distinct spelled words, by a weighted subset
        (follower-set) recursion: every word corresponds to one chain of
        vertex sets, so phase-ambiguous spellings are counted once. Intended
        for small selections; raises when the follower-set family explodes."""
        sym, succ = self._explicit_successors()
        L = n + level - 1
        shift = self.phi.max_value
        wsym = self._symbol_weights(shift)
        A = self.sys.alphabet_size
        cur = {}
        for s in range(A):
            if anchored:
                members = frozenset(
                    int(i) * self.N for i in np.nonzero(self.first == s)[0]
                )
            else:
                members = frozenset(int(v) for v in np.nonzero(sym == s)[0])
            if members:
                cur[members] = cur.get(members, 0.0) + wsym[s]
        for t in range(1, L):
            weighted = t < n
            new = {}
            for S, val in cur.items():
                for b in range(A):
                    T = frozenset(v2 for v in S for v2 in succ[v] if sym[v2] == b)
                    if not T:
                        continue
                    new[T] = new.get(T, 0.0) + val * (wsym[b] if weighted else 1.0)
            cur = new
            if len(cur) > state_cap:
                raise ResourceBudgetError(
                    f"follower-set family exceeded {state_cap} states", n=n
                )
            if not cur:
                return NEG_INF
        total = math.fsum(cur.values())
        if total <= 0:
            return NEG_INF
        return math.log(total) + shift * n

    def language_words(self, length: int, budget: int = 1_000_000) -> np.ndarray:
        """All distinct factors of the subshift of the given length, by
        materializing enough glued blocks at every phase and deduplicating."""
        blocks_needed = 2 + (length + self.N + self.tau) // self.N
        if self.K**blocks_needed > budget:
            raise ResourceBudgetError(
                f"language extraction needs {self.K}^{blocks_needed} sequences, over budget {budget}",
                n=length,
            )
        rows = []
        for seq in itertools.product(range(self.K), repeat=blocks_needed):
            glued, _times, _gaps = glue_words(self.cert, [self.words[i] for i in seq])
            limit = len(glued) - length + 1
            for off in range(min(self.N + self.tau, limit)):
                rows.append(glued[off : off + length])
        return np.unique(np.array(rows, dtype=np.uint8), axis=0)

    def finite_pressure_report(
        self,
        level: int,
        anchored: bool,
        blocks: tuple = (3, 5, 8),
        exact_limit: int = 300_000,
        window_cap: int = 44,
    ) -> PressureReport:
        """Finite-window growth estimate played against the eigenvalue oracle.

        Small systems extract the actual language once and report exact
        partition sums over a window range (value = least quotient, the
        finite-n upper proxy); large ones fall back to the path recursion at
        a few block multiples and flag the possible phase overcount."""
        span = self.N + self.tau
        exact = self.K <= 64 and window_cap >= 2 * span
        seq = []
        ns = []
        if exact:
            step = max(1, span // 3)
            ns = list(range(span, window_cap + 1, step))
            try:
                for n in ns:
                    seq.append(self.word_theta(n, level, anchored, state_cap=exact_limit) / n)
            except ResourceBudgetError:
                exact = False
                seq = []
        if not exact:
            ns = sorted({max(2, b * span) for b in blocks})
            for n in ns:
                logtheta = self.log_theta(n, level, anchored)
                seq.append(logtheta / n if logtheta != NEG_INF else NEG_INF)
        finite = [a for a in seq if a != NEG_INF]
        value = min(finite) if finite else NEG_INF
        top = seq[len(seq) // 2 :]
        return PressureReport(
            value=value,
            method="enumeration",
            params={"level": level, "windows": ns, "anchored": anchored},
            error_bound=(max(top) - min(top)) if all(a != NEG_INF for a in top) else math.inf,
            extras={"sequence": seq, "exact_words": exact, "path_dp": not exact},
        )

    def oracle_pressure_report(self, level: int, tol: float = 1e-13) -> PressureReport:
        value, width = self.log_pressure(tol=tol)
        return PressureReport(
            value=value,
            method="oracle",
            params={"level": level, "tol": tol, "words": self.K, "word_length": self.N},
            error_bound=width,
            extras={"solver": "junction-renewal"},
        )

    # -- explicit presentation ------------------------------------------------

    def vertex_count(self) -> int:
        return self.K * self.N + sum(len(c) for c in self.conn.values())

    def edge_count(self) -> int:
        chain_edges = sum(max(len(c) - 1, 0) for c in self.conn.values())
        enter_edges = sum(
            int((self.last == a).sum()) for (a, b), c in self.conn.items() if len(c) > 0
        )
        exit_edges = sum(
            int((self.first == b).sum()) for (a, b), c in self.conn.items() if len(c) > 0
        )
        direct = sum(
            int((self.last == a).sum()) * int((self.first == b).sum())
            for (a, b), c in self.conn.items()
            if len(c) == 0
        )
        return self.K * (self.N - 1) + chain_edges + enter_edges + exit_edges + direct

    def explicit_digraph(self, max_edges: int = 20_000):
        """Vertex/edge lists of the presentation, or a size summary if the
        quadratic boundary fan-out would be unreasonable to emit."""
        n_edges = self.edge_count()
        if n_edges > max_edges:
            return {
                "summary": True,
                "vertices": self.vertex_count(),
                "edges": n_edges,
                "words": self.K,
                "word_length": self.N,
                "tau": self.tau,
            }
        names = {}
        vertices = []

        def add(name, symbol):
            names[name] = len(vertices)
            vertices.append({"id": len(vertices), "name": name, "symbol": int(symbol)})

        for i in range(self.K):
            for p in range(self.N):
                add(f"w{i}.{p}", self.words[i, p])
        for (a, b), c in self.conn.items():
            for q, s in enumerate(c):
                add(f"c{a}{b}.{q}", s)
        edges = []
        for i in range(self.K):
            for p in range(self.N - 1):
                edges.append([names[f"w{i}.{p}"], names[f"w{i}.{p+1}"]])
        for i in range(self.K):
            a = int(self.last[i])
            for j in range(self.K):
                b = int(self.first[j])
                c = self.conn[(a, b)]
                if len(c) == 0:
                    edges.append([names[f"w{i}.{self.N-1}"], names[f"w{j}.0"]])
        for (a, b), c in self.conn.items():
            if len(c) == 0:
                continue
            for i in np.nonzero(self.last == a)[0]:
                edges.append([names[f"w{int(i)}.{self.N-1}"], names[f"c{a}{b}.0"]])
            for q in range(len(c) - 1):
                edges.append([names[f"c{a}{b}.{q}"], names[f"c{a}{b}.{q+1}"]])
            for j in np.nonzero(self.first == b)[0]:
                edges.append([names[f"c{a}{b}.{len(c)-1}"], names[f"w{int(j)}.0"]])
        return {"summary": False, "vertices": vertices, "edges": edges}


def build_glued(sys: ShiftSystem, phi: Potential, words, cert: GluingCertificate, params=None) -> GluedSubshift:
    """Materialize the glued subsystem from an explicit word selection."""
    words = list(words)
    if not words:
        raise ConfigError("cannot glue an empty word set")
    if len({len(tuple(w)) for w in words}) != 1:
        raise ConfigError("all selected words must share one length")
    return GluedSubshift(sys, phi, np.asarray(words, dtype=np.uint8), cert, params)


# ---------------------------------------------------------------------------
# structure conditions
# ---------------------------------------------------------------------------

@dataclass
class ConditionReport:
    name: str
    status: str  # "pass" | "fail" | "inconclusive"
    margin: float
    details: dict = field(default_factory=dict)


@dataclass
class StructureCheck:
    conditions: list
    all_pass: bool
    pressure: float

    def to_dict(self):
        return {
            "pressure": self.pressure,
            "all_pass": self.all_pass,
            "conditions": [
                {
                    "name": c.name,
                    "status": c.status,
                    "margin": None if math.isinf(c.margin) else c.margin,
                    "details": c.details,
                }
                for c in self.conditions
            ],
        }


def _pressure_condition(name, sys, phi, seg, delta, eps, n_cap, pressure, budget) -> ConditionReport:
    rep = pressure_enumerate(sys, phi, seg, delta, eps, (2, n_cap), budget)
    if rep.value == NEG_INF:
        return ConditionReport(name, "pass", math.inf, {"class_pressure": None})
    margin = pressure - rep.value
    spread = rep.error_bound if not math.isinf(rep.error_bound) else 0.0
    details = {"class_pressure": rep.value, "spread": rep.error_bound}
    if margin <= 0:
        # the finite-n upper proxy already reaches the full pressure: the
        # strict inequality is falsified at this resolution
        return ConditionReport(name, "fail", margin, details)
    if margin > spread:
        return ConditionReport(name, "pass", margin, details)
    return ConditionReport(name, "inconclusive", margin, details)


def check_structure_conditions(
    sys: ShiftSystem,
    phi: Potential,
    dec: OrbitDecomposition,
    config: ConstructConfig | None = None,
    n_cap: int = 10,
) -> StructureCheck:
    """Numeric evaluation of the five structural conditions behind the
    construction: gluing on the affix-bounded cores, small pressure of the
    complement and of the affix classes, the Bowen bound on the core, and
    the expansivity obstruction."""
    config = config or ConstructConfig()
    eps_res, gamma_res, delta_res = config.resolutions()
    sys.require_strongly_connected()
    pressure = pressure_oracle(sys, phi).value
    conditions = []

    # (1) gluing on the affix-bounded cores
    glue_ok = True
    glue_details = {}
    for cap in (0, 1, 2):
        try:
            cert = check_gluing(sys, affix_bounded(dec, cap), delta_res, seed=config.seed)
            glue_details[f"cap_{cap}"] = {"tau": cert.tau, "n0": cert.n0}
        except Exception as exc:  # certificate refused
            glue_ok = False
            glue_details[f"cap_{cap}"] = {"error": str(exc)}
    conditions.append(
        ConditionReport("gluing_on_bounded_cores", "pass" if glue_ok else "fail",
                        math.inf if glue_ok else 0.0, glue_details)
    )

    # (2) complement class pressure at (2*gamma, 2*gamma)
    two_gamma = Resolution(gamma_res.level - 1)
    conditions.append(
        _pressure_condition(
            "complement_pressure", sys, phi, complement(dec.base),
            two_gamma, two_gamma, n_cap, pressure, config.budget,
        )
    )

    # (3) affix class pressure at (gamma, 3*gamma); a 3*gamma ball is the
    # dyadic ball one level coarser than gamma
    three_gamma = Resolution(gamma_res.level - 1)
    conditions.append(
        _pressure_condition(
            "affix_pressure", sys, phi, union(dec.prefix_class, dec.suffix_class),
            gamma_res, three_gamma, n_cap, pressure, config.budget,
        )
    )

    # (4) Bowen bound on the core at 3*gamma
    bb = bowen_bound(sys, phi, dec.core_class, three_gamma)
    if bb.exact:
        conditions.append(ConditionReport("bowen_on_core", "pass", math.inf, {"certified": 0.0}))
    else:
        conditions.append(
            ConditionReport(
                "bowen_on_core", "inconclusive", 0.0,
                {"certified_up_to_n_cap": bb.certified, "sampled": bb.sampled},
            )
        )

    # (5) expansivity obstruction
    er = expansivity_report(sys, eps_res)
    conditions.append(
        ConditionReport(
            "expansivity_obstruction", "pass", math.inf,
            {"h_star": er.h_star, "ne_empty": er.ne_empty},
        )
    )

    all_pass = all(c.status == "pass" for c in conditions)
    return StructureCheck(conditions=conditions, all_pass=all_pass, pressure=pressure)


# ---------------------------------------------------------------------------
# the driver
# ---------------------------------------------------------------------------

@dataclass
class Inequality:
    name: str
    lhs: float
    rhs: float
    ok: bool
    note: str = ""

    def to_dict(self):
        def f(x):
            return None if math.isinf(x) else x

        return {"name": self.name, "lhs": f(self.lhs), "rhs": f(self.rhs), "ok": self.ok, "note": self.note}


@dataclass
class ConstructionResult:
    subsystem: GluedSubshift
    lower: PressureReport
    upper: PressureReport
    certified: bool
    params: dict
    inequalities: list
    selection: dict
    recoding: object = None

    def base_words(self):
        """Selected words spelled in the base alphabet."""
        if self.recoding is None:
            return [tuple(int(s) for s in row) for row in self.subsystem.words]
        return [self.recoding.project_word(tuple(int(s) for s in row)) for row in self.subsystem.words]

    def to_dict(self, digraph_max_edges: int = 20_000):
        return {
            "params": self.params,
            "certified": self.certified,
            "inequalities": [iq.to_dict() for iq in self.inequalities],
            "selection": self.selection,
            "lower": self.lower.to_dict(),
            "upper": self.upper.to_dict(),
            "words": [word_str(w) for w in self.base_words()],
            "presentation": self.subsystem.explicit_digraph(digraph_max_edges),
        }


def _measure_partition_floor(sys, phi, core, pressure, gamma_res, n_cap, budget):
    """Fit of the partition-function floor on the core class: the least
    ln Theta(n) - n * pressure over the sampled range and the n attaining it."""
    two_gamma = Resolution(gamma_res.level - 1)
    best = math.inf
    best_n = None
    values = []
    for n in range(2, n_cap + 1):
        lt = partition_function(sys, phi, core, n, two_gamma, None, budget)
        if lt == NEG_INF:
            return NEG_INF, None, values
        a = lt - n * pressure
        values.append(a)
        if a < best:
            best = a
            best_n = n
    return best, best_n, values


def construct_intermediate(
    sys: ShiftSystem,
    phi: Potential,
    dec: OrbitDecomposition,
    alpha: float,
    eta0: float,
    config: ConstructConfig | None = None,
) -> ConstructionResult:
    """Build a compact invariant subsystem whose pressure is within eta0 of alpha.

    Follows the word-length search: normalize the potential to be
    nonnegative, measure the partition floor constant on the affix-bounded
    core, then walk N upward until the six feasibility inequalities hold,
    select the word set, glue, and certify both pressure bounds against the
    eigenvalue oracle. Raises InfeasibleError when alpha is outside the open
    pressure interval or no N below the cap works; a violated bound is
    reported as certified=False with full diagnostics, never silently.
    """
    config = config or ConstructConfig()
    eps_res, gamma_res, delta_res = config.resolutions()
    if eta0 <= 0:
        raise ConfigError(f"eta0 must be positive, got {eta0}")

    sys_c, phi_c, dec_c, recoding = _recode_memory_one(sys, phi, dec)
    shift = phi_c.min_value
    phi_n = phi_c.shifted(-shift)
    alpha_n = alpha - shift

    pressure = pressure_oracle(sys_c, phi_n).value
    floor = pressure_floor(sys_c, phi_n)
    if not (floor < alpha_n < pressure):
        raise InfeasibleError(
            f"alpha must lie strictly between the pressure floor and the pressure: "
            f"{floor + shift:.6f} < {alpha:.6f} < {pressure + shift:.6f} fails",
            diagnostics=[("floor < alpha < pressure", floor + shift, pressure + shift)],
        )
    # slack parameter: a fifth of the tolerance or of alpha, further capped
    # so that alpha +- eta stays inside the open pressure interval (the
    # two-sided tolerance may poke outside it; the slack must not)
    eta = min(
        eta0 / 5.0,
        alpha_n / 5.0,
        0.45 * (pressure - alpha_n),
        0.45 * (alpha_n - floor),
    )

    # affix cap scan: the partition floor on the bounded core must stay positive
    chosen = None
    for cap in config.affix_caps:
        core = affix_bounded(dec_c, cap)
        try:
            cert = check_gluing(sys_c, core, delta_res, seed=config.seed)
        except Exception:
            continue
        log_c0, n1, fit = _measure_partition_floor(
            sys_c, phi_n, core, pressure, gamma_res, config.c0_n_cap, config.budget
        )
        if log_c0 == NEG_INF:
            continue
        chosen = (cap, core, cert, log_c0, n1, fit)
        break
    if chosen is None:
        raise InfeasibleError(
            "no affix cap yields a glued core with positive partition floor",
            diagnostics=[("affix caps scanned", config.affix_caps, None)],
        )
    cap, core, cert, log_c0, n1, fit = chosen
    tau = cert.tau

    var_phi = phi_n.spread
    core_bowen = bowen_bound(sys_c, phi_n, dec_c.core_class, delta_res).certified
    log_sep_gap = (
        math.log(tau) + math.log(float(count_words(sys_c, tau + delta_res.level - 1)))
        if tau >= 1
        else NEG_INF
    )

    n_log = []
    chosen_n = None
    for N in range(max(cert.n0, n1 or 1) + 1, config.n_cap + 1):
        sup_n = birkhoff_sup(sys_c, phi_n, N)
        checks = [
            Inequality(
                "sup_birkhoff < N(alpha-eta)",
                sup_n,
                N * (alpha_n - eta),
                sup_n < N * (alpha_n - eta),
            ),
            Inequality("N > max(N0, N1)", N, max(cert.n0, n1 or 1), N > max(cert.n0, n1 or 1)),
            Inequality("N*eta > -ln(C0)", N * eta, -log_c0, N * eta > -log_c0),
            Inequality("exp(2*N*eta) > 2", 2 * N * eta, math.log(2.0), 2 * N * eta > math.log(2.0)),
            Inequality(
                "N > alpha*tau/eta",
                N,
                alpha_n * tau / eta,
                N > alpha_n * tau / eta,
                note="vacuous when tau = 0" if tau == 0 else "",
            ),
            Inequality(
                "N*eta > core_bowen + 2*cap*var(phi)",
                N * eta,
                core_bowen + 2 * cap * var_phi,
                N * eta > core_bowen + 2 * cap * var_phi,
            ),
            Inequality(
                "N*eta > tau*max(phi)",
                N * eta,
                tau * phi_n.max_value,
                N * eta > tau * phi_n.max_value,
                note=(
                    "deterministic connectors carry one gap choice per junction; "
                    f"the existential-gap form would need N*eta > {log_sep_gap:.4f}"
                    if tau >= 1
                    else "vacuous when tau = 0"
                ),
            ),
        ]
        total_ok = class_log_weight_sum(sys_c, phi_n, core, N, config.budget)
        checks.append(
            Inequality(
                "ln sum_core > N(alpha+eta)",
                total_ok,
                N * (alpha_n + eta),
                total_ok > N * (alpha_n + eta),
            )
        )
        n_log.append((N, checks))
        if all(c.ok for c in checks):
            chosen_n = N
            break
    if chosen_n is None:
        failures = []
        for N, checks in n_log:
            bad = [c for c in checks if not c.ok]
            failures.append((N, [(c.name, c.lhs, c.rhs) for c in bad]))
        raise InfeasibleError(
            f"no feasible word length below the cap {config.n_cap}; "
            f"last failures: {failures[-1] if failures else 'none'}",
            diagnostics=failures,
        )
    N = chosen_n
    inequalities = n_log[-1][1]

    words, phis, sel_info = select_words(sys_c, phi_n, core, alpha_n, eta, N, config.budget)
    params = {
        "alpha": alpha,
        "eta0": eta0,
        "pressure_interval": [floor + shift, pressure + shift],
        "eta": eta,
        "N": N,
        "affix_cap": cap,
        "tau": tau,
        "E_size": int(words.shape[0]),
        "normalization_shift": shift,
        "recoded": recoding is not None,
        "log_c0": log_c0,
        "N1": n1,
    }
    glued = GluedSubshift(sys_c, phi_n, words, cert, params)

    value_n, width = glued.log_pressure()
    value = value_n + shift
    lower = glued.oracle_pressure_report(gamma_res.level)
    upper = glued.oracle_pressure_report(delta_res.level - 1)
    lower.value += shift
    upper.value += shift
    lower_enum = glued.finite_pressure_report(
        gamma_res.level, anchored=True, blocks=config.enum_blocks,
        exact_limit=config.exact_words_limit,
    )
    upper_enum = glued.finite_pressure_report(
        delta_res.level - 1, anchored=False, blocks=config.enum_blocks,
        exact_limit=config.exact_words_limit,
    )
    lower_enum.value += shift
    upper_enum.value += shift
    lower.extras["enumeration"] = lower_enum.to_dict()
    upper.extras["enumeration"] = upper_enum.to_dict()

    lower_ok = lower.value >= alpha - eta0
    upper_ok = upper.value <= alpha + eta0
    certified = bool(lower_ok and upper_ok)
    params["pressure"] = value
    params["gap"] = abs(value - alpha)
    return ConstructionResult(
        subsystem=glued,
        lower=lower,
        upper=upper,
        certified=certified,
        params=params,
        inequalities=inequalities,
        selection=sel_info,
        recoding=recoding,
    )


# ---------------------------------------------------------------------------
# counting-bound verification
# ---------------------------------------------------------------------------

@dataclass
class CountingBoundResult:
    ok: bool
    classes_checked: int
    worst_count: int
    bound: float
    theta_checked: bool
    failures: list = field(default_factory=list)


def _continuation_prefixes(glued: GluedSubshift, last_symbol: int, h: int) -> set:
    """Distinct length-h continuations of a class past its determined span."""
    if h == 0:
        return {()}
    out = set()

    def extend(prefix, a):
        for j in range(glued.K):
            b = int(glued.first[j])
            chunk = glued.conn[(a, b)] + tuple(int(s) for s in glued.words[j])
            cand = prefix + chunk
            if len(cand) >= h:
                out.add(cand[:h])
            else:
                extend(cand, int(glued.last[j]))

    extend((), last_symbol)
    return out


def verify_counting_bound(
    glued: GluedSubshift,
    n: int,
    delta: Resolution | None = None,
    eta: float | None = None,
    class_budget: int = 2_000_000,
) -> CountingBoundResult:
    """Exhaustive per-class separated-point count against the gap-choice bound.

    Every class fixes n glued words (gaps are functions of the word pair, so
    only the matching gap tuple is nonempty); the separated points of the
    class at scale delta are its distinct window prefixes, which must number
    at most s(X, tau, delta)^(n-1). Also evaluates the window partition sum
    against the truncated-block upper bound.
    """
    if n < 2 or n > 8:
        raise PreconditionError("counting-bound verification is exhaustive; use 2 <= n <= 8")
    if glued.K**n > class_budget:
        raise ResourceBudgetError(
            f"{glued.K}^{n} classes exceed the class budget {class_budget}", n=n
        )
    delta = delta or Resolution(glued.params.get("level_delta", 7))
    eta = eta if eta is not None else float(glued.params.get("eta", 0.0))
    tau = glued.tau
    sep_len = tau + delta.level - 1
    s_tau = float(count_words(glued.sys, sep_len)) if sep_len >= 1 else 1.0
    bound = s_tau ** (n - 1) if tau >= 1 else max(
        float(count_words(glued.sys, delta.level - 1)) ** (n - 1), 1.0
    )
    window = n * glued.N + delta.level - 1
    theta_n = math.floor((n - 4) * glued.N / (glued.N + tau)) if n > 4 else 0
    phi_max = glued.phi.max_value
    failures = []
    worst = 0
    theta_checked = False
    for seq in itertools.product(range(glued.K), repeat=n):
        glued_word, times, _gaps = glue_words(glued.cert, [glued.words[i] for i in seq])
        det = len(glued_word)
        h = max(0, window - det)
        prefixes = _continuation_prefixes(glued, int(glued.last[seq[-1]]), h)
        count = len(prefixes)
        worst = max(worst, count)
        if count > bound:
            failures.append({"class": [int(i) for i in seq], "count": count, "bound": bound})
        if n > 4 and theta_n >= 3:
            theta_checked = True
            width = (n - 3) * glued.N
            log_theta_enum = birkhoff_batch(
                glued.phi, np.array([glued_word[:width]], dtype=np.uint8), width
            )[0]
            log_bound = (
                (n - 1) * math.log(max(s_tau, 1.0))
                + math.fsum(glued.phis[i] for i in seq[2:theta_n])
                + 2 * n * glued.N * eta
                + 5 * glued.N * phi_max
            )
            if log_theta_enum > log_bound + 1e-9:
                failures.append(
                    {"class": [int(i) for i in seq], "theta": log_theta_enum, "theta_bound": log_bound}
                )
    return CountingBoundResult(
        ok=not failures,
        classes_checked=glued.K**n,
        worst_count=worst,
        bound=bound,
        theta_checked=theta_checked,
        failures=failures[:10],
    )


# ---------------------------------------------------------------------------
# density sweep
# ---------------------------------------------------------------------------

@dataclass
class DensityRow:
    alpha: float
    certified: bool
    pressure: float | None
    gap: float | None
    N: int | None
    tau: int | None
    e_size: int | None
    error: str = ""


@dataclass
class DensityResult:
    rows: list
    floor: float
    ceiling: float
    tail_correction: float
    check: StructureCheck


def density_experiment(
    sys: ShiftSystem,
    phi: Potential,
    dec: OrbitDecomposition,
    grid_size: int,
    eta0: float,
    config: ConstructConfig | None = None,
    margin: float | None = None,
) -> DensityResult:
    """Run the construction across an alpha grid spanning the pressure interval.

    Requires the structure conditions to pass; individual alpha failures are
    recorded per row and the sweep continues. The tail correction var(phi, 2*delta)
    is logged: it vanishes at these resolutions for finite-memory potentials,
    which is exactly what makes the certification two-sided.
    """
    if grid_size < 1:
        raise ConfigError(f"grid size must be >= 1, got {grid_size}")
    config = config or ConstructConfig()
    check = check_structure_conditions(sys, phi, dec, config)
    if not check.all_pass:
        bad = [c.name for c in check.conditions if c.status != "pass"]
        raise InfeasibleError(
            f"structure conditions not all passing: {', '.join(bad)}",
            diagnostics=[(c.name, c.status, c.margin) for c in check.conditions],
        )
    margin = eta0 if margin is None else margin
    floor = pressure_floor(sys, phi)
    ceiling = check.pressure
    lo, hi = floor + margin, ceiling - margin
    if lo >= hi:
        raise InfeasibleError(
            f"margin {margin} leaves an empty alpha interval ({lo:.6f}, {hi:.6f})",
            diagnostics=[("floor+margin < pressure-margin", lo, hi)],
        )
    if grid_size == 1:
        alphas = [0.5 * (lo + hi)]
    else:
        alphas = list(np.linspace(lo, hi, grid_size))
    two_delta = Resolution(config.level_delta - 1)
    tail = variation(phi, two_delta)
    rows = []
    for a in alphas:
        try:
            res = construct_intermediate(sys, phi, dec, float(a), eta0, config)
            rows.append(
                DensityRow(
                    alpha=float(a),
                    certified=res.certified,
                    pressure=res.params["pressure"],
                    gap=res.params["gap"],
                    N=res.params["N"],
                    tau=res.params["tau"],
                    e_size=res.params["E_size"],
                )
            )
        except (InfeasibleError, ResourceBudgetError, PreconditionError) as exc:
            rows.append(
                DensityRow(
                    alpha=float(a), certified=False, pressure=None, gap=None,
                    N=None, tau=None, e_size=None, error=str(exc),
                )
            )
    return DensityResult(rows=rows, floor=floor, ceiling=ceiling, tail_correction=tail, check=check)
