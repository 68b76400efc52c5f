"""Subshifts of finite type: transition structure, admissible words, dyadic metric.

A system is a finite alphabet {0..A-1} plus an A x A boolean transition
matrix T; the phase space is the set of one-sided sequences whose adjacent
pairs are all allowed, with the shift map. Points are only ever handled
through finite words (cylinders): in the dyadic metric
d(x, y) = 2^-min{k : x_k != y_k}, every metric condition at resolution
2^-level is an exact prefix condition, so desk-scale computation is exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import gcd
from pathlib import Path

import numpy as np

from .errors import ConfigError, ResourceBudgetError, StructuralError
from . import kernels

DEFAULT_WORD_BUDGET = 20_000_000


@dataclass(frozen=True)
class Resolution:
    """A dyadic scale 2^-level, level >= 1.

    Two points are farther apart than 2^-level exactly when their first
    `level` symbols differ; hence a maximal (n, 2^-level)-separated set is
    the set of admissible words of length n + level - 1.
    """

    level: int

    def __post_init__(self):
        if self.level < 1:
            raise ConfigError(f"resolution level must be >= 1, got {self.level}")

    @property
    def value(self) -> float:
        return 2.0 ** (-self.level)

    def word_length(self, n: int) -> int:
        """Length of the cylinder words realizing an (n, 2^-level)-separated set."""
        return n + self.level - 1


class ShiftSystem:
    """Finite-alphabet subshift of finite type.

    transitions[a][b] is True iff the word "ab" is admissible. Every symbol
    must have at least one successor and one predecessor (no stranded
    symbol); alphabets of size < 2 are rejected because the whole pressure
    theory degenerates there.
    """

    def __init__(self, transitions):
        T = np.asarray(transitions, dtype=bool)
        if T.ndim != 2 or T.shape[0] != T.shape[1]:
            raise ConfigError(f"transition matrix must be square, got shape {T.shape}")
        A = T.shape[0]
        if A < 2:
            raise ConfigError(f"alphabet size must be >= 2, got {A}")
        for a in range(A):
            if not T[a].any():
                raise StructuralError(f"symbol {a} has no successor (row {a} all zero)")
        for b in range(A):
            if not T[:, b].any():
                raise StructuralError(f"symbol {b} has no predecessor (column {b} all zero)")
        self.alphabet_size = A
        self.transitions = T
        self.transitions.setflags(write=False)
        self._strongly_connected = None
        self._period = None
        self._diameter = None

    @classmethod
    def full_shift(cls, alphabet_size: int) -> "ShiftSystem":
        return cls(np.ones((alphabet_size, alphabet_size), dtype=bool))

    @classmethod
    def golden_mean(cls) -> "ShiftSystem":
        return cls([[1, 1], [1, 0]])

    def __repr__(self):
        return f"ShiftSystem(A={self.alphabet_size})"

    def is_full(self) -> bool:
        return bool(self.transitions.all())

    # -- graph structure ---------------------------------------------------

    def _reachable_from(self, start: int, reverse: bool = False) -> set:
        T = self.transitions.T if reverse else self.transitions
        seen = {start}
        frontier = [start]
        while frontier:
            nxt = []
            for u in frontier:
                for v in np.nonzero(T[u])[0]:
                    if int(v) not in seen:
                        seen.add(int(v))
                        nxt.append(int(v))
            frontier = nxt
        return seen

    def strongly_connected(self) -> bool:
        if self._strongly_connected is None:
            A = self.alphabet_size
            fwd = self._reachable_from(0)
            bwd = self._reachable_from(0, reverse=True)
            self._strongly_connected = len(fwd) == A and len(bwd) == A
        return self._strongly_connected

    def require_strongly_connected(self):
        if not self.strongly_connected():
            fwd = self._reachable_from(0)
            bwd = self._reachable_from(0, reverse=True)
            missing = next(
                a for a in range(self.alphabet_size) if a not in fwd or a not in bwd
            )
            direction = "unreachable from" if missing not in fwd else "cannot reach"
            raise StructuralError(
                f"transition digraph is not strongly connected: symbol {missing} "
                f"{direction} symbol 0"
            )

    def period(self) -> int:
        """gcd of cycle lengths of the (strongly connected) transition digraph."""
        self.require_strongly_connected()
        if self._period is None:
            depth = {0: 0}
            frontier = [0]
            g = 0
            while frontier:
                nxt = []
                for u in frontier:
                    for v in np.nonzero(self.transitions[u])[0]:
                        v = int(v)
                        if v not in depth:
                            depth[v] = depth[u] + 1
                            nxt.append(v)
                frontier = nxt
            for u in range(self.alphabet_size):
                for v in np.nonzero(self.transitions[u])[0]:
                    g = gcd(g, depth[u] + 1 - depth[int(v)])
            self._period = abs(g) if g != 0 else 1
        return self._period

    @property
    def primitive(self) -> bool:
        """True iff some power of T is entrywise positive (checked, not assumed)."""
        return self.strongly_connected() and self.period() == 1


# ---------------------------------------------------------------------------
# words
# ---------------------------------------------------------------------------

def is_admissible(sys: ShiftSystem, word) -> bool:
    w = tuple(int(s) for s in word)
    A = sys.alphabet_size
    if any(s < 0 or s >= A for s in w):
        return False
    return all(sys.transitions[w[i], w[i + 1]] for i in range(len(w) - 1))


def count_words(sys: ShiftSystem, n: int):
    """Number of admissible words of length n, in exact integer arithmetic.

    Equals the sum of entries of T^(n-1); realizes s(X, k, 2^-level) through
    the Resolution identity. Python ints rule out overflow.
    """
    if n < 1:
        raise ConfigError(f"word length must be >= 1, got {n}")
    A = sys.alphabet_size
    T = [[int(sys.transitions[a, b]) for b in range(A)] for a in range(A)]
    # row vector of counts per final symbol
    vec = [1] * A
    for _ in range(n - 1):
        vec = [sum(vec[a] * T[a][b] for a in range(A)) for b in range(A)]
    return sum(vec)


def word_matrix(sys: ShiftSystem, n: int, budget: int | None = DEFAULT_WORD_BUDGET):
    """All admissible words of length n as a (count, n) uint8 matrix, lexicographic."""
    if n < 1:
        raise ConfigError(f"word length must be >= 1, got {n}")
    total = count_words(sys, n)
    if budget is not None and total > budget:
        raise ResourceBudgetError(
            f"enumerating {total} words of length {n} exceeds the budget of {budget}",
            n=n,
        )
    return kernels.word_matrix(sys.transitions.astype(np.uint8), n, int(total))


def enumerate_words(sys: ShiftSystem, n: int, budget: int | None = DEFAULT_WORD_BUDGET):
    """Yield each admissible word of length n exactly once, lexicographically."""
    mat = word_matrix(sys, n, budget)
    for row in mat:
        yield tuple(int(s) for s in row)


def separated_set(sys: ShiftSystem, n: int, eps: Resolution, budget: int | None = DEFAULT_WORD_BUDGET):
    """A maximal (n, 2^-eps.level)-separated set, realized as words of length n+level-1."""
    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n}")
    return set(enumerate_words(sys, eps.word_length(n), budget))


def digraph_diameter(sys: ShiftSystem) -> int:
    """Max over ordered symbol pairs (a, b) of the shortest nonempty path a -> b.

    A connector word gluing "...a" to "b..." has that length minus one
    interior symbols; length 0 is permitted exactly when T[a][b].
    """
    sys.require_strongly_connected()
    if sys._diameter is None:
        A = sys.alphabet_size
        worst = 0
        for a in range(A):
            # BFS over path length >= 1 from a
            dist = {}
            frontier = [int(v) for v in np.nonzero(sys.transitions[a])[0]]
            for v in frontier:
                dist[v] = 1
            d = 1
            while len(dist) < A or a not in dist:
                d += 1
                nxt = []
                for u in frontier:
                    for v in np.nonzero(sys.transitions[u])[0]:
                        v = int(v)
                        if v not in dist:
                            dist[v] = d
                            nxt.append(v)
                frontier = nxt
                if not nxt:
                    break
            worst = max(worst, max(dist.values()))
        sys._diameter = worst
    return sys._diameter


def shortest_connectors(sys: ShiftSystem) -> dict:
    """For each ordered pair (a, b): the lexicographically least shortest word c
    with a . c . b admissible (c may be empty). Requires strong connectivity.
    """
    sys.require_strongly_connected()
    A = sys.alphabet_size
    out = {}
    for a in range(A):
        # BFS tree by first-found (symbols scanned in increasing order)
        parent = {}
        order = [int(v) for v in np.nonzero(sys.transitions[a])[0]]
        for v in order:
            parent[v] = None
        frontier = list(order)
        while frontier:
            nxt = []
            for u in frontier:
                for v in np.nonzero(sys.transitions[u])[0]:
                    v = int(v)
                    if v not in parent:
                        parent[v] = u
                        nxt.append(v)
            frontier = nxt
        for b in range(A):
            if sys.transitions[a, b]:
                out[(a, b)] = ()
                continue
            if b not in parent:
                raise StructuralError(f"no path from symbol {a} to symbol {b}")
            path = []
            u = b
            while parent[u] is not None:
                u = parent[u]
                path.append(u)
            out[(a, b)] = tuple(reversed(path))
    return out


# ---------------------------------------------------------------------------
# file format
# ---------------------------------------------------------------------------

def load_system(path) -> ShiftSystem:
    """Load a system definition file.

    Schema: {"alphabet": A, "transitions": [[0|1, ...], ...]} or the full
    shift abbreviation {"alphabet": A, "full": true}.
    """
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read system file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"system file {path} is not valid JSON: {exc}") from exc
    return system_from_dict(data, origin=str(path))


def system_from_dict(data, origin="<dict>") -> ShiftSystem:
    if not isinstance(data, dict) or "alphabet" not in data:
        raise ConfigError(f"{origin}: expected an object with an 'alphabet' field")
    A = data["alphabet"]
    if not isinstance(A, int) or A < 2:
        raise ConfigError(f"{origin}: 'alphabet' must be an integer >= 2, got {A!r}")
    if data.get("full"):
        return ShiftSystem.full_shift(A)
    rows = data.get("transitions")
    if not isinstance(rows, list) or len(rows) != A:
        raise ConfigError(f"{origin}: 'transitions' must be a list of {A} rows")
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != A:
            raise ConfigError(f"{origin}: transitions row {i} must have {A} entries")
        for j, v in enumerate(row):
            if v not in (0, 1, True, False):
                raise ConfigError(f"{origin}: transitions[{i}][{j}] must be 0 or 1, got {v!r}")
    try:
        return ShiftSystem(rows)
    except (ConfigError, StructuralError) as exc:
        raise ConfigError(f"{origin}: {exc}") from exc


def word_str(word) -> str:
    return "".join(str(int(s)) for s in word)


def parse_word(text: str) -> tuple:
    if not all(c.isdigit() for c in text):
        raise ConfigError(f"word {text!r} must be a digit string")
    return tuple(int(c) for c in text)
