"""Locally constant potentials: finite-memory real functions on a subshift.

A memory-m potential reads only the first m symbols of a point. These are
Holder in the dyadic metric, satisfy the Bowen property exactly at scales
finer than 2^-m, and admit an exact transfer-operator treatment, which is
why the package restricts to them.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .core import ShiftSystem, Resolution, word_matrix, word_str, parse_word
from .errors import ConfigError, PreconditionError
from . import kernels


class Potential:
    """Memory-m potential given by a table over admissible length-m words."""

    def __init__(self, sys: ShiftSystem, memory: int, table: dict):
        if memory < 1:
            raise ConfigError(f"memory must be >= 1, got {memory}")
        self.sys = sys
        self.memory = memory
        norm = {}
        for k, v in table.items():
            key = tuple(int(s) for s in k)
            norm[key] = float(v)
        admissible = {tuple(int(s) for s in row) for row in word_matrix(sys, memory)}
        missing = sorted(admissible - set(norm))
        extra = sorted(set(norm) - admissible)
        if missing or extra:
            parts = []
            if missing:
                parts.append("missing admissible words: " + ", ".join(word_str(w) for w in missing))
            if extra:
                parts.append("entries for inadmissible words: " + ", ".join(word_str(w) for w in extra))
            raise ConfigError("potential table invalid; " + "; ".join(parts))
        self.table = norm
        # dense lookup indexed by base-A digits; inadmissible slots hold -inf
        A = sys.alphabet_size
        flat = np.full(A**memory, -np.inf)
        for w, v in norm.items():
            idx = 0
            for s in w:
                idx = idx * A + s
            flat[idx] = v
        self.values_flat = flat
        self.values_flat.setflags(write=False)

    @classmethod
    def constant(cls, sys: ShiftSystem, c: float) -> "Potential":
        return cls(sys, 1, {(a,): c for a in range(sys.alphabet_size)})

    @classmethod
    def zero(cls, sys: ShiftSystem) -> "Potential":
        return cls.constant(sys, 0.0)

    @classmethod
    def from_symbol_values(cls, sys: ShiftSystem, values) -> "Potential":
        return cls(sys, 1, {(a,): values[a] for a in range(sys.alphabet_size)})

    def __call__(self, word) -> float:
        key = tuple(int(s) for s in word[: self.memory])
        return self.table[key]

    @property
    def max_value(self) -> float:
        return max(self.table.values())

    @property
    def min_value(self) -> float:
        return min(self.table.values())

    @property
    def spread(self) -> float:
        """var(phi) = max - min over admissible memory words."""
        return self.max_value - self.min_value

    def shifted(self, c: float) -> "Potential":
        return Potential(self.sys, self.memory, {k: v + c for k, v in self.table.items()})


def birkhoff_sum(sys: ShiftSystem, phi: Potential, word, n: int) -> float:
    """Sum of phi along the first n shifts of the word, compensated summation.

    Needs n + memory - 1 symbols so every shifted evaluation is determined.
    """
    w = tuple(int(s) for s in word)
    need = n + phi.memory - 1
    if len(w) < need:
        raise PreconditionError(
            f"birkhoff_sum needs a word of length >= {need} (n={n}, memory={phi.memory}), got {len(w)}"
        )
    return math.fsum(phi.table[w[k : k + phi.memory]] for k in range(n))


def birkhoff_batch(phi: Potential, words: np.ndarray, n: int) -> np.ndarray:
    """Birkhoff sums for every row of an admissible-word matrix (hot path)."""
    assert words.shape[1] >= n + phi.memory - 1
    return kernels.birkhoff_kernel(
        words, n, phi.memory, phi.values_flat, phi.sys.alphabet_size
    )


def variation(phi: Potential, eps: Resolution) -> float:
    """Largest |phi difference| over admissible memory words agreeing on the
    first min(level, memory) symbols; exactly 0 once level >= memory."""
    if eps.level >= phi.memory:
        return 0.0
    agree = eps.level
    groups = {}
    for w, v in phi.table.items():
        groups.setdefault(w[:agree], []).append(v)
    worst = 0.0
    for vals in groups.values():
        worst = max(worst, max(vals) - min(vals))
    return worst


def load_potential(sys: ShiftSystem, path) -> Potential:
    """Load a potential file: {"memory": m, "table": {"01": 1.0, ...}}."""
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read potential file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"potential file {path} is not valid JSON: {exc}") from exc
    return potential_from_dict(sys, data, origin=str(path))


def potential_from_dict(sys: ShiftSystem, data, origin="<dict>") -> Potential:
    if not isinstance(data, dict):
        raise ConfigError(f"{origin}: expected a JSON object")
    m = data.get("memory")
    table = data.get("table")
    if not isinstance(m, int) or m < 1:
        raise ConfigError(f"{origin}: 'memory' must be an integer >= 1, got {m!r}")
    if not isinstance(table, dict):
        raise ConfigError(f"{origin}: 'table' must be an object mapping words to values")
    if sys.alphabet_size > 10:
        raise ConfigError(f"{origin}: digit-string keys support alphabets up to 10 symbols")
    parsed = {}
    bad = []
    for k, v in table.items():
        try:
            w = parse_word(k)
        except ConfigError:
            bad.append(k)
            continue
        if len(w) != m or not isinstance(v, (int, float)) or isinstance(v, bool):
            bad.append(k)
            continue
        parsed[w] = float(v)
    if bad:
        raise ConfigError(f"{origin}: malformed table keys/values: {', '.join(sorted(bad))}")
    try:
        return Potential(sys, m, parsed)
    except ConfigError as exc:
        raise ConfigError(f"{origin}: {exc}") from exc
