"""Gluing certificates: deterministic connector words and exact orbit tracing.

A certificate fixes, for every ordered symbol pair (a, b), one admissible
connector word of length <= tau joining a word ending in a to a word
starting with b. Concatenation through these connectors traces each input
segment exactly (distance zero at every in-segment time), which is the
strongest possible form of the tracing required at any dyadic resolution.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .core import ShiftSystem, Resolution, is_admissible, word_matrix, shortest_connectors, word_str
from .segments import SegmentClass
from .errors import CertificateError, ConfigError


@dataclass(frozen=True)
class GluingCertificate:
    """Per-pair connectors plus the gluing parameters (delta, N0, tau).

    The gap sequence of a glued word is determined by consecutive segment
    endpoints: gap(k) = len(connectors[last(w_k), first(w_{k+1})]).
    """

    sys: ShiftSystem
    delta: Resolution
    n0: int
    tau: int
    connectors: dict

    def __post_init__(self):
        for (a, b), c in self.connectors.items():
            if len(c) > self.tau:
                raise CertificateError(
                    f"connector for ({a},{b}) has length {len(c)} > tau={self.tau}"
                )
            if not is_admissible(self.sys, (a,) + tuple(c) + (b,)):
                raise CertificateError(
                    f"connector {word_str(c) or 'empty'} does not join {a} to {b} admissibly",
                    counterexample=(a, c, b),
                )

    def connector(self, a: int, b: int) -> tuple:
        return self.connectors[(a, b)]

    def gap_lengths(self) -> set:
        return {len(c) for c in self.connectors.values()}


def trace_times(lengths, gaps):
    """Starting times t_k of the glued blocks: t_1 = 0 and
    t_k = sum of (segment length + following gap) over the earlier blocks."""
    times = [0]
    for m_k, r_k in zip(lengths[:-1], gaps):
        times.append(times[-1] + m_k + r_k)
    return times


def glue_words(cert: GluingCertificate, words):
    """Concatenate words through the certificate connectors.

    Returns (glued word, block start times, gap lengths)."""
    words = [tuple(int(s) for s in w) for w in words]
    if not words:
        raise ConfigError("nothing to glue")
    out = list(words[0])
    gaps = []
    for w in words[1:]:
        c = cert.connector(out[-1], w[0])
        gaps.append(len(c))
        out.extend(c)
        out.extend(w)
    times = trace_times([len(w) for w in words], gaps)
    return tuple(out), times, gaps


def is_traced(z, segments, times, level: int | None = None) -> bool:
    """Exact tracing check: the glued word carries each segment verbatim at
    its start time. Exact prefix equality implies distance 0 <= 2^-level for
    every dyadic level, so `level` only participates in the report."""
    for (w, m_k), t in zip(segments, times):
        block = tuple(z[t : t + len(w)])
        if block != tuple(w):
            return False
    return True


def check_gluing(
    sys: ShiftSystem,
    core_class: SegmentClass,
    delta: Resolution,
    n0: int = 1,
    tau: int | None = None,
    seed: int = 0,
    samples: int = 32,
) -> GluingCertificate:
    """Build and verify a gluing certificate for a segment class.

    Connectors come from BFS shortest paths (lexicographically least among
    shortest). Verification glues random samples of class segments (sequence
    length <= 8, segment lengths in [n0, n0+4]) and checks admissibility and
    exact tracing at the computed times; any failure refuses the certificate
    with the counterexample.
    """
    sys.require_strongly_connected()
    connectors = shortest_connectors(sys)
    max_len = max(len(c) for c in connectors.values())
    if tau is None:
        tau = max_len
    elif tau < max_len:
        raise CertificateError(
            f"requested tau={tau} below required connector length {max_len}"
        )
    if n0 < 1:
        raise ConfigError(f"N0 must be >= 1, got {n0}")
    cert = GluingCertificate(sys=sys, delta=delta, n0=n0, tau=tau, connectors=connectors)

    rng = random.Random(seed)
    pool = {}
    for length in range(n0, n0 + 5):
        words = word_matrix(sys, length)
        members = [
            tuple(int(s) for s in row)
            for row in words
            if core_class.membership(tuple(int(s) for s in row), length)
        ]
        if members:
            pool[length] = members
    if not pool:
        raise CertificateError(
            f"class {core_class.description!r} has no segments with lengths in "
            f"[{n0}, {n0 + 4}]; cannot verify gluing"
        )
    for _ in range(samples):
        k = rng.randint(2, 8)
        seq = []
        for _ in range(k):
            length = rng.choice(sorted(pool))
            seq.append(rng.choice(pool[length]))
        glued, times, gaps = glue_words(cert, seq)
        segs = [(w, len(w)) for w in seq]
        if not is_admissible(sys, glued):
            raise CertificateError(
                "glued word is not admissible", counterexample=(seq, glued)
            )
        if not is_traced(glued, segs, times, delta.level):
            raise CertificateError(
                "glued word fails to trace a segment", counterexample=(seq, glued, times)
            )
        if any(g > tau for g in gaps):
            raise CertificateError(
                f"gap exceeds tau={tau}", counterexample=(seq, gaps)
            )
    return cert
