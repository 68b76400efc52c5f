import numpy as np
import pytest

from shiftpress import (
    Resolution,
    all_segments,
    check_gluing,
    glue_words,
    trace_times,
    is_traced,
    digraph_diameter,
)
from shiftpress.core import is_admissible
from shiftpress.segments import SegmentClass
from shiftpress.errors import CertificateError

from conftest import random_sft


class TestCertificates:
    def test_full2_free_concatenation(self, full2):
        cert = check_gluing(full2, all_segments(), Resolution(7))
        assert cert.tau == 0
        assert all(c == () for c in cert.connectors.values())

    def test_golden_single_connector(self, golden):
        cert = check_gluing(golden, all_segments(), Resolution(7))
        assert cert.tau == 1
        assert cert.connector(1, 1) == (0,)
        assert all(cert.connector(a, b) == () for a, b in [(0, 0), (0, 1), (1, 0)])

    def test_cycle3_connector_lengths(self, cycle3):
        cert = check_gluing(cycle3, all_segments(), Resolution(7))
        assert cert.tau == 2
        for a in range(3):
            for b in range(3):
                assert len(cert.connector(a, b)) == (b - a - 1) % 3

    def test_tau_vs_diameter(self, golden, cycle3, full2):
        for sys in (golden, cycle3, full2):
            cert = check_gluing(sys, all_segments(), Resolution(7))
            assert cert.tau >= digraph_diameter(sys) - 1

    def test_requested_tau_too_small(self, golden):
        with pytest.raises(CertificateError):
            check_gluing(golden, all_segments(), Resolution(7), tau=0)

    def test_empty_class_refused(self, golden):
        nothing = SegmentClass(lambda w, n: False, "nothing")
        with pytest.raises(CertificateError, match="no segments"):
            check_gluing(golden, nothing, Resolution(7))

    def test_randomized_systems(self):
        for seed in range(8):
            rng = np.random.default_rng(seed)
            sys = random_sft(rng, int(rng.integers(2, 5)))
            cert = check_gluing(sys, all_segments(), Resolution(5), seed=seed)
            assert cert.tau <= sys.alphabet_size


class TestTracing:
    def test_times_from_lengths_and_gaps(self):
        assert trace_times([3, 3, 3], [1, 0]) == [0, 4, 7]
        assert trace_times([5], []) == [0]

    def test_exact_prefix_tracing(self, golden):
        cert = check_gluing(golden, all_segments(), Resolution(7))
        words = [(0, 0, 1), (1, 0, 1), (0, 1, 0)]
        glued, times, gaps = glue_words(cert, words)
        assert is_admissible(golden, glued)
        assert is_traced(glued, [(w, len(w)) for w in words], times)
        # connector between 1-ending and 1-starting blocks forces a gap
        assert gaps == [1, 0]
        assert times == [0, 4, 7]
        # exact equality: distance 0 at every in-block offset
        for w, t in zip(words, times):
            assert glued[t : t + 3] == w

    def test_tracing_detects_mismatch(self):
        z = (0, 1, 0, 0, 1)
        assert is_traced(z, [((0, 1), 2)], [0])
        assert not is_traced(z, [((1, 1), 2)], [0])

    def test_glued_word_admissible_on_random_systems(self):
        for seed in range(6):
            rng = np.random.default_rng(200 + seed)
            sys = random_sft(rng, int(rng.integers(2, 5)))
            cert = check_gluing(sys, all_segments(), Resolution(5), seed=seed)
            from shiftpress.core import word_matrix

            pool = [tuple(int(s) for s in row) for row in word_matrix(sys, 4)]
            take = [pool[int(i)] for i in rng.integers(0, len(pool), size=5)]
            glued, times, gaps = glue_words(cert, take)
            assert is_admissible(sys, glued)
            assert is_traced(glued, [(w, 4) for w in take], times)
            assert all(g <= cert.tau for g in gaps)
