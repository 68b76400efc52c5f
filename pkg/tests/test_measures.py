import math

import numpy as np
import pytest

from shiftpress import (
    Potential,
    MarkovMeasure,
    PeriodicOrbitMeasure,
    markov_entropy,
    measure_pressure,
    spectrum_sample,
    pressure_oracle,
    pressure_floor,
)
from shiftpress.measures import gibbs_chain, primitive_cycles
from shiftpress.errors import ConfigError

from conftest import random_sft, random_potential


class TestMarkovEntropy:
    def test_uniform_bernoulli(self, full2):
        mu = MarkovMeasure.bernoulli(full2, [0.5, 0.5])
        assert markov_entropy(mu) == pytest.approx(math.log(2), abs=1e-12)

    def test_degenerate(self, full2):
        mu = MarkovMeasure.bernoulli(full2, [1.0, 0.0])
        assert markov_entropy(mu) == pytest.approx(0.0, abs=1e-12)

    def test_biased_formula(self, full2):
        p = 0.25
        mu = MarkovMeasure.bernoulli(full2, [p, 1 - p])
        direct = -(p * math.log(p) + (1 - p) * math.log(1 - p))
        assert direct == pytest.approx(0.562335, abs=1e-6)
        assert markov_entropy(mu) == pytest.approx(direct, abs=1e-12)

    def test_rejects_off_support(self, golden):
        with pytest.raises(ConfigError):
            MarkovMeasure(golden, [[0.5, 0.5], [0.5, 0.5]])


class TestMeasurePressure:
    def test_uniform_is_topological_entropy(self, full2):
        mu = MarkovMeasure.bernoulli(full2, [0.5, 0.5])
        assert measure_pressure(full2, Potential.zero(full2), mu) == pytest.approx(
            math.log(2), abs=1e-12
        )

    def test_fixed_point_attains_floor(self, full2):
        phi = Potential.from_symbol_values(full2, [0.0, 1.0])
        mu = PeriodicOrbitMeasure(full2, (1,))
        assert measure_pressure(full2, phi, mu) == pytest.approx(1.0, abs=1e-12)

    def test_cycle_with_memory2(self, golden):
        phi = Potential(golden, 2, {(0, 0): 0.2, (0, 1): 1.0, (1, 0): -0.4})
        mu = PeriodicOrbitMeasure(golden, (0, 1))
        # windows around the cycle: 01 and 10
        assert measure_pressure(golden, phi, mu) == pytest.approx((1.0 - 0.4) / 2, abs=1e-12)

    def test_parry_matches_oracle(self, golden):
        chain = gibbs_chain(golden, Potential.zero(golden))
        assert chain.pressure() == pytest.approx(
            pressure_oracle(golden, Potential.zero(golden)).value, abs=1e-9
        )

    def test_markov_cylinder_integral(self, full2):
        # memory-2 potential integrated through cylinder probabilities
        phi = Potential(full2, 2, {(0, 0): 1.0, (0, 1): 0.0, (1, 0): 0.0, (1, 1): 0.0})
        mu = MarkovMeasure.bernoulli(full2, [0.25, 0.75])
        assert measure_pressure(full2, phi, mu) == pytest.approx(
            markov_entropy(mu) + 0.25 * 0.25, abs=1e-12
        )

    def test_rejects_imprimitive_cycle(self, full2):
        with pytest.raises(ConfigError, match="power"):
            PeriodicOrbitMeasure(full2, (0, 1, 0, 1))


class TestPrimitiveCycles:
    def test_full2_counts(self, full2):
        cycles, truncated = primitive_cycles(full2, 4)
        assert truncated is None
        by_len = {}
        for c in cycles:
            by_len.setdefault(len(c), []).append(c)
        # necklace counts over 2 symbols: 2, 1, 2, 3
        assert [len(by_len.get(p, [])) for p in (1, 2, 3, 4)] == [2, 1, 2, 3]

    def test_golden_excludes_forbidden(self, golden):
        cycles, _ = primitive_cycles(golden, 3)
        assert (1,) not in cycles
        assert (0,) in cycles and (0, 1) in cycles


class TestSpectrum:
    def test_variational_inequality_randomized(self):
        for seed in range(6):
            rng = np.random.default_rng(seed)
            sys = random_sft(rng, int(rng.integers(2, 4)))
            phi = random_potential(rng, sys, 1)
            res = spectrum_sample(sys, phi, cycle_cap=5, grid=6)
            ceiling = pressure_oracle(sys, phi).value
            assert all(e.pressure <= ceiling + 1e-9 for e in res.entries)

    def test_gibbs_attains_pressure_memory1(self, full2, golden):
        for sys in (full2, golden):
            rng = np.random.default_rng(17)
            phi = random_potential(rng, sys, 1)
            res = spectrum_sample(sys, phi, cycle_cap=3, grid=4)
            ceiling = pressure_oracle(sys, phi).value
            assert max(e.pressure for e in res.entries) == pytest.approx(ceiling, abs=1e-9)

    def test_memory2_lift_attainment(self, golden):
        phi = Potential(golden, 2, {(0, 0): 0.1, (0, 1): 0.8, (1, 0): 0.2})
        res = spectrum_sample(golden, phi, cycle_cap=4, grid=6)
        ceiling = pressure_oracle(golden, phi).value
        assert max(e.pressure for e in res.entries) <= ceiling + 1e-9
        assert max(e.pressure for e in res.entries) >= ceiling - 0.02

    def test_cycle_floor_sandwich(self, full2):
        phi = Potential.from_symbol_values(full2, [0.0, 1.0])
        res = spectrum_sample(full2, phi, cycle_cap=6, grid=4)
        cycle_vals = [e.pressure for e in res.entries if e.kind == "cycle"]
        floor = pressure_floor(full2, phi)
        assert min(cycle_vals) <= floor <= max(cycle_vals) + 1e-12
        assert max(cycle_vals) == pytest.approx(floor, abs=1e-12)

    def test_density_gap_small(self, full2):
        res = spectrum_sample(full2, Potential.zero(full2), cycle_cap=10, grid=50)
        assert res.max_gap < 0.05
        assert res.floor == pytest.approx(0.0, abs=1e-12)
        assert res.ceiling == pytest.approx(math.log(2), abs=1e-9)

    def test_budget_flags_partial(self, full3):
        res = spectrum_sample(full3, Potential.zero(full3), cycle_cap=12, grid=3, budget=100)
        assert res.partial
