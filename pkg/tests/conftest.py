import pytest

from shiftpress import ShiftSystem, Potential
from shiftpress.core import word_matrix


@pytest.fixture
def full2():
    return ShiftSystem.full_shift(2)


@pytest.fixture
def full3():
    return ShiftSystem.full_shift(3)


@pytest.fixture
def golden():
    return ShiftSystem.golden_mean()


@pytest.fixture
def cycle3():
    return ShiftSystem([[0, 1, 0], [0, 0, 1], [1, 0, 0]])


def random_sft(rng, alphabet_size, density=0.7):
    """Seeded strongly connected SFT with no stranded symbols."""
    while True:
        T = rng.random((alphabet_size, alphabet_size)) < density
        try:
            s = ShiftSystem(T)
        except Exception:
            continue
        if s.strongly_connected():
            return s


def random_potential(rng, sys, memory, low=0.0, high=1.0):
    words = [tuple(int(x) for x in row) for row in word_matrix(sys, memory)]
    return Potential(sys, memory, {w: float(rng.uniform(low, high)) for w in words})
