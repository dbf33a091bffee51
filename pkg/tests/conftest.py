import pytest

from korobov_tract import SequenceFamily, WeightSpec


def spec(omega, a, b):
    return WeightSpec.from_text(omega, a, b)


@pytest.fixture
def k_linear():
    """omega = 1/2, a_k = k, b_k = 1."""
    return spec(0.5, "power:c=1,p=1", "const:c=1")


@pytest.fixture
def flat():
    """omega = 1/2, a_k = b_k = 1."""
    return spec(0.5, "const:c=1", "const:c=1")


@pytest.fixture
def a12():
    """a = (1, 2, ...), b = 1 (first two coordinates are what the examples use)."""
    return WeightSpec(0.5, SequenceFamily.from_list([1, 2]), SequenceFamily.constant(1))


def assert_same_spectrum(got, want, rel=1e-12):
    """Integer multiplicities exactly, exponents to ``rel`` relative."""
    assert [m for _, m in got] == [m for _, m in want]
    for (x, _), (y, _) in zip(got, want):
        assert abs(x - y) <= rel * max(1.0, abs(y))
