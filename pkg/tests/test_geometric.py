import random
from fractions import Fraction

import pytest

from tld_lite.errors import ParameterDomainError
from tld_lite.geometric import GeomDistribution, geom_pmf, geom_tail
from tld_lite.kb import GeomParam

HALF, THREE_QUARTERS = Fraction(1, 2), Fraction(3, 4)


def random_params(seed, count=20):
    rng = random.Random(seed)
    params = []
    for _ in range(count):
        den = rng.randint(2, 50)
        params.append(Fraction(rng.randint((den + 1) // 2, den - 1), den))
    return params


def test_pmf_values():
    assert geom_pmf(HALF, 0) == Fraction(1, 2)
    assert geom_pmf(HALF, 3) == Fraction(1, 16)
    assert geom_pmf(THREE_QUARTERS, 0) == Fraction(3, 4)
    assert geom_pmf(THREE_QUARTERS, 2) == Fraction(3, 64)


def test_tail_values():
    assert geom_tail(HALF, 0) == Fraction(1, 2)
    assert geom_tail(THREE_QUARTERS, 0) == Fraction(1, 4)
    assert geom_tail(HALF, 2) == Fraction(1, 8)


@pytest.mark.parametrize('p', random_params(0))
def test_strictly_decreasing(p):
    for i in range(64):
        assert geom_pmf(p, i) > geom_pmf(p, i + 1)
        assert geom_tail(p, i) > geom_tail(p, i + 1)


@pytest.mark.parametrize('p', random_params(1))
def test_pmf_dominates_tail(p):
    for i in range(64):
        assert geom_pmf(p, i) - geom_tail(p, i) == (2 * p - 1) * (1 - p) ** i


def test_pmf_equals_tail_at_half():
    assert all(geom_pmf(HALF, i) == geom_tail(HALF, i) for i in range(20))


@pytest.mark.parametrize('p', [HALF, THREE_QUARTERS, Fraction(9, 10)])
def test_mass_adds_up(p):
    for n in range(10):
        assert sum(geom_pmf(p, i) for i in range(n + 1)) + geom_tail(p, n) == 1


def test_negative_index():
    with pytest.raises(ValueError):
        geom_pmf(HALF, -1)
    with pytest.raises(ValueError):
        geom_tail(HALF, -1)


def test_parameter_domain():
    with pytest.raises(ParameterDomainError):
        GeomParam(Fraction(1, 5))
    with pytest.raises(ParameterDomainError):
        geom_pmf(Fraction(1), 0)


def test_distribution_memoizes():
    dist = GeomDistribution(GeomParam(THREE_QUARTERS))
    assert dist.p == THREE_QUARTERS
    assert dist.pmf(1) == Fraction(3, 16)
    assert dist.tail(1) == Fraction(1, 16)
    assert GeomDistribution('1/2').pmf(2) == Fraction(1, 8)
