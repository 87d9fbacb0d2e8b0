from fractions import Fraction

from .kb import GeomParam


def _p(param):
    return param.p if isinstance(param, GeomParam) else GeomParam(Fraction(param)).p


def geom_pmf(param, i):
    """Exact (1 - p)^i * p, indexed from zero."""
    if i < 0:
        raise ValueError(f'index must be nonnegative, got {i}')
    p = _p(param)
    return (1 - p) ** i * p


def geom_tail(param, i):
    """Exact mass strictly beyond i, (1 - p)^(i + 1)."""
    if i < 0:
        raise ValueError(f'index must be nonnegative, got {i}')
    return (1 - _p(param)) ** (i + 1)


class GeomDistribution:
    def __init__(self, param):
        self.param = param if isinstance(param, GeomParam) else GeomParam(Fraction(param))
        self._pmf = {}

    @property
    def p(self):
        return self.param.p

    def pmf(self, i):
        if i not in self._pmf:
            self._pmf[i] = geom_pmf(self.param, i)
        return self._pmf[i]

    def tail(self, i):
        return geom_tail(self.param, i)
