from fractions import Fraction


class PhaseOneTableau:
    """Dense exact tableau deciding feasibility of A x = b, x >= 0.

    Every row gets an artificial variable; the tableau maximizes minus their
    sum with Bland's rule, so the system is feasible iff the optimum is zero.
    """

    def __init__(self, A, b):
        self.m = len(A)
        self.n = len(A[0]) if A else 0
        rows, rhs = [], []
        for row, value in zip(A, b):
            row, value = [Fraction(v) for v in row], Fraction(value)
            if value < 0:
                row, value = [-v for v in row], -value
            rows.append(row)
            rhs.append(value)
        self.A = [row + [Fraction(int(i == k)) for k in range(self.m)] for i, row in enumerate(rows)]
        self.b = rhs
        self.basis = [self.n + i for i in range(self.m)]
        self.c = [sum((r[j] for r in self.A), Fraction(0)) if j < self.n else Fraction(0)
                  for j in range(self.n + self.m)]

    def pivot(self, i, j):
        piv = self.A[i][j]
        self.A[i] = [v / piv for v in self.A[i]]
        self.b[i] /= piv
        for k in range(self.m):
            f = self.A[k][j]
            if k != i and f != 0:
                self.A[k] = [vk - f * vi for vk, vi in zip(self.A[k], self.A[i])]
                self.b[k] -= f * self.b[i]
        f = self.c[j]
        self.c = [ck - f * vi for ck, vi in zip(self.c, self.A[i])]
        self.basis[i] = j

    def bland_step(self):
        entering = next((j for j, cj in enumerate(self.c) if cj > 0), None)
        if entering is None:
            return False
        ratios = [(self.b[i] / self.A[i][entering], self.basis[i], i)
                  for i in range(self.m) if self.A[i][entering] > 0]
        if not ratios:
            raise RuntimeError('phase one cannot be unbounded')
        _, _, i = min(ratios)
        self.pivot(i, entering)
        return True

    @property
    def infeasibility(self):
        return sum((self.b[i] for i, j in enumerate(self.basis) if j >= self.n), Fraction(0))

    def solve(self):
        """A feasible point as a list of Fractions, or None."""
        while self.bland_step():
            pass
        if self.infeasibility != 0:
            return None
        x = [Fraction(0)] * self.n
        for i, j in enumerate(self.basis):
            if j < self.n:
                x[j] = self.b[i]
        return x
