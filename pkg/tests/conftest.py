import numpy as np
import pytest

from rkwave import problems, solver


def poly(*coeffs):
    """Polynomial sum_k c_k x^k as a callable f(x, d) with analytic derivatives."""
    base = np.array(coeffs, dtype=float)

    def f(x, d: int = 0):
        c = np.polynomial.polynomial.polyder(base, d) if d else base
        if c.size == 0:
            c = np.zeros(1)
        return np.polynomial.polynomial.polyval(np.asarray(x, dtype=float), c)

    return f


def sinusoid(freq, phase=0.0):
    """sin(freq*x + phase) as a callable f(x, d)."""

    def f(x, d: int = 0):
        return freq ** d * np.sin(freq * np.asarray(x, dtype=float) + phase + d * np.pi / 2)

    return f


class Separable:
    """Sum of separable terms (fx, ft); callable as f(x, t, dx, dt)."""

    def __init__(self, *terms):
        self.terms = terms

    def __call__(self, x, t, dx: int = 0, dt: int = 0):
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        total = 0.0
        for fx, ft in self.terms:
            total = total + fx(x, dx) * ft(t, dt)
        return total


@pytest.fixture(scope="session")
def ex51():
    return problems.builtin("ex51")


@pytest.fixture(scope="session")
def ex51_hp(ex51):
    return problems.homogenize(ex51)


@pytest.fixture(scope="session")
def ex51_sol_9(ex51_hp):
    return solver.solve(ex51_hp, solver.generate_collocation(9, 9))


@pytest.fixture(scope="session")
def ex52():
    return problems.builtin("ex52")


@pytest.fixture(scope="session")
def ex52_hp(ex52):
    return problems.homogenize(ex52)


@pytest.fixture(scope="session")
def ex52_sol_9(ex52_hp):
    return solver.solve(ex52_hp, solver.generate_collocation(9, 9), outer_sweeps=5)
