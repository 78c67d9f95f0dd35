"""Problem definitions, canonicalization, homogenization, and error tables.

The target equation on a rectangle [a, b] x [0, T] is

    u_tt = u_xx - N(u) + s(x, t)
    u(x, 0) = f(x),   u_t(x, 0) = g(x),   u(a, t) = h1(t),   u(b, t) = h2(t)

with N = sin for sine-Gordon and N = 0 for the linear wave equation.  The
solver works on the residual v = u - w where the lifting

    w(x, t) = f(x) + t g(x) + (b-x)/(b-a) rho(t) + (x-a)/(b-a) sigma(t)
    rho(t)  = h1(t) - f(a) - t g(a),    sigma(t) = h2(t) - f(b) - t g(b)

absorbs all data exactly (given corner-compatible data), leaving v with
homogeneous conditions and the forced equation L v = M(x, t, v),

    M(x, t, v) = -N(v + w) + s - w_tt + w_xx.

Coordinates are then rescaled to the unit square, which turns the operator
into alpha v_tautau - gamma v_xixi with alpha = 1/T^2, gamma = 1/(b-a)^2.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import solver
from .errors import DegenerateDomain, IncompatibleCorners, NoExactSolution
from .wave_operator import WaveOperator

CORNER_TOL = 1e-10


@dataclass(frozen=True)
class Curve:
    """A scalar data function bundled with its first two derivatives."""

    val: Callable[[float], float]
    d1: Callable[[float], float]
    d2: Callable[[float], float]

    @staticmethod
    def zero() -> "Curve":
        return Curve(lambda v: 0.0, lambda v: 0.0, lambda v: 0.0)


@dataclass(frozen=True)
class Rectangle:
    """Space-time rectangle [a, b] x [0, T]."""

    a: float
    b: float
    T: float

    def __post_init__(self):
        if not (self.b > self.a) or not (self.T > 0):
            raise DegenerateDomain(f"degenerate rectangle [{self.a}, {self.b}] x [0, {self.T}]")


@dataclass(frozen=True)
class AffineMaps:
    """Affine coordinate maps between a rectangle and the canonical square."""

    a: float
    b: float
    T: float

    @property
    def dxi_dx(self) -> float:
        return 1.0 / (self.b - self.a)

    @property
    def dtau_dt(self) -> float:
        return 1.0 / self.T

    def to_canonical(self, x: float, t: float):
        return (x - self.a) / (self.b - self.a), t / self.T

    def from_canonical(self, xi: float, tau: float):
        return self.a + (self.b - self.a) * xi, self.T * tau


def canonicalize(domain: Rectangle):
    """Maps to the unit square plus the rescaled operator coefficients."""
    maps = AffineMaps(domain.a, domain.b, domain.T)
    op = WaveOperator(alpha=1.0 / domain.T ** 2, gamma=1.0 / (domain.b - domain.a) ** 2)
    return maps, op


@dataclass(frozen=True)
class ProblemSpec:
    """A full initial/boundary value problem with optional exact solution."""

    domain: Rectangle
    f: Curve
    g: Curve
    h1: Curve
    h2: Curve
    nonlinearity: Optional[Callable[[float], float]] = None
    source: Optional[Callable[[float, float], float]] = None
    exact: Optional[Callable[[float, float], float]] = None
    exact_dx: Optional[Callable[[float, float], float]] = None

    def __post_init__(self):
        _check_corners(self)


def _check_corners(p: ProblemSpec) -> None:
    a, b = p.domain.a, p.domain.b
    checks = (
        ("h1(0) = f(a)", p.h1.val(0.0), p.f.val(a)),
        ("h2(0) = f(b)", p.h2.val(0.0), p.f.val(b)),
        ("h1'(0) = g(a)", p.h1.d1(0.0), p.g.val(a)),
        ("h2'(0) = g(b)", p.h2.d1(0.0), p.g.val(b)),
    )
    for label, lhs, rhs in checks:
        if abs(lhs - rhs) > CORNER_TOL * max(1.0, abs(lhs), abs(rhs)):
            raise IncompatibleCorners(f"corner compatibility {label} fails: {lhs} vs {rhs}")


@dataclass(frozen=True)
class HomogenizedProblem:
    """Canonical-square form of a problem: operator, lifting, and source M."""

    problem: ProblemSpec
    operator: WaveOperator
    maps: AffineMaps
    lifting: Callable[[float, float], float]
    lifting_x: Callable[[float, float], float]
    lifting_tt: Callable[[float, float], float]
    lifting_xx: Callable[[float, float], float]
    M: Callable[[float, float, float], float]


def homogenize(p: ProblemSpec) -> HomogenizedProblem:
    """Split u = v + w and express the forced equation on the unit square."""
    _check_corners(p)
    a, b = p.domain.a, p.domain.b
    width = b - a
    maps, op = canonicalize(p.domain)
    f, g, h1, h2 = p.f, p.g, p.h1, p.h2
    fa, fb = f.val(a), f.val(b)
    ga, gb = g.val(a), g.val(b)

    def rho(t: float) -> float:
        return h1.val(t) - fa - t * ga

    def sigma(t: float) -> float:
        return h2.val(t) - fb - t * gb

    def w(x: float, t: float) -> float:
        return (f.val(x) + t * g.val(x)
                + (b - x) / width * rho(t) + (x - a) / width * sigma(t))

    def w_x(x: float, t: float) -> float:
        return f.d1(x) + t * g.d1(x) + (sigma(t) - rho(t)) / width

    def w_tt(x: float, t: float) -> float:
        return (b - x) / width * h1.d2(t) + (x - a) / width * h2.d2(t)

    def w_xx(x: float, t: float) -> float:
        return f.d2(x) + t * g.d2(x)

    nonlin = p.nonlinearity
    source = p.source

    def m_fun(xi: float, tau: float, v: float) -> float:
        x, t = maps.from_canonical(xi, tau)
        total = -w_tt(x, t) + w_xx(x, t)
        if source is not None:
            total += source(x, t)
        if nonlin is not None:
            total -= nonlin(v + w(x, t))
        return total

    return HomogenizedProblem(p, op, maps, w, w_x, w_tt, w_xx, m_fun)


# --------------------------------------------------------------------------
# built-in benchmark problems
# --------------------------------------------------------------------------

def _sech(x: float) -> float:
    return 1.0 / math.cosh(x)


def builtin(example_id: str, a: float | None = None, b: float | None = None) -> ProblemSpec:
    """Built-in benchmark problems.

    ``ex51``: linear wave on [0,1] x [0,1], u(x,0) = sin(pi x), zero boundary
    data; exact solution sin(pi x) cos(pi t).

    ``ex52``: sine-Gordon on [a,b] x [0,1] (default [-1,1]) with u(x,0) = 0
    and u_t(x,0) = 4 sech x; boundary data is read from the exact soliton
    solution u = 4 arctan(t sech x), which keeps the corners compatible.
    """
    if example_id == "ex51":
        if a is not None or b is not None:
            raise ValueError("ex51 is fixed on [0, 1]")
        pi = math.pi
        f = Curve(lambda x: math.sin(pi * x),
                  lambda x: pi * math.cos(pi * x),
                  lambda x: -pi * pi * math.sin(pi * x))
        return ProblemSpec(
            domain=Rectangle(0.0, 1.0, 1.0),
            f=f,
            g=Curve.zero(),
            h1=Curve.zero(),
            h2=Curve.zero(),
            nonlinearity=None,
            exact=lambda x, t: math.sin(pi * x) * math.cos(pi * t),
            exact_dx=lambda x, t: pi * math.cos(pi * x) * math.cos(pi * t),
        )
    if example_id == "ex52":
        a = -1.0 if a is None else float(a)
        b = 1.0 if b is None else float(b)

        def exact(x: float, t: float) -> float:
            return 4.0 * math.atan(t * _sech(x))

        def exact_dx(x: float, t: float) -> float:
            c = _sech(x)
            return -4.0 * t * c * math.tanh(x) / (1.0 + (t * c) ** 2)

        def boundary(x0: float) -> Curve:
            c = _sech(x0)
            return Curve(
                lambda t, c=c: 4.0 * math.atan(c * t),
                lambda t, c=c: 4.0 * c / (1.0 + (c * t) ** 2),
                lambda t, c=c: -8.0 * c ** 3 * t / (1.0 + (c * t) ** 2) ** 2,
            )

        g = Curve(
            lambda x: 4.0 * _sech(x),
            lambda x: -4.0 * _sech(x) * math.tanh(x),
            lambda x: 4.0 * (_sech(x) * math.tanh(x) ** 2 - _sech(x) ** 3),
        )
        return ProblemSpec(
            domain=Rectangle(a, b, 1.0),
            f=Curve.zero(),
            g=g,
            h1=boundary(a),
            h2=boundary(b),
            nonlinearity=math.sin,
            exact=exact,
            exact_dx=exact_dx,
        )
    raise ValueError(f"unknown builtin problem {example_id!r}")


# --------------------------------------------------------------------------
# error reporting
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ErrorRow:
    x: float
    t: float
    exact: float
    approx: float
    abs_err: float
    rel_err: float
    seconds: float


@dataclass(frozen=True)
class ErrorReport:
    rows: tuple[ErrorRow, ...]

    @property
    def max_abs_error(self) -> float:
        return max((r.abs_err for r in self.rows), default=0.0)


def error_table(sol: solver.Solution, eval_points) -> ErrorReport:
    """Exact/approximate comparison rows at the given (x, t) points.

    Relative error is 0 when the point is exact and infinity when the exact
    value is zero but the approximation is not (matching the usual
    convention of printed error tables); those rows are excluded from any
    aggregate norms.
    """
    exact = sol.hp.problem.exact
    if exact is None:
        raise NoExactSolution("problems.error_table: the problem has no exact solution")
    rows = []
    for x, t in eval_points:
        start = time.perf_counter()
        approx = solver.evaluate(sol, x, t)
        seconds = time.perf_counter() - start
        ex = float(exact(x, t))
        abs_err = abs(ex - approx)
        if abs_err == 0.0:
            rel = 0.0
        elif ex == 0.0:
            rel = float("inf")
        else:
            rel = abs_err / abs(ex)
        rows.append(ErrorRow(float(x), float(t), ex, float(approx), abs_err, rel, seconds))
    return ErrorReport(tuple(rows))
