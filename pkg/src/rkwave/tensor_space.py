"""Product-space kernels on the unit square.

Two tensor spaces are used: the solution space W (order-3 factors in both
variables, so members satisfy u(x,0) = du/dt(x,0) = u(0,t) = u(1,t) = 0) and
the image space W_hat (order-1 factors, unconstrained).  Their kernels
factorize into the univariate kernels,

    K_(y,s)(x,t) = R(x,y) r(t,s)        for W
    G_(y,s)(x,t) = Q(x,y) q(t,s)        for W_hat

and the inner products compose slotwise from the univariate ones: every
boundary term and integral of the space factor pairs with every boundary
term and integral of the time factor.  The numeric inner product here is
verification-only; the solve path uses kernel identities instead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .kernels import PiecewiseKernel, eval_kernel, eval_kernel_grid
from .quadrature import panel_rule


@dataclass(frozen=True)
class TensorKernel:
    """Product kernel over the unit square: space factor times time factor."""

    space_factor: PiecewiseKernel
    time_factor: PiecewiseKernel


def kernel_w() -> TensorKernel:
    """Reproducing kernel of the solution space W."""
    return TensorKernel(kernels.closed_form_kernel("R_spatial"),
                        kernels.closed_form_kernel("r_temporal"))


def kernel_w_hat() -> TensorKernel:
    """Reproducing kernel of the image space W_hat."""
    return TensorKernel(kernels.closed_form_kernel("Q_spatial"),
                        kernels.closed_form_kernel("q_temporal"))


def eval_tensor(tk: TensorKernel, arg, param, orders=(0, 0, 0, 0)) -> float:
    """Evaluate mixed derivatives of the product kernel.

    ``arg`` is the argument point (x, t), ``param`` the parameter point
    (y, s), ``orders`` the derivative orders (dx, dt, dy, ds).  The value is
    exactly the product of the univariate evaluations; diagonal restrictions
    of the factors propagate as DiagonalDerivativeUndefined.
    """
    x, t = arg
    y, s = param
    dx, dt, dy, ds = orders
    return (eval_kernel(tk.space_factor, x, y, dx, dy)
            * eval_kernel(tk.time_factor, t, s, dt, ds))


def tensor_section(tk: TensorKernel, param):
    """The section K(. , . ; param) as a callable f(x, t, dx, dt).

    Vectorized over broadcastable x, t arrays; used as the second argument
    of ``inner_product_numeric_2d``.
    """
    y, s = param

    def section(x, t, dx: int = 0, dt: int = 0):
        return (eval_kernel_grid(tk.space_factor, x, y, dx, 0)
                * eval_kernel_grid(tk.time_factor, t, s, dt, 0))

    return section


_SPACE_FACTORS = {
    "W": ("R_spatial", "r_temporal"),
    "W_hat": ("Q_spatial", "q_temporal"),
}


def _slots(spec: kernels.SpaceSpec):
    # discrete slots (order, endpoint) plus the integral slot (m, None)
    return [(d, float(e)) for d, e in spec.discrete_terms] + [(spec.order, None)]


def inner_product_numeric_2d(space: str, u, g, split_x=(), split_t=()) -> float:
    """Numeric tensor-space inner product <u, g> for space 'W' or 'W_hat'.

    ``u`` and ``g`` are callables f(x, t, dx, dt), vectorized over
    broadcastable arrays, supplying the mixed derivatives that the chosen
    inner product touches (up to order m in each variable).  ``split_x`` and
    ``split_t`` list interior integrand kinks per axis.  Verification-only.
    """
    if space not in _SPACE_FACTORS:
        raise ValueError(f"unknown tensor space {space!r}; expected 'W' or 'W_hat'")
    sx_id, st_id = _SPACE_FACTORS[space]
    sx = kernels.space_spec(sx_id)
    st = kernels.space_spec(st_id)
    xn, xw = panel_rule(split_at=split_x)
    tn, tw = panel_rule(split_at=split_t)

    total = 0.0
    for dx, ex in _slots(sx):
        for dt, et in _slots(st):
            if ex is not None and et is not None:
                total += float(u(ex, et, dx, dt)) * float(g(ex, et, dx, dt))
            elif ex is None and et is not None:
                vals = np.asarray(u(xn, et, dx, dt)) * np.asarray(g(xn, et, dx, dt))
                total += float(np.dot(xw, vals))
            elif ex is not None and et is None:
                vals = np.asarray(u(ex, tn, dx, dt)) * np.asarray(g(ex, tn, dx, dt))
                total += float(np.dot(tw, vals))
            else:
                xg = xn[:, None]
                tg = tn[None, :]
                vals = np.asarray(u(xg, tg, dx, dt)) * np.asarray(g(xg, tg, dx, dt))
                total += float(xw @ vals @ tw)
    return total
