import numpy as np
import pytest

from rkwave.errors import DiagonalDerivativeUndefined
from rkwave.kernels import eval_kernel
from rkwave.tensor_space import (
    eval_tensor,
    inner_product_numeric_2d,
    kernel_w,
    kernel_w_hat,
    tensor_section,
)

from conftest import Separable, poly, sinusoid

# test functions in W: separable sums, each factor satisfying the factor
# space's constraints (x: f(0)=f(1)=0; t: g(0)=g'(0)=0)
W_MEMBERS = [
    Separable((poly(0, 1, -1), poly(0, 0, 1))),                      # x(1-x) t^2
    Separable((sinusoid(np.pi), poly(0, 0, 0, 1))),                  # sin(pi x) t^3
    Separable((poly(0, 0, 1, -1), poly(0, 0, 1, 1)), (poly(0, 1, -1), poly(0, 0, 0, 0, 1))),
]
W_HAT_MEMBERS = [
    Separable((poly(0, 1), poly(0, 1))),                             # x t
    Separable((sinusoid(1.1, 0.3), poly(1, 0, 0.5))),
]


def test_factorization_is_exact_product():
    K = kernel_w()
    rng = np.random.default_rng(5)
    for _ in range(20):
        x, t, y, s = rng.random(4)
        lhs = eval_tensor(K, (x, t), (y, s))
        rhs = eval_kernel(K.space_factor, x, y) * eval_kernel(K.time_factor, t, s)
        assert lhs == rhs


def test_vanishes_on_dead_edges():
    K = kernel_w()
    assert eval_tensor(K, (0.0, 0.4), (0.3, 0.7)) == 0.0
    assert eval_tensor(K, (0.3, 0.0), (0.3, 0.7)) == 0.0
    assert abs(eval_tensor(K, (1.0, 0.4), (0.3, 0.7))) < 1e-15


def test_argument_parameter_symmetry():
    K = kernel_w()
    a = eval_tensor(K, (0.2, 0.7), (0.6, 0.1))
    b = eval_tensor(K, (0.6, 0.1), (0.2, 0.7))
    assert abs(a - b) < 1e-12
    G = kernel_w_hat()
    a = eval_tensor(G, (0.25, 0.9), (0.8, 0.35))
    b = eval_tensor(G, (0.8, 0.35), (0.25, 0.9))
    assert abs(a - b) < 1e-12


def test_diagonal_guard_propagates():
    K = kernel_w()
    with pytest.raises(DiagonalDerivativeUndefined):
        eval_tensor(K, (0.5, 0.3), (0.5, 0.8), orders=(3, 0, 2, 0))


def test_reproducing_property_w():
    K = kernel_w()
    params = [(0.5, 0.5), (0.3, 0.8), (0.85, 0.25)]
    for u in W_MEMBERS:
        for (y, s) in params:
            got = inner_product_numeric_2d("W", u, tensor_section(K, (y, s)),
                                           split_x=(y,), split_t=(s,))
            assert abs(got - float(u(y, s))) < 1e-6, (y, s)


def test_reproducing_property_w_example_value():
    K = kernel_w()
    u = Separable((poly(0, 1, -1), poly(0, 0, 1)))
    got = inner_product_numeric_2d("W", u, tensor_section(K, (0.5, 0.5)),
                                   split_x=(0.5,), split_t=(0.5,))
    assert got == pytest.approx(0.0625, abs=1e-10)


def test_reproducing_property_w_hat():
    G = kernel_w_hat()
    for u in W_HAT_MEMBERS:
        for (y, s) in [(0.4, 0.9), (0.7, 0.2)]:
            got = inner_product_numeric_2d("W_hat", u, tensor_section(G, (y, s)),
                                           split_x=(y,), split_t=(s,))
            assert abs(got - float(u(y, s))) < 1e-6


def test_reproducing_property_w_hat_example_value():
    G = kernel_w_hat()
    u = Separable((poly(0, 1), poly(0, 1)))
    got = inner_product_numeric_2d("W_hat", u, tensor_section(G, (0.4, 0.9)),
                                   split_x=(0.4,), split_t=(0.9,))
    assert got == pytest.approx(0.36, abs=1e-10)


def test_zero_function():
    zero = Separable()
    K = kernel_w()
    assert inner_product_numeric_2d("W", zero, tensor_section(K, (0.4, 0.6))) == 0.0


def test_unknown_space_rejected():
    zero = Separable()
    with pytest.raises(ValueError):
        inner_product_numeric_2d("V", zero, zero)
