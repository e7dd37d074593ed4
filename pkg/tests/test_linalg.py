import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from funcpool.errors import ShapeError
from funcpool.gradcheck import numerical_gradient, relative_error
from funcpool.linalg import hconcat, identity, matmul, relu, relu_backward

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


def test_matmul_identity():
    m = np.array([[1.5, -2.0, 3.0], [0.25, 4.0, -1.0]])
    assert np.array_equal(matmul(identity(2), m), m)


def test_matmul_hand_example():
    out = matmul([[1, 2], [3, 4]], [[0], [1]])
    assert np.array_equal(out, [[2.0], [4.0]])


def test_matmul_shape_error_names_both_shapes():
    with pytest.raises(ShapeError, match=r"2x3.*2x2"):
        matmul(np.ones((2, 3)), np.ones((2, 2)))


def test_hconcat_dims_and_layout():
    assert hconcat(np.ones((2, 3)), np.zeros((2, 5))).shape == (2, 8)
    assert np.array_equal(hconcat([[1], [2]], [[3], [4]]), [[1, 3], [2, 4]])


def test_hconcat_with_empty_is_identity():
    m = np.arange(6.0).reshape(2, 3)
    assert np.array_equal(hconcat(m, np.zeros((2, 0))), m)


def test_hconcat_row_mismatch():
    with pytest.raises(ShapeError):
        hconcat(np.ones((2, 1)), np.ones((3, 1)))


def test_relu_sign_cases():
    assert np.array_equal(relu([[-1.0, 2.0]]), [[0.0, 2.0]])


def test_relu_backward_is_zero_at_zero():
    assert relu_backward([[0.0, 1.0, -1.0]], [[5.0, 5.0, 5.0]]).tolist() == [[0.0, 5.0, 0.0]]


def test_relu_backward_shape_check():
    with pytest.raises(ShapeError):
        relu_backward(np.ones((2, 2)), np.ones((2, 3)))


def test_relu_finite_difference():
    rng = np.random.default_rng(0)
    x = rng.standard_normal((4, 4))
    proj = rng.standard_normal((4, 4))
    numeric = numerical_gradient(lambda: float(np.sum(relu(x) * proj)), x)
    assert relative_error(relu_backward(x, proj), numeric) < 1e-6


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 5), st.integers(1, 5)), elements=finite))
def test_identity_product_is_exact(m):
    assert np.array_equal(matmul(identity(m.shape[0]), m), m)


@settings(max_examples=50, deadline=None)
@given(
    st.integers(1, 4).flatmap(
        lambda r: st.tuples(
            arrays(np.float64, st.tuples(st.just(r), st.integers(0, 4)), elements=finite),
            arrays(np.float64, st.tuples(st.just(r), st.integers(0, 4)), elements=finite),
        )
    )
)
def test_hconcat_left_block_recovered(pair):
    a, b = pair
    out = hconcat(a, b)
    assert np.array_equal(out[:, : a.shape[1]], a)
    assert np.array_equal(out[:, a.shape[1] :], b)


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 4), st.integers(1, 4)), elements=finite))
def test_relu_idempotent(x):
    assert np.array_equal(relu(relu(x)), relu(x))
