import numpy as np
import pytest

from linattn import make_inputs


@pytest.fixture
def ex_a():
    """N=2, r=1, d=1, binary causal; hand expansion gives [[10],[87]]."""
    inp = make_inputs([[2.0], [3.0]], [[1.0], [4.0]], [[5.0], [6.0]])
    return inp, np.array([[10.0], [87.0]])


@pytest.fixture
def ex_b():
    """Same tensors under gamma=0.5 decay; hand expansion gives [[10],[79.5]]."""
    inp = make_inputs([[2.0], [3.0]], [[1.0], [4.0]], [[5.0], [6.0]],
                      gamma=0.5, decay=True)
    return inp, np.array([[10.0], [79.5]])


@pytest.fixture
def ex_c():
    """All-ones B=C reduces the product to a cumsum of V."""
    ones = np.ones((3, 1))
    v = np.array([[1.0, 0.0], [0.0, 1.0], [2.0, 2.0]])
    inp = make_inputs(ones, ones, v)
    return inp, np.array([[1.0, 0.0], [1.0, 1.0], [3.0, 3.0]])


@pytest.fixture
def ex_d():
    """Single row: output is dot(B[0], C[0]) * V[0]."""
    rng = np.random.default_rng(3)
    b = rng.standard_normal((1, 4))
    c = rng.standard_normal((1, 4))
    v = rng.standard_normal((1, 3))
    inp = make_inputs(b, c, v)
    return inp, float(b[0] @ c[0]) * v


@pytest.fixture
def ex_e():
    """gamma=0 decay keeps only the diagonal of the mask."""
    rng = np.random.default_rng(4)
    b = rng.standard_normal((5, 3))
    c = rng.standard_normal((5, 3))
    v = rng.standard_normal((5, 2))
    inp = make_inputs(b, c, v, gamma=0.0, decay=True)
    expected = (b * c).sum(axis=1, keepdims=True) * v
    return inp, expected
