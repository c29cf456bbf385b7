import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from nshess import linalg
from nshess.exceptions import RankDeficientError


def coordinate_transfer_matrix(n, k):
    """Columns e_i - e_k (i != k) and -e_k; the identity when k = 0."""
    if k == 0:
        return np.eye(n)
    e = np.eye(n)
    m = e - e[:, k - 1][:, None]
    m[:, k - 1] = -e[:, k - 1]
    return m


def check_penrose(a, p, tol):
    # Each identity is checked at the scale of its own result; the products
    # a p and p a are projectors, so plain tol covers their symmetry.
    scale_a = 1.0 + np.linalg.norm(a, 2)
    scale_p = 1.0 + np.linalg.norm(p, 2)
    np.testing.assert_allclose(a @ p @ a, a, atol=tol * scale_a, rtol=0)
    np.testing.assert_allclose(p @ a @ p, p, atol=tol * scale_p, rtol=0)
    np.testing.assert_allclose(a @ p, (a @ p).T, atol=tol, rtol=0)
    np.testing.assert_allclose(p @ a, (p @ a).T, atol=tol, rtol=0)


@given(
    rows=st.integers(1, 8),
    cols=st.integers(1, 8),
    data=st.data(),
)
@hyp_settings(max_examples=60, deadline=None)
def test_pseudoinverse_penrose_properties(rows, cols, data):
    a = data.draw(
        arrays(
            np.float64,
            (rows, cols),
            elements=st.floats(-10.0, 10.0, allow_nan=False, allow_infinity=False),
        )
    )
    p = linalg.pseudoinverse(a)
    check_penrose(a, p, 1e-10)


def test_pseudoinverse_matches_numpy_on_random_matrices():
    rng = np.random.default_rng(7)
    for _ in range(50):
        a = rng.standard_normal((rng.integers(1, 7), rng.integers(1, 7)))
        np.testing.assert_allclose(
            linalg.pseudoinverse(a), np.linalg.pinv(a), atol=1e-12, rtol=1e-10
        )


def test_pseudoinverse_of_rank_deficient_matrix():
    a = np.array([[1.0, 2.0], [2.0, 4.0]])
    p = linalg.pseudoinverse(a)
    check_penrose(a, p, 1e-12)
    assert linalg.rank(a) == 1


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_normalized_transfer_matrix_pseudoinverse_is_doubling(n):
    # E_n is involutory, so pinv of E_n / sqrt(2) is sqrt(2) E_n, which is
    # twice the normalized matrix itself.
    e_hat = coordinate_transfer_matrix(n, n) / np.sqrt(2.0)
    np.testing.assert_allclose(
        linalg.pseudoinverse(e_hat), 2.0 * e_hat, atol=1e-13, rtol=0
    )


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_normalized_transfer_inverse_frobenius_norm(n):
    e_hat = coordinate_transfer_matrix(n, n) / np.sqrt(2.0)
    got = linalg.frobenius_norm(np.linalg.inv(e_hat))
    np.testing.assert_allclose(got, np.sqrt(4.0 * n - 2.0), rtol=1e-13)


def test_frobenius_norm_of_two_dim_transfer_inverse():
    e_hat = coordinate_transfer_matrix(2, 2) / np.sqrt(2.0)
    np.testing.assert_allclose(
        linalg.frobenius_norm(np.linalg.inv(e_hat)), 2.449489742783178, rtol=1e-14
    )


def test_spectral_norm_against_power_iteration():
    rng = np.random.default_rng(11)
    a = rng.standard_normal((5, 3))
    v = rng.standard_normal(3)
    for _ in range(500):
        v = a.T @ (a @ v)
        v /= np.linalg.norm(v)
    sigma = np.linalg.norm(a @ v)
    np.testing.assert_allclose(linalg.spectral_norm(a), sigma, rtol=1e-10)


def test_norms_on_known_matrix():
    a = np.array([[3.0, 0.0], [0.0, 4.0]])
    assert linalg.spectral_norm(a) == 4.0
    assert linalg.frobenius_norm(a) == 5.0


def test_frobenius_dominates_spectral():
    rng = np.random.default_rng(3)
    for _ in range(20):
        a = rng.standard_normal((4, 4))
        assert linalg.frobenius_norm(a) >= linalg.spectral_norm(a) - 1e-12


def test_rank_counts_directions():
    assert linalg.rank(np.eye(3)) == 3
    assert linalg.rank(np.ones((3, 3))) == 1
    assert linalg.rank(np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 1.0]])) == 2


def test_rank_custom_tolerance():
    a = np.diag([1.0, 1e-6])
    assert linalg.rank(a) == 2
    assert linalg.rank(a, tol=1e-3) == 1
    with pytest.raises(ValueError):
        linalg.rank(a, tol=-1.0)


def test_solve_round_trip():
    rng = np.random.default_rng(5)
    a = rng.standard_normal((4, 4)) + 4.0 * np.eye(4)
    x = rng.standard_normal(4)
    np.testing.assert_allclose(linalg.solve(a, a @ x), x, rtol=1e-10)


def test_solve_rejects_singular_matrix_by_name():
    a = np.array([[1.0, 1.0], [1.0, 1.0]])
    with pytest.raises(RankDeficientError) as exc:
        linalg.solve(a, np.ones(2), name="S^T")
    assert exc.value.name == "S^T"
    assert exc.value.rank_found == 1
    assert exc.value.rank_needed == 2


def test_solve_rejects_rectangular_matrix():
    with pytest.raises(ValueError, match="square"):
        linalg.solve(np.ones((2, 3)), np.ones(2))


@pytest.mark.parametrize("bad", [np.empty((0, 2)), np.array([1.0, 2.0])])
def test_matrix_validation_rejects_bad_shapes(bad):
    with pytest.raises(ValueError):
        linalg.pseudoinverse(bad)


def test_matrix_validation_rejects_non_finite():
    with pytest.raises(ValueError, match="non-finite"):
        linalg.spectral_norm(np.array([[1.0, np.nan]]))
