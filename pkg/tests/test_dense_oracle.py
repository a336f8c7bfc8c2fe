import math

import numpy as np
import pytest

from cmvroots.companion import companion_dense, cyclic_shift, initial_state
from cmvroots.dense_oracle import (
    closest_eig2x2,
    dense_eigenvalues,
    dense_qr,
    dense_qr_step,
    eig2x2,
    vandermonde_condition,
)
from cmvroots.poly import gen_P4, gen_P5

EPS = np.finfo(float).eps


def staircase_hull(a, tol):
    """Running max over columns of the last row holding an entry above ``tol``."""
    n = a.shape[0]
    last = [max([i for i in range(n) if abs(a[i, j]) > tol], default=0) for j in range(n)]
    return np.maximum.accumulate(last)


def test_dense_qr_identity():
    q, r = dense_qr(np.eye(4))
    assert np.allclose(q, np.eye(4)) and np.allclose(r, np.eye(4))


def test_dense_qr_permutation():
    a = np.array([[0, 1], [1, 0]], dtype=complex)
    q, r = dense_qr(a)
    assert np.allclose(r, np.eye(2))
    assert np.allclose(q @ r, a)


def test_dense_qr_nonnegative_diagonal():
    rng = np.random.default_rng(1)
    a = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    q, r = dense_qr(a)
    d = np.diag(r)
    assert np.all(d.real >= 0) and np.allclose(d.imag, 0)
    assert np.allclose(q @ r, a)
    assert np.allclose(q.conj().T @ q, np.eye(6))


def test_dense_qr_rejects_rectangular():
    with pytest.raises(ValueError):
        dense_qr(np.ones((2, 3)))


def test_dense_step_on_diagonal_is_identity():
    a = np.diag([1.0, 2.0 + 1j, -3.0])
    for shift in (0, 0.5, 2 + 1j):
        assert np.allclose(dense_qr_step(a, shift), a, atol=1e-15)


def test_zero_shift_step_keeps_staircase_hull():
    a = initial_state(gen_P5(8, 2)).to_dense()
    out = dense_qr_step(a, 0.0)
    tol = 1e-13 * np.abs(a).max()
    assert np.all(staircase_hull(out, tol) <= staircase_hull(a, tol))


def test_eig2x2_and_wilkinson_choice():
    assert sorted(np.real(eig2x2(3, -2, 1, 0))) == pytest.approx([1, 2])
    assert closest_eig2x2(1, 2, 3, 4) == pytest.approx((5 + math.sqrt(33)) / 2)
    assert closest_eig2x2(0, 0, 0, 5) == 5
    assert closest_eig2x2(0, 1, 0, 0) == 0


def test_dense_eigenvalues_companion_of_two_roots():
    run = dense_eigenvalues(np.array([[3, -2], [1, 0]]))
    assert sorted(run.roots.real) == pytest.approx([1, 2])
    assert run.converged


def test_dense_eigenvalues_cyclic_shift():
    run = dense_eigenvalues(cyclic_shift(6))
    ref = np.exp(2j * np.pi * np.arange(6) / 6)
    assert run.converged
    for z in ref:
        assert np.min(np.abs(run.roots - z)) < 1e-12


def test_dense_eigenvalues_chebyshev_t10():
    run = dense_eigenvalues(companion_dense(gen_P4("chebyshev", 10)))
    ref = np.cos((2 * np.arange(1, 11) - 1) * np.pi / 20)
    assert np.allclose(np.sort(run.roots.real), np.sort(ref), atol=1e-10)
    assert np.abs(run.roots.imag).max() < 1e-10


def test_dense_eigenvalues_max_sweeps_flag():
    run = dense_eigenvalues(companion_dense(gen_P5(12, 0)), max_sweeps=1)
    assert not run.converged and run.flags == ["max_sweeps reached"]
    assert len(run.roots) == 12


def test_vandermonde_examples():
    assert vandermonde_condition([1, -1]) == pytest.approx(2, rel=1e-14)
    assert vandermonde_condition([1, 1]) == math.inf
    assert vandermonde_condition(np.exp(2j * np.pi * np.arange(4) / 4)) == pytest.approx(4, rel=1e-14)


def test_vandermonde_finite_for_widely_spread_roots():
    lam = np.array([0.5, 2.0 + 1j, -0.3j, 4.0])
    assert vandermonde_condition(lam) > 1
    assert math.isfinite(vandermonde_condition(np.concatenate([lam, 1e3 * lam])))
