import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from nonrecip import CyclicAtomParams, build_full_hamiltonian
from nonrecip.errors import IntegrationError, InvalidInputError
from nonrecip.operators import as_operator, expm, integrate_linear

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def complex_matrices(dim=3):
    return arrays(np.float64, (2, dim, dim), elements=finite).map(lambda x: x[0] + 1j * x[1])


def hermitian(m):
    return 0.5 * (m + m.conj().T)


def dissipative(m):
    """H0 - i K with H0 Hermitian and K positive semidefinite."""
    k = m.conj().T @ m / (1.0 + np.abs(m).max())
    return hermitian(m) - 1j * k


def taylor_expm(a, terms=80):
    out = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for n in range(1, terms):
        term = term @ a / n
        out = out + term
    return out


def test_expm_zero_time_is_identity():
    h = build_full_hamiltonian(CyclicAtomParams())
    np.testing.assert_array_equal(expm(h, 0.0), np.eye(3))


def test_rabi_half_period_transfers_fully():
    u = expm([[0, 1], [1, 0]], math.pi / 2)
    assert abs(abs(u[1, 0]) ** 2 - 1.0) < 1e-12


def test_defective_jordan_block_exact():
    # H = [[0, 1], [0, 0]] has a single eigenvector; exp(-iHt) = I - iHt
    for t in (0.1, 1.0, 7.5):
        np.testing.assert_allclose(expm([[0, 1], [0, 0]], t), [[1, -1j * t], [0, 1]], atol=1e-13)


def test_expm_matches_taylor_series_for_small_norm(rng):
    for _ in range(20):
        m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        m *= 0.5 / np.abs(m).max()
        np.testing.assert_allclose(expm(m, 1.0), taylor_expm(-1j * m), atol=1e-14)


def test_expm_agrees_with_scipy_on_large_norm(rng):
    for _ in range(20):
        m = 30 * (rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)))
        m = dissipative(m)
        np.testing.assert_allclose(expm(m, 1.0), scipy.linalg.expm(-1j * m), atol=1e-11)


def test_reference_expm_matches_ode():
    h = build_full_hamiltonian(CyclicAtomParams().with_flux(math.pi / 2))
    traj = integrate_linear(h, np.eye(3), 1.0)
    assert traj.t[-1] == 1.0
    np.testing.assert_allclose(traj.final, expm(h, 1.0), atol=1e-8, rtol=0)


@pytest.mark.parametrize("bad", [[[np.nan, 0], [0, 0]], [[np.inf, 0], [0, 0]]])
def test_non_finite_operator_rejected(bad):
    with pytest.raises(InvalidInputError):
        expm(bad, 1.0)


def test_shape_validation():
    with pytest.raises(InvalidInputError):
        as_operator(np.zeros((4, 4)))
    with pytest.raises(InvalidInputError):
        as_operator(np.zeros((2, 3)))
    with pytest.raises(InvalidInputError):
        expm(np.zeros((2, 2)), -1.0)


def test_returned_operators_are_read_only():
    u = expm(np.eye(2), 1.0)
    with pytest.raises(ValueError):
        u[0, 0] = 0


def test_integrate_zero_hamiltonian_is_constant():
    psi0 = np.array([0.6, 0.8j, 0.0])
    traj = integrate_linear(np.zeros((3, 3)), psi0, 2.0)
    assert np.all(traj.psi == psi0)


def test_integrate_scalar_decay():
    traj = integrate_linear(np.diag([-1j, 0, 0]), [1, 0, 0], 1.0)
    assert abs(abs(traj.final[0]) ** 2 - math.exp(-2.0)) < 1e-9


def test_integrate_zero_span():
    traj = integrate_linear(np.eye(2), [1, 0], 0.0)
    assert len(traj.t) == 1


def test_integrate_reports_underflow():
    # explosive growth forces the error estimate to overflow
    with pytest.raises(IntegrationError) as info:
        integrate_linear(np.diag([1e300j, 0]), [1, 0], 1.0)
    assert info.value.t_last >= 0.0


def test_integrate_rejects_bad_tolerance():
    with pytest.raises(InvalidInputError):
        integrate_linear(np.eye(2), [1, 0], 1.0, tol=0.0)


@given(complex_matrices(), st.floats(0, 2), st.floats(0, 2))
def test_semigroup_property(m, t1, t2):
    h = dissipative(m)
    np.testing.assert_allclose(expm(h, t1 + t2), expm(h, t2) @ expm(h, t1), atol=1e-10, rtol=0)


@given(complex_matrices(), st.floats(0, 10))
def test_unitarity_for_hermitian(m, t):
    u = expm(hermitian(m), t)
    assert np.max(np.abs(u.conj().T @ u - np.eye(3))) < 1e-12


@given(complex_matrices())
def test_integrator_agrees_with_expm(m):
    h = dissipative(m)
    tol = 1e-10
    traj = integrate_linear(h, np.eye(3), 1.0, tol=tol)
    assert np.max(np.abs(traj.final - expm(h, 1.0))) <= 10 * tol


@given(arrays(np.float64, (3, 3), elements=finite), st.lists(st.floats(0, 5), min_size=3, max_size=3))
def test_norm_is_monotone_under_decay(re, gammas):
    h0 = hermitian(re + 1j * re.T)
    h = h0 - 1j * np.diag(gammas)
    psi0 = np.array([1, 1j, -1]) / math.sqrt(3)
    norms = np.linalg.norm(integrate_linear(h, psi0, 2.0).psi, axis=1)
    assert np.all(np.diff(norms) <= 1e-9)
    assert norms[-1] <= 1 + 1e-9
