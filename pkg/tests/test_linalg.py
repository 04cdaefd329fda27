import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jjbell.errors import CapacityError, UsageError
from jjbell.linalg import (
    PAULI_I,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    HermitianOperator,
    PureState,
    UnitaryOperator,
    hermitian_expm,
    inner,
    max_qubits,
    set_max_qubits,
    tensor,
)

from conftest import random_hermitian, random_state


def test_tensor_basis_states():
    out = tensor(PureState.basis("0"), PureState.basis("0"))
    assert isinstance(out, PureState)
    np.testing.assert_array_equal(out.amps, [1, 0, 0, 0])


def test_tensor_identity():
    out = tensor(HermitianOperator(PAULI_I), HermitianOperator(PAULI_I))
    np.testing.assert_array_equal(out.matrix, np.eye(4))


def test_tensor_sigma_y_pair_matches_literal():
    literal = np.array(
        [[0, 0, 0, -1], [0, 0, 1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]], dtype=complex
    )
    yy = tensor(HermitianOperator(PAULI_Y), HermitianOperator(PAULI_Y))
    np.testing.assert_array_equal(yy.matrix, literal)
    np.testing.assert_array_equal(yy.matrix @ PureState.basis("00").amps, [0, 0, 0, -1])


def test_qubit_one_is_most_significant():
    # X on qubit 1 maps |00> to |10>, index 2
    x1 = tensor(PAULI_X, PAULI_I)
    assert np.argmax(np.abs(x1 @ PureState.basis("00").amps)) == 2


def test_tensor_associative(rng):
    a, b, c = (random_hermitian(rng, 2) for _ in range(3))
    left = tensor(tensor(a, b), c)
    right = tensor(a, tensor(b, c))
    assert np.max(np.abs(left - right)) <= 1e-14


def test_capacity_error():
    old = max_qubits()
    try:
        set_max_qubits(3)
        with pytest.raises(CapacityError):
            tensor(np.eye(4), np.eye(4))
        with pytest.raises(CapacityError):
            PureState.basis("0000")
    finally:
        set_max_qubits(old)


def test_expm_zero_is_identity():
    u = hermitian_expm(HermitianOperator(np.zeros((2, 2))), 3.7)
    np.testing.assert_allclose(u.matrix, np.eye(2), atol=1e-15)


def test_expm_sigma_z_half_turn():
    u = hermitian_expm(HermitianOperator(PAULI_Z), np.pi)
    np.testing.assert_allclose(u.matrix, np.diag([-1, -1]), atol=1e-15)
    # diag(-i, i) is the quarter turn under exp(-iHt)
    u = hermitian_expm(HermitianOperator(PAULI_Z), np.pi / 2)
    np.testing.assert_allclose(u.matrix, np.diag([-1j, 1j]), atol=1e-15)


def test_expm_matches_taylor_series(rng):
    h = random_hermitian(rng, 4)
    t = 0.3
    # truncated power series as an independent reference
    ref = np.eye(4, dtype=complex)
    term = np.eye(4, dtype=complex)
    for k in range(1, 60):
        term = term @ (-1j * t * h) / k
        ref = ref + term
    u = hermitian_expm(HermitianOperator(h), t)
    np.testing.assert_allclose(u.matrix, ref, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    t1=st.floats(-5, 5),
    t2=st.floats(-5, 5),
    n=st.integers(1, 4),
)
def test_expm_group_law_and_unitarity(seed, t1, t2, n):
    rng = np.random.default_rng(seed)
    h = HermitianOperator(random_hermitian(rng, 2**n))
    u1, u2 = hermitian_expm(h, t1), hermitian_expm(h, t2)
    u12 = hermitian_expm(h, t1 + t2)
    assert np.max(np.abs(u1.matrix @ u2.matrix - u12.matrix)) <= 1e-9
    assert np.max(np.abs(u1.matrix.conj().T @ u1.matrix - np.eye(2**n))) <= 1e-10
    psi = PureState(random_state(rng, 2**n))
    assert abs(np.linalg.norm(u1.matrix @ psi.amps) - 1) <= 1e-12


def test_real_symmetric_path_matches_complex_path(rng):
    a = rng.normal(size=(8, 8))
    h = HermitianOperator(a + a.T)
    assert h.is_real
    u_real = hermitian_expm(h, 0.9).matrix
    w, v = np.linalg.eigh(h.matrix)
    ref = (v * np.exp(-0.9j * w)) @ v.conj().T
    np.testing.assert_allclose(u_real, ref, atol=1e-12)


def test_inner_products():
    s00, s11 = PureState.basis("00"), PureState.basis("11")
    assert inner(s00, s00) == 1
    assert inner(s00, s11) == 0
    plus = PureState.normalized([1, 1])
    assert inner(plus, PureState.basis("0")) == pytest.approx(1 / np.sqrt(2), abs=1e-15)


def test_inner_conjugates_first_argument():
    a = PureState([1j, 0])
    b = PureState([1, 0])
    assert inner(a, b) == -1j


def test_inner_dimension_mismatch():
    with pytest.raises(UsageError):
        inner(PureState.basis("0"), PureState.basis("00"))


@pytest.mark.parametrize(
    "amps", [[1, 1], [1, 0, 0], [np.nan, 1]], ids=["unnormalized", "not-power-of-two", "nan"]
)
def test_state_validation(amps):
    with pytest.raises(UsageError):
        PureState(amps)


def test_non_hermitian_rejected():
    with pytest.raises(UsageError):
        HermitianOperator([[0, 1], [0, 0]])


def test_unitary_adjoint_and_product():
    u = UnitaryOperator(PAULI_X)
    assert isinstance(u @ u, UnitaryOperator)
    np.testing.assert_array_equal((u @ u.adjoint()).matrix, np.eye(2))
