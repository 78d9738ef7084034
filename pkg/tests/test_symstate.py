import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm
from scipy.special import comb

from symsep.errors import BlochOutOfBall, IndexOutOfRange, InvalidQuantumNumbers, InvalidRank, InvalidState
from symsep.symstate import (
    DickeVector,
    Direction,
    SymDensity,
    dicke_isometry,
    dicke_state,
    embed,
    ghz_state,
    maximally_mixed,
    one_axis_twist,
    qubit_direction,
    random_density,
    rotate,
    rotation_matrix,
    scs_amplitudes,
    scs_matrix,
    scs_mixture,
    state_from_dict,
    state_to_dict,
    symmetric_weight,
    wigner_D_matrix,
    wigner_small_d,
    wigner_small_d_matrix,
)
from symsep.witnesses import spin_matrices

angles = st.floats(0, math.pi, allow_nan=False)
azimuths = st.floats(0, 2 * math.pi, allow_nan=False, exclude_max=True)


# -- value types -------------------------------------------------------------

def test_direction_canonical_folds_theta():
    d = Direction.canonical(2 * math.pi - 0.3, 0.2)
    assert math.isclose(d.theta, 0.3) and math.isclose(d.phi, 0.2 + math.pi)


def test_direction_rejects_out_of_range():
    with pytest.raises(ValueError):
        Direction(4.0, 0.0)


@given(angles, azimuths)
def test_direction_bloch_round_trip(theta, phi):
    d = Direction.canonical(theta, phi)
    np.testing.assert_allclose(Direction.from_bloch(d.bloch).bloch, d.bloch, atol=1e-12)


def test_dicke_vector_validation():
    with pytest.raises(InvalidState):
        DickeVector(2, np.array([1.0, 1.0, 0.0]))
    with pytest.raises(InvalidState):
        DickeVector(2, np.array([1.0, 0.0]))


@pytest.mark.parametrize("matrix", [
    np.array([[0.5, 0.1], [0.2, 0.5]]),          # not Hermitian
    np.diag([0.7, 0.7]),                          # trace
    np.diag([1.2, -0.2]),                         # negative
])
def test_sym_density_validation(matrix):
    with pytest.raises(InvalidState):
        SymDensity(1, matrix)


def test_arrays_are_read_only():
    psi = dicke_state(2, 1)
    with pytest.raises(ValueError):
        psi.amplitudes[0] = 1


# -- coherent states ---------------------------------------------------------

def test_scs_north_is_lowest_weight():
    np.testing.assert_allclose(scs_amplitudes(3, (0.0, 0.0)).amplitudes, [1, 0, 0, 0])


def test_scs_south_is_highest_weight():
    np.testing.assert_allclose(scs_amplitudes(3, (math.pi, 0.0)).amplitudes, [0, 0, 0, 1], atol=1e-15)


def test_scs_equator_single_qubit():
    np.testing.assert_allclose(scs_amplitudes(1, (math.pi / 2, 0.0)).amplitudes, [1 / math.sqrt(2)] * 2)


def test_scs_overlap_law(rng):
    for _ in range(100):
        n = int(rng.integers(1, 9))
        a = (float(np.arccos(rng.uniform(-1, 1))), float(rng.uniform(0, 2 * np.pi)))
        b = (float(np.arccos(rng.uniform(-1, 1))), float(rng.uniform(0, 2 * np.pi)))
        ov = abs(np.vdot(scs_amplitudes(n, a).amplitudes, scs_amplitudes(n, b).amplitudes)) ** 2
        cos_gamma = float(Direction.canonical(*a).bloch @ Direction.canonical(*b).bloch)
        assert abs(ov - ((1 + cos_gamma) / 2) ** n) < 1e-12


@given(st.integers(1, 8), angles, azimuths)
def test_scs_is_product_of_identical_qubits(n, theta, phi):
    # oracle: build the N-fold tensor product directly in qubit space
    qubit = np.array([math.sin(theta / 2) * np.exp(-1j * phi), math.cos(theta / 2)])  # (|0>, |1>)
    full = qubit
    for _ in range(n - 1):
        full = np.kron(full, qubit)
    got = embed(scs_amplitudes(n, (theta, phi)))
    assert abs(abs(np.vdot(full, got)) - 1) < 1e-12


def test_scs_matrix_matches_single():
    theta, phi = np.array([0.3, 1.7]), np.array([2.0, 5.1])
    M = scs_matrix(5, theta, phi)
    for g in range(2):
        np.testing.assert_allclose(M[:, g], scs_amplitudes(5, (theta[g], phi[g])).amplitudes, atol=1e-14)


# -- Wigner d and rotations --------------------------------------------------

def test_small_d_spin_one_zero_zero():
    assert math.isclose(wigner_small_d(1, 0, 0, 0.8), math.cos(0.8), rel_tol=1e-14)


def test_small_d_magnitude_of_lowest_column():
    S, M, th = 2.5, 0.5, 1.1
    expected = math.sqrt(comb(5, 3)) * math.cos(th / 2) ** 2 * math.sin(th / 2) ** 3
    assert math.isclose(abs(wigner_small_d(S, M, -S, th)), expected, rel_tol=1e-13)


def test_small_d_invalid_labels():
    with pytest.raises(InvalidQuantumNumbers):
        wigner_small_d(1, 0.5, 0, 0.1)


@pytest.mark.parametrize("n", [1, 2, 3, 6, 9])
def test_small_d_against_matrix_exponential(n):
    # d(beta) = exp(-i beta S_y), with S_y from the ladder operators
    _, Sy, _ = spin_matrices(n)
    for beta in (0.0, 0.4, 2.2, math.pi):
        np.testing.assert_allclose(wigner_small_d_matrix(n, beta), expm(-1j * beta * Sy).real, atol=1e-12)


@pytest.mark.parametrize("n", [1, 4, 7])
def test_small_d_is_orthogonal(n):
    d = wigner_small_d_matrix(n, 1.234)
    np.testing.assert_allclose(d @ d.T, np.eye(n + 1), atol=1e-12)


@given(st.integers(1, 7), angles, azimuths)
@settings(max_examples=60)
def test_euler_rotation_of_lowest_weight_gives_scs(n, theta, phi):
    rotated = rotate(dicke_state(n, 0), phi - math.pi, theta, math.pi - phi)
    np.testing.assert_allclose(rotated.amplitudes, scs_amplitudes(n, (theta, phi)).amplitudes, atol=1e-12)


def test_rotation_inverse_and_identity(rng):
    rho = random_density(4, 3)
    np.testing.assert_allclose(rotate(rho, 0, 0, 0).matrix, rho.matrix, atol=1e-15)
    a, b, c = rng.uniform(0, 2 * np.pi, 3)
    back = rotate(rotate(rho, a, b, c), -c, -b, -a)
    np.testing.assert_allclose(back.matrix, rho.matrix, atol=1e-12)


def test_wigner_D_is_unitary():
    D = wigner_D_matrix(5, 0.3, 1.1, -2.0)
    np.testing.assert_allclose(D @ D.conj().T, np.eye(6), atol=1e-12)


def test_rotation_moves_coherent_direction(rng):
    a, b, c = rng.uniform(0, 2 * np.pi, 3)
    d = Direction.canonical(0.7, 2.1)
    moved = rotate(scs_amplitudes(3, d), a, b, c)
    target = Direction.from_bloch(rotation_matrix(a, b, c) @ d.bloch)
    assert abs(abs(np.vdot(moved.amplitudes, scs_amplitudes(3, target).amplitudes)) - 1) < 1e-12


# -- constructors ------------------------------------------------------------

def test_dicke_state_out_of_range():
    with pytest.raises(IndexOutOfRange):
        dicke_state(3, 4)


def test_ghz_amplitudes():
    np.testing.assert_allclose(ghz_state(3).amplitudes, [2 ** -0.5, 0, 0, 2 ** -0.5])


def test_maximally_mixed():
    np.testing.assert_allclose(maximally_mixed(3).matrix, np.eye(4) / 4)


def test_one_axis_twist_phases():
    psi = one_axis_twist(scs_amplitudes(2, (math.pi / 2, 0.0)), 0.1)
    np.testing.assert_allclose(np.abs(psi.amplitudes), np.abs(scs_amplitudes(2, (math.pi / 2, 0.0)).amplitudes))
    assert np.isclose(np.angle(psi.amplitudes[1]), 0.0)
    assert np.isclose(np.angle(psi.amplitudes[0]), -0.1)


def test_scs_mixture_rejects_bad_weights():
    with pytest.raises(InvalidState):
        scs_mixture(2, [0.5, 0.6], [(0, 0), (1, 1)])


def test_random_density_reproducible_and_ranked():
    a, b = random_density(3, 11), random_density(3, 11)
    np.testing.assert_array_equal(a.matrix, b.matrix)
    assert abs(random_density(3, 11, rank=1).purity() - 1) < 1e-12
    assert np.linalg.eigvalsh(a.matrix)[0] > 0
    with pytest.raises(InvalidRank):
        random_density(3, 1, rank=5)


# -- embedding and symmetric weight -----------------------------------------

@pytest.mark.parametrize("n", [1, 3, 6])
def test_dicke_isometry_is_isometric_and_symmetric(n):
    V = dicke_isometry(n)
    np.testing.assert_allclose(V.T @ V, np.eye(n + 1), atol=1e-14)
    # each column is invariant under swapping the first two qubits
    swapped = V.reshape((2, 2) + (2,) * (n - 2) + (n + 1,)).swapaxes(0, 1).reshape(V.shape) if n > 1 else V
    np.testing.assert_allclose(swapped, V)


def test_w_state_embedding():
    # one qubit in |0>: basis states 011, 101, 110
    np.testing.assert_allclose(embed(dicke_state(3, 1)) * math.sqrt(3), [0, 0, 0, 1, 0, 1, 1, 0])


def _h_poly(s, n):
    r = np.linalg.norm(s)
    p, q = (1 + r) / 2, (1 - r) / 2
    return sum(p ** k * q ** (n - k) for k in range(n + 1))


def test_symmetric_weight_examples():
    assert math.isclose(symmetric_weight([0, 0, 0], 2), 0.75, rel_tol=1e-14)
    assert math.isclose(symmetric_weight([0, 0, 0.5], 2), 0.8125, rel_tol=1e-14)
    assert math.isclose(symmetric_weight([0.6, 0, 0.8], 5), 1.0, rel_tol=1e-12)


@given(st.integers(2, 6), st.lists(st.floats(-1, 1), min_size=3, max_size=3))
@settings(max_examples=40)
def test_symmetric_weight_closed_form(n, v):
    # Pi_sym commutes with U^{(x)N}: in the eigenbasis the weight is h_N(p, q)
    s = np.array(v)
    if np.linalg.norm(s) > 1:
        s /= np.linalg.norm(s)
    assert abs(symmetric_weight(s, n) - _h_poly(s, n)) < 1e-12


def test_symmetric_weight_rejects_long_vector():
    with pytest.raises(BlochOutOfBall):
        symmetric_weight([1, 1, 0], 2)


def test_qubit_direction_matches_coherent_state():
    a, b = 0.6, 0.8j
    d = qubit_direction([a, b])
    # a|0> + b|1> is the one-qubit coherent state with amplitudes (b, a) in Dicke order
    assert abs(abs(np.vdot(scs_amplitudes(1, d).amplitudes, [b, a])) - 1) < 1e-12


# -- JSON schema -------------------------------------------------------------

@pytest.mark.parametrize("state", [scs_amplitudes(3, (0.4, 1.0)), random_density(2, 5)])
def test_state_dict_round_trip(state):
    back = state_from_dict(state_to_dict(state))
    assert type(back) is type(state)
    got = back.amplitudes if isinstance(back, DickeVector) else back.matrix
    ref = state.amplitudes if isinstance(state, DickeVector) else state.matrix
    np.testing.assert_allclose(got, ref, atol=1e-15)


@pytest.mark.parametrize("data", [{}, {"n_qubits": 1, "kind": "weird"}, {"n_qubits": 1, "kind": "pure", "amplitudes": [[1, 0]]}])
def test_state_from_dict_rejects(data):
    with pytest.raises(InvalidState):
        state_from_dict(data)
