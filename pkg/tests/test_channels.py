import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qwiretap.channels import (
    CQChannel,
    DepolarizingSpec,
    JointCQState,
    additive_channel,
    average_output,
    bsc,
    cq_state,
    depolarizing_channel,
    depolarizing_environment_channel,
    distribution,
    preprocess,
    tensor_power_channel,
    tensor_power_dist,
    uniform,
    weyl_operator,
)
from qwiretap.errors import (
    BudgetExceeded,
    NonStochastic,
    NotIndependent,
    NotPositive,
    SizeMismatch,
)
from qwiretap.hermitian import random_density
from qwiretap.quantities import mutual_info, shannon_entropy


def test_distribution_validation():
    assert np.allclose(distribution([0.25, 0.75]), [0.25, 0.75])
    with pytest.raises(NonStochastic):
        distribution([0.5, 0.6])
    with pytest.raises(NonStochastic):
        distribution([1.2, -0.2])
    with pytest.raises(SizeMismatch):
        distribution([0.5, 0.5], size=3)
    with pytest.raises(SizeMismatch):
        distribution([])


def test_channel_validation():
    with pytest.raises(NotPositive):
        CQChannel(np.stack([np.diag([0.5, 0.6])]))
    with pytest.raises(SizeMismatch):
        CQChannel(np.eye(2))
    with pytest.raises(NonStochastic):
        CQChannel.classical([[0.5, 0.6], [0.5, 0.5]])


def test_bsc_is_commuting_and_classical():
    W = bsc(0.1)
    assert W.alphabet_size == 2 and W.output_dim == 2
    assert W.is_commuting()
    assert np.allclose(W[1], np.diag([0.1, 0.9]))


def test_tensor_power_word_order():
    W = CQChannel.classical([[0.9, 0.1], [0.3, 0.7]])
    W2 = tensor_power_channel(W, 2)
    # word (x1, x2) = (1, 0) has index 2 with x1 most significant
    assert np.allclose(W2[2], np.kron(W[1], W[0]))
    assert np.allclose(tensor_power_dist([0.2, 0.8], 2), [0.04, 0.16, 0.16, 0.64])


def test_tensor_power_budget():
    with pytest.raises(BudgetExceeded):
        tensor_power_channel(bsc(0.1), 20)


@given(st.integers(0, 2**32 - 1))
def test_average_output_is_state(seed):
    rng = np.random.default_rng(seed)
    W = CQChannel(np.stack([random_density(3, rng) for _ in range(4)]))
    p = rng.dirichlet(np.ones(4))
    rho = average_output(W, p)
    assert np.isclose(np.trace(rho).real, 1.0)
    assert np.linalg.eigvalsh(rho)[0] > -1e-12
    state = cq_state(W, p)
    assert np.allclose(state.quantum_marginal(), rho)
    assert np.isclose(state.trace(), 1.0)
    assert state.dense().shape == (12, 12)


def test_joint_state_validation():
    with pytest.raises(SizeMismatch):
        JointCQState(np.array([0.5, 0.5]), np.stack([np.eye(2) / 2]))


def test_preprocess_mixes_outputs():
    W = bsc(0.0)
    V = preprocess(W, [[0.5, 0.5], [1.0, 0.0]])
    assert np.allclose(V[0], np.eye(2) / 2)
    assert np.allclose(V[1], W[0])
    with pytest.raises(SizeMismatch):
        preprocess(W, [[1.0, 0.0, 0.0]])


@pytest.mark.parametrize("d", [2, 3, 4])
def test_weyl_operators_are_unitary_and_orthogonal(d):
    ops = [weyl_operator(d, x, z) for x in range(d) for z in range(d)]
    for U in ops:
        assert np.allclose(U @ U.conj().T, np.eye(d))
    gram = np.array([[np.trace(A.conj().T @ B) for B in ops] for A in ops])
    assert np.allclose(gram, d * np.eye(d * d))


def test_additive_channel_orbit():
    rho = np.diag([0.7, 0.2, 0.1]).astype(complex)
    W = additive_channel(rho, 3)
    assert np.allclose(W[1], np.diag([0.1, 0.7, 0.2]))


def test_depolarizing_spec():
    spec = DepolarizingSpec.independent([0.9, 0.1])
    assert spec.is_independent()
    assert np.allclose(spec.pz, [0.5, 0.5])
    corr = DepolarizingSpec(2, np.array([[0.5, 0.0], [0.0, 0.5]]))
    assert not corr.is_independent()
    with pytest.raises(NotIndependent):
        corr.require_independent()
    with pytest.raises(SizeMismatch):
        DepolarizingSpec(3, np.eye(2) / 2)


def test_depolarizing_channel_fixed_point():
    spec = DepolarizingSpec(2, np.full((2, 2), 0.25))
    rho = random_density(2, np.random.default_rng(0))
    assert np.allclose(depolarizing_channel(spec, rho), np.eye(2) / 2)


@pytest.mark.parametrize("d", [2, 3])
def test_environment_channel_outputs(d):
    rng = np.random.default_rng(d)
    spec = DepolarizingSpec(d, rng.dirichlet(np.ones(d * d)).reshape(d, d))
    W = depolarizing_environment_channel(spec)
    assert W.alphabet_size == d and W.output_dim == d * d
    for rho in W.outputs:
        assert np.isclose(np.trace(rho).real, 1.0)


def test_environment_holevo_equals_bit_flip_entropy():
    # Eve learns the phase-error pattern; with P^X = (0.9, 0.1) that is H(P^X)
    spec = DepolarizingSpec.independent([0.9, 0.1])
    W = depolarizing_environment_channel(spec)
    I_bits = mutual_info(W, uniform(2)) / np.log(2)
    assert np.isclose(I_bits, shannon_entropy([0.9, 0.1]) / np.log(2), atol=1e-12)
    assert abs(I_bits - 0.46899) < 1e-5
