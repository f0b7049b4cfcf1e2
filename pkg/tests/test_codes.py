import math

import numpy as np
import pytest

from qwiretap.channels import (
    CQChannel,
    DepolarizingSpec,
    JointCQState,
    bsc,
    depolarizing_environment_channel,
    tensor_power_channel,
    uniform,
)
from qwiretap.codes import (
    affine_code_ensemble,
    build_affine_code,
    build_coset_code,
    build_random_code,
    code_from_codebook,
    decode_ml,
    decode_pgm,
    evaluate_code,
    privacy_amp_experiment,
    random_code_ensemble,
    resolvability_experiment,
)
from qwiretap.errors import (
    BadRepresentatives,
    BudgetExceeded,
    IndivisibleDomain,
    NonCommuting,
    NotInjective,
    NotNested,
)
from qwiretap.gf import (
    GFMatrix,
    ToeplitzEnsemble,
    all_vectors,
    code_pair,
    default_z,
    field_multiplier_ensemble,
    hash_family,
    toeplitz_injective_ensemble,
    toeplitz_submodule_ensemble,
)
from qwiretap.hermitian import random_density
from qwiretap.quantities import kl_divergence


def _bsc_n(eps, n):
    return tensor_power_channel(bsc(eps), n)


def _classical_matrix(W):
    return np.real(np.einsum("xii->xi", W.outputs))


def classical_code_oracle(TB, TE, enc):
    """Average ML error and leak for diagonal channels, from the stochastic matrices."""
    M = enc.shape[0]
    PB = enc @ TB
    err = 1 - np.sum(PB.max(axis=0)) / M
    PE = enc @ TE
    ref = PE.mean(axis=0)
    leak = np.mean([kl_divergence(r, ref) for r in PE])
    return err, leak


def test_coset_code_matches_classical_oracle():
    q, k, l1, l2 = 2, 3, 2, 1
    WB, WE = _bsc_n(0.05, 3), _bsc_n(0.2, 3)
    for X in ToeplitzEnsemble(q, k - l2, l2).enumerate():
        C1, C2 = code_pair(q, k, l1, l2, X, default_z(q, k, l1, l2))
        code = build_coset_code(WB, WE, C1, C2)
        rep = evaluate_code(code, WB, WE)
        err, leak = classical_code_oracle(_classical_matrix(WB), _classical_matrix(WE), code.encoders)
        assert rep.eps == pytest.approx(err, abs=1e-12)
        assert rep.I == pytest.approx(leak, abs=1e-12)
        assert rep.I <= rep.I_max + 1e-12
        assert rep.d1 <= rep.d1_max + 1e-12


def test_coset_code_reference_example():
    X = GFMatrix(2, [[1], [1]])
    C1, C2 = code_pair(2, 3, 2, 1, X, default_z(2, 3, 2, 1))
    WB, WE = _bsc_n(0.05, 3), _bsc_n(0.2, 3)
    code = build_coset_code(WB, WE, C1, C2)
    assert code.M == 2
    assert np.allclose(code.encoders.sum(axis=1), 1)
    assert code.decoder.check()


def test_not_nested():
    C1 = GFMatrix(2, [[1], [0], [0]])
    C2 = GFMatrix(2, [[0], [1], [0]])
    with pytest.raises(NotNested):
        build_coset_code(_bsc_n(0.1, 3), _bsc_n(0.2, 3), C1, C2)


def test_affine_code_and_errors():
    q = 2
    WB, WE = _bsc_n(0.05, 3), _bsc_n(0.2, 3)
    C1 = GFMatrix(q, [[1, 0], [0, 1], [0, 0]])
    f = GFMatrix(q, [[1], [0], [0]])
    code = build_affine_code(WB, WE, C1, f, [[0, 0, 0], [0, 1, 0]], uniform(2), [0, 0, 1])
    assert code.M == 2
    assert evaluate_code(code, WB, WE).eps < 0.5
    with pytest.raises(BadRepresentatives):
        build_affine_code(WB, WE, C1, f, [[0, 0, 0], [1, 0, 0]], uniform(2), [0, 0, 0])
    with pytest.raises(NotInjective):
        build_affine_code(WB, WE, C1, GFMatrix(q, [[0], [0], [1]]), [[0, 0, 0], [0, 1, 0]],
                          uniform(2), [0, 0, 0])


def test_random_codebook_code():
    WB, WE = bsc(0.05), bsc(0.2)
    code = build_random_code(WB, WE, 2, uniform(2), uniform(2), seed=3)
    rep = evaluate_code(code, WB, WE)
    assert 0 <= rep.eps <= 1 and rep.I >= 0
    code2 = code_from_codebook(WB, [[0, 1]], [1.0])
    assert evaluate_code(code2, WB, WE).eps == pytest.approx(0.05)


def test_decoders():
    W = bsc(0.1)
    ml = decode_ml(W, np.eye(2))
    assert ml.check()
    assert np.allclose(ml.elements[0], np.diag([1, 0]))
    rng = np.random.default_rng(0)
    Wq = CQChannel(np.stack([random_density(2, rng) for _ in range(3)]))
    pgm = decode_pgm(Wq, np.eye(3))
    assert pgm.check()
    with pytest.raises(NonCommuting):
        decode_ml(Wq, np.eye(3))


def _eve_depolarizing(px):
    return depolarizing_environment_channel(DepolarizingSpec.independent(px))


def test_codebook_resolvability_exhaustive():
    W = CQChannel(np.stack([random_density(2, np.random.default_rng(i)) for i in range(3)]))
    rep = resolvability_experiment("codebook", W, {"PA": [0.5, 0.3, 0.2], "p": [0.2, 0.3, 0.5]})
    assert rep.mode == "exhaustive" and rep.configurations == 27
    assert rep.passed


def test_codebook_monte_carlo_close_to_exact():
    W = _eve_depolarizing([0.8, 0.2])
    params = {"PA": [0.5, 0.3, 0.2], "p": [0.6, 0.4]}
    exact = resolvability_experiment("codebook", W, params, s_grid=(0.5,))
    mc = resolvability_experiment("codebook", W, params, s_grid=(0.5,), mode="monte_carlo",
                                  trials=4000, seed=11)
    r, m = exact.records[0], mc.records[0]
    assert abs(m["mean_D"] - r["mean_D"]) <= 5 * m["stderr_D"]
    assert not mc.hard and exact.hard


@pytest.mark.parametrize("ens_fn", [field_multiplier_ensemble, toeplitz_injective_ensemble])
def test_injective_resolvability(ens_fn):
    W = _bsc_n(0.1, 2)
    rep = resolvability_experiment("injective", W, {"q": 2, "k": 2, "ensemble": ens_fn(2, 2, 1),
                                                    "PA": [0.7, 0.3]})
    assert rep.passed


def test_submodule_resolvability():
    W = _bsc_n(0.15, 2)
    rep = resolvability_experiment("submodule", W, {"q": 2, "k": 2,
                                                    "ensemble": toeplitz_submodule_ensemble(2, 2, 1)})
    assert rep.passed


def test_resolvability_budget():
    W = bsc(0.1)
    with pytest.raises(BudgetExceeded):
        resolvability_experiment("codebook", W, {"PA": uniform(30), "p": [0.5, 0.5]}, mode="exhaustive")


def _small_state(seed):
    rng = np.random.default_rng(seed)
    return JointCQState(rng.dirichlet(np.ones(4)), np.stack([random_density(2, rng) for _ in range(4)]))


def test_privacy_amplification_24_permutations():
    st_ = _small_state(0)
    fam = hash_family("partition_permutation", domain=4, M=2)
    rep = privacy_amp_experiment(st_, fam, st_.quantum_marginal())
    assert rep.configurations == 24
    assert rep.passed
    with pytest.raises(IndivisibleDomain):
        hash_family("partition_permutation", domain=4, M=3)


def test_privacy_amplification_trivial_state():
    # Eve's states all equal, uniform A: the hashed message is exactly uniform
    st_ = JointCQState(uniform(4), np.stack([np.eye(2) / 2] * 4))
    fam = hash_family("partition_permutation", domain=4, M=2)
    rep = privacy_amp_experiment(st_, fam, st_.quantum_marginal())
    assert rep.records[0]["mean_d1_prime"] == pytest.approx(0.0, abs=1e-14)


def test_random_code_ensemble_mean_below_bound():
    rep = random_code_ensemble(bsc(0.2), 2, uniform(2), uniform(2))
    assert rep.passed
    assert rep.records[0]["best_I"] <= rep.records[0]["mean_I"] + 1e-15
    # with a single message there is nothing to leak
    assert random_code_ensemble(bsc(0.2), 1, uniform(2), uniform(2)).records[0]["mean_I"] == 0.0


def test_affine_code_ensemble():
    WE = _bsc_n(0.2, 2)
    mats = [(1 / 3, GFMatrix(2, np.array(t).reshape(2, 1)))
            for t in all_vectors(2, 2)[1:].tolist()]
    rep = affine_code_ensemble(WE, 2, 2, 2, mats, uniform(2))
    assert rep.passed


def test_report_serializes():
    rep = random_code_ensemble(bsc(0.2), 2, uniform(2), uniform(2), s_grid=(1.0,))
    d = rep.as_dict()
    assert d["experiment"] == "random_code" and d["passed"] is True
    assert math.isfinite(d["records"][0]["bound"])
