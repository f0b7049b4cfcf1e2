"""Scalar information quantities for states, cq channels and distributions.

All logarithms are natural. Joint cq states are handled block by block and
never materialized as dense matrices.
"""

import numpy as np

from .channels import average_output, distribution
from .errors import InputOutOfRange, InvalidTable, SupportViolation
from .hermitian import SUPPORT_TOL, hermitian, mlog, mpow, support_projector, trace_norm

PHI_EXPONENT_CAP = 1e6


def _tr(A):
    return float(np.real(np.trace(A)))


def _check_support(rho, sigma, tol=1e-10):
    P = support_projector(sigma)
    out = rho - P @ rho @ P
    if trace_norm(out) > tol * max(1.0, _tr(rho)):
        raise SupportViolation("supp(rho) is not contained in supp(sigma)")


def _sandwich(rho, sigma):
    """sigma^{-1/2} rho sigma^{-1/2} on the support of sigma."""
    S = mpow(sigma, -0.5)
    X = S @ rho @ S
    return (X + X.conj().T) / 2


def rel_entropy(rho, sigma):
    """Umegaki relative entropy Tr rho (log rho - log sigma)."""
    rho, sigma = hermitian(rho), hermitian(sigma)
    _check_support(rho, sigma)
    return _tr(rho @ (mlog(rho) - mlog(sigma)))


def rel_entropy_lower(rho, sigma):
    """Tr rho log(sigma^{-1/2} rho sigma^{-1/2}).

    Returns ``-inf`` when rho carries weight outside the support of the
    sandwiched operator, which is the limit of the expression.
    """
    rho, sigma = hermitian(rho), hermitian(sigma)
    _check_support(rho, sigma)
    X = _sandwich(rho, sigma)
    leak = _tr(rho @ (support_projector(sigma) - support_projector(X)))
    if leak > 1e-10 * max(1.0, _tr(rho)):
        return -np.inf
    return _tr(rho @ mlog(X))


def psi_pair(s, rho, sigma):
    """log Tr rho^{1+s} sigma^{-s} for s in [-1, 1]."""
    if not -1.0 <= s <= 1.0:
        raise InputOutOfRange(f"s={s} outside [-1, 1]")
    if s == 0:
        return 0.0
    rho, sigma = hermitian(rho), hermitian(sigma)
    if s > 0:
        _check_support(rho, sigma)
    return float(np.log(_tr(mpow(rho, 1 + s) @ mpow(sigma, -s))))


def psi_star_pair(s, rho, sigma):
    """log Tr rho (sigma^{-1/2} rho sigma^{-1/2})^s for s in (0, 1]."""
    if not 0.0 <= s <= 1.0:
        raise InputOutOfRange(f"s={s} outside [0, 1]")
    if s == 0:
        return 0.0
    rho, sigma = hermitian(rho), hermitian(sigma)
    _check_support(rho, sigma)
    return float(np.log(_tr(rho @ mpow(_sandwich(rho, sigma), s))))


def _active(W, p):
    p = distribution(p, W.alphabet_size)
    idx = np.flatnonzero(p > 0)
    return p, idx


def channel_psi(s, W, p):
    """psi(s|W,p) = log sum_a p_a Tr W_a^{1+s} W_p^{-s}."""
    if not -1.0 <= s <= 1.0:
        raise InputOutOfRange(f"s={s} outside [-1, 1]")
    if s == 0:
        return 0.0
    p, idx = _active(W, p)
    Wp_s = mpow(average_output(W, p), -s)
    total = sum(p[a] * _tr(mpow(W[a], 1 + s) @ Wp_s) for a in idx)
    return float(np.log(total))


def channel_psi_star(s, W, p):
    """psi*(s|W,p) = log sum_a p_a Tr W_a (W_p^{-1/2} W_a W_p^{-1/2})^s."""
    if not 0.0 <= s <= 1.0:
        raise InputOutOfRange(f"s={s} outside [0, 1]")
    if s == 0:
        return 0.0
    p, idx = _active(W, p)
    S = mpow(average_output(W, p), -0.5)
    total = 0.0
    for a in idx:
        X = S @ W[a] @ S
        total += p[a] * _tr(W[a] @ mpow((X + X.conj().T) / 2, s))
    return float(np.log(total))


def channel_phi(s, W, p):
    """Quantum Gallager function log Tr (sum_x p_x W_x^{1/(1-s)})^{1-s}."""
    if not -1.0 <= s < 1.0:
        raise InputOutOfRange(f"s={s} outside [-1, 1)")
    if s == 0:
        return 0.0
    expo = 1.0 / (1.0 - s)
    if expo > PHI_EXPONENT_CAP:
        raise InputOutOfRange(f"inner exponent 1/(1-s)={expo:g} exceeds cap")
    p, idx = _active(W, p)
    # sum_x p_x W_x^a = G G^dagger with G = [sqrt(p_x) V_x diag(w_x^{a/2})]; its
    # rank is that of the unscaled support bases, so tiny genuine eigenvalues
    # are kept while exact zeros are never raised to a small power.
    blocks, bases = [], []
    for a in idx:
        w, V = np.linalg.eigh(hermitian(W[a]))
        keep = w > SUPPORT_TOL * w.max()
        bases.append(V[:, keep])
        blocks.append((np.sqrt(p[a]), V[:, keep], w[keep]))
    B = np.hstack(bases)
    rank = int(np.sum(np.linalg.svd(B, compute_uv=False) > 1e-10))
    G = np.hstack([c * V * (w ** (expo / 2)) for c, V, w in blocks])
    sv = np.linalg.svd(G, compute_uv=False)[:rank]
    if sv[-1] > 1e-4 * sv[0]:
        return float(np.log(np.sum(sv ** (2 * (1 - s)))))
    return _phi_extended_precision(s, expo, blocks, rank)


def _phi_extended_precision(s, expo, blocks, rank):
    """Same evaluation with mpmath when the singular values span many decades."""
    import mpmath as mp

    decades = max(float(np.log10(w.max() / w.min())) for _, _, w in blocks if w.size)
    with mp.workdps(int(min(40 + expo / 2 * decades, 600))):
        cols = []
        for c, V, w in blocks:
            for j in range(w.size):
                f = mp.mpf(c) * mp.power(mp.mpf(w[j]), mp.mpf(expo) / 2)
                cols.append([f * mp.mpc(z.real, z.imag) for z in V[:, j]])
        G = mp.matrix(len(cols[0]), len(cols))
        for j, col in enumerate(cols):
            for i, z in enumerate(col):
                G[i, j] = z
        sv = sorted((mp.svd_c(G, compute_uv=False)), reverse=True)[:rank]
        return float(mp.log(mp.fsum(v ** (2 * (1 - mp.mpf(s))) for v in sv)))


def optimal_sigma(t, W, p):
    """Normalized (sum_x p_x W_x^{1+t})^{1/(1+t)}."""
    p, idx = _active(W, p)
    inner = sum(p[a] * mpow(W[a], 1 + t) for a in idx)
    sig = mpow(inner, 1.0 / (1 + t))
    return sig / _tr(sig)


def psi_extended(t, W, p, sigma):
    """log sum_x p_x Tr W_x^{1+t} sigma^{-t}; sigma may be unnormalized."""
    if t < 0:
        raise InputOutOfRange("t must be non-negative")
    p, idx = _active(W, p)
    if t == 0:
        return float(np.log(sum(p[a] * _tr(W[a] @ support_projector(sigma)) for a in idx)))
    sigma = hermitian(sigma)
    for a in idx:
        _check_support(W[a], sigma)
    sig_t = mpow(sigma, -t)
    return float(np.log(sum(p[a] * _tr(mpow(W[a], 1 + t) @ sig_t) for a in idx)))


def _block_rel_entropy(p, states, ref_weights, ref_state, lower=False):
    """D(rho || sigma) for rho_a = p_a W_a and sigma_a = c_a ref_state."""
    total = 0.0
    for a in np.flatnonzero(p > 0):
        if ref_weights[a] <= 0:
            raise SupportViolation("reference block vanishes where rho does not")
        d = rel_entropy_lower(states[a], ref_state) if lower else rel_entropy(states[a], ref_state)
        total += p[a] * (d + np.log(p[a] / ref_weights[a]))
    return float(total)


def mutual_info(W, p, variant="I"):
    """I, I_lower, I_prime or I_lower_prime of the state rho[W, p]."""
    p = distribution(p, W.alphabet_size)
    Wp = average_output(W, p)
    lower = variant in ("I_lower", "I_lower_prime")
    if variant in ("I", "I_lower"):
        ref = p
    elif variant in ("I_prime", "I_lower_prime"):
        ref = np.full(p.size, 1.0 / p.size)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return _block_rel_entropy(p, W.outputs, ref, Wp, lower=lower)


def holevo(W, p):
    return mutual_info(W, p, "I")


def d1_criteria(state, variant="d1"):
    """Trace distance of rho^{AE} from rho_A (x) rho_E, or from uniform (x) rho_E."""
    rhoE = state.quantum_marginal()
    p = state.probs
    if variant == "d1":
        ref = p
    elif variant == "d1_prime":
        ref = np.full(p.size, 1.0 / p.size)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return float(sum(trace_norm(p[a] * state.states[a] - ref[a] * rhoE) for a in range(p.size)))


def shannon_entropy(P):
    P = np.asarray(P, dtype=float)
    P = P[P > 0]
    return float(-np.sum(P * np.log(P)))


def renyi_entropy(P, s):
    """H_{1+s}(P) = -(1/s) log sum P^{1+s}; Shannon entropy at s = 0."""
    P = distribution(P)
    if s == 0:
        return shannon_entropy(P)
    P = P[P > 0]
    # sum P^{1+s} = 1 + sum P (P^s - 1); expm1/log1p keep accuracy near s = 0
    return float(-np.log1p(np.sum(P * np.expm1(s * np.log(P)))) / s)


def _joint_table(PAE):
    T = np.asarray(PAE, dtype=float)
    if T.ndim != 2 or np.any(T < -1e-12) or abs(T.sum() - 1) > 1e-10:
        raise InvalidTable("joint table must be a non-negative 2-D array summing to 1")
    return np.clip(T, 0.0, None)


def cond_entropy_classical(PAE):
    T = _joint_table(PAE)
    return shannon_entropy(T.ravel()) - shannon_entropy(T.sum(axis=0))


def cond_renyi_classical(PAE, s):
    """H_{1+s}(A|E) = -(1/s) log sum_e P(e) sum_a P(a|e)^{1+s}; rows index A."""
    T = _joint_table(PAE)
    if s == 0:
        return cond_entropy_classical(T)
    PE = T.sum(axis=0)
    excess = 0.0
    for e in np.flatnonzero(PE > 0):
        cond = T[:, e] / PE[e]
        cond = cond[cond > 0]
        excess += PE[e] * np.sum(cond * np.expm1(s * np.log(cond)))
    return float(-np.log1p(excess) / s)


def cond_renyi_sigma(state, sigma, s):
    """-(1/s) log sum_a p_a^{1+s} Tr rho_a^{1+s} sigma^{-s}."""
    if not 0.0 < s <= 1.0:
        raise InputOutOfRange("s must lie in (0, 1]")
    sigma = hermitian(sigma)
    sig = mpow(sigma, -s)
    total = 0.0
    for pa, rho in zip(state.probs, state.states):
        if pa > 0:
            _check_support(rho, sigma)
            total += pa ** (1 + s) * _tr(mpow(rho, 1 + s) @ sig)
    return float(-np.log(total) / s)


def eta(x, y):
    """-x log x + x y with 0 log 0 = 0."""
    if x == 0:
        return 0.0
    return float(-x * np.log(x) + x * y)


def von_neumann_entropy(rho):
    w = np.linalg.eigvalsh(hermitian(rho))
    return shannon_entropy(w[w > SUPPORT_TOL * max(w.max(), 0)])


def kl_divergence(p, q):
    p, q = np.asarray(p, float), np.asarray(q, float)
    m = p > 0
    if np.any(q[m] <= 0):
        return np.inf
    return float(np.sum(p[m] * np.log(p[m] / q[m])))


def binary_entropy(x):
    return shannon_entropy([x, 1 - x])

