"""Classical-quantum channels, joint cq states and the depolarizing model."""

import itertools
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .errors import BudgetExceeded, NonStochastic, NotIndependent, SizeMismatch
from .hermitian import density_matrix

TENSOR_BUDGET = 2**24


def distribution(p, size=None, tol=1e-12):
    """Validate a probability vector and return it as a float array."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise SizeMismatch(f"expected a non-empty vector, got shape {p.shape}")
    if size is not None and p.size != size:
        raise SizeMismatch(f"distribution has {p.size} entries, expected {size}")
    if np.any(p < -tol) or abs(p.sum() - 1.0) > max(tol, 1e-12 * p.size):
        raise NonStochastic("entries must be non-negative and sum to 1")
    return np.clip(p, 0.0, None)


def uniform(n):
    return np.full(n, 1.0 / n)


@dataclass(frozen=True, eq=False)
class CQChannel:
    """Finite alphabet -> density matrices, stored as an (|X|, d, d) array."""

    outputs: np.ndarray

    def __post_init__(self):
        outs = np.asarray(self.outputs, dtype=complex)
        if outs.ndim != 3 or outs.shape[1] != outs.shape[2]:
            raise SizeMismatch(f"outputs must have shape (X, d, d), got {outs.shape}")
        outs = np.stack([density_matrix(W) for W in outs])
        outs.flags.writeable = False
        object.__setattr__(self, "outputs", outs)

    @property
    def alphabet_size(self):
        return self.outputs.shape[0]

    @property
    def output_dim(self):
        return self.outputs.shape[1]

    def __getitem__(self, x):
        return self.outputs[x]

    def __len__(self):
        return self.alphabet_size

    @classmethod
    def classical(cls, stochastic):
        """Embed a stochastic matrix (rows = inputs) as diagonal outputs."""
        T = np.asarray(stochastic, dtype=float)
        for row in T:
            distribution(row)
        return cls(np.stack([np.diag(row).astype(complex) for row in T]))

    def is_commuting(self, tol=1e-10):
        outs = self.outputs
        for a in range(len(outs)):
            for b in range(a + 1, len(outs)):
                if np.max(np.abs(outs[a] @ outs[b] - outs[b] @ outs[a])) > tol:
                    return False
        return True


def bsc(eps):
    """Binary symmetric channel as a commuting cq channel."""
    return CQChannel.classical([[1 - eps, eps], [eps, 1 - eps]])


@dataclass(frozen=True, eq=False)
class JointCQState:
    """Block-diagonal state sum_a P(a) |a><a| (x) rho_a."""

    probs: np.ndarray
    states: np.ndarray

    def __post_init__(self):
        probs = distribution(self.probs)
        states = np.asarray(self.states, dtype=complex)
        if states.ndim != 3 or states.shape[0] != probs.size:
            raise SizeMismatch("one conditional state per classical value required")
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "states", np.stack([density_matrix(s) for s in states]))

    @property
    def dim_e(self):
        return self.states.shape[1]

    def quantum_marginal(self):
        return np.einsum("a,aij->ij", self.probs, self.states)

    def classical_marginal(self):
        return self.probs.copy()

    def trace(self):
        return float(sum(p * np.trace(s).real for p, s in zip(self.probs, self.states)))

    def dense(self):
        """Full (|A| d) x (|A| d) matrix; for oracles and small checks only."""
        n, d = self.probs.size, self.dim_e
        out = np.zeros((n * d, n * d), dtype=complex)
        for a in range(n):
            out[a * d:(a + 1) * d, a * d:(a + 1) * d] = self.probs[a] * self.states[a]
        return out


def average_output(W, p):
    p = distribution(p, W.alphabet_size)
    return np.einsum("a,aij->ij", p, W.outputs)


def cq_state(W, p):
    p = distribution(p, W.alphabet_size)
    return JointCQState(p, W.outputs)


def tensor_power_channel(W, n, budget=TENSOR_BUDGET):
    """n-fold product channel; letter words are ordered with x_1 most significant."""
    if n < 1:
        raise ValueError("n must be positive")
    size = W.alphabet_size**n * W.output_dim ** (2 * n)
    if size > budget:
        raise BudgetExceeded(f"tensor power needs {size} entries, budget {budget}")
    if n == 1:
        return W
    outs = [reduce(np.kron, (W.outputs[x] for x in word))
            for word in itertools.product(range(W.alphabet_size), repeat=n)]
    return CQChannel(np.stack(outs))


def tensor_power_dist(p, n):
    return reduce(np.kron, [np.asarray(p, dtype=float)] * n)


def preprocess(W, Q):
    """Channel v -> sum_x Q(x|v) W_x; ``Q`` has one row per v."""
    Q = np.asarray(Q, dtype=float)
    if Q.ndim != 2 or Q.shape[1] != W.alphabet_size:
        raise SizeMismatch(f"Q must have {W.alphabet_size} columns")
    for row in Q:
        distribution(row)
    return CQChannel(np.einsum("vx,xij->vij", Q, W.outputs))


def weyl_operator(d, x, z):
    """X^x Z^z with X the cyclic shift |j> -> |j+1> and Z = diag(omega^j)."""
    x, z = x % d, z % d
    X = np.roll(np.eye(d), 1, axis=0)
    Z = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    return np.linalg.matrix_power(X, x) @ np.linalg.matrix_power(Z, z)


def additive_channel(rho, d, group=None):
    """Weyl orbit channel x -> U_x rho U_x^dagger over Z_d (shift-only by default)."""
    group = group or [(x, 0) for x in range(d)]
    outs = []
    for g in group:
        U = weyl_operator(d, *g)
        outs.append(U @ rho @ U.conj().T)
    return CQChannel(np.stack(outs))


@dataclass(frozen=True, eq=False)
class DepolarizingSpec:
    """Weyl-Heisenberg noise distribution ``pxz[x, z]`` on Z_d x Z_d."""

    d: int
    pxz: np.ndarray

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("d must be at least 2")
        pxz = np.asarray(self.pxz, dtype=float)
        if pxz.shape != (self.d, self.d):
            raise SizeMismatch(f"pxz must be {self.d}x{self.d}")
        distribution(pxz.ravel())
        object.__setattr__(self, "pxz", np.clip(pxz, 0.0, None))

    @classmethod
    def independent(cls, px, pz=None):
        px = distribution(px)
        pz = distribution(pz) if pz is not None else uniform(px.size)
        return cls(px.size, np.outer(px, pz))

    @property
    def px(self):
        return self.pxz.sum(axis=1)

    @property
    def pz(self):
        return self.pxz.sum(axis=0)

    def is_independent(self, tol=1e-12):
        return bool(np.max(np.abs(self.pxz - np.outer(self.px, self.pz))) <= tol)

    def require_independent(self, tol=1e-12):
        if not self.is_independent(tol):
            raise NotIndependent("P^XZ does not factor into P^X P^Z")


def depolarizing_channel(spec, rho):
    """Apply the Weyl-Heisenberg depolarizing map to a state."""
    out = np.zeros((spec.d, spec.d), dtype=complex)
    for x in range(spec.d):
        for z in range(spec.d):
            if spec.pxz[x, z] > 0:
                U = weyl_operator(spec.d, x, z)
                out += spec.pxz[x, z] * U @ rho @ U.conj().T
    return out


def environment_vector(spec, j, z):
    """|j,z:P^XZ> = sum_x omega^{jx} sqrt(P(x|z)) |x,z>, basis index x*d + z."""
    d = spec.d
    pz = spec.pz[z]
    vec = np.zeros(d * d, dtype=complex)
    if pz <= 0:
        return vec
    omega = np.exp(2j * np.pi / d)
    for x in range(d):
        vec[x * d + z] = omega ** (j * x) * np.sqrt(spec.pxz[x, z] / pz)
    return vec


def depolarizing_environment_channel(spec):
    """Eve's channel j -> rho^E_j when she holds the full environment."""
    d = spec.d
    outs = []
    for j in range(d):
        rho = np.zeros((d * d, d * d), dtype=complex)
        for z in range(d):
            pz = spec.pz[z]
            if pz > 0:
                v = environment_vector(spec, j, z)
                rho += pz * np.outer(v, v.conj())
        outs.append(rho)
    return CQChannel(np.stack(outs))
