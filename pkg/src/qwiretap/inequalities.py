"""Randomized inequality suites over states and cq channels.

Each suite draws its own instances from a seeded generator and returns a
``SuiteResult``; ``margin`` is min(rhs - lhs) over all checks, so a negative
margin beyond ``-tol`` is a violation.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .channels import CQChannel, JointCQState
from .exponents import ExponentEvaluator
from .hermitian import random_density
from .quantities import (
    channel_phi,
    channel_psi,
    cond_renyi_sigma,
    d1_criteria,
    eta,
    optimal_sigma,
    mutual_info,
    psi_extended,
    psi_pair,
    psi_star_pair,
    rel_entropy,
    rel_entropy_lower,
    von_neumann_entropy,
)


TAGS = {
    "lower_relative_entropy": "D_lower <= D, psi*_lower <= psi",
    "psi_le_phi": "psi(s) <= phi(s), 0 < s < 1",
    "sigma_minimizer": "closed-form sigma minimizes psi(t|sigma)",
    "phi_le_psi_t": "(1+t) phi(t/(1+t)) <= psi(t)",
    "exponent_chain": "e_psi/2 <= e_phi <= e_psi",
    "renyi_monotone": "H_{1+s}(A|E) non-increasing in s",
    "pinsker": "d1^2 <= 2 I",
    "fannes": "I <= eta(d1, log d_E)",
    "phi_concavity": "exp(phi) concave/convex in p",
    "gallager_data_processing": "phi(s) monotone under channels, s <= 1/2",
}


@dataclass
class SuiteResult:
    name: str
    tag: str
    checked: int = 0
    failures: int = 0
    margin: float = math.inf
    clipped: int = 0
    notes: list = field(default_factory=list)

    @property
    def passed(self):
        return self.failures == 0

    def check(self, lhs, rhs, tol):
        gap = rhs - lhs
        self.checked += 1
        self.margin = min(self.margin, gap)
        if gap < -tol * max(1.0, abs(rhs), abs(lhs)):
            self.failures += 1
            if len(self.notes) < 5:
                self.notes.append(f"lhs={lhs:.6g} rhs={rhs:.6g}")

    def as_dict(self):
        return {"name": self.name, "tag": self.tag, "checked": self.checked, "failures": self.failures,
                "margin": self.margin, "passed": self.passed}


def random_channel(rng, max_dim=4, max_alphabet=5, rank=None):
    d = int(rng.integers(2, max_dim + 1))
    n = int(rng.integers(2, max_alphabet + 1))
    return CQChannel(np.stack([random_density(d, rng, rank) for _ in range(n)]))


def random_dist(rng, n, full=True):
    p = rng.dirichlet(np.ones(n))
    if not full and n > 1 and rng.random() < 0.3:
        p[rng.integers(n)] = 0.0
        p /= p.sum()
    return p


def _random_isometry_channel(rng, d_in, d_out, kraus=3):
    G = rng.normal(size=(kraus * d_out, d_in)) + 1j * rng.normal(size=(kraus * d_out, d_in))
    V, _ = np.linalg.qr(G)
    Ks = [V[k * d_out:(k + 1) * d_out] for k in range(kraus)]
    return lambda rho: sum(K @ rho @ K.conj().T for K in Ks)


def suite_lower_relative(rng, n, tol):
    """D_lower <= D and psi*_lower <= psi."""
    res = SuiteResult("lower_relative_entropy", TAGS["lower_relative_entropy"])
    for _ in range(n):
        d = int(rng.integers(2, 5))
        rho = random_density(d, rng, rank=int(rng.integers(1, d + 1)))
        sigma = random_density(d, rng)
        res.check(rel_entropy_lower(rho, sigma), rel_entropy(rho, sigma), tol)
        for s in np.linspace(0.1, 1.0, 5):
            res.check(psi_star_pair(s, rho, sigma), psi_pair(s, rho, sigma), tol)
    return res


def suite_psi_phi(rng, n, tol):
    """psi(s) <= phi(s) on s in (0, 1)."""
    res = SuiteResult("psi_le_phi", TAGS["psi_le_phi"])
    for _ in range(n):
        W = random_channel(rng)
        p = random_dist(rng, W.alphabet_size)
        for s in np.linspace(0.05, 0.95, 7):
            res.check(channel_psi(s, W, p), channel_phi(s, W, p), tol)
    return res


def suite_sigma_minimizer(rng, n, tol, competitors=200):
    """The closed-form sigma minimizes psi(t|W,p,sigma) and attains (1+t) phi(t/(1+t))."""
    res = SuiteResult("sigma_minimizer", TAGS["sigma_minimizer"])
    for _ in range(n):
        W = random_channel(rng)
        p = random_dist(rng, W.alphabet_size)
        t = float(rng.uniform(0.05, 2.0))
        star = optimal_sigma(t, W, p)
        best = psi_extended(t, W, p, star)
        res.check(abs(best - (1 + t) * channel_phi(t / (1 + t), W, p)), 0.0, tol)
        for _ in range(competitors):
            res.check(best, psi_extended(t, W, p, random_density(W.output_dim, rng)), tol)
    return res


def suite_phi_psi_t(rng, n, tol):
    """(1+t) phi(t/(1+t)) <= psi(t) for t in (0, 1]."""
    res = SuiteResult("phi_le_psi_t", TAGS["phi_le_psi_t"])
    for _ in range(n):
        W = random_channel(rng)
        p = random_dist(rng, W.alphabet_size)
        for t in np.linspace(0.1, 1.0, 6):
            res.check((1 + t) * channel_phi(t / (1 + t), W, p), channel_psi(t, W, p), tol)
    return res


def suite_exponent_chain(rng, n, tol, rates=8, grid=128):
    """e_psi/2 <= e_phi <= e_psi on a rate grid above I(W,p)."""
    res = SuiteResult("exponent_chain", TAGS["exponent_chain"])
    for _ in range(n):
        W = random_channel(rng)
        p = random_dist(rng, W.alphabet_size)
        ev = ExponentEvaluator(W, p, grid=grid)
        I = mutual_info(W, p)
        for R in np.linspace(0.0, I + 2.0, rates):
            ep, ef = ev.e_psi(R)[0], ev.e_phi(R)[0]
            res.check(ep / 2, ef, tol)
            res.check(ef, ep, tol)
    return res


def random_cq_state(rng, max_dim=4, max_alphabet=5, near_product=None):
    d = int(rng.integers(2, max_dim + 1))
    n = int(rng.integers(2, max_alphabet + 1))
    P = random_dist(rng, n)
    if near_product is None:
        states = [random_density(d, rng) for _ in range(n)]
    else:
        base = random_density(d, rng)
        states = []
        for _ in range(n):
            delta = rng.uniform(0, near_product)
            states.append((1 - delta) * base + delta * random_density(d, rng))
    return JointCQState(P, np.stack(states))


def suite_renyi_monotone(rng, n, tol, points=12):
    """s -> H_{1+s}(A|E) is non-increasing and below H(A|E)."""
    res = SuiteResult("renyi_monotone", TAGS["renyi_monotone"])
    for _ in range(n):
        st = random_cq_state(rng)
        rhoE = st.quantum_marginal()
        HAE = sum(p * von_neumann_entropy(r) for p, r in zip(st.probs, st.states))
        HAE += float(-np.sum(st.probs[st.probs > 0] * np.log(st.probs[st.probs > 0])))
        H = HAE - von_neumann_entropy(rhoE)
        vals = [cond_renyi_sigma(st, rhoE, s) for s in np.linspace(1.0 / points, 1.0, points)]
        res.check(vals[0], H, tol)
        for a, b in zip(vals, vals[1:]):
            res.check(b, a, tol)
    return res


def suite_pinsker(rng, n, tol):
    """d1^2 <= 2 I for cq states."""
    res = SuiteResult("pinsker", TAGS["pinsker"])
    for _ in range(n):
        st = random_cq_state(rng)
        W = CQChannel(st.states)
        res.check(d1_criteria(st) ** 2, 2 * mutual_info(W, st.probs), tol)
    return res


def suite_fannes(rng, n, tol):
    """I <= eta(d1, log d_E) on near-product cq states (per-letter distance <= 1/e)."""
    res = SuiteResult("fannes", TAGS["fannes"])
    for _ in range(n):
        st = random_cq_state(rng, near_product=0.15)
        W = CQChannel(st.states)
        res.check(mutual_info(W, st.probs), eta(d1_criteria(st), math.log(st.dim_e)), tol)
    return res


def suite_phi_concavity(rng, n, tol):
    """p -> e^{phi(s|W,p)} is concave on [0,1] and convex on [-1,0] (midpoint form)."""
    res = SuiteResult("phi_concavity", TAGS["phi_concavity"])
    for _ in range(n):
        W = random_channel(rng)
        p1, p2 = random_dist(rng, W.alphabet_size), random_dist(rng, W.alphabet_size)
        lam = float(rng.uniform())
        pm = lam * p1 + (1 - lam) * p2
        for s in (-0.9, -0.5, -0.1, 0.1, 0.5, 0.9):
            mid = math.exp(channel_phi(s, W, pm))
            avg = lam * math.exp(channel_phi(s, W, p1)) + (1 - lam) * math.exp(channel_phi(s, W, p2))
            if s > 0:
                res.check(avg, mid, tol)
            else:
                res.check(mid, avg, tol)
    return res


def suite_data_processing(rng, n, tol):
    """Tr(sum p E(W)^{1/(1-s)})^{1-s} <= Tr(sum p W^{1/(1-s)})^{1-s} for channels E.

    Checked on s in (0, 1/2], where 1/(1-s) <= 2 keeps the Petz-type monotonicity
    behind it valid; larger s admits counterexamples (see ``data_processing_counterexample``).
    """
    res = SuiteResult("gallager_data_processing", TAGS["gallager_data_processing"])
    for _ in range(n):
        W = random_channel(rng)
        p = random_dist(rng, W.alphabet_size)
        E = _random_isometry_channel(rng, W.output_dim, int(rng.integers(2, 5)))
        WE = CQChannel(np.stack([E(w) for w in W.outputs]))
        for s in np.linspace(0.1, 0.5, 5):
            res.check(channel_phi(s, WE, p), channel_phi(s, W, p), tol)
    return res


def data_processing_counterexample(seed=5, s=0.9, tries=200):
    """First random (W, p, E) found with phi(s|E(W),p) > phi(s|W,p); None if none found."""
    rng = np.random.default_rng(seed)
    for _ in range(tries):
        W = random_channel(rng)
        p = random_dist(rng, W.alphabet_size)
        E = _random_isometry_channel(rng, W.output_dim, int(rng.integers(2, 5)))
        WE = CQChannel(np.stack([E(w) for w in W.outputs]))
        gap = channel_phi(s, WE, p) - channel_phi(s, W, p)
        if gap > 1e-6:
            return W, p, WE, gap
    return None


SUITES = {
    "lower_relative_entropy": (suite_lower_relative, TAGS["lower_relative_entropy"]),
    "psi_le_phi": (suite_psi_phi, TAGS["psi_le_phi"]),
    "sigma_minimizer": (suite_sigma_minimizer, TAGS["sigma_minimizer"]),
    "phi_le_psi_t": (suite_phi_psi_t, TAGS["phi_le_psi_t"]),
    "exponent_chain": (suite_exponent_chain, TAGS["exponent_chain"]),
    "renyi_monotone": (suite_renyi_monotone, TAGS["renyi_monotone"]),
    "pinsker": (suite_pinsker, TAGS["pinsker"]),
    "fannes": (suite_fannes, TAGS["fannes"]),
    "phi_concavity": (suite_phi_concavity, TAGS["phi_concavity"]),
    "gallager_data_processing": (suite_data_processing, TAGS["gallager_data_processing"]),
}

DEFAULT_COUNTS = {"pinsker": 1000, "fannes": 1000}


def run_suites(seed=0, instances=100, tol=1e-8, names=None, counts=None):
    """Run the selected suites; each gets an independent child generator."""
    counts = {**DEFAULT_COUNTS, **(counts or {})}
    names = list(SUITES) if names is None else names
    children = np.random.SeedSequence(seed).spawn(len(SUITES))
    out = []
    for (name, (fn, _)), child in zip(SUITES.items(), children):
        if name in names:
            out.append(fn(np.random.default_rng(child), counts.get(name, instances), tol))
    return out
