"""Secrecy exponents, finite-blocklength bounds, equivocation and capacity.

Rates and exponents are in nats. 1-D problems over s use a 512-point grid
followed by golden section; simplex problems use a lattice grid followed by
pattern polishing (see ``optimize``).
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .channels import average_output, depolarizing_environment_channel, distribution, uniform
from .errors import Infeasible, InputOutOfRange
from .hermitian import GROUP_TOL, mpow, spectral_decompose, spectral_stats
from .optimize import optimize_simplex, optimize_unit_interval, pattern_polish
from .quantities import (
    binary_entropy,
    channel_phi,
    channel_psi,
    cond_renyi_classical,
    mutual_info,
    rel_entropy,
    renyi_entropy,
)

S_GRID = 512


class _Cached:
    """Memoize a scalar function of s; grids are shared across many rates."""

    def __init__(self, fn):
        self.fn = fn
        self.cache = {}

    def __call__(self, s):
        s = float(s)
        if s not in self.cache:
            self.cache[s] = self.fn(s)
        return self.cache[s]


class ExponentEvaluator:
    """psi(s|W,p) and (1+s) phi(s/(1+s)|W,p) with caching, plus the two exponents."""

    def __init__(self, W, p, grid=S_GRID):
        self.W = W
        self.p = distribution(p, W.alphabet_size)
        self.grid = grid
        self.psi = _Cached(lambda s: channel_psi(s, W, self.p))
        self.phi_scaled = _Cached(lambda s: (1 + s) * channel_phi(s / (1 + s), W, self.p))

    def e_psi(self, R):
        """max_{0<=s<=1} sR - psi(s); returns (value, s)."""
        val, s = optimize_unit_interval(lambda s: s * R - self.psi(s), grid=self.grid)
        return max(val, 0.0), s

    def e_phi(self, R):
        """max_{0<=s<=1} (s/2)R - ((1+s)/2) phi(s/(1+s)); returns (value, s)."""
        val, s = optimize_unit_interval(lambda s: 0.5 * (s * R - self.phi_scaled(s)), grid=self.grid)
        return max(val, 0.0), s


def e_psi(R, W, p, grid=S_GRID):
    if R < 0:
        raise InputOutOfRange("R must be non-negative")
    return ExponentEvaluator(W, p, grid).e_psi(R)[0]


def e_phi(R, W, p, grid=S_GRID):
    if R < 0:
        raise InputOutOfRange("R must be non-negative")
    return ExponentEvaluator(W, p, grid).e_phi(R)[0]


@dataclass
class ExponentCurve:
    rates: np.ndarray
    values: np.ndarray
    kind: str
    optimizing_s: np.ndarray = None
    units: str = "nats"
    source: str = ""


def exponent_curves(W, p, rates, grid=S_GRID, source=""):
    """e_psi, e_phi, e_psi/2 and 2 e_phi over a rate grid (nats)."""
    ev = ExponentEvaluator(W, p, grid)
    rates = np.asarray(rates, dtype=float)
    ep = [ev.e_psi(R) for R in rates]
    ef = [ev.e_phi(R) for R in rates]
    vp = np.array([v for v, _ in ep])
    vf = np.array([v for v, _ in ef])
    sp = np.array([s for _, s in ep])
    sf = np.array([s for _, s in ef])
    return {
        "e_psi": ExponentCurve(rates, vp, "e_psi", sp, source=source),
        "e_phi": ExponentCurve(rates, vf, "e_phi", sf, source=source),
        "half_e_psi": ExponentCurve(rates, vp / 2, "half_e_psi", sp, source=source),
        "two_e_phi": ExponentCurve(rates, 2 * vf, "two_e_phi", sf, source=source),
    }


@dataclass
class OrderingReport:
    rates: np.ndarray
    e_psi: np.ndarray
    e_phi: np.ndarray
    lower_ok: np.ndarray  # e_psi/2 <= e_phi
    upper_ok: np.ndarray  # e_phi <= e_psi

    @property
    def passed(self):
        return bool(self.lower_ok.all() and self.upper_ok.all())


def exponent_ordering_check(W, p, R_grid, slack=1e-9, grid=S_GRID):
    curves = exponent_curves(W, p, R_grid, grid)
    ep, ef = curves["e_psi"].values, curves["e_phi"].values
    return OrderingReport(np.asarray(R_grid, float), ep, ef, ep / 2 <= ef + slack, ef <= ep + slack)


# ---------------------------------------------------------------- finite n


def eigen_count(A, group_tol=GROUP_TOL):
    return len(spectral_decompose(A, group_tol).groups)


def weighted_power_sum(W, p, s):
    """sum_x p_x W_x^{1+s}."""
    p = distribution(p, W.alphabet_size)
    return sum(p[a] * mpow(W[a], 1 + s) for a in np.flatnonzero(p > 0))


def mu_s(W, p, s):
    """min{4 + sqrt(v_s), (4 + sqrt(ceil(lambda_s))) e^{s/2}} for sum_x p_x W_x^{1+s}."""
    st = spectral_stats(weighted_power_sum(W, p, s))
    return min(4 + math.sqrt(st.v), (4 + math.sqrt(math.ceil(st.lam - 1e-12))) * math.exp(s / 2))


@dataclass
class FiniteNBounds:
    eps_bound: float
    eps_s: float
    info_bound: float
    info_s: float
    d1_bound: float
    d1_s: float
    M: float
    L: int
    expurgated: bool = False
    params: dict = field(default_factory=dict)


def _min_log(fn, grid, lo):
    """Minimize a log-bound over s in [lo, 1]; returns (exp(min), s)."""
    val, s = optimize_unit_interval(fn, grid=grid, maximize=False, lo=lo, hi=1.0)
    return math.exp(val), s


def finite_n_bounds(M, Q, WB, WE, p, expurgated=False, grid=S_GRID):
    """Error, leaked-information and trace-distance guarantees for the random code.

    Factors (12, 3, 3) for the average criteria; (48, 12, 24) with
    ``expurgated`` which keeps M/4 messages and bounds the maxima.
    """
    if M < 1:
        raise InputOutOfRange("M must be at least 1")
    Q = distribution(Q)
    p = distribution(p, WE.alphabet_size)
    if WB.alphabet_size != WE.alphabet_size:
        raise InputOutOfRange("Bob and Eve channels need the same input alphabet")
    L = Q.size
    c_eps, c_info, c_d1 = (48, 12, 24) if expurgated else (12, 3, 3)
    lo = 1.0 / grid
    eps, s_eps = _min_log(lambda s: s * math.log(M * L) + channel_psi(-s, WB, p), grid, 0.0)
    log_v = math.log(eigen_count(average_output(WE, p)))
    H = _Cached(lambda s: renyi_entropy(Q, s))
    psiE = _Cached(lambda s: channel_psi(s, WE, p))
    info, s_info = _min_log(lambda s: s * log_v - s * H(s) + psiE(s) - math.log(s), grid, lo)
    d1, s_d1 = _min_log(
        lambda s: math.log(mu_s(WE, p, s)) - s / 2 * H(s) + (1 + s) / 2 * channel_phi(s / (1 + s), WE, p),
        grid, lo)
    return FiniteNBounds(
        eps_bound=c_eps * eps, eps_s=s_eps,
        info_bound=c_info * info, info_s=s_info,
        d1_bound=c_d1 * d1, d1_s=s_d1,
        M=M / 4 if expurgated else M, L=L, expurgated=expurgated,
        params={"M": M, "L": L},
    )


def random_code_info_bound(s, Q, WE, p):
    """Ensemble bound (v^s/s) e^{-s H_{1+s}(Q) + psi(s|W^E,p)} on the mean leak."""
    v = eigen_count(average_output(WE, p))
    return v**s / s * math.exp(-s * renyi_entropy(Q, s) + channel_psi(s, WE, p))


def linear_code_bounds(M, L, WB, WE, grid=S_GRID):
    """Guarantees for the best coset code pair with |C1| = LM, |C2| = L (additive channels)."""
    pm = uniform(WE.alphabet_size)
    lo = 1.0 / grid
    eps, s_eps = _min_log(lambda s: s * math.log(M * L) + channel_psi(-s, WB, pm), grid, 0.0)
    v = eigen_count(average_output(WE, pm))
    info, s_info = _min_log(lambda s: channel_psi(s, WE, pm) - math.log(s) - s * math.log(L), grid, lo)
    d1, s_d1 = _min_log(
        lambda s: math.log(mu_s(WE, pm, s)) - s / 2 * math.log(L)
        + (1 + s) / 2 * channel_phi(s / (1 + s), WE, pm), grid, lo)
    return FiniteNBounds(12 * eps, s_eps, 3 * v * info, s_info, 3 * d1, s_d1, M, L,
                         params={"v": v})


def tensor_eigen_count(A, n, group_tol=GROUP_TOL):
    """Number of distinct eigenvalues of A^{(x) n} from the spectrum of A."""
    dec = spectral_decompose(A, group_tol)
    vals = [float(dec.eigenvalues[a]) for a, _ in dec.groups]
    prods = sorted({math.prod(c) for c in itertools.combinations_with_replacement(vals, n)}, reverse=True)
    scale = max(abs(prods[0]), abs(prods[-1]))
    count = 1
    for a, b in zip(prods, prods[1:]):
        if a - b > group_tol * scale:
            count += 1
    return count


def iid_bounds(n, M, Q, WB, WE, p, expurgated=False, grid=S_GRID):
    """Bounds for the n-fold channel with M^n messages and randomness Q^{(x) n}.

    Uses psi additivity, H_{1+s}(Q^n) = n H_{1+s}(Q), the product spectrum for
    v_n and v_{s,n}, and lambda_{s,n} = n lambda_s.
    """
    Q = distribution(Q)
    p = distribution(p, WE.alphabet_size)
    c_eps, c_info, c_d1 = (48, 12, 24) if expurgated else (12, 3, 3)
    lo = 1.0 / grid
    logML = n * math.log(M * Q.size)
    eps, s_eps = _min_log(lambda s: s * logML + n * channel_psi(-s, WB, p), grid, 0.0)
    log_vn = math.log(tensor_eigen_count(average_output(WE, p), n))
    H = _Cached(lambda s: renyi_entropy(Q, s))
    psiE = _Cached(lambda s: channel_psi(s, WE, p))

    def log_mu(s):
        A = weighted_power_sum(WE, p, s)
        st = spectral_stats(A)
        return math.log(min(4 + math.sqrt(tensor_eigen_count(A, n)),
                            (4 + math.sqrt(math.ceil(n * st.lam - 1e-12))) * math.exp(s / 2)))

    info, s_info = _min_log(lambda s: s * log_vn - n * s * H(s) + n * psiE(s) - math.log(s), grid, lo)
    d1, s_d1 = _min_log(
        lambda s: log_mu(s) - n * s / 2 * H(s) + n * (1 + s) / 2 * channel_phi(s / (1 + s), WE, p),
        grid, lo)
    return FiniteNBounds(c_eps * eps, s_eps, c_info * info, s_info, c_d1 * d1, s_d1,
                         M**n / 4 if expurgated else M**n, Q.size**n, expurgated,
                         params={"n": n, "log_vn": log_vn})


def equivocation_bound(M, Q, WB, WE, p, s, v=None):
    """log v + (1/s)(log 4 + [psi(s|W^E,p) - s H_{1+s}(Q)]_+), clipped bracket."""
    if not 0.0 < s <= 1.0:
        raise InputOutOfRange("s must lie in (0, 1]")
    p = distribution(p, WE.alphabet_size)
    if v is None:
        v = eigen_count(average_output(WE, p))
    bracket = channel_psi(s, WE, p) - s * renyi_entropy(Q, s)
    return math.log(v) + (math.log(4) + max(bracket, 0.0)) / s


def iid_equivocation_bound(n, Q, WE, p, grid=S_GRID):
    """Smallest equivocation guarantee over s for n uses; returns (value, s)."""
    Q = distribution(Q)
    p = distribution(p, WE.alphabet_size)
    log_vn = math.log(tensor_eigen_count(average_output(WE, p), n))
    psiE = _Cached(lambda s: channel_psi(s, WE, p))
    H = _Cached(lambda s: renyi_entropy(Q, s))

    def f(s):
        return log_vn + (math.log(4) + max(n * psiE(s) - n * s * H(s), 0.0)) / s

    return optimize_unit_interval(f, grid=grid, maximize=False, lo=1.0 / grid, hi=1.0)


def asymptotic_leak_rate(WE, p, R0):
    if R0 < 0:
        raise InputOutOfRange("R0 must be non-negative")
    return max(mutual_info(WE, p) - R0, 0.0)


# ---------------------------------------------------------------- simplex problems


def holevo_capacity(W, tol=1e-10, max_iter=100_000):
    """max_p I(W, p) by the cq Blahut-Arimoto iteration; returns (C, p).

    Stops when the dual gap max_x D(W_x||W_p) - I(W,p) falls below ``tol``.
    """
    n = W.alphabet_size
    p = uniform(n)
    for _ in range(max_iter):
        Wp = average_output(W, p)
        d = np.array([rel_entropy(W[x], Wp) for x in range(n)])
        I = float(p @ d)
        if d.max() - I < tol:
            break
        w = p * np.exp(d - d.max())
        p = w / w.sum()
    return I, p


def capacity_degraded(WB, WE, resolution=0.02):
    """max_p I(W^B,p) - I(W^E,p); the caller asserts degradedness."""
    f = lambda p: mutual_info(WB, p) - mutual_info(WE, p)  # noqa: E731
    val, p = optimize_simplex(f, WB.alphabet_size, resolution=resolution)
    return max(val, 0.0), p


@dataclass
class EquivocationResult:
    H: float
    leaked: float
    p: np.ndarray
    mode: str
    clipped: bool


def equivocation_rate_degraded(WB, WE, R, mode="min", resolution=0.02):
    """H(R): optimize I_B - I_E over {p : I(W^B,p) >= R}; also the leaked rate R - H(R)."""
    if mode not in ("min", "max"):
        raise ValueError("mode must be 'min' or 'max'")
    cap, _ = holevo_capacity(WB)
    if R > cap + 1e-9:
        raise Infeasible(f"R={R} exceeds max_p I(W^B,p)={cap}")
    f = lambda p: mutual_info(WB, p) - mutual_info(WE, p)  # noqa: E731
    feasible = lambda p: mutual_info(WB, p) >= R - 1e-12  # noqa: E731
    val, p = optimize_simplex(f, WB.alphabet_size, resolution=resolution,
                              maximize=(mode == "max"), feasible=feasible)
    if val is None:
        # Feasible set thinner than the grid: start from the capacity-achieving input.
        _, pc = holevo_capacity(WB)
        val, p = pattern_polish(f, pc, feasible=feasible, step=resolution, maximize=(mode == "max"))
    leaked = R - val
    clipped = leaked < 0 or leaked > R
    return EquivocationResult(val, min(max(leaked, 0.0), R), p, mode, clipped)


# ---------------------------------------------------------------- depolarizing


def depolarizing_psi_closed(s, spec):
    """psi(s|W^E,P_mix) = s H_{1-s}(X|Z) for the environment channel."""
    if s == 0:
        return 0.0
    return s * cond_renyi_classical(spec.pxz, -s)


def depolarizing_phi_closed(s, spec):
    """phi(s/(1+s)|W^E,P_mix) = (s/(1+s)) H_{1/(1+s)}(X|Z)."""
    if s == 0:
        return 0.0
    return s / (1 + s) * cond_renyi_classical(spec.pxz, -s / (1 + s))


@dataclass
class PhaseErrorRecord:
    n: int
    R: float
    phase_err: float
    holevo_bound: float
    composability_bound: float
    exponent: float
    two_e_phi: float
    exponent_s: float


def phase_error_route(n, R, spec, grid=S_GRID):
    """Virtual phase error route for independent P^XZ (rates in nats)."""
    spec.require_independent()
    px = spec.px
    g = lambda s: s * R - s * renyi_entropy(px, -s / (1 + s))  # noqa: E731
    expo, s_opt = optimize_unit_interval(g, grid=grid)
    expo = max(expo, 0.0)
    eps = min(1.0, math.exp(-n * expo))
    WE = depolarizing_environment_channel(spec)
    two_e_phi = 2 * ExponentEvaluator(WE, uniform(spec.d), grid).e_phi(R)[0]
    h = binary_entropy(eps) if 0 < eps < 1 else 0.0
    return PhaseErrorRecord(
        n=n, R=R, phase_err=eps,
        holevo_bound=h + n * eps * math.log(spec.d),
        composability_bound=2 * math.sqrt(2) * math.sqrt(eps),
        exponent=expo, two_e_phi=two_e_phi, exponent_s=s_opt,
    )
