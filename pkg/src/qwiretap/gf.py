"""Prime-field linear algebra, Toeplitz ensembles, hash families, condition checks.

Vectors of F_q^n are indexed in base q with the first coordinate most
significant, so index 0 is the zero vector. Maps between such spaces are
stored as lookup tables ``table[index(a)] = index(f(a))``, which lets every
condition verifier work on plain integer arrays.
"""

import functools
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np

from .errors import BudgetExceeded, IndivisibleDomain, NotPrime, RankDeficient, SizeMismatch

ENUM_BUDGET = 10**6
CONDITIONS = ("collision", "cover", "spread", "balanced")


def check_prime(q):
    q = int(q)
    if q < 2 or any(q % d == 0 for d in range(2, math.isqrt(q) + 1)):
        raise NotPrime(f"{q} is not prime")
    return q


@dataclass(frozen=True, eq=False)
class GFMatrix:
    q: int
    entries: np.ndarray

    def __post_init__(self):
        check_prime(self.q)
        E = np.asarray(self.entries, dtype=np.int64)
        if E.ndim != 2:
            raise SizeMismatch("GFMatrix entries must be 2-D")
        E = np.mod(E, self.q)
        E.flags.writeable = False
        object.__setattr__(self, "entries", E)

    @property
    def rows(self):
        return self.entries.shape[0]

    @property
    def cols(self):
        return self.entries.shape[1]

    def __matmul__(self, other):
        if isinstance(other, GFMatrix):
            return GFMatrix(self.q, self.entries @ other.entries)
        return np.mod(self.entries @ np.asarray(other, dtype=np.int64), self.q)

    def __eq__(self, other):
        return (isinstance(other, GFMatrix) and self.q == other.q
                and np.array_equal(self.entries, other.entries))

    def __hash__(self):
        return hash((self.q, self.entries.shape, self.entries.tobytes()))

    def rank(self):
        return gf_rank(self.entries, self.q)

    def map_table(self):
        """Lookup table of x -> self @ x over all of F_q^cols."""
        return vector_index(self @ all_vectors(self.q, self.cols).T, self.q)

    def image(self):
        """Sorted indices of the column span."""
        return np.unique(self.map_table())


def identity(q, n):
    return GFMatrix(q, np.eye(n, dtype=np.int64))


def zeros(q, r, c):
    return GFMatrix(q, np.zeros((r, c), dtype=np.int64))


def block(q, rows):
    return GFMatrix(q, np.block([[np.asarray(getattr(b, "entries", b)) for b in r] for r in rows]))


@functools.lru_cache(maxsize=64)
def _all_vectors(q, n):
    if n == 0:
        V = np.zeros((1, 0), dtype=np.int64)
    else:
        V = np.array(list(itertools.product(range(q), repeat=n)), dtype=np.int64)
    V.flags.writeable = False
    return V


def all_vectors(q, n):
    """All of F_q^n as a (q^n, n) array in index order."""
    return _all_vectors(q, n)


def vector_index(V, q):
    """Index of column vectors (shape (n,) or (n, m)) in F_q^n."""
    V = np.asarray(V, dtype=np.int64)
    n = V.shape[0]
    weights = q ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return np.tensordot(weights, V, axes=1) if n else np.zeros(V.shape[1:], dtype=np.int64)


def index_vector(i, q, n):
    out = np.zeros(n, dtype=np.int64)
    for j in range(n - 1, -1, -1):
        i, out[j] = divmod(i, q)
    return out


def gf_rref(A, q):
    """Reduced row echelon form and pivot columns."""
    A = np.mod(np.array(A, dtype=np.int64), q)
    r, pivots = 0, []
    rows, cols = A.shape
    for c in range(cols):
        nz = np.flatnonzero(A[r:, c]) if r < rows else []
        if len(nz) == 0:
            continue
        p = r + nz[0]
        A[[r, p]] = A[[p, r]]
        A[r] = np.mod(A[r] * pow(int(A[r, c]), -1, q), q)
        for i in range(rows):
            if i != r and A[i, c]:
                A[i] = np.mod(A[i] - A[i, c] * A[r], q)
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return A, pivots


def gf_rank(A, q):
    A = np.asarray(A)
    if A.size == 0:
        return 0
    return len(gf_rref(A, q)[1])


def gf_solve(A, b, q):
    """Some x with A x = b over F_q, or None if inconsistent."""
    A = np.asarray(A, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64).reshape(-1, 1)
    R, piv = gf_rref(np.hstack([A, b]), q)
    n = A.shape[1]
    if n in piv:
        return None
    x = np.zeros(n, dtype=np.int64)
    for row, c in enumerate(piv):
        x[c] = R[row, -1]
    return x


def in_span(G, v):
    """Whether v lies in the column span of the GFMatrix G."""
    return gf_solve(G.entries, v, G.q) is not None


def span_contains(G1, G2):
    """Column span of G2 inside column span of G1."""
    return all(in_span(G1, G2.entries[:, j]) for j in range(G2.cols))


# ---------------------------------------------------------------- ensembles


@dataclass(frozen=True)
class ToeplitzEnsemble:
    q: int
    rows: int
    cols: int

    def __post_init__(self):
        check_prime(self.q)

    @property
    def free_entries(self):
        return max(self.rows + self.cols - 1, 0)

    @property
    def size(self):
        return self.q**self.free_entries

    def matrix(self, vec):
        """T[i, j] = vec[i - j + cols - 1]."""
        vec = np.asarray(vec, dtype=np.int64)
        i, j = np.indices((self.rows, self.cols))
        E = vec[i - j + self.cols - 1] if self.rows and self.cols else np.zeros((self.rows, self.cols))
        return GFMatrix(self.q, E)

    def enumerate(self):
        for vec in itertools.product(range(self.q), repeat=self.free_entries):
            yield self.matrix(vec)


def sample_toeplitz(ens, seed):
    rng = np.random.default_rng(seed)
    return ens.matrix(rng.integers(0, ens.q, size=ens.free_entries))


def _random_invertible(q, l, rng):
    while True:
        M = rng.integers(0, q, size=(l, l))
        if gf_rank(M, q) == l:
            return GFMatrix(q, M)


def invertible_matrices(q, l):
    for flat in itertools.product(range(q), repeat=l * l):
        M = np.array(flat, dtype=np.int64).reshape(l, l)
        if gf_rank(M, q) == l:
            yield GFMatrix(q, M)


def default_z(q, k, l1, l2):
    """(k-l2) x (l1-l2) matrix [I; 0]."""
    m, c = k - l2, l1 - l2
    E = np.zeros((m, c), dtype=np.int64)
    E[:c, :c] = np.eye(c, dtype=np.int64)
    return GFMatrix(q, E)


def _check_dims(k, l1, l2):
    if not 0 <= l2 <= l1 <= k:
        raise SizeMismatch(f"need 0 <= l2 <= l1 <= k, got k={k}, l1={l1}, l2={l2}")


def code_pair(q, k, l1, l2, X, Z):
    """C1 = image (I 0; X Z), C2 = image (I; X) for a fixed (k-l2) x l2 matrix X."""
    _check_dims(k, l1, l2)
    if Z.rows != k - l2 or Z.cols != l1 - l2:
        raise SizeMismatch("Z must be (k-l2) x (l1-l2)")
    if Z.rank() != l1 - l2:
        raise RankDeficient("Z must have full column rank l1 - l2")
    I = np.eye(l2, dtype=np.int64)
    C1 = block(q, [[I, np.zeros((l2, l1 - l2), dtype=np.int64)], [X.entries, Z.entries]])
    C2 = block(q, [[I], [X.entries]])
    return C1, C2


def code_pair_ensemble(q, k, l1, l2, Z=None, seed=0):
    Z = default_z(q, k, l1, l2) if Z is None else Z
    X = sample_toeplitz(ToeplitzEnsemble(q, k - l2, l2), seed)
    return code_pair(q, k, l1, l2, X, Z)


def injective_hom_ensemble(q, k, l, seed=0):
    """(X'; X) with X' uniform invertible l x l and X Toeplitz (k-l) x l."""
    if not 0 <= l <= k:
        raise SizeMismatch("need l <= k")
    rng = np.random.default_rng(seed)
    Xp = _random_invertible(q, l, rng)
    X = ToeplitzEnsemble(q, k - l, l).matrix(rng.integers(0, q, size=max(k - 1, 0)))
    return block(q, [[Xp.entries], [X.entries]])


# ---------------------------------------------------------------- map ensembles


@dataclass
class MapEnsemble:
    """Finite ensemble of maps between indexed sets, enumerated lazily.

    ``members`` yields ``(weight, table)`` with ``table[a]`` the image of ``a``.
    """

    domain: int
    range: int
    size: int
    members: Callable[[], Iterator]
    description: str = ""
    params: dict = field(default_factory=dict)

    def check_budget(self, budget=ENUM_BUDGET):
        if self.size > budget:
            raise BudgetExceeded(f"ensemble of size {self.size} exceeds budget {budget}")


HashFamily = MapEnsemble


def _matrix_ensemble(q, dom_dim, cod_dim, mats, size, description, params):
    def members():
        w = 1.0 / size
        for G in mats():
            yield w, G.map_table()
    return MapEnsemble(q**dom_dim, q**cod_dim, size, members, description, params)


def toeplitz_submodule_ensemble(q, k, l):
    """Maps a -> (a; X a), X Toeplitz (k-l) x l; images are the C(X)."""
    ens = ToeplitzEnsemble(q, k - l, l)

    def mats():
        for X in ens.enumerate():
            yield block(q, [[np.eye(l, dtype=np.int64)], [X.entries]])
    return _matrix_ensemble(q, l, k, mats, ens.size, "toeplitz_submodule", {"q": q, "k": k, "l": l})


def code_pair_c1_ensemble(q, k, l1, l2, Z=None):
    """Generators (I 0; X Z) of C1 over all Toeplitz X, fixed Z."""
    Z = default_z(q, k, l1, l2) if Z is None else Z
    ens = ToeplitzEnsemble(q, k - l2, l2)

    def mats():
        for X in ens.enumerate():
            yield code_pair(q, k, l1, l2, X, Z)[0]
    return _matrix_ensemble(q, l1, k, mats, ens.size, "code_pair_c1", {"q": q, "k": k, "l1": l1, "l2": l2})


def code_pair_c2_ensemble(q, k, l1, l2, Z=None):
    Z = default_z(q, k, l1, l2) if Z is None else Z
    ens = ToeplitzEnsemble(q, k - l2, l2)

    def mats():
        for X in ens.enumerate():
            yield code_pair(q, k, l1, l2, X, Z)[1]
    return _matrix_ensemble(q, l2, k, mats, ens.size, "code_pair_c2", {"q": q, "k": k, "l1": l1, "l2": l2})


def nested_toeplitz_c1_ensemble(q, k, l1, l2):
    """C1 generators (I 0; X (I; X'')) with independent Toeplitz X and X''."""
    _check_dims(k, l1, l2)
    eX = ToeplitzEnsemble(q, k - l2, l2)
    eZ = ToeplitzEnsemble(q, k - l1, l1 - l2)

    def mats():
        for X in eX.enumerate():
            for X2 in eZ.enumerate():
                Z = block(q, [[np.eye(l1 - l2, dtype=np.int64)], [X2.entries]])
                yield code_pair(q, k, l1, l2, X, Z)[0]
    return _matrix_ensemble(q, l1, k, mats, eX.size * eZ.size, "nested_toeplitz_c1",
                            {"q": q, "k": k, "l1": l1, "l2": l2})


def toeplitz_injective_ensemble(q, k, l):
    """All (X'; X): X' invertible, X Toeplitz (k-l) x l, uniform product law."""
    inv = list(invertible_matrices(q, l))
    ens = ToeplitzEnsemble(q, k - l, l)

    def mats():
        for Xp in inv:
            for X in ens.enumerate():
                yield block(q, [[Xp.entries], [X.entries]])
    return _matrix_ensemble(q, l, k, mats, len(inv) * ens.size, "toeplitz_injective",
                            {"q": q, "k": k, "l": l})


def _injective_matrices(q, k, l):
    """Column-by-column enumeration: column j avoids the span of columns < j."""
    V = all_vectors(q, k)

    def rec(cols):
        if len(cols) == l:
            yield GFMatrix(q, np.array(cols, dtype=np.int64).T.reshape(k, l))
            return
        span = set(GFMatrix(q, np.array(cols).T).image().tolist()) if cols else {0}
        for i in range(V.shape[0]):
            if i not in span:
                yield from rec(cols + [V[i]])
    return rec([])


def all_injective_ensemble(q, k, l):
    """Uniform law on all injective linear maps F_q^l -> F_q^k."""
    size = math.prod(q**k - q**i for i in range(l))
    return _matrix_ensemble(q, l, k, lambda: _injective_matrices(q, k, l), size, "all_injective",
                            {"q": q, "k": k, "l": l})


def irreducible_polynomial(q, k):
    """Lowest monic irreducible polynomial of degree k over F_q (coefficients low to high)."""
    for tail in itertools.product(range(q), repeat=k):
        coeffs = list(tail) + [1]
        if k == 1 or (coeffs[0] != 0 and not _has_factor(coeffs, q)):
            return np.array(coeffs, dtype=np.int64)
    raise RuntimeError("no irreducible polynomial found")


def _poly_mod(a, m, q):
    a = list(a)
    inv = pow(int(m[-1]), -1, q)
    while len(a) >= len(m):
        c = a[-1] * inv % q
        for i in range(len(m)):
            a[len(a) - len(m) + i] = (a[len(a) - len(m) + i] - c * m[i]) % q
        a.pop()
    return a


def _has_factor(f, q):
    k = len(f) - 1
    for deg in range(1, k // 2 + 1):
        for tail in itertools.product(range(q), repeat=deg):
            if not any(_poly_mod(f, list(tail) + [1], q)):
                return True
    return False


def field_multiplier_ensemble(q, k, l):
    """a -> alpha * a in GF(q^k), F_q^l embedded as polynomials of degree < l.

    alpha runs uniformly over the nonzero field elements, so a nonzero a is
    sent to each nonzero x with probability exactly 1/(q^k - 1).
    """
    if not 0 < l <= k:
        raise SizeMismatch("need 0 < l <= k")
    f = irreducible_polynomial(q, k)
    C = np.zeros((k, k), dtype=np.int64)
    C[1:, :-1] = np.eye(k - 1, dtype=np.int64)
    C[:, -1] = (-f[:-1]) % q
    powers = [np.eye(k, dtype=np.int64)]
    for _ in range(k - 1):
        powers.append(C @ powers[-1] % q)

    def mats():
        # coordinates are coefficients high to low so index order matches F_q^k vectors
        rev = np.arange(k)[::-1]
        for alpha in itertools.product(range(q), repeat=k):
            if not any(alpha):
                continue
            Mx = sum(c * P for c, P in zip(alpha[::-1], powers)) % q
            Mx = Mx[np.ix_(rev, rev)]
            yield GFMatrix(q, Mx[:, k - l:])
    return _matrix_ensemble(q, l, k, mats, q**k - 1, "field_multiplier", {"q": q, "k": k, "l": l})


def id_times_g_ensemble(q, l1, l2):
    """f = id x g : F_q^{l2} -> F_q^{l2} x F_q^{l1-l2}, g Toeplitz."""
    ens = ToeplitzEnsemble(q, l1 - l2, l2)

    def mats():
        for g in ens.enumerate():
            yield block(q, [[np.eye(l2, dtype=np.int64)], [g.entries]])
    return _matrix_ensemble(q, l2, l1, mats, ens.size, "id_times_g", {"q": q, "l1": l1, "l2": l2})


def hash_family(kind, **params):
    """partition_permutation(domain, M) | toeplitz(q, n, m) | toeplitz_2c(q, l1, l2) | explicit(tables, M)."""
    if kind == "partition_permutation":
        n, M = int(params["domain"]), int(params["M"])
        if M < 1 or n % M:
            raise IndivisibleDomain(f"|A|={n} is not a multiple of M={M}")
        base = np.arange(n) // (n // M)
        size = math.factorial(n)

        def members():
            for perm in itertools.permutations(range(n)):
                yield 1.0 / size, base[list(perm)]
        return MapEnsemble(n, M, size, members, kind, {"domain": n, "M": M})
    if kind in ("toeplitz", "toeplitz_2c"):
        q = check_prime(params["q"])
        if kind == "toeplitz":
            n, m = int(params["n"]), int(params["m"])
        else:
            n, m = int(params["l2"]), int(params["l1"]) - int(params["l2"])
        ens = ToeplitzEnsemble(q, m, n)
        fam = _matrix_ensemble(q, n, m, ens.enumerate, ens.size, kind, dict(params))
        return fam
    if kind == "explicit":
        tables = [np.asarray(t, dtype=np.int64) for t in params["tables"]]
        M = int(params["M"])
        n = tables[0].size

        def members():
            for t in tables:
                yield 1.0 / len(tables), t
        return MapEnsemble(n, M, len(tables), members, kind, {"M": M})
    raise ValueError(f"unknown hash family kind {kind!r}")


# ---------------------------------------------------------------- conditions


@dataclass
class ConditionReport:
    condition: str
    worst: float
    bound: float
    passed: bool
    witness: tuple
    ensemble_size: int
    description: str = ""


def _prob_table(ens):
    """P[a, x] = Pr(f(a) = x), exact accumulation over the ensemble."""
    P = np.zeros((ens.domain, ens.range))
    rows = np.arange(ens.domain)
    for w, t in ens.members():
        P[rows, t] += w
    return P


def verify_condition(cond, ensemble, budget=ENUM_BUDGET, tol=1e-12):
    """Exact worst case of an ensemble condition.

    collision: Pr(f(a1) = f(a2)) <= 1/M for a1 != a2.
    cover: images have constant size L and Pr(x in image) <= L/|X| for x != 0.
    spread: Pr(f(a) = x) <= 1/(|X| - 1) for nonzero a and x.
    balanced: Pr(g(a) = b) = 1/M for a != 0.
    """
    ensemble.check_budget(budget)
    if cond == "collision":
        n = ensemble.domain
        coll = np.zeros((n, n))
        for w, t in ensemble.members():
            coll += w * (t[:, None] == t[None, :])
        np.fill_diagonal(coll, -np.inf)
        a1, a2 = np.unravel_index(np.argmax(coll), coll.shape)
        worst, bound = float(coll[a1, a2]) if n > 1 else 0.0, 1.0 / ensemble.range
        witness = (int(a1), int(a2))
    elif cond == "cover":
        inc = np.zeros(ensemble.range)
        sizes = set()
        for w, t in ensemble.members():
            img = np.unique(t)
            sizes.add(img.size)
            inc[img] += w
        if len(sizes) != 1:
            return ConditionReport(cond, np.inf, np.nan, False, ("size", tuple(sorted(sizes))),
                                   ensemble.size, ensemble.description)
        L = sizes.pop()
        x = 1 + int(np.argmax(inc[1:]))
        worst, bound, witness = float(inc[x]), L / ensemble.range, (x,)
    elif cond == "spread":
        P = _prob_table(ensemble)[1:, 1:]
        a, x = np.unravel_index(np.argmax(P), P.shape)
        worst, bound, witness = float(P[a, x]), 1.0 / (ensemble.range - 1), (int(a) + 1, int(x) + 1)
    elif cond == "balanced":
        P = _prob_table(ensemble)[1:]
        target = 1.0 / ensemble.range
        dev = np.abs(P - target)
        a, b = np.unravel_index(np.argmax(dev), dev.shape)
        worst, bound, witness = float(P[a, b]), target, (int(a) + 1, int(b))
        return ConditionReport(cond, worst, bound, bool(dev.max() <= tol), witness,
                               ensemble.size, ensemble.description)
    else:
        raise ValueError(f"unknown condition {cond!r}")
    return ConditionReport(cond, worst, bound, worst <= bound + tol, witness,
                           ensemble.size, ensemble.description)
