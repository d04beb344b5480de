"""A finite-mode model of the Gaussian Fock space.

The base space has ``d`` modes with weights ``w_j``; ``|z|_p^2 =
sum w_j^(2p) |z_j|^2``.  A chaos expansion is a list of symmetric
kernels ``f_0 .. f_N``.  Each ``f_n`` is stored by its values on the
nondecreasing multi-indices of length ``n`` (lexicographic order); the number
of ordinary index tuples sharing a canonical entry is its multiplicity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Any, Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.special import gammaln

from .errors import DegreeCapExceeded, EnvelopeMissing, GrowthSpaceError, WeightUnavailable
from .growth_functions import GrowthFunction, dual_of, legendre
from .weight_sequences import WeightSequence

DEGREE_CAP = 10
MAX_MODES = 8


# ---------------------------------------------------------------------------
# index bookkeeping


@lru_cache(maxsize=None)
def canonical(d: int, n: int) -> np.ndarray:
    """Nondecreasing multi-indices of length ``n`` over ``range(d)``, shape ``(M, n)``."""
    rows = list(combinations_with_replacement(range(d), n))
    return np.array(rows, dtype=np.int64).reshape(len(rows), n)


@lru_cache(maxsize=None)
def counts(d: int, n: int) -> np.ndarray:
    """Occupation numbers of each canonical index, shape ``(M, d)``."""
    idx = canonical(d, n)
    out = np.zeros((idx.shape[0], d), dtype=np.int64)
    for col in range(n):
        np.add.at(out, (np.arange(idx.shape[0]), idx[:, col]), 1)
    return out


@lru_cache(maxsize=None)
def multiplicity(d: int, n: int) -> np.ndarray:
    c = counts(d, n)
    return np.exp(gammaln(n + 1.0) - gammaln(c + 1.0).sum(axis=1))


def _keys(c: np.ndarray, n: int) -> np.ndarray:
    radix = (n + 1) ** np.arange(c.shape[-1], dtype=np.int64)
    return c @ radix


@lru_cache(maxsize=None)
def _key_lookup(d: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    keys = _keys(counts(d, n), n)
    order = np.argsort(keys)
    return keys[order], order


def _rows_for_counts(d: int, n: int, c: np.ndarray) -> np.ndarray:
    sorted_keys, order = _key_lookup(d, n)
    k = _keys(c, n)
    pos = np.searchsorted(sorted_keys, k)
    return order[pos]


@lru_cache(maxsize=None)
def append_table(d: int, n: int) -> np.ndarray:
    """Row of ``sorted(I + (j,))`` in degree ``n + 1`` for each degree-``n`` index ``I``."""
    c = counts(d, n)
    out = np.empty((c.shape[0], d), dtype=np.int64)
    for j in range(d):
        cj = c.copy()
        cj[:, j] += 1
        out[:, j] = _rows_for_counts(d, n + 1, cj)
    return out


@lru_cache(maxsize=None)
def merge_table(d: int, a: int, b: int) -> tuple[np.ndarray, np.ndarray]:
    """Targets and symmetrisation weights for combining degrees ``a`` and ``b``.

    For canonical ``A`` (degree ``a``) and ``B`` (degree ``b``) the target is
    the row of the multiset union ``I`` in degree ``a + b``; the weight is
    ``prod_i C(m_i(I), m_i(A)) / C(a + b, a)``, the share of position subsets
    of ``I`` that carry ``A``.
    """
    ca = counts(d, a)[:, None, :]
    cb = counts(d, b)[None, :, :]
    ci = ca + cb
    rows = _rows_for_counts(d, a + b, ci.reshape(-1, d)).reshape(ci.shape[:2])
    log_w = (gammaln(ci + 1.0) - gammaln(ca + 1.0) - gammaln(cb + 1.0)).sum(axis=2)
    log_w -= gammaln(a + b + 1.0) - gammaln(a + 1.0) - gammaln(b + 1.0)
    return rows, np.exp(log_w)


# ---------------------------------------------------------------------------
# the space model


@dataclass(frozen=True)
class SpaceModel:
    """``d`` modes with increasing weights ``w_j >= 2`` (default ``2(j+1)``)."""

    d: int
    mode_weights: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if not 1 <= self.d <= MAX_MODES:
            raise ValueError(f"d must be between 1 and {MAX_MODES}")
        weight_array = self.mode_weights or tuple(2.0 * (j + 1) for j in range(self.d))
        if len(weight_array) != self.d or weight_array[0] < 2 or any(b <= a for a, b in zip(weight_array, weight_array[1:])):
            raise ValueError("weights must be strictly increasing and at least 2")
        object.__setattr__(self, "mode_weights", tuple(float(v) for v in weight_array))

    @property
    def decay(self) -> float:
        return 1.0 / self.mode_weights[0]

    @property
    def weight_array(self) -> np.ndarray:
        return np.asarray(self.mode_weights)

    def norm(self, vec: np.ndarray, p: float) -> float:
        vec = np.asarray(vec)
        return float(np.sqrt(np.sum(self.weight_array ** (2 * p) * np.abs(vec) ** 2)))

    def sandwich_gap(self) -> float:
        """Smallest ``q - p`` with ``2 decay^(2 (q - p)) <= 1``."""
        return math.log(2.0) / (2.0 * math.log(1.0 / self.decay))

    def kernel_weights(self, n: int, p: float) -> np.ndarray:
        """``mult(I) * prod_{i in I} w_i^(2p)`` for each canonical index."""
        return multiplicity(self.d, n) * np.exp(2.0 * p * (counts(self.d, n) @ np.log(self.weight_array)))


def hs_norm(model: SpaceModel, q: float, p: float) -> float:
    """Hilbert-Schmidt norm of the inclusion ``E_q -> E_p`` for ``q > p``."""
    if q <= p:
        raise ValueError("need q > p")
    return float(np.sqrt(np.sum(model.weight_array ** (-2.0 * (q - p)))))


# ---------------------------------------------------------------------------
# chaos expansions


class ChaosExpansion:
    """Kernels ``f_0 .. f_N`` over ``d`` modes; immutable once built."""

    __slots__ = ("d", "kernels")

    def __init__(self, d: int, kernels: Sequence[np.ndarray]) -> None:
        ks = []
        for n, k in enumerate(kernels):
            arr = np.array(k, dtype=complex).reshape(-1)
            if arr.size != canonical(d, n).shape[0]:
                raise ValueError(f"degree {n} kernel needs {canonical(d, n).shape[0]} entries")
            arr.setflags(write=False)
            ks.append(arr)
        if not ks:
            ks = [np.zeros(1, dtype=complex)]
        self.d = d
        self.kernels = tuple(ks)

    @property
    def N(self) -> int:
        return len(self.kernels) - 1

    def kernel(self, n: int) -> np.ndarray:
        if n <= self.N:
            return self.kernels[n]
        return np.zeros(canonical(self.d, n).shape[0], dtype=complex)

    def padded(self, N: int) -> "ChaosExpansion":
        return ChaosExpansion(self.d, [self.kernel(n) for n in range(N + 1)])

    def __add__(self, other: "ChaosExpansion") -> "ChaosExpansion":
        N = max(self.N, other.N)
        return ChaosExpansion(self.d, [self.kernel(n) + other.kernel(n) for n in range(N + 1)])

    def __sub__(self, other: "ChaosExpansion") -> "ChaosExpansion":
        N = max(self.N, other.N)
        return ChaosExpansion(self.d, [self.kernel(n) - other.kernel(n) for n in range(N + 1)])

    def scale(self, c: complex) -> "ChaosExpansion":
        return ChaosExpansion(self.d, [c * k for k in self.kernels])

    def max_abs_diff(self, other: "ChaosExpansion") -> float:
        diff = self - other
        return max(float(np.max(np.abs(k))) if k.size else 0.0 for k in diff.kernels)

    def to_json(self) -> dict[str, Any]:
        out = []
        for n, k in enumerate(self.kernels):
            idx = canonical(self.d, n)
            entries = [
                {"index": [int(i) for i in idx[r]], "value": [float(k[r].real), float(k[r].imag)]}
                for r in range(k.size)
                if k[r] != 0
            ]
            out.append({"degree": n, "entries": entries})
        return {"d": self.d, "N": self.N, "kernels": out}

    @classmethod
    def from_json(cls, doc: dict[str, Any]) -> "ChaosExpansion":
        d, N = int(doc["d"]), int(doc["N"])
        ks = [np.zeros(canonical(d, n).shape[0], dtype=complex) for n in range(N + 1)]
        for block in doc["kernels"]:
            n = int(block["degree"])
            for e in block["entries"]:
                idx = tuple(sorted(int(i) for i in e["index"]))
                row = _rows_for_counts(d, n, np.bincount(idx, minlength=d)[None, :].astype(np.int64))[0] if n else 0
                ks[n][row] = complex(e["value"][0], e["value"][1])
        return cls(d, ks)

    def __repr__(self) -> str:
        return f"ChaosExpansion(d={self.d}, N={self.N})"


def constant(d: int, c: complex = 1.0, N: int = 0) -> ChaosExpansion:
    ks = [np.full(1, c, dtype=complex)] + [np.zeros(canonical(d, n).shape[0], dtype=complex) for n in range(1, N + 1)]
    return ChaosExpansion(d, ks)


def zero(d: int, N: int = 0) -> ChaosExpansion:
    return constant(d, 0.0, N)


def from_entries(d: int, N: int, entries: dict[tuple[int, ...], complex]) -> ChaosExpansion:
    """Build an expansion from ``{multi_index: value}``; order inside an index is irrelevant."""
    ks = [np.zeros(canonical(d, n).shape[0], dtype=complex) for n in range(N + 1)]
    for idx, v in entries.items():
        n = len(idx)
        if n == 0:
            ks[0][0] = v
            continue
        c = np.bincount(np.asarray(idx), minlength=d)[None, :].astype(np.int64)
        ks[n][_rows_for_counts(d, n, c)[0]] = v
    return ChaosExpansion(d, ks)


def random_expansion(rng: np.random.Generator, d: int, N: int, scale: float = 1.0,
                     real: bool = False) -> ChaosExpansion:
    """Independent complex Gaussian kernel entries damped by ``scale^n / n!``."""
    ks = []
    for n in range(N + 1):
        m = canonical(d, n).shape[0]
        vals = rng.standard_normal(m) + (0 if real else 1j) * rng.standard_normal(m)
        ks.append(vals * scale**n / math.factorial(n))
    return ChaosExpansion(d, ks)


def _tensor_power(vec: np.ndarray, d: int, n: int) -> np.ndarray:
    if n == 0:
        return np.ones(1, dtype=complex)
    return np.prod(np.asarray(vec, dtype=complex)[canonical(d, n)], axis=1)


def renorm_exp(vec: Sequence[complex], N: int) -> ChaosExpansion:
    """Kernels ``z^{(x)n} / n!`` of the renormalised exponential, truncated at ``N``."""
    vec = np.asarray(vec, dtype=complex)
    d = vec.size
    return ChaosExpansion(d, [_tensor_power(vec, d, n) / math.factorial(n) for n in range(N + 1)])


def plain_exp(vec: Sequence[complex], N: int) -> ChaosExpansion:
    """Chaos expansion of the polynomial ``sum_{n<=N} <x, z>^n / n!``."""
    vec = np.asarray(vec, dtype=complex)
    d = vec.size
    return from_plain(d, [_tensor_power(vec, d, n) / math.factorial(n) for n in range(N + 1)])


# ---------------------------------------------------------------------------
# kernel norms


def kernel_norm_sq(model: SpaceModel, f: np.ndarray, n: int, p: float) -> float:
    """``|f_n|_p^2`` summed over the full tensor, i.e. with multiplicities."""
    return float(np.sum(model.kernel_weights(n, p) * np.abs(f) ** 2))


NORM_KINDS = ("sequence", "inverse_sequence", "test", "generalized", "generalized_dual", "test_dual")


def _dual_cache(growth: GrowthFunction) -> GrowthFunction:
    dual = growth.params.get("_dual")
    if dual is None:
        dual = dual_of(growth)
        growth.params["_dual"] = dual
    return dual


def log_legendre(growth: GrowthFunction, n: int) -> float:
    try:
        return legendre(growth, n).log_value
    except GrowthSpaceError as exc:
        raise WeightUnavailable(f"Legendre value of {growth.name} at {n} unavailable: {exc}") from exc


def log_legendre_of_dual(growth: GrowthFunction, n: int) -> float:
    return log_legendre(_dual_cache(growth), n)


def degree_log_weight(kind: str, source: WeightSequence | GrowthFunction, n: int) -> float:
    """Log of the factor multiplying ``|f_n|^2`` in each weighted norm."""
    lf = math.lgamma(n + 1)
    if kind == "sequence":
        return lf + source.log_weight(n)  # type: ignore[union-attr]
    if kind == "inverse_sequence":
        return lf - source.log_weight(n)  # type: ignore[union-attr]
    if kind == "test":
        return -log_legendre(source, n)  # type: ignore[arg-type]
    if kind == "generalized":
        return log_legendre(source, n) + 2.0 * lf  # type: ignore[arg-type]
    if kind == "generalized_dual":
        return -log_legendre_of_dual(source, n)  # type: ignore[arg-type]
    if kind == "test_dual":
        return log_legendre_of_dual(source, n) + 2.0 * lf  # type: ignore[arg-type]
    raise ValueError(f"unknown norm kind {kind!r}")


def norm(expansion: ChaosExpansion, model: SpaceModel, p: float, kind: str,
         source: WeightSequence | GrowthFunction) -> float:
    """Weighted norm ``(sum_n w(n) |f_n|_p^2)^(1/2)``.

    ``p`` is the signed grade, so the norms on the generalized side are
    requested with ``p < 0``.  With ``leg`` the Legendre transform of the
    growth function and ``leg_dual`` that of its dual, ``w(n)`` is

    ============================  ==========================
    ``sequence``                  ``n! a(n)``
    ``inverse_sequence``          ``n! / a(n)``
    ``test``                      ``1 / leg(n)``
    ``generalized``               ``leg(n) (n!)^2``
    ``generalized_dual``          ``1 / leg_dual(n)``
    ``test_dual``                 ``leg_dual(n) (n!)^2``
    ============================  ==========================
    """
    logs = []
    for n, f in enumerate(expansion.kernels):
        s = kernel_norm_sq(model, f, n, p)
        if s == 0.0:
            continue
        logs.append(math.log(s) + degree_log_weight(kind, source, n))
    if not logs:
        return 0.0
    return math.exp(0.5 * float(np.logaddexp.reduce(logs)))


# ---------------------------------------------------------------------------
# S-transform and products


def s_transform(expansion: ChaosExpansion, vec: Sequence[complex]) -> complex:
    """``sum_n <f_n, z^{(x)n}>`` with the bilinear pairing."""
    vec = np.asarray(vec, dtype=complex)
    total = 0j
    for n, f in enumerate(expansion.kernels):
        total += complex(np.sum(multiplicity(expansion.d, n) * f * _tensor_power(vec, expansion.d, n)))
    return total


def _check_cap(N: int, cap: int) -> None:
    if N > cap:
        raise DegreeCapExceeded(f"result degree {N} exceeds the cap {cap}")


def _symmetrise_into(out: np.ndarray, d: int, a: int, b: int, h: np.ndarray) -> None:
    rows, w = merge_table(d, a, b)
    np.add.at(out, rows.reshape(-1), (w * h).reshape(-1))


def wick_product(expansion: ChaosExpansion, other: ChaosExpansion, cap: int = DEGREE_CAP) -> ChaosExpansion:
    """Cauchy product of kernels with symmetrisation; ``S`` turns it into a product."""
    d = expansion.d
    N = expansion.N + other.N
    _check_cap(N, cap)
    out = [np.zeros(canonical(d, n).shape[0], dtype=complex) for n in range(N + 1)]
    for j, f in enumerate(expansion.kernels):
        for k, g in enumerate(other.kernels):
            if np.any(f) and np.any(g):
                _symmetrise_into(out[j + k], d, j, k, np.outer(f, g))
    return ChaosExpansion(d, out)


def contract(f: np.ndarray, d: int, n: int, y: np.ndarray) -> np.ndarray:
    """``f (deg n)`` contracted once with the vector ``y``; degree ``n - 1``."""
    return f[append_table(d, n - 1)] @ np.asarray(y, dtype=complex)


def trace(f: np.ndarray, d: int, n: int) -> np.ndarray:
    """Trace of ``f`` over one index pair against the identity; degree ``n - 2``."""
    first = append_table(d, n - 2)
    second = append_table(d, n - 1)
    out = np.zeros(first.shape[0], dtype=complex)
    for j in range(d):
        out += f[second[first[:, j], j]]
    return out


def _pair_contraction(f: np.ndarray, j: int, g: np.ndarray, k: int, r: int, d: int) -> np.ndarray:
    """``h(A, B) = sum_{c in [d]^r} f(A c) g(B c)`` as a matrix over canonical ``A, B``."""
    if r == 0:
        return np.outer(f, g)
    rows_f, _ = merge_table(d, j - r, r)
    rows_g, _ = merge_table(d, k - r, r)
    mult = multiplicity(d, r)
    return (f[rows_f] * mult) @ g[rows_g].T


def pointwise_product(expansion: ChaosExpansion, other: ChaosExpansion, cap: int = DEGREE_CAP) -> ChaosExpansion:
    """Kernels of the product of two expansions as functions of ``x``.

    Uses the contraction expansion of a product of two Wick monomials,
    ``sum_r r! C(j, r) C(k, r)`` times the symmetrised ``r``-fold contraction.
    """
    d = expansion.d
    N = expansion.N + other.N
    _check_cap(N, cap)
    out = [np.zeros(canonical(d, n).shape[0], dtype=complex) for n in range(N + 1)]
    for j, f in enumerate(expansion.kernels):
        if not np.any(f):
            continue
        for k, g in enumerate(other.kernels):
            if not np.any(g):
                continue
            for r in range(min(j, k) + 1):
                coef = math.factorial(r) * math.comb(j, r) * math.comb(k, r)
                h = _pair_contraction(f, j, g, k, r, d)
                _symmetrise_into(out[j + k - 2 * r], d, j - r, k - r, coef * h)
    return ChaosExpansion(d, out)


# ---------------------------------------------------------------------------
# evaluation


def _wick_pairing(f: np.ndarray, d: int, n: int, x: np.ndarray) -> complex:
    """``<:x^{(x)n}:, f>`` by ``W_n(f) = W_{n-1}(f . x) - (n-1) W_{n-2}(tr f)``.

    Contraction with ``x`` and the trace commute, so the kernels reached are
    indexed by (contractions, traces) and memoised.
    """
    kernels: dict[tuple[int, int], np.ndarray] = {(0, 0): f}
    values: dict[tuple[int, int], complex] = {}

    def kernel(j: int, k: int) -> np.ndarray:
        got = kernels.get((j, k))
        if got is None:
            if j > 0:
                got = contract(kernel(j - 1, k), d, n - (j - 1) - 2 * k, x)
            else:
                got = trace(kernel(0, k - 1), d, n - 2 * (k - 1))
            kernels[(j, k)] = got
        return got

    # fill bottom-up so the recursion depth stays small
    for m in range(0, n + 1):
        for k in range(0, (n - m) // 2 + 1):
            j = n - m - 2 * k
            if m == 0:
                values[(j, k)] = complex(kernel(j, k)[0])
            elif m == 1:
                values[(j, k)] = values[(j + 1, k)]
            else:
                values[(j, k)] = values[(j + 1, k)] - (m - 1) * values[(j, k + 1)]
    return values[(0, 0)]


def evaluate(expansion: ChaosExpansion, x: Sequence[complex]) -> complex:
    """``f(x) = sum_n <:x^{(x)n}:, f_n>`` at a (possibly complex) point."""
    x = np.asarray(x, dtype=complex)
    return complex(sum(_wick_pairing(f, expansion.d, n, x) for n, f in enumerate(expansion.kernels) if np.any(f)))


def _hermite_table(X: np.ndarray, N: int) -> np.ndarray:
    """Probabilists' Hermite polynomials ``He_0..He_N`` at every entry of ``X``."""
    H = np.empty(X.shape + (N + 1,), dtype=complex)
    H[..., 0] = 1.0
    if N >= 1:
        H[..., 1] = X
    for m in range(1, N):
        H[..., m + 1] = X * H[..., m] - m * H[..., m - 1]
    return H


def evaluate_batch(expansion: ChaosExpansion, X: np.ndarray) -> np.ndarray:
    """Vectorised evaluation at the rows of ``X`` through Hermite products.

    For the identity covariance the Wick monomial with occupation numbers
    ``m_j`` is ``prod_j He_{m_j}(x_j)``; this is the fast path used by the
    sup searches and is cross-checked against :func:`evaluate` in the tests.
    """
    X = np.atleast_2d(np.asarray(X, dtype=complex))
    d = expansion.d
    H = _hermite_table(X, expansion.N)
    out = np.zeros(X.shape[0], dtype=complex)
    cols = np.arange(d)
    for n, f in enumerate(expansion.kernels):
        if not np.any(f):
            continue
        c = counts(d, n)
        vals = np.prod(H[:, cols[None, :], c], axis=2)
        out += vals @ (multiplicity(d, n) * f)
    return out


# ---------------------------------------------------------------------------
# operators


def diff_op(y: Sequence[complex], expansion: ChaosExpansion) -> ChaosExpansion:
    """Gateaux derivative in direction ``y``: ``g_n = (n + 1) f_{n+1} . y``."""
    y = np.asarray(y, dtype=complex)
    d = expansion.d
    ks = [(n + 1) * contract(expansion.kernels[n + 1], d, n + 1, y) for n in range(expansion.N)]
    return ChaosExpansion(d, ks + [np.zeros(canonical(d, expansion.N).shape[0], dtype=complex)])


def translation(y: Sequence[complex], expansion: ChaosExpansion) -> ChaosExpansion:
    """``(T_y f)(x) = f(x + y)``: ``g_n = sum_m C(m, n) f_m`` contracted ``m - n`` times."""
    y = np.asarray(y, dtype=complex)
    d = expansion.d
    out = [np.zeros(canonical(d, n).shape[0], dtype=complex) for n in range(expansion.N + 1)]
    for m, f in enumerate(expansion.kernels):
        cur = f
        for n in range(m, -1, -1):
            out[n] += math.comb(m, n) * cur
            if n > 0:
                cur = contract(cur, d, n, y)
    return ChaosExpansion(d, out)


def _trace_power(f: np.ndarray, d: int, n: int, k: int) -> np.ndarray:
    for i in range(k):
        f = trace(f, d, n - 2 * i)
    return f


def to_plain(expansion: ChaosExpansion) -> list[np.ndarray]:
    """Kernels ``h_m`` with ``f(x) = sum_m <x^{(x)m}, h_m>`` (ordinary powers)."""
    d, N = expansion.d, expansion.N
    out = [np.zeros(canonical(d, m).shape[0], dtype=complex) for m in range(N + 1)]
    for n, f in enumerate(expansion.kernels):
        for k in range(n // 2 + 1):
            m = n - 2 * k
            coef = (-1) ** k * math.factorial(n) / (math.factorial(k) * math.factorial(m) * 2**k)
            out[m] += coef * _trace_power(f, d, n, k)
    return out


def from_plain(d: int, plain: Sequence[np.ndarray]) -> ChaosExpansion:
    """Inverse of :func:`to_plain`: ``x^{(x)n}`` expands into Wick powers plus traces."""
    N = len(plain) - 1
    out = [np.zeros(canonical(d, m).shape[0], dtype=complex) for m in range(N + 1)]
    for n, h in enumerate(plain):
        h = np.asarray(h, dtype=complex)
        for k in range(n // 2 + 1):
            m = n - 2 * k
            coef = math.factorial(n) / (math.factorial(k) * math.factorial(m) * 2**k)
            out[m] += coef * _trace_power(h, d, n, k)
    return ChaosExpansion(d, out)


def scaling(z: complex, expansion: ChaosExpansion) -> ChaosExpansion:
    """``(S_z f)(x) = f(z x)``."""
    plain = to_plain(expansion)
    return from_plain(expansion.d, [z**n * h for n, h in enumerate(plain)])


def _double_factorial_odd(k: int) -> int:
    """``(2k - 1)!!``, the number of perfect pairings of ``2k`` points."""
    out = 1
    for i in range(1, 2 * k, 2):
        out *= i
    return out


def fourier_gauss(a: complex, b: complex, expansion: ChaosExpansion) -> ChaosExpansion:
    """``(G_{a,b} f)(x) = int f(a y + b x) dgauss(y)``.

    In plain monomials, ``E[y^{(x)2k}]`` paired with a symmetric kernel is
    ``(2k - 1)!!`` times the ``k``-fold trace (Isserlis) and odd moments vanish.
    """
    d, N = expansion.d, expansion.N
    plain = to_plain(expansion)
    out = [np.zeros(canonical(d, m).shape[0], dtype=complex) for m in range(N + 1)]
    for n, h in enumerate(plain):
        for k in range(n // 2 + 1):
            m = n - 2 * k
            coef = math.comb(n, 2 * k) * a ** (2 * k) * b**m * _double_factorial_odd(k)
            out[m] += coef * _trace_power(h, d, n, k)
    return from_plain(d, out)


def renormalizing_operator(expansion: ChaosExpansion) -> ChaosExpansion:
    """The operator taking ``e^{<., z>}`` to ``:e^{<., z>}:``, i.e. ``G_{i,1}``."""
    return fourier_gauss(1j, 1.0, expansion)


def gauss_expectation(expansion: ChaosExpansion) -> complex:
    """``int f dgauss``: the constant kernel."""
    return complex(expansion.kernels[0][0])


# ---------------------------------------------------------------------------
# intrinsic norm


@dataclass
class SupEstimate:
    lower_bound: float
    witness: np.ndarray
    log_lower_bound: float


def intrinsic_norm_estimate(
    expansion: ChaosExpansion,
    model: SpaceModel,
    p: float,
    growth: GrowthFunction,
    rng: np.random.Generator,
    starts: int = 128,
    steps: int = 200,
    polish: int = 4,
) -> SupEstimate:
    """Lower bound on ``sup_x |f(x)| u(|x|_{-p}^2)^(-1/2)``.

    All starts climb together with a (1+1) evolution strategy (step doubled
    on success, shrunk on failure); the best few are then polished with
    Powell's method.  Whatever is returned was attained at the witness, so it
    is a genuine lower bound.
    """
    d = expansion.d
    scale = model.weight_array ** (-p)

    def objective_batch(Z: np.ndarray) -> np.ndarray:
        vals = np.abs(evaluate_batch(expansion, Z))
        r = np.sum(model.weight_array ** (-2.0 * p) * np.abs(Z) ** 2, axis=1)
        with np.errstate(divide="ignore"):
            return np.log(vals) - 0.5 * np.array([growth.log_eval(float(v)) for v in r])

    radii = np.exp(rng.uniform(math.log(0.1), math.log(10.0), size=(starts, 1)))
    Z = radii * scale * (rng.standard_normal((starts, d)) + 1j * rng.standard_normal((starts, d))) / math.sqrt(2.0)
    Z[0] = 0.0
    F = objective_batch(Z)
    sigma = 0.3 * radii[:, 0]
    for _ in range(steps):
        prop = Z + (sigma[:, None] * scale) * (rng.standard_normal((starts, d)) + 1j * rng.standard_normal((starts, d)))
        Fp = objective_batch(prop)
        better = Fp > F
        Z[better] = prop[better]
        F[better] = Fp[better]
        sigma = np.where(better, sigma * 1.5, sigma * 0.8)
        sigma = np.maximum(sigma, 1e-12)

    def neg(v: np.ndarray) -> float:
        z = (v[:d] + 1j * v[d:])[None, :]
        val = objective_batch(z)[0]
        return -val if np.isfinite(val) else 1e300

    order = np.argsort(-F)[:polish]
    best_val = float(F[order[0]])
    best_z = Z[order[0]].copy()
    for i in order:
        x0 = np.concatenate([Z[i].real, Z[i].imag])
        res = minimize(neg, x0, method="Powell", options={"xtol": 1e-10, "ftol": 1e-14, "maxfev": 4000})
        z = res.x[:d] + 1j * res.x[d:]
        val = float(objective_batch(z[None, :])[0])
        if val > best_val:
            best_val, best_z = val, z
    return SupEstimate(math.exp(best_val), best_z, best_val)


# ---------------------------------------------------------------------------
# Gaussian integrals and Hida measures


@dataclass(frozen=True)
class GaussianMeasureSpec:
    variances: tuple[float, ...]
    support_grade: float = 0.0

    def __post_init__(self) -> None:
        if any(v <= 0 for v in self.variances):
            raise ValueError("variances must be positive")


def standard_gaussian(d: int) -> GaussianMeasureSpec:
    return GaussianMeasureSpec(tuple(1.0 for _ in range(d)))


def gaussian_exp_integral(model: SpaceModel, q: float, c2: float) -> float:
    """``int exp(2 c2 |x|_{-q}^2) dgauss = prod_j (1 - 4 c2 w_j^(-2q))^(-1/2)``."""
    factors = 1.0 - 4.0 * c2 * model.weight_array ** (-2.0 * q)
    if np.any(factors <= 0):
        return math.inf
    return float(np.prod(factors ** -0.5))


@dataclass
class HidaResult:
    integrable: bool
    bound: float
    violating_mode: int | None = None
    norm_constant: float | None = None


def hida_check(model: SpaceModel, measure: GaussianMeasureSpec, p: float, growth: GrowthFunction,
               q: float | None = None) -> HidaResult:
    """Bound ``int u(|x|_{-p}^2)^(1/2) dmeasure`` through the envelope ``u <= c1 e^(c2 r)``.

    With ``q`` given, the constant ``L_{p,q}`` of the norm comparison is also
    returned (``None`` when ``4 e^2 ||i_{q,p}||_HS^2 >= 1`` or the Gaussian
    integral diverges).
    """
    if growth.flags.u2 is None:
        raise EnvelopeMissing(f"{growth.name} has no exponential envelope")
    c1, c2 = growth.flags.u2
    var = np.asarray(measure.variances)
    factors = 1.0 - c2 * var * model.weight_array ** (-2.0 * p)
    L = None
    if q is not None:
        hs2 = hs_norm(model, q, p) ** 2
        gint = gaussian_exp_integral(model, q, c2)
        if 4.0 * math.e**2 * hs2 < 1.0 and math.isfinite(gint):
            L = math.sqrt(c1) * (1.0 - 4.0 * math.e**2 * hs2) ** -0.5 * gint
    if np.any(factors <= 0):
        return HidaResult(False, math.inf, int(np.argmax(factors <= 0)), L)
    return HidaResult(True, math.sqrt(c1) * float(np.prod(factors ** -0.5)), None, L)
