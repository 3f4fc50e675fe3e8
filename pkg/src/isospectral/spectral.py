"""Finitely supported distributions and the Jacobi matrices they determine.

A distribution lives on a fixed, strictly increasing spectrum and is given by
homogeneous weights on a subset of it: any nonzero multiple of the weights
names the same distribution.  ``reconstruct`` runs the Stieltjes recurrence
on the discrete measure; ``spectral_distribution`` goes back by computing the
eigenvalues (Sturm bisection) and the squared first eigenvector components
from a twisted factorization, which keeps tiny weights relatively accurate.
"""

from __future__ import annotations

import decimal
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .partitions import OrderedPartition

#: Off-diagonal entries below this multiple of the matrix infinity-norm are zero.
SPLIT_TOL = 1e-12
#: Bisection stops once the bracket is this small relative to the spectral diameter.
EIG_TOL = 1e-13


class NumericalError(ArithmeticError):
    """A computation produced a non-finite or sign-inconsistent result."""


def _readonly(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Spectrum:
    """Strictly increasing reals ``lambda_0 < ... < lambda_{d-1}``."""

    lambdas: tuple[float, ...]

    def __post_init__(self):
        lam = tuple(float(x) for x in self.lambdas)
        if not lam:
            raise ValueError("a spectrum needs at least one point")
        if not all(math.isfinite(x) for x in lam):
            raise ValueError("spectrum points must be finite")
        if any(b <= a for a, b in zip(lam, lam[1:])):
            raise ValueError("spectrum points must be strictly increasing")
        object.__setattr__(self, "lambdas", lam)

    @property
    def d(self) -> int:
        return len(self.lambdas)

    def __len__(self) -> int:
        return len(self.lambdas)

    def points(self, indices: Iterable[int] | None = None) -> np.ndarray:
        lam = np.asarray(self.lambdas)
        if indices is None:
            return lam.copy()
        return lam[list(indices)]


@dataclass(frozen=True, eq=False)
class Distribution:
    """Homogeneous weights on a subset ``support`` of a spectrum.

    All weights share one strict sign.  Equality compares the normalized
    representatives (positive, summing to one) to a tight relative tolerance.
    """

    spectrum: Spectrum
    support: tuple[int, ...]
    weights: np.ndarray

    def __post_init__(self):
        support = tuple(int(i) for i in self.support)
        w = np.array(self.weights, dtype=float).ravel()
        if not support:
            raise ValueError("a distribution needs a nonempty support")
        if len(w) != len(support):
            raise ValueError(f"{len(support)} support indices but {len(w)} weights")
        if len(set(support)) != len(support):
            raise ValueError("support indices must be distinct")
        if min(support) < 0 or max(support) >= self.spectrum.d:
            raise ValueError("support index outside the spectrum")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        if not (np.all(w > 0) or np.all(w < 0)):
            raise ValueError("weights must be nonzero and share one sign")
        order = np.argsort(support, kind="stable")
        object.__setattr__(self, "support", tuple(support[k] for k in order))
        object.__setattr__(self, "weights", _readonly(w[order]))

    @classmethod
    def full(cls, spectrum: Spectrum, weights: Sequence[float]) -> "Distribution":
        return cls(spectrum, tuple(range(spectrum.d)), weights)

    @classmethod
    def from_points(cls, points: Sequence[float], weights: Sequence[float]) -> "Distribution":
        """Distribution with atoms at ``points`` (any order) and the given weights."""
        pts = np.asarray(points, dtype=float)
        order = np.argsort(pts)
        return cls.full(Spectrum(tuple(pts[order])), np.asarray(weights, dtype=float)[order])

    def __len__(self) -> int:
        return len(self.support)

    @property
    def points(self) -> np.ndarray:
        return self.spectrum.points(self.support)

    @property
    def normalized_weights(self) -> np.ndarray:
        return self.weights / self.weights.sum()

    def normalized(self) -> "Distribution":
        return Distribution(self.spectrum, self.support, self.normalized_weights)

    def scaled(self, c: float) -> "Distribution":
        return Distribution(self.spectrum, self.support, c * self.weights)

    def weight_map(self) -> dict[int, float]:
        return dict(zip(self.support, self.normalized_weights.tolist()))

    def restrict(self, subset: Iterable[int]) -> "Distribution":
        keep = sorted(set(subset))
        if not set(keep) <= set(self.support):
            raise ValueError("restriction set must lie in the support")
        pos = {n: k for k, n in enumerate(self.support)}
        return Distribution(self.spectrum, tuple(keep), self.weights[[pos[n] for n in keep]])

    def compress(self) -> "Distribution":
        """The same measure on the spectrum made of its own support points."""
        return Distribution.full(Spectrum(tuple(self.points)), self.weights)

    def isclose(self, other: "Distribution", tol: float = 1e-12) -> bool:
        if self.support != other.support:
            return False
        if not np.allclose(self.spectrum.points(self.support), other.points, rtol=tol, atol=tol):
            return False
        return bool(np.max(np.abs(self.normalized_weights - other.normalized_weights)) <= tol)

    def __eq__(self, other):
        if not isinstance(other, Distribution):
            return NotImplemented
        return self.isclose(other, 1e-12)

    __hash__ = None

    def __repr__(self) -> str:
        pairs = ", ".join(f"{x:g}:{w:.6g}" for x, w in zip(self.points, self.normalized_weights))
        return f"Distribution({pairs})"


@dataclass(frozen=True, eq=False)
class DistributionSequence:
    """A direct sum of distributions whose supports partition the spectrum."""

    parts: tuple[Distribution, ...]

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise ValueError("a sequence needs at least one part")
        spectrum = parts[0].spectrum
        if any(p.spectrum != spectrum for p in parts):
            raise ValueError("all parts must share one spectrum")
        OrderedPartition(tuple(frozenset(p.support) for p in parts))
        if sum(len(p) for p in parts) != spectrum.d:
            raise ValueError("supports must cover the whole spectrum")
        object.__setattr__(self, "parts", parts)

    @property
    def spectrum(self) -> Spectrum:
        return self.parts[0].spectrum

    @property
    def partition(self) -> OrderedPartition:
        return OrderedPartition(tuple(frozenset(p.support) for p in self.parts))

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def isclose(self, other: "DistributionSequence", tol: float = 1e-12) -> bool:
        return len(self) == len(other) and all(
            a.isclose(b, tol) for a, b in zip(self.parts, other.parts)
        )

    def __eq__(self, other):
        if not isinstance(other, DistributionSequence):
            return NotImplemented
        return self.isclose(other, 1e-12)

    __hash__ = None

    def __repr__(self) -> str:
        return " (+) ".join(repr(p) for p in self.parts)


@dataclass(frozen=True)
class TridiagonalMatrix:
    """Symmetric tridiagonal matrix stored as ``(a_1, ..., a_{2d-1})``.

    Odd positions (1-based) are the diagonal, even positions the off-diagonal.
    """

    entries: tuple[float, ...]

    def __post_init__(self):
        e = tuple(float(x) for x in self.entries)
        if len(e) % 2 != 1:
            raise ValueError(f"entry count must be odd (2d-1), got {len(e)}")
        object.__setattr__(self, "entries", e)

    @classmethod
    def from_diagonals(cls, diag: Sequence[float], offdiag: Sequence[float]) -> "TridiagonalMatrix":
        diag, offdiag = list(diag), list(offdiag)
        if len(offdiag) != len(diag) - 1:
            raise ValueError("need exactly one fewer off-diagonal than diagonal entries")
        entries = [0.0] * (2 * len(diag) - 1)
        entries[0::2] = diag
        entries[1::2] = offdiag
        return cls(tuple(entries))

    @classmethod
    def from_dense(cls, m) -> "TridiagonalMatrix":
        m = np.asarray(m, dtype=float)
        return cls.from_diagonals(np.diag(m), np.diag(m, 1))

    @classmethod
    def direct_sum(cls, *blocks: "TridiagonalMatrix") -> "TridiagonalMatrix":
        entries: list[float] = []
        for b in blocks:
            if entries:
                entries.append(0.0)
            entries.extend(b.entries)
        return cls(tuple(entries))

    @property
    def dim(self) -> int:
        return (len(self.entries) + 1) // 2

    @property
    def diag(self) -> np.ndarray:
        return np.asarray(self.entries[0::2])

    @property
    def offdiag(self) -> np.ndarray:
        return np.asarray(self.entries[1::2])

    def entry(self, n: int) -> float:
        """The entry ``a_n`` with the 1-based labelling."""
        if not 1 <= n <= len(self.entries):
            raise IndexError(n)
        return self.entries[n - 1]

    @property
    def is_jacobi(self) -> bool:
        return bool(np.all(self.offdiag > 0))

    @property
    def in_closure(self) -> bool:
        """Member of the closure of the Jacobi matrices (nonnegative off-diagonal)."""
        return bool(np.all(self.offdiag >= 0))

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def norm_inf(self) -> float:
        return float(np.max(np.abs(self.to_dense()).sum(axis=1)))

    def eigenvalues(self) -> np.ndarray:
        return tridiagonal_eigenvalues(self.diag, self.offdiag)

    def distance(self, other: "TridiagonalMatrix") -> float:
        """Max-entry distance between two matrices of the same size."""
        if self.dim != other.dim:
            raise ValueError("matrices differ in size")
        return float(np.max(np.abs(np.subtract(self.entries, other.entries))))


@dataclass(frozen=True)
class PolynomialSequence:
    """Monic polynomials ``p_0..p_m`` tabulated at the support points of a distribution.

    ``values[n, k]`` is ``p_n(x_k)``.  The recurrence coefficients are kept so
    that the polynomials can be evaluated elsewhere or expanded on demand.
    """

    points: np.ndarray
    values: np.ndarray
    alphas: np.ndarray
    betas: np.ndarray = field(repr=False)  # squared off-diagonals

    @property
    def degree(self) -> int:
        return len(self.alphas)

    def evaluate(self, n: int, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        p_prev, p = np.zeros_like(x), np.ones_like(x)
        for k in range(n):
            b = self.betas[k - 1] if k > 0 else 0.0
            p_prev, p = p, (x - self.alphas[k]) * p - b * p_prev
        return p

    def coefficients(self) -> list[np.ndarray]:
        """Coefficient vectors in increasing powers (``numpy.polynomial`` order)."""
        from numpy.polynomial import polynomial as P

        out = [np.array([1.0])]
        prev = np.array([0.0])
        for k in range(self.degree):
            b = self.betas[k - 1] if k > 0 else 0.0
            nxt = P.polysub(P.polymul([-self.alphas[k], 1.0], out[-1]), b * prev)
            prev = out[-1]
            out.append(nxt)
        return out


def _working_precision(x: np.ndarray, w: np.ndarray) -> int:
    """Decimal digits needed so the recurrence keeps ~17 significant digits.

    Cancellation grows with the dynamic range of the weights and with how
    tightly the points cluster relative to their spread.
    """
    digits = 40 + math.ceil(math.log10(w.max() / w.min()))
    if len(x) > 1:
        gap = float(np.min(np.diff(x)))
        spread = float(x[-1] - x[0])
        digits += math.ceil(2 * len(x) * max(0.0, math.log10(spread / gap)))
    return min(digits, 2000)


def _stieltjes(x: np.ndarray, w: np.ndarray):
    """Stieltjes recurrence on the discrete measure ``sum w_k delta(x_k)``.

    Runs in ``decimal`` arithmetic: floats convert exactly, and the extra
    digits absorb the cancellation that graded weights (as on a moment curve
    near ``t = 0``) cause in double precision.
    """
    m = len(x)
    if np.any(w <= 0) or not np.all(np.isfinite(w)):
        raise NumericalError("weights must be positive and finite")
    ctx = decimal.Context(prec=_working_precision(x, w))
    X = [decimal.Decimal(float(v)) for v in x]
    W = [decimal.Decimal(float(v)) for v in w]
    add, mul, div = ctx.add, ctx.multiply, ctx.divide

    def dot(*cols):
        total = decimal.Decimal(0)
        for vals in zip(*cols):
            term = vals[0]
            for v in vals[1:]:
                term = mul(term, v)
            total = add(total, term)
        return total

    alphas, betas = [], []
    prev = [decimal.Decimal(0)] * m
    cur = [decimal.Decimal(1)] * m
    rows = [cur]
    norm = dot(W, cur, cur)
    for n in range(m):
        alpha = div(dot(W, X, cur, cur), norm)
        alphas.append(alpha)
        beta = div(norm, betas_norm) if n > 0 else None
        if beta is not None:
            betas.append(beta)
        nxt = [
            ctx.subtract(mul(ctx.subtract(xk, alpha), pk), mul(beta, qk) if beta is not None else 0)
            for xk, pk, qk in zip(X, cur, prev)
        ]
        prev, cur = cur, nxt
        rows.append(cur)
        betas_norm = norm
        if n + 1 < m:
            norm = dot(W, cur, cur)
            if norm <= 0:
                raise NumericalError("recurrence broke down: nonpositive norm")
    alphas_f = np.array([float(a) for a in alphas])
    betas_f = np.array([float(b) for b in betas])
    table = np.array([[float(v) for v in row] for row in rows])
    if not (np.all(np.isfinite(alphas_f)) and np.all(np.isfinite(betas_f)) and np.all(betas_f > 0)):
        raise NumericalError("recurrence broke down; weights may have underflowed")
    return alphas_f, betas_f, table


def reconstruct(dist: Distribution) -> TridiagonalMatrix:
    """The Jacobi matrix whose spectral distribution is ``dist``."""
    x, w = dist.points, dist.normalized_weights
    alphas, betas, _ = _stieltjes(x, w)
    return TridiagonalMatrix.from_diagonals(alphas, np.sqrt(betas))


def mop(dist: Distribution) -> PolynomialSequence:
    """Monic orthogonal polynomials ``p_0..p_d`` of ``dist``; ``p_d`` vanishes on the support."""
    x, w = dist.points, dist.normalized_weights
    alphas, betas, table = _stieltjes(x, w)
    return PolynomialSequence(_readonly(x), _readonly(table), _readonly(alphas), _readonly(betas))


def inner_product(dist: Distribution, p_values, q_values) -> float:
    """``<p, q>`` for polynomials given by their values at the support points."""
    return float(np.sum(dist.normalized_weights * np.asarray(p_values) * np.asarray(q_values)))


# -- eigenvalues ------------------------------------------------------------


def sturm_count(diag: np.ndarray, off2: np.ndarray, x: float, pivmin: float) -> int:
    """Number of eigenvalues strictly below ``x`` (off-diagonals given squared)."""
    count = 0
    q = diag[0] - x
    if abs(q) < pivmin:
        q = -pivmin
    if q < 0:
        count += 1
    for i in range(1, len(diag)):
        q = diag[i] - x - off2[i - 1] / q
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0:
            count += 1
    return count


def _char_and_derivative(diag, off2, x):
    """Characteristic polynomial and its derivative, by the three-term recurrence."""
    x = np.asarray(x, dtype=float)
    p_prev, p = np.zeros_like(x), np.ones_like(x)
    dp_prev, dp = np.zeros_like(x), np.zeros_like(x)
    for i in range(len(diag)):
        b = off2[i - 1] if i > 0 else 0.0
        p_new = (x - diag[i]) * p - b * p_prev
        dp_new = p + (x - diag[i]) * dp - b * dp_prev
        p_prev, p = p, p_new
        dp_prev, dp = dp, dp_new
    return p, dp


def tridiagonal_eigenvalues(diag, offdiag, tol: float = EIG_TOL) -> np.ndarray:
    """Eigenvalues of a symmetric tridiagonal matrix, ascending.

    Each eigenvalue is isolated by bisection on the Sturm count and then
    polished with at most a few Newton steps on the characteristic
    polynomial that are only accepted while they stay inside the bracket.
    """
    diag = np.asarray(diag, dtype=float)
    off2 = np.asarray(offdiag, dtype=float) ** 2
    d = len(diag)
    if d == 1:
        return diag.copy()
    radius = np.zeros(d)
    radius[:-1] += np.sqrt(off2)
    radius[1:] += np.sqrt(off2)
    lo0 = float(np.min(diag - radius))
    hi0 = float(np.max(diag + radius))
    span = max(hi0 - lo0, abs(lo0), abs(hi0), np.finfo(float).tiny)
    lo0 -= 2 * np.finfo(float).eps * span
    hi0 += 2 * np.finfo(float).eps * span
    pivmin = np.finfo(float).tiny * max(1.0, float(np.max(off2)))
    stop = tol * span
    out = np.empty(d)
    for k in range(d):
        lo, hi = lo0, hi0
        while hi - lo > stop:
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if sturm_count(diag, off2, mid, pivmin) >= k + 1:
                hi = mid
            else:
                lo = mid
        x = 0.5 * (lo + hi)
        for _ in range(3):
            p, dp = _char_and_derivative(diag, off2, x)
            if dp == 0 or not np.isfinite(p / dp):
                break
            x_new = float(x - p / dp)
            if not lo <= x_new <= hi or x_new == x:
                break
            x = x_new
        out[k] = x
    return out


def _first_component_squared(diag: np.ndarray, off: np.ndarray, lam: float) -> float:
    """Squared first component of the unit eigenvector for eigenvalue ``lam``.

    Pivots of ``J - lam I`` are run from the top and from the bottom; the
    eigenvector is pinned to 1 at the twist index where the combined pivot is
    smallest and spread outwards by ratios.  Only products of ratios enter,
    so a small first component keeps its relative accuracy.
    """
    d = len(diag)
    shift = diag - lam
    tiny = np.finfo(float).tiny ** 0.5 * max(1.0, float(np.max(np.abs(off))))
    top = np.empty(d)
    bot = np.empty(d)
    top[0] = shift[0]
    for k in range(1, d):
        prev = top[k - 1] if top[k - 1] != 0 else tiny
        top[k] = shift[k] - off[k - 1] ** 2 / prev
    bot[d - 1] = shift[d - 1]
    for k in range(d - 2, -1, -1):
        nxt = bot[k + 1] if bot[k + 1] != 0 else tiny
        bot[k] = shift[k] - off[k] ** 2 / nxt
    gamma = top + bot - shift
    r = int(np.argmin(np.abs(gamma)))
    z = np.empty(d)
    z[r] = 1.0
    for k in range(r - 1, -1, -1):
        piv = top[k] if top[k] != 0 else tiny
        z[k] = -off[k] * z[k + 1] / piv
    for k in range(r + 1, d):
        piv = bot[k] if bot[k] != 0 else tiny
        z[k] = -off[k - 1] * z[k - 1] / piv
    scale = np.max(np.abs(z))
    z = z / scale
    return float(z[0] ** 2 / np.dot(z, z))


def spectral_distribution(J: TridiagonalMatrix) -> Distribution:
    """Normalized spectral distribution of a Jacobi matrix.

    Weights are the squared first components of the unit eigenvectors,
    computed one eigenvalue at a time by a twisted factorization.
    """
    if not J.is_jacobi:
        raise ValueError("off-diagonal entries must be strictly positive; split blocks first")
    diag, off = J.diag, J.offdiag
    lam = tridiagonal_eigenvalues(diag, off)
    if J.dim == 1:
        return Distribution.full(Spectrum(tuple(lam)), [1.0])
    w = np.array([_first_component_squared(diag, off, x) for x in lam])
    if not np.all(np.isfinite(w)) or np.any(w <= 0):
        raise NumericalError("non-positive spectral weight; eigenvalues too close to resolve")
    try:
        spectrum = Spectrum(tuple(lam))
    except ValueError as exc:
        raise NumericalError(f"eigenvalues not resolved as distinct: {exc}") from None
    return Distribution.full(spectrum, w / w.sum())


# -- direct sums and structural maps ----------------------------------------


def split_blocks(T: TridiagonalMatrix, tol: float = SPLIT_TOL) -> list[TridiagonalMatrix]:
    """Cut a matrix with nonnegative off-diagonal at its (numerically) zero couplings."""
    off = T.offdiag
    cutoff = tol * T.norm_inf()
    if np.any(off < -cutoff):
        raise ValueError("negative off-diagonal entry; matrix is not in the closure of Jacobi matrices")
    diag = T.diag
    blocks, start = [], 0
    for k, b in enumerate(off):
        if b <= cutoff:
            blocks.append(TridiagonalMatrix.from_diagonals(diag[start:k + 1], off[start:k]))
            start = k + 1
    blocks.append(TridiagonalMatrix.from_diagonals(diag[start:], off[start:]))
    return blocks


def direct_sum_reconstruct(seq: DistributionSequence) -> TridiagonalMatrix:
    """Block-diagonal matrix ``f(part_1) + ... + f(part_r)`` in part order."""
    return TridiagonalMatrix.direct_sum(*(reconstruct(p) for p in seq.parts))


def flip_matrix(T: TridiagonalMatrix) -> TridiagonalMatrix:
    """Transpose across the anti-diagonal: the entry sequence reversed."""
    return TridiagonalMatrix(tuple(reversed(T.entries)))


def squared_derivative_constants(spectrum: Spectrum) -> np.ndarray:
    """``prod_{k != n} (lambda_n - lambda_k)^2`` for each n, i.e. ``p'(lambda_n)^2``."""
    lam = spectrum.points()
    diff = lam[:, None] - lam[None, :]
    np.fill_diagonal(diff, 1.0)
    return np.prod(diff ** 2, axis=1)


def flip_weights(dist: Distribution) -> Distribution:
    """Weights of the flipped matrix: ``w^F_n = 1 / (p'(lambda_n)^2 w_n)`` up to scale."""
    if len(dist.support) != dist.spectrum.d:
        raise ValueError("flip_weights needs full support; use Distribution.compress first")
    w = dist.normalized_weights
    wf = 1.0 / (squared_derivative_constants(dist.spectrum) * w)
    return Distribution.full(dist.spectrum, wf / wf.sum())


def sign_conjugate(T: TridiagonalMatrix, eps: Sequence[int]) -> TridiagonalMatrix:
    """``diag(eps) T diag(eps)`` for a sign vector ``eps``."""
    eps = np.asarray(eps)
    if len(eps) != T.dim:
        raise ValueError(f"sign vector has length {len(eps)}, matrix has dimension {T.dim}")
    if not np.all(np.isin(eps, (-1, 1))):
        raise ValueError("sign entries must be +1 or -1")
    return TridiagonalMatrix.from_diagonals(T.diag, T.offdiag * eps[:-1] * eps[1:])
