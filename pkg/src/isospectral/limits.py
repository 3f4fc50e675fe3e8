"""Moment curves and the limits of degenerating distributions.

A moment curve ``a_1 + t a_2 + ... + t^(r-1) a_r`` has full support for
``0 < t < 1``.  As ``t -> 0`` its Jacobi matrix splits into blocks, and the
limit sequence has a closed form: each later part is reweighted by the
squared monic polynomial vanishing on all earlier supports.
``numeric_limit_report`` checks that closed form against brute-force
reconstruction along a grid of ``t``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .partitions import OrderedPartition
from .spectral import (
    Distribution,
    DistributionSequence,
    NumericalError,
    Spectrum,
    TridiagonalMatrix,
    direct_sum_reconstruct,
    reconstruct,
    squared_derivative_constants,
)

DEFAULT_T_GRID: tuple[float, ...] = tuple(10.0 ** -k for k in range(2, 11))


class UnstableSequenceError(ValueError):
    """Sampled weights do not follow a power law closely enough to classify."""


def _prefix_constants(lam: np.ndarray, earlier: Sequence[int], idx: Sequence[int]) -> np.ndarray:
    """``prod_{m in earlier} (lambda_n - lambda_m)^2`` for each n in ``idx``."""
    if not earlier:
        return np.ones(len(idx))
    return np.prod((lam[list(idx)][:, None] - lam[list(earlier)][None, :]) ** 2, axis=1)


@dataclass(frozen=True, eq=False)
class MomentCurve:
    """Parts ``a_1, ..., a_r`` with supports forming an ordered partition of the spectrum."""

    parts: tuple[Distribution, ...]

    def __post_init__(self):
        seq = DistributionSequence(tuple(self.parts))  # validates supports
        if any(np.any(p.weights <= 0) for p in seq.parts):
            raise ValueError("moment curve parts need positive weights")
        object.__setattr__(self, "parts", seq.parts)

    @classmethod
    def from_sequence(cls, seq: DistributionSequence) -> "MomentCurve":
        return cls(seq.parts)

    @property
    def spectrum(self) -> Spectrum:
        return self.parts[0].spectrum

    @property
    def partition(self) -> OrderedPartition:
        return OrderedPartition(tuple(frozenset(p.support) for p in self.parts))

    @property
    def r(self) -> int:
        return len(self.parts)

    def __call__(self, t: float) -> Distribution:
        return moment_curve_eval(self, t)

    def exponent_weights(self) -> "ExponentWeights":
        d = self.spectrum.d
        c, e = np.empty(d), np.empty(d)
        for k, part in enumerate(self.parts):
            c[list(part.support)] = part.weights
            e[list(part.support)] = k
        return ExponentWeights(c, e)


def moment_curve_eval(curve: MomentCurve, t: float) -> Distribution:
    """``a_1 + t a_2 + ... + t^(r-1) a_r`` with the parts' weights as given.

    The result is rescaled to sup-norm one, which homogeneity allows and which
    keeps ``t^(r-1)`` from underflowing.
    """
    if not 0 < t < 1:
        raise ValueError(f"t must lie in (0, 1), got {t}")
    d = curve.spectrum.d
    logw = np.empty(d)
    for k, part in enumerate(curve.parts):
        logw[list(part.support)] = np.log(part.weights) + k * math.log(t)
    w = np.exp(logw - logw.max())
    if np.any(w == 0):
        raise NumericalError(f"weights underflow at t={t}")
    return Distribution.full(curve.spectrum, w)


@dataclass(frozen=True, eq=False)
class ExponentWeights:
    """Weights ``c_i t^(e_i)`` with ``c_i > 0``; a model for stable sequences as ``t -> 0``."""

    coeffs: np.ndarray
    exponents: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float).ravel()
        e = np.array(self.exponents, dtype=float).ravel()
        if len(c) != len(e) or not len(c):
            raise ValueError("coefficients and exponents must have the same nonzero length")
        if np.any(c <= 0) or not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be positive and finite")
        if not np.all(np.isfinite(e)):
            raise ValueError("exponents must be finite")
        c.setflags(write=False)
        e.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "exponents", e)

    def weights(self, t: float) -> np.ndarray:
        return self.coeffs * t ** self.exponents

    def flipped(self, spectrum: Spectrum) -> "ExponentWeights":
        """Data of the flipped weights ``1 / (p'(lambda_n)^2 w_n)``: exponents negate."""
        consts = squared_derivative_constants(spectrum)
        e = -self.exponents
        return ExponentWeights(1.0 / (consts * self.coeffs), e - e.min())


def classify_stable(ew: ExponentWeights, tol: float = 1e-12) -> OrderedPartition:
    """Limiting partition as ``t -> 0``: group equal exponents, smallest exponent first."""
    order = np.argsort(ew.exponents, kind="stable")
    blocks: list[list[int]] = []
    last = None
    for n in order:
        e = ew.exponents[n]
        if last is None or abs(e - last) > tol:
            blocks.append([])
            last = e
        blocks[-1].append(int(n))
    return OrderedPartition(tuple(frozenset(b) for b in blocks))


def fit_exponents(
    ts: Sequence[float],
    samples,
    *,
    r2_min: float = 0.999,
    group_tol: float = 0.05,
) -> ExponentWeights:
    """Fit ``w_i(t) ~ c_i t^(e_i)`` to sampled weight vectors by log-log regression.

    ``samples[k]`` is the (homogeneous, positive) weight vector at ``ts[k]``.
    Each ratio against the dominant index must have R^2 >= ``r2_min`` unless it
    is constant; otherwise :class:`UnstableSequenceError` is raised.  Fitted
    exponents closer than ``group_tol`` are snapped to their common mean.
    """
    ts = np.asarray(ts, dtype=float)
    W = np.asarray(samples, dtype=float)
    if W.ndim != 2 or W.shape[0] != len(ts) or len(ts) < 3:
        raise ValueError("need at least three samples, one weight vector per t")
    if np.any(W <= 0) or np.any(ts <= 0):
        raise ValueError("weights and t values must be positive")
    logt = np.log(ts)
    logw = np.log(W)
    ref = int(np.argmax(logw[-1]))
    rel = logw - logw[:, [ref]]
    slopes = np.empty(W.shape[1])
    intercepts = np.empty(W.shape[1])
    for i in range(W.shape[1]):
        y = rel[:, i]
        slope, intercept = np.polyfit(logt, y, 1)
        resid = y - (slope * logt + intercept)
        ss_tot = float(np.sum((y - y.mean()) ** 2))
        ss_res = float(np.sum(resid ** 2))
        if ss_tot > 1e-20 * max(1.0, float(np.sum(y ** 2))):
            r2 = 1.0 - ss_res / ss_tot
            if r2 < r2_min:
                raise UnstableSequenceError(
                    f"index {i + 1}: log-log fit has R^2 = {r2:.6f} < {r2_min}"
                )
        slopes[i], intercepts[i] = slope, intercept
    slopes -= slopes.min()
    order = np.argsort(slopes)
    snapped = slopes.copy()
    group = [order[0]]
    for a, b in zip(order, order[1:]):
        if slopes[b] - slopes[a] <= group_tol:
            group.append(b)
        else:
            snapped[group] = slopes[group].mean()
            group = [b]
    snapped[group] = slopes[group].mean()
    return ExponentWeights(np.exp(intercepts), snapped)


def limit_of_moment_curve(curve: MomentCurve) -> DistributionSequence:
    """Closed-form limit: part k reweighted by ``prod_{m earlier} (lambda - lambda_m)^2``."""
    lam = curve.spectrum.points()
    parts, earlier = [], []
    for part in curve.parts:
        w = part.normalized_weights * _prefix_constants(lam, earlier, part.support)
        parts.append(Distribution(curve.spectrum, part.support, w / w.sum()))
        earlier.extend(part.support)
    return DistributionSequence(tuple(parts))


def approach_curve(seq: DistributionSequence) -> MomentCurve:
    """A moment curve whose limit is ``seq`` (later parts divided by the same squared polynomials)."""
    lam = seq.spectrum.points()
    parts, earlier = [], []
    for part in seq.parts:
        w = part.normalized_weights / _prefix_constants(lam, earlier, part.support)
        parts.append(Distribution(seq.spectrum, part.support, w / w.sum()))
        earlier.extend(part.support)
    return MomentCurve(tuple(parts))


def face_approach(target: DistributionSequence, coarse: OrderedPartition, t: float) -> DistributionSequence:
    """A point on the open face of ``coarse`` that tends to ``target`` as ``t -> 0``.

    ``target``'s partition must refine ``coarse``.  Within each block of
    ``coarse`` the relevant parts of ``target`` are approached by a moment
    curve on that block's own sub-spectrum.
    """
    if not target.partition.refines(coarse):
        raise ValueError(f"{target.partition} does not refine {coarse}")
    spectrum = target.spectrum
    lam = spectrum.points()
    out = []
    k = 0
    for block in coarse.blocks:
        idx = sorted(block)
        local = {n: j for j, n in enumerate(idx)}
        sub = Spectrum(tuple(lam[idx]))
        sub_parts = []
        covered: set[int] = set()
        while covered != set(block):
            part = target.parts[k]
            covered |= set(part.support)
            sub_parts.append(Distribution(sub, tuple(local[n] for n in part.support), part.weights))
            k += 1
        dist = approach_curve(DistributionSequence(tuple(sub_parts)))(t) if len(sub_parts) > 1 \
            else sub_parts[0]
        out.append(Distribution(spectrum, tuple(idx), dist.weights))
    return DistributionSequence(tuple(out))


@dataclass(frozen=True)
class ReportRow:
    t: float
    error: float
    first_coupling: float | None
    last_coupling: float | None


@dataclass(frozen=True)
class LimitReport:
    """Distance from ``f(curve(t))`` to the predicted limit matrix along a grid."""

    partition: OrderedPartition
    limit: DistributionSequence = field(repr=False)
    limit_matrix: TridiagonalMatrix
    first_index: int | None
    last_index: int | None
    rows: tuple[ReportRow, ...]

    @property
    def errors(self) -> np.ndarray:
        return np.array([row.error for row in self.rows])

    def error_decreasing(self) -> bool:
        e = self.errors
        return bool(np.all(np.diff(e) < 0))

    def coupling_decreasing(self) -> bool:
        if self.first_index is None:
            return True
        a = np.array([row.first_coupling for row in self.rows])
        b = np.array([row.last_coupling for row in self.rows])
        return bool(np.all(np.diff(a) < 0) and np.all(np.diff(b) < 0))

    def plot_data(self) -> list[tuple[float, float]]:
        """``(log10 t, log10 E)`` pairs; rows with ``E == 0`` are skipped."""
        return [(math.log10(r.t), math.log10(r.error)) for r in self.rows if r.error > 0]

    def to_dict(self) -> dict:
        return {
            "partition": self.partition.to_labels(),
            "tracked_entries": [self.first_index, self.last_index],
            "limit_matrix": {
                "diag": self.limit_matrix.diag.tolist(),
                "offdiag": self.limit_matrix.offdiag.tolist(),
            },
            "rows": [
                {"t": r.t, "error": r.error, "first_coupling": r.first_coupling,
                 "last_coupling": r.last_coupling}
                for r in self.rows
            ],
        }

    def to_table(self) -> str:
        a = f"f_{self.first_index}" if self.first_index else "-"
        b = f"f_{self.last_index}" if self.last_index else "-"
        lines = [f"{'t':>10}  {'E(t)':>12}  {a:>12}  {b:>12}"]
        for r in self.rows:
            fa = f"{r.first_coupling:12.4e}" if r.first_coupling is not None else f"{'-':>12}"
            fb = f"{r.last_coupling:12.4e}" if r.last_coupling is not None else f"{'-':>12}"
            lines.append(f"{r.t:10.1e}  {r.error:12.4e}  {fa}  {fb}")
        return "\n".join(lines)


def numeric_limit_report(
    curve: MomentCurve, t_grid: Sequence[float] = DEFAULT_T_GRID
) -> LimitReport:
    """Evaluate ``E(t) = max|f(curve(t)) - f(limit)|`` and the two decoupling entries.

    The tracked entries are the off-diagonals ``a_{2|S_1|}`` and
    ``a_{2d - 2|S_r|}`` that separate the first and last blocks; both tend to
    zero.  They are ``None`` when the curve has a single part.
    """
    ts = [float(t) for t in t_grid]
    if any(not 0 < t < 1 for t in ts) or any(b >= a for a, b in zip(ts, ts[1:])):
        raise ValueError("t grid must be strictly decreasing inside (0, 1)")
    limit = limit_of_moment_curve(curve)
    target = direct_sum_reconstruct(limit)
    d = curve.spectrum.d
    P = curve.partition
    if P.r >= 2:
        first, last = 2 * len(P.blocks[0]), 2 * d - 2 * len(P.blocks[-1])
    else:
        first = last = None
    rows = []
    for t in ts:
        J = reconstruct(moment_curve_eval(curve, t))
        rows.append(
            ReportRow(
                t,
                J.distance(target),
                J.entry(first) if first else None,
                J.entry(last) if last else None,
            )
        )
    return LimitReport(P, limit, target, first, last, tuple(rows))
