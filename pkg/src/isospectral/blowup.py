"""The blow-up of the weight simplex: one homogeneous block per nonempty subset.

A point carries, for each nonempty ``S`` of ``{0..d-1}``, a block ``w^S``
indexed by ``S``.  ``rho`` embeds a sequence of distributions, ``pi`` reads
it back off the chain of maximal nonzero supports.  Face membership is read
from which coordinates vanish.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from .partitions import (
    Chain,
    OrderedPartition,
    chain_partition,
    enumerate_ordered_partitions,
    is_refinement,
    subsets_in_order,
)
from .spectral import Distribution, DistributionSequence, Spectrum

__all__ = [
    "BlowupInconsistencyError",
    "BlowupPoint",
    "Chain",
    "MembershipReport",
    "OrderedPartition",
    "PhiChain",
    "ambient_dimension",
    "barycentre",
    "c_constant",
    "chain_partition",
    "enumerate_ordered_partitions",
    "face_of",
    "is_member",
    "is_refinement",
    "normalize_affine",
    "phi_chain",
    "pi",
    "rho",
    "vanishing_set",
]

#: Entries below this fraction of their block's largest entry count as zero.
ZERO_TOL = 1e-9
#: Above this size the cross-equation check samples instead of enumerating.
EXHAUSTIVE_MAX_D = 8


class BlowupInconsistencyError(ValueError):
    """Maximal nonzero supports are not nested; the point is not in the blow-up."""


def c_constant(spectrum: Spectrum, S: Iterable[int], i: int) -> float:
    """``prod_{n in S} (lambda_n - lambda_i)^2``; equal to 1 for empty ``S``."""
    S = frozenset(S)
    if i in S:
        raise ValueError(f"index {i} must not belong to the set")
    lam = spectrum.lambdas
    out = 1.0
    for n in sorted(S):
        out *= (lam[n] - lam[i]) ** 2
    return out


def _c_vector(lam: np.ndarray, S: frozenset[int], idx: list[int]) -> np.ndarray:
    if not S:
        return np.ones(len(idx))
    others = lam[sorted(S)]
    return np.prod((others[None, :] - lam[idx][:, None]) ** 2, axis=1)


def ambient_dimension(d: int) -> int:
    """Projective dimension of the product of all ``W^S``."""
    return (d - 2) * 2 ** (d - 1) + 1


@dataclass(frozen=True, eq=False)
class BlowupPoint:
    """Homogeneous coordinate blocks ``w^S`` for every nonempty ``S``.

    ``blocks[S]`` holds the entries in increasing index order.  Iteration
    follows the deterministic subset order (cardinality, then lexicographic).
    """

    spectrum: Spectrum
    blocks: Mapping[frozenset[int], np.ndarray]

    def __post_init__(self):
        d = self.spectrum.d
        keys = subsets_in_order(range(d))
        given = {frozenset(k): v for k, v in self.blocks.items()}
        if set(given) != set(keys):
            raise ValueError("a blow-up point needs exactly one block per nonempty subset")
        blocks = {}
        for S in keys:
            v = np.array(given[S], dtype=float).ravel()
            if len(v) != len(S):
                raise ValueError(f"block {sorted(S)} has {len(v)} entries")
            if not np.all(np.isfinite(v)):
                raise ValueError("coordinates must be finite")
            if not np.any(v != 0):
                raise ValueError(f"block {sorted(S)} is identically zero")
            v.setflags(write=False)
            blocks[S] = v
        object.__setattr__(self, "blocks", blocks)

    @property
    def d(self) -> int:
        return self.spectrum.d

    def value(self, S: Iterable[int], n: int) -> float:
        S = frozenset(S)
        return float(self.blocks[S][sorted(S).index(n)])

    def n_coordinates(self) -> int:
        return sum(len(v) for v in self.blocks.values())

    def items(self):
        return self.blocks.items()

    def isclose(self, other: "BlowupPoint", tol: float = 1e-12) -> bool:
        a, b = normalize_affine(self), normalize_affine(other)
        return all(np.max(np.abs(a.blocks[S] - b.blocks[S])) <= tol for S in a.blocks)

    def distance(self, other: "BlowupPoint") -> float:
        """Max coordinate gap between the affine representatives."""
        a, b = normalize_affine(self), normalize_affine(other)
        return max(float(np.max(np.abs(a.blocks[S] - b.blocks[S]))) for S in a.blocks)


def rho(seq: DistributionSequence) -> BlowupPoint:
    """Embed a sequence of distributions into the blow-up.

    For each ``S``, with ``K_i`` the smallest chain member containing ``S``,
    the block is ``C_n^{K_i - S} w_n`` on ``S`` intersected with the i-th
    support and zero elsewhere.
    """
    spectrum = seq.spectrum
    lam = spectrum.points()
    d = spectrum.d
    chain = seq.partition.chain()
    part_of = np.empty(d, dtype=int)
    weight = np.empty(d)
    for k, part in enumerate(seq.parts):
        part_of[list(part.support)] = k
        weight[list(part.support)] = part.normalized_weights
    blocks = {}
    for S in subsets_in_order(range(d)):
        i = chain.smallest_containing(S)
        idx = sorted(S)
        vals = _c_vector(lam, chain.sets[i] - S, idx) * weight[idx]
        vals[part_of[idx] != i] = 0.0
        blocks[S] = vals
    return BlowupPoint(spectrum, blocks)


@dataclass(frozen=True)
class MembershipReport:
    ok: bool
    message: str
    worst_residual: float
    instances_checked: int

    def __bool__(self) -> bool:
        return self.ok


def _submask_pairs(d: int):
    full = (1 << d) - 1
    for s in range(1, full + 1):
        r = (s - 1) & s
        while r:
            if r & (r - 1):  # at least two elements
                yield r, s
            r = (r - 1) & s


def _mask_to_set(m: int) -> frozenset[int]:
    return frozenset(i for i in range(m.bit_length()) if m >> i & 1)


def is_member(
    pt: BlowupPoint,
    tol: float = 1e-12,
    *,
    max_exhaustive_d: int = EXHAUSTIVE_MAX_D,
    samples: int = 20000,
    seed: int = 0,
) -> MembershipReport:
    """Check the sign conditions exactly and the cross equations to ``tol``.

    The cross equations ``C_i^{S-R} w_j^R w_i^S = C_j^{S-R} w_i^R w_j^S``
    are compared after scaling every block to sup-norm one.  An instance
    fails when the two sides differ by more than ``tol`` times the larger
    side, unless both sides are below ``tol`` times the larger of the two
    constants (both effectively zero).  For ``d > max_exhaustive_d`` a
    seeded random sample of ``(R, S)`` pairs is checked.
    """
    d = pt.d
    for S, v in pt.blocks.items():
        if np.any(v > 0) and np.any(v < 0):
            return MembershipReport(False, f"block {_label(S)} has mixed signs", np.inf, 0)
    lam = pt.spectrum.points()
    unit = {}
    for S, v in pt.blocks.items():
        unit[S] = v / v[np.argmax(np.abs(v))]
    if d <= max_exhaustive_d:
        pairs = _submask_pairs(d)
    else:
        rng = random.Random(seed)
        pairs = []
        while len(pairs) < samples:
            s = rng.randrange(1, 1 << d)
            if bin(s).count("1") < 2:
                continue
            r = rng.randrange(1, 1 << d) & s
            if bin(r).count("1") >= 2:
                pairs.append((r, s))
    worst, checked = 0.0, 0
    for rm, sm in pairs:
        R, S = _mask_to_set(rm), _mask_to_set(sm)
        idx = sorted(R)
        pos_s = [sorted(S).index(n) for n in idx]
        c = _c_vector(lam, S - R, idx)
        a = c * unit[S][pos_s]
        b = unit[R]
        lhs = np.outer(a, b)
        rhs = lhs.T
        big = np.maximum(np.abs(lhs), np.abs(rhs))
        floor = tol * np.maximum.outer(c, c)
        diff = np.abs(lhs - rhs)
        bad = (diff > tol * big) & (big > floor)
        rel = np.where(big > floor, diff / np.where(big > 0, big, 1.0), 0.0)
        worst = max(worst, float(rel.max()))
        checked += len(idx) * (len(idx) - 1)
        if bad.any():
            i, j = np.argwhere(bad)[0]
            msg = (
                f"cross equation fails for R={_label(R)}, S={_label(S)}, "
                f"i={idx[i] + 1}, j={idx[j] + 1}: residual {rel[i, j]:.3g}"
            )
            return MembershipReport(False, msg, worst, checked)
    return MembershipReport(True, "ok", worst, checked)


def _label(S: Iterable[int]) -> str:
    return "{" + ",".join(str(i + 1) for i in sorted(S)) + "}"


class PhiChain(NamedTuple):
    phi: dict[int, frozenset[int]]
    chain: Chain
    partition: OrderedPartition


def phi_chain(pt: BlowupPoint, zero_tol: float = ZERO_TOL) -> PhiChain:
    """For each index, the largest subset whose block is nonzero there; the chain they form."""
    d = pt.d
    best: dict[int, list[frozenset[int]]] = {n: [] for n in range(d)}
    for S, v in pt.blocks.items():
        scale = np.max(np.abs(v))
        for n, x in zip(sorted(S), v):
            if abs(x) >= zero_tol * scale:
                cur = best[n]
                if not cur or len(S) > len(cur[0]):
                    best[n] = [S]
                elif len(S) == len(cur[0]):
                    cur.append(S)
    phi = {}
    for n, cands in best.items():
        if len(cands) != 1:
            raise BlowupInconsistencyError(
                f"index {n + 1} has incomparable maximal supports {[_label(c) for c in cands]}"
            )
        phi[n] = cands[0]
    members = sorted(set(phi.values()), key=len, reverse=True)
    for big, small in zip(members, members[1:]):
        if not small < big:
            raise BlowupInconsistencyError(
                f"maximal supports {_label(big)} and {_label(small)} are not nested"
            )
    try:
        chain = Chain(tuple(members))
    except ValueError as exc:
        raise BlowupInconsistencyError(str(exc)) from None
    partition = chain.partition()
    for k, block in enumerate(partition.blocks):
        if frozenset(n for n, K in phi.items() if K == chain.sets[k]) != block:
            raise BlowupInconsistencyError("preimages of the chain do not match its partition")
    return PhiChain(phi, chain, partition)


def pi(pt: BlowupPoint, zero_tol: float = ZERO_TOL) -> DistributionSequence:
    """Read the sequence of distributions off a blow-up point."""
    _, chain, partition = phi_chain(pt, zero_tol)
    parts = []
    for K, S in zip(chain.sets, partition.blocks):
        vals = pt.blocks[K]
        pos = sorted(K)
        w = np.array([vals[pos.index(n)] for n in sorted(S)])
        if not (np.all(w > 0) or np.all(w < 0)):
            raise BlowupInconsistencyError(f"block {_label(K)} is not single-signed on {_label(S)}")
        parts.append(Distribution(pt.spectrum, tuple(sorted(S)), w / w.sum()))
    return DistributionSequence(tuple(parts))


def normalize_affine(pt: BlowupPoint) -> BlowupPoint:
    """Scale every block to nonnegative entries summing to one."""
    blocks = {}
    for S, v in pt.blocks.items():
        total = v.sum()
        if np.any(v > 0) and np.any(v < 0):
            raise ValueError(f"block {_label(S)} has mixed signs")
        blocks[S] = np.abs(v / total)
    return BlowupPoint(pt.spectrum, blocks)


def barycentre(P: OrderedPartition, spectrum: Spectrum) -> BlowupPoint:
    """Affine representative of the image of the all-ones weights on ``P``."""
    if P.d != spectrum.d:
        raise ValueError("partition and spectrum sizes differ")
    parts = tuple(
        Distribution(spectrum, tuple(sorted(b)), np.ones(len(b))) for b in P.blocks
    )
    return normalize_affine(rho(DistributionSequence(parts)))


def face_of(pt: BlowupPoint, zero_tol: float = ZERO_TOL) -> OrderedPartition:
    """The partition whose open face contains ``pt``."""
    return phi_chain(pt, zero_tol).partition


def vanishing_set(P: OrderedPartition) -> frozenset[tuple[int, frozenset[int]]]:
    """Coordinates ``(n, S)`` that vanish on the open face of ``P``."""
    chain = P.chain()
    out = set()
    for S in subsets_in_order(range(P.d)):
        i = chain.smallest_containing(S)
        out.update((n, S) for n in S if n not in P.blocks[i])
    return frozenset(out)
