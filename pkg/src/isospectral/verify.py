"""Property suite run by ``isospectral verify``.

Every check is seeded and deterministic.  The first ten checks are the
acceptance criteria; the rest are module invariants that back them up.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import blowup, complex as cplx, counting, limits, spectral
from .partitions import OrderedPartition, enumerate_ordered_partitions, is_refinement
from .spectral import Distribution, DistributionSequence, Spectrum, TridiagonalMatrix

EXPECTED_CHI = (1, 0, -2, 0, 16, 0, -272, 0, 7936, 0)


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str
    seconds: float

    def line(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'}  {self.name}: {self.detail}"


# -- random inputs -----------------------------------------------------------


def random_spectrum(rng: np.random.Generator, d: int, *, spread: bool = False) -> Spectrum:
    """Uniform points in [-1, 1]; with ``spread`` the gaps are at least 0.5."""
    if spread:
        lam = np.cumsum(rng.uniform(0.5, 1.5, d))
        return Spectrum(tuple(lam - lam.mean()))
    while True:
        lam = np.sort(rng.uniform(-1, 1, d))
        if d == 1 or np.min(np.diff(lam)) > 1e-3:
            return Spectrum(tuple(lam))


def random_distribution(rng, d: int) -> Distribution:
    return Distribution.full(random_spectrum(rng, d), rng.uniform(0.05, 1.0, d))


def random_jacobi(rng, d: int) -> TridiagonalMatrix:
    return TridiagonalMatrix.from_diagonals(rng.uniform(-1, 1, d), rng.uniform(0.1, 1, d - 1))


def random_sequence(rng, spectrum: Spectrum, P: OrderedPartition) -> DistributionSequence:
    return DistributionSequence(
        tuple(Distribution(spectrum, tuple(sorted(b)), rng.uniform(0.1, 1.0, len(b))) for b in P.blocks)
    )


def random_partition(rng, d: int, r: int) -> OrderedPartition:
    perm = rng.permutation(d)
    cuts = np.sort(rng.choice(np.arange(1, d), r - 1, replace=False))
    return OrderedPartition(tuple(frozenset(int(i) for i in b) for b in np.split(perm, cuts)))


def splitting_example() -> limits.MomentCurve:
    s = Spectrum((0.0, 1.0, 2.0))
    return limits.MomentCurve((Distribution(s, (0,), [1.0]), Distribution(s, (1, 2), [1.0, 1.0])))


# -- acceptance criteria -----------------------------------------------------


def check_splitting_example(tol: float | None = None) -> tuple[bool, str]:
    curve = splitting_example()
    lim = limits.limit_of_moment_curve(curve)
    s = curve.spectrum
    want = DistributionSequence((Distribution(s, (0,), [1.0]), Distribution(s, (1, 2), [1.0, 4.0])))
    report = limits.numeric_limit_report(curve, [10.0 ** -k for k in (2, 4, 6, 8, 10)])
    target = TridiagonalMatrix((0.0, 0.0, 9 / 5, 2 / 5, 6 / 5))
    matrix_ok = report.limit_matrix.distance(target) <= 1e-15
    e = report.errors
    ok = lim.isclose(want, 1e-15) and matrix_ok and report.error_decreasing() and e[-1] < 1e-3
    return ok, f"E(1e-10) = {e[-1]:.3e}, strictly decreasing: {report.error_decreasing()}"


def check_round_trip(tol: float | None = None) -> tuple[bool, str]:
    tol = 1e-8 if tol is None else tol
    rng = np.random.default_rng(20240601)
    worst_w = worst_j = 0.0
    for d in range(2, 9):
        for _ in range(100):
            dist = random_distribution(rng, d)
            back = spectral.spectral_distribution(spectral.reconstruct(dist))
            worst_w = max(worst_w, float(np.max(np.abs(back.normalized_weights - dist.normalized_weights))))
            worst_w = max(worst_w, float(np.max(np.abs(back.points - dist.points))))
            J = random_jacobi(rng, d)
            worst_j = max(worst_j, spectral.reconstruct(spectral.spectral_distribution(J)).distance(J))
    return worst_w < tol and worst_j < tol, f"weights {worst_w:.2e}, matrices {worst_j:.2e}"


def check_flip_identity(tol: float | None = None) -> tuple[bool, str]:
    rng = np.random.default_rng(20240602)
    worst_w = worst_e = 0.0
    for d in range(2, 9):
        for _ in range(100):
            dist = random_distribution(rng, d)
            J = spectral.reconstruct(dist)
            fw = spectral.flip_weights(dist)
            via = spectral.spectral_distribution(spectral.flip_matrix(J))
            worst_w = max(worst_w, float(np.max(np.abs(fw.normalized_weights - via.normalized_weights))))
            JF = spectral.reconstruct(fw)
            worst_e = max(worst_e, float(np.max(np.abs(np.array(J.entries) - np.array(JF.entries[::-1])))))
    return worst_w < 1e-8 and worst_e < 1e-9, f"weights {worst_w:.2e}, entries {worst_e:.2e}"


def check_blowup_inverse(tol: float | None = None) -> tuple[bool, str]:
    tol = 1e-12 if tol is None else tol
    rng = np.random.default_rng(20240603)
    n = 0
    worst = 0.0
    for d in range(1, 5):
        spectrum = random_spectrum(rng, d)
        for P in enumerate_ordered_partitions(d):
            seq = random_sequence(rng, spectrum, P)
            pt = blowup.rho(seq)
            if not blowup.is_member(pt, tol):
                return False, f"rho image of {P} fails membership"
            back = blowup.pi(pt)
            if back.partition != P or not back.isclose(seq, 1e-12):
                return False, f"pi(rho(x)) != x on {P}"
            gap = blowup.rho(back).distance(pt)
            worst = max(worst, gap)
            if gap > tol:
                return False, f"rho(pi(y)) off by {gap:.2e} on {P}"
            n += 1
    return True, f"{n} partitions, worst rho(pi) gap {worst:.2e}"


def check_lattice(tol: float | None = None) -> tuple[bool, str]:
    pairs = 0
    for d in range(1, 5):
        faces = cplx.faces_of_permutahedron(d)
        verts = {f.partition: f.vertices for f in faces}
        vanish = {f.partition: blowup.vanishing_set(f.partition) for f in faces}
        for a in faces:
            for b in faces:
                order = is_refinement(a.partition, b.partition)
                if order != (verts[a.partition] <= verts[b.partition]):
                    return False, f"vertex containment disagrees for {a.partition}, {b.partition}"
                if order != (vanish[b.partition] <= vanish[a.partition]):
                    return False, f"blow-up closure disagrees for {a.partition}, {b.partition}"
                pairs += 1
    return True, f"{pairs} ordered pairs agree"


def check_face_counts(tol: float | None = None) -> tuple[bool, str]:
    for d in range(1, 7):
        counts = [0] * d
        for f in cplx.faces_of_permutahedron(d):
            counts[f.dim] += 1
        want = [counting.permutahedron_face_count(d, n) for n in range(d)]
        if counts != want:
            return False, f"P_{d}: {counts} != {want}"
        fv = cplx.build_complex(d).f_vector()
        want_c = [counting.complex_face_count(d, n) for n in range(d)]
        if fv != want_c:
            return False, f"complex d={d}: {fv} != {want_c}"
    return True, "d = 1..6, all dimensions"


def check_euler(tol: float | None = None) -> tuple[bool, str]:
    for d in range(1, 7):
        chi = cplx.build_complex(d).euler_characteristic()
        if chi != counting.euler_characteristic(d):
            return False, f"d={d}: enumeration {chi} != formula {counting.euler_characteristic(d)}"
    formula = tuple(counting.euler_characteristic(d) for d in range(1, 11))
    tanh = tuple(counting.tanh_coefficient_scaled(d) for d in range(1, 11))
    ok = formula == tanh == EXPECTED_CHI
    return ok, f"chi = {formula}"


def check_surface(tol: float | None = None) -> tuple[bool, str]:
    rep = cplx.surface_report()
    ok = (
        rep.f_vector == (6, 12, 4)
        and all(k == 2 for k in rep.faces_per_edge)
        and all(c == (4,) for c in rep.link_cycle_lengths)
        and rep.connected
        and rep.euler_characteristic == -2
    )
    return ok, f"f = {rep.f_vector}, chi = {rep.euler_characteristic}, links {set(rep.link_cycle_lengths)}"


def check_petrie(tol: float | None = None) -> tuple[bool, str]:
    cx = cplx.build_complex(3)
    walk = cplx.petrie_polygon(cx)
    covered = set(walk.edges)
    ok = covered == set(cx.faces_of_dim(1)) and cplx.is_petrie_path(cx, walk)
    return ok, f"walk length {walk.length}, {len(covered)} distinct edges"


def check_degeneration(tol: float | None = None) -> tuple[bool, str]:
    # separated spectra: near-coincident eigenvalues stretch the transient past t = 1e-2
    rng = np.random.default_rng(0)
    worst = 0.0
    for k in range(20):
        d = int(rng.integers(2, 6))
        r = int(rng.integers(2, d + 1))
        spectrum = random_spectrum(rng, d, spread=True)
        curve = limits.MomentCurve(random_sequence(rng, spectrum, random_partition(rng, d, r)).parts)
        rep = limits.numeric_limit_report(curve)
        last = rep.rows[-1]
        worst = max(worst, last.first_coupling, last.last_coupling)
        if not (last.first_coupling < 1e-3 and last.last_coupling < 1e-3 and rep.coupling_decreasing()):
            return False, f"curve {k} on {curve.partition}: entries {last.first_coupling:.2e}, {last.last_coupling:.2e}"
    return True, f"20 curves, largest entry at t=1e-10: {worst:.2e}"


# -- further invariants ------------------------------------------------------


def check_homogeneity(tol: float | None = None) -> tuple[bool, str]:
    rng = np.random.default_rng(7)
    for _ in range(50):
        dist = random_distribution(rng, int(rng.integers(1, 8)))
        J = spectral.reconstruct(dist)
        for c in (2.0, 0.25, -1.0, -8.0):
            if spectral.reconstruct(dist.scaled(c)).entries != J.entries:
                return False, f"scaling by {c} changed the matrix"
        for c in (3.7, 1e-5, -0.3):
            if spectral.reconstruct(dist.scaled(c)).distance(J) > 1e-14:
                return False, f"scaling by {c} changed the matrix"
    return True, "exact for powers of two and sign, 1e-14 otherwise"


def check_structural_maps(tol: float | None = None) -> tuple[bool, str]:
    rng = np.random.default_rng(8)
    for _ in range(50):
        d = int(rng.integers(2, 8))
        dist = random_distribution(rng, d)
        J = spectral.reconstruct(dist)
        if spectral.flip_matrix(spectral.flip_matrix(J)) != J:
            return False, "flip_matrix is not an involution"
        if not spectral.flip_weights(spectral.flip_weights(dist)).isclose(dist, 1e-10):
            return False, "flip_weights is not an involution up to scale"
        eps = rng.choice([-1, 1], d)
        S = spectral.sign_conjugate(J, eps)
        if spectral.sign_conjugate(J, -eps) != S:
            return False, "global sign flip changed the result"
        if np.max(np.abs(np.linalg.eigvalsh(S.to_dense()) - dist.points)) > 1e-12:
            return False, "sign conjugation changed the spectrum"
        P = random_partition(rng, d, int(rng.integers(1, d + 1)))
        seq = random_sequence(rng, dist.spectrum, P)
        T = spectral.direct_sum_reconstruct(seq)
        if len(spectral.split_blocks(T)) != P.r:
            return False, "split_blocks does not recover the block count"
    return True, "flip, sign and direct-sum invariants hold"


def check_limit_oracles(tol: float | None = None) -> tuple[bool, str]:
    rng = np.random.default_rng(9)
    worst = 0.0
    for _ in range(20):
        d = int(rng.integers(2, 6))
        spectrum = random_spectrum(rng, d, spread=True)
        P = random_partition(rng, d, int(rng.integers(2, d + 1)))
        curve = limits.MomentCurve(random_sequence(rng, spectrum, P).parts)
        lim = limits.limit_of_moment_curve(curve)
        target = blowup.rho(lim)
        # the gap is linear in t with a constant set by the spectrum's geometry
        gaps = [blowup.rho(DistributionSequence((curve(t),))).distance(target) for t in (1e-6, 1e-8, 1e-10)]
        worst = max(worst, gaps[-1])
        if gaps[-1] > 1e-6:
            return False, f"rho images differ by {gaps[-1]:.2e} at t=1e-10 on {P}"
        if not 0.5e-2 < gaps[1] / gaps[0] < 2e-2:
            return False, f"rho images do not converge linearly in t on {P}"
        if limits.classify_stable(curve.exponent_weights()) != P:
            return False, "classify_stable does not return the curve partition"
        flipped = limits.classify_stable(curve.exponent_weights().flipped(spectrum))
        if flipped.blocks != P.blocks[::-1]:
            return False, "flipped exponents do not reverse the partition"
        back = limits.limit_of_moment_curve(limits.approach_curve(lim))
        if not back.isclose(lim, 1e-12):
            return False, "approach_curve does not invert the limit"
    return True, f"blow-up oracle gap at t=1e-10: {worst:.2e}"


def check_membership_rejects(tol: float | None = None) -> tuple[bool, str]:
    rng = np.random.default_rng(10)
    # no cross equations exist below d = 3
    for d in (3, 4, 5):
        spectrum = random_spectrum(rng, d)
        pt = blowup.rho(random_sequence(rng, spectrum, OrderedPartition.trivial(d)))
        full = frozenset(range(d))
        blocks = dict(pt.blocks)
        bumped = blocks[full].copy()
        bumped[0] *= 1.01
        blocks[full] = bumped
        if blowup.is_member(blowup.BlowupPoint(spectrum, blocks)):
            return False, f"perturbed point accepted at d={d}"
        for P in enumerate_ordered_partitions(d):
            if blowup.face_of(blowup.barycentre(P, spectrum)) != P:
                return False, f"face_of(barycentre({P})) != {P}"
    return True, "perturbations rejected, barycentres land on their faces"


def check_gluing(tol: float | None = None) -> tuple[bool, str]:
    """Sign-class incidence agrees with limits of actual matrices (d = 3)."""
    cx = cplx.build_complex(3)
    spectrum = Spectrum((0.0, 1.0, 2.5))
    rng = np.random.default_rng(11)
    pairs = 0
    for f in cx.faces:
        for g in cx.faces:
            if g.dim >= f.dim or not g.partition.refines(f.partition):
                continue
            target = random_sequence(rng, spectrum, g.partition)
            base = spectral.direct_sum_reconstruct(target)
            near = spectral.sign_conjugate(
                spectral.direct_sum_reconstruct(limits.face_approach(target, f.partition, 1e-12)), f.signs
            )
            dist = {s: near.distance(spectral.sign_conjugate(base, s)) for s in cplx.sign_classes(g.partition)}
            best = min(dist, key=dist.get)
            others = sorted(v for s, v in dist.items() if s != best)
            if best != cplx.canonical_signs(g.partition, f.signs) or dist[best] > 1e-4:
                return False, f"{f} approaches the wrong sign class over {g.partition}"
            if others and others[0] < 1e-2:
                return False, f"sign classes over {g.partition} are not separated"
            pairs += 1
    return True, f"{pairs} face pairs glue as predicted"


def check_counting_routes(tol: float | None = None) -> tuple[bool, str]:
    for d in range(1, 11):
        chi = counting.euler_characteristic(d)
        if chi != -counting.eulerian_polynomial(d, -1):
            return False, f"Eulerian route disagrees at d={d}"
        if counting.ordered_bell(d) != sum(counting.permutahedron_face_count(d, n) for n in range(d)):
            return False, f"ordered Bell number disagrees at d={d}"
    for d in range(1, 8):
        if cplx.enumerated_euler_characteristic(d) != counting.euler_characteristic(d):
            return False, f"partition enumeration disagrees at d={d}"
    return True, "three chi routes agree for d = 1..10"


ACCEPTANCE: list[tuple[str, Callable]] = [
    ("1 splitting example", check_splitting_example),
    ("2 round trip", check_round_trip),
    ("3 flip identity", check_flip_identity),
    ("4 blow-up inverse pair", check_blowup_inverse),
    ("5 lattice isomorphism", check_lattice),
    ("6 face counts", check_face_counts),
    ("7 Euler characteristics", check_euler),
    ("8 d=3 surface", check_surface),
    ("9 Petrie walk", check_petrie),
    ("10 degeneration entries", check_degeneration),
]

INVARIANTS: list[tuple[str, Callable]] = [
    ("homogeneity", check_homogeneity),
    ("structural maps", check_structural_maps),
    ("limit oracles", check_limit_oracles),
    ("membership", check_membership_rejects),
    ("sign gluing", check_gluing),
    ("counting routes", check_counting_routes),
]


def run_check(name: str, fn: Callable, tol: float | None = None) -> CheckResult:
    start = time.perf_counter()
    try:
        ok, detail = fn(tol)
    except Exception as exc:  # a crash is a failed check, reported not raised
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return CheckResult(name, bool(ok), detail, time.perf_counter() - start)


def run_suite(tol: float | None = None, only_acceptance: bool = False) -> list[CheckResult]:
    checks = ACCEPTANCE if only_acceptance else ACCEPTANCE + INVARIANTS
    return [run_check(name, fn, tol) for name, fn in checks]
