import math

import numpy as np
import pytest

from isospectral.blowup import rho
from isospectral.limits import (
    DEFAULT_T_GRID,
    ExponentWeights,
    MomentCurve,
    UnstableSequenceError,
    approach_curve,
    classify_stable,
    face_approach,
    fit_exponents,
    limit_of_moment_curve,
    moment_curve_eval,
    numeric_limit_report,
)
from isospectral.partitions import OrderedPartition
from isospectral.spectral import Distribution, DistributionSequence, NumericalError, Spectrum, TridiagonalMatrix

S3 = Spectrum((0.0, 1.0, 2.0))


def splitting_curve():
    return MomentCurve((Distribution(S3, (0,), [1.0]), Distribution(S3, (1, 2), [1.0, 1.0])))


def test_eval_examples():
    np.testing.assert_allclose(moment_curve_eval(splitting_curve(), 0.1).weights, [1.0, 0.1, 0.1])
    s = Spectrum((0.0, 1.0))
    c = MomentCurve((Distribution(s, (0,), [1.0]), Distribution(s, (1,), [1.0])))
    np.testing.assert_allclose(c(0.3).weights, [1.0, 0.3])
    single = MomentCurve((Distribution.full(S3, [1.0, 2.0, 3.0]),))
    np.testing.assert_allclose(single(0.5).normalized_weights, np.array([1, 2, 3]) / 6)


def test_eval_rejects_bad_t():
    for t in (0.0, 1.0, -0.1, 2.0):
        with pytest.raises(ValueError):
            splitting_curve()(t)


def test_eval_underflow_boundary():
    s = Spectrum(tuple(float(k) for k in range(8)))
    c = MomentCurve(tuple(Distribution(s, (k,), [1.0]) for k in range(8)))
    w = c(1e-40).weights
    assert w.max() == 1.0 and np.all(w > 0)
    # t^7 below the float range must fail loudly, not return a zero weight
    with pytest.raises(NumericalError):
        c(1e-60)


def test_curve_validation():
    with pytest.raises(ValueError):
        MomentCurve((Distribution(S3, (0,), [1.0]), Distribution(S3, (1,), [1.0])))
    with pytest.raises(ValueError):
        MomentCurve((Distribution(S3, (0,), [-1.0]), Distribution(S3, (1, 2), [1.0, 1.0])))


def test_limit_examples():
    lim = limit_of_moment_curve(splitting_curve())
    assert lim.partition == OrderedPartition.of({0}, {1, 2})
    assert lim.parts[1].normalized_weights.tolist() == [0.2, 0.8]
    s = Spectrum((0.0, 3.0))
    two = MomentCurve((Distribution(s, (0,), [1.0]), Distribution(s, (1,), [1.0])))
    assert limit_of_moment_curve(two).parts[1].normalized_weights.tolist() == [1.0]
    one = MomentCurve((Distribution.full(S3, [1.0, 1.0, 2.0]),))
    np.testing.assert_allclose(limit_of_moment_curve(one).parts[0].normalized_weights, [0.25, 0.25, 0.5])


def test_report_on_splitting_example():
    rep = numeric_limit_report(splitting_curve(), [10.0 ** -k for k in (2, 4, 6, 8, 10)])
    np.testing.assert_allclose(rep.limit_matrix.entries, (0, 0, 9 / 5, 2 / 5, 6 / 5), atol=1e-15)
    assert rep.error_decreasing() and rep.coupling_decreasing()
    assert rep.errors[-1] < 1e-3
    # off-diagonal couplings shrink like sqrt(t)
    slopes = np.diff(np.log10(rep.errors)) / np.diff(np.log10([r.t for r in rep.rows]))
    np.testing.assert_allclose(slopes, 0.5, atol=0.02)
    assert (rep.first_index, rep.last_index) == (2, 2)


def test_two_point_report_closed_form():
    s = Spectrum((0.0, 1.0))
    c = MomentCurve((Distribution(s, (0,), [1.0]), Distribution(s, (1,), [1.0])))
    rep = numeric_limit_report(c, [1e-2, 1e-4])
    for row in rep.rows:
        t = row.t
        # entries (t/(1+t), sqrt(t)/(1+t), 1/(1+t)) against diag(0, 1)
        assert row.error == pytest.approx(math.sqrt(t) / (1 + t), rel=1e-12)
    assert rep.limit_matrix.entries == (0.0, 0.0, 1.0)


def test_single_part_report_is_flat():
    c = MomentCurve((Distribution.full(S3, [1.0, 2.0, 1.0]),))
    rep = numeric_limit_report(c)
    assert rep.first_index is None and rep.coupling_decreasing()
    assert np.all(rep.errors < 1e-14)


def test_report_outputs():
    rep = numeric_limit_report(splitting_curve(), [1e-2, 1e-3])
    d = rep.to_dict()
    assert d["partition"] == [[1], [2, 3]] and len(d["rows"]) == 2
    assert rep.to_table().splitlines()[0].split()[:2] == ["t", "E(t)"]
    (x0, y0), (x1, y1) = rep.plot_data()
    assert x0 == pytest.approx(-2) and x1 == pytest.approx(-3) and y1 < y0
    with pytest.raises(ValueError):
        numeric_limit_report(splitting_curve(), [1e-3, 1e-2])


def test_default_grid():
    assert DEFAULT_T_GRID[0] == 1e-2 and DEFAULT_T_GRID[-1] == 1e-10
    assert all(b < a for a, b in zip(DEFAULT_T_GRID, DEFAULT_T_GRID[1:]))


@pytest.mark.parametrize(
    "e, blocks",
    [((0, 1), [{0}, {1}]), ((0, 0), [{0, 1}]), ((0, 2, 2), [{0}, {1, 2}]), ((3, 1, 3, 0), [{3}, {1}, {0, 2}])],
)
def test_classify_stable(e, blocks):
    ew = ExponentWeights(np.ones(len(e)), e)
    assert classify_stable(ew) == OrderedPartition.of(*blocks)


def test_flip_reverses_partition(rng):
    s = Spectrum((0.0, 1.0, 2.5, 4.0))
    ew = ExponentWeights(rng.uniform(0.1, 1, 4), [0, 2, 1, 1])
    P = classify_stable(ew)
    assert classify_stable(ew.flipped(s)).blocks == P.blocks[::-1]


def test_exponents_of_curve():
    c = splitting_curve()
    assert classify_stable(c.exponent_weights()) == c.partition


def test_fit_exponents_recovers_moment_curve():
    c = splitting_curve()
    ts = [10.0 ** -k for k in range(2, 8)]
    ew = fit_exponents(ts, [c(t).weights for t in ts])
    np.testing.assert_allclose(ew.exponents, [0, 1, 1], atol=1e-9)
    assert classify_stable(ew) == c.partition


def test_fit_exponents_refuses_oscillation():
    ts = np.array([10.0 ** -k for k in range(2, 9)])
    wobble = np.stack([np.ones_like(ts), ts * (2 + np.sin(40 * np.log(ts)))], axis=1)
    with pytest.raises(UnstableSequenceError):
        fit_exponents(ts, wobble)


def test_approach_curve_inverts_limit(rng):
    s = Spectrum((0.0, 1.0, 2.0, 3.5))
    seq = DistributionSequence(
        (Distribution(s, (2,), [1.0]), Distribution(s, (0, 3), [1.0, 2.0]), Distribution(s, (1,), [1.0]))
    )
    c = approach_curve(seq)
    assert c.partition == seq.partition
    assert limit_of_moment_curve(c).isclose(seq, 1e-13)


def test_limit_agrees_with_blowup_limit(rng):
    s = Spectrum((-1.5, -0.5, 0.5, 1.5))
    c = MomentCurve((Distribution(s, (1, 3), [1.0, 0.5]), Distribution(s, (0,), [1.0]), Distribution(s, (2,), [2.0])))
    target = rho(limit_of_moment_curve(c))
    gaps = [rho(DistributionSequence((c(t),))).distance(target) for t in (1e-6, 1e-8)]
    assert gaps[1] < 1e-6
    assert gaps[1] / gaps[0] == pytest.approx(1e-2, rel=0.1)


def test_face_approach():
    s = Spectrum((0.0, 1.0, 2.0))
    target = DistributionSequence(
        (Distribution(s, (0,), [1.0]), Distribution(s, (2,), [1.0]), Distribution(s, (1,), [1.0]))
    )
    coarse = OrderedPartition.of({0}, {1, 2})
    near = face_approach(target, coarse, 1e-9)
    assert near.partition == coarse
    w = near.parts[1].normalized_weights
    assert w[1] > 1 - 1e-6  # index 2 dominates inside the second block
    with pytest.raises(ValueError):
        face_approach(target, OrderedPartition.of({1}, {0, 2}), 1e-3)


def test_graded_curve_converges():
    s = Spectrum((0.0, 1.0, 2.0, 3.0, 4.0))
    c = MomentCurve(tuple(Distribution(s, (k,), [1.0]) for k in (2, 4, 0, 3, 1)))
    rep = numeric_limit_report(c)
    assert rep.error_decreasing() and rep.coupling_decreasing()
    assert rep.errors[-1] < 1e-3
    target = TridiagonalMatrix.from_diagonals([2.0, 4.0, 0.0, 3.0, 1.0], [0.0] * 4)
    assert rep.limit_matrix == target



def test_random_curves_converge_at_sqrt_rate():
    from isospectral.verify import random_partition, random_sequence, random_spectrum

    rng = np.random.default_rng(77)
    for _ in range(30):
        d = int(rng.integers(2, 6))
        r = int(rng.integers(2, d + 1))
        s = random_spectrum(rng, d)
        c = MomentCurve(random_sequence(rng, s, random_partition(rng, d, r)).parts)
        rep = numeric_limit_report(c)
        # E(t) / sqrt(t) settles to a curve-dependent constant
        scaled = rep.errors[-2:] / np.sqrt([row.t for row in rep.rows[-2:]])
        np.testing.assert_allclose(scaled, scaled[-1], rtol=1e-2)


def test_separated_spectra_decrease_every_decade():
    from isospectral.verify import random_partition, random_sequence, random_spectrum

    rng = np.random.default_rng(78)
    for _ in range(50):
        d = int(rng.integers(2, 6))
        r = int(rng.integers(2, d + 1))
        s = random_spectrum(rng, d, spread=True)
        c = MomentCurve(random_sequence(rng, s, random_partition(rng, d, r)).parts)
        assert numeric_limit_report(c).error_decreasing()


def test_close_eigenvalues_delay_the_decrease():
    from conftest import lanczos_oracle

    x = np.array([-0.98059595, -0.34416937, -0.16763969, -0.00335868, 0.0014409])
    s = Spectrum(tuple(x))
    c = MomentCurve(
        (
            Distribution(s, (2,), [0.47313906]),
            Distribution(s, (3, 4), [0.47945809, 0.43417194]),
            Distribution(s, (0, 1), [0.77185892, 0.77966234]),
        )
    )
    rep = numeric_limit_report(c)
    e = rep.errors
    # E(t) rises until about t = 1e-4, then falls like sqrt(t)
    assert e[1] < e[2] and not rep.error_decreasing()
    assert all(b < a for a, b in zip(e[3:], e[4:]))
    L = rep.limit_matrix.to_dense()
    for row in rep.rows[:4]:
        a, b = lanczos_oracle(x, c(row.t).weights)
        T = np.diag(a) + np.diag(b, 1) + np.diag(b, -1)
        assert np.max(np.abs(T - L)) == pytest.approx(row.error, abs=1e-12)
