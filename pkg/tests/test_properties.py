import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from isospectral.blowup import face_of, is_member, pi, rho
from isospectral.partitions import OrderedPartition
from isospectral.spectral import (
    Distribution,
    DistributionSequence,
    Spectrum,
    flip_matrix,
    flip_weights,
    reconstruct,
    spectral_distribution,
)


@st.composite
def distributions(draw, dmin=1, dmax=7):
    d = draw(st.integers(dmin, dmax))
    gaps = draw(st.lists(st.floats(0.05, 2.0), min_size=d, max_size=d))
    start = draw(st.floats(-3, 3))
    x = start + np.cumsum(gaps)
    w = draw(st.lists(st.floats(0.01, 1.0), min_size=d, max_size=d))
    return Distribution.full(Spectrum(tuple(x)), w)


@st.composite
def sequences(draw):
    d = draw(st.integers(1, 5))
    labels = draw(st.lists(st.integers(0, d - 1), min_size=d, max_size=d))
    used = sorted(set(labels))
    P = OrderedPartition.of(*({i for i, k in enumerate(labels) if k == u} for u in used))
    x = np.cumsum(draw(st.lists(st.floats(0.1, 1.0), min_size=d, max_size=d)))
    s = Spectrum(tuple(x))
    parts = []
    for b in P.blocks:
        w = draw(st.lists(st.floats(0.05, 1.0), min_size=len(b), max_size=len(b)))
        parts.append(Distribution(s, tuple(sorted(b)), w))
    return DistributionSequence(tuple(parts))


@settings(max_examples=60, deadline=None)
@given(distributions())
def test_round_trip(D):
    back = spectral_distribution(reconstruct(D))
    np.testing.assert_allclose(back.points, D.points, atol=1e-10)
    np.testing.assert_allclose(back.normalized_weights, D.normalized_weights, atol=1e-10)


@settings(max_examples=40, deadline=None)
@given(distributions(), st.sampled_from([0.25, 2.0, 8.0, -1.0, -0.5]))
def test_homogeneity_exact_for_binary_scales(D, c):
    assert reconstruct(D.scaled(c)).entries == reconstruct(D).entries


@settings(max_examples=40, deadline=None)
@given(distributions(dmin=2))
def test_flip_is_an_involution(D):
    twice = flip_weights(flip_weights(D))
    np.testing.assert_allclose(twice.normalized_weights, D.normalized_weights, rtol=1e-9)
    np.testing.assert_allclose(
        reconstruct(flip_weights(D)).entries, flip_matrix(reconstruct(D)).entries, atol=1e-9
    )


@settings(max_examples=40, deadline=None)
@given(sequences())
def test_blowup_inverse(seq):
    pt = rho(seq)
    assert face_of(pt) == seq.partition
    assert is_member(pt, 1e-10)
    assert pi(pt).isclose(seq, 1e-10)
