import json

import numpy as np
import pytest

from isospectral import io
from isospectral.blowup import rho
from isospectral.spectral import Distribution, DistributionSequence, Spectrum, TridiagonalMatrix


def test_float_formatting_is_lossless(rng):
    xs = rng.standard_normal(200) * 10.0 ** rng.integers(-30, 30, 200)
    back = json.loads(io.dumps(xs.tolist()))
    assert back == xs.tolist()
    assert io.dumps([1.0, 0.1]) == "[1.0, 0.10000000000000001]"
    with pytest.raises(ValueError):
        io.dumps([float("nan")])


def test_dumps_is_byte_stable():
    rec = {"b": [1, 2.5], "a": {"x": [[1.0], [2.0]]}}
    assert io.dumps(rec) == io.dumps(json.loads(io.dumps(rec)))


def test_distribution_round_trip(rng):
    s = Spectrum(tuple(np.sort(rng.uniform(-1, 1, 5))))
    D = Distribution(s, (0, 2, 4), rng.uniform(0.1, 1, 3))
    rec = json.loads(io.dumps(io.distribution_to_record(D)))
    assert rec["support"] == [1, 3, 5]
    back = io.distribution_from_record(rec)
    assert back.support == D.support and back.weights.tolist() == D.weights.tolist()


def test_distribution_without_support_is_sorted():
    D = io.distribution_from_record({"lambda": [2, 0, 1], "weights": [3, 1, 2]})
    assert D.points.tolist() == [0, 1, 2] and D.weights.tolist() == [1, 2, 3]


@pytest.mark.parametrize(
    "rec",
    [
        {"lambda": [0, 1], "weights": [1]},
        {"lambda": [0, 1], "weights": [1, -1]},
        {"lambda": [0, 0], "weights": [1, 1]},
        {"lambda": [0, 1], "support": [0], "weights": [1]},
        {"lambda": [0, 1], "support": [3], "weights": [1]},
        {"lambda": [0, 1], "weights": ["1", 1]},
        {"lambda": [0, 1], "weights": [True, 1]},
        {"weights": [1]},
        [1, 2],
    ],
)
def test_distribution_rejects(rec):
    with pytest.raises(io.InputError):
        io.distribution_from_record(rec)


def test_matrix_round_trip():
    T = TridiagonalMatrix.from_diagonals([0.1, 0.2, 0.3], [1.0, 1 / 3])
    back = io.matrix_from_record(json.loads(io.dumps(io.matrix_to_record(T))))
    assert back == T
    with pytest.raises(io.InputError):
        io.matrix_from_record({"diag": [0.0, 1.0], "offdiag": []})


def test_sequence_round_trip():
    s = Spectrum((0.0, 1.0, 2.0))
    seq = DistributionSequence((Distribution(s, (1,), [1.0]), Distribution(s, (0, 2), [0.3, 0.7])))
    rec = json.loads(io.dumps(io.sequence_to_record(seq)))
    assert rec["parts"][1]["support"] == [1, 3]
    back = io.sequence_from_record(rec)
    assert back.partition == seq.partition and back.isclose(seq, 0.0)
    single = io.sequence_from_record({"lambda": [0, 1], "weights": [1, 1]})
    assert len(single.parts) == 1
    with pytest.raises(io.InputError):
        io.sequence_from_record({"lambda": [0, 1], "support": [1], "weights": [1]})
    with pytest.raises(io.InputError):
        io.sequence_from_record({"lambda": [0, 1], "parts": [{"support": [1], "weights": [1]}]})


def test_blowup_round_trip_rechecks_membership():
    s = Spectrum((0.0, 0.5, 2.0))
    pt = rho(DistributionSequence((Distribution(s, (2,), [1.0]), Distribution(s, (0, 1), [1.0, 3.0]))))
    rec = json.loads(io.dumps(io.blowup_to_record(pt)))
    assert [b["subset"] for b in rec["blocks"]] == [[1], [2], [3], [1, 2], [1, 3], [2, 3], [1, 2, 3]]
    assert io.blowup_from_record(rec).isclose(pt, 0.0)
    # {1,3} must be proportional to the top block restricted to {1,3}
    rec["blocks"][4]["values"][0] = 1e-3
    with pytest.raises(io.InputError, match="not a point"):
        io.blowup_from_record(rec)


def test_blowup_record_order_enforced():
    s = Spectrum((0.0, 1.0))
    pt = rho(DistributionSequence((Distribution.full(s, [1.0, 1.0]),)))
    rec = io.blowup_to_record(pt)
    rec["blocks"] = rec["blocks"][::-1]
    with pytest.raises(io.InputError, match="order"):
        io.blowup_from_record(rec)
    rec["blocks"] = rec["blocks"][1:]
    with pytest.raises(io.InputError):
        io.blowup_from_record(rec)


def test_load_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(io.InputError, match="invalid JSON"):
        io.load(str(bad))
    with pytest.raises(io.InputError, match="cannot read"):
        io.load(str(tmp_path / "missing.json"))
