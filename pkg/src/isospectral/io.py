"""JSON-shaped records for distributions, matrices, sequences and blow-up points.

Indices in files are 1-based.  ``dumps`` writes every float with 17
significant digits so that a load/dump round trip is lossless and output is
byte-stable for identical input.
"""

from __future__ import annotations

import json
import math
from typing import Any

import numpy as np

from .blowup import BlowupPoint, is_member
from .partitions import subsets_in_order
from .spectral import Distribution, DistributionSequence, Spectrum, TridiagonalMatrix


class InputError(ValueError):
    """A record is malformed or violates the invariants of its type."""


# -- writer -----------------------------------------------------------------


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x}")
    s = format(x, ".17g")
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def dumps(obj: Any, indent: int | None = 2, _level: int = 0) -> str:
    """JSON text with floats at 17 significant digits; dict order is preserved."""
    pad = "" if indent is None else "\n" + " " * (indent * (_level + 1))
    end = "" if indent is None else "\n" + " " * (indent * _level)
    sep = ", " if indent is None else ","
    if obj is None or isinstance(obj, (bool, str)):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (list, tuple, dict, np.ndarray)) for v in obj):
            return "[" + ", ".join(dumps(v, None) for v in obj) + "]"
        return "[" + sep.join(pad + dumps(v, indent, _level + 1) for v in obj) + end + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = (pad + json.dumps(str(k)) + ": " + dumps(v, indent, _level + 1) for k, v in obj.items())
        return "{" + sep.join(items) + end + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


# -- records ------------------------------------------------------------------


def _floats(rec: dict, key: str) -> list[float]:
    try:
        vals = rec[key]
    except KeyError:
        raise InputError(f"missing field {key!r}") from None
    if not isinstance(vals, list) or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in vals
    ):
        raise InputError(f"field {key!r} must be a list of numbers")
    out = [float(v) for v in vals]
    if not all(math.isfinite(v) for v in out):
        raise InputError(f"field {key!r} has non-finite values")
    return out


def _indices(rec: dict, key: str, d: int) -> tuple[int, ...]:
    vals = rec.get(key)
    if not isinstance(vals, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in vals):
        raise InputError(f"field {key!r} must be a list of 1-based integer indices")
    if any(not 1 <= v <= d for v in vals):
        raise InputError(f"field {key!r} has indices outside 1..{d}")
    return tuple(v - 1 for v in vals)


def _spectrum(rec: dict) -> Spectrum:
    try:
        return Spectrum(tuple(_floats(rec, "lambda")))
    except InputError:
        raise
    except ValueError as exc:
        raise InputError(f"bad spectrum: {exc}") from None


def _record(obj: Any) -> dict:
    if not isinstance(obj, dict):
        raise InputError("expected a JSON object")
    return obj


def distribution_to_record(dist: Distribution) -> dict:
    return {
        "lambda": dist.spectrum.points().tolist(),
        "support": [i + 1 for i in dist.support],
        "weights": dist.weights.tolist(),
    }


def distribution_from_record(obj: Any) -> Distribution:
    """``{lambda, support?, weights}``; a missing support means full support.

    Without a support, ``lambda`` may be in any order and is sorted together
    with the weights.
    """
    rec = _record(obj)
    w = _floats(rec, "weights")
    try:
        if "support" not in rec:
            lam = _floats(rec, "lambda")
            if len(lam) != len(w):
                raise InputError(f"{len(lam)} points but {len(w)} weights")
            return Distribution.from_points(lam, w)
        spectrum = _spectrum(rec)
        return Distribution(spectrum, _indices(rec, "support", spectrum.d), w)
    except InputError:
        raise
    except ValueError as exc:
        raise InputError(str(exc)) from None


def matrix_to_record(T: TridiagonalMatrix) -> dict:
    return {"diag": T.diag.tolist(), "offdiag": T.offdiag.tolist()}


def matrix_from_record(obj: Any) -> TridiagonalMatrix:
    rec = _record(obj)
    try:
        return TridiagonalMatrix.from_diagonals(_floats(rec, "diag"), _floats(rec, "offdiag"))
    except InputError:
        raise
    except ValueError as exc:
        raise InputError(str(exc)) from None


def sequence_to_record(seq: DistributionSequence) -> dict:
    return {
        "lambda": seq.spectrum.points().tolist(),
        "parts": [
            {"support": [i + 1 for i in p.support], "weights": p.weights.tolist()} for p in seq.parts
        ],
    }


def sequence_from_record(obj: Any) -> DistributionSequence:
    """``{lambda, parts: [{support, weights}]}``; a plain distribution record is one part."""
    rec = _record(obj)
    if "parts" not in rec:
        dist = distribution_from_record(rec)
        if len(dist.support) != dist.spectrum.d:
            raise InputError("a single distribution must have full support to form a sequence")
        return DistributionSequence((dist,))
    spectrum = _spectrum(rec)
    parts = rec["parts"]
    if not isinstance(parts, list) or not parts:
        raise InputError("field 'parts' must be a nonempty list")
    try:
        return DistributionSequence(
            tuple(
                Distribution(spectrum, _indices(_record(p), "support", spectrum.d), _floats(p, "weights"))
                for p in parts
            )
        )
    except InputError:
        raise
    except ValueError as exc:
        raise InputError(str(exc)) from None


def blowup_to_record(pt: BlowupPoint) -> dict:
    return {
        "lambda": pt.spectrum.points().tolist(),
        "blocks": [
            {"subset": [i + 1 for i in sorted(S)], "values": v.tolist()} for S, v in pt.blocks.items()
        ],
    }


def blowup_from_record(obj: Any, tol: float = 1e-12) -> BlowupPoint:
    """Load and re-validate: the point must satisfy the membership equations to ``tol``."""
    rec = _record(obj)
    spectrum = _spectrum(rec)
    blocks_in = rec.get("blocks")
    if not isinstance(blocks_in, list):
        raise InputError("field 'blocks' must be a list")
    blocks = {}
    for b in blocks_in:
        S = frozenset(_indices(_record(b), "subset", spectrum.d))
        if S in blocks:
            raise InputError(f"duplicate block for subset {sorted(i + 1 for i in S)}")
        blocks[S] = _floats(b, "values")
    expected = subsets_in_order(range(spectrum.d))
    if list(blocks) != expected:
        if set(blocks) == set(expected):
            raise InputError("blocks must follow the order (cardinality, then lexicographic)")
    try:
        pt = BlowupPoint(spectrum, blocks)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    report = is_member(pt, tol)
    if not report:
        raise InputError(f"not a point of the blow-up: {report.message}")
    return pt


def load(path_or_text: str) -> Any:
    """Parse JSON from a file path, or from standard input when given ``-``."""
    import sys

    try:
        if path_or_text == "-":
            return json.load(sys.stdin)
        with open(path_or_text, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from None
    except OSError as exc:
        raise InputError(f"cannot read {path_or_text}: {exc.strerror}") from None
