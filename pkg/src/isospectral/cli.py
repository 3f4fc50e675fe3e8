"""Command-line front end.

Exit status: 0 success, 2 bad input, 3 numeric failure, 4 property-suite failure.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from . import blowup, complex as cplx, counting, io, limits, spectral
from .spectral import DistributionSequence, NumericalError

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_SUITE = 4

MAX_EULER_D = 60
MAX_ENUMERATED_EULER_D = 6


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse's default status is already 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _positive_float(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not x > 0:
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return x


def _t_grid(text: str) -> list[float]:
    try:
        ts = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad t grid: {text!r}") from None
    if not ts or any(not 0 < t < 1 for t in ts) or any(b >= a for a, b in zip(ts, ts[1:])):
        raise argparse.ArgumentTypeError("t grid must be strictly decreasing values in (0, 1)")
    return ts


def _d_range(text: str) -> range:
    try:
        if "-" in text:
            lo, hi = (int(x) for x in text.split("-", 1))
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}; use N or LO-HI") from None
    if not 1 <= lo <= hi <= MAX_EULER_D:
        raise argparse.ArgumentTypeError(f"range must satisfy 1 <= LO <= HI <= {MAX_EULER_D}")
    return range(lo, hi + 1)


def _dimension(text: str) -> int:
    try:
        d = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if d < 1:
        raise argparse.ArgumentTypeError("d must be positive")
    return d


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=_positive_float, default=None, help="tolerance override")
    common.add_argument("--format", choices=("human", "json"), default="human")
    common.add_argument("--out", default="-", help="output path ('-' for standard output)")

    parser = _Parser(prog="isospectral", description="Jacobi matrices, spectral data and their degenerations.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("reconstruct", parents=[common], help="distribution file -> Jacobi matrix")
    p.add_argument("input", help="distribution record ('-' for standard input)")

    p = sub.add_parser("spectrum", parents=[common], help="matrix file -> spectral distribution")
    p.add_argument("input", help="matrix record; zero couplings split it into a sequence")

    p = sub.add_parser("limit", parents=[common], help="moment-curve file -> limit sequence")
    p.add_argument("input", help="sequence record giving the curve's parts in order")
    p.add_argument("--report", action="store_true", help="add the numeric convergence table")
    p.add_argument("--t-grid", type=_t_grid, default=None, help="comma list, strictly decreasing")
    p.add_argument("--plot-data", default=None, help="write (log10 t, log10 E) columns here")

    p = sub.add_parser("blowup", parents=[common], help="sequence file -> blow-up coordinates")
    p.add_argument("input", help="sequence record, or a blow-up record to read back")
    p.add_argument("--check", action="store_true", help="run the membership test")

    p = sub.add_parser("faces", parents=[common], help="face counts of the permutahedron and glued complex")
    p.add_argument("d", type=_dimension)

    p = sub.add_parser("euler", parents=[common], help="Euler characteristics with a tanh cross-check")
    p.add_argument("range", type=_d_range, help="N or LO-HI")

    p = sub.add_parser("surface", parents=[common], help="closed-surface diagnostics for d = 3")
    p.add_argument("--off", default=None, help="write the OFF polygon file here")
    p.add_argument("--complex-json", default=None, help="write the face/incidence list here")

    p = sub.add_parser("verify", parents=[common], help="run the property suite")
    p.add_argument("--acceptance-only", action="store_true")
    return parser


# -- command bodies: each returns (machine payload, human text, exit status) --


def _num(x: float) -> str:
    """Shortest text that reads back as the same float (human mode only)."""
    return repr(float(x))


def _matrix_text(T) -> str:
    rows = [f"diag    {' '.join(_num(x) for x in T.diag)}"]
    rows.append(f"offdiag {' '.join(_num(x) for x in T.offdiag)}")
    return "\n".join(rows)


def _sequence_text(seq: DistributionSequence) -> str:
    lines = []
    for k, part in enumerate(seq.parts, start=1):
        atoms = ", ".join(f"{_num(x)}: {_num(w)}" for x, w in zip(part.points, part.normalized_weights))
        lines.append(f"part {k} {{{atoms}}}")
    return "\n".join(lines)


def cmd_reconstruct(args):
    dist = io.distribution_from_record(io.load(args.input))
    T = spectral.reconstruct(dist.compress() if len(dist.support) < dist.spectrum.d else dist)
    return io.matrix_to_record(T), _matrix_text(T), EXIT_OK


def cmd_spectrum(args):
    T = io.matrix_from_record(io.load(args.input))
    tol = spectral.SPLIT_TOL if args.tol is None else args.tol
    try:
        blocks = spectral.split_blocks(T, tol)
    except ValueError as exc:
        raise io.InputError(str(exc)) from None
    dists = [spectral.spectral_distribution(B) for B in blocks]
    if len(dists) == 1:
        return io.distribution_to_record(dists[0]), _sequence_text(DistributionSequence((dists[0],))), EXIT_OK
    payload = {
        "blocks": [{"rows": B.dim, **io.distribution_to_record(D)} for B, D in zip(blocks, dists)]
    }
    text = "\n".join(
        f"block {k} ({B.dim} rows): "
        + ", ".join(f"{_num(x)}: {_num(w)}" for x, w in zip(D.points, D.normalized_weights))
        for k, (B, D) in enumerate(zip(blocks, dists), start=1)
    )
    return payload, text, EXIT_OK


def cmd_limit(args):
    seq = io.sequence_from_record(io.load(args.input))
    try:
        curve = limits.MomentCurve(seq.parts)
    except ValueError as exc:
        raise io.InputError(str(exc)) from None
    lim = limits.limit_of_moment_curve(curve)
    T = spectral.direct_sum_reconstruct(lim)
    payload = {"partition": curve.partition.to_labels(), "limit": io.sequence_to_record(lim),
               "limit_matrix": io.matrix_to_record(T)}
    text = [f"partition {curve.partition}", _sequence_text(lim), "limit matrix", _matrix_text(T)]
    if args.report or args.plot_data:
        grid = args.t_grid or limits.DEFAULT_T_GRID
        rep = limits.numeric_limit_report(curve, grid)
        payload["report"] = rep.to_dict()["rows"]
        payload["tracked_entries"] = [rep.first_index, rep.last_index]
        text += ["", rep.to_table()]
        if args.plot_data:
            _write(args.plot_data, "".join(f"{x:.17g} {y:.17g}\n" for x, y in rep.plot_data()))
    return payload, "\n".join(text), EXIT_OK


def cmd_blowup(args):
    tol = 1e-12 if args.tol is None else args.tol
    rec = io.load(args.input)
    if isinstance(rec, dict) and "blocks" in rec:
        pt = io.blowup_from_record(rec, tol)
        seq = blowup.pi(pt)
        payload = {"member": True, "partition": seq.partition.to_labels(), "sequence": io.sequence_to_record(seq)}
        return payload, f"member of the blow-up; face {seq.partition}\n{_sequence_text(seq)}", EXIT_OK
    seq = io.sequence_from_record(rec)
    pt = blowup.rho(seq)
    payload = io.blowup_to_record(pt)
    lines = [f"{'{' + ','.join(str(i + 1) for i in sorted(S)) + '}':<16} "
             + " ".join(_num(v) for v in vals) for S, vals in pt.items()]
    status = EXIT_OK
    if args.check:
        rep = blowup.is_member(pt, tol)
        payload["membership"] = {"ok": rep.ok, "message": rep.message,
                                 "worst_residual": rep.worst_residual, "instances": rep.instances_checked}
        lines.append(f"membership: {rep.message} (worst residual {rep.worst_residual:.3g}, "
                     f"{rep.instances_checked} instances)")
        if not rep.ok:
            status = EXIT_NUMERIC
    return payload, "\n".join(lines), status


def cmd_faces(args):
    d = args.d
    fv = cplx.build_complex(d).f_vector() if d <= cplx.MAX_COMPLEX_D else None
    rows = []
    for n in range(d):
        row = {"n": n, "permutahedron": counting.permutahedron_face_count(d, n),
               "complex": counting.complex_face_count(d, n)}
        if fv is not None:
            row["complex_enumerated"] = fv[n]
        rows.append(row)
    text = [f"{'n':>3} {'P_d':>14} {'glued':>16}" + (f" {'enumerated':>12}" if d <= cplx.MAX_COMPLEX_D else "")]
    for r in rows:
        line = f"{r['n']:>3} {r['permutahedron']:>14} {r['complex']:>16}"
        if "complex_enumerated" in r:
            line += f" {r['complex_enumerated']:>12}"
        text.append(line)
    return {"d": d, "rows": rows}, "\n".join(text), EXIT_OK


def cmd_euler(args):
    rows = []
    for d in args.range:
        chi = counting.euler_characteristic(d)
        row = {"d": d, "chi": chi, "tanh": counting.tanh_coefficient_scaled(d),
               "enumerated": cplx.enumerated_euler_characteristic(d) if d <= MAX_ENUMERATED_EULER_D else None}
        rows.append(row)
    text = [f"{'d':>3} {'chi':>24} {'d! [x^d] tanh x':>24} {'enumerated':>12}"]
    for r in rows:
        enum = "-" if r["enumerated"] is None else str(r["enumerated"])
        text.append(f"{r['d']:>3} {r['chi']:>24} {r['tanh']:>24} {enum:>12}")
    ok = all(r["chi"] == r["tanh"] and r["enumerated"] in (None, r["chi"]) for r in rows)
    return {"rows": rows, "agree": ok}, "\n".join(text), EXIT_OK if ok else EXIT_SUITE


def cmd_surface(args):
    cx = cplx.build_complex(3)
    rep = cplx.surface_report(cx)
    walk = cplx.petrie_polygon(cx)
    payload = rep.to_dict()
    payload["petrie"] = {
        "length": walk.length,
        "distinct_edges": len(set(walk.edges)),
        "petrie_property": cplx.is_petrie_path(cx, walk),
        "edges": [cx.faces[e].label for e in walk.edges],
    }
    text = [
        f"face vector        {rep.f_vector}",
        f"faces per edge     {sorted(set(rep.faces_per_ridge))}",
        f"polygon sizes      {sorted(set(rep.face_sizes))}",
        f"vertex links       {sorted(set(rep.link_cycle_lengths))}",
        f"connected          {rep.connected}",
        f"euler char         {rep.euler_characteristic}",
        f"orientable         {rep.orientable}",
        f"closed surface     {rep.is_closed_surface}",
        f"petrie walk        length {walk.length}, {len(set(walk.edges))} of {rep.f_vector[1]} edges",
    ]
    if args.off:
        _write(args.off, cplx.to_off(cx))
    if args.complex_json:
        _write(args.complex_json, io.dumps(cx.to_json()) + "\n")
    return payload, "\n".join(text), EXIT_OK if rep.is_closed_surface else EXIT_SUITE


def cmd_verify(args):
    from .verify import run_suite

    results = run_suite(args.tol, only_acceptance=args.acceptance_only)
    payload = {"checks": [{"name": r.name, "ok": r.ok, "detail": r.detail} for r in results],
               "passed": sum(r.ok for r in results), "total": len(results)}
    text = [r.line() for r in results]
    text.append(f"{payload['passed']}/{payload['total']} checks passed")
    return payload, "\n".join(text), EXIT_OK if all(r.ok for r in results) else EXIT_SUITE


COMMANDS = {
    "reconstruct": cmd_reconstruct,
    "spectrum": cmd_spectrum,
    "limit": cmd_limit,
    "blowup": cmd_blowup,
    "faces": cmd_faces,
    "euler": cmd_euler,
    "surface": cmd_surface,
    "verify": cmd_verify,
}


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        payload, text, status = COMMANDS[args.command](args)
    except io.InputError as exc:
        print(f"isospectral: bad input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericalError, ArithmeticError) as exc:
        print(f"isospectral: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"isospectral: bad input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    out = io.dumps(payload) + "\n" if args.format == "json" else text + "\n"
    try:
        _write(args.out, out)
    except OSError as exc:
        print(f"isospectral: cannot write {args.out}: {exc.strerror}", file=sys.stderr)
        return EXIT_INPUT
    return status


if __name__ == "__main__":
    sys.exit(main())
