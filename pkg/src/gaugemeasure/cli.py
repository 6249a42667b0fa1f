"""Command-line front end.

Subcommands: phi, gauge, escape, tract, ml, measure, thresholds, verify.
All configuration is flags-only; outputs are written atomically (tempfile
plus rename).  Exit codes: 0 success, 1 domain/precondition error, 2 I/O
error.  CSV numbers use the shortest round-trip representation, so runs
are byte-reproducible; grid work is split over --threads (or the
GAUGEMEASURE_THREADS environment default) with fixed-order reductions.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import tempfile

import numpy as np

from . import _kernels, covering, dynamics, linearizer, logtransform, mittag, verify
from .errors import GaugeMeasureError


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get("GAUGEMEASURE_THREADS", "1")))
    except ValueError:
        return 1


def _parse_floats(text: str) -> list:
    try:
        return [float(p) for p in text.split(",") if p != ""]
    except ValueError as exc:
        raise GaugeMeasureError(f"bad numeric list {text!r}: {exc}") from None


def _parse_bbox(text: str) -> tuple:
    vals = _parse_floats(text)
    if len(vals) != 4 or vals[1] <= vals[0] or vals[3] <= vals[2]:
        raise GaugeMeasureError("bbox must be xmin,xmax,ymin,ymax with nonempty ranges")
    return tuple(vals)


def _atomic_write(path: str, data: bytes) -> None:
    d = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".gm-tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_bytes(header: list, rows: list) -> bytes:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(repr(float(v)) if isinstance(v, float) else str(v)
                              for v in row))
    return ("\n".join(lines) + "\n").encode("utf-8")


def _family_from_args(args) -> dynamics.FamilyMember:
    if args.family == "exp":
        params = linearizer.solve_fixed_points(args.lam)
        return dynamics.Exponential(params)
    if args.family == "ml":
        if args.calibrate:
            p = mittag.calibrated_params(args.rho)
        else:
            p = mittag.ml_params(args.rho, a=args.scale)
        return dynamics.ScaledMittagLeffler(p)
    raise GaugeMeasureError(f"unknown family {args.family!r}")


def _add_family_flags(sp, default_family="exp"):
    sp.add_argument("--family", choices=("exp", "ml"), default=default_family)
    sp.add_argument("--lambda", dest="lam", type=float, default=0.1,
                    help="exponential parameter in (0, 1/e)")
    sp.add_argument("--rho", type=float, default=2.0,
                    help="Mittag-Leffler growth order > 1/2")
    sp.add_argument("--scale", type=float, default=1.0,
                    help="scaling a of the Mittag-Leffler family")
    sp.add_argument("--calibrate", action="store_true",
                    help="calibrate the scaling so tracts avoid the band family")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gaugemeasure")
    ap.add_argument("--threads", type=int, default=None,
                    help="worker threads for grid scans (default: "
                         "GAUGEMEASURE_THREADS or 1)")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("phi", help="table of the linearizer inverse")
    sp.add_argument("--lambda", dest="lam", type=float, required=True)
    sp.add_argument("--xs", required=True, help="comma-separated arguments >= beta")
    sp.add_argument("--out", required=True)

    sp = sub.add_parser("gauge", help="table of the gauge h(t)")
    sp.add_argument("--lambda", dest="lam", type=float, required=True)
    sp.add_argument("--gamma", type=float, required=True)
    sp.add_argument("--ts", required=True, help="comma-separated t in (0, 1/beta]")
    sp.add_argument("--out", required=True)

    sp = sub.add_parser("escape", help="escape-classification grid as PGM")
    _add_family_flags(sp)
    sp.add_argument("--bbox", required=True)
    sp.add_argument("--res", type=int, required=True)
    sp.add_argument("--nmax", type=int, default=200)
    sp.add_argument("--bailout", type=float, default=dynamics.DEFAULT_BAILOUT)
    sp.add_argument("--out", required=True)

    sp = sub.add_parser("tract", help="tract-membership grid as PGM (and CSV)")
    _add_family_flags(sp, default_family="ml")
    sp.add_argument("--bbox", required=True)
    sp.add_argument("--res", type=int, required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--csv", default=None, help="also write per-cell CSV here")

    sp = sub.add_parser("ml", help="log-space Mittag-Leffler values")
    sp.add_argument("--rho", type=float, required=True)
    sp.add_argument("--scale", type=float, default=1.0)
    sp.add_argument("--zs", required=True,
                    help="comma-separated re:im points, e.g. 1:0,2:0.5")
    sp.add_argument("--out", required=True)

    sp = sub.add_parser("measure", help="gauged mesh-cover sums across scales")
    _add_family_flags(sp, default_family="ml")
    sp.add_argument("--gamma", type=float, required=True)
    sp.add_argument("--gauge-lambda", dest="gauge_lam", type=float, default=0.1)
    sp.add_argument("--scales", type=int, required=True,
                    help="number of scales, halving from --scale0")
    sp.add_argument("--scale0", type=float, default=0.125,
                    help="largest mesh scale; sqrt(2)*scale0 must stay in "
                         "the gauge domain (<= 1/beta)")
    sp.add_argument("--bbox", default="4,8,-2,2")
    sp.add_argument("--out", required=True)

    sp = sub.add_parser("thresholds", help="gauge-exponent thresholds")
    sp.add_argument("--rho", type=float, required=True)
    sp.add_argument("--c3", type=float, default=0.01)
    sp.add_argument("--M", type=float, default=100.0)
    sp.add_argument("--N0", type=int, default=covering.N0_IMPL)
    sp.add_argument("--lambda", dest="lam", type=float, default=0.1)
    sp.add_argument("--eps", type=float, default=0.0)
    sp.add_argument("--out", required=True)

    sp = sub.add_parser("verify", help="run module invariant suites")
    sp.add_argument("suite", nargs="?", default="all",
                    choices=("all",) + tuple(sorted(verify.SUITES)))
    return ap


def _cmd_phi(args) -> int:
    spec = linearizer.make_gauge(args.lam, gamma=1.0)
    rows = [(x, linearizer.phi(spec, x)) for x in _parse_floats(args.xs)]
    _atomic_write(args.out, _csv_bytes(["x", "phi"], rows))
    return 0


def _cmd_gauge(args) -> int:
    spec = linearizer.make_gauge(args.lam, gamma=args.gamma)
    rows = [(t, linearizer.gauge_h(spec, t)) for t in _parse_floats(args.ts)]
    _atomic_write(args.out, _csv_bytes(["t", "h"], rows))
    return 0


def _escape_pgm_bytes(codes: np.ndarray) -> bytes:
    lut = np.array([128, 0, 255], dtype=np.uint8)  # undecided, bounded, escaping
    img = lut[codes][::-1, :]
    ny, nx = codes.shape
    return f"P5\n{nx} {ny}\n255\n".encode("ascii") + img.tobytes()


def _cmd_escape(args, threads: int) -> int:
    fam = _family_from_args(args)
    bbox = _parse_bbox(args.bbox)
    codes = dynamics.escape_grid(fam, bbox, args.res, args.res,
                                 n_max=args.nmax, bailout=args.bailout,
                                 threads=threads)
    _atomic_write(args.out, _escape_pgm_bytes(codes))
    return 0


def _cmd_tract(args, threads: int) -> int:
    fam = _family_from_args(args)
    bbox = _parse_bbox(args.bbox)
    grid = logtransform.tract_scan(fam, bbox, args.res, args.res, threads=threads)
    _atomic_write(args.out, grid.to_pgm_bytes())
    if args.csv:
        grid.to_csv(args.csv)
    return 0


def _cmd_ml(args) -> int:
    p = mittag.ml_params(args.rho, a=args.scale)
    rows = []
    for part in args.zs.split(","):
        if not part:
            continue
        re_s, _, im_s = part.partition(":")
        z = complex(float(re_s), float(im_s) if im_s else 0.0)
        lv = mittag.ml_eval(p, z)
        rows.append((z.real, z.imag, lv.log_mod, lv.arg, lv.branch))
    _atomic_write(args.out, _csv_bytes(
        ["z_re", "z_im", "log_mod", "arg", "branch"], rows))
    return 0


def _cmd_measure(args, threads: int) -> int:
    fam = _family_from_args(args)
    bbox = _parse_bbox(args.bbox)
    spec = linearizer.make_gauge(args.gauge_lam, gamma=args.gamma)
    if args.scales < 4:
        raise GaugeMeasureError("need at least 4 scales")
    scales = [args.scale0 * 0.5 ** k for k in range(args.scales)]

    def mask_at_scale(s: float) -> covering.BoolGrid:
        nx = max(16, int(math.ceil((bbox[1] - bbox[0]) / (s / 4.0))))
        ny = max(16, int(math.ceil((bbox[3] - bbox[2]) / (s / 4.0))))
        grid = logtransform.tract_scan(fam, bbox, nx, ny, threads=threads)
        return covering.grid_from_tract(grid)

    series = covering.scaling_series(mask_at_scale, spec, scales)
    rows = [(r.scale, r.count, r.gauged_sum) for r in series.reports]
    body = _csv_bytes(["scale", "count", "gauged_sum"], rows)
    _atomic_write(args.out, body)
    print(f"trend (slope of log gauged sum vs log 1/scale): {series.trend!r}")
    return 0


def _cmd_thresholds(args) -> int:
    params = linearizer.solve_fixed_points(args.lam)
    lower, upper = covering.gamma_thresholds(args.rho, args.c3, args.M,
                                             args.N0, params, args.eps)
    rows = [("lower", lower), ("upper", upper),
            ("beta", params.beta), ("log_beta", math.log(params.beta))]
    _atomic_write(args.out, _csv_bytes(["name", "value"], rows))
    return 0


def _cmd_verify(args) -> int:
    results = verify.run_suite(args.suite)
    failed = 0
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} [{r.suite}] {r.name}: {r.measured}")
        failed += 0 if r.passed else 1
    print(f"{len(results) - failed}/{len(results)} checks passed "
          f"(backend: {_kernels.BACKEND})")
    return 0 if failed == 0 else 1


_LIST_FLAGS = {"--bbox", "--xs", "--ts", "--zs"}


def _preprocess_argv(argv):
    """Join list-valued flags with their argument so values may start with '-'."""
    out = []
    it = iter(argv)
    for arg in it:
        if arg in _LIST_FLAGS:
            try:
                val = next(it)
            except StopIteration:
                out.append(arg)
                break
            out.append(f"{arg}={val}")
        else:
            out.append(arg)
    return out


def main(argv=None) -> int:
    ap = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    args = ap.parse_args(_preprocess_argv(argv))
    threads = args.threads if args.threads and args.threads > 0 else _default_threads()
    try:
        if args.command == "phi":
            return _cmd_phi(args)
        if args.command == "gauge":
            return _cmd_gauge(args)
        if args.command == "escape":
            return _cmd_escape(args, threads)
        if args.command == "tract":
            return _cmd_tract(args, threads)
        if args.command == "ml":
            return _cmd_ml(args)
        if args.command == "measure":
            return _cmd_measure(args, threads)
        if args.command == "thresholds":
            return _cmd_thresholds(args)
        if args.command == "verify":
            return _cmd_verify(args)
        raise GaugeMeasureError(f"unknown command {args.command!r}")
    except GaugeMeasureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
