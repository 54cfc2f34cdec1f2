"""Command-line front end.

Exit codes: 0 success, 1 property or consistency failure, 2 usage or
input error.
"""
import argparse
import contextlib
import csv
import io as _stdio
import logging
import math
import sys
import time
from pathlib import Path

import numpy as np

from rbtensor import bench, io, verify, video
from rbtensor.tensor import flipped_dft_sign, ht_product

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


def parse_sizes(text):
    """``"4x3x4,6x6x4"`` to ``[(4, 3, 4), (6, 6, 4)]``."""
    out = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        parts = item.lower().split("x")
        if len(parts) != 3 or not all(p.isdigit() and int(p) > 0 for p in parts):
            raise argparse.ArgumentTypeError(f"bad size {item!r}, expected N1xN2xN3")
        out.append(tuple(int(p) for p in parts))
    if not out:
        raise argparse.ArgumentTypeError("no sizes given")
    return out


def _fmt(x):
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return repr(x)
    return str(x)


def write_csv(path, header, rows):
    buf = _stdio.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(x) for x in row])
    io.atomic_write(path, buf.getvalue())


def _need_file(path, what):
    if path is None:
        raise UsageError(f"{what} path is required")
    if not Path(path).is_file():
        raise UsageError(f"{what} not found: {path}")
    return path


def _need_out(path, what="output"):
    if path is None:
        raise UsageError(f"{what} path is required")
    parent = Path(path).resolve().parent
    if not parent.is_dir():
        raise UsageError(f"directory for {what} does not exist: {parent}")
    return path


def _check_k(k, t):
    w = min(t.n1, t.n2)
    if k is None or not 1 <= k <= w:
        raise UsageError(f"--k must lie in [1, {w}] for a {t.n1}x{t.n2}x{t.n3} tensor, got {k}")


def cmd_convert(args):
    """Frame directory to RBT1 file, or RBT1 file to frame directory."""
    src = Path(args.input) if args.input else None
    if src is None or not src.exists():
        raise UsageError(f"input not found: {args.input}")
    if args.output is None:
        raise UsageError("output path is required")
    if src.is_dir():
        _need_out(args.output)
        frames = video.FrameSequence(io.read_frames(src))
        t = video.encode(frames)
        io.write_tensor(args.output, t)
        print(f"wrote {args.output}: {t.n1}x{t.n2}x{t.n3} from {frames.count} frames")
    else:
        t = io.read_tensor(src)
        frames, clamped = video.decode_counted(t)
        if clamped:
            print(f"warning: clamped {clamped} channel values", file=sys.stderr)
        io.write_frames(args.output, frames.frames)
        print(f"wrote {frames.count} frames to {args.output}")
    return EXIT_OK


def cmd_compress(args):
    _need_file(args.input, "input")
    _need_out(args.output)
    if args.report:
        _need_out(args.report, "report")
    t = io.read_tensor(args.input)
    _check_k(args.k, t)
    approx, psnrs = video.compress(t, args.k)
    io.write_tensor(args.output, approx)
    if args.report:
        write_csv(args.report, ("frame_index", "psnr_db"), enumerate(psnrs))
    print(f"rank-{args.k} approximation, relative error "
          f"{video.relative_error(t, approx):.3e}, min PSNR {min(psnrs):.2f} dB")
    return EXIT_OK


def cmd_deblur(args):
    _need_file(args.clean, "clean")
    _need_file(args.blurred, "blurred")
    target_path = args.input or args.blurred
    _need_file(target_path, "input")
    _need_out(args.output)
    if args.report:
        _need_out(args.report, "report")
    clean = io.read_tensor(args.clean)
    blurred = io.read_tensor(args.blurred)
    target = io.read_tensor(target_path)
    ref_path = args.reference or args.clean
    reference = io.read_tensor(ref_path)
    if clean.shape != blurred.shape:
        raise UsageError(f"clean {clean.shape} and blurred {blurred.shape} shapes differ")
    if target.shape[0] != clean.shape[0] or target.n3 != clean.n3:
        raise UsageError(f"input {target.shape} does not match filter geometry {clean.shape}")
    if reference.shape != target.shape:
        raise UsageError(f"reference {reference.shape} and input {target.shape} shapes differ")
    t0 = time.perf_counter()
    f = video.learn_deblur_filter(clean, blurred, args.rtol)
    recovered = video.apply_filter(f, target)
    seconds = time.perf_counter() - t0
    io.write_tensor(args.output, recovered)
    psnrs = video.psnr_frames(reference, recovered)
    psnr = float(np.mean(psnrs)) if all(np.isfinite(psnrs)) else min(psnrs)
    err = video.relative_error(reference, recovered)
    if args.report:
        write_csv(args.report, ("psnr_db", "relative_error", "wall_seconds"),
                  [(psnr, err, seconds)])
    print(f"PSNR {psnr:.2f} dB, relative error {err:.3e}, {seconds:.3f} s")
    return EXIT_OK


def cmd_metrics(args):
    _need_file(args.input, "input")
    _need_file(args.reference, "reference")
    if args.report:
        _need_out(args.report, "report")
    test = io.read_tensor(args.input)
    ref = io.read_tensor(args.reference)
    if test.shape != ref.shape:
        raise UsageError(f"shape mismatch: {test.shape} vs {ref.shape}")
    psnrs = video.psnr_frames(ref, test)
    err = video.relative_error(ref, test)
    if args.report:
        write_csv(args.report, ("frame_index", "psnr_db"), enumerate(psnrs))
    for i, p in enumerate(psnrs):
        print(f"frame {i}: {_fmt(p)} dB")
    print(f"relative error {err:.6e}")
    return EXIT_OK


def cmd_blur(args):
    _need_file(args.input, "input")
    _need_out(args.output)
    t = io.read_tensor(args.input)
    g = video.synth_blur(t.n1, t.n3, kind=args.kind, sigma=args.sigma, support=args.support,
                         length=args.length, coupling=args.coupling)
    io.write_tensor(args.output, ht_product(g, t))
    print(f"blurred {t.n1}x{t.n2}x{t.n3} tensor ({args.kind})")
    return EXIT_OK


def cmd_synth(args):
    if args.output is None:
        raise UsageError("output path is required")
    h, w, n = args.sizes[0]
    frames = video.synthetic_video(h, w, n, rank=args.rank, noise=args.noise, seed=args.seed)
    out = Path(args.output)
    if out.suffix == ".rbt":
        _need_out(out)
        io.write_tensor(out, video.encode(frames))
    else:
        io.write_frames(out, frames.frames)
    print(f"wrote synthetic {h}x{w} video with {n} frames to {out}")
    return EXIT_OK


def cmd_verify(args):
    sizes = args.sizes or list(verify.DEFAULT_SIZES)
    ctx = flipped_dft_sign() if args.inject_dft_sign_bug else contextlib.nullcontext()
    with ctx:
        outcomes = verify.run_suite(args.seed, sizes)
    summary = verify.summarize(outcomes)
    failed = [o for o in summary if not o.passed]
    for o in summary:
        mark = "PASS" if o.passed else "FAIL"
        print(f"{mark} {o.name:40s} max residual {o.residual:.3e} "
              f"(threshold {o.threshold:.0e})")
    print(f"{len(summary) - len(failed)}/{len(summary)} properties passed "
          f"(seed {args.seed}, sizes {','.join('x'.join(map(str, s)) for s in sizes)})")
    if args.report:
        write_csv(args.report, ("property", "n1", "n2", "n3", "seed", "residual", "threshold",
                                "passed"),
                  [(o.name, *o.shape, o.seed, o.residual, o.threshold, int(o.passed))
                   for o in outcomes])
    for o in failed:
        print(f"property {o.name} failed: seed {o.seed}, shape {'x'.join(map(str, o.shape))}, "
              f"residual {o.residual:.3e}", file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_bench(args):
    if args.report:
        _need_out(args.report, "report")
    sizes = args.sizes or list(bench.DEFAULT_SIZES)
    rows = bench.run_bench(sizes, args.repeats, args.seed)
    if args.report:
        write_csv(args.report, bench.COLUMNS, rows)
    for n1, n2, n3, m, s in rows:
        print(f"{n1}x{n2}x{n3} {m:18s} {s:.4f} s")
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="rbtensor",
                                description="Reduced biquaternion tensor toolkit for colour video.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=fn)
        return sp

    sp = add("convert", cmd_convert, "frame directory <-> RBT1 tensor file")
    sp.add_argument("--input", required=True)
    sp.add_argument("--output", required=True)

    sp = add("compress", cmd_compress, "rank-k approximation with per-frame PSNR")
    sp.add_argument("--input", required=True)
    sp.add_argument("--output", required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--report")

    sp = add("deblur", cmd_deblur, "learn a deblurring filter and apply it")
    sp.add_argument("--clean", required=True)
    sp.add_argument("--blurred", required=True)
    sp.add_argument("--input", help="tensor to deblur (default: --blurred)")
    sp.add_argument("--reference", help="ground truth for the metrics (default: --clean)")
    sp.add_argument("--output", required=True)
    sp.add_argument("--rtol", type=float)
    sp.add_argument("--report")

    sp = add("metrics", cmd_metrics, "PSNR per frame and relative error")
    sp.add_argument("--input", required=True)
    sp.add_argument("--reference", required=True)
    sp.add_argument("--report")

    sp = add("blur", cmd_blur, "apply a synthetic circulant blur")
    sp.add_argument("--input", required=True)
    sp.add_argument("--output", required=True)
    sp.add_argument("--kind", choices=("gaussian", "motion"), default="gaussian")
    sp.add_argument("--sigma", type=float, default=1.0)
    sp.add_argument("--support", type=int)
    sp.add_argument("--length", type=int, default=3)
    sp.add_argument("--coupling", type=float, default=0.1)

    sp = add("synth", cmd_synth, "write a synthetic low-rank test video")
    sp.add_argument("--output", required=True)
    sp.add_argument("--sizes", type=parse_sizes, default=[(16, 16, 4)],
                    help="HxWxFRAMES (first entry used)")
    sp.add_argument("--rank", type=int, default=3)
    sp.add_argument("--noise", type=int, default=0)
    sp.add_argument("--seed", type=int, default=0)

    sp = add("verify", cmd_verify, "run the algebraic property suite")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--sizes", type=parse_sizes)
    sp.add_argument("--report")
    sp.add_argument("--inject-dft-sign-bug", action="store_true", help=argparse.SUPPRESS)

    sp = add("bench", cmd_bench, "time Ht-SVD backends against the naive route")
    sp.add_argument("--sizes", type=parse_sizes)
    sp.add_argument("--repeats", type=int, default=3)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--report")
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, io.FormatError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
