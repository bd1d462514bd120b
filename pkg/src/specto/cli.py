"""Command-line pipeline: analyze, train, stabilize, compare.

Exit codes: 0 success, 2 usage error, 3 input format error, 4 numerical
failure. SPECTO_THREADS caps the grid-evaluation worker count (default:
machine parallelism). Report and SVG outputs contain no timestamps or
filesystem paths, so identical flags and seeds reproduce identical bytes;
wall-clock timing is only embedded when --timing is passed.
"""

from __future__ import annotations

import argparse
import re
import sys
import time
from pathlib import Path

from . import __version__
from .containers import MatrixContainer, load_matrix_any, read_matrix_file, write_matrix_file
from .errors import FormatError, NumericalError
from .matrix import Matrix
from .pseudospectrum import (
    DEFAULT_GRID_NODES,
    DEFAULT_GRID_PAD,
    GridSpec,
    auto_grid,
    compute_field,
    extract_contours,
)
from .report import (
    AnalysisReport,
    DEFAULT_STABILITY_TOL,
    build_matrix_report,
    compare_svg,
    portrait_svg,
    serialize_report,
    write_contours_csv,
    _emit,
    _fmt_float,
)
from .rnn import TrainConfig, adding_splits, load_mnist_idx, train
from .stabilizer import StabilizerConfig, stabilize

DEFAULT_EPS_LEVELS = tuple(10.0 ** (-3 + 0.5 * k) for k in range(6))


def _parse_eps(text: str | None):
    if not text:
        return list(DEFAULT_EPS_LEVELS)
    try:
        eps = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise ValueError(f"--eps expects comma-separated floats, got {text!r}") from None
    if not eps or any(e <= 0 for e in eps) or sorted(eps) != eps or len(set(eps)) != len(eps):
        raise ValueError("--eps levels must be positive and strictly increasing")
    return eps


def _safe_name(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "-", name) or "matrix"


def _unique_names(names):
    seen: dict[str, int] = {}
    out = []
    for name in names:
        base = _safe_name(name)
        k = seen.get(base, 0)
        seen[base] = k + 1
        out.append(base if k == 0 else f"{base}-{k + 1}")
    return out


def _grid_for(m: Matrix, args) -> GridSpec:
    if args.box is not None:
        re_min, re_max, im_min, im_max = args.box
        return GridSpec(re_min, re_max, im_min, im_max, args.nx, args.ny)
    return auto_grid(m, pad=args.pad, nx=args.nx, ny=args.ny)


def _grid_flags(sub):
    sub.add_argument("--nx", type=int, default=DEFAULT_GRID_NODES, help="grid nodes, real axis")
    sub.add_argument("--ny", type=int, default=DEFAULT_GRID_NODES, help="grid nodes, imaginary axis")
    sub.add_argument("--pad", type=float, default=DEFAULT_GRID_PAD, help="padding for the automatic grid")
    sub.add_argument(
        "--box",
        type=float,
        nargs=4,
        metavar=("RE_MIN", "RE_MAX", "IM_MIN", "IM_MAX"),
        help="explicit grid bounds (overrides the automatic box)",
    )
    sub.add_argument("--eps", help="comma-separated pseudospectrum levels (default: 6 log-spaced)")
    sub.add_argument("--workers", type=int, help="grid workers (default: SPECTO_THREADS or cpu count)")
    sub.add_argument("--method", choices=("svd", "schur"), default="svd", help="sigma_min kernel")


def cmd_analyze(args) -> int:
    eps = _parse_eps(args.eps)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    loaded = [load_matrix_any(p) for p in args.inputs]
    names = _unique_names(name for _, name in loaded)
    reports = []
    for (m, _), name in zip(loaded, names):
        if not m.is_square:
            raise FormatError(f"{name}: pseudospectrum analysis needs a square matrix, got {m.shape}")
        t0 = time.perf_counter()
        grid = _grid_for(m, args)
        field = compute_field(m, grid, workers=args.workers, method=args.method)
        contours = extract_contours(field, eps)
        wall = time.perf_counter() - t0 if args.timing else None
        rep = build_matrix_report(
            name, m, field, eps, contours, stability_tol=args.stability_tol, wall_time_s=wall
        )
        write_contours_csv(out_dir / f"contours-{name}.csv", contours)
        (out_dir / f"portrait-{name}.svg").write_text(
            portrait_svg(name, field.eigenvalues, grid, contours), encoding="utf-8"
        )
        reports.append(rep)
        verdict = "stable" if rep.stable else "UNSTABLE"
        print(
            f"{name}: {m.rows}x{m.cols} rho={rep.spectral_radius:.6g} "
            f"norm={rep.spectral_norm:.6g} henrici={rep.henrici:.6g} {verdict}"
        )
    config = {
        "grid": "explicit" if args.box is not None else "auto",
        "box": list(args.box) if args.box is not None else None,
        "pad": args.pad,
        "nx": args.nx,
        "ny": args.ny,
        "eps_levels": eps,
        "method": args.method,
        "stability_tol": args.stability_tol,
        "inputs": names,
    }
    report = AnalysisReport(version=__version__, config=config, matrices=reports)
    (out_dir / "report.json").write_text(serialize_report(report), encoding="utf-8")
    return 0


def cmd_stabilize(args) -> int:
    container = None
    path = Path(args.input)
    data = path.read_bytes()
    if data[:4] == b"PSPC":
        container = read_matrix_file(path)
        m, name = container.matrix, container.name
    else:
        m, name = load_matrix_any(path)
    result = stabilize(m, StabilizerConfig(m=args.m, seed=args.seed))
    write_matrix_file(args.output, MatrixContainer.wrap(result.w_s, name))
    print(_fmt_float(result.gain_estimate))
    return 0


def cmd_compare(args) -> int:
    eps = _parse_eps(args.eps)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    before, before_name = load_matrix_any(args.before)
    after, after_name = load_matrix_any(args.after)
    if before.shape != after.shape:
        raise FormatError(
            f"dimension mismatch: {before_name} is {before.shape}, {after_name} is {after.shape}"
        )
    before_name, after_name = _unique_names([f"before-{before_name}", f"after-{after_name}"])
    if args.box is not None:
        re_min, re_max, im_min, im_max = args.box
        grid = GridSpec(re_min, re_max, im_min, im_max, args.nx, args.ny)
    else:
        ga, gb = _grid_for(before, args), _grid_for(after, args)
        grid = GridSpec(
            min(ga.re_min, gb.re_min),
            max(ga.re_max, gb.re_max),
            min(ga.im_min, gb.im_min),
            max(ga.im_max, gb.im_max),
            args.nx,
            args.ny,
        )
    fields = [
        compute_field(m, grid, workers=args.workers, method=args.method) for m in (before, after)
    ]
    contours = [extract_contours(f, eps) for f in fields]
    reports = [
        build_matrix_report(n, m, f, eps, c, stability_tol=args.stability_tol)
        for n, m, f, c in zip((before_name, after_name), (before, after), fields, contours)
    ]
    counts = [[int((f.values <= e).sum()) for e in eps] for f in fields]
    from .report import _matrix_report_to_dict

    delta = {
        "eps_levels": eps,
        "before": _matrix_report_to_dict(reports[0]),
        "after": _matrix_report_to_dict(reports[1]),
        "henrici_delta": reports[1].henrici - reports[0].henrici,
        "node_counts_before": counts[0],
        "node_counts_after": counts[1],
        "node_count_ratio": [
            (b and a / b) if b else None for a, b in zip(counts[1], counts[0])
        ],
    }
    (out_dir / "compare.json").write_text(_emit(delta, 0) + "\n", encoding="utf-8")
    svg = compare_svg(
        (before_name, fields[0].eigenvalues, contours[0]),
        (after_name, fields[1].eigenvalues, contours[1]),
        grid,
    )
    (out_dir / "compare.svg").write_text(svg, encoding="utf-8")
    print(
        f"henrici {reports[0].henrici:.6g} -> {reports[1].henrici:.6g}; "
        f"rho {reports[0].spectral_radius:.6g} -> {reports[1].spectral_radius:.6g}"
    )
    return 0


def _history_csv(history, gates) -> str:
    cols = ["epoch", "loss", "accuracy"]
    for g in gates:
        cols += [f"{g}_rho", f"{g}_henrici"]
    lines = [",".join(cols)]
    for rec in history:
        row = [str(rec.epoch), _fmt_float(rec.loss), _fmt_float(rec.accuracy)]
        for g in gates:
            rep = rec.gate_reports[g]
            row += [_fmt_float(rep.spectral_radius), _fmt_float(rep.henrici)]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def cmd_train(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    stab = StabilizerConfig(m=args.stabilize, seed=args.seed) if args.stabilize else StabilizerConfig(seed=args.seed)
    cfg = TrainConfig(
        task=args.task,
        kind=args.kind,
        hidden=args.hidden,
        batch=args.batch,
        epochs=args.epochs,
        learning_rate=args.lr,
        seed=args.seed,
        grad_clip=args.clip if args.clip > 0 else None,
        stabilize_each_epoch=args.stabilize is not None,
        stabilizer=stab,
        seq_len=args.seq_len,
        memory_bias=args.memory_bias,
        target_accuracy=args.target_accuracy,
    )
    if args.task == "adding":
        train_ds, eval_ds = adding_splits(args.train_size, args.test_size, args.seq_len, args.seed)
    else:
        needed = (args.mnist_images, args.mnist_labels)
        if any(p is None for p in needed):
            raise ValueError("--task mnist requires --mnist-images and --mnist-labels")
        full = load_mnist_idx(args.mnist_images, args.mnist_labels)
        if args.mnist_test_images and args.mnist_test_labels:
            eval_ds = load_mnist_idx(args.mnist_test_images, args.mnist_test_labels)
            train_ds = full.subset(args.train_size) if args.train_size else full
            if args.test_size:
                eval_ds = eval_ds.subset(args.test_size)
        else:
            n_train = args.train_size or (len(full) - (args.test_size or len(full) // 6))
            train_ds = full.subset(n_train)
            from .rnn import Dataset

            eval_ds = Dataset(full.inputs[n_train:], full.targets[n_train:], full.task)
            if args.test_size:
                eval_ds = eval_ds.subset(args.test_size)

    def snapshot(epoch, cell, record):
        print(
            f"epoch {record.epoch:3d} loss {record.loss:.6f} accuracy {record.accuracy:.4f}",
            flush=True,
        )
        if args.snapshot_every and epoch % args.snapshot_every == 0:
            for gate in cell.gates:
                write_matrix_file(
                    out_dir / f"weights-epoch{epoch:03d}-{gate}.pspc",
                    MatrixContainer.wrap(Matrix(cell.w_rec[gate]), f"{cfg.kind}-{gate}"),
                )
            rep = AnalysisReport(
                version=__version__,
                config={"task": cfg.task, "kind": cfg.kind, "epoch": epoch, "seed": cfg.seed},
                matrices=[
                    build_matrix_report(f"{cfg.kind}-{gate}", Matrix(cell.w_rec[gate]))
                    for gate in cell.gates
                ],
            )
            (out_dir / f"report-epoch{epoch:03d}.json").write_text(
                serialize_report(rep), encoding="utf-8"
            )

    cell, history = train(cfg, train_ds, eval_ds, on_epoch=snapshot)
    (out_dir / "history.csv").write_text(_history_csv(history, cell.gates), encoding="utf-8")
    for gate in cell.gates:
        write_matrix_file(
            out_dir / f"weights-final-{gate}.pspc",
            MatrixContainer.wrap(Matrix(cell.w_rec[gate]), f"{cfg.kind}-{gate}"),
        )
    final = history[-1]
    print(f"final accuracy {final.accuracy:.4f} after {final.epoch} epochs")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="specto",
        description="Spectral stability / robustness analysis of recurrent weight matrices.",
    )
    parser.add_argument("--version", action="version", version=f"specto {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="pseudospectrum portraits and metrics for matrix files")
    p.add_argument("inputs", nargs="+", help="matrix files (.pspc container or numeric CSV)")
    p.add_argument("--out", required=True, help="output directory")
    _grid_flags(p)
    p.add_argument("--stability-tol", type=float, default=DEFAULT_STABILITY_TOL)
    p.add_argument("--timing", action="store_true", help="embed wall time in report.json")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("train", help="train a recurrent cell and track its spectrum")
    p.add_argument("--task", choices=("adding", "mnist"), required=True)
    p.add_argument("--kind", choices=("rnn", "lstm", "gru"), default="gru")
    p.add_argument("--out", required=True)
    p.add_argument("--hidden", type=int, default=32)
    p.add_argument("--batch", type=int, default=16)
    p.add_argument("--epochs", type=int, default=30)
    p.add_argument("--lr", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--clip", type=float, default=1.0, help="gradient norm clip; 0 disables")
    p.add_argument(
        "--stabilize",
        type=int,
        nargs="?",
        const=1,
        default=None,
        metavar="M",
        help="rescale every gate matrix after each epoch (M power iterations)",
    )
    p.add_argument("--train-size", type=int, default=10000)
    p.add_argument("--test-size", type=int, default=1000)
    p.add_argument("--seq-len", type=int, default=50)
    p.add_argument("--memory-bias", type=float, default=2.0)
    p.add_argument("--target-accuracy", type=float, default=None)
    p.add_argument("--snapshot-every", type=int, default=1, help="0 disables per-epoch weight snapshots")
    p.add_argument("--mnist-images")
    p.add_argument("--mnist-labels")
    p.add_argument("--mnist-test-images")
    p.add_argument("--mnist-test-labels")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("stabilize", help="power-iteration rescale of a weight matrix")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("-m", type=int, default=1, help="power iterations")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_stabilize)

    p = sub.add_parser("compare", help="side-by-side pseudospectra of two matrices")
    p.add_argument("before")
    p.add_argument("after")
    p.add_argument("--out", required=True)
    _grid_flags(p)
    p.add_argument("--stability-tol", type=float, default=DEFAULT_STABILITY_TOL)
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"specto: input error: {exc}", file=sys.stderr)
        return 3
    except (FileNotFoundError, IsADirectoryError) as exc:
        print(f"specto: input error: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"specto: numerical failure: {exc}", file=sys.stderr)
        return 4
    except ValueError as exc:
        print(f"specto: usage error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
