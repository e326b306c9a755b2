"""Command-line surface: synth | track | eval | plot | solve."""

import argparse
import dataclasses
import sys
from pathlib import Path

from . import evaluate, sequences
from .pipeline import track_sequence
from .solver import SolverConfig, load_problem, save_problem, solve


def _cmd_synth(args):
    paths, _ = sequences.synth_sequence(args.out, n_frames=args.frames,
                                        occlude_at=args.occlude_at,
                                        noise=args.noise, seed=args.seed)
    print(f"wrote {len(paths)} frames and groundtruth_rect.txt to {args.out}")
    return 0


def _cmd_track(args):
    cfg = sequences.config_io(args.config) if args.config else sequences.build_config({})
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    source = sequences.SequenceSource(frames_dir=args.seq, gt_path=args.gt,
                                      name=Path(args.seq).name)
    frames, boxes = sequences.load_sequence(source, size=(cfg.width, cfg.height))

    record = track_sequence(frames, boxes[0], cfg)
    avg = evaluate.average_overlap(record, boxes)
    curve = evaluate.success_curve(record, boxes)

    snapshot = sequences.config_to_dict(cfg)
    snapshot["gt"] = str(args.gt)
    src_w, src_h = sequences.source_resolution(args.seq)
    snapshot["src_width"], snapshot["src_height"] = src_w, src_h
    manifest = sequences.RunManifest(
        config=snapshot,
        seed=cfg.seed,
        sequence=source.name,
        boxes=list(record.boxes),
        metrics={"average_overlap": avg, "auc": curve.auc},
    )
    manifest.save(args.out)
    print(f"tracked {len(frames)} frames: average_overlap={avg:.4f} "
          f"auc={curve.auc:.4f}")
    print(f"manifest written to {args.out}")

    if args.dump_templates:
        _dump_templates(frames, boxes, cfg, args.dump_templates)
    return 0


def _dump_templates(frames, boxes, cfg, path):
    # debugging snapshot: the template dictionaries fill both matrix slots
    from .pipeline import Tracker
    from .solver import Problem

    tracker = Tracker(cfg)
    tracker.init(frames[0], boxes[0])
    views = tuple((D, D) for D in (tracker.templates.dicts[v] for v in cfg.views))
    save_problem(Problem(views=views), path)
    print(f"template snapshot written to {path}")


def _cmd_eval(args):
    manifest = sequences.RunManifest.load(args.manifest)
    gt_path = args.gt or manifest.config.get("gt")
    if not gt_path:
        raise ValueError("no ground truth: pass --gt or track with one recorded")
    gt = sequences.load_ground_truth(gt_path)
    # manifest boxes live at working resolution; rescale gt the same way
    width = manifest.config.get("width", 320)
    height = manifest.config.get("height", 240)
    src_w = manifest.config.get("src_width", width)
    src_h = manifest.config.get("src_height", height)
    sx, sy = width / src_w, height / src_h
    gt = [(x * sx, y * sy, w * sx, h * sy) for x, y, w, h in gt]
    gt = gt[: len(manifest.boxes)]

    avg = evaluate.average_overlap(manifest.boxes, gt)
    curve = evaluate.success_curve(manifest.boxes, gt)
    out = args.curve_out or (str(args.manifest) + ".curve.csv")
    evaluate.write_curve_csv({manifest.sequence or "tracker": curve}, out)
    print(f"average_overlap={avg:.4f}")
    print(f"auc={curve.auc:.4f}")
    print(f"curve written to {out}")
    return 0


def _cmd_plot(args):
    curves = {}
    for path in args.curves:
        loaded = evaluate.read_curve_csv(path)
        if len(loaded) == 1:
            curves[Path(path).stem] = next(iter(loaded.values()))
        else:
            curves.update(loaded)
    csv_path, svg_path = evaluate.emit_plot(curves, args.out)
    print(f"wrote {csv_path} and {svg_path}")
    return 0


def _cmd_solve(args):
    problem = load_problem(args.problem)
    cfg = SolverConfig(lam=args.lam, gamma=args.gamma,
                       sigma="auto" if args.sigma == "auto" else float(args.sigma),
                       tol=args.tol, max_iter=args.max_iter)
    solution = solve(problem, cfg)
    for t, obj in enumerate(solution.objective_trace):
        print(f"iter {t:4d} objective {obj:.10g}")
    print(f"best_objective={solution.best_objective:.10g} "
          f"iterations={solution.iterations} converged={solution.converged}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="mvtrack",
                                     description="multi-view sparse tracker")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate the synthetic benchmark sequence")
    p.add_argument("--frames", type=int, default=100)
    p.add_argument("--occlude-at", type=int, default=45)
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("track", help="run the tracker over a sequence")
    p.add_argument("--seq", required=True, help="directory of raster frames")
    p.add_argument("--gt", required=True, help="ground-truth box file")
    p.add_argument("--config", default=None, help="key = value config file")
    p.add_argument("--seed", type=int, default=None, help="override config seed")
    p.add_argument("--out", required=True, help="manifest output path")
    p.add_argument("--dump-templates", default=None,
                   help="write a template snapshot after initialization")
    p.set_defaults(func=_cmd_track)

    p = sub.add_parser("eval", help="metrics from a run manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--gt", default=None)
    p.add_argument("--curve-out", default=None)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("plot", help="combine success-curve CSVs into a plot")
    p.add_argument("--curves", nargs="+", required=True)
    p.add_argument("--out", required=True, help="output path prefix")
    p.set_defaults(func=_cmd_plot)

    p = sub.add_parser("solve", help="run the solver on a saved problem file")
    p.add_argument("--problem", required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=0.1)
    p.add_argument("--gamma", type=float, default=0.25)
    p.add_argument("--sigma", default="auto")
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--max-iter", type=int, default=100)
    p.set_defaults(func=_cmd_solve)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
