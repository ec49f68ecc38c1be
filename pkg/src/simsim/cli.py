"""Command line entry point: play, bench, perceive, simulate, render."""

from __future__ import annotations

import argparse
import csv
import dataclasses
import sys
from pathlib import Path

import numpy as np

from . import agents, bench, perception, planner, render, world
from .config import ConfigError, load_config
from .geometry import CircleShape
from .perception import SceneTemplate
from .planner import PlannerConfig

OVERLAY_RGB = (255, 0, 255)


def _configs(path) -> tuple[PlannerConfig, SceneTemplate]:
    if path is None:
        return PlannerConfig(), SceneTemplate()
    return load_config(path)


def _write_csv(path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def cmd_play(args) -> int:
    level = world.load_level_file(args.level)
    config, template = _configs(args.config)
    if args.workers:
        config = dataclasses.replace(config, workers=args.workers)
    if args.agent == "sim":
        result = agents.sim_agent_play(level, config, args.seed, template, dump_dir=args.dump_dir)
    else:
        result = agents.naive_agent_play(level, args.seed, template, config)
    for i, s in enumerate(result.shots):
        tap = "-" if s.shot.tap_time is None else f"{s.shot.tap_time:.3f}"
        print(f"shot {i}: angle={s.shot.angle:.4f} tap={tap} score {s.pre_score} -> {s.post_score}")
    print(f"{result.level} {result.agent}: {result.status.value} score={result.score} "
          f"birds_used={result.birds_used} pigs_remaining={result.pigs_remaining}")
    if result.error:
        print(f"aborted: {result.error}", file=sys.stderr)
    return 0 if not result.failed else 1


def cmd_bench(args) -> int:
    levels = bench.load_levels(args.levels or bench.bundled_levels_dir())
    config, template = _configs(args.config)
    report = bench.bench(levels, args.trials, args.seed, config, template)
    report.check()
    if args.csv:
        Path(args.csv).write_text(report.to_csv(), encoding="utf-8")
    print(report.format_table(), end="")
    return 0


def _overlay(grid, rec) -> np.ndarray:
    """Palette image with the outline of every reconstructed shape drawn on top."""
    rgb = render.DEFAULT_PALETTE.lut()[grid.data]
    h = grid.height
    for obj in rec.objects:
        mask = np.zeros((h, grid.width), dtype=np.uint8)
        s = obj.shape
        if isinstance(s, CircleShape):
            render.paint_circle(mask, h, s.center[0], s.center[1], s.radius, 1)
        else:
            render.paint_rect(mask, h, s.center[0], s.center[1], s.half_w, s.half_h, s.angle, 1)
        inside = mask.astype(bool)
        pad = np.pad(inside, 1)
        interior = pad[:-2, 1:-1] & pad[2:, 1:-1] & pad[1:-1, :-2] & pad[1:-1, 2:]
        rgb[inside & ~interior] = OVERLAY_RGB
    return rgb


def _describe(obj) -> str:
    s = obj.shape
    if isinstance(s, CircleShape):
        geo = f"circle center=({s.center[0]:.2f},{s.center[1]:.2f}) r={s.radius:.2f}"
    else:
        geo = (f"rect center=({s.center[0]:.2f},{s.center[1]:.2f}) w={2 * s.half_w:.2f} "
               f"h={2 * s.half_h:.2f} angle_deg={np.degrees(s.angle):.2f}")
    return f"{obj.kind} {obj.material} {geo} pixels={obj.pixel_count}"


def cmd_perceive(args) -> int:
    grid = render.read_classmap(args.classmap)
    rec = perception.perceive(grid)
    lines = [f"image {rec.width}x{rec.height}",
             f"ground_y {rec.ground_y:.2f}",
             f"slingshot {rec.slingshot[0]:.2f} {rec.slingshot[1]:.2f}",
             "birds " + " ".join(b.value for b in rec.bird_queue)]
    lines += [_describe(o) for o in rec.objects]
    lines += [f"note {n}" for n in rec.notes]
    text = "\n".join(lines) + "\n"
    if args.report:
        Path(args.report).write_text(text, encoding="utf-8")
    else:
        print(text, end="")
    if args.overlay:
        rgb = _overlay(grid, rec)
        Path(args.overlay).write_bytes(b"P6\n%d %d\n255\n" % (grid.width, grid.height) + rgb.tobytes())
    return 0


def cmd_simulate(args) -> int:
    level = world.load_level_file(args.level)
    config, template = _configs(args.config)
    if args.sweep:
        scene = level
        if not args.ground_truth:
            grid = render.rasterize(level)
            scene = perception.to_scene(perception.perceive(grid), template)
        if args.workers:
            config = dataclasses.replace(config, workers=args.workers)
        decision = planner.plan(scene, config)
        text = planner.sweep_csv(decision)
        if args.csv:
            Path(args.csv).write_text(text, encoding="utf-8")
        else:
            print(text, end="")
        print(f"chosen angle={decision.chosen.angle:.4f} robust={decision.robust_score:.2f} "
              f"raw={decision.raw_score}", file=sys.stderr)
        return 0
    if args.angle is None:
        print("simulate needs --angle or --sweep", file=sys.stderr)
        return 2
    shot = world.Shot(args.angle, args.tap)
    rows = [] if args.trace else None
    trace = world.play_shot(level, shot, horizon=config.horizon, dt=config.dt, record_rows=rows)
    if args.trace:
        _write_csv(args.trace, ["step", "time", "score", "pigs_alive", "destroyed"],
                   [(i, f"{t:.6f}", s, p, d) for i, t, s, p, d in rows])
    print(f"steps={trace.steps} settled={trace.settled} score={world.current_score(level)} "
          f"pigs_alive={len(level.alive_pigs)} trace_hash={trace.trace_hash:016x}")
    return 0


def cmd_render(args) -> int:
    level = world.load_level_file(args.level)
    grid = render.rasterize(level, args.width, args.height)
    render.write_image(grid, render.DEFAULT_PALETTE, args.out)
    if args.classmap:
        render.write_classmap(grid, args.classmap)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="simsim", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    play = sub.add_parser("play", help="play one level with an agent")
    play.add_argument("level")
    play.add_argument("--agent", choices=("sim", "naive"), default="sim")
    play.add_argument("--seed", type=int, default=0)
    play.add_argument("--config")
    play.add_argument("--dump-dir")
    play.add_argument("--workers", type=int, default=0)
    play.set_defaults(func=cmd_play)

    b = sub.add_parser("bench", help="both agents on a directory of levels")
    b.add_argument("--levels", help="directory of .level files (default: bundled levels)")
    b.add_argument("--trials", type=int, default=4)
    b.add_argument("--csv")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--config")
    b.set_defaults(func=cmd_bench)

    pc = sub.add_parser("perceive", help="reconstruct objects from a class map")
    pc.add_argument("classmap")
    pc.add_argument("--overlay")
    pc.add_argument("--report")
    pc.set_defaults(func=cmd_perceive)

    sim = sub.add_parser("simulate", help="run one shot, or sweep all candidate shots")
    sim.add_argument("level")
    sim.add_argument("--angle", type=float)
    sim.add_argument("--tap", type=float)
    sim.add_argument("--trace")
    sim.add_argument("--sweep", action="store_true")
    sim.add_argument("--csv")
    sim.add_argument("--ground-truth", action="store_true",
                     help="sweep the level itself instead of its perceived copy")
    sim.add_argument("--config")
    sim.add_argument("--workers", type=int, default=0)
    sim.set_defaults(func=cmd_simulate)

    r = sub.add_parser("render", help="rasterize a level")
    r.add_argument("level")
    r.add_argument("--out", required=True)
    r.add_argument("--classmap")
    r.add_argument("--width", type=int, default=render.DEFAULT_WIDTH)
    r.add_argument("--height", type=int, default=render.DEFAULT_HEIGHT)
    r.set_defaults(func=cmd_render)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (world.LevelError, ConfigError, render.ImageFormatError, perception.PerceptionError,
            FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
