"""Episode loops for the simulation agent and the naive baseline.

Both agents see the world only through rasterized class maps; the ground
truth scene is stepped when a shot is executed and read back for the score.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from . import perception, planner, render, world
from .perception import PerceptionError, SceneTemplate
from .planner import PlannerConfig
from .world import Scene, Shot, Status

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """Small 64-bit generator; the pig choice of the naive agent is ``next_u64() % n``."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)


@dataclass
class ShotLog:
    shot: Shot
    pre_score: int
    post_score: int
    decision_ref: str = ""


@dataclass
class EpisodeResult:
    level: str
    agent: str
    score: int
    birds_used: int
    pigs_remaining: int
    status: Status
    shots: list = field(default_factory=list)
    error: str = ""

    @property
    def failed(self) -> bool:
        return self.pigs_remaining > 0


def _execute(truth: Scene, shot: Shot, config: PlannerConfig) -> bool:
    trace = world.play_shot(truth, shot, horizon=config.horizon, dt=config.dt)
    world.clear_projectiles(truth)
    return trace.settled


def _observe(truth: Scene, width: int, height: int):
    return render.rasterize(truth, width, height)


def _episode(level: Scene, agent: str, choose, config: PlannerConfig,
             width: int, height: int) -> EpisodeResult:
    truth = level.clone()
    settled = True
    log = []
    error = ""
    birds = len(truth.bird_queue)
    while world.status(truth, settled) is Status.ONGOING:
        grid = _observe(truth, width, height)
        try:
            shot, ref = choose(grid, len(log))
        except PerceptionError as exc:
            error = str(exc)
            break
        pre = world.current_score(truth)
        settled = _execute(truth, shot, config)
        log.append(ShotLog(shot, pre, world.current_score(truth), ref))
    st = world.status(truth, settled)
    if error:
        st = Status.LOST
    return EpisodeResult(
        level=level.name,
        agent=agent,
        score=world.current_score(truth),
        birds_used=birds - len(truth.bird_queue),
        pigs_remaining=len(truth.alive_pigs),
        status=st,
        shots=log,
        error=error,
    )


def sim_agent_play(level: Scene, planner_config: PlannerConfig | None = None, seed: int = 0,
                   template: SceneTemplate | None = None, dump_dir=None,
                   width: int = render.DEFAULT_WIDTH, height: int = render.DEFAULT_HEIGHT) -> EpisodeResult:
    """Perceive, imagine, pick the most robust shot, act; repeat per bird.

    ``seed`` is accepted for symmetry with the naive agent and ignored: the
    simulation agent has no randomness.
    """
    config = planner_config or PlannerConfig()
    template = template or SceneTemplate()
    if dump_dir is not None:
        dump_dir = Path(dump_dir)
        dump_dir.mkdir(parents=True, exist_ok=True)

    def choose(grid, i):
        imagined = perception.to_scene(perception.perceive(grid), template)
        if not imagined.bird_queue:
            raise PerceptionError("no birds in view")
        decision = planner.plan(imagined, config)
        ref = ""
        if dump_dir is not None:
            stem = f"{level.name or 'level'}_shot{i}"
            render.write_classmap(grid, dump_dir / f"{stem}.pgm")
            (dump_dir / f"{stem}_sweep.csv").write_text(planner.sweep_csv(decision), encoding="utf-8")
            ref = f"{stem}_sweep.csv"
        return decision.chosen, ref

    return _episode(level, "sim", choose, config, width, height)


def naive_shot(grid, rng: SplitMix64, template: SceneTemplate) -> Shot:
    rec = perception.perceive(grid)
    pigs = [o for o in rec.objects if o.kind == "pig"]
    if not pigs:
        return Shot(math.pi / 4)
    target = pigs[rng.next_u64() % len(pigs)]
    cx, cy = target.shape.center
    sx, sy = rec.slingshot
    try:
        low, _ = world.solve_launch_angles(cx - sx, cy - sy, template.launch_speed, -template.gravity[1])
    except (world.Unreachable, world.OutOfSector):
        return Shot(math.pi / 4)
    return Shot(min(max(low, 0.0), math.pi / 2))


def naive_agent_play(level: Scene, seed: int = 0, template: SceneTemplate | None = None,
                     planner_config: PlannerConfig | None = None,
                     width: int = render.DEFAULT_WIDTH, height: int = render.DEFAULT_HEIGHT) -> EpisodeResult:
    """Random pig, direct low arc, never taps."""
    config = planner_config or PlannerConfig()
    template = template or SceneTemplate()
    rng = SplitMix64(seed)
    return _episode(level, "naive", lambda grid, i: (naive_shot(grid, rng, template), ""),
                    config, width, height)
