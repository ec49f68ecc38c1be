"""Shot selection by forward simulation.

The imagined scene is duplicated once per candidate shot (angle, then tap
time), each copy is played out to the horizon, and the angle whose
neighbourhood scores best on average wins. Averaging over neighbouring
angles discards knife-edge successes that the imperfect model produces.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import world
from .world import BirdType, Scene, Shot

CSV_HEADER = "angle,raw_score,robust_score,pigs_killed,trace_hash"


@dataclass
class PlannerConfig:
    angle_count: int = 106
    angle_step: float = 0.01
    angle_min: float = 0.05
    tap_count: int = 5
    horizon: float = 15.0
    dt: float = 1.0 / 60.0
    window: int = 1
    # Wall-clock speed-up of the original live setup; simulated time is unaffected.
    speed_factor: float = 3.0
    tap_window: bool = False
    workers: int = 1

    def __post_init__(self):
        if self.angle_count < 1:
            raise ValueError("angle_count must be at least 1")
        if self.angle_step < 0 or self.angle_min < 0:
            raise ValueError("angles must be non-negative")
        if self.angle_min + (self.angle_count - 1) * self.angle_step > math.pi / 2 + 1e-12:
            raise ValueError("angle sweep exceeds pi/2")
        if self.window < 0:
            raise ValueError("window must be non-negative")
        if self.tap_count < 1 or self.horizon <= 0 or self.dt <= 0:
            raise ValueError("tap_count, horizon and dt must be positive")

    def angles(self) -> list[float]:
        return [self.angle_min + i * self.angle_step for i in range(self.angle_count)]


@dataclass
class SimOutcome:
    shot: Shot
    score: int
    pigs_killed: int
    destroyed: int
    trace_hash: int
    settled: bool
    steps: int
    angle_index: int = 0
    tap_index: int = 0


@dataclass
class Decision:
    chosen: Shot
    index: int
    raw_score: int
    robust_score: float
    all_outcomes: list  # best-tap SimOutcome per angle
    robust: list = field(default_factory=list)

    @property
    def raw_argmax(self) -> int:
        raw = [o.score for o in self.all_outcomes]
        return raw.index(max(raw))


def flight_time(angle: float, speed: float, g: float, height: float = 0.0) -> float:
    """Time for a drag-free point launched ``height`` above the ground to land."""
    vy = speed * math.sin(angle)
    return (vy + math.sqrt(vy * vy + 2 * g * max(height, 0.0))) / g


def build_shots(config: PlannerConfig, bird: BirdType, speed: float = world.DEFAULT_SPEED,
                g: float = -world.DEFAULT_GRAVITY[1], height: float = 0.0) -> list[Shot]:
    """Candidate shots, angle-major. Birds with an ability get ``tap_count``
    tap times spread over [0.15, 0.9] of the ballistic flight time."""
    shots = []
    for angle in config.angles():
        if not bird.has_ability:
            shots.append(Shot(angle))
            continue
        t = flight_time(angle, speed, g, height)
        lo, hi = 0.15 * t, 0.9 * t
        n = config.tap_count
        for j in range(n):
            tap = lo if n == 1 else lo + (hi - lo) * j / (n - 1)
            shots.append(Shot(angle, tap))
    return shots


def shots_for(scene: Scene, config: PlannerConfig) -> list[Shot]:
    if not scene.bird_queue:
        raise world.NoBirdsLeft("nothing to plan for")
    return build_shots(config, scene.bird_queue[0], scene.launch_speed, -scene.gravity[1],
                       scene.slingshot[1] - scene.ground.top)


def run_simulation(imagined: Scene, shot: Shot, config: PlannerConfig) -> SimOutcome:
    sim = imagined.clone()
    pigs_before = len(sim.alive_pigs)
    trace = world.play_shot(sim, shot, horizon=config.horizon, dt=config.dt)
    return SimOutcome(
        shot=shot,
        score=world.current_score(sim),
        pigs_killed=pigs_before - len(sim.alive_pigs),
        destroyed=len(trace.events.destroyed),
        trace_hash=trace.trace_hash,
        settled=trace.settled,
        steps=trace.steps,
    )


def robust_scores(scores, k: int) -> list[float]:
    """Mean of each score's neighbourhood [i - k, i + k], truncated at the ends."""
    n = len(scores)
    if n == 0:
        raise ValueError("need at least one score")
    if k < 0:
        raise ValueError("window must be non-negative")
    out = []
    for i in range(n):
        lo, hi = max(0, i - k), min(n - 1, i + k)
        window = scores[lo:hi + 1]
        out.append(math.fsum(window) / len(window))
    return out


def select(outcomes: list[SimOutcome], config: PlannerConfig) -> Decision:
    if not outcomes:
        raise ValueError("need at least one outcome")
    by_angle: dict[int, list[SimOutcome]] = {}
    for o in outcomes:
        by_angle.setdefault(o.angle_index, []).append(o)
    best = []
    for ai in sorted(by_angle):
        taps = sorted(by_angle[ai], key=lambda o: o.tap_index)
        if config.tap_window and len(taps) > 1:
            tap_scores = robust_scores([o.score for o in taps], config.window)
        else:
            tap_scores = [o.score for o in taps]
        j = max(range(len(taps)), key=lambda j: (tap_scores[j], -j))
        best.append(taps[j])
    raw = [o.score for o in best]
    robust = robust_scores(raw, config.window)
    idx = max(range(len(best)), key=lambda i: (robust[i], raw[i], -i))
    return Decision(best[idx].shot, idx, raw[idx], robust[idx], best, robust)


_worker_scene: Scene | None = None
_worker_config: PlannerConfig | None = None


def _init_worker(scene: Scene, config: PlannerConfig) -> None:
    global _worker_scene, _worker_config
    _worker_scene, _worker_config = scene, config


def _run_in_worker(shot: Shot) -> SimOutcome:
    return run_simulation(_worker_scene, shot, _worker_config)


def simulate_all(imagined: Scene, config: PlannerConfig, shots: list[Shot] | None = None) -> list[SimOutcome]:
    """Run every candidate; results come back in candidate order whatever the worker count."""
    if shots is None:
        shots = shots_for(imagined, config)
    if config.workers > 1:
        chunk = max(1, len(shots) // (4 * config.workers))
        with ProcessPoolExecutor(config.workers, initializer=_init_worker,
                                 initargs=(imagined, config)) as pool:
            outcomes = list(pool.map(_run_in_worker, shots, chunksize=chunk))
    else:
        outcomes = [run_simulation(imagined, s, config) for s in shots]
    taps_per_angle = max(1, len(shots) // config.angle_count) if len(shots) % config.angle_count == 0 else 1
    for i, o in enumerate(outcomes):
        o.angle_index, o.tap_index = divmod(i, taps_per_angle)
    return outcomes


def plan(imagined: Scene, config: PlannerConfig | None = None) -> Decision:
    config = config or PlannerConfig()
    return select(simulate_all(imagined, config), config)


def sweep_csv(decision: Decision) -> str:
    lines = [CSV_HEADER]
    for o, r in zip(decision.all_outcomes, decision.robust):
        lines.append(f"{o.shot.angle:.4f},{o.score},{r:.4f},{o.pigs_killed},{o.trace_hash:016x}")
    return "\n".join(lines) + "\n"
