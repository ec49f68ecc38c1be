"""Benchmark harness: both agents on every (level, trial), tabulated."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

from . import world
from .agents import EpisodeResult, naive_agent_play, sim_agent_play
from .perception import SceneTemplate
from .planner import PlannerConfig

AGENTS = ("naive", "sim")
CSV_FIELDS = ["level", "trial", "agent", "score", "birds_used", "pigs_remaining", "failed", "status"]


@dataclass
class BenchRow:
    level: str
    trial: int
    result: EpisodeResult

    @property
    def agent(self) -> str:
        return self.result.agent


@dataclass
class BenchReport:
    rows: list = field(default_factory=list)
    totals: dict = field(default_factory=dict)
    failures: dict = field(default_factory=dict)

    def finalize(self) -> "BenchReport":
        order = {name: i for i, name in enumerate(self.levels())}
        self.rows.sort(key=lambda r: (order[r.level], r.trial, AGENTS.index(r.agent)))
        agents = sorted({r.agent for r in self.rows}, key=AGENTS.index)
        self.totals = {a: sum(r.result.score for r in self.rows if r.agent == a) for a in agents}
        self.failures = {a: sum(r.result.failed for r in self.rows if r.agent == a) for a in agents}
        return self

    def levels(self) -> list[str]:
        seen = []
        for r in self.rows:
            if r.level not in seen:
                seen.append(r.level)
        return seen

    def trials(self) -> list[int]:
        return sorted({r.trial for r in self.rows})

    def score(self, level, trial, agent) -> int:
        for r in self.rows:
            if (r.level, r.trial, r.agent) == (level, trial, agent):
                return r.result.score
        raise KeyError((level, trial, agent))

    def average(self, level, agent) -> float:
        scores = [r.result.score for r in self.rows if r.level == level and r.agent == agent]
        return sum(scores) / len(scores)

    def improvement(self, baseline="naive", candidate="sim") -> float:
        base = self.totals[baseline]
        if base == 0:
            return 0.0 if self.totals[candidate] == 0 else float("inf")
        return (self.totals[candidate] - base) / base

    def check(self) -> None:
        """Totals and failure counts must match a recount from the rows."""
        fresh = BenchReport(list(self.rows)).finalize()
        if fresh.totals != self.totals or fresh.failures != self.failures:
            raise AssertionError("bench totals disagree with rows")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for r in self.rows:
            e = r.result
            w.writerow([r.level, r.trial, e.agent, e.score, e.birds_used, e.pigs_remaining,
                        int(e.failed), e.status.value])
        return buf.getvalue()

    def format_table(self) -> str:
        """One block per agent: levels down, trials across, plus Avg and totals."""
        trials = self.trials()
        out = []
        for agent in self.totals:
            out.append(f"{agent} agent")
            head = f"{'Level':<20}" + "".join(f"{'T' + str(t + 1):>10}" for t in trials) + f"{'Avg':>12}"
            out.append(head)
            for lv in self.levels():
                cells = "".join(f"{self.score(lv, t, agent):>10d}" for t in trials)
                out.append(f"{lv:<20}{cells}{self.average(lv, agent):>12.1f}")
            out.append(f"{'Total':<20}{self.totals[agent]:>{10 * len(trials) + 12}d}")
            out.append(f"{'Failures':<20}{self.failures[agent]:>{10 * len(trials) + 12}d}")
            out.append("")
        if "naive" in self.totals and "sim" in self.totals:
            out.append(f"Improvement: {100 * self.improvement():.1f}%")
        return "\n".join(out) + "\n"


def load_levels(directory) -> list[world.Scene]:
    paths = sorted(Path(directory).glob("*.level"))
    if not paths:
        raise FileNotFoundError(f"no .level files in {directory}")
    return [world.load_level_file(p) for p in paths]


def _safe(fn, level, agent, *args, **kwargs) -> EpisodeResult:
    try:
        return fn(level, *args, **kwargs)
    except Exception as exc:  # an aborted episode is a failed row, the bench goes on
        return EpisodeResult(level.name, agent, 0, 0, len(level.alive_pigs), world.Status.LOST, error=repr(exc))


def bench(levels, trials: int = 4, base_seed: int = 0, planner_config: PlannerConfig | None = None,
          template: SceneTemplate | None = None) -> BenchReport:
    """The simulation agent has no randomness, so it is played once per level
    and its result reused for every trial."""
    if not levels:
        raise ValueError("need at least one level")
    if trials < 1:
        raise ValueError("need at least one trial")
    config = planner_config or PlannerConfig()
    template = template or SceneTemplate()
    report = BenchReport()
    for level in levels:
        sim = _safe(sim_agent_play, level, "sim", config, 0, template)
        for t in range(trials):
            naive = _safe(naive_agent_play, level, "naive", base_seed + t, template, config)
            report.rows.append(BenchRow(level.name, t, naive))
            report.rows.append(BenchRow(level.name, t, sim))
    return report.finalize()


def bundled_levels_dir() -> Path:
    return Path(__file__).parent / "levels"


def extra_level(name: str) -> world.Scene:
    """Small purpose-built levels used by the tests and examples."""
    return world.load_level_file(bundled_levels_dir() / "extra" / f"{name}.level")
