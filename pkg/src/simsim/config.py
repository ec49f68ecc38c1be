"""Agent configuration files.

Same line format as level files: ``key value...`` per line, ``#`` comments.
Keys are PlannerConfig or PhysicsConfig field names, plus ``gravity gx gy``
and ``speed v`` for the assumed world.
"""

from __future__ import annotations

import dataclasses
from pathlib import Path

from .perception import SceneTemplate
from .physics import PhysicsConfig
from .planner import PlannerConfig


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


def _convert(kind, token: str, line: int):
    try:
        if kind is bool:
            if token.lower() in ("1", "true", "yes", "on"):
                return True
            if token.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(token)
        return kind(token)
    except ValueError:
        raise ConfigError(f"bad value {token!r}", line) from None


def _field_types(cls) -> dict:
    defaults = cls()
    return {f.name: type(getattr(defaults, f.name)) for f in dataclasses.fields(cls)}


def parse_config(text: str) -> tuple[PlannerConfig, SceneTemplate]:
    planner_types = _field_types(PlannerConfig)
    physics_types = _field_types(PhysicsConfig)
    planner_kw, physics_kw, template_kw = {}, {}, {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, *args = line.split()
        if key == "gravity":
            if len(args) != 2:
                raise ConfigError("gravity takes two numbers", lineno)
            template_kw["gravity"] = tuple(_convert(float, a, lineno) for a in args)
            continue
        if len(args) != 1:
            raise ConfigError(f"{key} takes one value", lineno)
        if key == "speed":
            template_kw["launch_speed"] = _convert(float, args[0], lineno)
        elif key in planner_types:
            planner_kw[key] = _convert(planner_types[key], args[0], lineno)
        elif key in physics_types:
            physics_kw[key] = _convert(physics_types[key], args[0], lineno)
        else:
            raise ConfigError(f"unknown key {key!r}", lineno)
    try:
        planner_config = PlannerConfig(**planner_kw)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    # one dt drives both the planner rollouts and the imagined physics
    if "dt" in planner_kw:
        physics_kw.setdefault("dt", planner_config.dt)
    template = SceneTemplate(physics=PhysicsConfig(**physics_kw), **template_kw)
    return planner_config, template


def load_config(path) -> tuple[PlannerConfig, SceneTemplate]:
    return parse_config(Path(path).read_text(encoding="utf-8"))
