import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from simsim import bench, world  # noqa: E402

LEVELS_DIR = bench.bundled_levels_dir()
HEADER = """gravity 0 -100
slingshot 100 60
speed 170
ground 40
"""

# criterion number -> (passed, detail); filled by test_acceptance
ACCEPTANCE: dict = {}


def level_text(body: str) -> str:
    return HEADER + body


def make_level(body: str, name: str = "") -> world.Scene:
    return world.load_level(level_text(body), name=name)


@pytest.fixture(scope="session")
def bundled_levels():
    return bench.load_levels(LEVELS_DIR)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
