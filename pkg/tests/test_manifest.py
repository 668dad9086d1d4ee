"""The pinned requirements file agrees with pyproject.toml."""

import re
import tomllib
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def _name(requirement):
    return re.split(r"[<>=!~ ]", requirement, maxsplit=1)[0].strip().lower()


def _pinned_sections():
    sections = {"runtime": set(), "testing": set()}
    current = "runtime"
    for line in (ROOT / "requirements.txt").read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line.lower() == "# testing":
            current = "testing"
        elif line and not line.startswith("#"):
            sections[current].add(_name(line))
    return sections


class TestRequirements:
    def test_runtime_pins_match_dependencies(self):
        project = tomllib.loads((ROOT / "pyproject.toml").read_text(encoding="utf-8"))["project"]
        assert _pinned_sections()["runtime"] == {_name(r) for r in project["dependencies"]}

    def test_testing_pins_match_test_extra(self):
        project = tomllib.loads((ROOT / "pyproject.toml").read_text(encoding="utf-8"))["project"]
        extra = {_name(r) for r in project["optional-dependencies"]["test"]}
        assert _pinned_sections()["testing"] == extra
        assert "scipy" not in _pinned_sections()["runtime"]
