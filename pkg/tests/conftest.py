from __future__ import annotations

import sys
from pathlib import Path

import pytest
from hypothesis import settings

from detkit.formats import NAIRA_LABELS

sys.path.insert(0, str(Path(__file__).resolve().parent))

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")

FIXTURES = Path(__file__).resolve().parent / "fixtures"


@pytest.fixture
def labels():
    return NAIRA_LABELS


@pytest.fixture
def synthetic_root():
    return FIXTURES / "synthetic"


def voc_xml(objects, width=100, height=100, filename="img001.jpg", depth=3) -> bytes:
    """Minimal labelImg-style document; ``objects`` are (name, box[, difficult])."""
    parts = [
        "<annotation>",
        "  <folder>images</folder>",
        f"  <filename>{filename}</filename>",
        f"  <size><width>{width}</width><height>{height}</height><depth>{depth}</depth></size>",
    ]
    for obj in objects:
        name, box = obj[0], obj[1]
        parts.append("  <object>")
        parts.append(f"    <name>{name}</name>")
        if len(obj) > 2:
            parts.append(f"    <difficult>{obj[2]}</difficult>")
        parts.append(
            "    <bndbox><xmin>{}</xmin><ymin>{}</ymin><xmax>{}</xmax><ymax>{}</ymax></bndbox>".format(*box)
        )
        parts.append("  </object>")
    parts.append("</annotation>")
    return "\n".join(parts).encode()


# -- acceptance reporting -------------------------------------------------------

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
