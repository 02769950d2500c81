"""Turn a stream of detections into audio playback commands.

Each class label maps to a pre-recorded MP3 (``"10 Naira"`` ->
``10_Naira.mp3``). :func:`dispatch` decides which detections are announced:
only those above a confidence floor, and at most once per class within a
cooldown window. Playing the files is left to whatever consumes the
command stream.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import EmptyLabelMap, IncompleteManifest, NotMonotonic, ParseError, UnknownClass
from .formats.labelmap import LabelMap


def audio_filename(label: str) -> str:
    return label.replace(" ", "_") + ".mp3"


@dataclass(frozen=True)
class AudioManifest:
    entries: Mapping[str, Path]
    format: str = "mp3"

    def path_for(self, label: str) -> Path:
        try:
            return self.entries[label]
        except KeyError:
            raise UnknownClass(label) from None


@dataclass(frozen=True)
class DetectionEvent:
    t_ms: int
    label: str
    conf: float

    def __post_init__(self):
        if not 0.0 <= self.conf <= 1.0:
            raise ValueError(f"confidence {self.conf!r} outside [0, 1]")


@dataclass(frozen=True)
class DispatchPolicy:
    min_confidence: float = 0.5
    cooldown_ms: int = 2000

    def __post_init__(self):
        if self.cooldown_ms < 0:
            raise ValueError("cooldown must be >= 0")


@dataclass(frozen=True)
class PlaybackCommand:
    t_ms: int
    label: str
    conf: float
    path: Path


def load_manifest(directory, labels: LabelMap | Sequence[str]) -> AudioManifest:
    names = list(labels)
    if not names:
        raise EmptyLabelMap("no classes to map to audio")
    directory = Path(directory)
    entries, missing = {}, []
    for name in names:
        path = directory / audio_filename(name)
        if path.is_file():
            entries[name] = path
        else:
            missing.append(name)
    if missing:
        raise IncompleteManifest(missing)
    return AudioManifest(entries)


def dispatch(
    events: Sequence[DetectionEvent],
    manifest: AudioManifest,
    policy: DispatchPolicy = DispatchPolicy(),
) -> list[PlaybackCommand]:
    for i in range(1, len(events)):
        if events[i].t_ms < events[i - 1].t_ms:
            raise NotMonotonic(i)
    last: dict[str, int] = {}
    commands = []
    for ev in events:
        if ev.conf < policy.min_confidence:
            continue
        prev = last.get(ev.label)
        if prev is not None and ev.t_ms - prev < policy.cooldown_ms:
            continue
        commands.append(PlaybackCommand(ev.t_ms, ev.label, ev.conf, manifest.path_for(ev.label)))
        last[ev.label] = ev.t_ms
    return commands


def parse_events(text: str) -> list[DetectionEvent]:
    """Read JSON-lines events ``{"t_ms": int, "label": str, "conf": number}``."""
    events = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            t = obj["t_ms"]
            if not isinstance(t, int) or isinstance(t, bool):
                raise ValueError(f"t_ms must be an integer, got {t!r}")
            events.append(DetectionEvent(t, str(obj["label"]), float(obj["conf"])))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
            raise ParseError(str(e), lineno) from None
    return events


def write_commands(commands: Iterable[PlaybackCommand]) -> str:
    return "".join(
        json.dumps(
            {"t_ms": c.t_ms, "label": c.label, "conf": c.conf, "path": c.path.as_posix()},
            ensure_ascii=False,
        )
        + "\n"
        for c in commands
    )
