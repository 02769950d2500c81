from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from ..errors import DuplicateClass, EmptyLabelMap, UnknownClass

#: The seven Nigerian Naira banknote classes, in label-map order.
NAIRA_CLASSES = (
    "10 Naira",
    "20 Naira",
    "50 Naira",
    "100 Naira",
    "200 Naira",
    "500 Naira",
    "1000 Naira",
)


@dataclass(frozen=True)
class LabelMap:
    """Ordered class names; a class's id is its 0-based position."""

    classes: tuple[str, ...]
    _ids: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        classes = tuple(c.strip() for c in self.classes)
        if not classes:
            raise EmptyLabelMap("label map has no classes")
        ids = {}
        for i, name in enumerate(classes):
            if not name:
                raise ValueError(f"class {i} has an empty name")
            if name in ids:
                raise DuplicateClass(name)
            ids[name] = i
        object.__setattr__(self, "classes", classes)
        object.__setattr__(self, "_ids", ids)

    @classmethod
    def of(cls, names: Iterable[str]) -> "LabelMap":
        return cls(tuple(names))

    def __len__(self) -> int:
        return len(self.classes)

    def __iter__(self):
        return iter(self.classes)

    def __contains__(self, name) -> bool:
        return name in self._ids

    def id_of(self, name: str) -> int:
        try:
            return self._ids[name]
        except KeyError:
            raise UnknownClass(name) from None

    def name_of(self, class_id: int) -> str:
        return self.classes[class_id]


def parse_labelmap(text: str) -> LabelMap:
    names = [line.strip() for line in text.splitlines()]
    names = [n for n in names if n]
    if not names:
        raise EmptyLabelMap("label map has no classes")
    return LabelMap(tuple(names))


def write_labelmap(labels: LabelMap) -> str:
    return "".join(name + "\n" for name in labels.classes)


NAIRA_LABELS = LabelMap(NAIRA_CLASSES)
