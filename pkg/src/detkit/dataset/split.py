from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

_U64 = (1 << 64) - 1


def keyed_rng(seed: int, *key: int | str) -> np.random.Generator:
    """Independent generator for ``(seed, *key)``.

    String key parts are hashed, so each image gets its own stream and
    adding an image never perturbs another image's draws.
    """
    words = [seed & _U64]
    for part in key:
        if isinstance(part, str):
            digest = hashlib.blake2b(part.encode("utf-8"), digest_size=16).digest()
            words.extend(int.from_bytes(digest[i : i + 8], "little") for i in (0, 8))
        else:
            words.append(part & _U64)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(words)))


@dataclass(frozen=True)
class SplitSpec:
    train: float = 0.8
    val: float = 0.1
    test: float = 0.1
    seed: int = 0

    def __post_init__(self):
        ratios = (self.train, self.val, self.test)
        if any(r < 0 or not math.isfinite(r) for r in ratios):
            raise ValueError(f"split ratios must be non-negative, got {ratios}")
        if abs(sum(ratios) - 1.0) > 1e-9:
            raise ValueError(f"split ratios must sum to 1, got {sum(ratios)}")
        if not 0 <= self.seed <= _U64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def apportion(n: int, ratios: Sequence[float]) -> list[int]:
    """Largest-remainder apportionment of ``n`` items; ties favour earlier parts."""
    # decimal reading of each ratio, so 0.1 means exactly 1/10
    exact = [Fraction(repr(float(r))) for r in ratios]
    total = sum(exact)
    quotas = [n * r / total for r in exact]
    sizes = [math.floor(q) for q in quotas]
    by_remainder = sorted(range(len(quotas)), key=lambda i: (-(quotas[i] - sizes[i]), i))
    for i in by_remainder[: n - sum(sizes)]:
        sizes[i] += 1
    return sizes


def split_dataset(image_ids: Sequence[str], spec: SplitSpec) -> tuple[list[str], list[str], list[str]]:
    ids = sorted(image_ids)
    if not ids:
        raise ValueError("nothing to split")
    if len(set(ids)) != len(ids):
        raise ValueError("image ids must be unique")
    order = keyed_rng(spec.seed, "split").permutation(len(ids))
    shuffled = [ids[i] for i in order]
    n_train, n_val, _ = apportion(len(ids), (spec.train, spec.val, spec.test))
    return (
        shuffled[:n_train],
        shuffled[n_train : n_train + n_val],
        shuffled[n_train + n_val :],
    )
