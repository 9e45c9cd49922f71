"""Seeded random streams, Gaussian draws, Bernoulli masks and Latin hypercube designs.

Every stream is keyed by ``(master_seed, stream_label)``.  The label is hashed
into the spawn key of a :class:`numpy.random.SeedSequence` feeding a Philox
(counter-based) bit generator, so streams do not depend on the order in which
they are requested.
"""

from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass

import numpy as np

U64_MAX = 2**64 - 1


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    stream_label: str

    def __post_init__(self):
        if not isinstance(self.master_seed, (int, np.integer)) or isinstance(self.master_seed, bool):
            raise TypeError("master_seed must be an integer")
        if not 0 <= int(self.master_seed) <= U64_MAX:
            raise ValueError("master_seed must fit in an unsigned 64-bit integer")
        object.__setattr__(self, "master_seed", int(self.master_seed))

    def child(self, label: str) -> "SeedSpec":
        """Same master seed, label extended with ``/label``."""
        return SeedSpec(self.master_seed, f"{self.stream_label}/{label}")

    def generator(self) -> np.random.Generator:
        digest = hashlib.sha256(self.stream_label.encode("utf-8")).digest()
        key = tuple(int.from_bytes(digest[i : i + 4], "little") for i in range(0, 16, 4))
        seq = np.random.SeedSequence(entropy=self.master_seed, spawn_key=key)
        return np.random.Generator(np.random.Philox(seq))

    def to_dict(self) -> dict:
        return {"master_seed": self.master_seed, "stream_label": self.stream_label}

    @classmethod
    def from_dict(cls, data: dict) -> "SeedSpec":
        return cls(int(data["master_seed"]), str(data["stream_label"]))


class Scheme(enum.Enum):
    LATIN_HYPERCUBE = "LatinHypercube"
    IID_UNIFORM = "IidUniform"


@dataclass(frozen=True, eq=False)
class Design:
    points: np.ndarray
    scheme: Scheme

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2:
            raise ValueError("design points must be an m x d matrix")
        if np.any(pts < 0.0) or np.any(pts > 1.0):
            raise ValueError("design points must lie in [0, 1]")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)


def _check_count(name, value):
    if int(value) != value or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def sample_gaussian_matrix(rows: int, cols: int, seed: SeedSpec) -> np.ndarray:
    rows, cols = _check_count("rows", rows), _check_count("cols", cols)
    return seed.generator().standard_normal((rows, cols))


def sample_uniform(m: int, d: int, seed: SeedSpec) -> Design:
    m, d = _check_count("m", m), _check_count("d", d)
    return Design(seed.generator().random((m, d)), Scheme.IID_UNIFORM)


def sample_lhs(m: int, d: int, seed: SeedSpec) -> Design:
    """Latin hypercube with random placement inside each of the ``m`` strata."""
    m, d = _check_count("m", m), _check_count("d", d)
    rng = seed.generator()
    strata = np.empty((m, d), dtype=np.int64)
    for k in range(d):
        strata[:, k] = rng.permutation(m)
    offsets = rng.random((m, d))
    points = (strata + offsets) / m
    # rounding of (j + u) / m can land a point on a neighbouring stratum
    for _ in range(4):
        cell = np.floor(points * m)
        high, low = cell > strata, cell < strata
        if not (high.any() or low.any()):
            break
        points[high] = np.nextafter(points[high], 0.0)
        points[low] = np.nextafter(points[low], 1.0)
    return Design(points, Scheme.LATIN_HYPERCUBE)


def sample_bernoulli_mask(rows: int, cols: int, p: float, seed: SeedSpec) -> np.ndarray:
    """0/1 matrix whose entries are 0 with probability ``p``."""
    rows, cols = _check_count("rows", rows), _check_count("cols", cols)
    if not 0.0 <= p < 1.0:
        raise ValueError(f"mask probability must lie in [0, 1), got {p!r}")
    u = seed.generator().random((rows, cols))
    return (u >= p).astype(float)
