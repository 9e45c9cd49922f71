"""Glue: datasets from models, and one-call sweeps used by the CLI and scripts."""

from __future__ import annotations

import csv
import io

import numpy as np

from .elm import Dataset
from .models import ModelSpec, model_as_function
from .rng import SeedSpec, sample_lhs
from .sweep import SweepConfig, SweepResult, run_sweep


def make_dataset(spec: ModelSpec, m: int, seed: SeedSpec) -> Dataset:
    X = sample_lhs(m, spec.d, seed).points
    return Dataset(X, model_as_function(spec)(X))


def make_datasets(spec: ModelSpec, m: int, s: int, master_seed: int) -> tuple[Dataset, Dataset]:
    """Training and validation sets from independent LHS streams."""
    train = make_dataset(spec, m, SeedSpec(master_seed, "lhs-train"))
    validation = make_dataset(spec, s, SeedSpec(master_seed, "lhs-validation"))
    return train, validation


def sweep_model(spec: ModelSpec, m: int, s: int, n: int, master_seed: int, **sweep_options) -> SweepResult:
    train, validation = make_datasets(spec, m, s, master_seed)
    config = SweepConfig(n=n, seed=SeedSpec(master_seed, "sweep"), **sweep_options)
    return run_sweep(train, validation, config)


def dataset_to_csv(data: Dataset) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"x{k}" for k in range(1, data.d + 1)] + ["y"])
    for x, y in zip(data.inputs, data.outputs):
        w.writerow([f"{v:.17g}" for v in x] + [f"{y:.17g}"])
    return buf.getvalue()


def dataset_from_csv(text: str) -> Dataset:
    """Inverse of :func:`dataset_to_csv`; the last column is the output."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or not rows[0] or rows[0][-1] != "y":
        raise ValueError("dataset CSV needs a header ending in 'y'")
    width = len(rows[0])
    body = [r for r in rows[1:] if r]
    if not body:
        raise ValueError("dataset CSV has no data rows")
    if any(len(r) != width for r in body):
        raise ValueError("dataset CSV rows have inconsistent column counts")
    table = np.array(body, dtype=float)
    return Dataset(table[:, :-1], table[:, -1])
