"""Subcommand implementations; each writes its artifacts plus a manifest into the run directory."""

from __future__ import annotations

import hashlib
import json
import os
import platform
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig
from .elm import Dataset, surrogate_to_dict
from .experiment import dataset_from_csv, dataset_to_csv, make_datasets
from .models import ModelName, ground_truth, model_as_function
from .montecarlo import compare_reports, estimate_sobol_mc
from .rng import SeedSpec
from .sweep import SweepResult, run_sweep

LOCK_NAME = ".swelm.lock"
MANIFEST_NAME = "manifest.json"


class RunLockedError(OSError):
    pass


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


class RunDirectory:
    """Output directory holding one run: exclusive lock, tracked writes, manifest."""

    def __init__(self, path):
        self.path = Path(path)
        self.files: dict[str, str] = {}
        self.timings: dict[str, float] = {}

    @contextmanager
    def locked(self):
        self.path.mkdir(parents=True, exist_ok=True)
        lock = self.path / LOCK_NAME
        try:
            fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError as exc:
            raise RunLockedError(f"{self.path} is in use by another run (remove {lock} if stale)") from exc
        try:
            os.write(fd, str(os.getpid()).encode())
            os.close(fd)
            yield self
        finally:
            lock.unlink(missing_ok=True)

    def write(self, name: str, text: str):
        data = text.encode()
        tmp = self.path / f".{name}.tmp"
        tmp.write_bytes(data)
        os.replace(tmp, self.path / name)
        self.files[name] = _sha256(data)

    @contextmanager
    def stage(self, name: str):
        t0 = time.perf_counter()
        try:
            yield
        finally:
            self.timings[name] = time.perf_counter() - t0

    def write_manifest(self, command: str, config: RunConfig):
        manifest = {
            "command": command,
            "config": config.to_dict(),
            "software": {"swelm": __version__, "numpy": np.__version__, "python": platform.python_version()},
            "timings_s": self.timings,
            "files": {name: {"sha256": h} for name, h in sorted(self.files.items())},
        }
        data = json.dumps(manifest, indent=1, sort_keys=True)
        tmp = self.path / f".{MANIFEST_NAME}.tmp"
        tmp.write_text(data)
        os.replace(tmp, self.path / MANIFEST_NAME)


def _require_model(config: RunConfig, what: str):
    if config.model is None:
        raise ConfigError(f"{what} needs a 'model' entry in the configuration")
    return config.model


def _generate(config: RunConfig, run: RunDirectory) -> tuple[Dataset, Dataset]:
    model = _require_model(config, "dataset generation")
    with run.stage("generate"):
        train, validation = make_datasets(model, config.m, config.s, config.master_seed)
    run.write("train.csv", dataset_to_csv(train))
    run.write("validation.csv", dataset_to_csv(validation))
    return train, validation


def _load_dataset(path: str) -> Dataset:
    try:
        return dataset_from_csv(Path(path).read_text())
    except ValueError as exc:
        raise OSError(f"cannot read dataset {path}: {exc}") from exc


def _datasets(config: RunConfig, run: RunDirectory) -> tuple[Dataset, Dataset]:
    if config.train_csv or config.validation_csv:
        if not (config.train_csv and config.validation_csv):
            raise ConfigError("set both train_csv and validation_csv, or neither")
        with run.stage("load"):
            train, validation = _load_dataset(config.train_csv), _load_dataset(config.validation_csv)
        if config.model is not None and train.d != config.model.d:
            raise ConfigError(f"dataset has {train.d} inputs but the model has {config.model.d}")
        return train, validation
    if config.model is None:
        raise ConfigError("no datasets: set train_csv and validation_csv, "
                          "or give a 'model' so the data can be generated")
    return _generate(config, run)


def _gsa(config: RunConfig, run: RunDirectory) -> SweepResult:
    train, validation = _datasets(config, run)
    with run.stage("sweep"):
        result = run_sweep(train, validation, config.sweep_config)
    run.write("sweep.csv", result.to_csv())
    run.write("indices.csv", result.selected_report.to_csv())
    report = {"sweep": result.to_dict(), "indices": result.selected_report.to_dict(),
              "surrogate": surrogate_to_dict(result.selected.surrogate)}
    run.write("report.json", json.dumps(report, indent=1, sort_keys=True))
    return result


def cmd_generate(config: RunConfig) -> Path:
    run = RunDirectory(config.output_dir)
    with run.locked():
        _generate(config, run)
        run.write_manifest("generate", config)
    return run.path


def cmd_gsa(config: RunConfig) -> Path:
    run = RunDirectory(config.output_dir)
    with run.locked():
        _gsa(config, run)
        run.write_manifest("gsa", config)
    return run.path


def cmd_compare(config: RunConfig) -> Path:
    model = _require_model(config, "Monte Carlo comparison")
    if config.mc is None:
        raise ConfigError("compare needs an 'mc' entry with N")
    run = RunDirectory(config.output_dir)
    with run.locked():
        result = _gsa(config, run)
        with run.stage("mc"):
            mc = estimate_sobol_mc(model_as_function(model), model.d, config.mc.N,
                                   SeedSpec(config.master_seed, "mc"), n_bootstrap=config.mc.n_bootstrap)
        run.write("mc.csv", mc.to_csv())
        run.write("compare.csv", compare_reports(result.selected_report, mc, config.mc.n_sigma).to_csv())
        run.write_manifest("compare", config)
    return run.path


def cmd_truth(config: RunConfig) -> Path:
    model = _require_model(config, "ground truth")
    if model.name not in (ModelName.INTERACTION, ModelName.GFUNCTION):
        raise ConfigError(f"{model.name.value} has no closed form; use 'compare' for a Monte Carlo reference")
    run = RunDirectory(config.output_dir)
    with run.locked():
        truth = ground_truth(model)
        lines = ["k,S_k,S_k_tot"]
        lines += [f"{k},{s:.17g},{st:.17g}" for k, (s, st) in enumerate(zip(truth.first_order, truth.total), 1)]
        run.write("truth.csv", "\n".join(lines) + "\n")
        run.write_manifest("truth", config)
    return run.path


COMMANDS = {"generate": cmd_generate, "gsa": cmd_gsa, "compare": cmd_compare, "truth": cmd_truth}
