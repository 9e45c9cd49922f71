"""Shared helpers for the experiment scripts."""

import argparse
import json

import numpy as np


def parser(description: str, seeds: int = 10) -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(description=description)
    ap.add_argument("--seeds", type=int, default=seeds, help="number of master seeds, starting at 0")
    ap.add_argument("--json", action="store_true", help="print a JSON summary instead of a table")
    return ap


def show(rows: list[dict], as_json: bool) -> None:
    if as_json:
        print(json.dumps(rows, indent=2, default=lambda v: np.asarray(v).tolist()))
        return
    for row in rows:
        print("  ".join(f"{k}={_fmt(v)}" for k, v in row.items()))


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.4g}"
    if isinstance(v, np.ndarray):
        return np.array2string(v, precision=3, suppress_small=True)
    return str(v)
