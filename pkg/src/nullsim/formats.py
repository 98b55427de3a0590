"""File formats: curve CSV, signature JSON, profile CSV.

All floats are written with 17 significant digits so that every value
round-trips exactly. Files are written to a temporary name and moved into
place, so readers never observe a partial file.
"""
from __future__ import annotations

import csv
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .analysis import CartanProfile, ShapeSignature
from .curves import MIN_SAMPLES, SampledCurve
from .errors import InsufficientSamplesError, ParseError

CURVE_HEADER = ["t", "x0", "x1", "x2", "x3"]
PROFILE_HEADER = ["s", "sigma", "kappa", "tau_mag"]


def fmt(value: float) -> str:
    return format(float(value), ".17g")


def atomic_write(path, text: str):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent if str(path.parent) else ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _table(header, columns) -> str:
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def read_curve_csv(path) -> SampledCurve:
    """Parse a curve file; errors name the offending line."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ParseError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if header != CURVE_HEADER:
        raise ParseError(f"{path}:1: expected header {','.join(CURVE_HEADER)}, got {','.join(header)}")
    data = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 5:
            raise ParseError(f"{path}:{lineno}: expected 5 fields, got {len(row)}")
        try:
            vals = [float(c) for c in row]
        except ValueError:
            raise ParseError(f"{path}:{lineno}: non-numeric field in {','.join(row)!r}") from None
        if not all(np.isfinite(vals)):
            raise ParseError(f"{path}:{lineno}: non-finite value")
        if data and vals[0] <= data[-1][0]:
            raise ParseError(f"{path}:{lineno}: t must be strictly increasing")
        data.append(vals)
    if len(data) < MIN_SAMPLES:
        raise InsufficientSamplesError(f"{path}: need at least {MIN_SAMPLES} samples, got {len(data)}")
    arr = np.array(data)
    return SampledCurve(arr[:, 0], arr[:, 1:])


def write_curve_csv(path, t, x):
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    atomic_write(path, _table(CURVE_HEADER, [t, *x.T]))


def read_signature_json(path) -> ShapeSignature:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}: invalid JSON ({exc.msg})") from None
    keys = ("sigma", "kappa_tilde", "tau_tilde")
    if not isinstance(obj, dict) or any(k not in obj for k in keys):
        raise ParseError(f"{path}: signature needs keys {', '.join(keys)}")
    try:
        arrays = [np.asarray(obj[k], dtype=float) for k in keys]
    except (TypeError, ValueError):
        raise ParseError(f"{path}: signature arrays must be numeric") from None
    if any(a.ndim != 1 for a in arrays) or len({len(a) for a in arrays}) != 1:
        raise ParseError(f"{path}: signature arrays must be flat and of equal length")
    if len(arrays[0]) < 2 or np.any(np.diff(arrays[0]) <= 0):
        raise ParseError(f"{path}: sigma must be strictly increasing with at least 2 entries")
    return ShapeSignature(*arrays)


def signature_json(sig: ShapeSignature) -> str:
    def arr(a):
        return "[" + ", ".join(fmt(v) for v in a) + "]"
    return ('{"sigma": ' + arr(sig.sigma) + ', "kappa_tilde": ' + arr(sig.kappa_tilde)
            + ', "tau_tilde": ' + arr(sig.tau_tilde) + "}\n")


def write_signature_json(path, sig: ShapeSignature):
    atomic_write(path, signature_json(sig))


def write_profile_csv(path, profile: CartanProfile, sigma=None):
    sigma = profile.sigma if sigma is None else sigma
    atomic_write(path, _table(PROFILE_HEADER, [profile.s, sigma, profile.kappa, profile.tau_mag]))


def read_frame_json(path) -> np.ndarray:
    """A 4x4 frame, either a bare list of rows or ``{"frame": rows}``."""
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}: invalid JSON ({exc.msg})") from None
    if isinstance(obj, dict):
        obj = obj.get("frame")
    try:
        K = np.asarray(obj, dtype=float)
    except (TypeError, ValueError):
        raise ParseError(f"{path}: frame must be a 4x4 numeric array") from None
    if K.shape != (4, 4):
        raise ParseError(f"{path}: frame must be a 4x4 numeric array, got shape {K.shape}")
    return K
