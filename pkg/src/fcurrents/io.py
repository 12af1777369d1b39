"""JSON file formats for shapes, fcurrents and registration results; CSV writers.

Floats are written with ``repr`` precision by the ``json`` module, so a
write/read round trip reproduces every value exactly.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .core import FCurrent, FunctionalShape, InvalidShapeError, validate_shape, volume_dim
from .transport import DeformationPath

VERSION = 1


class FileFormatError(ValueError):
    pass


def shape_to_dict(shape: FunctionalShape) -> dict:
    return {
        "version": VERSION,
        "ambient_dim": shape.ambient_dim,
        "manifold_dim": shape.manifold_dim,
        "signal_dim": shape.signal_dim,
        "vertices": shape.vertices.tolist(),
        "cells": shape.cells.tolist(),
        "signal": shape.signal.tolist(),
    }


def _require(d, keys, kind):
    if not isinstance(d, dict):
        raise FileFormatError(f"{kind}: expected a JSON object")
    missing = [k for k in keys if k not in d]
    if missing:
        raise FileFormatError(f"{kind}: missing field(s) {', '.join(missing)}")
    if d["version"] != VERSION:
        raise FileFormatError(f"{kind}: unsupported version {d['version']!r}")


def _array(value, shape_tail, what):
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise FileFormatError(f"{what}: not a numeric array") from None
    if arr.size == 0:
        arr = arr.reshape((0,) + shape_tail)
    if arr.ndim != 2 or arr.shape[1:] != shape_tail:
        raise FileFormatError(f"{what}: expected rows of length {shape_tail[0]}")
    return arr


def shape_from_dict(d: dict) -> FunctionalShape:
    keys = ("version", "ambient_dim", "manifold_dim", "signal_dim", "vertices", "cells", "signal")
    _require(d, keys, "fshape")
    n, dd, k = int(d["ambient_dim"]), int(d["manifold_dim"]), int(d["signal_dim"])
    vertices = _array(d["vertices"], (n,), "vertices")
    signal = _array(d["signal"], (k,), "signal")
    cells = _array(d["cells"], (dd + 1,), "cells")
    if np.any(cells != np.round(cells)):
        raise FileFormatError("cells: indices must be integers")
    shape = FunctionalShape(vertices, cells.astype(np.int64), signal, dd)
    violations = validate_shape(shape)
    if violations:
        raise InvalidShapeError(violations)
    return shape


def fcurrent_to_dict(C: FCurrent) -> dict:
    return {
        "version": VERSION,
        "ambient_dim": C.ambient_dim,
        "manifold_dim": C.manifold_dim,
        "signal_dim": C.signal_dim,
        "atoms": [{"x": x, "m": m, "xi": xi}
                  for x, m, xi in zip(C.x.tolist(), C.m.tolist(), C.xi.tolist())],
    }


def fcurrent_from_dict(d: dict) -> FCurrent:
    _require(d, ("version", "ambient_dim", "manifold_dim", "signal_dim", "atoms"), "fcurrent")
    n, dd, k = int(d["ambient_dim"]), int(d["manifold_dim"]), int(d["signal_dim"])
    q = volume_dim(n, dd)
    atoms = d["atoms"]
    try:
        x = _array([a["x"] for a in atoms], (n,), "atom x")
        m = _array([a["m"] for a in atoms], (k,), "atom m")
        xi = _array([a["xi"] for a in atoms], (q,), "atom xi")
    except (KeyError, TypeError):
        raise FileFormatError("fcurrent: every atom needs x, m and xi") from None
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(m)) and np.all(np.isfinite(xi))):
        raise FileFormatError("fcurrent: non-finite atom values")
    return FCurrent(x, m, xi, dd)


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def _dump_json(obj, path):
    with open(path, "w") as fh:
        json.dump(obj, fh)
        fh.write("\n")


def read_shape(path) -> FunctionalShape:
    return shape_from_dict(_load_json(path))


def write_shape(shape: FunctionalShape, path) -> None:
    _dump_json(shape_to_dict(shape), path)


def read_fcurrent(path) -> FCurrent:
    return fcurrent_from_dict(_load_json(path))


def write_fcurrent(C: FCurrent, path) -> None:
    _dump_json(fcurrent_to_dict(C), path)


def read_any(path):
    """Read a file that holds either a shape (has ``cells``) or an fcurrent."""
    d = _load_json(path)
    if isinstance(d, dict) and "atoms" in d:
        return fcurrent_from_dict(d)
    return shape_from_dict(d)


def write_path(path_obj: DeformationPath, path) -> None:
    _dump_json(path_obj.to_dict(), path)


def read_path(path) -> DeformationPath:
    d = _load_json(path)
    if isinstance(d, dict) and "path" in d:      # a full registration result
        d = d["path"]
    try:
        return DeformationPath.from_dict(d)
    except (KeyError, TypeError, ValueError) as exc:
        raise FileFormatError(f"{path}: bad deformation path ({exc})") from None


def write_registration(result, path) -> None:
    _dump_json(result.to_dict(), path)


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in row])


def read_csv(path):
    with open(Path(path), newline="") as fh:
        return list(csv.DictReader(fh))
