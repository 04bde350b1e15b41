"""Points, evaluation-result and tracking-result file formats (UTF-8 JSON)."""

from __future__ import annotations

import json

import numpy as np

from .errors import ParseError, ShapeError
from .evaluation import ExtendedJacobianBatch, PointBatch
from .system import _list, _number, loads_json
from .tracker import TrackResult


def _pairs(v) -> list:
    return [[float(c.real), float(c.imag)] for c in v]


def _complex_row(row, path: str) -> list[complex]:
    out = []
    for j, pair in enumerate(_list(row, path)):
        p = f"{path}[{j}]"
        re, im = _list(pair, p, 2)
        out.append(complex(_number(re, p + "[0]"), _number(im, p + "[1]")))
    return out


def points_from_dict(doc, n: int) -> PointBatch:
    """Read a points document for a system with ``n`` unknowns.

    Rows of length ``n + 1`` are homogeneous; rows of length ``n`` are
    affine and get ``y_h = 1`` appended.
    """
    if not isinstance(doc, dict) or "points" not in doc:
        raise ParseError("points document must be an object with a 'points' key", path="$")
    tau0 = _number(doc.get("tau0", 0.0), "$.tau0")
    rows = [_complex_row(r, f"$.points[{i}]") for i, r in enumerate(_list(doc["points"], "$.points"))]
    N = n + 1
    y = np.empty((len(rows), N), dtype=np.complex128)
    for i, r in enumerate(rows):
        if len(r) == N:
            y[i] = r
        elif len(r) == n:
            y[i, :n] = r
            y[i, n] = 1.0
        else:
            raise ShapeError(f"point {i} has {len(r)} coordinates; system expects {n} (affine) "
                             f"or {N} (homogeneous)")
    if tau0 > 0:
        raise ParseError(f"tau0 must be <= 0, got {tau0}", path="$.tau0")
    return PointBatch(y, tau0)


def parse_points(text: str, n: int) -> PointBatch:
    return points_from_dict(loads_json(text), n)


def dump_points(y, tau0: float) -> str:
    return json.dumps({"tau0": float(tau0), "points": [_pairs(r) for r in np.atleast_2d(y)]})


def dump_eval(jac: ExtendedJacobianBatch, oracle_dev: float | None = None) -> str:
    return json.dumps({
        "coords": jac.coords,
        "n": jac.n,
        "N": jac.N,
        "blocks": [[_pairs(row) for row in blk] for blk in jac.blocks],
        "oracle_max_rel_dev": oracle_dev,
    })


def parse_eval(text: str) -> tuple[ExtendedJacobianBatch, float | None]:
    doc = loads_json(text)
    n, N = doc["n"], doc["N"]
    blocks = np.array([[_complex_row(r, "$.blocks") for r in blk] for blk in doc["blocks"]],
                      dtype=np.complex128).reshape(-1, n * (N + 2))
    return ExtendedJacobianBatch(doc["coords"], blocks, n), doc.get("oracle_max_rel_dev")


def dump_track_results(results: list[TrackResult]) -> str:
    return "".join(json.dumps(r.to_dict()) + "\n" for r in results)


def parse_track_results(text: str) -> list[TrackResult]:
    return [TrackResult.from_dict(loads_json(line)) for line in text.splitlines() if line.strip()]
