"""File formats: scene JSON, plain PGM/PBM masks with a JSON sidecar, atomic writes.

See ``docs/formats.md`` for the field-by-field description.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path
from typing import Any

import numpy as np

from .errors import InputError
from .geometry import Point
from .planar import Disk, HalfPlane, PlanarSet, PointRow, RasterMask, Rect, Scene

MASK_SUFFIXES = {".pgm", ".pbm"}


def _number(d: dict, key: str, where: str) -> float:
    if key not in d:
        raise InputError(f"{where}: missing field '{key}'")
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise InputError(f"{where}: field '{key}' must be a finite number")
    return float(v)


def _pair(d: dict, key: str, where: str) -> Point:
    v = d.get(key)
    if (not isinstance(v, (list, tuple)) or len(v) != 2
            or any(isinstance(c, bool) or not isinstance(c, (int, float)) for c in v)):
        raise InputError(f"{where}: field '{key}' must be a pair of numbers")
    try:
        return Point(v[0], v[1])
    except ValueError as exc:
        raise InputError(f"{where}: field '{key}': {exc}") from None


def primitive_from_dict(d: Any, where: str) -> Any:
    if not isinstance(d, dict):
        raise InputError(f"{where}: primitive must be an object")
    kind = d.get("type")
    try:
        if kind == "disk":
            return Disk(_pair(d, "center", where), _number(d, "radius", where))
        if kind == "rect":
            return Rect(_pair(d, "min", where), _pair(d, "max", where))
        if kind == "half_plane":
            return HalfPlane(_pair(d, "normal", where), _number(d, "offset", where))
        if kind == "point_row":
            count = d.get("count")
            if isinstance(count, bool) or not isinstance(count, int):
                raise InputError(f"{where}: field 'count' must be an integer")
            return PointRow(_pair(d, "start", where), _pair(d, "step", where), count,
                            _number(d, "dot_radius", where))
    except InputError:
        raise
    except ValueError as exc:
        raise InputError(f"{where}: {exc}") from None
    raise InputError(f"{where}: field 'type' must be one of disk, rect, half_plane, point_row")


def primitive_to_dict(p: Any) -> dict:
    if isinstance(p, Disk):
        return {"type": "disk", "center": p.center.as_list(), "radius": p.radius}
    if isinstance(p, Rect):
        return {"type": "rect", "min": p.min.as_list(), "max": p.max.as_list()}
    if isinstance(p, HalfPlane):
        return {"type": "half_plane", "normal": p.normal.as_list(), "offset": p.offset}
    if isinstance(p, PointRow):
        return {"type": "point_row", "start": p.start.as_list(), "step": p.step.as_list(),
                "count": p.count, "dot_radius": p.dot_radius}
    raise TypeError(f"not a primitive: {p!r}")


def rect_from_dict(d: Any, where: str) -> Rect:
    if not isinstance(d, dict):
        raise InputError(f"{where} must be an object with 'min' and 'max'")
    try:
        return Rect(_pair(d, "min", where), _pair(d, "max", where))
    except InputError:
        raise
    except ValueError as exc:
        raise InputError(f"{where}: {exc}") from None


def rect_to_dict(r: Rect) -> dict:
    return {"min": r.min.as_list(), "max": r.max.as_list()}


def scene_to_dict(scene: Scene) -> dict:
    d: dict[str, Any] = {"primitives": [primitive_to_dict(p) for p in scene.primitives]}
    if scene.subtract:
        d["subtract"] = [primitive_to_dict(p) for p in scene.subtract]
    return d


def planar_set_to_dict(s: PlanarSet) -> dict:
    if s.scene is None:
        raise TypeError("only scene-backed sets serialize to scene JSON")
    d: dict[str, Any] = {}
    if s.name:
        d["name"] = s.name
    d.update(scene_to_dict(s.scene))
    if s.window is not None:
        d["window"] = rect_to_dict(s.window)
    return d


def scene_from_dict(d: Any) -> PlanarSet:
    if not isinstance(d, dict):
        raise InputError("scene file must hold a JSON object")
    prims = d.get("primitives")
    if not isinstance(prims, list):
        raise InputError("scene: field 'primitives' must be an array")
    sub = d.get("subtract", [])
    if not isinstance(sub, list):
        raise InputError("scene: field 'subtract' must be an array")
    scene = Scene(
        tuple(primitive_from_dict(p, f"primitives[{i}]") for i, p in enumerate(prims)),
        tuple(primitive_from_dict(p, f"subtract[{i}]") for i, p in enumerate(sub)),
    )
    window = rect_from_dict(d["window"], "window") if "window" in d else None
    return PlanarSet(scene=scene, window=window, name=str(d.get("name", "")))


def _load_json(path: Path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def load_scene(path: str | os.PathLike) -> PlanarSet:
    return scene_from_dict(_load_json(Path(path)))


def _tokens(text: str) -> list[str]:
    out = []
    for line in text.splitlines():
        out.extend(line.split("#", 1)[0].split())
    return out


def read_mask_bits(path: str | os.PathLike) -> np.ndarray:
    """Parse plain P1/P2 into a bool grid with row 0 at the bottom.

    P2: a value equal to maxval is a member. P1: 1 (black) is a member.
    """
    path = Path(path)
    text = path.read_text(encoding="ascii")
    tok = _tokens(text)
    if not tok or tok[0] not in ("P1", "P2"):
        raise InputError(f"{path}: expected plain PBM (P1) or PGM (P2) header")
    magic = tok[0]
    try:
        width, height = int(tok[1]), int(tok[2])
        pos = 3
        if magic == "P2":
            maxval = int(tok[3])
            pos = 4
        if magic == "P1":
            # P1 allows digits without separators
            digits = "".join(tok[pos:])
            values = [int(ch) for ch in digits]
        else:
            values = [int(t) for t in tok[pos:]]
    except (IndexError, ValueError):
        raise InputError(f"{path}: malformed header or pixel data") from None
    if width < 1 or height < 1:
        raise InputError(f"{path}: width and height must be positive")
    if len(values) != width * height:
        raise InputError(f"{path}: expected {width * height} pixels, found {len(values)}")
    grid = np.array(values, dtype=np.int64).reshape(height, width)
    bits = grid == (maxval if magic == "P2" else 1)
    return bits[::-1].copy()


def write_mask_text(mask: RasterMask, fmt: str = "P2") -> str:
    rows = mask.bits[::-1].astype(np.uint8)
    if fmt == "P2":
        lines = ["P2", f"{mask.width} {mask.height}", "1"]
    elif fmt == "P1":
        lines = ["P1", f"{mask.width} {mask.height}"]
    else:
        raise ValueError(f"unknown mask format {fmt!r}")
    for row in rows:
        lines.append(" ".join("1" if v else "0" for v in row))
    return "\n".join(lines) + "\n"


def sidecar_path(path: str | os.PathLike) -> Path:
    return Path(path).with_suffix(".json")


def write_mask(path: str | os.PathLike, mask: RasterMask, fmt: str | None = None,
               window: Rect | None = None) -> None:
    path = Path(path)
    fmt = fmt or ("P1" if path.suffix.lower() == ".pbm" else "P2")
    sidecar: dict[str, Any] = {"origin": mask.origin.as_list(), "cell": mask.cell}
    if window is not None:
        sidecar["window"] = rect_to_dict(window)
    atomic_write_text(path, write_mask_text(mask, fmt))
    atomic_write_text(sidecar_path(path), dump_json(sidecar))


def load_mask(path: str | os.PathLike) -> PlanarSet:
    path = Path(path)
    side = sidecar_path(path)
    if not side.exists():
        raise InputError(f"{path}: missing JSON sidecar {side.name}")
    meta = _load_json(side)
    if not isinstance(meta, dict):
        raise InputError(f"{side}: sidecar must be an object")
    origin = _pair(meta, "origin", side.name)
    cell = _number(meta, "cell", side.name)
    if cell <= 0:
        raise InputError(f"{side.name}: field 'cell' must be positive")
    window = rect_from_dict(meta["window"], "window") if "window" in meta else None
    return PlanarSet(mask=RasterMask(origin, cell, read_mask_bits(path)), window=window, name=path.stem)


def load_planar_set(path: str | os.PathLike) -> PlanarSet:
    path = Path(path)
    if path.suffix.lower() in MASK_SUFFIXES:
        return load_mask(path)
    return load_scene(path)


def dump_json(obj: Any) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def atomic_write_text(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
