"""``twistfind`` command line.

Exit codes: 0 success, 1 usage or input error (including a certificate that
fails verification), 2 hypothesis not met on the explored window.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Sequence

import jsonschema

from .errors import InputError, ResolutionTooCoarse
from .geometry import Point, Tolerance
from .io import atomic_write_text, dump_json, load_planar_set, rect_from_dict, sidecar_path, write_mask
from .locator import LocatorConfig
from .planar import DEFAULT_RASTER_CAP, Rect, rasterize
from .render import LAYERS, PlotSpec, render_svg
from .search import SHAPE_TO_KIND, ShapeCertificate, find_shape, verify_certificate

EXIT_OK, EXIT_INPUT, EXIT_HYPOTHESIS = 0, 1, 2
COMMANDS = ("find", "verify", "rasterize", "plot")


@dataclass
class RasterConfig:
    h: float | None = None
    window: Rect | None = None
    cap: int = DEFAULT_RASTER_CAP


@dataclass
class RunConfig:
    command: str
    input: str
    shape: str | None = None
    area: float = 1.0
    output: str | None = None
    certificate: str | None = None
    locator: LocatorConfig = field(default_factory=LocatorConfig)
    raster: RasterConfig = field(default_factory=RasterConfig)
    tolerance: Tolerance = field(default_factory=Tolerance)
    seed: int = 0
    viewport: Rect | None = None
    hidden_layers: tuple[str, ...] = ()
    mask_format: str | None = None


def certificate_schema() -> dict:
    text = (resources.files(__package__) / "schemas" / "certificate.schema.json").read_text()
    return json.loads(text)


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # exit 2 is reserved for hypothesis failures
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="twistfind", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("input", metavar="INPUT", help="scene JSON or PGM/PBM mask")
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--out", help="output path (default: stdout)")

    p = sub.add_parser("find", help="search for a certified shape")
    common(p)
    p.add_argument("--shape", choices=sorted(SHAPE_TO_KIND))
    p.add_argument("--area", type=float)

    p = sub.add_parser("verify", help="re-verify a certificate against a set")
    common(p)
    p.add_argument("--cert", required=True, help="certificate JSON")

    p = sub.add_parser("rasterize", help="rasterize a scene into a plain PGM/PBM mask")
    common(p)
    p.add_argument("--h", type=float, help="cell side")
    p.add_argument("--window", type=float, nargs=4, metavar=("XMIN", "YMIN", "XMAX", "YMAX"))
    p.add_argument("--cap", type=int, help="maximum number of cells")
    p.add_argument("--format", choices=("P1", "P2"), dest="mask_format")

    p = sub.add_parser("plot", help="render the set (and a certificate) as SVG")
    common(p)
    p.add_argument("--cert", help="certificate JSON to overlay")
    p.add_argument("--viewport", type=float, nargs=4, metavar=("XMIN", "YMIN", "XMAX", "YMAX"))
    p.add_argument("--hide", action="append", default=[], choices=LAYERS, help="layer to omit")
    return parser


def _load_json(path: str, what: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{what} {path}: invalid JSON ({exc.msg})") from None


def _rect(values: Sequence[float], what: str) -> Rect:
    try:
        return Rect(Point(values[0], values[1]), Point(values[2], values[3]))
    except ValueError as exc:
        raise InputError(f"{what}: {exc}") from None


def load_run_config(args: argparse.Namespace) -> RunConfig:
    data: dict[str, Any] = {}
    if args.config:
        data = _load_json(args.config, "config")
        if not isinstance(data, dict):
            raise InputError("config must be a JSON object")
    cfg = RunConfig(command=args.command, input=args.input)
    cfg.shape = data.get("shape")
    cfg.area = data.get("area", 1.0)
    cfg.seed = data.get("seed", 0)
    if "locator" in data:
        cfg.locator = LocatorConfig.from_dict(data["locator"])
    if "tolerance" in data:
        try:
            cfg.tolerance = Tolerance(**data["tolerance"])
        except (TypeError, ValueError) as exc:
            raise InputError(f"tolerance: {exc}") from None
    raster = data.get("raster", {})
    if not isinstance(raster, dict):
        raise InputError("raster must be an object")
    cfg.raster = RasterConfig(
        h=raster.get("h"),
        window=rect_from_dict(raster["window"], "raster.window") if "window" in raster else None,
        cap=raster.get("cap", DEFAULT_RASTER_CAP),
    )

    cfg.output = args.out
    if getattr(args, "shape", None):
        cfg.shape = args.shape
    if getattr(args, "area", None) is not None:
        cfg.area = args.area
    cfg.certificate = getattr(args, "cert", None)
    if getattr(args, "h", None) is not None:
        cfg.raster.h = args.h
    if getattr(args, "window", None):
        cfg.raster.window = _rect(args.window, "--window")
    if getattr(args, "cap", None) is not None:
        cfg.raster.cap = args.cap
    cfg.mask_format = getattr(args, "mask_format", None)
    if getattr(args, "viewport", None):
        cfg.viewport = _rect(args.viewport, "--viewport")
    cfg.hidden_layers = tuple(getattr(args, "hide", ()) or ())

    if isinstance(cfg.area, bool) or not isinstance(cfg.area, (int, float)) or not cfg.area > 0:
        raise InputError(f"area must be a positive number, got {cfg.area!r}")
    cfg.area = float(cfg.area)
    if cfg.command == "find":
        if cfg.shape is None:
            raise InputError("find needs --shape (or 'shape' in the config)")
        if cfg.shape not in SHAPE_TO_KIND:
            raise InputError(f"shape must be one of {sorted(SHAPE_TO_KIND)}")
    return cfg


def _emit(text: str, output: str | None) -> None:
    if output:
        atomic_write_text(output, text)
    else:
        sys.stdout.write(text)


def load_certificate(path: str) -> ShapeCertificate:
    data = _load_json(path, "certificate")
    try:
        jsonschema.validate(data, certificate_schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise InputError(f"certificate schema mismatch at {where}: {exc.message}") from None
    return ShapeCertificate.from_dict(data)


def run_find(cfg: RunConfig) -> int:
    s = load_planar_set(cfg.input)
    outcome = find_shape(cfg.shape, s, cfg.area, cfg.locator, cfg.tolerance)
    if not outcome.ok:
        sys.stdout.write(dump_json(outcome.failure_dict()))
        return EXIT_HYPOTHESIS
    _emit(dump_json(outcome.certificate.to_dict()), cfg.output)
    return EXIT_OK


def run_verify(cfg: RunConfig) -> int:
    cert = load_certificate(cfg.certificate)
    s = load_planar_set(cfg.input)
    result = verify_certificate(cert, s)
    sys.stdout.write(dump_json({"ok": result.ok, "reasons": list(result.reasons)}))
    return EXIT_OK if result.ok else EXIT_INPUT


def run_rasterize(cfg: RunConfig) -> int:
    s = load_planar_set(cfg.input)
    if s.scene is None:
        raise InputError("rasterize needs a scene input")
    window = cfg.raster.window or s.window
    if window is None:
        raise InputError("rasterize needs --window or a scene window")
    if cfg.raster.h is None:
        raise InputError("rasterize needs --h (or raster.h in the config)")
    if not cfg.output:
        raise InputError("rasterize needs --out")
    if sidecar_path(cfg.output).resolve() == Path(cfg.input).resolve():
        raise InputError(f"mask sidecar {sidecar_path(cfg.output)} would overwrite the input scene")
    mask = rasterize(s.scene, window, cfg.raster.h, cfg.raster.cap)
    write_mask(cfg.output, mask, cfg.mask_format)
    summary = {"width": mask.width, "height": mask.height, "members": int(mask.bits.sum()),
               "measure": mask.measure}
    sys.stdout.write(dump_json(summary))
    return EXIT_OK


def run_plot(cfg: RunConfig, spec: PlotSpec | None = None) -> int:
    s = load_planar_set(cfg.input)
    cert = load_certificate(cfg.certificate) if cfg.certificate else None
    if spec is None:
        spec = PlotSpec(viewport=cfg.viewport, layers=frozenset(LAYERS) - set(cfg.hidden_layers))
    try:
        svg = render_svg(s, cert, spec)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    _emit(svg, cfg.output)
    return EXIT_OK


RUNNERS = {"find": run_find, "verify": run_verify, "rasterize": run_rasterize, "plot": run_plot}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_run_config(args)
        return RUNNERS[cfg.command](cfg)
    except ResolutionTooCoarse as exc:
        print(f"twistfind: ResolutionTooCoarse: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InputError, FileNotFoundError, IsADirectoryError, UnicodeDecodeError) as exc:
        print(f"twistfind: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
