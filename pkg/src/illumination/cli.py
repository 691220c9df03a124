"""Command line entry point: ``illum render|report|classify|animate``.

Exit status: 0 on success, 1 for invalid scenes or arguments that fail
validation, 2 for usage errors, 3 when a resource guard stopped the
computation (a partial report is still printed).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from gmpy2 import mpq

from .config import RenderConfig
from .elimination import ResourceLimitError
from .geometry import GeometryError, SurfacePoint
from .parser import ParseError, _number
from .report import PartialReport, scene_report
from .scene import Scene, SceneError, order_surfaces, parse_scene

EXIT_INVALID = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3


class UsageError(Exception):
    pass


def _rational(text: str) -> mpq:
    text = text.strip()
    neg = text.startswith("-")
    body = text[1:] if neg else text
    try:
        if "/" in body:
            a, b = body.split("/")
            v = mpq(int(a), int(b))
        else:
            v = _number(body)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a rational number: {text!r}") from None
    return -v if neg else v


def _point(text: str) -> tuple:
    return tuple(_rational(t) for t in text.split(","))


def _config(args) -> RenderConfig:
    kw = {}
    for key in ("width", "height", "threads"):
        v = getattr(args, key, None)
        if v is not None:
            kw[key] = v
    if getattr(args, "samples", None) is not None:
        kw["samples_per_arc"] = args.samples
    return RenderConfig(**kw)


def _load(path: str) -> Scene:
    return parse_scene(Path(path))


def _apply_scene_defaults(scene: Scene, args) -> None:
    if scene.image is not None:
        if getattr(args, "width", None) is None:
            args.width = scene.image[0]
        if getattr(args, "height", None) is None:
            args.height = scene.image[1]
    if scene.samples is not None and getattr(args, "samples", None) is None:
        args.samples = scene.samples


def _render_bytes(scene: Scene, config: RenderConfig) -> tuple:
    if scene.dimension == 2:
        from .render2d import render_2d
        return render_2d(scene, config).encode("utf-8"), ".svg"
    from .render3d import render_3d
    return render_3d(scene, config), ".ppm"


def cmd_render(args) -> int:
    scene = _load(args.scene)
    _apply_scene_defaults(scene, args)
    data, ext = _render_bytes(scene, _config(args))
    out = Path(args.out) if args.out else Path(args.scene).with_suffix(ext)
    out.write_bytes(data)
    print(out)
    return 0


def cmd_report(args) -> int:
    scene = _load(args.scene)
    try:
        text = scene_report(scene, Path(args.scene).name, backend=args.backend, timings=args.timings)
    except PartialReport as exc:
        _emit(exc.text, args.out)
        print(f"illum: resource limit reached: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    _emit(text, args.out)
    return 0


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_classify(args) -> int:
    scene = _load(args.scene)
    P = _point(args.point)
    if len(P) != scene.dimension:
        raise UsageError(f"--point needs {scene.dimension} coordinates")
    plan = order_surfaces(scene)
    index = None
    for k, (name, p) in enumerate(scene.surfaces):
        if p.evaluate(P) == 0:
            index = k
            break
    if index is None:
        raise SceneError("the point does not lie on any surface of the scene")
    X = SurfacePoint.at(P)
    label = plan.classify(X, index)
    print(label.value)
    return 0


def cmd_animate(args) -> int:
    scene = _load(args.scene)
    _apply_scene_defaults(scene, args)
    try:
        a, b = args.light_path.split(":")
    except ValueError:
        raise UsageError("--light-path must look like x0,y0[,z0]:x1,y1[,z1]") from None
    A, B = _point(a), _point(b)
    if len(A) != scene.dimension or len(B) != scene.dimension:
        raise UsageError(f"--light-path end points need {scene.dimension} coordinates")
    if args.frames < 1:
        raise UsageError("--frames must be at least 1")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    config = _config(args)
    n = args.frames
    for k in range(n):
        s = mpq(k, n - 1) if n > 1 else mpq(0)
        light = tuple(p + s * (q - p) for p, q in zip(A, B))
        frame = scene.with_light(light)
        data, ext = _render_bytes(frame, config)
        path = out_dir / f"frame_{k:04d}{ext}"
        path.write_bytes(data)
        print(path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="illum", description="Exact illumination of algebraic scenes.")
    sub = ap.add_subparsers(dest="command", required=True)

    def image_opts(p):
        p.add_argument("--width", type=int)
        p.add_argument("--height", type=int)
        p.add_argument("--samples", type=int, help="polyline samples per arc (plane scenes)")
        p.add_argument("--threads", type=int, help="worker processes (default: ILLUM_THREADS or CPU count)")

    r = sub.add_parser("render", help="write an SVG (plane) or PPM (space) image")
    r.add_argument("scene")
    r.add_argument("-o", "--out")
    image_opts(r)
    r.set_defaults(func=cmd_render)

    p = sub.add_parser("report", help="print a key = value analysis")
    p.add_argument("scene")
    p.add_argument("-o", "--out")
    p.add_argument("--backend", choices=["auto", "groebner", "resultant"], default="auto")
    p.add_argument("--timings", action="store_true", help="append wall-clock timings")
    p.set_defaults(func=cmd_report)

    c = sub.add_parser("classify", help="label one point of the surface")
    c.add_argument("scene")
    c.add_argument("--point", required=True, help="comma-separated rationals, e.g. 0,1 or 1/2,0,3")
    c.set_defaults(func=cmd_classify)

    a = sub.add_parser("animate", help="render frames along a straight light path")
    a.add_argument("scene")
    a.add_argument("--light-path", required=True)
    a.add_argument("--frames", type=int, required=True)
    a.add_argument("--out-dir", required=True)
    image_opts(a)
    a.set_defaults(func=cmd_animate)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (ParseError, SceneError, GeometryError, ValueError) as exc:
        print(f"illum: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ResourceLimitError as exc:
        print(f"illum: resource limit reached: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except OSError as exc:
        print(f"illum: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
