"""Ray-cast PPM images of spatial scenes with exact per-pixel labels."""

from __future__ import annotations

import multiprocessing as mp
from dataclasses import dataclass

from gmpy2 import mpq

from .config import RenderConfig, hex_to_rgb
from .geometry import GeometryError, RegionLabel, SurfacePoint
from .realroots import RealAlgebraic, real_roots
from .scene import Camera, Scene, SceneError, in_shadow, order_surfaces

DEFAULT_CAMERA = Camera((mpq(6), mpq(0), mpq(0)), (mpq(0), mpq(0), mpq(0)),
                        (mpq(0), mpq(0), mpq(1)), mpq(40))


@dataclass
class Hit:
    kind: str            # "surface" or "plane"
    index: int
    t: RealAlgebraic


def _first_positive(dense_poly) -> RealAlgebraic | None:
    if not dense_poly or len(dense_poly) == 1:
        return None
    for r in real_roots(dense_poly):
        if r.compare(0) > 0:
            return r
    return None


class Tracer:
    """Everything needed to shade one pixel; built once per process."""

    def __init__(self, scene: Scene, config: RenderConfig):
        if scene.dimension != 3:
            raise SceneError("ray casting needs a 3-D scene")
        self.scene = scene
        self.config = config
        self.plan = order_surfaces(scene)
        self.camera = scene.camera or DEFAULT_CAMERA
        self.eye = tuple(mpq(c) for c in self.camera.eye)
        self.fwd, self.right, self.up = self.camera.basis()
        self.half = self.camera.half_extent()
        for name, p in scene.surfaces:
            if p.evaluate(self.eye) == 0:
                raise SceneError(f"camera: the eye lies on surface {name}")
        rgb = {k: hex_to_rgb(v) for k, v in config.colors.items()}
        self.rgb = rgb

    def direction(self, i: int, j: int) -> tuple:
        W, H = self.config.width, self.config.height
        aspect = mpq(W, H)
        u = (mpq(2 * i + 1, W) - 1) * self.half * aspect
        v = (1 - mpq(2 * j + 1, H)) * self.half
        return tuple(f + u * r + v * w for f, r, w in zip(self.fwd, self.right, self.up))

    def nearest(self, D) -> tuple:
        """(closest hit or None, the ray point at t = 1)."""
        E = self.eye
        T = tuple(e + d for e, d in zip(E, D))
        best = None
        for k, (_, p) in enumerate(self.scene.surfaces):
            t = _first_positive(p.restrict_dense(E, T))
            if t is not None and (best is None or t.compare(best.t) < 0):
                best = Hit("surface", k, t)
        for k, (_, p) in enumerate(self.scene.planes):
            line = p.restrict_dense(E, T) + [mpq(0), mpq(0)]
            a, b = line[0], line[1]
            if b == 0:
                continue
            t = -a / b
            if t > 0 and (best is None or best.t.compare(t) > 0):
                best = Hit("plane", k, RealAlgebraic.rational(t))
        return best, T

    def shade(self, i: int, j: int) -> tuple:
        D = self.direction(i, j)
        hit, T = self.nearest(D)
        if hit is None:
            return self.rgb["background"]
        cfg = self.config
        if hit.kind == "surface":
            X = SurfacePoint.on_ray(self.eye, T, hit.t)
            try:
                label = self.plan.classify(X, hit.index, eps=cfg.eps, budget=cfg.budget)
            except GeometryError:
                label = RegionLabel.BOUNDARY
            return self.rgb[label.value]
        plane = self.scene.planes[hit.index][1]
        t = hit.t.exact
        P = tuple(e + t * d for e, d in zip(self.eye, D))
        # the viewer sees the far side of the plane from the light
        if (plane.evaluate(self.eye) > 0) != (plane.evaluate(self.scene.light) > 0):
            return self.rgb["plane_shadow"]
        if in_shadow(self.plan.sigma, self.scene.light, P):
            return self.rgb["plane_shadow"]
        return self.rgb["plane_lit"]

    def row(self, j: int) -> bytes:
        return bytes(c for i in range(self.config.width) for c in self.shade(i, j))


_TRACER: Tracer | None = None


def _init_worker(scene, config):
    global _TRACER
    _TRACER = Tracer(scene, config)


def _row(j: int) -> tuple:
    return j, _TRACER.row(j)


def render_3d_rows(scene: Scene, config: RenderConfig | None = None) -> list:
    config = config or RenderConfig()
    workers = min(config.worker_count(), config.height)
    if workers <= 1:
        tracer = Tracer(scene, config)
        return [tracer.row(j) for j in range(config.height)]
    Tracer(scene, config)  # validate before forking
    ctx = mp.get_context("fork") if "fork" in mp.get_all_start_methods() else mp.get_context()
    rows = [b""] * config.height
    with ctx.Pool(workers, initializer=_init_worker, initargs=(scene, config)) as pool:
        for j, data in pool.imap_unordered(_row, range(config.height)):
            rows[j] = data
    return rows


def render_3d(scene: Scene, config: RenderConfig | None = None) -> bytes:
    """Binary PPM (P6) bytes; identical for any worker count."""
    config = config or RenderConfig()
    rows = render_3d_rows(scene, config)
    header = f"P6\n{config.width} {config.height}\n255\n".encode("ascii")
    return header + b"".join(rows)


def read_ppm(data: bytes) -> tuple:
    """(width, height, pixels) where pixels is a list of rows of RGB tuples."""
    parts = data.split(b"\n", 3)
    if parts[0] != b"P6":
        raise ValueError("not a binary PPM")
    w, h = (int(v) for v in parts[1].split())
    body = parts[3]
    px = [tuple(body[k:k + 3]) for k in range(0, 3 * w * h, 3)]
    return w, h, [px[r * w:(r + 1) * w] for r in range(h)]
