"""Scene model, scene-file parsing, product surfaces and receiver-plane shadows."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from gmpy2 import mpq

from .geometry import (DEFAULT_BUDGET, DEFAULT_EPS, GeometryError, RegionLabel, ShadowResult,
                       classify_point, first_polar, is_singular_at, shadow_test)
from .parser import ParseError, _number, parse_with_factors
from .poly import MultiPoly, QQ, product

PLANE_VARS = ("x", "y")
SPACE_VARS = ("x", "y", "z")
CAMERA_DENOMINATOR = 10 ** 6


class SceneError(ValueError):
    """A scene violates a validity rule; the message names the directive."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


def rationalize(value: float | mpq, max_den: int = CAMERA_DENOMINATOR) -> mpq:
    f = Fraction(value.numerator, value.denominator) if isinstance(value, type(mpq(0))) \
        else Fraction(value)
    f = f.limit_denominator(max_den)
    return mpq(f.numerator, f.denominator)


@dataclass(frozen=True)
class Camera:
    eye: tuple
    lookat: tuple
    up: tuple
    fov: mpq

    def basis(self) -> tuple:
        """Rational approximately orthonormal (forward, right, up) vectors.

        Each vector is normalised in floating point and then rounded to a
        rational with denominator at most 10^6, so rays stay exact.
        """
        fwd = [b - a for a, b in zip(self.eye, self.lookat)]
        right = _cross(fwd, self.up)
        up = _cross(right, fwd)
        return tuple(tuple(rationalize(c) for c in _unit(v)) for v in (fwd, right, up))

    def half_extent(self) -> mpq:
        return rationalize(math.tan(math.radians(float(self.fov)) / 2))


def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _unit(v):
    n = math.sqrt(sum(float(c) ** 2 for c in v))
    return [float(c) / n for c in v]


@dataclass
class Scene:
    dimension: int
    surfaces: list            # (name, MultiPoly)
    light: tuple
    planes: list = field(default_factory=list)
    order: list | None = None  # surface indices, closest to the light first
    camera: Camera | None = None
    view: tuple | None = None  # (xmin, xmax, ymin, ymax) for plane scenes
    image: tuple | None = None
    samples: int | None = None
    factor_hints: list = field(default_factory=list)  # per surface: list of factors

    @property
    def ring(self) -> tuple:
        return PLANE_VARS if self.dimension == 2 else SPACE_VARS

    def surface(self, name: str) -> MultiPoly:
        for n, p in self.surfaces:
            if n == name:
                return p
        raise KeyError(name)

    def plane(self, name: str) -> MultiPoly:
        for n, p in self.planes:
            if n == name:
                return p
        raise KeyError(name)

    def factors(self) -> list:
        """Non-constant factors whose product is the product surface."""
        out = []
        for (_, p), hints in zip(self.surfaces, self.factor_hints or [[p] for _, p in self.surfaces]):
            out.extend(hints)
        return out

    def with_light(self, light) -> "Scene":
        s = Scene(**{k: getattr(self, k) for k in self.__dataclass_fields__})
        s.light = tuple(QQ(c) for c in light)
        validate_scene(s)
        return s


def product_polynomial(scene: Scene) -> MultiPoly:
    """Expanded product of all surfaces (receiver planes excluded)."""
    return product([p for _, p in scene.surfaces], scene.ring)


# -- file format ---------------------------------------------------------------------------------


def _numbers(tokens, line, what) -> list:
    out = []
    for tok in tokens:
        try:
            out.append(_parse_number(tok))
        except ValueError:
            raise SceneError(f"{what}: {tok!r} is not a rational number", line) from None
    return out


def _parse_number(tok: str) -> mpq:
    s = tok.strip()
    sign = 1
    if s.startswith(("-", "+")):
        sign = -1 if s[0] == "-" else 1
        s = s[1:]
    if "/" in s:
        a, b = s.split("/", 1)
        if not a.isdigit() or not b.isdigit() or int(b) == 0:
            raise ValueError(tok)
        return sign * mpq(int(a), int(b))
    if not s or not all(ch.isdigit() or ch == "." for ch in s) or s.count(".") > 1 or s == ".":
        raise ValueError(tok)
    return sign * _number(s)


def parse_scene(source) -> Scene:
    """Parse a scene from a path or from the text itself."""
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source
                                    and Path(source).exists()):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source
    lines = []
    for no, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        if body.strip():
            lines.append((no, body))
    dims = [(no, b) for no, b in lines if b.split()[0] == "dim"]
    if not dims:
        raise SceneError("missing 'dim' directive")
    if len(dims) > 1:
        raise SceneError("duplicate 'dim' directive", dims[1][0])
    no, b = dims[0]
    parts = b.split()
    if len(parts) != 2 or parts[1] not in ("2", "3"):
        raise SceneError("'dim' must be 2 or 3", no)
    dim = int(parts[1])
    ring = PLANE_VARS if dim == 2 else SPACE_VARS
    surfaces, hints, planes = [], [], []
    light = order_names = camera = view = image = samples = None
    order_line = None
    for no, body in lines:
        word = body.split()[0]
        rest = body.strip()[len(word):]
        if word == "dim":
            continue
        if word in ("surface", "plane"):
            if ":" not in rest:
                raise SceneError(f"'{word}' needs 'NAME: expression'", no)
            name, expr = rest.split(":", 1)
            name = name.strip()
            if not name or len(name.split()) != 1:
                raise SceneError(f"'{word}' needs a single-word name", no)
            if name in [n for n, _ in surfaces + planes]:
                raise SceneError(f"duplicate name {name!r}", no)
            col = body.index(":") + 2 + (len(expr) - len(expr.lstrip()))
            try:
                poly, factors = parse_with_factors(expr.strip(), ring, line=no, column=col)
            except ParseError as exc:
                raise SceneError(f"{word} {name}: {exc.message} (column {exc.column})", no) from None
            if poly.is_constant():
                raise SceneError(f"{word} {name}: constant polynomial", no)
            if word == "surface":
                surfaces.append((name, poly))
                hints.append(factors)
            else:
                if dim != 3:
                    raise SceneError("receiver planes are only allowed in 3-D scenes", no)
                if poly.degree != 1:
                    raise SceneError(f"plane {name}: degree must be exactly 1", no)
                planes.append((name, poly))
        elif word == "light":
            vals = _numbers(rest.split(), no, "light")
            if len(vals) != dim:
                raise SceneError(f"light needs {dim} coordinates", no)
            light = tuple(vals)
        elif word == "order":
            order_names = rest.split()
            order_line = no
        elif word == "camera":
            if dim != 3:
                raise SceneError("camera is only allowed in 3-D scenes", no)
            camera = _parse_camera(rest.split(), no)
        elif word == "view":
            vals = _numbers(rest.split(), no, "view")
            if len(vals) != 4 or not (vals[0] < vals[1] and vals[2] < vals[3]):
                raise SceneError("view needs xmin xmax ymin ymax with min < max", no)
            view = tuple(vals)
        elif word == "image":
            vals = rest.split()
            if len(vals) != 2 or not all(v.isdigit() for v in vals):
                raise SceneError("image needs integer width and height", no)
            image = (int(vals[0]), int(vals[1]))
        elif word == "samples":
            vals = rest.split()
            if len(vals) != 1 or not vals[0].isdigit():
                raise SceneError("samples needs one integer", no)
            samples = int(vals[0])
        else:
            raise SceneError(f"unknown directive {word!r}", no)
    if not surfaces:
        raise SceneError("scene has no surfaces")
    if light is None:
        raise SceneError("missing 'light' directive")
    order = None
    if order_names is not None:
        names = [n for n, _ in surfaces]
        if sorted(order_names) != sorted(names) or len(set(order_names)) != len(order_names):
            raise SceneError("order must be a permutation of the surface names", order_line)
        order = [names.index(n) for n in order_names]
    scene = Scene(dim, surfaces, light, planes, order, camera, view, image, samples, hints)
    validate_scene(scene)
    return scene


def _parse_camera(tokens, line) -> Camera:
    keys = {"eye": 3, "lookat": 3, "up": 3, "fov": 1}
    vals = {}
    i = 0
    while i < len(tokens):
        k = tokens[i]
        if k not in keys:
            raise SceneError(f"camera: unknown field {k!r}", line)
        n = keys[k]
        if len(tokens[i + 1:i + 1 + n]) < n:
            raise SceneError(f"camera: {k} needs {n} value(s)", line)
        vals[k] = [rationalize(v) for v in _numbers(tokens[i + 1:i + 1 + n], line, f"camera {k}")]
        i += 1 + n
    missing = [k for k in keys if k not in vals]
    if missing:
        raise SceneError(f"camera: missing {', '.join(missing)}", line)
    cam = Camera(tuple(vals["eye"]), tuple(vals["lookat"]), tuple(vals["up"]), vals["fov"][0])
    if cam.eye == cam.lookat:
        raise SceneError("camera: eye and lookat coincide", line)
    fwd = [b - a for a, b in zip(cam.eye, cam.lookat)]
    if not any(_cross(fwd, cam.up)):
        raise SceneError("camera: up vector is parallel to the viewing direction", line)
    if not 0 < cam.fov < 180:
        raise SceneError("camera: fov must lie strictly between 0 and 180 degrees", line)
    return cam


def validate_scene(scene: Scene) -> None:
    if len(scene.light) != scene.dimension:
        raise SceneError("light dimension does not match the scene")
    sigma = product_polynomial(scene)
    if is_singular_at(sigma, scene.light):
        raise SceneError("light: the light source is a singular point of the surface product")
    for name, p in scene.planes:
        if p.evaluate(scene.light) == 0:
            raise SceneError(f"plane {name}: passes through the light source")


# -- ordered evaluation plan -------------------------------------------------------------------------


@dataclass
class EvaluationPlan:
    """How labels are computed: one product surface, or surfaces in light order."""

    mode: str                 # "product" or "ordered"
    sigma: MultiPoly
    polar: MultiPoly
    light: tuple
    steps: list = field(default_factory=list)  # ordered: (index, poly, polar, occluder or None)

    def classify(self, X, surface_index: int | None = None, *, eps=DEFAULT_EPS,
                 budget=DEFAULT_BUDGET) -> RegionLabel:
        if self.mode == "product" or surface_index is None:
            return classify_point(self.sigma, self.polar, self.light, X, eps=eps, budget=budget)
        for idx, poly, polar, occluder in self.steps:
            if idx != surface_index:
                continue
            label = classify_point(poly, polar, self.light, X, eps=eps, budget=budget)
            if label is RegionLabel.ILLUMINATED and occluder is not None:
                res = shadow_test(occluder, self.light, X, eps=eps, budget=budget)
                if res is ShadowResult.BLOCKED:
                    return RegionLabel.SELF_SHADED
                if res is ShadowResult.GRAZING:
                    return RegionLabel.BOUNDARY
            return label
        raise IndexError(surface_index)


def order_surfaces(scene: Scene) -> EvaluationPlan:
    """Product plan, or (with a declared order) per-surface self-shading plus
    cross-shadows cast only by surfaces closer to the light."""
    sigma = product_polynomial(scene)
    polar = first_polar(sigma, scene.light)
    if scene.order is None:
        return EvaluationPlan("product", sigma, polar, scene.light)
    if sorted(scene.order) != list(range(len(scene.surfaces))):
        raise SceneError("order must be a permutation of the surfaces")
    steps = []
    closer = []
    for idx in scene.order:
        poly = scene.surfaces[idx][1]
        occ = product(closer, scene.ring) if closer else None
        steps.append((idx, poly, first_polar(poly, scene.light), occ))
        closer.append(poly)
    return EvaluationPlan("ordered", sigma, polar, scene.light, steps)


# -- shadows on receiver planes --------------------------------------------------------------------------


@dataclass
class ShadowRegion:
    """Shadow cast on a receiver plane.

    Plane points are ``origin + s*u + t*v``.  ``conditions`` are the
    pullbacks of the cone and of the occluder to ``(s, t)`` (written with
    variables ``x``, ``y``); their sign vector delimits the shadow.
    ``samples`` lists ``(s, t, shaded)`` from exact segment tests.
    """

    plane: str
    origin: tuple
    u: tuple
    v: tuple
    conditions: list
    samples: list

    def point(self, s, t) -> tuple:
        return tuple(o + s * a + t * b for o, a, b in zip(self.origin, self.u, self.v))


def plane_frame(plane: MultiPoly) -> tuple:
    """A rational point and two rational spanning directions of a plane."""
    n = [plane.terms.get(e, mpq(0)) for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1))]
    d = plane.terms.get((0, 0, 0), mpq(0))
    k = max(range(3), key=lambda i: abs(n[i]))
    origin = [mpq(0)] * 3
    origin[k] = -d / n[k]
    axes = [i for i in range(3) if i != k]
    dirs = []
    for i in axes:
        vec = [mpq(0)] * 3
        vec[i] = mpq(1)
        vec[k] = -n[i] / n[k]
        dirs.append(tuple(vec))
    return tuple(origin), dirs[0], dirs[1]


def in_shadow(sigma: MultiPoly, light, P) -> bool:
    """Exact test: does the segment from the light to ``P`` meet the surface?"""
    return shadow_test(sigma, light, tuple(P)) is ShadowResult.BLOCKED


def shadow_on_plane(scene: Scene, plane_name: str, *, grid: int = 32, extent=4,
                    theta: MultiPoly | None = None) -> ShadowRegion:
    if scene.dimension != 3:
        raise SceneError("plane shadows need a 3-D scene")
    plane = scene.plane(plane_name)
    if plane.evaluate(scene.light) == 0:
        raise GeometryError("the receiver plane passes through the light")
    sigma = product_polynomial(scene)
    origin, u, v = plane_frame(plane)
    ring2 = PLANE_VARS
    s, t = MultiPoly.gens(ring2)
    images = {name: s.scale(a) + t.scale(b) + o for name, o, a, b in zip(SPACE_VARS, origin, u, v)}
    conds = [sigma.compose(images, ring2)]
    if theta is not None:
        conds.insert(0, theta.compose(images, ring2))
    extent = QQ(extent)
    samples = []
    for i in range(grid):
        for j in range(grid):
            ss = -extent + 2 * extent * (i + mpq(1, 2)) / grid
            tt = -extent + 2 * extent * (j + mpq(1, 2)) / grid
            P = tuple(o + ss * a + tt * b for o, a, b in zip(origin, u, v))
            samples.append((ss, tt, in_shadow(sigma, scene.light, P)))
    return ShadowRegion(plane_name, origin, u, v, conds, samples)
