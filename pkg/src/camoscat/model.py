"""Scene description: materials, layer profile, unit cell, incident wave
and buried inclusion, plus JSON (de)serialisation and scene validation."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import kernels
from .errors import GeometryViolated, ScaleSeparationViolated, ValidationError

# dense sample size for positivity / extremum checks of the layer profile
PROFILE_SAMPLES = 4096


def _positive(name, value):
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise ValueError(f"{name} must be finite and > 0, got {value!r}")
    return value


@dataclass(frozen=True)
class MaterialSet:
    mu_plus: float
    eps_plus: float
    mu_cl: float
    eps_cl: float
    mu_host: float
    eps_host: float
    mu_B: float
    eps_B: float
    mu_D: float
    eps_D: float

    def __post_init__(self):
        for f in fields(self):
            object.__setattr__(self, f.name, _positive(f.name, getattr(self, f.name)))

    def replace(self, **changes) -> "MaterialSet":
        return replace(self, **changes)

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class LayerProfile:
    """1-periodic profile ``f(t) = mean + sum_m a_m cos(2 pi m t) + b_m sin(2 pi m t)``
    of the rough layer, used at scale ``xi``."""

    mean: float
    xi: float
    cos: tuple = ()
    sin: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "mean", float(self.mean))
        object.__setattr__(self, "xi", _positive("xi", self.xi))
        object.__setattr__(self, "cos", tuple(float(c) for c in self.cos))
        object.__setattr__(self, "sin", tuple(float(s) for s in self.sin))
        t = np.arange(PROFILE_SAMPLES) / PROFILE_SAMPLES
        if np.min(self(t)) <= 0.0:
            raise ValueError("layer profile f must be strictly positive")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.full(t.shape, self.mean)
        for m, a in enumerate(self.cos, start=1):
            out = out + a * np.cos(2 * np.pi * m * t)
        for m, b in enumerate(self.sin, start=1):
            out = out + b * np.sin(2 * np.pi * m * t)
        return out

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape)
        for m, a in enumerate(self.cos, start=1):
            out = out - 2 * np.pi * m * a * np.sin(2 * np.pi * m * t)
        for m, b in enumerate(self.sin, start=1):
            out = out + 2 * np.pi * m * b * np.cos(2 * np.pi * m * t)
        return out

    def integral(self) -> float:
        """Exact integral of f over one period."""
        return self.mean

    @property
    def harmonics(self) -> int:
        return max(len(self.cos), len(self.sin))

    def max_value(self) -> float:
        t = np.arange(PROFILE_SAMPLES) / PROFILE_SAMPLES
        return float(np.max(self(t)))

    def with_xi(self, xi) -> "LayerProfile":
        return replace(self, xi=xi)

    def to_dict(self):
        return {"mean": self.mean, "xi": self.xi, "cos": list(self.cos), "sin": list(self.sin)}


# --- shapes ------------------------------------------------------------------

@dataclass(frozen=True)
class Ellipse:
    """Ellipse with centre, semi-axes and rotation angle (radians).

    Serves both as cell inclusion B and as buried object D.
    """

    center: tuple
    semi_axes: tuple
    angle: float = 0.0
    kind = "ellipse"

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        object.__setattr__(self, "semi_axes", tuple(_positive("semi_axis", a) for a in self.semi_axes))
        object.__setattr__(self, "angle", float(self.angle))

    def area(self):
        return math.pi * self.semi_axes[0] * self.semi_axes[1]

    def contains(self, x1, x2):
        c, s = math.cos(self.angle), math.sin(self.angle)
        d1 = np.asarray(x1, dtype=float) - self.center[0]
        d2 = np.asarray(x2, dtype=float) - self.center[1]
        u = (c * d1 + s * d2) / self.semi_axes[0]
        v = (-s * d1 + c * d2) / self.semi_axes[1]
        return u * u + v * v < 1.0

    def bbox(self):
        a, b = self.semi_axes
        c, s = math.cos(self.angle), math.sin(self.angle)
        w = math.hypot(a * c, b * s)
        h = math.hypot(a * s, b * c)
        return (self.center[0] - w, self.center[0] + w, self.center[1] - h, self.center[1] + h)

    def curve(self, t):
        """Position and first two derivatives of the counter-clockwise
        parametrisation, each of shape ``(2, len(t))``."""
        t = np.asarray(t, dtype=float)
        a, b = self.semi_axes
        c, s = math.cos(self.angle), math.sin(self.angle)
        R = np.array([[c, -s], [s, c]])
        p = R @ np.vstack([a * np.cos(t), b * np.sin(t)])
        d1 = R @ np.vstack([-a * np.sin(t), b * np.cos(t)])
        d2 = R @ np.vstack([-a * np.cos(t), -b * np.sin(t)])
        return p + np.array(self.center)[:, None], d1, d2

    def to_dict(self):
        return {"type": "ellipse", "center": list(self.center),
                "semi_axes": list(self.semi_axes), "angle": self.angle}


@dataclass(frozen=True)
class StarCurve:
    """Star-shaped curve ``r(t) = radius + sum a_m cos(m t) + b_m sin(m t)``
    around ``center``."""

    center: tuple
    radius: float
    cos: tuple = ()
    sin: tuple = ()
    kind = "star"

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        object.__setattr__(self, "radius", _positive("radius", self.radius))
        object.__setattr__(self, "cos", tuple(float(c) for c in self.cos))
        object.__setattr__(self, "sin", tuple(float(s) for s in self.sin))
        if np.min(self._r(np.linspace(0, 2 * np.pi, 2048, endpoint=False))[0]) <= 0:
            raise ValueError("star curve radius must stay positive")

    def _r(self, t):
        r = np.full(np.shape(t), self.radius)
        r1 = np.zeros(np.shape(t))
        r2 = np.zeros(np.shape(t))
        for m, a in enumerate(self.cos, start=1):
            r, r1, r2 = r + a * np.cos(m * t), r1 - m * a * np.sin(m * t), r2 - m * m * a * np.cos(m * t)
        for m, b in enumerate(self.sin, start=1):
            r, r1, r2 = r + b * np.sin(m * t), r1 + m * b * np.cos(m * t), r2 - m * m * b * np.sin(m * t)
        return r, r1, r2

    def curve(self, t):
        t = np.asarray(t, dtype=float)
        r, r1, r2 = self._r(t)
        c, s = np.cos(t), np.sin(t)
        p = np.vstack([r * c, r * s]) + np.array(self.center)[:, None]
        d1 = np.vstack([r1 * c - r * s, r1 * s + r * c])
        d2 = np.vstack([r2 * c - 2 * r1 * s - r * c, r2 * s + 2 * r1 * c - r * s])
        return p, d1, d2

    def contains(self, x1, x2):
        d1 = np.asarray(x1, dtype=float) - self.center[0]
        d2 = np.asarray(x2, dtype=float) - self.center[1]
        r = self._r(np.arctan2(d2, d1))[0]
        return d1 * d1 + d2 * d2 < r * r

    def area(self):
        t = np.linspace(0, 2 * np.pi, 4096, endpoint=False)
        return float(0.5 * np.mean(self._r(t)[0] ** 2) * 2 * np.pi)

    def bbox(self):
        p = self.curve(np.linspace(0, 2 * np.pi, 4096, endpoint=False))[0]
        return (p[0].min(), p[0].max(), p[1].min(), p[1].max())

    def to_dict(self):
        return {"type": "star", "center": list(self.center), "radius": self.radius,
                "cos": list(self.cos), "sin": list(self.sin)}


@dataclass(frozen=True)
class Polygon:
    """Polygonal cell inclusion (counter-clockwise vertices)."""

    vertices: tuple
    kind = "polygon"

    def __post_init__(self):
        v = tuple((float(a), float(b)) for a, b in self.vertices)
        if len(v) < 3:
            raise ValueError("polygon needs at least three vertices")
        object.__setattr__(self, "vertices", v)

    def area(self):
        v = np.array(self.vertices)
        x, y = v[:, 0], v[:, 1]
        return float(abs(0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)))

    def contains(self, x1, x2):
        x1 = np.asarray(x1, dtype=float)
        v = np.array(self.vertices)
        inside = kernels.points_in_polygon(x1, np.asarray(x2, dtype=float), v[:, 0], v[:, 1])
        return inside.reshape(x1.shape)

    def bbox(self):
        v = np.array(self.vertices)
        return (v[:, 0].min(), v[:, 0].max(), v[:, 1].min(), v[:, 1].max())

    def to_dict(self):
        return {"type": "polygon", "vertices": [list(p) for p in self.vertices]}


@dataclass(frozen=True)
class Stripe:
    """Horizontal band ``low < y2 < high`` spanning the cell (laminate)."""

    low: float
    high: float
    kind = "stripe"

    def __post_init__(self):
        if not self.high > self.low:
            raise ValueError("stripe needs high > low")

    def contains(self, x1, x2):
        x2 = np.asarray(x2, dtype=float)
        return (x2 > self.low) & (x2 < self.high) & np.isfinite(np.asarray(x1, dtype=float))

    def to_dict(self):
        return {"type": "stripe", "low": self.low, "high": self.high}


_SHAPES = {"ellipse": Ellipse, "star": StarCurve, "polygon": Polygon, "stripe": Stripe}


def shape_from_dict(d):
    d = dict(d)
    kind = d.pop("type")
    if kind not in _SHAPES:
        raise ValidationError(f"unknown shape type {kind!r}")
    return _SHAPES[kind](**d)


@dataclass(frozen=True)
class UnitCell:
    ell1: float
    ell2: float
    inclusion: object

    def __post_init__(self):
        object.__setattr__(self, "ell1", _positive("ell1", self.ell1))
        object.__setattr__(self, "ell2", _positive("ell2", self.ell2))
        frac = self.area_fraction
        if not 0.0 < frac < 1.0:
            raise GeometryViolated(f"inclusion area fraction {frac} not in (0, 1)")

    @property
    def area(self):
        return self.ell1 * self.ell2

    @property
    def area_fraction(self) -> float:
        inc = self.inclusion
        if isinstance(inc, Stripe):
            return (min(inc.high, self.ell2) - max(inc.low, 0.0)) / self.ell2
        return inc.area() / self.area

    def contains(self, y1, y2):
        """Indicator of B, with points first reduced modulo the cell."""
        y1 = np.mod(np.asarray(y1, dtype=float), self.ell1)
        y2 = np.mod(np.asarray(y2, dtype=float), self.ell2)
        return self.inclusion.contains(y1, y2)

    def cell_centers(self, n1, n2):
        y1 = (np.arange(n1) + 0.5) * self.ell1 / n1
        y2 = (np.arange(n2) + 0.5) * self.ell2 / n2
        return np.meshgrid(y1, y2, indexing="ij")

    def rasterize(self, n1, n2):
        """Boolean ``(n1, n2)`` mask of B sampled at cell centres."""
        Y1, Y2 = self.cell_centers(n1, n2)
        return np.asarray(self.contains(Y1, Y2)).reshape(n1, n2)

    def check_margin(self, n_grid=256):
        """B-bar must sit inside Y with at least one grid cell of margin."""
        inc = self.inclusion
        m1, m2 = self.ell1 / n_grid, self.ell2 / n_grid
        if isinstance(inc, Stripe):
            if inc.low < m2 or inc.high > self.ell2 - m2:
                raise GeometryViolated("stripe inclusion touches the cell boundary")
            return
        x0, x1, y0, y1 = inc.bbox()
        if x0 < m1 or y0 < m2 or x1 > self.ell1 - m1 or y1 > self.ell2 - m2:
            raise GeometryViolated("inclusion B touches the boundary of the unit cell")

    def to_dict(self):
        return {"ell1": self.ell1, "ell2": self.ell2, "inclusion": self.inclusion.to_dict()}


@dataclass(frozen=True)
class IncidentWave:
    omega: float
    theta: tuple

    def __post_init__(self):
        object.__setattr__(self, "omega", _positive("omega", self.omega))
        th = tuple(float(t) for t in self.theta)
        if len(th) != 2 or abs(math.hypot(*th) - 1.0) > 1e-12:
            raise ValidationError("incidence direction must be a unit 2-vector")
        if not th[1] < 0.0:
            raise ValidationError("incidence direction must point downwards (theta_2 < 0)")
        object.__setattr__(self, "theta", th)

    @classmethod
    def from_angle(cls, omega, angle):
        """Incidence at ``angle`` (radians) from the downward normal."""
        return cls(omega, (math.sin(angle), -math.cos(angle)))

    def k_plus(self, materials: MaterialSet) -> float:
        return self.omega * math.sqrt(materials.eps_plus * materials.mu_plus)

    def wavelength(self, materials: MaterialSet) -> float:
        return 2 * math.pi / self.k_plus(materials)

    def to_dict(self):
        return {"omega": self.omega, "theta": list(self.theta)}


# --- scene --------------------------------------------------------------------

@dataclass(frozen=True)
class ValidatedScene:
    materials: MaterialSet
    profile: LayerProfile
    cell: UnitCell
    wave: IncidentWave
    inclusion: object
    k_plus: float
    lambda_plus: float
    area_fraction: float
    mean_f: float
    max_f: float
    size_ratio: float = field(default=float("nan"))

    def derived(self):
        return {"k_plus": self.k_plus, "lambda_plus": self.lambda_plus,
                "area_fraction": self.area_fraction, "mean_f": self.mean_f,
                "max_f": self.max_f, "size_ratio": self.size_ratio}

    def to_dict(self):
        return scene_to_dict(self)


def check_inclusion_depth(inclusion, profile: LayerProfile, n_check=512):
    """Depth and simplicity checks for the buried object D."""
    t = np.linspace(0, 2 * np.pi, n_check, endpoint=False)
    p, d1, _ = inclusion.curve(t)
    limit = -profile.xi * profile.max_value() - 2 * profile.xi
    if p[1].max() > limit:
        raise GeometryViolated(
            f"inclusion too shallow: max x2 = {p[1].max():.6g} > {limit:.6g}")
    speed = np.hypot(*d1)
    if speed.min() <= 1e-6 * speed.max():
        raise GeometryViolated("inclusion parametrisation speed vanishes")
    if not kernels.polyline_is_simple(p[0], p[1]):
        raise GeometryViolated("inclusion boundary self-intersects")
    signed = 0.5 * np.sum(p[0] * np.roll(p[1], -1) - np.roll(p[0], -1) * p[1])
    if signed <= 0:
        raise GeometryViolated("inclusion boundary must be counter-clockwise")


def validate_scene(materials, profile, cell, wave, inclusion, n_grid=256) -> ValidatedScene:
    """Check the standing scale and geometry hypotheses and attach derived values."""
    k_plus = wave.k_plus(materials)
    lam = 2 * math.pi / k_plus
    # boundary inclusive: xi = lambda/10 is the coarsest scale used in validation
    if profile.xi > lam / 10 * (1 + 1e-12):
        raise ScaleSeparationViolated(
            f"xi = {profile.xi:.6g} is not below lambda/10 = {lam / 10:.6g}")
    cell.check_margin(n_grid)
    check_inclusion_depth(inclusion, profile)
    x0, x1, y0, y1 = inclusion.bbox()
    size_ratio = min(x1 - x0, y1 - y0) / (profile.xi * max(cell.ell1, cell.ell2))
    return ValidatedScene(materials, profile, cell, wave, inclusion, k_plus, lam,
                          cell.area_fraction, profile.integral(), profile.max_value(), size_ratio)


def scene_to_dict(scene: ValidatedScene):
    return {
        "materials": scene.materials.to_dict(),
        "layer": scene.profile.to_dict(),
        "cell": scene.cell.to_dict(),
        "wave": scene.wave.to_dict(),
        "inclusion": scene.inclusion.to_dict(),
    }


def _scale_shape(d, s):
    d = dict(d)
    if "center" in d:
        d["center"] = [c * s for c in d["center"]]
    for key in ("semi_axes",):
        if key in d:
            d[key] = [a * s for a in d[key]]
    for key in ("radius",):
        if key in d:
            d[key] = d[key] * s
    for key in ("cos", "sin"):
        if key in d:
            d[key] = [a * s for a in d[key]]
    return d


def scene_from_dict(doc, n_grid=256) -> ValidatedScene:
    """Build and validate a scene from its JSON document.

    With ``"units": "wavelength"`` the layer scale ``xi`` and the inclusion
    geometry are read in units of the upper-medium wavelength.
    """
    missing = {"materials", "layer", "cell", "wave", "inclusion"} - set(doc)
    if missing:
        raise ValidationError(f"scene is missing keys: {sorted(missing)}")
    try:
        materials = MaterialSet(**doc["materials"])
        wave = IncidentWave(doc["wave"]["omega"], doc["wave"]["theta"])
        layer = dict(doc["layer"])
        inc = dict(doc["inclusion"])
        units = doc.get("units", "absolute")
        if units == "wavelength":
            lam = wave.wavelength(materials)
            layer["xi"] = layer["xi"] * lam
            inc = _scale_shape(inc, lam)
        elif units != "absolute":
            raise ValidationError(f"unknown units {units!r}")
        profile = LayerProfile(layer["mean"], layer["xi"], layer.get("cos", ()), layer.get("sin", ()))
        c = doc["cell"]
        cell = UnitCell(c["ell1"], c["ell2"], shape_from_dict(c["inclusion"]))
        inclusion = shape_from_dict(inc)
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed scene: {exc}") from exc
    return validate_scene(materials, profile, cell, wave, inclusion, n_grid=n_grid)


def load_scene(path, n_grid=256) -> ValidatedScene:
    with open(Path(path)) as fh:
        return scene_from_dict(json.load(fh), n_grid=n_grid)


def dump_scene(scene: ValidatedScene, path):
    with open(Path(path), "w") as fh:
        json.dump(scene_to_dict(scene), fh, indent=2, sort_keys=True)
