import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from camoscat.errors import GeometryViolated, ScaleSeparationViolated, ValidationError
from camoscat.model import (Ellipse, IncidentWave, LayerProfile, MaterialSet, StarCurve, Stripe,
                            UnitCell, check_inclusion_depth, scene_from_dict, scene_to_dict, validate_scene)


def _materials():
    return MaterialSet(1, 1, 1.5, 2.5, 1, 2, 2, 4, 1, 4)


def _parts(xi=0.05):
    cell = UnitCell(1, 1, Ellipse((0.5, 0.5), (0.3, 0.3)))
    wave = IncidentWave.from_angle(2 * math.pi, 0.3)
    return _materials(), LayerProfile(0.5, xi, cos=(0.2,)), cell, wave, Ellipse((0, -3), (0.5, 0.5))


def test_valid_scene_has_unit_wavelength():
    scene = validate_scene(*_parts())
    assert scene.k_plus == pytest.approx(2 * math.pi, rel=1e-15)
    assert scene.lambda_plus == pytest.approx(1.0, rel=1e-15)
    assert scene.mean_f == 0.5


def test_coarse_layer_is_rejected():
    with pytest.raises(ScaleSeparationViolated):
        validate_scene(*_parts(xi=0.5))


def test_layer_at_tenth_wavelength_is_accepted():
    validate_scene(*_parts(xi=0.1))


def test_ellipse_area_fraction():
    cell = UnitCell(1, 1, Ellipse((0.5, 0.5), (0.3, 0.3)))
    assert cell.area_fraction == pytest.approx(0.09 * math.pi, rel=1e-14)


@pytest.mark.parametrize("bad", [0.0, -1.0, float("nan"), float("inf")])
def test_materials_must_be_positive_and_finite(bad):
    with pytest.raises(ValueError):
        MaterialSet(1, 1, 1, 1, 1, 1, 1, 1, 1, bad)


def test_profile_must_stay_positive():
    with pytest.raises(ValueError):
        LayerProfile(0.1, 0.05, cos=(0.3,))


def test_incidence_must_point_down():
    with pytest.raises(ValidationError):
        IncidentWave(1.0, (0.0, 1.0))
    with pytest.raises(ValidationError):
        IncidentWave(1.0, (0.6, -0.7))


def test_inclusion_touching_cell_boundary_is_rejected():
    m, prof, _, wave, D = _parts()
    cell = UnitCell(1, 1, Ellipse((0.5, 0.5), (0.5, 0.3)))
    with pytest.raises(GeometryViolated):
        validate_scene(m, prof, cell, wave, D)


def test_shallow_object_is_rejected():
    m, prof, cell, wave, _ = _parts()
    with pytest.raises(GeometryViolated):
        validate_scene(m, prof, cell, wave, Ellipse((0, -0.2), (0.1, 0.1)))


def test_clockwise_object_is_rejected():
    prof = LayerProfile(0.5, 0.05)
    with pytest.raises(GeometryViolated):
        check_inclusion_depth(_Clockwise(), prof)


class _Clockwise:
    def curve(self, t):
        p = np.vstack([np.cos(t), -3 - np.sin(t)])
        d1 = np.vstack([-np.sin(t), -np.cos(t)])
        return p, d1, -p


def test_point_in_inclusion_examples():
    cell = UnitCell(1, 1, Ellipse((0.5, 0.5), (0.3, 0.3)))
    assert cell.contains(0.5, 0.5)
    assert not cell.contains(0.0, 0.0)
    # reduced modulo the cell first
    assert cell.contains(1.5, -0.5)


def test_monte_carlo_area_fraction():
    rng = np.random.default_rng(1)
    n = 10**6
    cell = UnitCell(1, 1, Ellipse((0.5, 0.5), (0.3, 0.2), angle=0.4))
    hits = cell.contains(rng.random(n), rng.random(n)).mean()
    p = cell.area_fraction
    assert abs(hits - p) < 3 * math.sqrt(p * (1 - p) / n)


def test_raster_takes_two_values_and_converges():
    cell = UnitCell(1, 1, StarCurve((0.5, 0.5), 0.25, cos=(0.0, 0.0, 0.05)))
    errs = []
    for n in (64, 256):
        mask = cell.rasterize(n, n)
        assert mask.dtype == bool
        errs.append(abs(mask.mean() - cell.area_fraction))
    assert errs[1] < 4.0 / 256


def test_stripe_area_fraction():
    assert UnitCell(1, 1, Stripe(0.25, 0.75)).area_fraction == 0.5


def test_validation_is_idempotent():
    scene = validate_scene(*_parts())
    again = validate_scene(scene.materials, scene.profile, scene.cell, scene.wave, scene.inclusion)
    assert again.derived() == scene.derived()


def test_scene_json_round_trip(tmp_path):
    scene = validate_scene(*_parts())
    doc = json.loads(json.dumps(scene_to_dict(scene)))
    back = scene_from_dict(doc)
    assert scene_to_dict(back) == doc
    assert back.derived() == scene.derived()


def test_wavelength_units():
    scene = validate_scene(*_parts())
    doc = scene_to_dict(scene)
    doc["wave"]["omega"] = math.pi          # lambda+ = 2
    doc["units"] = "wavelength"
    doc["layer"]["xi"] = 0.05
    back = scene_from_dict(doc)
    assert back.profile.xi == pytest.approx(0.1)
    assert back.inclusion.center[1] == pytest.approx(-6.0)


def test_missing_key_is_a_validation_error():
    with pytest.raises(ValidationError):
        scene_from_dict({"materials": {}})


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 0.45), st.floats(0.05, 0.45), st.floats(0.0, math.pi))
def test_ellipse_curve_lies_on_its_boundary(a, b, angle):
    e = Ellipse((0.5, 0.5), (a, b), angle=angle)
    t = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    p, d1, _ = e.curve(t)
    inner = p + 1e-6 * (np.array([[0.5], [0.5]]) - p)
    outer = p - 1e-6 * (np.array([[0.5], [0.5]]) - p)
    assert np.all(e.contains(*inner))
    assert not np.any(e.contains(*outer))
    signed = 0.5 * np.sum(p[0] * d1[1] - p[1] * d1[0])
    assert signed > 0
