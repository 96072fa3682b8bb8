import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from foldpam import make_geometry
from foldpam.curves import ForceStrainCurve
from foldpam.design_space import (
    FamilyMemberError,
    curve_extrema,
    curve_family,
    design_space_area,
    normalized_area,
)
from foldpam.errors import DomainError
from foldpam.models import ModelKind

from oracles import monte_carlo_area, shoelace, strip_polygons


def linear(f0, e_max, fr, pressure=1.0, n=2):
    s = np.linspace(0.0, e_max, n)
    return ForceStrainCurve(s, f0 * (1 - s / e_max), pressure, f"fr={fr}", fr)


def seg(p, q, fr):
    return ForceStrainCurve(np.array([p[0], q[0]]), np.array([p[1], q[1]]), 1.0, f"fr={fr}", fr)


def test_quadrilateral_exact():
    quad = [(0.0, 1.0), (0.0, 2.0), (1.0, 0.0), (0.5, 0.0)]
    assert shoelace([quad[0], quad[3], quad[2], quad[1]]) == 0.75
    a = seg((0.0, 1.0), (0.5, 0.0), 0.0)
    b = seg((0.0, 2.0), (1.0, 0.0), 0.5)
    assert design_space_area([a, b]).area == pytest.approx(0.75, abs=1e-15)
    g = make_geometry(0.05, 0.05)
    assert normalized_area(0.75, g, 1000.0) == pytest.approx(0.3, rel=1e-12)


def test_identical_curves_have_zero_area():
    c = linear(3.0, 0.3, 0.0, n=20)
    d = ForceStrainCurve(c.strain, c.force, c.pressure, "copy", 0.1)
    assert design_space_area([c, d]).area == pytest.approx(0.0, abs=1e-12)


def test_crossing_curves_use_even_odd():
    # two lines crossing once make a bow-tie strip of two triangles
    a = ForceStrainCurve(np.array([0.0, 1.0]), np.array([1.0, 0.0]), 1.0, "a", 0.0)
    b = ForceStrainCurve(np.array([0.0, 0.5]), np.array([0.5, 0.0]), 1.0, "b", 0.1)
    poly = strip_polygons([a, b], 512)
    est, _ = monte_carlo_area(poly, 200_000, seed=3)
    assert design_space_area([a, b]).area == pytest.approx(est, rel=0.02)


def test_order_invariance_and_labels():
    curves = [linear(1.0 + i, 0.2 + 0.05 * i, 0.1 * i, n=9) for i in range(4)]
    fwd = design_space_area(curves)
    rev = design_space_area(curves[::-1])
    assert fwd.area == rev.area
    assert fwd.curve_labels == tuple(c.label for c in curves)


@given(st.floats(0.1, 100.0), st.floats(0.1, 10.0))
def test_scaling(force_scale, strain_scale):
    curves = [linear(1.0 + i, 0.2 + 0.05 * i, 0.1 * i, n=9) for i in range(3)]
    base = design_space_area(curves).area
    scaled = [
        ForceStrainCurve(c.strain * strain_scale, c.force * force_scale, 1.0, c.label, c.fold_ratio)
        for c in curves
    ]
    assert design_space_area(scaled).area == pytest.approx(
        base * force_scale * strain_scale, rel=1e-9
    )


def test_model_family_matches_monte_carlo():
    geom = make_geometry(0.05, 0.05, 0.0, 0.005)
    fam = curve_family(geom, 12.4e3, [0.0, 0.2, 0.4, 0.52, 0.67], theta_min=0.2)
    exact = design_space_area(fam, geom)
    est, box = monte_carlo_area(strip_polygons(fam), 300_000, seed=1)
    # binomial standard error of the hit fraction
    p = est / box
    sigma = box * np.sqrt(p * (1 - p) / 300_000)
    assert abs(exact.area - est) < 5 * sigma
    assert exact.normalized == pytest.approx(exact.area / (1.0 * 0.05**2 * 12.4e3), rel=1e-12)


@given(st.floats(0.01, 100.0))
def test_normalization_invariant_under_joint_scaling(k):
    geom = make_geometry(0.05, 0.05, 0.0, 0.005)
    fam = curve_family(geom, 12.4e3, [0.0, 0.3, 0.6], n=41, theta_min=0.2)
    base = design_space_area(fam, geom).normalized
    scaled = design_space_area([c.scaled(k) for c in fam], geom).normalized
    assert scaled == pytest.approx(base, rel=1e-12)


def test_rejects_bad_families():
    c = linear(1.0, 0.3, 0.0)
    with pytest.raises(DomainError):
        design_space_area([c])
    with pytest.raises(DomainError):
        design_space_area([c, linear(1.0, 0.3, 0.1, pressure=2.0)])
    assert design_space_area([c, linear(2.0, 0.3, 0.1, pressure=2.0)], same_pressure=False).area > 0
    with pytest.raises(DomainError):
        normalized_area(1.0, make_geometry(0.05, 0.05), 0.0)


def test_family_member_failure_is_named():
    g = make_geometry(0.05, 0.10, 0.0, 0.05)  # nonideal fine, ideal width collapses
    with pytest.raises(FamilyMemberError) as info:
        curve_family(g, 1e4, [0.1, 0.3], policy=ModelKind.POUCH)
    assert info.value.fold_ratio == 0.1
    with pytest.raises(DomainError):
        curve_family(g, 1e4, [0.1, 0.9])


def test_curve_extrema():
    c = linear(4.0, 0.25, 0.0, n=11)
    assert curve_extrema(c) == (0.25, 4.0)
