import xml.etree.ElementTree as ET

import numpy as np
import pytest

from foldpam import make_geometry
from foldpam.curves import ForceStrainCurve
from foldpam.design_space import curve_family
from foldpam.errors import DomainError
from foldpam.plotting import render_plot, write_plot
from foldpam.scenarios import builtin_scenario, run_scenario

NS = "{http://www.w3.org/2000/svg}"


def line_paths(svg):
    """Data polylines: matplotlib gives each Line2D a group id 'line2d_N'."""
    root = ET.fromstring(svg)
    groups = [g for g in root.iter(f"{NS}g") if g.get("id", "").startswith("line2d_")]
    return [g for g in groups if g.find(f"{NS}path") is not None and "clip-path" in ET.tostring(g).decode()]


def test_single_curve(tmp_path):
    c = ForceStrainCurve(np.linspace(0, 0.3, 20), np.linspace(10, 0, 20), 1e4, "a", 0.0)
    path = tmp_path / "c.svg"
    write_plot(c, path)
    svg = path.read_text()
    assert len(line_paths(svg)) == 1
    assert "strain" in svg and "force (N)" in svg
    assert "legend" not in svg


def test_family_has_styles_and_legend():
    fam = curve_family(make_geometry(0.05, 0.05, 0, 0.005), 12.4e3, [0, 0.2, 0.4, 0.52, 0.67],
                       n=21, theta_min=0.2)
    svg = render_plot(fam)
    assert len(line_paths(svg)) >= 5
    assert "legend" in svg
    for c in fam:
        assert c.label in svg


def test_trace_has_two_panels():
    svg = render_plot(run_scenario(builtin_scenario("geometry-step-load", duration=2.0)))
    root = ET.fromstring(svg)
    axes = [g for g in root.iter(f"{NS}g") if g.get("id", "").startswith("axes_")]
    assert len(axes) == 2
    assert "command" in svg and "error (mm)" in svg and "time (s)" in svg


def test_empty_data():
    with pytest.raises(DomainError):
        render_plot([])


def test_deterministic():
    c = ForceStrainCurve(np.linspace(0, 0.3, 5), np.linspace(10, 0, 5), 1e4, "a", 0.0)
    assert render_plot(c) == render_plot(c)
