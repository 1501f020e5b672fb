import xml.etree.ElementTree as ET

import numpy as np
import pytest

from logvoronoi import io, svg
from logvoronoi.mle import build_critical_system, find_critical_points
from logvoronoi.model import builtin
from logvoronoi.polytope import VPolytope


def test_parse_vector_fractions():
    assert np.allclose(io.parse_vector("1/3, 0.5,2"), [1 / 3, 0.5, 2])
    with pytest.raises(ValueError):
        io.parse_vector(" , ")


def test_points_round_trip(tmp_path):
    X = np.random.default_rng(0).random((4, 3))
    path = tmp_path / "pts.txt"
    io.write_points(path, X)
    assert np.array_equal(io.read_points(path), X)


def test_read_points_errors(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("1,2\n1,2,3\n")
    with pytest.raises(ValueError):
        io.read_points(path)
    path.write_text("# nothing\n")
    with pytest.raises(ValueError):
        io.read_points(path)


def test_format_complex():
    assert io.format_vector(np.array([1 + 2j])) == "1+2j"


def test_critical_report_structure():
    m = builtin("cousin_hardy_weinberg")
    u = np.array([0.3, 0.2, 0.5])
    found = find_critical_points(build_critical_system(m, u), 50, positive_only=False)
    text = io.critical_report(found, u)
    assert "solutions = 2" in text
    assert text.count("[solution ") == 2
    assert "kind = positive" in text and "kind = real" in text


def test_isometric_camera():
    Z = svg.isometric(np.eye(3))
    assert np.allclose(np.linalg.norm(Z, axis=1), np.sqrt(2 / 3))


def test_ordered_polygon_is_counterclockwise():
    Z = svg.ordered_polygon(np.array([[1.0, 0], [0, 1], [-1, 0], [0, -1]])[[0, 2, 1, 3]])
    area = 0.5 * np.sum(Z[:, 0] * np.roll(Z[:, 1], -1) - np.roll(Z[:, 0], -1) * Z[:, 1])
    assert area > 0


@pytest.mark.parametrize("V,tag,count", [
    (np.array([[0.0, 1.0], [1.0, 0.0]]), "line", 1),
    (np.eye(3), "polygon", 1),
    (np.vstack([np.eye(3), -np.eye(3)]), "line", 12),
])
def test_polytope_figures_are_valid_svg(V, tag, count):
    text = svg.polytope_svg(VPolytope(V), points=V[:1], labels=["in"], title="a < b")
    root = ET.fromstring(text)
    ns = "{http://www.w3.org/2000/svg}"
    assert len(root.findall(ns + tag)) == count
    assert len(root.findall(ns + "circle")) == 1
    assert svg.polytope_svg(VPolytope(V)) == svg.polytope_svg(VPolytope(V))
