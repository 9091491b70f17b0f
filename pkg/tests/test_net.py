import json
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from counterexamples import cube_with_merged_regions, lens_on_edge, two_great_circles
from spherepart.catalog import NAMES, build_named_net
from spherepart.geom import FOUR_PI, SpherePoint
from spherepart.net import (Face, Net, NetFormatError, NetStructureError, RegionRec,
                            Tolerances, Vertex, net_to_dict, parse_net, region_areas,
                            serialize_net, total_perimeter, validate)


def rotation(q):
    q = np.asarray(q, dtype=float)
    w, x, y, z = q / np.linalg.norm(q)
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


quaternions = st.tuples(*[st.floats(-1, 1)] * 4).filter(lambda q: sum(c * c for c in q) > 0.01)


# ---- validation


@pytest.mark.parametrize("name", NAMES)
def test_catalog_nets_pass_every_check(name):
    report = validate(build_named_net(name).net)
    assert report.ok, report.failed()
    assert [c.name for c in report.checks] == [
        "trivalence", "euler", "face_closure", "edge_sides", "same_region_adjacency",
        "vertex_angles", "curvature_pressure", "digons", "odd_face_adjacency", "target_sum",
        "region_areas"]


@pytest.mark.parametrize("name", ["tetrahedral", "cubical", "dodecahedral"])
def test_lens_digon_is_rejected(name):
    net, lens = lens_on_edge(name)
    report = validate(net)
    assert not report["digons"].passed
    assert lens in report["digons"].offenders
    assert not report["trivalence"].passed


def test_degree_four_vertex_is_rejected():
    report = validate(two_great_circles())
    assert report.failed() == ["trivalence"]
    assert report["trivalence"].offenders == (0, 1)
    assert report["euler"].passed


def test_same_region_adjacency_is_rejected():
    net, eid = cube_with_merged_regions()
    report = validate(net)
    assert not report["same_region_adjacency"].passed
    assert eid in report["same_region_adjacency"].offenders


def test_pressure_mismatch_is_reported():
    net = build_named_net("tetrahedral").net
    regions = tuple(RegionRec(r.id, r.target_area, 0.5 if r.id == 0 else 0.0) for r in net.regions)
    bad = Net(net.vertices, net.edges, regions, net.faces)
    report = validate(bad)
    assert report.failed() == ["curvature_pressure"]
    assert report["curvature_pressure"].deviation == pytest.approx(0.5)


def test_vertex_angle_tolerance_is_adjustable():
    net = build_named_net("tetrahedral").net
    v0 = net.vertices[0]
    moved = SpherePoint.of(v0.point.vec + np.array([1e-4, 0, 0]))
    shifted = Net((Vertex(v0.id, moved),) + net.vertices[1:], net.edges, net.regions, net.faces)
    assert not validate(shifted)["vertex_angles"].passed
    loose = Tolerances(angle=1e-2, area=1e-2)
    assert validate(shifted, loose).ok


def test_single_digon_face_in_three_region_net_passes():
    # the three lunes each have two corners but the same pair of outward edges
    assert validate(build_named_net("three_semicircles").net)["digons"].passed


def test_structural_errors_are_raised_before_checks():
    net = build_named_net("tetrahedral").net
    with pytest.raises(NetStructureError, match="unknown"):
        Net(net.vertices, net.edges, net.regions, net.faces + (Face(9, 0, (99,)),))
    with pytest.raises(NetStructureError, match="duplicate"):
        Net(net.vertices + net.vertices[:1], net.edges, net.regions, net.faces)


# ---- areas and perimeter


def test_areas_and_perimeters_of_catalog():
    tet = build_named_net("tetrahedral").net
    assert all(a == pytest.approx(math.pi, abs=1e-12) for a in region_areas(tet).values())
    assert total_perimeter(tet) == pytest.approx(6 * math.acos(-1 / 3), abs=1e-13)
    gc = build_named_net("great_circle").net
    assert region_areas(gc) == {0: pytest.approx(2 * math.pi), 1: pytest.approx(2 * math.pi)}
    assert total_perimeter(gc) == pytest.approx(2 * math.pi, abs=1e-14)
    assert total_perimeter(build_named_net("three_semicircles").net) == pytest.approx(3 * math.pi, abs=1e-14)


@settings(max_examples=30)
@given(st.sampled_from(NAMES), quaternions)
def test_rotation_invariance(name, q):
    net = build_named_net(name).net
    rot = net.rotated(rotation(q))
    a0, a1 = region_areas(net), region_areas(rot)
    assert sum(a1.values()) == pytest.approx(FOUR_PI, abs=1e-9)
    for rid in a0:
        assert a1[rid] == pytest.approx(a0[rid], abs=1e-9)
    assert total_perimeter(rot) == pytest.approx(total_perimeter(net), abs=1e-9)
    assert validate(rot).ok


# ---- serialization


@pytest.mark.parametrize("name", NAMES)
def test_round_trip(name):
    net = build_named_net(name).net
    text = serialize_net(net)
    assert parse_net(text) == net
    assert serialize_net(parse_net(text)) == text


def test_round_trip_with_pressures_none():
    net, _ = lens_on_edge()
    assert parse_net(serialize_net(net)) == net


def _doc():
    return net_to_dict(build_named_net("tetrahedral").net)


def test_unknown_region_names_the_edge():
    doc = _doc()
    doc["edges"][3]["left_region"] = 9
    with pytest.raises(NetFormatError, match=r"edge 4"):
        parse_net(json.dumps(doc))


def test_bad_vertex_norm_rejected():
    doc = _doc()
    doc["vertices"][1]["xyz"] = [0.9, 0.0, 0.0]
    with pytest.raises(NetFormatError, match=r"vertices\[1\]"):
        parse_net(json.dumps(doc))


def test_slightly_off_norm_is_normalized_with_warning():
    doc = _doc()
    x, y, z = doc["vertices"][0]["xyz"]
    doc["vertices"][0]["xyz"] = [x * (1 + 1e-9), y * (1 + 1e-9), z * (1 + 1e-9)]
    with pytest.warns(UserWarning, match="normalizing"):
        net = parse_net(json.dumps(doc))
    p = net.vertices[0].point
    assert math.sqrt(p.x ** 2 + p.y ** 2 + p.z ** 2) == pytest.approx(1.0, abs=1e-15)


def test_exact_norm_is_silent():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        parse_net(json.dumps(_doc()))


@pytest.mark.parametrize("mutate, match", [
    (lambda d: d.pop("faces"), "missing field 'faces'"),
    (lambda d: d.update(version=2), "unsupported version"),
    (lambda d: d["edges"][0].update(kappa="zero"), r"edges\[0\] \(edge 1\)\.kappa"),
    (lambda d: d["faces"][0].update(boundary=[1, 0]), "nonzero"),
    (lambda d: d["edges"][0].update(minor=1), "minor"),
])
def test_schema_violations(mutate, match):
    doc = _doc()
    mutate(doc)
    with pytest.raises(NetFormatError, match=match):
        parse_net(json.dumps(doc))


def test_json_syntax_error_has_position():
    with pytest.raises(NetFormatError, match="line 1, column"):
        parse_net("{\"version\": 1,,}")


def test_serialized_floats_carry_17_digits():
    text = serialize_net(build_named_net("tetrahedral").net)
    coords = json.loads(text)["vertices"][1]["xyz"]
    line = [ln for ln in text.splitlines() if "xyz" in ln][1]
    assert "-0.33333333333333331" in line
    assert coords[2] == -1 / 3
