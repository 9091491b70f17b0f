import math

import numpy as np
import pytest

from spherepart.catalog import NAMES, build_named_net, catalog_table
from spherepart.geom import FOUR_PI
from spherepart.net import meeting_angles, outgoing_tangents, region_areas, serialize_net, total_perimeter

EDGE_COUNTS = {"great_circle": 1, "three_semicircles": 3, "tetrahedral": 6, "cubical": 12,
               "dodecahedral": 30}
EDGE_LENGTH = {"three_semicircles": math.pi, "tetrahedral": math.acos(-1 / 3),
               "cubical": math.acos(1 / 3), "dodecahedral": math.acos(math.sqrt(5) / 3)}


@pytest.mark.parametrize("name", NAMES)
def test_entry_shape(name):
    entry = build_named_net(name)
    net = entry.net
    assert len(net.regions) == entry.n
    assert len(net.edges) == EDGE_COUNTS[name]
    assert all(e.kappa == 0.0 for e in net.edges)
    areas = region_areas(net)
    for a in areas.values():
        assert a == pytest.approx(FOUR_PI / entry.n, abs=1e-10)
    assert total_perimeter(net) == pytest.approx(entry.closed_form_value, abs=1e-12)


@pytest.mark.parametrize("name", [n for n in NAMES if n in EDGE_LENGTH])
def test_edge_lengths_and_angles(name):
    net = build_named_net(name).net
    for e in net.edges:
        assert net.edge_geometry(e.id).length == pytest.approx(EDGE_LENGTH[name], abs=1e-13)
    for v in net.vertices:
        gaps = meeting_angles(v.point.vec, [t for _, t in outgoing_tangents(net, v.id)])
        assert gaps == pytest.approx([2 * math.pi / 3] * 3, abs=1e-10)


def test_closed_form_values():
    assert build_named_net("tetrahedral").closed_form_value == pytest.approx(11.463799, abs=5e-7)
    assert build_named_net("cubical").closed_form_value == pytest.approx(14.77151, abs=5e-6)


def test_table_rows():
    rows = {r["name"]: r for r in catalog_table()}
    tet = rows["tetrahedral"]
    assert tet["lower_bound"] == pytest.approx(10.8828, abs=5e-5)
    assert tet["ratio"] == pytest.approx(1.0534, abs=5e-5)
    assert rows["great_circle"]["ratio"] == pytest.approx(1.0, abs=1e-15)
    assert rows["three_semicircles"]["perimeter"] == pytest.approx(3 * math.pi)
    assert rows["three_semicircles"]["lower_bound"] == pytest.approx(2 * math.pi * math.sqrt(2))
    for name, r in rows.items():
        if r["n"] > 2:
            assert r["perimeter"] > r["lower_bound"]


def test_rebuild_is_bit_stable():
    a = serialize_net(build_named_net.__wrapped__("dodecahedral").net)
    b = serialize_net(build_named_net.__wrapped__("dodecahedral").net)
    assert a == b


def test_unknown_name():
    with pytest.raises(KeyError, match="icosahedral"):
        build_named_net("icosahedral")


def test_tetrahedral_pressures_and_curvatures_vanish():
    net = build_named_net("tetrahedral").net
    p = [r.pressure for r in net.regions]
    assert np.ptp(p) == 0.0
    assert all(e.kappa == 0.0 for e in net.edges)
