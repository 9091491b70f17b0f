"""Nets that violate exactly the structural rules named by each builder."""

import math

from spherepart.catalog import build_named_net
from spherepart.geom import SpherePoint
from spherepart.net import EdgeRec, Face, Net, RegionRec, Vertex


def lens_on_edge(name="tetrahedral", delta=0.3):
    """Replace one edge a->b by two arcs of curvature +-delta enclosing a new face."""
    net = build_named_net(name).net
    e = net.edges[0]
    new_region = max(r.id for r in net.regions) + 1
    lens_face = max(f.id for f in net.faces) + 1
    e1 = EdgeRec(e.id, e.start, e.end, delta, new_region, e.right_region)
    e2_id = max(x.id for x in net.edges) + 1
    e2 = EdgeRec(e2_id, e.start, e.end, -delta, e.left_region, new_region)
    faces = []
    for f in net.faces:
        bnd = tuple(e2_id if s == e.id else s for s in f.boundary)
        faces.append(Face(f.id, f.region, bnd))
    faces.append(Face(lens_face, new_region, (e.id, -e2_id)))
    regions = net.regions + (RegionRec(new_region, 0.1, None),)
    return Net(net.vertices, (e1,) + net.edges[1:] + (e2,), regions, tuple(faces)), lens_face


def two_great_circles():
    north, south = SpherePoint(0.0, 0.0, 1.0), SpherePoint(0.0, 0.0, -1.0)
    edges = []
    for k in range(4):
        lon = k * math.pi / 2
        axis = SpherePoint(-math.sin(lon), math.cos(lon), 0.0)
        edges.append(EdgeRec(k + 1, 0, 1, 0.0, k, (k - 1) % 4, True, axis))
    return Net((Vertex(0, north), Vertex(1, south)), tuple(edges),
               tuple(RegionRec(k, math.pi, 0.0) for k in range(4)),
               tuple(Face(k, k, (k + 1, -((k + 1) % 4 + 1))) for k in range(4)))


def cube_with_merged_regions():
    net = build_named_net("cubical").net
    e = net.edges[0]
    keep, gone = e.left_region, e.right_region
    fix = lambda r: keep if r == gone else r
    edges = tuple(EdgeRec(x.id, x.start, x.end, x.kappa, fix(x.left_region), fix(x.right_region))
                  for x in net.edges)
    faces = tuple(Face(f.id, fix(f.region), f.boundary) for f in net.faces)
    regions = tuple(RegionRec(r.id, 2 * r.target_area if r.id == keep else r.target_area, 0.0)
                    for r in net.regions if r.id != gone)
    return Net(net.vertices, edges, regions, faces), e.id
