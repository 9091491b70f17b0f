"""The five regular geodesic partitions: n = 2, 3, 4, 6, 12."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .geom import FOUR_PI, SpherePoint
from .net import EdgeRec, Face, Net, RegionRec, Vertex, total_perimeter

NAMES = ("great_circle", "three_semicircles", "tetrahedral", "cubical", "dodecahedral")


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    n: int
    net: Net
    closed_form: str
    closed_form_value: float


def _polyhedral_net(verts: np.ndarray, normals: np.ndarray) -> Net:
    """Radially projected polyhedron, one region per face.

    ``normals`` are the outward face directions; each face is the set of
    vertices with maximal dot product, ordered counterclockwise about the
    normal so the face lies on the left of its boundary.
    """
    verts = verts / np.linalg.norm(verts, axis=1)[:, None]
    faces = []
    for c in normals:
        c = c / np.linalg.norm(c)
        d = verts @ c
        idx = np.flatnonzero(d > d.max() - 1e-9)
        e1 = verts[idx[0]] - np.dot(verts[idx[0]], c) * c
        e1 /= np.linalg.norm(e1)
        e2 = np.cross(c, e1)
        ang = [math.atan2(np.dot(verts[i], e2), np.dot(verts[i], e1)) for i in idx]
        faces.append([int(i) for _, i in sorted(zip(ang, idx))])

    edge_ids: dict[tuple[int, int], int] = {}
    left: dict[int, int] = {}
    right: dict[int, int] = {}
    boundaries = []
    for fid, cyc in enumerate(faces):
        signed = []
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            key = (min(a, b), max(a, b))
            eid = edge_ids.setdefault(key, len(edge_ids) + 1)
            if a < b:
                left[eid] = fid
                signed.append(eid)
            else:
                right[eid] = fid
                signed.append(-eid)
        boundaries.append(tuple(signed))

    target = FOUR_PI / len(faces)
    return Net(
        vertices=tuple(Vertex(i, SpherePoint.of(v)) for i, v in enumerate(verts)),
        edges=tuple(EdgeRec(eid, a, b, 0.0, left[eid], right[eid]) for (a, b), eid in edge_ids.items()),
        regions=tuple(RegionRec(f, target, 0.0) for f in range(len(faces))),
        faces=tuple(Face(f, f, b) for f, b in enumerate(boundaries)),
    )


def _tetrahedral() -> Net:
    s2, s6 = math.sqrt(2.0), math.sqrt(6.0)
    verts = np.array([[0.0, 0.0, 1.0],
                      [2.0 * s2 / 3.0, 0.0, -1.0 / 3.0],
                      [-s2 / 3.0, s6 / 3.0, -1.0 / 3.0],
                      [-s2 / 3.0, -s6 / 3.0, -1.0 / 3.0]])
    return _polyhedral_net(verts, -verts)


def _cubical() -> Net:
    verts = np.array([[x, y, z] for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)], dtype=float)
    normals = np.vstack([np.eye(3), -np.eye(3)])
    return _polyhedral_net(verts, normals)


def _dodecahedral() -> Net:
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    verts = [[x, y, z] for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)]
    for a in (-1, 1):
        for b in (-1, 1):
            verts += [[0, a / phi, b * phi], [a / phi, b * phi, 0], [b * phi, 0, a / phi]]
    # face centres are the vertices of the dual icosahedron
    normals = []
    for a in (-1, 1):
        for b in (-1, 1):
            normals += [[0, a * phi, b], [a * phi, b, 0], [b, 0, a * phi]]
    return _polyhedral_net(np.array(verts, dtype=float), np.array(normals, dtype=float))


def _great_circle() -> Net:
    return Net(
        vertices=(),
        edges=(EdgeRec(1, None, None, 0.0, 0, 1, True, SpherePoint(0.0, 0.0, 1.0)),),
        regions=(RegionRec(0, 2 * math.pi, 0.0), RegionRec(1, 2 * math.pi, 0.0)),
        faces=(Face(0, 0, (1,)), Face(1, 1, (-1,))),
    )


def _three_semicircles() -> Net:
    north, south = SpherePoint(0.0, 0.0, 1.0), SpherePoint(0.0, 0.0, -1.0)
    edges = []
    for k in range(3):
        lon = 2 * math.pi * k / 3
        # meridian at longitude lon runs north to south; the rotation axis is
        # the equatorial direction 90 degrees east of it
        axis = SpherePoint(-math.sin(lon), math.cos(lon), 0.0)
        # the lune east of meridian k is region k, on the left when heading south
        edges.append(EdgeRec(k + 1, 0, 1, 0.0, k, (k - 1) % 3, True, axis))
    target = FOUR_PI / 3
    return Net(
        vertices=(Vertex(0, north), Vertex(1, south)),
        edges=tuple(edges),
        regions=tuple(RegionRec(k, target, 0.0) for k in range(3)),
        faces=tuple(Face(k, k, (k + 1, -(((k + 1) % 3) + 1))) for k in range(3)),
    )


_BUILDERS = {
    "great_circle": (2, _great_circle, "2*pi", 2 * math.pi),
    "three_semicircles": (3, _three_semicircles, "3*pi", 3 * math.pi),
    "tetrahedral": (4, _tetrahedral, "6*arccos(-1/3)", 6 * math.acos(-1.0 / 3.0)),
    "cubical": (6, _cubical, "12*arccos(1/3)", 12 * math.acos(1.0 / 3.0)),
    "dodecahedral": (12, _dodecahedral, "30*arccos(sqrt(5)/3)", 30 * math.acos(math.sqrt(5.0) / 3.0)),
}


@lru_cache(maxsize=None)
def build_named_net(name: str) -> CatalogEntry:
    try:
        n, builder, expr, value = _BUILDERS[name]
    except KeyError:
        raise KeyError(f"unknown partition {name!r}; choose from {', '.join(NAMES)}") from None
    return CatalogEntry(name, n, builder(), expr, value)


def catalog_table() -> list[dict]:
    rows = []
    for name in NAMES:
        entry = build_named_net(name)
        per = total_perimeter(entry.net)
        bound = 2 * math.pi * math.sqrt(entry.n - 1)
        rows.append({
            "name": name,
            "n": entry.n,
            "perimeter": per,
            "closed_form": entry.closed_form,
            "region_area": FOUR_PI / entry.n,
            "lower_bound": bound,
            "ratio": per / bound,
        })
    return rows
