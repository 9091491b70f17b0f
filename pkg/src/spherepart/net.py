"""Partitions of the sphere as trivalent curve networks.

A :class:`Net` holds vertices, edges (constant-curvature arcs labelled by
the region on each side), regions (target area, optional pressure) and
faces.  A region may own several faces.  Face boundaries are lists of
signed edge ids: ``+e`` traverses edge ``e`` from its ``from`` vertex to its
``to`` vertex, ``-e`` the other way, and the face always lies on the left
of its boundary, so ``+e`` appears in a face of ``e.left_region`` and
``-e`` in a face of ``e.right_region``.

An edge with no endpoints is a closed circle (its ``axis`` is then
required); for Euler-characteristic purposes it counts as one vertex and
one edge.
"""

from __future__ import annotations

import itertools
import json
import math
import warnings
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Iterable

import numpy as np

from . import jsonio
from .geom import (FOUR_PI, Arc, CircleSpec, GeometryError, PolygonBoundary, SpherePoint,
                   arc_between, polygon_area)

FORMAT_VERSION = 1


class NetError(ValueError):
    pass


class NetStructureError(NetError):
    """Malformed ids or references; raised before any validation check."""


class NetFormatError(NetError):
    """The net file does not follow the documented JSON schema."""


@dataclass(frozen=True)
class Vertex:
    id: int
    point: SpherePoint


@dataclass(frozen=True)
class EdgeRec:
    id: int
    start: int | None
    end: int | None
    kappa: float
    left_region: int
    right_region: int
    minor: bool = True
    axis: SpherePoint | None = None

    @property
    def is_loop(self) -> bool:
        return self.start is None


@dataclass(frozen=True)
class RegionRec:
    id: int
    target_area: float
    pressure: float | None = None


@dataclass(frozen=True)
class Face:
    id: int
    region: int
    boundary: tuple[int, ...]


@dataclass(frozen=True)
class Net:
    vertices: tuple[Vertex, ...]
    edges: tuple[EdgeRec, ...]
    regions: tuple[RegionRec, ...]
    faces: tuple[Face, ...]

    def __post_init__(self):
        for name in ("vertices", "edges", "regions", "faces"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        self._check_references()

    def _check_references(self):
        for kind, items in (("vertex", self.vertices), ("edge", self.edges),
                            ("region", self.regions), ("face", self.faces)):
            ids = [it.id for it in items]
            dup = {i for i in ids if ids.count(i) > 1}
            if dup:
                raise NetStructureError(f"duplicate {kind} ids {sorted(dup)}")
        vids = {v.id for v in self.vertices}
        rids = {r.id for r in self.regions}
        eids = {e.id for e in self.edges}
        for e in self.edges:
            if e.id <= 0:
                raise NetStructureError(f"edge {e.id}: edge ids must be positive integers")
            if (e.start is None) != (e.end is None):
                raise NetStructureError(f"edge {e.id}: open edges need both endpoints")
            if e.start is None and e.axis is None:
                raise NetStructureError(f"edge {e.id}: closed edge needs an axis")
            for end in (e.start, e.end):
                if end is not None and end not in vids:
                    raise NetStructureError(f"edge {e.id}: unknown vertex {end}")
            for side in ("left_region", "right_region"):
                if getattr(e, side) not in rids:
                    raise NetStructureError(f"edge {e.id}: unknown {side} {getattr(e, side)}")
        for f in self.faces:
            if f.region not in rids:
                raise NetStructureError(f"face {f.id}: unknown region {f.region}")
            if not f.boundary:
                raise NetStructureError(f"face {f.id}: empty boundary")
            for s in f.boundary:
                if abs(s) not in eids:
                    raise NetStructureError(f"face {f.id}: unknown edge {abs(s)}")

    @cached_property
    def vertex_map(self) -> dict[int, Vertex]:
        return {v.id: v for v in self.vertices}

    @cached_property
    def edge_map(self) -> dict[int, EdgeRec]:
        return {e.id: e for e in self.edges}

    @cached_property
    def region_map(self) -> dict[int, RegionRec]:
        return {r.id: r for r in self.regions}

    def edge_geometry(self, eid: int) -> Arc | CircleSpec:
        return self._geometry[eid]

    @cached_property
    def _geometry(self) -> dict[int, Arc | CircleSpec]:
        out = {}
        for e in self.edges:
            if e.is_loop:
                out[e.id] = CircleSpec(e.axis, math.atan2(1.0, e.kappa))
            else:
                out[e.id] = arc_between(self.vertex_map[e.start].point,
                                        self.vertex_map[e.end].point,
                                        e.kappa, e.minor, e.axis)
        return out

    def directed(self, signed: int) -> Arc | CircleSpec:
        g = self._geometry[abs(signed)]
        return g if signed > 0 else g.reversed()

    def directed_ends(self, signed: int) -> tuple[int | None, int | None]:
        e = self.edge_map[abs(signed)]
        return (e.start, e.end) if signed > 0 else (e.end, e.start)

    def face_boundary(self, face: Face) -> PolygonBoundary | CircleSpec:
        pieces = [self.directed(s) for s in face.boundary]
        if any(isinstance(p, CircleSpec) for p in pieces):
            if len(pieces) != 1:
                raise NetError(f"face {face.id}: a closed edge must be the whole boundary")
            return pieces[0]
        return PolygonBoundary(tuple(pieces))

    def rotated(self, rot: np.ndarray) -> "Net":
        """Apply the orthogonal matrix ``rot`` to every coordinate."""
        def r(p: SpherePoint | None):
            return None if p is None else SpherePoint.of(rot @ p.vec)
        return replace(self,
                       vertices=tuple(Vertex(v.id, r(v.point)) for v in self.vertices),
                       edges=tuple(replace(e, axis=r(e.axis)) for e in self.edges))


def region_areas(net: Net) -> dict[int, float]:
    areas = {r.id: 0.0 for r in net.regions}
    for f in net.faces:
        areas[f.region] += polygon_area(net.face_boundary(f))
    return areas


def total_perimeter(net: Net) -> float:
    total = 0.0
    for e in net.edges:
        g = net.edge_geometry(e.id)
        total += g.perimeter if isinstance(g, CircleSpec) else g.length
    return total


# --------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Tolerances:
    angle: float = 1e-6
    curvature: float = 1e-6
    closure: float = 1e-10
    area: float = 1e-9


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    offenders: tuple = ()
    deviation: float = 0.0
    note: str = ""


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[CheckResult, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self) -> list[dict]:
        return [{"check": c.name, "passed": c.passed, "offenders": list(c.offenders),
                 "deviation": c.deviation if math.isfinite(c.deviation) else None,
                 "note": c.note} for c in self.checks]


def _incidence(net: Net) -> dict[int, list[int]]:
    """vertex id -> incident edge ids (an edge appears once per endpoint)."""
    inc: dict[int, list[int]] = {v.id: [] for v in net.vertices}
    for e in net.edges:
        if not e.is_loop:
            inc[e.start].append(e.id)
            inc[e.end].append(e.id)
    return inc


def _check_trivalence(net, tol):
    bad = tuple(vid for vid, es in _incidence(net).items() if len(es) != 3)
    dev = max((abs(len(es) - 3) for es in _incidence(net).values()), default=0)
    return CheckResult("trivalence", not bad, bad, float(dev))


def _check_euler(net, tol):
    loops = sum(e.is_loop for e in net.edges)
    chi = len(net.vertices) + loops - len(net.edges) + len(net.faces)
    return CheckResult("euler", chi == 2, (), float(chi - 2), f"V-E+F = {chi}")


def _check_face_closure(net, tol):
    bad = []
    for f in net.faces:
        ends = [net.directed_ends(s) for s in f.boundary]
        if any(a is None for a, _ in ends):
            if len(ends) != 1:
                bad.append(f.id)
            continue
        chained = all(prev[1] == nxt[0] for prev, nxt in zip(ends, ends[1:] + ends[:1]))
        if not chained:
            bad.append(f.id)
            continue
        try:
            net.face_boundary(f)
        except GeometryError:
            bad.append(f.id)
    return CheckResult("face_closure", not bad, tuple(bad), float(len(bad)))


def _check_edge_sides(net, tol):
    """Each edge is used once forward by a face of its left region and once
    backward by a face of its right region."""
    uses: dict[int, list[tuple[int, int]]] = {e.id: [] for e in net.edges}
    for f in net.faces:
        for s in f.boundary:
            uses[abs(s)].append((1 if s > 0 else -1, f.region))
    bad = []
    for e in net.edges:
        expected = sorted([(1, e.left_region), (-1, e.right_region)])
        if sorted(uses[e.id]) != expected:
            bad.append(e.id)
    return CheckResult("edge_sides", not bad, tuple(bad), float(len(bad)))


def _check_same_region(net, tol):
    bad = [e.id for e in net.edges if e.left_region == e.right_region]
    owners: dict[int, list[Face]] = {}
    for f in net.faces:
        for s in f.boundary:
            owners.setdefault(abs(s), []).append(f)
    for eid, fs in owners.items():
        if eid not in bad and len({f.region for f in fs}) < len(fs):
            bad.append(eid)
    return CheckResult("same_region_adjacency", not bad, tuple(sorted(bad)), float(len(bad)))


def outgoing_tangents(net: Net, vid: int) -> list[tuple[int, np.ndarray]]:
    out = []
    for eid in _incidence(net)[vid]:
        e, g = net.edge_map[eid], net.edge_geometry(eid)
        if e.start == vid:
            out.append((eid, g.start_tangent()))
        if e.end == vid:
            out.append((eid, -g.end_tangent()))
    return out


def meeting_angles(point: np.ndarray, tangents: list[np.ndarray]) -> list[float]:
    """Angles between cyclically consecutive tangent directions at a point."""
    e1 = tangents[0] / np.linalg.norm(tangents[0])
    e2 = np.cross(point, e1)
    th = sorted(math.atan2(float(np.dot(t, e2)), float(np.dot(t, e1))) % (2 * math.pi)
                for t in tangents)
    return [(b - a) % (2 * math.pi) for a, b in zip(th, th[1:] + th[:1])] if len(th) > 1 else []


def _check_angles(net, tol):
    inc = _incidence(net)
    bad, worst = [], 0.0
    for v in net.vertices:
        if len(inc[v.id]) != 3:
            continue
        gaps = meeting_angles(v.point.vec, [t for _, t in outgoing_tangents(net, v.id)])
        dev = max(abs(g - 2 * math.pi / 3) for g in gaps)
        worst = max(worst, dev)
        if dev > tol.angle:
            bad.append(v.id)
    return CheckResult("vertex_angles", not bad, tuple(bad), worst)


def _check_pressure(net, tol):
    if any(r.pressure is None for r in net.regions):
        return CheckResult("curvature_pressure", True, (), 0.0, "no pressures assigned")
    p = {r.id: r.pressure for r in net.regions}
    bad, worst = [], 0.0
    for e in net.edges:
        dev = abs(e.kappa - (p[e.left_region] - p[e.right_region]))
        worst = max(worst, dev)
        if dev > tol.curvature:
            bad.append(e.id)
    return CheckResult("curvature_pressure", not bad, tuple(bad), worst)


def _union_boundary(net: Net, faces: Iterable[Face]):
    """Corners of the union of ``faces``: list of (vertex, outward edge) per
    boundary cycle, or None when the boundary is not a set of simple cycles."""
    directed = [s for f in faces for s in f.boundary]
    interior = {abs(s) for s in directed if -s in directed}
    bnd = [s for s in directed if abs(s) not in interior]
    if any(net.edge_map[abs(s)].is_loop for s in bnd):
        return None
    by_start: dict[int, list[int]] = {}
    for s in bnd:
        by_start.setdefault(net.directed_ends(s)[0], []).append(s)
    if any(len(v) != 1 for v in by_start.values()):
        return None
    inc = _incidence(net)
    cycles, seen = [], set()
    for s0 in bnd:
        if s0 in seen:
            continue
        corners, s = [], s0
        while s not in seen:
            seen.add(s)
            v = net.directed_ends(s)[1]
            nxt = by_start.get(v, [None])[0]
            if nxt is None:
                return None
            others = [e for e in inc[v] if e not in (abs(s), abs(nxt)) and e not in interior]
            if others:
                corners.append((v, others[0]))
            s = nxt
        cycles.append(corners)
    return cycles


def _face_adjacency(net: Net) -> dict[int, set[int]]:
    owner: dict[int, list[int]] = {}
    for f in net.faces:
        for s in f.boundary:
            owner.setdefault(abs(s), []).append(f.id)
    adj: dict[int, set[int]] = {f.id: set() for f in net.faces}
    for fs in owner.values():
        for a, b in itertools.permutations(fs, 2):
            adj[a].add(b)
    return adj


def _connected_face_sets(net: Net, max_size: int):
    adj = _face_adjacency(net)
    found: set[frozenset] = set()
    frontier = [frozenset([f.id]) for f in net.faces]
    found.update(frontier)
    for _ in range(max_size - 1):
        nxt = []
        for s in frontier:
            for fid in s:
                for nb in adj[fid]:
                    t = s | {nb}
                    if nb not in s and t not in found:
                        found.add(t)
                        nxt.append(t)
        frontier = nxt
    return sorted(found, key=lambda s: (len(s), sorted(s)))


def _check_digons(net, tol, max_union: int = 3):
    """Single faces, or connected unions of up to ``max_union`` faces, whose
    boundary has exactly two corners with distinct outward edges."""
    fmap = {f.id: f for f in net.faces}
    bad = []
    for fs in _connected_face_sets(net, max_union):
        if len(fs) == len(net.faces):
            continue
        cycles = _union_boundary(net, [fmap[i] for i in sorted(fs)])
        if cycles is None or len(cycles) != 1:
            continue
        corners = cycles[0]
        if len(corners) == 2 and corners[0][1] != corners[1][1]:
            bad.append(tuple(sorted(fs)) if len(fs) > 1 else next(iter(fs)))
    return CheckResult("digons", not bad, tuple(bad), float(len(bad)))


def _check_odd_faces(net, tol):
    if len(net.regions) != 4:
        return CheckResult("odd_face_adjacency", True, (), 0.0,
                           "only applies to partitions into four regions")
    region_ids = {r.id for r in net.regions}
    bad = []
    for f in net.faces:
        sides = len(f.boundary)
        if sides % 2 == 0 or net.edge_map[abs(f.boundary[0])].is_loop:
            continue
        across = set()
        for s in f.boundary:
            e = net.edge_map[abs(s)]
            across.add(e.right_region if s > 0 else e.left_region)
        if not region_ids - {f.region} <= across:
            bad.append(f.id)
    return CheckResult("odd_face_adjacency", not bad, tuple(bad), float(len(bad)))


def _check_targets(net, tol):
    total = sum(r.target_area for r in net.regions)
    dev = abs(total - FOUR_PI)
    return CheckResult("target_sum", dev <= tol.area, (), dev, f"sum = {total!r}")


def _check_areas(net, tol):
    try:
        areas = region_areas(net)
    except (GeometryError, NetError) as exc:
        return CheckResult("region_areas", False, (), math.inf, str(exc))
    devs = {r.id: abs(areas[r.id] - r.target_area) for r in net.regions}
    bad = tuple(rid for rid, d in devs.items() if d > tol.area)
    note = f"regions {list(bad)} miss their targets" if bad else ""
    return CheckResult("region_areas", not bad, bad, max(devs.values(), default=0.0), note)


CHECKS = (
    ("trivalence", _check_trivalence),
    ("euler", _check_euler),
    ("face_closure", _check_face_closure),
    ("edge_sides", _check_edge_sides),
    ("same_region_adjacency", _check_same_region),
    ("vertex_angles", _check_angles),
    ("curvature_pressure", _check_pressure),
    ("digons", _check_digons),
    ("odd_face_adjacency", _check_odd_faces),
    ("target_sum", _check_targets),
    ("region_areas", _check_areas),
)


def validate(net: Net, tolerances: Tolerances | None = None) -> ValidationReport:
    tol = tolerances or Tolerances()
    results = []
    for name, check in CHECKS:
        try:
            results.append(check(net, tol))
        except (GeometryError, NetError) as exc:
            results.append(CheckResult(name, False, (), math.inf, str(exc)))
    results = [replace(r, note=f"offenders: {list(r.offenders)}") if not (r.passed or r.note) else r
               for r in results]
    return ValidationReport(tuple(results))


# --------------------------------------------------------------------------
# file format


def net_to_dict(net: Net) -> dict:
    def xyz(p):
        return [p.x, p.y, p.z]

    edges = []
    for e in net.edges:
        d = {"id": e.id, "from": e.start, "to": e.end, "kappa": float(e.kappa),
             "left_region": e.left_region, "right_region": e.right_region, "minor": e.minor}
        if e.axis is not None:
            d["axis"] = xyz(e.axis)
        edges.append(d)
    return {
        "version": FORMAT_VERSION,
        "vertices": [{"id": v.id, "xyz": xyz(v.point)} for v in net.vertices],
        "edges": edges,
        "regions": [{"id": r.id, "target_area": float(r.target_area), "pressure": r.pressure}
                    for r in net.regions],
        "faces": [{"id": f.id, "region": f.region, "boundary": list(f.boundary)} for f in net.faces],
    }


def serialize_net(net: Net) -> str:
    return jsonio.dumps(net_to_dict(net)) + "\n"


def _need(obj: dict, key: str, kinds, where: str):
    if not isinstance(obj, dict):
        raise NetFormatError(f"{where}: expected an object")
    if key not in obj:
        raise NetFormatError(f"{where}: missing field '{key}'")
    val = obj[key]
    if isinstance(val, bool) and bool not in kinds:
        raise NetFormatError(f"{where}.{key}: expected {'/'.join(k.__name__ for k in kinds)}")
    if not isinstance(val, kinds):
        raise NetFormatError(f"{where}.{key}: expected {'/'.join(k.__name__ for k in kinds)}, "
                             f"got {type(val).__name__}")
    return val


def _point(raw, where: str) -> SpherePoint:
    if (not isinstance(raw, list) or len(raw) != 3
            or not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in raw)):
        raise NetFormatError(f"{where}: expected three numbers")
    norm = math.sqrt(sum(float(c) ** 2 for c in raw))
    if abs(norm - 1.0) > 1e-6:
        raise NetFormatError(f"{where}: not a unit vector (norm {norm:.9g})")
    if abs(norm - 1.0) > 1e-12:
        warnings.warn(f"{where}: norm {norm!r} differs from 1, normalizing", stacklevel=3)
    return SpherePoint.of([float(c) for c in raw])


def net_from_dict(doc: dict) -> Net:
    num = (int, float)
    if _need(doc, "version", (int,), "net") != FORMAT_VERSION:
        raise NetFormatError(f"net.version: unsupported version {doc['version']}")
    vertices = []
    for i, v in enumerate(_need(doc, "vertices", (list,), "net")):
        w = f"vertices[{i}]"
        vertices.append(Vertex(_need(v, "id", (int,), w), _point(_need(v, "xyz", (list,), w), f"{w}.xyz")))
    edges = []
    for i, e in enumerate(_need(doc, "edges", (list,), "net")):
        w = f"edges[{i}]"
        eid = _need(e, "id", (int,), w)
        w = f"edges[{i}] (edge {eid})"
        start = _need(e, "from", (int, type(None)), w)
        end = _need(e, "to", (int, type(None)), w)
        axis = _point(e["axis"], f"{w}.axis") if e.get("axis") is not None else None
        edges.append(EdgeRec(eid, start, end, float(_need(e, "kappa", num, w)),
                             _need(e, "left_region", (int,), w), _need(e, "right_region", (int,), w),
                             _need(e, "minor", (bool,), w), axis))
    regions = []
    for i, r in enumerate(_need(doc, "regions", (list,), "net")):
        w = f"regions[{i}]"
        p = _need(r, "pressure", (int, float, type(None)), w)
        regions.append(RegionRec(_need(r, "id", (int,), w), float(_need(r, "target_area", num, w)),
                                 None if p is None else float(p)))
    faces = []
    for i, f in enumerate(_need(doc, "faces", (list,), "net")):
        w = f"faces[{i}]"
        bnd = _need(f, "boundary", (list,), w)
        if not all(isinstance(s, int) and not isinstance(s, bool) and s != 0 for s in bnd):
            raise NetFormatError(f"{w}.boundary: expected nonzero signed edge ids")
        faces.append(Face(_need(f, "id", (int,), w), _need(f, "region", (int,), w), tuple(bnd)))
    try:
        return Net(tuple(vertices), tuple(edges), tuple(regions), tuple(faces))
    except NetStructureError as exc:
        raise NetFormatError(str(exc)) from exc


def parse_net(text: str) -> Net:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetFormatError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return net_from_dict(doc)
