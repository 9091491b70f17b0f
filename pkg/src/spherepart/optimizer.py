"""Perimeter minimization over polyline nets with area constraints.

Each edge of a :class:`~spherepart.net.Net` becomes a polyline of points on
the sphere joined by great-circle segments; net vertices are shared rows
of one point array.  Region areas follow from Gauss-Bonnet for geodesic
polygons, ``area = 2 pi - sum(turning angles)``, so both the objective
and the constraints are smooth functions of the point coordinates with
closed-form gradients.

The solver is an augmented Lagrangian method on the merit function

    P(X) - sum_r lam_r c_r(X) + mu/2 * sum_r c_r(X)^2,   c_r = area_r - target_r

with an L-BFGS inner loop.  Points are kept on the sphere by renormalizing
after every step, and gradients are projected onto tangent planes.  With
this sign convention the multipliers are region pressures: an edge's
curvature equals ``lam[left] - lam[right]`` at a stationary point.
"""

from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .geom import TWO_PI, SpherePoint, arc_between, GeometryError
from .net import EdgeRec, Net, RegionRec, Tolerances, Vertex, meeting_angles

log = logging.getLogger(__name__)

COLLISION_LENGTH = 1e-9
ANTIPODAL_GAP = 1e-6
_FLAT = 1e-14             # relative merit change below which values are noise
FOLD_ANGLE = 0.9 * math.pi   # larger turning angles only arise from a polyline folding back


@dataclass(frozen=True, eq=False)
class DiscretizedNet:
    """Point array plus the index structure inherited from a net.

    ``edge_paths[e]`` lists the rows of edge ``e`` from its ``from`` vertex
    to its ``to`` vertex (both included).  For closed edges the path is the
    cycle of rows without repetition.
    """

    net: Net
    points: np.ndarray
    vertex_rows: dict
    edge_paths: dict
    targets: np.ndarray
    pressures: np.ndarray | None = None

    @property
    def region_ids(self) -> tuple[int, ...]:
        return tuple(r.id for r in self.net.regions)

    def with_points(self, points: np.ndarray, pressures=None) -> "DiscretizedNet":
        return replace(self, points=np.array(points, dtype=float),
                       pressures=self.pressures if pressures is None else np.asarray(pressures))

    def with_targets(self, targets) -> "DiscretizedNet":
        return replace(self, targets=np.asarray(targets, dtype=float))

    @cached_property
    def topology(self) -> "_Topology":
        return _Topology.build(self)


@dataclass(frozen=True)
class _Topology:
    segments: np.ndarray       # (S, 2) rows, each edge segment once
    segment_edge: np.ndarray   # (S,) edge id of each segment
    corners: np.ndarray        # (C, 3) rows (prev, here, next) around faces
    corner_face: np.ndarray    # (C,) face index
    face_region: np.ndarray    # (F,) region index
    n_regions: int

    @classmethod
    def build(cls, d: DiscretizedNet) -> "_Topology":
        net = d.net
        segs, seg_edge = [], []
        for e in net.edges:
            path = d.edge_paths[e.id]
            pairs = np.stack([path[:-1], path[1:]], axis=1)
            if e.is_loop:
                pairs = np.vstack([pairs, [path[-1], path[0]]])
            segs.append(pairs)
            seg_edge.append(np.full(len(pairs), e.id))
        region_index = {r.id: i for i, r in enumerate(net.regions)}
        corners, corner_face = [], []
        for fi, f in enumerate(net.faces):
            loop = face_loop(d, f.boundary)
            k = len(loop)
            corners.append(np.stack([np.roll(loop, 1), loop, np.roll(loop, -1)], axis=1))
            corner_face.append(np.full(k, fi))
        return cls(np.vstack(segs), np.concatenate(seg_edge), np.vstack(corners),
                   np.concatenate(corner_face),
                   np.array([region_index[f.region] for f in net.faces]), len(net.regions))


def face_loop(d: DiscretizedNet, boundary) -> np.ndarray:
    parts = []
    for s in boundary:
        e = d.net.edge_map[abs(s)]
        path = d.edge_paths[e.id]
        path = path if s > 0 else path[::-1]
        parts.append(path if e.is_loop else path[:-1])
    return np.concatenate(parts)


def discretize(net: Net, m: int = 16) -> DiscretizedNet:
    """Sample every edge at ``m`` points (endpoints included)."""
    if m < 3:
        raise ValueError("polyline resolution m must be at least 3")
    rows: list[np.ndarray] = []
    vertex_rows = {}
    for v in net.vertices:
        vertex_rows[v.id] = len(rows)
        rows.append(v.point.vec)
    paths = {}
    for e in net.edges:
        g = net.edge_geometry(e.id)
        if e.is_loop:
            pts = g.sample(m)
            idx = np.arange(len(rows), len(rows) + m)
        else:
            pts = g.sample(m)[1:-1]
            idx = np.concatenate([[vertex_rows[e.start]],
                                  np.arange(len(rows), len(rows) + m - 2),
                                  [vertex_rows[e.end]]])
        rows.extend(pts)
        paths[e.id] = idx
    targets = np.array([r.target_area for r in net.regions])
    return DiscretizedNet(net, np.array(rows), vertex_rows, paths, targets)


# --------------------------------------------------------------------------
# objective, constraints and their gradients


def _rowdot(a, b):
    return np.einsum("ij,ij->i", a, b)


def _scatter(n: int, rows: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    out = np.empty((n, 3))
    for k in range(3):
        out[:, k] = np.bincount(rows, weights=vecs[:, k], minlength=n)
    return out


def _tangent(points, g):
    return g - _rowdot(points, g)[:, None] * points


def _segment_terms(X, topo, with_grad=True):
    a, b = X[topo.segments[:, 0]], X[topo.segments[:, 1]]
    cr = np.cross(a, b)
    sn = np.linalg.norm(cr, axis=1)
    cs = _rowdot(a, b)
    lengths = np.arctan2(sn, cs)
    if not with_grad:
        return lengths, None
    safe = np.where(sn > 0, sn, 1.0)[:, None]
    # d(length)/da = -(unit tangent at a pointing to b)
    ga = -(b - cs[:, None] * a) / safe
    gb = -(a - cs[:, None] * b) / safe
    G = _scatter(len(X), topo.segments[:, 0], ga) + _scatter(len(X), topo.segments[:, 1], gb)
    return lengths, G


def _corner_terms(X, topo, with_grad=True):
    """Left turning angle at every face corner, and its gradient pieces."""
    a = X[topo.corners[:, 0]]
    b = X[topo.corners[:, 1]]
    c = X[topo.corners[:, 2]]
    bxc = np.cross(b, c)
    y = _rowdot(a, bxc)
    ab, bc, ac = _rowdot(a, b), _rowdot(b, c), _rowdot(a, c)
    x = ab * bc - ac
    alpha = np.arctan2(y, x)
    if not with_grad:
        return alpha, None
    # a corner with coincident points has no defined angle; keep the gradient finite
    r2 = x * x + y * y
    r2 = np.where(r2 > 0, r2, 1.0)[:, None]
    xs, ys = x[:, None], y[:, None]
    da = (xs * bxc - ys * (bc[:, None] * b - c)) / r2
    db = (xs * np.cross(c, a) - ys * (bc[:, None] * a + ab[:, None] * c)) / r2
    dc = (xs * np.cross(a, b) - ys * (ab[:, None] * b - a)) / r2
    return alpha, (da, db, dc)


def perimeter(dnet: DiscretizedNet) -> float:
    """Total polyline length, each edge counted once."""
    lengths, _ = _segment_terms(dnet.points, dnet.topology, with_grad=False)
    return float(np.sum(lengths))


objective = perimeter


def face_areas(dnet: DiscretizedNet) -> np.ndarray:
    topo = dnet.topology
    alpha, _ = _corner_terms(dnet.points, topo, with_grad=False)
    return TWO_PI - np.bincount(topo.corner_face, alpha, minlength=len(topo.face_region))


def region_area_array(dnet: DiscretizedNet) -> np.ndarray:
    topo = dnet.topology
    return np.bincount(topo.face_region, face_areas(dnet), minlength=topo.n_regions)


@dataclass(frozen=True)
class Residual:
    region: int
    value: float
    reliable: bool = True


def constraint_residuals(dnet: DiscretizedNet) -> list[Residual]:
    """``area - target`` per region, in region order.

    A residual is marked unreliable when a face of its region has a
    (near-)reversal or a collapsed segment, which is how a self-crossing
    boundary first shows up.
    """
    topo = dnet.topology
    alpha, _ = _corner_terms(dnet.points, topo, with_grad=False)
    lengths, _ = _segment_terms(dnet.points, topo, with_grad=False)
    areas = region_area_array(dnet)
    bad_corner = np.abs(alpha) > math.pi - 1e-6
    bad_region = np.zeros(topo.n_regions, dtype=bool)
    bad_region[topo.face_region[topo.corner_face[bad_corner]]] = True
    short_rows = np.unique(topo.segments[lengths < COLLISION_LENGTH])
    if len(short_rows):
        touched = np.isin(topo.corners[:, 1], short_rows)
        bad_region[topo.face_region[topo.corner_face[touched]]] = True
    return [Residual(rid, float(areas[i] - dnet.targets[i]), not bad_region[i])
            for i, rid in enumerate(dnet.region_ids)]


def _evaluate(X, topo, targets, lam, mu):
    """Merit value, tangent gradient, perimeter, residuals, KKT gradient."""
    lengths, gP = _segment_terms(X, topo)
    alpha, (da, db, dc) = _corner_terms(X, topo)
    face_sum = np.bincount(topo.corner_face, alpha, minlength=len(topo.face_region))
    areas = np.bincount(topo.face_region, TWO_PI - face_sum, minlength=topo.n_regions)
    c = areas - targets
    per = float(np.sum(lengths))
    merit = per - float(lam @ c) + 0.5 * mu * float(c @ c)

    # grad area_r = -sum over its corners of grad alpha; coefficient of grad c_r is (-lam + mu c)
    coef = (lam - mu * c)[topo.face_region[topo.corner_face]][:, None]
    n = len(X)
    rows = topo.corners
    gA = _scatter(n, rows[:, 0], coef * da) + _scatter(n, rows[:, 1], coef * db) + \
        _scatter(n, rows[:, 2], coef * dc)
    g = _tangent(X, gP + gA)
    return merit, g, per, c, lengths


def gradient(dnet: DiscretizedNet, lam=None, mu: float = 0.0) -> np.ndarray:
    """Tangent gradient of ``P - lam.c + mu/2 |c|^2`` at every point, shape (N, 3)."""
    lam = np.zeros(len(dnet.targets)) if lam is None else np.asarray(lam, dtype=float)
    return _evaluate(dnet.points, dnet.topology, dnet.targets, lam, mu)[1]


def merit(dnet: DiscretizedNet, lam=None, mu: float = 0.0) -> float:
    lam = np.zeros(len(dnet.targets)) if lam is None else np.asarray(lam, dtype=float)
    return _evaluate(dnet.points, dnet.topology, dnet.targets, lam, mu)[0]


# --------------------------------------------------------------------------
# perturbation


def _exp_map(p: np.ndarray, w: np.ndarray) -> np.ndarray:
    th = np.linalg.norm(w, axis=1)
    safe = np.where(th > 0, th, 1.0)
    out = p * np.cos(th)[:, None] + w * (np.sin(th) / safe)[:, None]
    return out / np.linalg.norm(out, axis=1)[:, None]


def _clip(w: np.ndarray, mag: float) -> np.ndarray:
    n = np.linalg.norm(w, axis=1)
    scale = np.where(n > mag, mag / np.where(n > 0, n, 1.0), 1.0)
    return w * scale[:, None]


def _left_normals(pts: np.ndarray, closed: bool) -> np.ndarray:
    if closed:
        t = np.roll(pts, -1, axis=0) - np.roll(pts, 1, axis=0)
    else:
        t = np.gradient(pts, axis=0)
    nrm = np.cross(pts, t)
    return nrm / np.linalg.norm(nrm, axis=1)[:, None]


def perturb(dnet: DiscretizedNet, magnitude: float, seed: int) -> DiscretizedNet:
    """Smooth pseudo-random displacement of every point by at most ``magnitude`` rad.

    Vertices move in a random tangent direction; edge interiors follow by
    linear interpolation of their end displacements plus random low-order
    sine bumps along the edge normal, so polylines stay simple.
    """
    if magnitude < 0:
        raise ValueError("magnitude must be non-negative")
    if magnitude == 0:
        return dnet.with_points(dnet.points.copy())
    rng = np.random.default_rng(seed)
    X = dnet.points
    W = np.zeros_like(X)
    moved = np.zeros(len(X), dtype=bool)
    for vid in sorted(dnet.vertex_rows):
        r = dnet.vertex_rows[vid]
        v = rng.normal(size=3)
        v -= np.dot(v, X[r]) * X[r]
        W[r] = v / np.linalg.norm(v) * rng.uniform(0.0, magnitude)
        moved[r] = True
    for e in sorted(dnet.net.edges, key=lambda e: e.id):
        path = dnet.edge_paths[e.id]
        pts = X[path]
        nu = _left_normals(pts, e.is_loop)
        if e.is_loop:
            th = TWO_PI * np.arange(len(path)) / len(path)
            amp = rng.uniform(-0.5, 0.5, size=5) * magnitude
            bump = amp[0] + amp[1] * np.cos(2 * th) + amp[2] * np.sin(2 * th) \
                + amp[3] * np.cos(3 * th) + amp[4] * np.sin(3 * th)
            w = bump[:, None] * nu
            sel = slice(None)
        else:
            s = np.linspace(0.0, 1.0, len(path))[1:-1]
            amp = rng.uniform(-0.5, 0.5, size=2) * magnitude
            w = ((1 - s)[:, None] * W[path[0]] + s[:, None] * W[path[-1]]
                 + (amp[0] * np.sin(np.pi * s) + amp[1] * np.sin(2 * np.pi * s))[:, None] * nu[1:-1])
            sel = slice(1, -1)
        rows = path[sel]
        W[rows] = w
        moved[rows] = True
    W = _clip(_tangent(X, W), magnitude)
    return dnet.with_points(_exp_map(X, W))


# --------------------------------------------------------------------------
# solver


@dataclass(frozen=True)
class OptimizerConfig:
    max_outer_iterations: int = 40
    max_inner_iterations: int = 4000
    initial_penalty: float = 10.0
    penalty_growth: float = 10.0
    penalty_cap: float = 1e8
    residual_drop: float = 4.0     # grow the penalty unless |c| shrinks by this factor
    armijo: float = 1e-4
    backtrack: float = 0.5
    memory: int = 12
    tol_g: float = 1e-7            # KKT gradient norm
    tol_c: float = 1e-9            # max |area - target|
    max_step_fraction: float = 0.5  # of the shortest segment, per point per step
    preconditioner_shift: float = 1.0
    seed: int = 0
    m: int = 16

    def __post_init__(self):
        for name in ("tol_g", "tol_c", "armijo", "backtrack", "initial_penalty"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class TraceRecord:
    outer: int
    inner: int
    perimeter: float
    residual: float
    grad_norm: float
    merit: float
    penalty: float
    multipliers: tuple[float, ...]


@dataclass
class ConvergenceTrace:
    records: list[TraceRecord] = field(default_factory=list)
    status: str = "running"
    kkt_norm: float = math.inf
    flagged_edges: tuple[int, ...] = ()

    @property
    def converged(self) -> bool:
        return self.status == "converged"

    def to_csv(self) -> str:
        lines = ["iter,outer,perimeter,residual,grad_norm,merit"]
        for i, r in enumerate(self.records):
            lines.append(f"{i},{r.outer},{r.perimeter:.17g},{r.residual:.17g},"
                         f"{r.grad_norm:.17g},{r.merit:.17g}")
        return "\n".join(lines) + "\n"


def _folded(X, topo) -> bool:
    alpha, _ = _corner_terms(X, topo, with_grad=False)
    return bool(np.max(np.abs(alpha)) > FOLD_ANGLE)


def _preconditioner(X, topo, shift):
    """Sparse factor of ``L/h + shift*I`` with ``L`` the polyline graph Laplacian.

    Length has stiffness ~1/h along each polyline, so plain gradient steps
    degrade as the mesh is refined; this Sobolev-type metric removes that.
    """
    n = len(X)
    a, b = topo.segments[:, 0], topo.segments[:, 1]
    w = 1.0 / np.maximum(np.arccos(np.clip(_rowdot(X[a], X[b]), -1.0, 1.0)), 1e-6)
    W = sp.coo_matrix((np.concatenate([w, w]), (np.concatenate([a, b]), np.concatenate([b, a]))),
                      shape=(n, n)).tocsr()
    L = sp.diags(np.asarray(W.sum(axis=1)).ravel()) - W
    return splu((L + shift * sp.identity(n)).tocsc())


def _normalize(X):
    return X / np.linalg.norm(X, axis=1)[:, None]


def _lbfgs(X, topo, targets, lam, mu, tol, cfg: OptimizerConfig, trace, outer, precond):
    f, g, per, c, lengths = _evaluate(X, topo, targets, lam, mu)
    S: deque = deque(maxlen=cfg.memory)
    Y: deque = deque(maxlen=cfg.memory)
    for it in range(cfg.max_inner_iterations):
        gnorm = float(np.linalg.norm(g))
        if gnorm < tol:
            return X, "ok"
        if np.min(lengths) < COLLISION_LENGTH:
            return X, "collision"
        # two-loop recursion
        q = g.ravel().copy()
        hist = []
        for s, y in zip(reversed(S), reversed(Y)):
            rho = 1.0 / float(y @ s)
            a = rho * float(s @ q)
            q -= a * y
            hist.append((rho, a, s, y))
        q = precond.solve(q.reshape(X.shape)).ravel()
        for rho, a, s, y in reversed(hist):
            q += (a - rho * float(y @ q)) * s
        d = -_tangent(X, q.reshape(X.shape))
        slope = float(np.sum(g * d))
        if slope >= 0:
            S.clear()
            Y.clear()
            d = -_tangent(X, precond.solve(g))
            slope = float(np.sum(g * d))
        cap = cfg.max_step_fraction * float(np.min(lengths))
        t = min(1.0, cap / float(np.max(np.linalg.norm(d, axis=1))))
        while True:
            Xn = _normalize(X + t * d)
            fn, gn, pern, cn, ln = _evaluate(Xn, topo, targets, lam, mu)
            if not _folded(Xn, topo):
                if fn <= f + cfg.armijo * t * slope:
                    break
                # near the optimum the merit change drowns in rounding; fall back on
                # the slope at the trial point (approximate Wolfe test)
                dn = float(np.sum(gn * _tangent(Xn, d)))
                if fn <= f + _FLAT * abs(f) and 0.9 * slope <= dn <= -0.8 * slope:
                    break
            t *= cfg.backtrack
            if t < 1e-20:
                return X, "stalled"
        s = (Xn - X).ravel()
        if not np.any(s):
            return X, "stalled"
        y = (gn - g).ravel()
        if float(s @ y) > 1e-12 * float(np.linalg.norm(s) * np.linalg.norm(y)):
            S.append(s)
            Y.append(y)
        X, f, g, per, c, lengths = Xn, fn, gn, pern, cn, ln
        trace.records.append(TraceRecord(outer, it, per, float(np.max(np.abs(c))),
                                         float(np.linalg.norm(g)), f, mu, tuple(lam)))
    return X, "max_inner"


def minimize(initial: DiscretizedNet, config: OptimizerConfig | None = None):
    """Augmented-Lagrangian minimization at fixed topology.

    Returns the best iterate (with ``pressures`` set to the multipliers,
    shifted so the smallest is 0) and its :class:`ConvergenceTrace`.
    """
    cfg = config or OptimizerConfig()
    topo = initial.topology
    targets = initial.targets
    X = _normalize(initial.points)
    lam = np.zeros(topo.n_regions)
    mu = cfg.initial_penalty
    trace = ConvergenceTrace()
    zero = np.zeros_like(lam)

    _, _, _, c, _ = _evaluate(X, topo, targets, lam, mu)
    prev_res = float(np.max(np.abs(c)))
    status = "max_iterations"
    for outer in range(cfg.max_outer_iterations):
        _, g_kkt, per, c, lengths = _evaluate(X, topo, targets, lam, 0.0)
        kkt = float(np.linalg.norm(g_kkt))
        res = float(np.max(np.abs(c)))
        trace.kkt_norm = kkt
        if kkt < cfg.tol_g and res < cfg.tol_c:
            status = "converged"
            break
        inner_tol = max(0.5 * cfg.tol_g, 1e-2 * 10.0 ** (-outer))
        X, inner_status = _lbfgs(X, topo, targets, lam, mu, inner_tol, cfg, trace, outer,
                                 _preconditioner(X, topo, cfg.preconditioner_shift))
        if inner_status == "collision":
            status = "collision"
            _, _, _, _, lengths = _evaluate(X, topo, targets, lam, mu)
            trace.flagged_edges = tuple(sorted(set(
                int(e) for e in topo.segment_edge[lengths < COLLISION_LENGTH])))
            break
        _, _, _, c, _ = _evaluate(X, topo, targets, zero, 0.0)
        res = float(np.max(np.abs(c)))
        lam = lam - mu * c
        if res > cfg.tol_c and res > prev_res / cfg.residual_drop:
            mu = min(mu * cfg.penalty_growth, cfg.penalty_cap)
        prev_res = res
        log.debug("outer %d: per=%.12f res=%.3e mu=%.1e inner=%s", outer, per, res, mu, inner_status)
    else:
        _, g_kkt, _, c, _ = _evaluate(X, topo, targets, lam, 0.0)
        trace.kkt_norm = float(np.linalg.norm(g_kkt))
        if trace.kkt_norm < cfg.tol_g and float(np.max(np.abs(c))) < cfg.tol_c:
            status = "converged"
    trace.status = status
    return initial.with_points(X, pressures=lam - lam.min()), trace


# --------------------------------------------------------------------------
# structure of a converged net


@dataclass(frozen=True)
class EdgeFit:
    edge: int
    kappa: float
    deviation: float            # max |distance to fitted axis - fitted radius|
    pressure_mismatch: float | None
    axis: np.ndarray


@dataclass(frozen=True)
class EdgeStructure:
    edges: tuple[EdgeFit, ...]
    vertex_angles: dict          # vertex id -> meeting angles in degrees

    @property
    def max_abs_kappa(self) -> float:
        return max((abs(e.kappa) for e in self.edges), default=0.0)

    @property
    def max_angle_error_deg(self) -> float:
        return max((abs(a - 120.0) for angs in self.vertex_angles.values() for a in angs), default=0.0)

    @property
    def max_pressure_mismatch(self) -> float:
        vals = [e.pressure_mismatch for e in self.edges if e.pressure_mismatch is not None]
        return max(vals, default=0.0)

    @property
    def max_deviation(self) -> float:
        return max((e.deviation for e in self.edges), default=0.0)


def fit_circle(pts: np.ndarray, closed: bool = False) -> tuple[np.ndarray, float, float]:
    """Least-squares plane fit ``u.x = d``; returns (axis, kappa, deviation).

    The axis is oriented so the points run counterclockwise about it.
    """
    if len(pts) < 3:
        raise GeometryError("edge too short to fit a circle")
    centroid = pts.mean(axis=0)
    _, _, vt = np.linalg.svd(pts - centroid)
    u = vt[-1]
    steps = np.cross(pts[:-1], pts[1:]).sum(axis=0)
    if closed:
        steps = steps + np.cross(pts[-1], pts[0])
    if float(np.dot(u, steps)) < 0:
        u = -u
    d = float(np.clip(np.dot(u, centroid), -1.0, 1.0))
    rho = math.acos(d)
    kappa = d / math.sqrt(max(1e-300, 1.0 - d * d))
    dev = float(np.max(np.abs(np.arccos(np.clip(pts @ u, -1.0, 1.0)) - rho)))
    return u, kappa, dev


def estimate_edge_structure(dnet: DiscretizedNet) -> EdgeStructure:
    X = dnet.points
    p = None
    if dnet.pressures is not None:
        p = {rid: float(v) for rid, v in zip(dnet.region_ids, dnet.pressures)}
    fits = {}
    for e in dnet.net.edges:
        path = dnet.edge_paths[e.id]
        u, kappa, dev = fit_circle(X[path], closed=e.is_loop)
        mismatch = None if p is None else abs(kappa - (p[e.left_region] - p[e.right_region]))
        fits[e.id] = EdgeFit(e.id, kappa, dev, mismatch, u)

    angles = {}
    for vid, row in dnet.vertex_rows.items():
        v = X[row]
        tangents = []
        for e in dnet.net.edges:
            if e.is_loop:
                continue
            path, u = dnet.edge_paths[e.id], fits[e.id].axis
            t = np.cross(u, v)
            t /= np.linalg.norm(t)
            if path[0] == row:
                tangents.append(t)
            if path[-1] == row:
                tangents.append(-t)
        angles[vid] = tuple(math.degrees(a) for a in meeting_angles(v, tangents))
    return EdgeStructure(tuple(fits[e.id] for e in dnet.net.edges), angles)


def to_net(dnet: DiscretizedNet, kappa_resolution: float = Tolerances.curvature) -> Net:
    """Net with the optimized vertex positions and fitted constant-curvature edges.

    Fitted curvatures below ``kappa_resolution`` are written as exactly 0;
    they are fit noise on discretely geodesic edges.
    """
    structure = estimate_edge_structure(dnet)
    X = dnet.points
    verts = tuple(Vertex(vid, SpherePoint.of(X[row])) for vid, row in dnet.vertex_rows.items())
    vmap = {v.id: v.point for v in verts}
    edges = []
    for e, fit in zip(dnet.net.edges, structure.edges):
        kappa = 0.0 if abs(fit.kappa) < kappa_resolution else fit.kappa
        if e.is_loop:
            edges.append(replace(e, kappa=kappa, axis=SpherePoint.of(fit.axis)))
            continue
        mid = X[dnet.edge_paths[e.id][len(dnet.edge_paths[e.id]) // 2]]
        p, q = vmap[e.start], vmap[e.end]
        if np.linalg.norm(p.vec + q.vec) < ANTIPODAL_GAP:
            # p x q is rounding noise here; the fitted plane fixes the circle
            u = fit.axis - np.dot(fit.axis, p.vec) * p.vec
            candidates = [(True, SpherePoint.of(u - np.dot(u, q.vec) * q.vec))] if kappa == 0.0 else []
        else:
            candidates = [(True, None), (False, None)]
        arc = None
        for minor, ax in candidates:
            try:
                cand = arc_between(p, q, kappa, minor, ax)
            except GeometryError:
                continue
            # keep the candidate that passes nearest the polyline midpoint
            if arc is None or _arc_miss(cand, mid) < _arc_miss(arc, mid):
                arc = cand
        if arc is None:
            raise GeometryError(f"edge {e.id}: fitted curvature {kappa:.6g} does not fit its endpoints")
        edges.append(EdgeRec(e.id, e.start, e.end, arc.kappa, e.left_region, e.right_region,
                             arc.minor, candidates[0][1]))
    regions = dnet.net.regions
    if dnet.pressures is not None:
        regions = tuple(RegionRec(r.id, float(t), float(pv))
                        for r, t, pv in zip(regions, dnet.targets, dnet.pressures))
    return Net(verts, tuple(edges), regions, dnet.net.faces)


def _arc_miss(arc, point: np.ndarray) -> float:
    pts = arc.sample(33)
    return float(np.min(np.linalg.norm(pts - point, axis=1)))
