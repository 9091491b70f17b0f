"""Certified evaluation of the numeric steps behind optimality of the
tetrahedral partition into four equal areas.

Every claim is a small set of strict inequalities ``lhs < rhs`` evaluated
in interval arithmetic, plus exact rational identities where a step is an
equality.  A claim is *certified* when every inequality holds for all
points of the enclosures (``(rhs - lhs).lo > 0``), *failed* when one is
violated for all points, and *undecided* otherwise, or when a claim it
depends on is not certified.  Geometric reasoning between the steps is
recorded in the statement text only.
"""

from __future__ import annotations

import contextvars
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

from . import interval as iv
from .interval import Interval, IntervalDomainError, exact, pi_enclosure, profile

CERTIFIED, FAILED, UNDECIDED = "certified", "failed", "undecided"

# decimal constants quoted in the argument; overridable for perturbation runs
DEFAULT_CONSTANTS = {
    "iso_lower": Fraction("10.88"),      # lower bound on the minimal perimeter
    "tetra_upper": Fraction("11.47"),    # upper bound on the tetrahedral perimeter
    "region_upper": Fraction("6.62"),    # per-region perimeter bound
    "rest_upper": Fraction("1.34"),      # perimeter of R1 outside its large triangle
}

AGREE_TOL = 1e-12


@dataclass(frozen=True)
class Check:
    """``lhs < rhs`` (strict).  Primary checks define the claim's margin."""

    label: str
    lhs: Interval
    rhs: Interval
    primary: bool = True

    @property
    def gap(self) -> Interval:
        return self.rhs - self.lhs


@dataclass(frozen=True)
class Identity:
    label: str
    holds: bool


def agree(label: str, a: Interval, b: Interval, tol: float = AGREE_TOL,
          primary: bool = False) -> Check:
    """|a - b| < tol, as a strict inequality on the enclosure of |a - b|."""
    d = a - b
    mag = Interval(0.0 if d.lo <= 0.0 <= d.hi else min(abs(d.lo), abs(d.hi)),
                   max(abs(d.lo), abs(d.hi)))
    return Check(label, mag, exact(tol), primary)


@dataclass(frozen=True)
class Claim:
    id: str
    statement: str
    anchor: str
    depends_on: tuple[str, ...]
    recipe: Callable[["Ctx"], list]


@dataclass(frozen=True)
class ClaimResult:
    id: str
    status: str
    margin: float
    checks: tuple[tuple[str, float], ...] = ()
    note: str = ""


class Ctx:
    """Named constants available to recipes, as intervals."""

    def __init__(self, constants: Mapping[str, Fraction]):
        self.q = {k: Fraction(v) for k, v in constants.items()}
        self.pi = pi_enclosure()

    def const(self, name: str) -> Interval:
        return exact(self.q[name])

    def pi_times(self, q) -> Interval:
        return self.pi * exact(Fraction(q))

    def B(self, pi_multiple) -> Interval:
        return profile(self.pi_times(pi_multiple))


def _sqrt1771() -> Interval:
    return iv.sqrt(exact(1771))


def _f(c: Ctx, k: Fraction, t: Fraction) -> Interval:
    """f_k(t) with k and t given as multiples of pi."""
    return c.B(t) + c.B(k - t)


BIG = Fraction(23, 25)
SMALL = Fraction(2, 25)


def _c1(c):
    samples = [Fraction(1, 4), Fraction(1), Fraction(2), Fraction(3), BIG, SMALL]
    out = []
    for a in samples:
        area = c.pi_times(a)
        out.append(agree(f"B(A)^2 = A(4pi-A) at A = {a}pi", c.B(a) ** 2,
                         area * (4 * c.pi - area), primary=True))
    return out


def _c2(c):
    return [Check("10.88 < 2pi sqrt(3)", c.const("iso_lower"), 2 * c.pi * iv.sqrt(exact(3)))]


def _c3(c):
    return [Check("6 arccos(-1/3) < 11.47", 6 * iv.arccos(exact(Fraction(-1, 3))), c.const("tetra_upper"))]


def _c4(c):
    # the other three regions each have perimeter >= B(pi) = pi sqrt(3)
    x_max = 2 * c.const("tetra_upper") - 3 * c.B(1)
    return [
        Check("2*11.47 - 3 pi sqrt(3) < 6.62", x_max, c.const("region_upper")),
        agree("3 B(pi) = 3 pi sqrt(3)", 3 * c.B(1), 3 * c.pi * iv.sqrt(exact(3))),
    ]


def _c5(c):
    k = Fraction(1)
    grid = [k * i / 10 for i in range(1, 6)]
    out = [Check(f"f_pi({a}pi) < f_pi({b}pi)", _f(c, k, a), _f(c, k, b))
           for a, b in zip(grid, grid[1:])]
    out += [agree(f"f_pi({t}pi) = f_pi({k - t}pi)", _f(c, k, t), _f(c, k, k - t)) for t in grid]
    # both radicands are downward parabolas that stay >= 0 on [0, k] iff 0 < k < 4pi,
    # so f_k is concave there; with symmetry this gives f_k' > 0 on (0, k/2)
    out += [Check("0 < k", exact(0), c.pi_times(k), primary=False),
            Check("k < 4pi", c.pi_times(k), 4 * c.pi, primary=False)]
    return out


def _c6(c):
    lhs = c.B(BIG) + c.B(SMALL)
    closed = c.pi_times(Fraction(1, 25)) * (_sqrt1771() + 14)
    return [
        Check("6.62 < B(23pi/25) + B(2pi/25)", c.const("region_upper"), lhs),
        Check("6.62 < (pi/25)(sqrt(1771) + 14)", c.const("region_upper"), closed),
        agree("B(23pi/25) + B(2pi/25) = (pi/25)(sqrt(1771) + 14)", lhs, closed),
        Identity("23*77 = 1771", 23 * 77 == 1771),
        Identity("(23/25)(4 - 23/25) = 1771/625", BIG * (4 - BIG) == Fraction(1771, 625)),
        Identity("(2/25)(4 - 2/25) = (14/25)^2", SMALL * (4 - SMALL) == Fraction(14, 25) ** 2),
    ]


def _c7(c):
    # B is concave with B(0) = 0 and B(2pi/25) = 14pi/25, so the chord of slope 7
    # lies below B on [0, 2pi/25]
    return [
        agree("B(2pi/25) = 14pi/25", c.B(SMALL), c.pi_times(Fraction(14, 25))),
        Identity("(2/25)(4 - 2/25) = (14/25)^2", SMALL * (4 - SMALL) == Fraction(14, 25) ** 2),
        Identity("B(0) = 0", Fraction(0) * (4 - 0) == 0),
        Identity("(14/25) / (2/25) = 7", Fraction(14, 25) / SMALL == 7),
        Check("2pi/25 < 4pi (inside the concave range of B)", c.pi_times(SMALL), 4 * c.pi, primary=False),
    ]


def _c8(c):
    return [Check("6.62 < 7pi", c.const("region_upper"), 7 * c.pi)]


def _gauss_bonnet_room() -> Fraction:
    # 2pi = A_T + int kappa + sum alpha with A_T >= 23pi/25 and sum alpha = pi
    return 2 - BIG - 1


def _c9(c):
    kappa12 = c.pi_times(_gauss_bonnet_room()) / c.B(BIG)
    return [
        Check("(2pi/25) / B(23pi/25) < 1/21", kappa12, exact(Fraction(1, 21))),
        agree("(2pi/25) / B(23pi/25) = 2/sqrt(1771)", kappa12, 2 / _sqrt1771()),
        Identity("2 - 23/25 - 1 = 2/25", _gauss_bonnet_room() == SMALL),
    ]


def _c10(c):
    need = BIG + Fraction(4, 3) - 2
    return [
        Check("12 < 133pi/25", exact(12), c.pi_times(Fraction(133, 25))),
        Identity("23/25 + 4/3 - 2 = 19/75", need == Fraction(19, 75)),
        Identity("21 * 19/75 = 133/25", 21 * need == Fraction(133, 25)),
        Check("6.62 < 12", c.const("region_upper"), exact(12), primary=False),
    ]


def _c11(c):
    return [Check("7 < (4/3) B(23pi/25)", exact(7), exact(Fraction(4, 3)) * c.B(BIG)),
            Check("6.62 < 7", c.const("region_upper"), exact(7), primary=False)]


def _c12(c):
    kappa13 = c.pi_times(1 - BIG) / (exact(Fraction(2, 3)) * c.B(BIG))
    return [
        Check("(pi - 23pi/25) / ((2/3) B(23pi/25)) < 1/14", kappa13, exact(Fraction(1, 14))),
        agree("(pi - 23pi/25) / ((2/3) B(23pi/25)) = 3/sqrt(1771)", kappa13, 3 / _sqrt1771()),
    ]


def _c13(c):
    return [
        Check("11 < 266pi/75", exact(11), c.pi_times(Fraction(266, 75))),
        Identity("14 * 19/75 = 266/75", 14 * Fraction(19, 75) == Fraction(266, 75)),
        Check("6.62 < 11", c.const("region_upper"), exact(11), primary=False),
    ]


def _c14(c):
    return [Check("6.62 - B(23pi/25) < 1.34", c.const("region_upper") - c.B(BIG), c.const("rest_upper"))]


def _c15(c):
    kappa14 = (c.pi_times(Fraction(1, 3)) - c.pi_times(SMALL)) / c.const("rest_upper")
    return [Check("1/2 < (pi/3 - 2pi/25) / 1.34", exact(Fraction(1, 2)), kappa14)]


def _c16(c):
    kappa14 = c.pi_times(1 - BIG) / (c.B(BIG) / 3)
    return [
        Check("(pi - 23pi/25) / (B(23pi/25)/3) < 1/7", kappa14, exact(Fraction(1, 7))),
        Check("1/7 < 1/2", exact(Fraction(1, 7)), exact(Fraction(1, 2))),
        agree("(pi - 23pi/25) / (B(23pi/25)/3) = 6/sqrt(1771)", kappa14, 6 / _sqrt1771()),
    ]


CLAIMS: tuple[Claim, ...] = (
    Claim("C1", "B(A)^2 = A(4pi - A) on sample areas (isoperimetric profile is well formed)",
          "isoperimetric profile on the unit sphere", (), _c1),
    Claim("C2", "2pi sqrt(3) > 10.88: four equal areas need perimeter > 2pi sqrt(n-1)",
          "lower bound for a partition into n equal areas", (), _c2),
    Claim("C3", "6 arccos(-1/3) < 11.47: perimeter of the tetrahedral partition",
          "tetrahedral perimeter", (), _c3),
    Claim("C4", "2*11.47 - 3pi sqrt(3) < 6.62: every region of a minimizer has perimeter < 6.62",
          "per-region perimeter bound", ("C2", "C3"), _c4),
    Claim("C5", "f_k(t) = B(t) + B(k-t) is symmetric about k/2 and increasing on (0, k/2); grid at k = pi",
          "split-area profile is symmetric and unimodal", (), _c5),
    Claim("C6", "(pi/25)(sqrt(1771) + 14) > 6.62: the largest component of a region has area "
                "> 23pi/25 or < 2pi/25",
          "each region has one component of area >= 23pi/25", ("C4", "C5"), _c6),
    Claim("C7", "B(2pi/25) = 14pi/25 and B(x) >= 7x on [0, 2pi/25] by concavity",
          "linear lower bound on the profile for small areas", (), _c7),
    Claim("C8", "7pi > 6.62: components all smaller than 2pi/25 are impossible",
          "each region has one component of area >= 23pi/25", ("C4", "C7"), _c8),
    Claim("C9", "kappa_12 <= (2pi/25)/B(23pi/25) = 2/sqrt(1771) < 1/21",
          "curvature bound kappa_12 < 1/21 from Gauss-Bonnet on R1's triangle", ("C6", "C7"), _c9),
    Claim("C10", "P_12 >= 21 * 19pi/75 = 133pi/25 > 12 (the nonnegative term kappa_r P_r from "
                 "lower-pressure neighbours is dropped, which only weakens the bound)",
          "R2 contains a triangle of area >= 23pi/25", ("C9", "C4"), _c10),
    Claim("C11", "(4/3) B(23pi/25) > 7 > 6.62: the side of R1's triangle next to R2 is at most P/3",
          "side of R1's triangle shared with R2 or R3 is at most P/3", ("C6",), _c11),
    Claim("C12", "kappa_13 <= 3/sqrt(1771) < 1/14",
          "curvature bound kappa_13 < 1/14", ("C11", "C6"), _c12),
    Claim("C13", "P >= 14 * 19pi/75 = 266pi/75 > 11 > 6.62",
          "R3 contains a triangle of area >= 23pi/25", ("C12", "C4"), _c13),
    Claim("C14", "P_r < 6.62 - B(23pi/25) < 1.34",
          "R1 outside its large triangle has perimeter < 1.34", ("C4", "C6"), _c14),
    Claim("C15", "kappa_14 >= (pi/3 - 2pi/25)/1.34 > 1/2",
          "curvature bound kappa_14 > 1/2 for a non-tetrahedral minimizer", ("C14",), _c15),
    Claim("C16", "kappa_14 <= 6/sqrt(1771) < 1/7 < 1/2, contradicting C15",
          "final contradiction: kappa_14 < 1/7", ("C15", "C9"), _c16),
)

CLAIM_MAP = {c.id: c for c in CLAIMS}


def topological_order(ids=None) -> list[str]:
    """Kahn's algorithm, ties broken by registry order; raises on cycles."""
    wanted = set(CLAIM_MAP) if ids is None else _closure(ids)
    indeg = {i: sum(d in wanted for d in CLAIM_MAP[i].depends_on) for i in wanted}
    order, ready = [], [c.id for c in CLAIMS if c.id in wanted and indeg[c.id] == 0]
    while ready:
        cur = ready.pop(0)
        order.append(cur)
        for c in CLAIMS:
            if c.id in wanted and cur in c.depends_on:
                indeg[c.id] -= 1
                if indeg[c.id] == 0:
                    ready.append(c.id)
        ready.sort(key=lambda i: int(i[1:]))
    if len(order) != len(wanted):
        raise ValueError("claim dependency graph has a cycle")
    return order


def _closure(ids) -> set[str]:
    out, stack = set(), list(ids)
    while stack:
        i = stack.pop()
        if i not in CLAIM_MAP:
            raise KeyError(f"unknown claim {i!r}")
        if i not in out:
            out.add(i)
            stack.extend(CLAIM_MAP[i].depends_on)
    return out


def evaluate(claim: Claim, ctx: Ctx) -> ClaimResult:
    """Evaluate a claim's own arithmetic, ignoring its dependencies."""
    try:
        items = claim.recipe(ctx)
    except IntervalDomainError as exc:
        return ClaimResult(claim.id, UNDECIDED, float("-inf"), note=f"domain error: {exc}")
    checks = [i for i in items if isinstance(i, Check)]
    idents = [i for i in items if isinstance(i, Identity)]
    gaps = [(ch, ch.gap.lo) for ch in checks]
    primary = [g for ch, g in gaps if ch.primary] or [g for _, g in gaps]
    margin = min(primary)
    detail = tuple((ch.label, g) for ch, g in gaps) + tuple((i.label, 0.0 if i.holds else -1.0) for i in idents)
    if any(not i.holds for i in idents) or any(ch.lhs.lo >= ch.rhs.hi for ch in checks):
        bad = [i.label for i in idents if not i.holds] + [ch.label for ch in checks if ch.lhs.lo >= ch.rhs.hi]
        return ClaimResult(claim.id, FAILED, margin, detail, "violated: " + "; ".join(bad))
    if all(g > 0.0 for _, g in gaps):
        return ClaimResult(claim.id, CERTIFIED, margin, detail)
    return ClaimResult(claim.id, UNDECIDED, margin, detail, "enclosures overlap")


@dataclass
class ProofReport:
    results: list[ClaimResult]
    constants: dict = field(default_factory=dict)

    @property
    def certified(self) -> bool:
        return bool(self.results) and all(r.status == CERTIFIED for r in self.results)

    def __getitem__(self, cid: str) -> ClaimResult:
        for r in self.results:
            if r.id == cid:
                return r
        raise KeyError(cid)

    def header(self) -> dict:
        return {"rounding_mode": iv.ROUNDING_MODE, "pi_width": pi_enclosure().width}

    def to_json(self) -> dict:
        n_ok = sum(r.status == CERTIFIED for r in self.results)
        return {
            "header": self.header(),
            "claims": [{
                "id": r.id,
                "statement": CLAIM_MAP[r.id].statement,
                "anchor": CLAIM_MAP[r.id].anchor,
                "status": r.status,
                "margin": r.margin if math.isfinite(r.margin) else None,
                "depends_on": list(CLAIM_MAP[r.id].depends_on),
                "note": r.note,
            } for r in self.results],
            "certified": self.certified,
            "summary": f"{n_ok}/{len(self.results)} certified",
        }


def _resolve(own: ClaimResult, deps: list[ClaimResult]) -> ClaimResult:
    blocked = [d.id for d in deps if d.status != CERTIFIED]
    if not blocked:
        return own
    note = f"depends on uncertified {', '.join(blocked)}"
    if own.note:
        note += f"; {own.note}"
    return ClaimResult(own.id, UNDECIDED, own.margin, own.checks, note)


def verify_all(constants: Mapping | None = None, claims=None, workers: int = 1) -> ProofReport:
    """Evaluate claims (default: all) in dependency order.

    With ``workers > 1`` the claims' own arithmetic runs concurrently; the
    results are identical because every evaluation is pure.
    """
    consts = dict(DEFAULT_CONSTANTS)
    consts.update({k: Fraction(v) for k, v in (constants or {}).items()})
    unknown = set(consts) - set(DEFAULT_CONSTANTS)
    if unknown:
        raise KeyError(f"unknown constants {sorted(unknown)}")
    ctx = Ctx(consts)
    order = topological_order(claims)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            futs = {cid: pool.submit(contextvars.copy_context().run, evaluate, CLAIM_MAP[cid], ctx)
                    for cid in order}
            own = {cid: f.result() for cid, f in futs.items()}
    else:
        own = {cid: evaluate(CLAIM_MAP[cid], ctx) for cid in order}
    done: dict[str, ClaimResult] = {}
    for cid in order:
        done[cid] = _resolve(own[cid], [done[d] for d in CLAIM_MAP[cid].depends_on])
    return ProofReport([done[c] for c in order], {k: str(v) for k, v in consts.items()})


def verify_claim(cid: str, constants: Mapping | None = None) -> ClaimResult:
    if cid not in CLAIM_MAP:
        raise KeyError(f"unknown claim {cid!r}")
    return verify_all(constants, claims=[cid])[cid]
