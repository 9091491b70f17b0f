"""Discretization error of the minimized perimeter as m doubles.

Uses the two-region net with a cap of area ``--area``, whose exact optimum
is a circle of length B(area).  The error should fall about 4x per doubling.
"""

import argparse
import math
import sys

import numpy as np

from spherepart.geom import FOUR_PI, SpherePoint, circle_for_area, isoperimetric_profile
from spherepart.net import EdgeRec, Face, Net, RegionRec
from spherepart.optimizer import discretize, minimize, perimeter


def cap_net(area):
    c = circle_for_area(area)
    edge = EdgeRec(1, None, None, c.kappa, 0, 1, True, SpherePoint(0.0, 0.0, 1.0))
    return Net((), (edge,), (RegionRec(0, area), RegionRec(1, FOUR_PI - area)),
               (Face(0, 0, (1,)), Face(1, 1, (-1,))))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--area", type=float, default=math.pi)
    ap.add_argument("--ms", type=int, nargs="+", default=[8, 16, 32, 64, 128])
    args = ap.parse_args(argv)

    exact = isoperimetric_profile(args.area)
    net = cap_net(args.area)
    prev = None
    print(f"{'m':>5} {'perimeter':>20} {'error':>10} {'ratio':>7}")
    for m in args.ms:
        out, trace = minimize(discretize(net, m))
        err = perimeter(out) - exact
        ratio = "" if prev is None else f"{prev / err:7.3f}"
        print(f"{m:5d} {perimeter(out):20.15f} {err:10.3e} {ratio} {trace.status}")
        prev = err
    # shortfall of the regular geodesic m-gon inscribed in the optimal circle;
    # to leading order the optimum errs by the same amount in the other direction
    m = args.ms[-1]
    r = 2 * math.asin(math.sqrt(args.area / FOUR_PI))
    print(f"leading-order estimate at m={m}: {exact * (np.pi / m) ** 2 / 6 * math.cos(r) ** 2:.3e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
