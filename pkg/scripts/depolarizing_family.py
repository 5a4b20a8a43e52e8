"""Bounds and finite-n error curves for identity vs depolarizing(p).

Prints one row per p with the search and closed-form quantities, then the
parallel curve and fitted exponent.
"""
import argparse
import math

import numpy as np

from qchan import bounds, channel, sim
from qchan.search import OptimizerConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ps", type=float, nargs="+", default=[0.25, 0.5, 0.75, 1.0])
    ap.add_argument("--n-max", type=int, default=6)
    ap.add_argument("--restarts", type=int, default=16)
    args = ap.parse_args()
    cfg = OptimizerConfig(restarts=args.restarts)
    ident = channel.identity(2)

    print("p,eta,eta_closed,zeta,upper,lower,fit_slope,fit_r2")
    for p in args.ps:
        dep = channel.depolarizing(2, p)
        rep = bounds.chernoff_envelope(ident, dep, cfg)
        curve = sim.run_discrimination(ident, dep, n_max=args.n_max, cfg=cfg)
        fit = sim.fit_exponent(curve)
        closed = 1 - 3 * p / 4
        print(f"{p},{rep.eta:.6f},{closed:.6f},{rep.zeta:.6f},{rep.upper:.6f},{rep.lower:.6f},{fit.slope:.6f},{fit.r2:.6f}")

    dep = channel.depolarizing(2, 1.0)
    curve = sim.run_discrimination(ident, dep, n_max=args.n_max, cfg=cfg)
    print("\nn,p_err,0.5*4^-n")
    for e in curve.entries:
        print(f"{e.n},{e.p_err:.6e},{0.5 * 4.0 ** -e.n:.6e}")
    assert np.allclose([e.p_err for e in curve.entries], [0.5 * 4.0**-e.n for e in curve.entries])
    print(f"\nlog 4 = {math.log(4):.6f}")


if __name__ == "__main__":
    main()
