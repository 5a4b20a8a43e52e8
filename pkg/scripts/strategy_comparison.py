"""Compare parallel, adaptive and sequential error curves on one channel pair.

Each curve is checked against the eta and mu floors; failures are listed.
"""
import argparse

from qchan import bounds, sim
from qchan.cli import RunConfig, load_channel_arg


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("first", nargs="?", default="amplitude-damping:0.3")
    ap.add_argument("second", nargs="?", default="depolarizing:2:0.4")
    ap.add_argument("--n-max", type=int, default=5)
    ap.add_argument("--restarts", type=int, default=8)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rc = RunConfig(seed=args.seed, restarts=args.restarts)
    E, F = load_channel_arg(args.first, rc), load_channel_arg(args.second, rc)
    cfg = rc.optimizer

    rep = bounds.chernoff_envelope(E, F, cfg, with_lower=False)
    print(f"verdict={rep.verdict.summary()} eta={rep.eta} zeta={rep.zeta} upper={rep.upper}")
    curves = {}
    for kind in sim.KINDS:
        curve = sim.attach_floors(sim.run_discrimination(E, F, strategy=sim.Strategy(kind), n_max=args.n_max, cfg=cfg), rep)
        curves[kind] = curve
        checks = sim.validate_theorems(curve, rep)
        print(f"{kind}: {'ok' if checks.passed else checks.failures}")

    print("\nn," + ",".join(sim.KINDS))
    for i in range(args.n_max):
        print(f"{i + 1}," + ",".join(f"{curves[k].entries[i].p_err:.6e}" for k in sim.KINDS))


if __name__ == "__main__":
    main()
