"""Multi-hypothesis discrimination of {identity, full depolarizing, X}.

Reports pairwise bounds, the worst pair, and the per-strategy checks for
uniform and skewed priors.
"""
import argparse

from qchan import bounds, channel, sim
from qchan.search import OptimizerConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=4)
    ap.add_argument("--restarts", type=int, default=16)
    args = ap.parse_args()
    cfg = OptimizerConfig(restarts=args.restarts)
    chans = [channel.identity(2), channel.depolarizing(2, 1.0), channel.unitary(channel.PAULI["X"], "X")]

    mb = bounds.multi_bounds(chans, cfg)
    for (i, j), rep in sorted(mb.pairwise.items()):
        print(f"pair ({i},{j}): {rep.verdict.summary()}, upper={rep.upper}")
    print(f"multi_upper={mb.multi_upper} nu={mb.nu} worst_pair={mb.worst_pair}")

    for priors in (None, (0.5, 0.3, 0.2)):
        for kind in sim.KINDS:
            curve, checks = sim.run_multi(chans, priors, sim.Strategy(kind), args.n_max, cfg, mb)
            errs = " ".join(f"{e.p_err:.4e}" for e in curve.entries)
            print(f"priors={priors or 'uniform'} {kind}: {errs} checks={'ok' if checks.passed else checks.failures}")


if __name__ == "__main__":
    main()
