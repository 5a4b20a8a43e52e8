"""Command-line front end: ``qchan validate|check|bounds|simulate|state-chernoff``.

Channel arguments are JSON files or preset specs such as ``identity:2``,
``depolarizing:2:0.5``, ``amplitude-damping:0.3`` or ``unitary:X``. The
structured format is sorted JSON, so identical invocations give identical
bytes regardless of ``--threads``.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import bounds, channel, distinguish, sim
from .errors import ChannelFormatError, CptpError, QchanError, ValidationError
from .metrics import as_priors, state_chernoff
from .search import OptimizerConfig

log = logging.getLogger("qchan")

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


@dataclass
class RunConfig:
    seed: int = 0
    restarts: int = 64
    max_iters: int = 400
    threads: int = 1
    n_max: int = 6
    priors: tuple | None = None
    cptp_tol: float = channel.CPTP_TOL
    eps_span: float = distinguish.EPS_SPAN
    eps_disjoint: float = distinguish.EPS_DISJOINT
    eps_joint: float = distinguish.EPS_JOINT
    strategy: str = "parallel"
    structured: bool = False
    out: Path | None = None
    force: bool = False
    extra: dict = field(default_factory=dict)

    @property
    def optimizer(self) -> OptimizerConfig:
        return OptimizerConfig(self.restarts, self.max_iters, self.seed, threads=self.threads)


def _num(x):
    return bounds._num(x)


def _vec(v):
    return [[_num(z.real), _num(z.imag)] for z in np.asarray(v).ravel()]


def _emit(doc: dict, human: str, rc: RunConfig):
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n" if rc.structured else human.rstrip("\n") + "\n"
    sys.stdout.write(text)


def load_channel_arg(arg: str, rc: RunConfig) -> channel.KrausChannel:
    path = Path(arg)
    if path.is_file():
        return channel.load_channel(path, tol=rc.cptp_tol, force=rc.force)
    if ":" in arg:
        return channel.from_preset(arg)
    raise ChannelFormatError(f"no such file or preset: {arg!r}")


def _parse_priors(text):
    if text is None:
        return None
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError as exc:
        raise ValidationError(f"bad --priors {text!r}") from exc


def cmd_validate(args, rc: RunConfig) -> int:
    try:
        path = Path(args.channel)
        if path.is_file():
            ch = channel.load_channel(path, tol=rc.cptp_tol, force=True)
        else:
            ch = load_channel_arg(args.channel, rc)
    except CptpError as exc:  # pragma: no cover - force=True keeps the defect instead
        _emit({"valid": False, "defect": _num(exc.defect)}, f"invalid: {exc}", rc)
        return EXIT_FAIL
    valid, defect = channel.validate_cptp(ch, rc.cptp_tol)
    doc = {
        "format_version": bounds.FORMAT_VERSION,
        "valid": valid,
        "defect": _num(defect),
        "dim_in": ch.dim_in,
        "dim_out": ch.dim_out,
        "kraus_count": len(ch),
    }
    human = f"{'valid' if valid else 'INVALID'}: dims {ch.dim_in}->{ch.dim_out}, {len(ch)} Kraus operators, defect {defect:.3e}"
    _emit(doc, human, rc)
    return EXIT_OK if valid else EXIT_FAIL


def _verdict_doc(v: distinguish.DistinguishVerdict) -> dict:
    doc = {
        "verdict": v.verdict.value,
        "reasons": sorted(r.value for r in v.reasons),
        "eta_hat": _num(v.common.eta_hat),
        "span_residual": _num(v.span.residual),
        "low_confidence": v.common.low_confidence,
        "notes": list(v.notes),
    }
    if v.witness is not None:
        doc["witness"] = _vec(v.witness)
    if v.coefficients is not None:
        doc["coefficients"] = [_vec(row) for row in v.coefficients]
    return doc


def cmd_check(args, rc: RunConfig) -> int:
    E, F = load_channel_arg(args.first, rc), load_channel_arg(args.second, rc)
    channel.require_pair(E, F)
    v = distinguish.perfect_distinguishability(E, F, rc.optimizer, rc.eps_span, rc.eps_disjoint, rc.eps_joint)
    doc = {"format_version": bounds.FORMAT_VERSION, **_verdict_doc(v)}
    lines = [v.summary(), f"  span residual {v.span.residual:.3e}", f"  min common part {v.common.eta_hat:.6g}"]
    lines += [f"  note: {n}" for n in v.notes]
    _emit(doc, "\n".join(lines), rc)
    return EXIT_OK


def _bounds_human(rep: bounds.BoundsReport) -> str:
    d = rep.to_dict()
    lines = [f"verdict: {rep.verdict.summary()}"]
    for key in ("eta", "chi", "zeta", "mu", "upper_eta", "upper_mu", "upper", "lower"):
        lines.append(f"  {key:9s} {d[key] if d[key] is not None else '-'}")
    lines += [f"  note: {f}" for f in rep.flags]
    return "\n".join(lines)


def cmd_bounds(args, rc: RunConfig) -> int:
    E, F = load_channel_arg(args.first, rc), load_channel_arg(args.second, rc)
    channel.require_pair(E, F)
    rep = bounds.chernoff_envelope(E, F, rc.optimizer)
    doc = rep.to_dict()
    human = _bounds_human(rep)
    if rc.priors is not None:
        as_priors(rc.priors, 2)
        note = "priors do not change the exponent; they only enter simulation floors"
        doc["priors_note"] = note
        human += f"\n  note: {note}"
    if rc.out:
        rc.out.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    _emit(doc, human, rc)
    return EXIT_OK


def _checks_doc(cl: sim.CheckList):
    return {
        "passed": cl.passed,
        "count": len(cl.checks),
        "failures": [{"name": c.name, "n": c.n, "margin": _num(c.margin), "detail": c.detail} for c in cl.failures],
        "notes": list(cl.notes),
    }


def cmd_simulate(args, rc: RunConfig) -> int:
    chans = [load_channel_arg(a, rc) for a in args.channels]
    if len(chans) < 2:
        raise ValidationError("simulate needs at least two channels")
    for ch in chans[1:]:
        channel.require_pair(chans[0], ch)
    strategy = sim.Strategy(rc.strategy, inner=OptimizerConfig(4, 300, rc.seed, threads=rc.threads))
    if len(chans) == 2:
        E, F = chans
        rep = bounds.chernoff_envelope(E, F, rc.optimizer, with_lower=False)
        priors = rc.priors or (0.5, 0.5)
        curve, uniform = sim.run_with_uniform(E, F, priors, strategy, rc.n_max, rc.optimizer)
        checks = sim.validate_theorems(uniform, rep)
        if curve.entries[0].priors != uniform.entries[0].priors:
            checks.extend(sim.validate_theorems(curve, rep, uniform))
        sim.attach_floors(curve, rep)
        fit = None
        if sum(e.p_err > sim.ZERO_ERROR for e in curve.entries) >= 3 or all(e.p_err <= sim.ZERO_ERROR for e in curve.entries):
            fit = sim.fit_exponent(curve)
        doc = {"bounds": rep.to_dict(), "fit": None if fit is None else {"slope": _num(fit.slope), "r2": _num(fit.r2), "flag": fit.flag}}
    else:
        mb = bounds.multi_bounds(chans, rc.optimizer)
        curve, checks = sim.run_multi(chans, rc.priors, strategy, rc.n_max, rc.optimizer, mb)
        doc = {"bounds": mb.to_dict()}
    csv_text = sim.curve_to_csv(curve)
    if rc.out:
        rc.out.write_text(csv_text, encoding="utf-8")
    doc.update({"format_version": bounds.FORMAT_VERSION, "strategy": rc.strategy, "checks": _checks_doc(checks), "curve": csv_text})
    lines = [csv_text.rstrip("\n"), f"checks: {len(checks.checks) - len(checks.failures)}/{len(checks.checks)} passed"]
    lines += [f"  FAIL {c.name} n={c.n} margin={c.margin:.3e} {c.detail}" for c in checks.failures]
    _emit(doc, "\n".join(lines), rc)
    return EXIT_OK if checks.passed else EXIT_FAIL


def cmd_state_chernoff(args, rc: RunConfig) -> int:
    rho = channel.parse_state(Path(args.first).read_text(encoding="utf-8"))
    sigma = channel.parse_state(Path(args.second).read_text(encoding="utf-8"))
    value, s_star = state_chernoff(rho, sigma)
    doc = {"format_version": bounds.FORMAT_VERSION, "chernoff": _num(value), "s_star": _num(s_star)}
    _emit(doc, f"chernoff {'inf' if math.isinf(value) else f'{value:.12g}'} at s = {s_star:.6g}", rc)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--restarts", type=int, default=64)
    common.add_argument("--max-iters", type=int, default=400)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--n-max", type=int, default=6)
    common.add_argument("--priors", help="comma separated, e.g. 0.9,0.1")
    common.add_argument("--strategy", choices=sim.KINDS, default="parallel")
    common.add_argument("--format", choices=("human", "structured"), default="human")
    common.add_argument("--out", type=Path)
    common.add_argument("--force", action="store_true", help="accept channels failing the CPTP check")
    common.add_argument("--preset", action="append", default=[], help="add a preset channel (repeatable)")

    p = argparse.ArgumentParser(prog="qchan", description="Discrimination of quantum channels.")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("validate", parents=[common], help="check a channel file for trace preservation")
    s.add_argument("channel")
    s.set_defaults(func=cmd_validate, min_channels=0)
    for name, func, helptext in (
        ("check", cmd_check, "decide perfect distinguishability"),
        ("bounds", cmd_bounds, "bounds on the error exponent"),
    ):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("first", nargs="?")
        s.add_argument("second", nargs="?")
        s.set_defaults(func=func)
    s = sub.add_parser("simulate", parents=[common], help="simulate n-use discrimination")
    s.add_argument("channels", nargs="*")
    s.set_defaults(func=cmd_simulate)
    s = sub.add_parser("state-chernoff", parents=[common], help="Chernoff quantity of two state files")
    s.add_argument("first")
    s.add_argument("second")
    s.set_defaults(func=cmd_state_chernoff)
    return p


def _merge_presets(args):
    """Fold ``--preset`` values into the positional channel slots."""
    if args.command == "simulate":
        args.channels = list(args.channels) + args.preset
    elif args.command in ("check", "bounds"):
        slots = [x for x in (args.first, args.second) if x is not None] + args.preset
        if len(slots) != 2:
            raise ValidationError(f"{args.command} needs exactly two channels, got {len(slots)}")
        args.first, args.second = slots


def main(argv=None) -> int:
    level = os.environ.get("QCHAN_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        _merge_presets(args)
        rc = RunConfig(
            seed=args.seed,
            restarts=args.restarts,
            max_iters=args.max_iters,
            threads=args.threads,
            n_max=args.n_max,
            priors=_parse_priors(args.priors),
            strategy=args.strategy,
            structured=args.format == "structured",
            out=args.out,
            force=args.force,
        )
        if rc.n_max < 1:
            raise ValidationError("--n-max must be at least 1")
        log.info("running %s with seed %d", args.command, rc.seed)
        return args.func(args, rc)
    except (QchanError, OSError, ValueError) as exc:
        log.debug("input error", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
