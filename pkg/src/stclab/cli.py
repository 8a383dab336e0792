"""Command line front end.

Subcommands: audit, simulate, spectrum, show-constellation.  Exit codes:
0 success, 1 a requested audit or simulation check failed, 2 bad arguments.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .channel import sample_channel, shape_invariance_audit
from .constellation import (
    build_constellation,
    chi_coordinates,
    distance_spectrum,
    verify_forms,
)
from .designs import (
    alamouti_generators,
    make_generator_set,
    primed_alamouti_generators,
    radon_hurwitz_check,
    read_generator_file,
)
from .expansion import Subconstellation, expand
from .expansion import corollary1_audit, theorem1_audit
from .simulate import (
    SimConfig,
    format_csv,
    parse_config_file,
    run_simulation,
)

AUDIT_NAMES = ("RH", "THEOREM1", "COROLLARY1", "INVARIANCE", "FORMS", "ALL")


def _table_expansion():
    entries = build_constellation()
    chis = [chi_coordinates(e)[:4] for e in entries
            if e.subconstellation is Subconstellation.BASE]
    u = np.diag([1.0, -1.0]).astype(np.complex128)
    return expand(alamouti_generators(), chis, u, 1.0)


def _audit_rh(args) -> bool:
    if args.generators:
        with open(args.generators) as fh:
            g = read_generator_file(fh.read())
        rep = radon_hurwitz_check(g)
        print("rh.file.scale=%.12g" % rep.scale)
        print("rh.file.max_residual=%.6e tol=1e-12" % rep.max_residual)
        print("rh.file.worst_pair=%d,%d" % rep.worst_pair)
        print("rh.file.pass=%s" % rep.passed)
        return rep.passed
    ok = True
    for name, g in (("base", alamouti_generators()),
                    ("primed", primed_alamouti_generators())):
        rep = radon_hurwitz_check(g)
        print("rh.%s.scale=%.12g" % (name, rep.scale))
        print("rh.%s.max_residual=%.6e tol=1e-12" % (name, rep.max_residual))
        print("rh.%s.pass=%s" % (name, rep.passed))
        ok = ok and rep.passed
    mixed = make_generator_set(
        [alamouti_generators().basis[0], primed_alamouti_generators().basis[0]])
    rep = radon_hurwitz_check(mixed)
    print("rh.mixed.max_residual=%.6e expected=1.0" % rep.max_residual)
    print("rh.mixed.worst_pair=%d,%d" % rep.worst_pair)
    mixed_ok = (not rep.passed) and abs(rep.max_residual - 1.0) <= 1e-12
    print("rh.mixed.fails_as_expected=%s" % mixed_ok)
    return ok and mixed_ok


def _audit_theorem1(_args) -> bool:
    audit = theorem1_audit(_table_expansion())
    for k, r in enumerate(audit.residuals):
        print("theorem1.residual[%d]=%.12g" % (k, r))
    print("theorem1.min_residual=%.12g threshold=1e-6" % audit.min_residual)
    print("theorem1.pass=%s" % audit.separated)
    return audit.separated


def _audit_corollary1(_args) -> bool:
    audit = corollary1_audit(_table_expansion())
    print("corollary1.min_residual=%.12g threshold=1e-6" % audit.min_residual)
    print("corollary1.max_residual=%.12g" % audit.max_residual)
    print("corollary1.points=%d" % audit.residuals.size)
    print("corollary1.pass=%s" % audit.separated)
    return audit.separated


def _audit_invariance(args) -> bool:
    e = _table_expansion()
    rng = np.random.default_rng(np.random.SeedSequence(args.seed))
    gram = dist = angle = cross = 0.0
    for _ in range(args.trials):
        ch = sample_channel(rng, 2)
        rep = shape_invariance_audit(e, ch)
        gram = max(gram, rep.max_gram_error)
        dist = max(dist, rep.max_distance_error)
        angle = max(angle, rep.max_angle_error)
        cross = max(cross, rep.max_cross_distance_error)
    print("invariance.trials=%d" % args.trials)
    print("invariance.max_gram_error=%.6e tol=1e-12" % gram)
    print("invariance.max_distance_error=%.6e tol=1e-11" % dist)
    print("invariance.max_angle_error=%.6e tol=1e-11" % angle)
    print("invariance.max_cross_distance_error=%.6e (reported, not asserted)" % cross)
    ok = gram <= 1e-12 and dist <= 1e-11 and angle <= 1e-11
    print("invariance.pass=%s" % ok)
    return ok


def _audit_forms(_args) -> bool:
    rep = verify_forms()
    print("forms.violations=%d" % len(rep.violations))
    for v in rep.violations:
        print("forms.violation=%s" % v)
    print("forms.pass=%s" % rep.passed)
    return rep.passed


def cmd_audit(args) -> int:
    if args.trials < 1:
        print("error: --trials must be positive", file=sys.stderr)
        return 2
    which = args.which.upper()
    runners = {
        "RH": _audit_rh,
        "THEOREM1": _audit_theorem1,
        "COROLLARY1": _audit_corollary1,
        "INVARIANCE": _audit_invariance,
        "FORMS": _audit_forms,
    }
    names = list(runners) if which == "ALL" else [which]
    ok = True
    for name in names:
        ok = runners[name](args) and ok
    print("audit.overall=%s" % ("PASS" if ok else "FAIL"))
    return 0 if ok else 1


def cmd_simulate(args) -> int:
    kwargs = {}
    if args.config:
        with open(args.config) as fh:
            kwargs.update(parse_config_file(fh.read()))
    if args.mode is not None:
        kwargs["mode"] = args.mode
    if args.snr is not None:
        kwargs["snr_list_db"] = tuple(float(s) for s in args.snr.split(","))
    if args.frames is not None:
        kwargs["frames_per_point"] = args.frames
    if args.seed is not None:
        kwargs["base_seed"] = args.seed
    if args.sections is not None:
        kwargs["sections_per_frame"] = args.sections
    if args.max_frame_errors is not None:
        kwargs["max_frame_errors"] = args.max_frame_errors
    if args.trellis is not None:
        kwargs["trellis_path"] = args.trellis
    try:
        cfg = SimConfig(**kwargs)
    except ValueError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    rows = run_simulation(cfg)
    text = format_csv(cfg, rows)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_spectrum(args) -> int:
    spec = distance_spectrum(which=args.which.upper())
    lines = ["distance_sq,multiplicity"]
    lines += ["%.12g,%d" % (d2, mult) for d2, mult in spec.items()]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_show_constellation(_args) -> int:
    print("idx  tag     matrix(4PSK indices)  q8(coset,bits)  q16(coset,bit)  chi_oplus")
    for e in build_constellation():
        im = e.index_matrix
        chi = chi_coordinates(e)
        chi_s = "(" + ",".join("%+d" % round(x) for x in chi) + ")"
        print("%3d  %-6s  [%d %d; %d %d]            (%d, %s)         (%2d, %s)         %s"
              % (e.index, e.subconstellation.value, im[0][0], im[0][1],
                 im[1][0], im[1][1], e.q8_coset, e.q8_bits, e.q16_coset,
                 e.q16_bit, chi_s))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="stc-lab",
        description="Super-orthogonal space-time constellation lab")
    p.add_argument("--version", action="version", version="stc-lab %s" % __version__)
    sub = p.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("audit", help="run numerical audits of the shipped design")
    pa.add_argument("--which", default="ALL",
                    choices=[n for n in AUDIT_NAMES] + [n.lower() for n in AUDIT_NAMES],
                    help="which audit to run (default ALL)")
    pa.add_argument("--trials", type=int, default=1000,
                    help="random channel draws for INVARIANCE (default 1000)")
    pa.add_argument("--seed", type=int, default=1, help="audit RNG seed")
    pa.add_argument("--generators", metavar="FILE",
                    help="run RH on a generator-set file instead of the shipped sets")
    pa.set_defaults(func=cmd_audit)

    ps = sub.add_parser("simulate", help="Monte Carlo link simulation")
    ps.add_argument("--config", metavar="FILE", help="key=value config file")
    ps.add_argument("--mode", choices=("uncoded", "trellis"))
    ps.add_argument("--snr", help="comma-separated Es/N0 list in dB")
    ps.add_argument("--frames", type=int, help="frame budget per SNR point")
    ps.add_argument("--seed", type=int, help="base seed")
    ps.add_argument("--sections", type=int, help="blocks per frame")
    ps.add_argument("--max-frame-errors", type=int,
                    help="early-stop threshold per SNR point (default 200)")
    ps.add_argument("--trellis", metavar="FILE", help="trellis file (trellis mode)")
    ps.add_argument("--out", metavar="CSV", help="write results here instead of stdout")
    ps.set_defaults(func=cmd_simulate)

    pp = sub.add_parser("spectrum", help="pairwise squared-distance spectrum")
    pp.add_argument("--which", default="FULL",
                    choices=["BASE", "PRIMED", "FULL", "base", "primed", "full"])
    pp.add_argument("--out", metavar="CSV")
    pp.set_defaults(func=cmd_spectrum)

    pc = sub.add_parser("show-constellation", help="print the 32-entry table")
    pc.set_defaults(func=cmd_show_constellation)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
