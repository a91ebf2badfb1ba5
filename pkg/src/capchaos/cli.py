"""Command-line entry point: ``capchaos <subcommand> ...``.

Exit status is 0 on success, 1 on usage or configuration-file errors and 2
when a numerical guard (domain, admissibility, resolution, cost) trips.
"""
from __future__ import annotations

import argparse
import dataclasses
import math
import sys

from . import wigner
from .chaos import build_report, cum4_second_chaos, coefficients_for
from .config import DEFAULT_OUTPUT, OUTPUT_ENV, parse_config
from .exceptions import ConfigFileError, ConfigurationError, DomainError
from .field import evaluate_cap_grid, sample_coefficients
from .harness import clt_report, run_replicates
from .mollifier import MollifierSpec, fourier_coefficients, is_admissible
from .outputs import (
    SUMMARY_HEADER,
    build_manifest,
    dumps,
    fmt,
    run_directory,
    write_field_csv,
    write_replicates,
    write_report,
    write_summary,
)

REPORT_FIELDS = (
    "ell", "z", "cap_r", "v1", "v1_remainder", "v2", "v2_lower", "v2_upper", "tail3", "tail4", "tail5plus",
    "var_total", "cum4", "dw_bound", "admissible",
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


CONFIG_HELP = f"""config file: key = value per line, '#' comments, radians.
  required  ell_list (e.g. 8,32,128), z, cap_r, k, n_replicates, master_seed,
            and eps (0 = hard cap) or both M and alpha (eps_l = l^-alpha)
  optional  grid = auto | n_theta,n_phi   (default auto)
            output_dir                   (default ${OUTPUT_ENV} or {DEFAULT_OUTPUT})
            w1_bootstrap                 (default 200)
"""


def _cap_args(p, with_cum4_flag=True):
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--z", type=float, required=True)
    p.add_argument("--r", type=float, default=math.pi / 4, help="cap radius in radians (default pi/4)")
    p.add_argument("--eps", type=float, default=0.25, help="smoothing width; 0 selects the hard cap")
    p.add_argument("--k", type=int, default=2, help="blend half-degree (default 2)")
    p.add_argument("--m", type=int, default=None, help="smoothness M for admissibility (default k)")
    p.add_argument("--threads", type=int, default=1)
    if with_cum4_flag:
        p.add_argument("--no-cum4", action="store_true", help="skip the fourth cumulant")


def build_parser():
    parser = _Parser(prog="capchaos", description="Chaos analytics for excursion areas on spherical caps.",
                     epilog=CONFIG_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)

    p = sub.add_parser("mollifier", help="zonal coefficients of the smoothed cap")
    p.add_argument("--r", type=float, default=math.pi / 4)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--lmax", type=int, default=10)

    p = sub.add_parser("wigner", help="exact coupling coefficients")
    p.add_argument("kind", choices=("cg", "3j", "6j", "9j"))
    p.add_argument("args", type=int, nargs="+")
    p.add_argument("--float", dest="force_float", action="store_true", help="force the floating path")

    p = sub.add_parser("variance", help="variance decomposition report")
    _cap_args(p)
    p = sub.add_parser("cum4", help="fourth cumulant breakdown plus report")
    _cap_args(p, with_cum4_flag=False)

    for name, text in (("simulate", "sample replicates"), ("report", "sample and summarize")):
        p = sub.add_parser(name, help=text, epilog=CONFIG_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
        p.add_argument("--config", required=True)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--dump-field", metavar="CSV", default=None, help="grid CSV of replicate 0 at the first degree")
    return parser


def _spec_from(args):
    m = args.m if args.m is not None else args.k
    if args.eps == 0.0:
        return None, m
    M = min(m, args.k)
    if m > args.k:
        print(f"warning: M={m} exceeds k={args.k}; the blend is C^{args.k}, M={m} is used for admissibility only",
              file=sys.stderr)
    return MollifierSpec(args.r, args.eps, args.k, M), m


def _report(args, with_cum4):
    spec, m = _spec_from(args)
    rep = build_report(args.ell, args.z, spec, cap_r=args.r, with_cum4=with_cum4, threads=args.threads)
    if spec is not None:
        rep = dataclasses.replace(rep, admissible=is_admissible(args.ell, spec.eps, m))
    return rep, spec


def _print_report(rep, extra=None):
    payload = rep.as_dict()
    if extra:
        payload.update(extra)
    print(dumps(payload))
    print(",".join(REPORT_FIELDS))
    print(",".join(fmt(getattr(rep, f)) for f in REPORT_FIELDS))


def cmd_mollifier(args):
    spec = MollifierSpec(args.r, args.eps, args.k, args.m)
    co = fourier_coefficients(spec, args.lmax)
    print("ell,legendre_moment,b")
    for ell in range(args.lmax + 1):
        print(f"{ell},{fmt(co.legendre_moments[ell])},{fmt(co.b[ell])}")


def cmd_wigner(args):
    n = {"cg": 6, "3j": 6, "6j": 6, "9j": 9}[args.kind]
    if len(args.args) != n:
        raise UsageError(f"wigner {args.kind} takes {n} integers, got {len(args.args)}")
    fn = {"cg": wigner.clebsch_gordan, "3j": wigner.wigner_3j, "6j": wigner.wigner_6j, "9j": wigner.wigner_9j}
    val = fn[args.kind](*args.args, exact=False if args.force_float else None)
    print(val.exact_form() if val.exact else "inexact")
    print(fmt(val.float_value))


def cmd_variance(args):
    rep, _ = _report(args, with_cum4=not args.no_cum4)
    _print_report(rep)


def cmd_cum4(args):
    rep, spec = _report(args, with_cum4=True)
    br = cum4_second_chaos(args.ell, coefficients_for(args.ell, spec, args.r), threads=args.threads)
    _print_report(rep, {"cum4_breakdown": dataclasses.asdict(br)})


def _simulate(args, summarize_too):
    config = parse_config(args.config)
    samples = run_replicates(config, threads=args.threads)
    out = run_directory(config)
    names = [write_replicates(out, samples).name]
    if summarize_too:
        rows = clt_report(config, samples, threads=args.threads)
        names += [write_summary(out, rows).name, write_report(out, config, rows).name]
        print(",".join(SUMMARY_HEADER[:13]))
        for r in rows:
            print(",".join(fmt(getattr(r, h)) for h in SUMMARY_HEADER[:13]))
    build_manifest(config, out, names).write(out)
    if args.dump_field:
        ell = config.ell_list[0]
        grid = evaluate_cap_grid(sample_coefficients(ell, (config.master_seed, ell, 0)), config.cap_r,
                                 *config.grid_for(ell))
        write_field_csv(args.dump_field, grid)
    print(out)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        handler = {
            "mollifier": cmd_mollifier, "wigner": cmd_wigner, "variance": cmd_variance, "cum4": cmd_cum4,
            "simulate": lambda a: _simulate(a, False), "report": lambda a: _simulate(a, True),
        }[args.command]
        handler(args)
    except (UsageError, ConfigFileError) as exc:
        print(exc, file=sys.stderr)
        return 1
    except (DomainError, ConfigurationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
