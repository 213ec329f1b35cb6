"""Command-line experiment runner.

Subcommands: ``trellis``, ``estimate``, ``region``, ``baseline``, ``lemma1``,
``lemma2``. Settings come from an optional ``key = value`` file (``--config``),
then ``$ICREGION_SEED`` (seed only), then flags. Output is CSV on stdout or
``--output``, preceded by ``#`` header lines that record the full config.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys

import numpy as np

from . import __version__
from .channel import ChannelParams, db_to_linear
from .codinglab import (CodingExperiment, DiscreteIC, SizeGuardError, binary_flip_ic,
                        lemma1_bound_check, lemma2_converse_check, random_code)
from .config import SEED_ENV, ConfigError, ExperimentConfig, MissingSeedError, load_config
from .infodensity import estimate_mi_rate
from .quadrature import QuadratureMismatch, bpsk_awgn_mi
from .region import assemble, point_a_b, point_c
from .rng import stream
from .trellis import PolynomialError, SchemeError, parse_scheme, product_trellis

EXIT_OK = 0
EXIT_SCHEME = 3
EXIT_POLYNOMIAL = 4
EXIT_SEED = 5
EXIT_CONFIG = 6
EXIT_CHECK = 7

RATE_COLUMNS = ["label", "r1_bits", "r1_stderr", "r2_bits", "r2_stderr", "n", "blocks", "seed"]


class CheckFailed(RuntimeError):
    """An internal consistency check did not pass; output is still written."""


def _fmt(precise: bool):
    return (lambda v: repr(float(v))) if precise else (lambda v: f"{float(v):.6g}")


def _symbols(sym) -> str:
    return " ".join(f"{s:+d}" for s in sym)


def _schemes(cfg: ExperimentConfig):
    return parse_scheme(cfg.scheme1), parse_scheme(cfg.scheme2)


def _params(cfg: ExperimentConfig) -> ChannelParams:
    return ChannelParams.from_db(cfg.p1_db, cfg.p2_db, cfg.a)


def cmd_trellis(cfg, args, w, fmt):
    t1, t2 = _schemes(cfg)
    if args.single:
        w.writerow(["s_minus", "s_plus", "drive", "x1"])
        for b in t1.branches:
            w.writerow([b.s_minus, b.s_plus, "".join(map(str, b.drive)), _symbols(b.symbols)])
        return
    jt = product_trellis(t1, t2)
    w.writerow(["s_minus", "s_plus", "x1", "x2"])
    for b in jt.branches:
        w.writerow([b.s_minus, b.s_plus, _symbols(b.symbols1), _symbols(b.symbols2)])


def _rate_row(label, e1, e2, fmt):
    return [label, fmt(e1.value), fmt(e1.std_error), fmt(e2.value), fmt(e2.std_error),
            e1.n, e1.blocks, e1.seed]


def cmd_estimate(cfg, args, w, fmt):
    t1, t2 = _schemes(cfg)
    params = _params(cfg)
    est = [estimate_mi_rate(t1, t2, params, r, cfg.n_sections, cfg.blocks,
                            seed=cfg.seed, workers=args.workers) for r in (1, 2)]
    w.writerow(RATE_COLUMNS)
    w.writerow(_rate_row(f"{cfg.scheme1}|{cfg.scheme2}", est[0], est[1], fmt))


def cmd_region(cfg, args, w, fmt):
    t1, t2 = _schemes(cfg)
    params = _params(cfg)
    a, b = point_a_b(params, cfg.n_sections, cfg.blocks, seed=cfg.seed,
                     workers=args.workers, coded=t1, uncoded=t2)
    c = point_c(params)
    region = assemble([a, b, c])
    n = cfg.blocks * cfg.n_sections * product_trellis(t1, t2).uses_per_section
    w.writerow(RATE_COLUMNS)

    def row(label, r, mc):
        w.writerow([label, fmt(r.r1), fmt(r.r1_stderr), fmt(r.r2), fmt(r.r2_stderr),
                    n if mc else 0, cfg.blocks if mc else 0, cfg.seed])

    mc_labels = {"A", "B"}
    for r in (a, b, c):
        row(r.label, r, r.label in mc_labels)
    for r in region.frontier:
        row(f"frontier:{r.label}", r, r.label in mc_labels)
    for r in region.staircase:
        row(f"staircase:{r.label}", r, r.label in mc_labels)


def cmd_baseline(cfg, args, w, fmt):
    params = _params(cfg)
    c = point_c(params)
    w.writerow(RATE_COLUMNS)
    w.writerow(["bpsk", fmt(bpsk_awgn_mi(params.p1)), fmt(0.0),
                fmt(bpsk_awgn_mi(params.p2)), fmt(0.0), 0, 0, cfg.seed])
    w.writerow(["C", fmt(c.r1), fmt(0.0), fmt(c.r2), fmt(0.0), 0, 0, cfg.seed])


def _lab_channel(cfg) -> DiscreteIC:
    if cfg.ic_file:
        return DiscreteIC.load(cfg.ic_file)
    return binary_flip_ic(cfg.flip, cfg.cross)


def cmd_lemma1(cfg, args, w, fmt):
    ic = _lab_channel(cfg)
    w.writerow(["n", "m1", "m2", "gamma", "trials", "epsilon1", "epsilon2",
                "empirical_error_sum", "trial_stderr", "analytic_bound", "holds"])
    ok = True
    for gamma in cfg.gammas:
        for m in cfg.codebook_sizes:
            rep = lemma1_bound_check(ic, CodingExperiment(cfg.lab_n, m, m, gamma,
                                                          cfg.trials, cfg.seed))
            ok &= rep.holds
            w.writerow([cfg.lab_n, m, m, fmt(gamma), cfg.trials, fmt(rep.epsilon1),
                        fmt(rep.epsilon2), fmt(rep.empirical_error_sum),
                        fmt(rep.trial_std_error), fmt(rep.analytic_bound), int(rep.holds)])
    if not ok:
        raise CheckFailed("achievability bound violated")


def cmd_lemma2(cfg, args, w, fmt):
    ic = _lab_channel(cfg)
    w.writerow(["code", "m1", "m2", "gamma", "epsilon1", "rhs1", "epsilon2", "rhs2", "holds"])
    ok = True
    sizes = cfg.codebook_sizes
    for k in range(cfg.codes):
        m = sizes[k % len(sizes)]
        gamma = cfg.gammas[k % len(cfg.gammas)]
        code = random_code(ic, cfg.lab_n, m, m, stream(cfg.seed, k))
        rep = lemma2_converse_check(ic, code, gamma)
        ok &= rep.holds
        w.writerow([k, m, m, fmt(gamma), fmt(rep.epsilon1), fmt(rep.rhs1),
                    fmt(rep.epsilon2), fmt(rep.rhs2), int(rep.holds)])
    if not ok:
        raise CheckFailed("converse inequality violated")


COMMANDS = {
    "trellis": (cmd_trellis, "dump the branch table of the joint trellis (or one scheme)"),
    "estimate": (cmd_estimate, "Monte Carlo mutual-information rates at both receivers"),
    "region": (cmd_region, "corners A, B, C with time-sharing frontier and staircase"),
    "baseline": (cmd_baseline, "quadrature rates: single-user BPSK and interference-as-noise"),
    "lemma1": (cmd_lemma1, "random-codebook threshold decoding versus the achievability bound"),
    "lemma2": (cmd_lemma2, "converse inequality on random small codes"),
}

_FLAG_KEYS = ["p1_db", "p2_db", "a", "scheme1", "scheme2", "n_sections", "blocks", "seed",
              "lab_n", "codebook_sizes", "gammas", "trials", "codes", "flip", "cross", "ic_file"]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value experiment file")
    common.add_argument("-o", "--output", help="write CSV here instead of stdout")
    common.add_argument("--precise", action="store_true",
                        help="print floats at full precision instead of 6 significant digits")
    common.add_argument("--workers", type=int, default=1,
                        help="processes for Monte Carlo blocks (results do not depend on it)")
    g = common.add_argument_group("experiment")
    g.add_argument("--p1-db", dest="p1_db", help="sender 1 power in dB (default 7.0)")
    g.add_argument("--p2-db", dest="p2_db", help="sender 2 power in dB (default 7.0)")
    g.add_argument("-a", "--cross-gain", dest="a", help="cross gain a (default 0.5)")
    g.add_argument("--scheme1", help="iud:<bits> or conv:<octal generators>, e.g. conv:7,5 "
                                     "(octal read MSB = D^0, right-aligned); default conv:7,5")
    g.add_argument("--scheme2", help="as --scheme1; default iud:1")
    g.add_argument("--n-sections", dest="n_sections", help="trellis sections per block (10000)")
    g.add_argument("--blocks", help="independent Monte Carlo blocks (10)")
    g.add_argument("--seed", help=f"64-bit seed; required here, in the config or in ${SEED_ENV}")
    lab = common.add_argument_group("coding lab")
    lab.add_argument("--lab-n", dest="lab_n", help="block length n (6)")
    lab.add_argument("--codebook-sizes", dest="codebook_sizes", help="M1 = M2 values, e.g. 2,4")
    lab.add_argument("--gammas", help="threshold slacks in nats, e.g. 0.05,0.1,0.2")
    lab.add_argument("--trials", help="random codebooks per cell (200)")
    lab.add_argument("--codes", help="random codes for lemma2 (50)")
    lab.add_argument("--flip", help="receiver flip probability of the binary IC (0.1)")
    lab.add_argument("--cross", help="interference flip probability of the binary IC (0.1)")
    lab.add_argument("--ic-file", dest="ic_file",
                     help="DiscreteIC table: '# sizes X1 X2 Y1 Y2' then rows (x1,x2), cols (y1,y2)")

    parser = argparse.ArgumentParser(prog="icregion", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        if name == "trellis":
            p.add_argument("--single", action="store_true", help="dump scheme1 only")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    func = COMMANDS[args.command][0]
    buf = io.StringIO()
    status = EXIT_OK
    try:
        overrides = {k: getattr(args, k) for k in _FLAG_KEYS}
        cfg = load_config(args.config, overrides).validate()
        for line in cfg.header_lines(args.command):
            buf.write(line + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        func(cfg, args, writer, _fmt(args.precise))
    except MissingSeedError as exc:
        return _fail(exc, EXIT_SEED)
    except PolynomialError as exc:
        return _fail(exc, EXIT_POLYNOMIAL)
    except SchemeError as exc:
        return _fail(exc, EXIT_SCHEME)
    except (QuadratureMismatch, SizeGuardError) as exc:
        return _fail(exc, EXIT_CHECK)
    except CheckFailed as exc:
        print(f"icregion: check failed: {exc}", file=sys.stderr)
        status = EXIT_CHECK
    except (ConfigError, ValueError, OSError) as exc:
        return _fail(exc, EXIT_CONFIG)
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return status


def _fail(exc: Exception, code: int) -> int:
    print(f"icregion: error: {exc}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
