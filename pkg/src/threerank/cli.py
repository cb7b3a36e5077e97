"""Command-line interface.

Exit codes: 0 success, 1 criterion or search failure, 2 usage error,
3 cache or coverage error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

from . import acceptance
from .arith import CongruenceClass, fundamental_discriminant_of
from .config import DEFAULT
from .family import normalize, parse_family
from .rank3 import CoverageError, rank_table_interval, three_rank
from .search import corollary_spec, parse_polys, polyprog_witness, required_rank_bounds, theorem1_witnesses
from .statistics import cohen_lenstra_prob, count_report, nh_mean_empirical, omega3_product
from .store import CacheError, cache_load, cache_merge, cache_store, default_cache_path, ensure_ranks, write_csv

OK, FAILED, USAGE, CACHE = 0, 1, 2, 3

CONFIG_KEYS = {"cache", "threads", "witness_cap", "omega_pmax"}


class UsageError(Exception):
    pass


def _out(text: str) -> None:
    sys.stdout.write(text + "\n")


def _json(obj) -> None:
    _out(json.dumps(obj))


def _sign(s: str) -> int:
    if s in ("+", "+1", "1"):
        return 1
    if s in ("-", "-1"):
        return -1
    raise argparse.ArgumentTypeError(f"sign must be + or -, got {s!r}")


def _real(s: str) -> float:
    try:
        v = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {s!r}") from None
    if not math.isfinite(v) or v <= 0:
        raise argparse.ArgumentTypeError(f"need a positive finite number, got {s!r}")
    return v


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e}") from e


def _cache(args) -> Path | None:
    return Path(args.cache) if args.cache else default_cache_path()


def _strict(args, ok: bool) -> int:
    return FAILED if args.strict and not ok else OK


def _ranks_sign(args, X: float, lam: int):
    top = math.ceil(X) - 1
    lo, hi = (-top, -1) if lam == -1 else (1, top)
    return ensure_ranks(lo, hi, _cache(args), args.threads)


def _ranks_family(args, fam, X: float):
    neg, pos = required_rank_bounds(fam, X)
    return ensure_ranks(-(neg - 1), pos - 1, _cache(args), args.threads)


# ------------------------------------------------------------------ commands


def cmd_rank(args) -> int:
    D = fundamental_discriminant_of(args.D)
    _out(f"{D.value} {three_rank(D)}")
    return OK


def cmd_table(args) -> int:
    if args.min > args.max:
        raise UsageError("--min must not exceed --max")
    table = rank_table_interval(args.min, args.max, args.threads)
    write_csv(table, args.out)
    cache = _cache(args)
    if cache is not None:
        merged = cache_merge(cache_load(cache), table) if cache.exists() else table
        cache_store(merged, cache)
    return OK


def cmd_good_pair(args) -> int:
    from .family import good_pair_failure

    clause = good_pair_failure(args.A, args.B)
    _out("good" if clause is None else f"not-good (clause {clause})")
    return OK


def cmd_normalize(args) -> int:
    _json(normalize(parse_family(_read(args.family))).to_json())
    return OK


def cmd_mean(args) -> int:
    ranks = _ranks_sign(args, args.X, args.sign)
    rep = nh_mean_empirical(args.X, CongruenceClass(args.m, args.N), args.sign, ranks)
    _out(rep.dumps())
    return _strict(args, rep.passed)


def cmd_count(args) -> int:
    rep = count_report(args.X, CongruenceClass(args.m, args.N), args.sign)
    _out(rep.dumps())
    return _strict(args, rep.passed)


def cmd_cl_prob(args) -> int:
    _out(f"{cohen_lenstra_prob(args.p, args.r, args.sign):.12g}")
    return OK


def cmd_omega3(args) -> int:
    om = omega3_product(normalize(parse_family(_read(args.family))), args.pmax)
    shown = dict(list(om.omegas.items())[: args.show])
    _json({"value": om.value, "tail_bound": om.tail_bound, "p_max": om.p_max,
           "max_omega": om.max_omega, "omega": {str(p): w for p, w in shown.items()}})
    return OK


def _with_rank(spec, n: int | None):
    return spec if n is None else replace(spec, n_rank=n)


def cmd_witness(args) -> int:
    spec = _with_rank(parse_family(_read(args.family)), args.n)
    ranks = _ranks_family(args, normalize(spec), args.X)
    rep = theorem1_witnesses(spec, args.X, ranks, args.pmax)
    _out(rep.dumps(args.witness_cap))
    return _strict(args, rep.satisfied)


def cmd_corollary(args) -> int:
    spec = corollary_spec(args.n, args.part)
    ranks = _ranks_family(args, normalize(spec), args.X)
    rep = theorem1_witnesses(spec, args.X, ranks, args.pmax)
    _out(rep.dumps(args.witness_cap))
    return _strict(args, rep.satisfied)


def cmd_polyprog(args) -> int:
    res = polyprog_witness(parse_polys(_read(args.polys)), args.n, args.amax, args.dmax)
    if not res.found:
        _out("not-found")
        return _strict(args, False)
    a, d = res.witness
    _out(f"{a} {d}")
    return OK


def cmd_verify(args) -> int:
    if args.suite not in acceptance.SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(acceptance.SUITES)}")
    results = acceptance.run_suite(args.suite, echo=lambda s: (_out(s), sys.stdout.flush()))
    return OK if all(r.passed for r in results) else FAILED


# -------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cache", help="rank cache CSV (default: $THREERANK_CACHE_DIR/ranks.csv)")
    common.add_argument("--threads", type=int, default=None, help="worker processes for table building")
    common.add_argument("--strict", action="store_true", help="exit 1 when a report does not pass")
    common.add_argument("--config", help="JSON file with defaults for cache, threads, witness_cap, omega_pmax")

    # shared flags live on the subcommands only; argparse lets subparser
    # defaults clobber values parsed at the top level
    p = argparse.ArgumentParser(prog="threerank",
                                description="3-ranks of quadratic class groups and their statistics")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=func)
        return sp

    sp = add("rank", cmd_rank, "3-rank of the field discriminant of D")
    sp.add_argument("-D", type=int, required=True)

    sp = add("table", cmd_table, "write a rank table CSV for min <= D <= max")
    sp.add_argument("--min", type=int, required=True)
    sp.add_argument("--max", type=int, required=True)
    sp.add_argument("--out", required=True)

    sp = add("good-pair", cmd_good_pair, "test whether (A, B) is a good pair")
    sp.add_argument("A", type=int)
    sp.add_argument("B", type=int)

    sp = add("normalize", cmd_normalize, "normalized family as JSON")
    sp.add_argument("--family", required=True)

    for name, func, help_ in (("mean", cmd_mean, "mean of 3^r3 over S(X, m, N)"),
                              ("count", cmd_count, "size of S(X, m, N) against its main term")):
        sp = add(name, func, help_)
        sp.add_argument("--X", type=_real, required=True)
        sp.add_argument("--m", type=int, default=0)
        sp.add_argument("--N", type=int, default=1)
        sp.add_argument("--sign", type=_sign, required=True)

    sp = add("cl-prob", cmd_cl_prob, "Cohen-Lenstra probability that r_p = r")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--sign", type=_sign, required=True)

    sp = add("omega3", cmd_omega3, "Euler product Omega(3) of a family")
    sp.add_argument("--family", required=True)
    sp.add_argument("--pmax", type=int, default=None)
    sp.add_argument("--show", type=int, default=20, help="number of omega(p) values printed")

    sp = add("witness", cmd_witness, "witnesses D < X for a family")
    sp.add_argument("--family", required=True)
    sp.add_argument("--n", type=int, default=None, help="override the rank bound in the family file")
    sp.add_argument("--X", type=_real, required=True)
    sp.add_argument("--pmax", type=int, default=None)
    sp.add_argument("--witness-cap", type=int, default=None)

    sp = add("corollary", cmd_corollary, "witnesses for consecutive shifts x + i")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--part", type=int, choices=(1, 2), required=True)
    sp.add_argument("--X", type=_real, required=True)
    sp.add_argument("--pmax", type=int, default=None)
    sp.add_argument("--witness-cap", type=int, default=None)

    sp = add("polyprog", cmd_polyprog, "search a + g_i(d) with every value of small 3-rank")
    sp.add_argument("--polys", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--amax", type=int, required=True)
    sp.add_argument("--dmax", type=int, required=True)

    sp = add("verify", cmd_verify, "run an acceptance suite")
    sp.add_argument("--suite", default="full")
    return p


def _apply_config(args) -> None:
    conf = {}
    if args.config:
        try:
            conf = json.loads(_read(args.config))
        except ValueError as e:
            raise UsageError(f"bad config file: {e}") from e
        unknown = set(conf) - CONFIG_KEYS
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
    # flags win over the config file, which wins over built-in defaults
    if args.cache is None:
        args.cache = conf.get("cache")
    if args.threads is None:
        args.threads = conf.get("threads", 1)
    if getattr(args, "witness_cap", "absent") is None:
        args.witness_cap = conf.get("witness_cap", DEFAULT.witness_cap)
    if getattr(args, "pmax", "absent") is None:
        args.pmax = conf.get("omega_pmax", DEFAULT.omega_pmax)
    if args.threads < 1:
        raise UsageError("--threads must be >= 1")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return USAGE if e.code else OK
    try:
        _apply_config(args)
        return args.func(args)
    except (CacheError, CoverageError) as e:
        sys.stderr.write(f"cache error: {e}\n")
        return CACHE
    except (UsageError, ValueError) as e:
        sys.stderr.write(f"error: {e}\n")
        return USAGE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
