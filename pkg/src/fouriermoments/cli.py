"""Command-line front end: exact/Monte-Carlo moment computations, CSV/JSON
serialization, result caching, and the cross-method verification drivers.

Exit codes: 0 success, 2 parameter error, 3 budget error, 4 cross-check
failure (two exact methods disagreeing aborts with both records printed).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import time
from dataclasses import dataclass
from fractions import Fraction

from . import __version__
from .asymptotics import delta_decay_estimate, regime_check, richmond_shallit
from .errors import BudgetError, CrossCheckError, ParameterError
from .limits import (
    decompose,
    delta_direct,
    delta_exact,
    delta_m2,
    delta_m2_float,
    delta_partition,
    delta_upper_bound,
    moment_integral,
)
from .model import mc_estimate_c, mc_estimate_delta
from .truncated import DEFAULT_BUDGET, alpha, beta, c_from_d, count_d, d42_closed

CACHE_ENV_VAR = "FOURIERMOMENTS_CACHE"

CSV_HEADER = ["command", "M", "N", "p", "r", "method", "value", "value_float",
              "std_error", "z", "runtime_ms", "seed"]


@dataclass
class RunRecord:
    command: str
    method: str
    M: int | None = None
    N: int | None = None
    p: int | None = None
    r: int | None = None
    value_exact: Fraction | None = None
    value_float: float | None = None
    std_error: float | None = None
    z: float | None = None
    runtime_ms: int = 0
    seed: int | None = None

    def row(self) -> list:
        if self.value_exact is not None and self.value_float is None:
            self.value_float = float(self.value_exact)
        return [
            self.command,
            "" if self.M is None else self.M,
            "" if self.N is None else self.N,
            "" if self.p is None else self.p,
            "" if self.r is None else self.r,
            self.method,
            "" if self.value_exact is None else _ratio_str(self.value_exact),
            "" if self.value_float is None else self.value_float,
            "" if self.std_error is None else self.std_error,
            "" if self.z is None else self.z,
            self.runtime_ms,
            "" if self.seed is None else self.seed,
        ]

    def as_dict(self) -> dict:
        return dict(zip(CSV_HEADER, self.row()))


def _ratio_str(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def _emit(records: list[RunRecord], fmt: str, out_path: str | None) -> None:
    if fmt == "json":
        text = json.dumps([rec.as_dict() for rec in records], indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, quoting=csv.QUOTE_NONNUMERIC)
        writer.writerow(CSV_HEADER)
        for rec in records:
            writer.writerow(rec.row())
        text = buf.getvalue()
    if out_path:
        with open(out_path, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


class Cache:
    """One JSON document per exact value, keyed by a hash of the quantity
    key, with the engine version pinned; stale versions are recomputed."""

    def __init__(self, directory: str | None):
        self.directory = directory
        if directory:
            os.makedirs(directory, exist_ok=True)

    def _path(self, key: tuple) -> str:
        digest = hashlib.sha256(json.dumps(key).encode()).hexdigest()
        return os.path.join(self.directory, digest + ".json")

    def fetch(self, key: tuple) -> Fraction | None:
        if not self.directory:
            return None
        path = self._path(key)
        if not os.path.exists(path):
            return None
        try:
            with open(path, encoding="utf-8") as handle:
                doc = json.load(handle)
        except (OSError, json.JSONDecodeError):
            return None
        if doc.get("engine_version") != __version__:
            return None
        num, den = doc["value"].split("/")
        print(f"# cache hit: {key}", file=sys.stderr)
        return Fraction(int(num), int(den))

    def store(self, key: tuple, value: Fraction) -> None:
        if not self.directory:
            return
        doc = {"key": list(key), "value": _ratio_str(value),
               "engine_version": __version__}
        path = self._path(key)
        tmp = path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as handle:
            json.dump(doc, handle)
        os.replace(tmp, path)


def _cached(cache: Cache, key: tuple, compute) -> Fraction:
    hit = cache.fetch(key)
    if hit is not None:
        return hit
    value = compute()
    cache.store(key, value)
    return value


def _timed(fn):
    start = time.perf_counter()
    value = fn()
    return value, int(round((time.perf_counter() - start) * 1000))


def _cross_check(records: list[RunRecord]) -> None:
    exact = [r for r in records if r.value_exact is not None]
    for other in exact[1:]:
        if other.value_exact != exact[0].value_exact:
            lines = "\n".join(str(r.as_dict()) for r in (exact[0], other))
            raise CrossCheckError(
                f"exact methods disagree:\n{lines}")


def _delta_for(M: int, N: int, p: int, budget: int, cache: Cache) -> Fraction:
    return _cached(cache, ("delta:auto", M, N, p, None),
                   lambda: delta_exact(M, N, p, budget))


def cmd_truncated(args, cache: Cache) -> list[RunRecord]:
    methods = args.method.split(",")
    records = []
    for method in methods:
        if method == "direct":
            value, ms = _timed(lambda: _cached(
                cache, ("d:direct", args.M, args.N, args.p, args.r),
                lambda: count_d(args.M, args.N, args.p, args.r, args.budget,
                                threads=args.threads)))
        elif method == "alpha":
            value, ms = _timed(lambda: alpha(args.M, args.N, args.p, args.r))
        elif method == "beta":
            value, ms = _timed(lambda: beta(
                args.M, args.N, args.p, args.r,
                _delta_for(args.M, args.N, args.p, args.budget, cache)))
        elif method == "d42":
            if (args.p, args.r) != (4, 2):
                raise ParameterError("method d42 requires --p 4 --r 2")
            value, ms = _timed(lambda: d42_closed(
                args.M, args.N, _delta_for(args.M, args.N, 4, args.budget, cache)))
        else:
            raise ParameterError(f"unknown truncated method {method!r}")
        records.append(RunRecord("truncated", method, M=args.M, N=args.N,
                                 p=args.p, r=args.r, value_exact=value,
                                 runtime_ms=ms))
    _check_truncated_agreement(args, records)
    return records


def _check_truncated_agreement(args, records: list[RunRecord]) -> None:
    # alpha/beta/d42 are guaranteed to reproduce the direct count only in
    # their exactness regimes; compare only there.
    by_method = {r.method: r for r in records}
    direct = by_method.get("direct")
    if direct is None:
        return
    equal_regimes = {
        "alpha": args.M == 1 or args.N == 1 or args.r == 1 or args.p <= 2,
        "beta": args.M == 1 or args.N == 1 or args.r == 1 or args.p <= 3,
        "d42": (args.p, args.r) == (4, 2),
    }
    for method, rec in by_method.items():
        if method != "direct" and equal_regimes.get(method):
            _cross_check([direct, rec])


def cmd_limit(args, cache: Cache) -> list[RunRecord]:
    records = []
    for method in args.method.split(","):
        if method == "direct":
            value, ms = _timed(lambda: _cached(
                cache, ("delta:direct", args.M, args.N, args.p, None),
                lambda: delta_direct(args.M, args.N, args.p, args.budget)))
        elif method == "partition":
            value, ms = _timed(lambda: _cached(
                cache, ("delta:partition", args.M, args.N, args.p, None),
                lambda: delta_partition(args.M, args.N, args.p)))
        elif method == "binomial":
            if args.M == 2:
                rows = args.N
            elif args.N == 2:
                rows = args.M
            else:
                raise ParameterError("method binomial requires M = 2 or N = 2")
            value, ms = _timed(lambda: _cached(
                cache, ("delta:binomial", args.M, args.N, args.p, None),
                lambda: delta_m2(rows, args.p, args.budget)))
        elif method == "bound":
            value, ms = _timed(lambda: delta_upper_bound(args.M, args.N, args.p))
        else:
            raise ParameterError(f"unknown limit method {method!r}")
        records.append(RunRecord("limit", method, M=args.M, N=args.N,
                                 p=args.p, value_exact=value, runtime_ms=ms))
    # The bound method is an upper estimate, not another route to the value.
    _cross_check([r for r in records if r.method != "bound"])
    if args.report == "decomposition":
        report, ms = _timed(lambda: decompose(args.M, args.N, args.p))
        for (s, t), contribution in sorted(report.contributions.items()):
            records.append(RunRecord("limit", f"st[{s},{t}]", M=args.M,
                                     N=args.N, p=args.p,
                                     value_exact=contribution, runtime_ms=ms))
        records.append(RunRecord("limit", "st-total", M=args.M, N=args.N,
                                 p=args.p, value_exact=report.total,
                                 runtime_ms=ms))
    return records


def cmd_converge(args, cache: Cache) -> list[RunRecord]:
    delta = _delta_for(args.M, args.N, args.p, args.budget, cache)
    records = []
    for r in range(1, args.r_max + 1):
        start = time.perf_counter()
        d = _cached(cache, ("d:direct", args.M, args.N, args.p, r),
                    lambda: count_d(args.M, args.N, args.p, r, args.budget,
                                    threads=args.threads))
        b = beta(args.M, args.N, args.p, r, delta)
        ms = int(round((time.perf_counter() - start) * 1000))
        common = dict(M=args.M, N=args.N, p=args.p, r=r, runtime_ms=ms)
        records.append(RunRecord("converge", "direct", value_exact=d, **common))
        records.append(RunRecord("converge", "beta", value_exact=b, **common))
        records.append(RunRecord("converge", "delta", value_exact=delta, **common))
        records.append(RunRecord("converge", "gap", value_exact=d - delta, **common))
    return records


def cmd_mc(args, cache: Cache) -> list[RunRecord]:
    if args.kind == "model":
        if args.r is None:
            raise ParameterError("mc --kind model requires --r")
        est, ms = _timed(lambda: mc_estimate_c(
            args.M, args.N, args.p, args.r, args.samples, args.seed, args.budget))
        exact = None
        if args.M**(args.p + args.r) * args.N**args.p <= args.budget:
            exact = c_from_d(
                _cached(cache, ("d:direct", args.M, args.N, args.p, args.r),
                        lambda: count_d(args.M, args.N, args.p, args.r,
                                        args.budget, threads=args.threads)),
                args.M, args.N, args.p)
        record = RunRecord("mc", "mc-model", M=args.M, N=args.N, p=args.p,
                           r=args.r, value_float=est.mean,
                           std_error=est.std_error, runtime_ms=ms,
                           seed=args.seed)
    else:
        est, ms = _timed(lambda: mc_estimate_delta(
            args.M, args.N, args.p, args.samples, args.seed))
        try:
            exact = _delta_for(args.M, args.N, args.p, args.budget, cache)
        except (BudgetError, ParameterError):
            exact = None  # estimate stands alone, no z column
        record = RunRecord("mc", "mc-gram", M=args.M, N=args.N, p=args.p,
                           value_float=est.mean, std_error=est.std_error,
                           runtime_ms=ms, seed=args.seed)
    if exact is not None:
        gap = record.value_float - float(exact)
        if record.std_error == 0:
            record.z = 0.0 if abs(gap) < 1e-9 else float("inf")
        else:
            record.z = gap / record.std_error
    return [record]


def cmd_asymptotic(args, cache: Cache) -> list[RunRecord]:
    n_values = [int(x) for x in args.N.split(",")]
    report, ms = _timed(lambda: regime_check(Fraction(args.t), args.p, n_values))
    records = []
    for row in report.rows:
        records.append(RunRecord("asymptotic", "ladder", M=row.M, N=row.N,
                                 p=args.p, value_exact=row.delta,
                                 z=row.rel_error, runtime_ms=ms))
    return records


def cmd_estimate(args, cache: Cache) -> list[RunRecord]:
    if args.kind == "decay":
        value, ms = _timed(lambda: delta_m2_float(args.N, args.p))
        ref = delta_decay_estimate(args.N, args.p)
        return [RunRecord("estimate", "decay", M=2, N=args.N, p=args.p,
                          value_float=value, z=value / ref, runtime_ms=ms)]
    value, ms = _timed(lambda: moment_integral(args.N, args.k, args.budget))
    ref = richmond_shallit(args.N, args.k)
    return [RunRecord("estimate", "rs", N=args.N, p=args.k,
                      value_float=float(value), z=float(value) / ref,
                      runtime_ms=ms)]


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--out", default=None, help="output path (default stdout)")
    parser.add_argument("--cache", default=None,
                        help=f"cache directory (default ${CACHE_ENV_VAR})")
    parser.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                        help="operation budget for enumerations")
    parser.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                        help="worker processes for large enumerations")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fouriermoments",
        description="Moments of the main character of deformed Fourier "
                    "matrix models, exact and Monte Carlo.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    tr = sub.add_parser("truncated", help="truncated moments d_p^r and bounds")
    tr.add_argument("--M", type=int, required=True)
    tr.add_argument("--N", type=int, required=True)
    tr.add_argument("--p", type=int, required=True)
    tr.add_argument("--r", type=int, required=True)
    tr.add_argument("--method", default="direct",
                    help="comma list from direct,alpha,beta,d42")
    _add_common(tr)
    tr.set_defaults(func=cmd_truncated)

    lim = sub.add_parser("limit", help="limiting moments delta_p")
    lim.add_argument("--M", type=int, required=True)
    lim.add_argument("--N", type=int, required=True)
    lim.add_argument("--p", type=int, required=True)
    lim.add_argument("--method", default="partition",
                     help="comma list from direct,partition,binomial")
    lim.add_argument("--report", choices=("decomposition",), default=None)
    _add_common(lim)
    lim.set_defaults(func=cmd_limit)

    conv = sub.add_parser("converge", help="d_p^r against its r -> infinity limit")
    conv.add_argument("--M", type=int, required=True)
    conv.add_argument("--N", type=int, required=True)
    conv.add_argument("--p", type=int, required=True)
    conv.add_argument("--r-max", dest="r_max", type=int, required=True)
    _add_common(conv)
    conv.set_defaults(func=cmd_converge)

    mc = sub.add_parser("mc", help="Monte Carlo oracles")
    mc.add_argument("--kind", choices=("model", "gram"), required=True)
    mc.add_argument("--M", type=int, required=True)
    mc.add_argument("--N", type=int, required=True)
    mc.add_argument("--p", type=int, required=True)
    mc.add_argument("--r", type=int, default=None)
    mc.add_argument("--samples", type=int, required=True)
    mc.add_argument("--seed", type=int, required=True)
    _add_common(mc)
    mc.set_defaults(func=cmd_mc)

    asym = sub.add_parser("asymptotic", help="proportional-regime ladders")
    asym.add_argument("--t", required=True, help="ratio M/N (rational, e.g. 2 or 1/2)")
    asym.add_argument("--p", type=int, required=True)
    asym.add_argument("--N", required=True, help="comma list of N values")
    _add_common(asym)
    asym.set_defaults(func=cmd_asymptotic)

    est = sub.add_parser("estimate", help="large-argument decay estimates")
    est.add_argument("--kind", choices=("decay", "rs"), required=True)
    est.add_argument("--N", type=int, required=True)
    est.add_argument("--p", type=int, default=None)
    est.add_argument("--k", type=int, default=None)
    _add_common(est)
    est.set_defaults(func=cmd_estimate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "estimate":
        if args.kind == "decay" and args.p is None:
            parser.error("estimate --kind decay requires --p")
        if args.kind == "rs" and args.k is None:
            parser.error("estimate --kind rs requires --k")
    cache = Cache(args.cache or os.environ.get(CACHE_ENV_VAR))
    try:
        records = args.func(args, cache)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BudgetError as exc:
        print(f"budget error: {exc}", file=sys.stderr)
        return 3
    except CrossCheckError as exc:
        print(f"cross-check failure: {exc}", file=sys.stderr)
        return 4
    _emit(records, args.format, args.out)
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
