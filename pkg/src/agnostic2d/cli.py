"""Command-line driver: ``agnostic2d {gen,learn,distance,verify,stats,bench}``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 algorithmic failure
(including a verification suite that does not pass).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__, experiments
from .data import RNG_ALGORITHM, ExampleSource, planted_by_name, save_dataset, split_rng
from .errors import AlgorithmFailure, DataError
from .meta import KGON_SAMPLE_C, Hypothesis, distance_estimate, learn_convex, learn_kgon

EXIT_USAGE, EXIT_DATA, EXIT_ALGO = 1, 2, 3
SEED_ENV = "AGNOSTIC2D_SEED"
SCHEMA_VERSION = "1"
DEFAULT_KGON_NET = 18
THEORY = "theory"
SHAPES = ("triangle", "kgon", "polygon", "disk")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def report_schema() -> dict:
    return json.loads(resources.files("agnostic2d").joinpath("report_schema.json").read_text())


# ---------------------------------------------------------------- argument types

def _prob(lo_open=True, hi=1.0, hi_closed=False):
    def conv(text):
        v = float(text)
        ok = (v > 0 if lo_open else v >= 0) and (v <= hi if hi_closed else v < hi)
        if not ok or math.isnan(v):
            lo = "(0" if lo_open else "[0"
            raise argparse.ArgumentTypeError(f"{text} not in {lo}, {hi}{']' if hi_closed else ')'}")
        return v
    return conv


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"{text} must be a positive integer")
    return v


def _net_size(text):
    return THEORY if text == "theory" else _positive_int(text)


def _seed_default() -> int:
    env = os.environ.get(SEED_ENV)
    if env is None or env == "":
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None


def _keyvals(items) -> dict:
    out = {}
    for item in items or ():
        key, sep, val = item.partition("=")
        if not sep:
            raise UsageError(f"--set expects KEY=VALUE, got {item!r}")
        try:
            out[key.replace("-", "_")] = json.loads(val)
        except json.JSONDecodeError:
            out[key.replace("-", "_")] = val
    return out


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="agnostic2d", description="Agnostic learning of planar k-gons and convex sets.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help=f"master seed (default ${SEED_ENV} or 0)")
    common.add_argument("--threads", type=_positive_int, default=None,
                        help="worker cap for inner kernels (the bundled kernels run on one thread)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", parents=[common], help="draw a labelled dataset from a planted concept")
    g.add_argument("--shape", choices=SHAPES + ("constant",), default="triangle")
    g.add_argument("-k", type=int, default=4, help="vertex count for --shape kgon")
    g.add_argument("--noise", type=_prob(False, 0.5, True), default=0.0, help="label noise rate in [0, 0.5]")
    g.add_argument("-m", type=int, required=True, help="number of examples")
    g.add_argument("--label", type=int, choices=(0, 1), default=0, help="label for --shape constant")
    g.add_argument("-o", "--out", required=True)

    for name, hlp in (("learn", "run a learner and emit a JSON report"),
                      ("distance", "estimate the distance of the labelling to a class")):
        q = sub.add_parser(name, parents=[common], help=hlp)
        q.add_argument("--class", dest="cls", choices=("kgon", "convex"), required=True)
        q.add_argument("-k", type=int, default=3)
        q.add_argument("--eps", type=_prob(), required=True)
        q.add_argument("--delta", type=_prob(hi=0.5 if name == "learn" else 1.0), required=True)
        src = q.add_mutually_exclusive_group(required=True)
        src.add_argument("--input", help="CSV dataset (x,y,label)")
        src.add_argument("--planted", choices=SHAPES, help="synthetic source with a planted concept")
        src.add_argument("--constant", type=int, choices=(0, 1), help="every label equal to this bit")
        q.add_argument("--noise", type=_prob(False, 0.5, True), default=0.0)
        q.add_argument("--planted-k", type=int, default=4, help="vertex count for --planted kgon")
        q.add_argument("--replace", action="store_true", help="resample file rows with replacement")
        q.add_argument("--assert-uniform", action="store_true",
                       help="declare that the file's points are uniform on the unit square")
        q.add_argument("--c", type=float, default=KGON_SAMPLE_C, help="k-gon sample constant: ceil(c/eps^2)")
        q.add_argument("--net-c", type=float, default=None, help="k-gon net constant")
        q.add_argument("--net-size", type=_net_size, default=None,
                       help=f"net size, or 'theory' (k-gon default {DEFAULT_KGON_NET}; convex default theory)")
        q.add_argument("--log-base", choices=("e", "2"), default="e")
        q.add_argument("--c1", type=float, default=4.0, help="convex sample constant")
        q.add_argument("--c2", type=float, default=8.0, help="convex net constant")
        q.add_argument("--sample-size", type=_positive_int, default=None, help="convex sample size override")
        q.add_argument("--lam", type=float, default=7.0, help="hull vertex bound factor")
        q.add_argument("--mode", choices=("indexed", "exhaustive"), default="indexed")
        q.add_argument("--mc", type=int, default=100_000, help="Monte-Carlo examples (synthetic sources)")
        q.add_argument("--report", help="write the JSON report here instead of stdout")
        q.add_argument("--render", help="write an SVG of the sample and hypothesis")
        q.add_argument("--render-points", type=_positive_int, default=2000,
                       help="points drawn for rendering synthetic sources")

    v = sub.add_parser("verify", parents=[common], help="run an oracle or property suite")
    v.add_argument("--suite", choices=sorted(experiments.SUITES), required=True)
    v.add_argument("--trials", type=int, default=None)
    v.add_argument("--set", action="append", metavar="KEY=VALUE", help="suite keyword override")
    v.add_argument("--csv", help="write per-trial rows here")

    s = sub.add_parser("stats", parents=[common], help="statistical checks")
    s.add_argument("--check", choices=sorted(experiments.STATS), required=True)
    s.add_argument("--shape", choices=("disk",), default="disk", help="missing-area body")
    s.add_argument("-n", type=_positive_int, nargs="+", default=None, help="net sizes (valtr)")
    s.add_argument("--ell", type=_positive_int, nargs="+", default=None, help="sample sizes (missing-area)")
    s.add_argument("--trials", type=int, default=None)
    s.add_argument("--lam", type=float, default=7.0)
    s.add_argument("-o", "--out", help="CSV file (default stdout)")

    b = sub.add_parser("bench", parents=[common], help="timing benchmarks with a fitted exponent")
    b.add_argument("--target", choices=sorted(experiments.BENCHES), required=True)
    b.add_argument("--sizes", type=_positive_int, nargs="*", default=None)
    b.add_argument("--repeats", type=_positive_int, default=None)
    b.add_argument("-o", "--out", help="CSV file (default stdout)")
    return p


# ---------------------------------------------------------------- helpers

def _write_csv(rows: list[dict], dest, footer: list[str] = ()) -> None:
    buf = io.StringIO()
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    for line in footer:
        buf.write(f"# {line}\n")
    if dest:
        Path(dest).write_text(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())


def _source(args, seed: int) -> ExampleSource:
    if args.input is not None:
        if args.noise:
            raise UsageError("--noise applies to synthetic sources only")
        return ExampleSource.from_file(args.input, replace=args.replace, assert_uniform=args.assert_uniform,
                                       seed=seed)
    if args.constant is not None:
        return ExampleSource.constant(args.constant, seed=seed)
    return ExampleSource.planted(planted_by_name(args.planted, args.planted_k), args.noise, seed=seed)


def _learner_kwargs(args) -> tuple[dict, dict]:
    """Keyword arguments for the learner and the constants echoed in the report."""
    if args.cls == "kgon":
        net_n = args.net_size
        if net_n is None:
            net_n = DEFAULT_KGON_NET if args.net_c is None else None
        elif net_n == THEORY:
            net_n = None
        kw = {"c": args.c, "net_c": args.net_c, "net_n": net_n, "log_base": args.log_base, "mode": args.mode}
        return kw, {**kw, "k": args.k}
    n = None if args.net_size == THEORY else args.net_size
    kw = {"c1": args.c1, "c2": args.c2, "s": args.sample_size, "n": n, "lam": args.lam,
          "mode": args.mode}
    return kw, dict(kw)


def _hypothesis_json(h: Hypothesis, args) -> dict:
    out = {"kind": h.kind, "vertices": [[float(x), float(y)] for x, y in h.vertices], "k": h.k}
    if args.cls == "convex":
        n = h.info.get("net_size")
        out["vertex_bound"] = None if n is None else args.lam * n ** (1 / 3)
    return out


def _monte_carlo(h: Hypothesis, source: ExampleSource, m: int) -> float | None:
    if source.kind == "file" or m <= 0:
        return None
    probe = source.spawn(_PROBE_STREAM).draw(m)
    return float(np.mean(h.evaluate(probe.points) != probe.labels.astype(bool)))


_PROBE_STREAM = 6
_RENDER_STREAM = 8


def _render(path, h: Hypothesis, source: ExampleSource, m: int, title: str) -> None:
    from .render import render_svg

    S = source.data if source.kind == "file" else source.spawn(_RENDER_STREAM).draw(m)
    Path(path).write_text(render_svg(S, None if h.is_constant0 else h.vertices, title=title))


# ---------------------------------------------------------------- commands

def cmd_gen(args, seed: int) -> int:
    if args.m < 0:
        raise UsageError("-m must be non-negative")
    if args.shape == "constant":
        if args.noise:
            raise UsageError("--noise does not apply to --shape constant")
        src = ExampleSource.constant(args.label, seed=seed)
    else:
        src = ExampleSource.planted(planted_by_name(args.shape, args.k), args.noise, seed=seed)
    S = src.draw(args.m)
    meta = {**src.metadata(), "m": args.m, "command": "gen", "version": __version__}
    save_dataset(S, args.out, metadata=meta)
    print(f"wrote {args.m} examples to {args.out}")
    return 0


def cmd_learn(args, seed: int) -> int:
    if args.k < 3:
        raise UsageError("-k must be at least 3")
    if args.cls == "convex" and args.input is not None and not args.assert_uniform:
        raise UsageError("the convex learner needs a uniform marginal: pass --assert-uniform with --input")
    timings = {}
    t0 = time.perf_counter()
    source = _source(args, seed)
    timings["load"] = time.perf_counter() - t0
    kw, constants = _learner_kwargs(args)
    rng = split_rng(seed, "learner")

    t0 = time.perf_counter()
    dist = None
    if args.command == "distance":
        est = distance_estimate(args.cls, args.eps, args.delta, source, rng, **({"k": args.k} if args.cls == "kgon"
                                                                              else {}), **kw)
        h, dist = est.hypothesis, float(est.value)
    elif args.cls == "kgon":
        h = learn_kgon(args.eps, args.delta, args.k, source, rng, **kw)
    else:
        h = learn_convex(args.eps, args.delta, source, rng, **kw)
    timings["learn"] = time.perf_counter() - t0
    timings["base_runs"] = float(sum(h.info.get("base_seconds", [])))

    t0 = time.perf_counter()
    mc = _monte_carlo(h, source, args.mc)
    timings["monte_carlo"] = time.perf_counter() - t0

    info = h.info
    samples = {"base": int(info["base_samples"]), "validation": int(info["validation_samples"]),
               "total": int(source.drawn), "invocations": int(info["t"])}
    if dist is not None:
        samples["distance"] = int(source.drawn - info["samples"])
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": args.command,
        "parameters": {"class": args.cls, "k": args.k if args.cls == "kgon" else None, "eps": args.eps,
                       "delta": args.delta, "seed": seed, "constants": constants,
                       "source": source.metadata()},
        "samples": samples,
        "hypothesis": _hypothesis_json(h, args),
        "errors": {"validation": info["validation_errors"], "chosen": int(info["chosen"]),
                   "failures": list(info["failures"]), "monte_carlo": mc,
                   "monte_carlo_samples": 0 if mc is None else int(args.mc)},
        "timings": timings,
        "rng": RNG_ALGORITHM,
    }
    if dist is not None:
        report["errors"]["distance_estimate"] = dist
    if args.render:
        t0 = time.perf_counter()
        _render(args.render, h, source, args.render_points, f"{args.cls} seed={seed}")
        timings["render"] = time.perf_counter() - t0
    text = json.dumps(report, indent=2) + "\n"
    if args.report:
        Path(args.report).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _summary(res: experiments.CheckResult) -> str:
    verdict = "PASS" if res.ok else "FAIL"
    if res.name in ("disc", "claim", "kgon-oracle", "island-oracle"):
        return f"{res.passed}/{res.total} exact matches: {verdict}"
    return f"{res.passed}/{res.total} trials passed (need {res.required:.0%}): {verdict}"


def cmd_verify(args, seed: int) -> int:
    kw = _keyvals(args.set)
    if args.trials is not None:
        if args.trials < 1:
            raise UsageError("--trials must be at least 1")
        kw["trials"] = args.trials
    fn = experiments.SUITES[args.suite]
    try:
        res = fn(seed=seed, **kw)
    except TypeError as exc:
        raise UsageError(f"bad option for suite {args.suite}: {exc}") from None
    if args.csv:
        _write_csv(res.rows, args.csv)
    for key, val in res.extra.items():
        print(f"{key}: {val}")
    print(_summary(res))
    return 0 if res.ok else EXIT_ALGO


def cmd_stats(args, seed: int) -> int:
    kw = {}
    if args.trials is not None:
        if args.trials < 1:
            raise UsageError("--trials must be at least 1")
        kw["trials"] = args.trials
    if args.check == "valtr":
        if args.n is not None:
            kw["ns"] = tuple(args.n)
        kw["lam"] = args.lam
    elif args.ell is not None:
        kw["ells"] = tuple(args.ell)
    res = experiments.STATS[args.check](seed=seed, **kw)
    footer = [f"{k}: {v}" for k, v in res.extra.items()]
    footer.append(f"{res.passed}/{res.total} {'PASS' if res.ok else 'FAIL'}")
    _write_csv(res.rows, args.out, footer)
    if args.out:
        print("\n".join(footer))
    return 0


def cmd_bench(args, seed: int) -> int:
    kw = {}
    if args.sizes is not None:
        if not args.sizes:
            raise UsageError("--sizes needs at least one value")
        kw["sizes"] = tuple(args.sizes)
    if args.repeats is not None:
        kw["repeats"] = args.repeats
    res = experiments.BENCHES[args.target](seed=seed, **kw)
    footer = [f"target: {res.target}", f"exponent: {res.exponent:.3f}"]
    footer += [f"{k}: {v}" for k, v in res.extra.items()]
    _write_csv(res.rows, args.out, footer)
    if args.out:
        print("\n".join(footer))
    return 0


COMMANDS = {"gen": cmd_gen, "learn": cmd_learn, "distance": cmd_learn, "verify": cmd_verify,
            "stats": cmd_stats, "bench": cmd_bench}


def _cap_threads(n: int | None) -> None:
    if n is None:
        return
    import warnings

    import numba

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # threading-layer probe noise
        try:
            numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))
        except ValueError:
            pass


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        seed = args.seed if args.seed is not None else _seed_default()
        _cap_threads(args.threads)
        return COMMANDS[args.command](args, seed)
    except UsageError as exc:
        print(f"agnostic2d: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError) as exc:
        print(f"agnostic2d: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except AlgorithmFailure as exc:
        print(f"agnostic2d: algorithm failure: {exc}", file=sys.stderr)
        return EXIT_ALGO
    except ValueError as exc:
        print(f"agnostic2d: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
