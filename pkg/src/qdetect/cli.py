"""Command-line interface.

Exit codes: 0 success, 1 statistical check failed, 2 usage or validation
error, 3 I/O error. Diagnostics go to stderr (level from ``QDETECT_LOG``);
stdout carries only data.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import logging
import math
import os
import sys

import numpy as np

from . import corpus, lattice
from .core import BernoulliPair, detect, embed, optimal_measurement
from .errors import QDetectError
from .estimators import pseudo_relevance
from .simulator import SimConfig, simulate_classical, simulate_quantum

EXIT_OK, EXIT_STAT, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

log = logging.getLogger("qdetect")


class UsageError(Exception):
    pass


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def _vec(v) -> str:
    return "(" + ", ".join(_fmt(c + 0.0) for c in v) + ")"


def _region(region) -> str:
    return "{" + ",".join(str(x) for x in sorted(region)) + "}"


def _configure_logging() -> None:
    level = os.environ.get("QDETECT_LOG", "warn").lower()
    levels = {"error": logging.ERROR, "warn": logging.WARNING, "warning": logging.WARNING,
              "info": logging.INFO, "debug": logging.DEBUG}
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root = logging.getLogger("qdetect")
    root.handlers[:] = [handler]
    root.setLevel(levels.get(level, logging.WARNING))
    root.propagate = False


@contextlib.contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
        return
    try:
        fh = open(path, "w", encoding="utf-8", newline="")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc
    with fh:
        yield fh


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def xi_grid(xi_min: float, xi_max: float, steps: int) -> np.ndarray:
    if not 0.0 <= xi_min <= xi_max <= 1.0:
        raise UsageError("need 0 <= xi-min <= xi-max <= 1")
    if steps < 2:
        raise UsageError("steps must be at least 2")
    return np.linspace(xi_min, xi_max, steps)


# -- detect -----------------------------------------------------------------

def cmd_detect(args) -> int:
    report = detect(BernoulliPair(args.p1_m0, args.p1_m1), args.xi, args.lam)
    out = sys.stdout
    rows = [
        ("p1_m0", _fmt(report.model.p1_m0)),
        ("p1_m1", _fmt(report.model.p1_m1)),
        ("xi", _fmt(report.xi)),
        ("lambda", "inf" if math.isinf(report.lam) else _fmt(report.lam)),
        ("fidelity", _fmt(report.fidelity)),
        ("gamma", _fmt(report.gamma)),
        ("theta", _fmt(report.theta)),
        ("region", _region(report.classical.region)),
        ("P_0", _fmt(report.classical.p_false_alarm)),
        ("P_d", _fmt(report.classical.p_detection)),
        ("P_e", _fmt(report.p_error)),
        ("P_c", _fmt(report.p_correct)),
        ("Q_0", _fmt(report.q_false_alarm)),
        ("Q_d", _fmt(report.q_detection)),
        ("Q_e", _fmt(report.q_error)),
        ("Q_c", _fmt(report.q_correct)),
        ("m0", _vec(report.m0)),
        ("m1", _vec(report.m1)),
    ]
    if report.basis is not None:
        rows += [("mu0", _vec(report.basis.mu0)), ("mu1", _vec(report.basis.mu1)),
                 ("eigenvalue1", _fmt(report.basis.eigenvalue1))]
    else:
        rows.append(("basis", "none"))
    for key, value in rows:
        out.write(f"{key}={value}\n")
    return EXIT_OK


# -- sweep ------------------------------------------------------------------

def _sweep_curve(args, grid) -> corpus.ErrorCurve:
    explicit = args.p1_m0 is not None or args.p1_m1 is not None
    on_corpus = args.topic is not None
    sources = sum([explicit, on_corpus, args.pseudo is not None])
    if sources != 1:
        raise UsageError("choose exactly one model source: --p1-m0/--p1-m1, --pseudo n N, or --topic [--term]")
    if explicit:
        if args.p1_m0 is None or args.p1_m1 is None:
            raise UsageError("--p1-m0 and --p1-m1 go together")
        return corpus.error_curve(BernoulliPair(args.p1_m0, args.p1_m1), grid)
    if args.pseudo is not None:
        n, N = args.pseudo
        return corpus.error_curve(pseudo_relevance(n, N), grid)
    c = _load_corpus(args)
    if args.term is None:
        return corpus.topic_error_curves(c, args.topic, grid).average
    model, how = corpus.estimate_model(corpus.term_topic_stats(c, args.topic, args.term))
    log.info("topic %s term %s: %s estimate %s", args.topic, args.term, how, model)
    return corpus.error_curve(model, grid)


def cmd_sweep(args) -> int:
    grid = xi_grid(args.xi_min, args.xi_max, args.steps)
    curve = _sweep_curve(args, grid)
    with _output(args.out) as fh:
        w = _writer(fh)
        w.writerow(["xi", "pe", "qe", "fidelity"])
        for row in zip(curve.xi, curve.pe, curve.qe, curve.fidelity):
            w.writerow([_fmt(v) for v in row])
    return EXIT_OK


# -- surface ----------------------------------------------------------------

def cmd_surface(args) -> int:
    grid = xi_grid(args.xi_min, args.xi_max, args.steps)
    if not 0.0 < args.p_min <= args.p_max < 1.0:
        raise UsageError("p1_m0 grid must lie strictly inside (0, 1)")
    if args.p_steps < 1 or (args.p_steps == 1 and args.p_min != args.p_max):
        raise UsageError("p-steps must be positive (1 only when p-min == p-max)")
    p_grid = np.linspace(args.p_min, args.p_max, args.p_steps)
    with _output(args.out) as fh:
        w = _writer(fh)
        w.writerow(["xi", "p1_m0", "pe", "qe"])
        for xi in grid:
            for p0 in p_grid:
                r = detect(BernoulliPair(float(p0), 0.5), float(xi))
                w.writerow([_fmt(xi), _fmt(p0), _fmt(r.p_error), _fmt(r.q_error)])
    return EXIT_OK


# -- topics -----------------------------------------------------------------

def _load_corpus(args) -> corpus.Collection:
    missing = [f"--{name}" for name in ("docs", "topics", "qrels") if getattr(args, name) is None]
    if missing:
        raise UsageError("missing " + ", ".join(missing))
    return corpus.ingest(args.docs, args.topics, args.qrels)


def cmd_topics(args) -> int:
    c = _load_corpus(args)
    with _output(args.out) as fh:
        w = _writer(fh)
        w.writerow(["topic_id", "avg_relative_frequency"])
        for topic_id, value in corpus.topic_averages(c):
            w.writerow([topic_id, f"{value:.4f}"])
    return EXIT_OK


# -- simulate ---------------------------------------------------------------

def cmd_simulate(args) -> int:
    cfg = SimConfig(
        trials=args.trials, seed=args.seed, xi=args.xi,
        model=BernoulliPair(args.p1_m0, args.p1_m1), lam=args.lam,
    )
    run = simulate_quantum if args.channel == "quantum" else simulate_classical
    res = run(cfg, workers=args.workers)
    out = sys.stdout
    out.write(f"channel={args.channel}\n")
    out.write(f"trials={res.trials}\n")
    out.write(f"seed={cfg.seed}\n")
    out.write(f"errors={res.errors}\n")
    out.write(f"empirical_error={_fmt(res.empirical_error)}\n")
    out.write(f"analytic_error={_fmt(res.analytic_error)}\n")
    out.write(f"standard_error={_fmt(res.standard_error)}\n")
    out.write(f"z_score={res.z_score:.4f}\n")
    ok = abs(res.z_score) < 4.0
    if not ok:
        log.error("empirical error deviates from the analytic value by %.2f standard errors", res.z_score)
    return EXIT_OK if ok else EXIT_STAT


# -- lattice demo -----------------------------------------------------------

def _describe(name: str, s: lattice.Subspace) -> str:
    vectors = ", ".join(_vec(np.round(v, 12)) for v in s.basis)
    return f"{name}: rank {s.rank}" + (f" basis [{vectors}]" if s.rank else " (null subspace)")


def _demo_case(out, title, config) -> None:
    gap = lattice.distributivity_gap(*config)
    out.write(f"configuration: {title}\n")
    out.write(_describe("left  a ^ (b v c)", gap.left) + "\n")
    out.write(_describe("right (a ^ b) v (a ^ c)", gap.right) + "\n")
    out.write(f"distributive: {str(gap.equal).lower()}\n")


def cmd_lattice_demo(args) -> int:
    out = sys.stdout
    if not args.orthogonal:
        _demo_case(out, "oblique a=L_e2 b=L_y c=L_x, x=(1,1,0)/sqrt2 y=(1,-1,0)/sqrt2",
                   lattice.oblique_configuration())
        out.write("\n")
    _demo_case(out, "orthogonal a=L_e2 b=L_e1 c=L_e3", lattice.orthogonal_configuration())
    if not args.orthogonal:
        # the optimal acceptance ray of the 4/5 vs 1 example is not a region
        # built from the occurrence vectors |1>, |0>
        m0, m1 = embed(BernoulliPair(0.8, 1.0))
        mu1 = optimal_measurement(m0, m1, 1.0).mu1
        ray = lattice.Subspace.span_of(list(mu1))
        expressible = lattice.is_expressible(ray, [[1.0, 0.0], [0.0, 1.0]])
        out.write("\n")
        out.write(f"optimal ray mu1={_vec(mu1)} expressible from occurrence subspaces: "
                  f"{str(expressible).lower()}\n")
    return EXIT_OK


# -- parser -----------------------------------------------------------------

def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qdetect", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="classical vs quantum detection for one term and prior")
    p.add_argument("p1_m0", type=float)
    p.add_argument("p1_m1", type=float)
    p.add_argument("xi", type=float, help="prior probability of non-relevance")
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.set_defaults(func=cmd_detect)

    def add_grid(p):
        p.add_argument("--xi-min", type=float, default=0.0)
        p.add_argument("--xi-max", type=float, default=1.0)
        p.add_argument("--steps", type=int, default=101)
        p.add_argument("--out", default=None, help="output CSV (default stdout)")

    def add_corpus(p):
        p.add_argument("--docs")
        p.add_argument("--topics")
        p.add_argument("--qrels")

    p = sub.add_parser("sweep", help="P_e and Q_e against the prior")
    add_grid(p)
    p.add_argument("--p1-m0", type=float)
    p.add_argument("--p1-m1", type=float)
    p.add_argument("--pseudo", type=int, nargs=2, metavar=("n", "N"),
                   help="pseudo-relevance model from document frequency n in N documents")
    add_corpus(p)
    p.add_argument("--topic")
    p.add_argument("--term", help="single query term; omit for the topic average")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("surface", help="P_e and Q_e over prior and p(1|m0), p(1|m1) = 1/2")
    add_grid(p)
    p.add_argument("--p-min", type=float, default=0.01)
    p.add_argument("--p-max", type=float, default=0.99)
    p.add_argument("--p-steps", type=int, default=99)
    p.set_defaults(func=cmd_surface)

    p = sub.add_parser("topics", help="average relative frequency per topic")
    add_corpus(p)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_topics)

    p = sub.add_parser("simulate", help="Monte Carlo check of one channel")
    p.add_argument("p1_m0", type=float)
    p.add_argument("p1_m1", type=float)
    p.add_argument("--xi", type=float, default=0.5)
    p.add_argument("--trials", type=_positive_int, default=100_000)
    p.add_argument("--seed", type=_u64, default=0)
    p.add_argument("--channel", choices=("classical", "quantum"), default="quantum")
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--workers", type=_positive_int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("lattice-demo", help="distributive-law failure for oblique subspaces")
    p.add_argument("--orthogonal", action="store_true", help="only the orthogonal case")
    p.set_defaults(func=cmd_lattice_demo)
    return parser


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ValueError, QDetectError) as exc:
        print(f"qdetect {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"qdetect {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
