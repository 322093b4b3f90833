"""Command-line front end.

Every subcommand prints a JSON report (or writes it with ``--out``) and exits
0 on pass, 1 on a failed check, 2 on usage or input errors. ``kl-search``
passes when it finds a certificate.
"""

import argparse
import os
import sys

import numpy as np

from .core import DEFAULT_TOL, OpGraphError, Tolerances
from .cyclic import corollary1_build, corollary2_verify
from .dynamics import default_t_grid, random_dynamics, verify_proposition2
from .formats import FormatError, dumps, load_json, matrix_from_json, write_text_atomic
from .graphs import graph_from_json, graph_from_kraus, graph_from_povm, kraus_from_json
from .kl_codes import certificate_to_json, search_anticlique, verify_anticlique
from .naimark import dilate, dilation_to_json, povm_from_json, random_povm, verify_proposition1
from .oscillator import QuadratureGrid, verify_corollary3
from .report import Report, Timer

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _complex(text):
    parts = text.split(",")
    if len(parts) == 1:
        return complex(float(parts[0]), 0.0)
    if len(parts) == 2:
        return complex(float(parts[0]), float(parts[1]))
    raise argparse.ArgumentTypeError(f"expected RE or RE,IM, got {text!r}")


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _grid(text):
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected MIN,MAX,N")
    try:
        return QuadratureGrid(float(parts[0]), float(parts[1]), int(parts[2]))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _alphas(text):
    return [_complex(v) for v in text.split(";") if v.strip()]


def _common():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--tol", type=float, default=None, help="equality tolerance (eq_tol)")
    p.add_argument("--seed", type=int, default=None, help="RNG seed (default: $OPGRAPH_SEED or 0)")
    p.add_argument("--out", default=None, help="write the JSON report to this file")
    p.add_argument("--json", action="store_true", help="print the JSON report to stdout")
    return p


def _graph_source(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--graph", help="graph JSON file")
    src.add_argument("--kraus", help="Kraus set JSON file")
    src.add_argument("--povm", help="POVM JSON file")


def build_parser():
    common = _common()
    parser = _Parser(prog="opgraph", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    verify = sub.add_parser("verify", help="run a verification harness")
    vsub = verify.add_subparsers(dest="target", required=True, parser_class=_Parser)

    p = vsub.add_parser("prop1", parents=[common])
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--outcomes", type=int, default=4)
    p.add_argument("--random-subsets", type=int, default=10)

    p = vsub.add_parser("prop2", parents=[common])
    p.add_argument("--dimh", type=int, default=3)
    p.add_argument("--dime", type=int, default=2)
    p.add_argument("--tpoints", type=int, default=None)

    p = vsub.add_parser("corollary1", parents=[common])
    p.add_argument("--n", type=int, required=True)

    p = vsub.add_parser("corollary2", parents=[common])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--reading", choices=["literal", "bell"], default="bell")
    p.add_argument("--phi-samples", type=int, default=None)

    p = vsub.add_parser("corollary3", parents=[common])
    p.add_argument("--beta", type=_complex, default=complex(0.5))
    p.add_argument("--times", type=_floats, default=[0.0, 0.4, 1.1])
    p.add_argument("--alphas", type=_alphas, default=[0, 1, 0.8j], help="semicolon-separated RE,IM values")
    p.add_argument("--grid", type=_grid, default=QuadratureGrid())

    p = sub.add_parser("kl-check", parents=[common])
    _graph_source(p)
    p.add_argument("--projection", required=True, help="projection matrix JSON file")

    p = sub.add_parser("kl-search", parents=[common])
    _graph_source(p)
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--iters", type=int, default=20)
    p.add_argument("--steps", type=int, default=300)

    p = sub.add_parser("dilate", parents=[common])
    p.add_argument("--povm", required=True)
    p.add_argument("--minimal", action="store_true")
    return parser


def _seed(args):
    if args.seed is not None:
        return args.seed
    env = os.environ.get("OPGRAPH_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"OPGRAPH_SEED must be an integer, got {env!r}")
    return 0


def load_matrix(path):
    return matrix_from_json(load_json(path), where=os.path.basename(path))


def load_povm(path):
    return povm_from_json(load_json(path))


def _load_graph(args, tol):
    if args.graph:
        return graph_from_json(load_json(args.graph), tol)
    if args.kraus:
        return graph_from_kraus(kraus_from_json(load_json(args.kraus)), tol)
    return graph_from_povm(load_povm(args.povm), tol)


def _run(args, tol):
    seed = _seed(args)
    cmd = args.command if args.command != "verify" else f"verify {args.target}"
    if cmd == "verify prop1":
        p = random_povm(args.dim, args.outcomes, seed)
        rep = verify_proposition1(p, seed=seed, tol=tol)
        rep.parameters["seed"] = seed
        return rep
    if cmd == "verify prop2":
        d = random_dynamics(args.dimh, args.dime, seed)
        grid = default_t_grid(d, args.tpoints)
        rep = verify_proposition2(d, grid, tol=tol)
        rep.parameters["seed"] = seed
        return rep
    if cmd == "verify corollary1":
        return corollary1_build(args.n, tol)[2]
    if cmd == "verify corollary2":
        return corollary2_verify(args.n, args.reading, args.phi_samples, tol)
    if cmd == "verify corollary3":
        return verify_corollary3(args.alphas, args.beta, args.times, args.grid)
    if cmd == "kl-check":
        with Timer() as timer:
            g = _load_graph(args, tol)
            P = load_matrix(args.projection)
            cert = verify_anticlique(g, P, tol)
        return Report(
            check="kl-check",
            parameters={"dim": g.dim, "graph_size": g.size, "rank": cert.rank},
            residuals={"anticlique": cert.residual},
            thresholds={"anticlique": tol.eq_tol},
            tables={"certificate": certificate_to_json(cert)},
            runtime_ms=timer.ms,
        )
    if cmd == "kl-search":
        with Timer() as timer:
            g = _load_graph(args, tol)
            cert = search_anticlique(g, args.rank, seed=seed, iters=args.iters, steps=args.steps, tol=tol)
        rep = Report(
            check="kl-search",
            parameters={"dim": g.dim, "graph_size": g.size, "rank": args.rank, "seed": seed, "iters": args.iters},
            thresholds={"anticlique": tol.eq_tol},
            runtime_ms=timer.ms,
        )
        if cert is None:
            rep.notes.append("no anticlique found; this does not prove none exists")
        else:
            rep.residuals["anticlique"] = cert.residual
            rep.tables["certificate"] = certificate_to_json(cert)
        return rep
    if cmd == "dilate":
        with Timer() as timer:
            p = load_povm(args.povm)
            d = dilate(p, minimal=args.minimal, tol=tol)
            inv = d.invariant_residuals()
            rank_sum = int(sum(p.ranks(tol)))
        residuals = dict(inv)
        thresholds = {k: 1e-10 for k in inv}
        if args.minimal:
            residuals["dimK_minus_rank_sum"] = abs(d.dimK - rank_sum)
            thresholds["dimK_minus_rank_sum"] = 0.5
        return Report(
            check="dilate",
            parameters={"dimH": d.dimH, "dimK": d.dimK, "minimal": d.minimal, "rank_sum": rank_sum},
            residuals=residuals,
            thresholds=thresholds,
            tables={"dilation": dilation_to_json(d)},
            runtime_ms=timer.ms,
        )
    raise UsageError(f"unknown command {cmd!r}")


_VALUE_FLAGS = ("--grid", "--beta", "--times", "--alphas")


def _glue_negative_values(argv):
    # argparse reads "--grid -12,12,2001" as two options
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            if nxt is not None and nxt.startswith("-") and not nxt.startswith("--"):
                out.append(f"{tok}={nxt}")
                continue
            out.append(tok)
            if nxt is not None:
                out.append(nxt)
            continue
        out.append(tok)
    return out


def run(argv=None):
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parser.parse_args(_glue_negative_values(argv))
        tol = DEFAULT_TOL if args.tol is None else DEFAULT_TOL.with_eq_tol(args.tol)
        report = _run(args, tol)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (FormatError, OpGraphError, ValueError, OSError) as exc:
        print(f"opgraph: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = report.to_json() + "\n"
    if args.out:
        write_text_atomic(args.out, text)
    if args.json or not args.out:
        sys.stdout.write(text)
    return EXIT_PASS if report.passed else EXIT_FAIL


def main():
    sys.exit(run())
