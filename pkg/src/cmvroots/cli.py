"""Command-line front end: ``roots``, ``bench`` and ``compare``."""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import poly
from .companion import companion_dense
from .dense_oracle import EPS, dense_eigenvalues
from .metrics import summarize
from .poly import Polynomial, PolynomialError
from .structqr import SolveOptions, solve

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NONCONVERGED = 2

SETS = ("P1", "P2", "P3", "P4", "P5", "P6")
P4_KINDS = ("bernoulli", "chebyshev", "exp")
DENSE_ORACLE_MAX_DEGREE = 256


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse exits with 2 by default; usage errors are 1 here
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(x: float) -> str:
    return format(float(x), ".17g")


# ---------------------------------------------------------------- instances


@dataclass(frozen=True)
class Instance:
    set: str
    n: int
    poly: Polynomial
    seed: Optional[int] = None


def make_instance(name: str, n: int, lam: Optional[float], kind: str, seed: Optional[int]) -> Instance:
    if name == "P1":
        p = poly.gen_P1(n)
    elif name == "P2":
        p = poly.gen_P2(n)
    elif name == "P3":
        if lam is None:
            raise UsageError("P3 needs --lambda")
        p = poly.gen_P3(n, lam)
    elif name == "P4":
        p = poly.gen_P4(kind, n)
    elif name == "P5":
        p = poly.gen_P5(n, seed)
    elif name == "P6":
        p = poly.gen_P6(n, seed)
    else:
        raise UsageError(f"unknown set {name!r}")
    return Instance(name, n, p, seed)


def degree_to_n(name: str, degree: int) -> int:
    """Set parameter ``n`` producing a polynomial of the given degree."""
    if name in ("P1", "P2", "P6"):
        if degree % 2:
            raise UsageError(f"{name} has even degree only (got {degree})")
        return degree // 2
    if name == "P3":
        return degree - 1
    return degree


def validate_params(name: str, lam, seeds, kind_given: bool) -> None:
    if name not in SETS:
        raise UsageError(f"unknown set {name!r}; choose from {', '.join(SETS)}")
    if lam is not None and name != "P3":
        raise UsageError("--lambda applies to P3 only")
    if name == "P3" and lam is None:
        raise UsageError("P3 needs --lambda")
    if seeds is not None and name not in ("P5", "P6"):
        raise UsageError("--seeds applies to P5 and P6 only")
    if kind_given and name != "P4":
        raise UsageError("--kind applies to P4 only")


def reference_roots(inst: Instance, oracle: str) -> Optional[np.ndarray]:
    """Reference roots under the ``--oracle`` policy, or ``None`` for residual-only runs."""
    p = inst.poly
    if oracle == "none":
        return None
    if oracle == "closed-form" or (oracle == "auto" and inst.set == "P1"):
        if inst.set != "P1":
            raise UsageError("closed-form roots are available for P1 only")
        return poly.roots_P1(inst.n)
    if oracle == "auto" and p.degree > DENSE_ORACLE_MAX_DEGREE:
        return None
    q, mult = poly.strip_zero_roots(p)
    roots = dense_eigenvalues(companion_dense(q)).roots if q.degree else np.zeros(0, dtype=complex)
    return np.concatenate([np.zeros(mult, dtype=complex), roots])


# ---------------------------------------------------------------- roots


def cmd_roots(args) -> int:
    try:
        coeffs = poly.read_coefficients(args.coeff_file)
        # vanishing leading coefficients lower the degree
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        if not coeffs:
            raise PolynomialError("all coefficients are zero")
        p = Polynomial(coeffs)
    except (OSError, PolynomialError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if p.degree < 1:
        print("error: polynomial must have degree >= 1", file=sys.stderr)
        return EXIT_USAGE
    rep = solve(p, SolveOptions(max_sweeps=args.max_sweeps))
    out = sys.stdout
    for z in rep.roots:
        if args.format == "csv":
            out.write(f"{float(z.real)!r},{float(z.imag)!r}\n")
        else:
            out.write(f"{float(z.real)!r} {float(z.imag):+}i\n")
    out.write(f"# degree={p.degree}\n# sweeps={rep.sweeps}\n# averit={fmt(rep.averit)}\n")
    out.write(f"# flags={';'.join(rep.flags) if rep.flags else 'none'}\n")
    return EXIT_OK if rep.converged else EXIT_NONCONVERGED


# ---------------------------------------------------------------- bench


@dataclass
class BenchRow:
    nne_over_eps: float
    err: float
    werr: float
    averit: float
    converged: bool


def run_instance(inst: Instance, oracle: str, max_sweeps: Optional[int]) -> BenchRow:
    rep = solve(inst.poly, SolveOptions(max_sweeps=max_sweeps, seed=inst.seed or 0))
    ref = reference_roots(inst, oracle)
    if ref is None:
        # residual-only: the conditioning estimate uses the computed roots, err is left undefined
        full = summarize(rep, rep.roots, inst.poly)
        return BenchRow(full.nne / EPS, math.nan, math.nan, rep.averit, rep.converged)
    full = summarize(rep, ref, inst.poly)
    return BenchRow(full.nne / EPS, full.err, full.werr, rep.averit, rep.converged)


def _nanmax(values: Sequence[float]) -> float:
    finite = [v for v in values if not math.isnan(v)]
    return max(finite) if finite else math.nan


def bench_rows(args) -> tuple[list[list[str]], bool]:
    name = args.set
    validate_params(name, args.lam, args.seeds, args.kind is not None)
    kind = args.kind or "bernoulli"
    if args.degrees:
        params = [degree_to_n(name, d) for d in args.degrees]
    elif args.n:
        params = list(args.n)
    else:
        raise UsageError("give --n or --degrees")
    if any(k < 1 for k in params):
        raise UsageError("parameters must be positive")
    label = f"P4-{kind}" if name == "P4" else name
    rows = []
    ok = True
    for k in params:
        if name in ("P5", "P6"):
            count = args.seeds if args.seeds is not None else 1
            if count < 1:
                raise UsageError("--seeds must be positive")
            runs = [
                run_instance(make_instance(name, k, None, kind, args.seed + i), args.oracle, args.max_sweeps)
                for i in range(count)
            ]
            nne = [r.nne_over_eps for r in runs]
            rows.append([
                label, str(k), f"{fmt(min(nne))}:{fmt(max(nne))}",
                fmt(_nanmax([r.err for r in runs])), fmt(_nanmax([r.werr for r in runs])),
                fmt(max(r.averit for r in runs)),
            ])
            ok &= all(r.converged for r in runs)
        else:
            r = run_instance(make_instance(name, k, args.lam, kind, None), args.oracle, args.max_sweeps)
            rows.append([label, str(k), fmt(r.nne_over_eps), fmt(r.err), fmt(r.werr), fmt(r.averit)])
            ok &= r.converged
    return rows, ok


BENCH_HEADER = ["test", "n", "nne_over_eps", "err", "werr", "averit"]


def _write_csv(path: Optional[str], header, rows) -> None:
    fh = open(path, "w", newline="") if path and path != "-" else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    finally:
        if fh is not sys.stdout:
            fh.close()


def cmd_bench(args) -> int:
    try:
        rows, ok = bench_rows(args)
    except (UsageError, PolynomialError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _write_csv(args.out, BENCH_HEADER, rows)
    return EXIT_OK if ok else EXIT_NONCONVERGED


# ---------------------------------------------------------------- compare


def cmd_compare(args) -> int:
    try:
        validate_params(args.set, args.lam, None, args.kind is not None)
        if args.degree is not None:
            n = degree_to_n(args.set, args.degree)
        elif args.n is not None:
            n = args.n
        else:
            raise UsageError("give --n or --degree")
        if args.oracle == "none":
            raise UsageError("compare needs a reference; --oracle none is not allowed")
        inst = make_instance(args.set, n, args.lam, args.kind or "bernoulli", args.seed)
        rep = solve(inst.poly, SolveOptions(max_sweeps=args.max_sweeps, seed=args.seed))
        oracle = "dense" if args.oracle == "auto" and args.set != "P1" else args.oracle
        ref = reference_roots(inst, oracle)
    except (UsageError, PolynomialError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    rows = [[fmt(z.real), fmt(z.imag), "fast"] for z in rep.roots]
    rows += [[fmt(z.real), fmt(z.imag), "reference"] for z in ref]
    _write_csv(args.out, ["re", "im", "source"], rows)
    return EXIT_OK if rep.converged else EXIT_NONCONVERGED


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="cmvroots", description="Polynomial roots by structured QR on a permuted companion matrix.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("roots", help="solve a polynomial read from a coefficient file")
    r.add_argument("coeff_file", help="one coefficient per line, constant term first ('re' or 're im')")
    r.add_argument("--format", choices=("csv", "text"), default="csv")
    r.add_argument("--max-sweeps", type=int, default=None)
    r.set_defaults(func=cmd_roots)

    def common(p):
        p.add_argument("--set", required=True, choices=SETS)
        p.add_argument("--lambda", dest="lam", type=float, default=None, help="P3 parameter")
        p.add_argument("--kind", choices=P4_KINDS, default=None, help="P4 family (default bernoulli)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None, help="output CSV (default stdout)")
        p.add_argument("--max-sweeps", type=int, default=None)
        p.add_argument("--oracle", choices=("auto", "dense", "closed-form", "none"), default="auto")

    b = sub.add_parser("bench", help="accuracy and iteration statistics for a test set")
    common(b)
    g = b.add_mutually_exclusive_group()
    g.add_argument("--n", type=int, nargs="+", help="set parameter(s) n")
    g.add_argument("--degrees", type=int, nargs="+", help="polynomial degree(s)")
    b.add_argument("--seeds", type=int, default=None, help="number of random instances (P5/P6)")
    b.set_defaults(func=cmd_bench)

    c = sub.add_parser("compare", help="scatter data: computed and reference roots")
    common(c)
    g = c.add_mutually_exclusive_group()
    g.add_argument("--n", type=int)
    g.add_argument("--degree", type=int)
    c.set_defaults(func=cmd_compare)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
