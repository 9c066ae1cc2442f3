"""Sample, tabulate and test Poisson-mixture lattice approximations.

``a`` is always the lattice scale (tick size): approximations live on
``a Z``.  Exit codes: 0 success, 2 usage error, 1 numeric failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Optional, Sequence

import numpy as np

from . import bounds, discretize, gof, samplers
from .errors import PoismixError
from .levy import BilateralSpec, LevySpec
from .rng import RandomSource

SCHEMA = "poismix/1"


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# spec files


def parse_spec(d: dict) -> BilateralSpec:
    """Build a spec from ``{"schema", "family", "alpha", "cminus", "lminus", "cplus", "lplus"}``.

    Point masses use ``{"family": "pointmass", "rate", "loc"}`` with
    optional ``"rate_minus"``, ``"loc_minus"``.
    """
    if d.get("schema", SCHEMA) != SCHEMA:
        raise UsageError(f"unsupported schema {d.get('schema')!r}; expected {SCHEMA!r}")
    fam = str(d.get("family", "")).lower()
    try:
        if fam in ("cts", "pt"):
            make = LevySpec.cts if fam == "cts" else LevySpec.pt
            alpha = float(d["alpha"])
            plus = make(alpha, float(d["cplus"]), float(d["lplus"]))
            cm = float(d.get("cminus", 0.0))
            minus = make(alpha, cm, float(d["lminus"])) if cm > 0 else LevySpec.zero()
            return BilateralSpec(minus, plus)
        if fam == "pointmass":
            plus = LevySpec.point_mass(float(d.get("rate", d.get("lambda"))), float(d["loc"]))
            rm = float(d.get("rate_minus", 0.0))
            minus = LevySpec.point_mass(rm, float(d["loc_minus"])) if rm > 0 else LevySpec.zero()
            return BilateralSpec(minus, plus)
    except (KeyError, TypeError) as exc:
        raise UsageError(f"spec is missing or has a malformed field: {exc}") from exc
    except ValueError as exc:
        raise UsageError(f"invalid spec: {exc}") from exc
    if fam == "custom":
        raise UsageError("custom densities are available from Python only")
    raise UsageError(f"unknown family {fam!r}")


def load_spec(path: Optional[str]) -> BilateralSpec:
    if not path:
        raise UsageError("--spec is required")
    try:
        with open(path) as fh:
            d = json.load(fh)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: not valid JSON ({exc})") from exc
    return parse_spec(d)


def _spec_json(bspec: BilateralSpec) -> str:
    return bspec.to_json()


def _floats(text: str) -> list[float]:
    out = []
    for t in text.split(","):
        t = t.strip()
        out.append(math.inf if t in ("inf", "Inf", "infinity") else float(t))
    return out


def _num(v) -> str:
    if v is None:
        return "nan"
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return repr(float(v))


# ---------------------------------------------------------------------------
# output


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _header(bspec: BilateralSpec, a, seed) -> list[str]:
    lines = [f"# spec {_spec_json(bspec)}", f"# a {_num(a)}"]
    if seed is not None:
        lines.append(f"# seed {seed}")
    return lines


def _table(rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rows, indent=2, sort_keys=True, default=float) + "\n"
    keys = list(rows[0]) if rows else []
    lines = [",".join(keys)]
    for r in rows:
        lines.append(",".join(str(r[k]) if isinstance(r[k], str) else _num(r[k]) for k in keys))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# subcommands


def _need(args, *names):
    for n in names:
        if getattr(args, n) is None:
            raise UsageError(f"--{n.replace('_', '-')} is required for {args.cmd}")
    if getattr(args, "a", None) is not None and not args.a > 0:
        raise UsageError("--a must be positive")
    if getattr(args, "n", None) is not None and args.n < 1:
        raise UsageError("--n must be positive")


def cmd_sample(args) -> None:
    _need(args, "spec", "a", "n")
    bspec = load_spec(args.spec)
    seed = 0 if args.seed is None else args.seed
    if bspec.m_minus.is_zero:
        spec = bspec.m_plus
        if args.algo == "inverse":
            batch = samplers.sample_inverse(discretize.build(spec, args.a), args.n, seed)
        else:
            counts = samplers.lattice_counts(spec, args.a, args.n, seed, algo=args.algo, threads=args.threads)
            batch = samplers.SampleBatch(args.a * counts, args.a, _spec_json(bspec), seed, counts)
    else:
        batch = samplers.sample_bilateral(bspec, args.a, args.n, seed, algo=args.algo, threads=args.threads)
    if args.format == "json":
        text = json.dumps({"spec": json.loads(_spec_json(bspec)), "a": args.a, "seed": seed,
                           "values": [float(v) for v in batch.values]}) + "\n"
    else:
        text = "\n".join(_header(bspec, args.a, seed) + [format(float(v), ".15g") for v in batch.values]) + "\n"
    _emit(args, text)


def cmd_pmf(args) -> None:
    _need(args, "spec", "a", "kmax")
    bspec = load_spec(args.spec)
    if not bspec.m_minus.is_zero:
        raise UsageError("pmf tables are defined for one-sided specs")
    if args.kmax < 0:
        raise UsageError("--kmax must be nonnegative")
    tab = samplers.pmf_recursive(discretize.tabulate(bspec.m_plus, args.a, max(args.kmax, 1)), args.kmax)
    p = np.zeros(args.kmax + 1)
    p[: tab.p.size] = tab.p
    if args.format == "json":
        text = json.dumps({"spec": json.loads(_spec_json(bspec)), "a": args.a, "pmf": p.tolist(),
                           "underflow": tab.underflow}) + "\n"
    else:
        text = "\n".join(_header(bspec, args.a, None) + ["k,p"] + [f"{k},{_num(v)}" for k, v in enumerate(p)]) + "\n"
    _emit(args, text)


def cmd_bounds(args) -> None:
    _need(args, "spec", "a_grid")
    bspec = load_spec(args.spec)
    a_values = _floats(args.a_grid)
    if any(not a > 0 for a in a_values):
        raise UsageError("--a-grid values must be positive")
    p_values = _floats(args.p) if args.p else [math.inf]
    if any(p < 1 for p in p_values):
        raise UsageError("--p values must be at least 1")
    report = bounds.bound_report(bspec, a_values, p_values, exact=args.exact)
    _emit(args, report.to_json() + "\n")


def cmd_accept(args) -> None:
    _need(args, "spec", "a")
    bspec = load_spec(args.spec)
    probs = samplers.acceptance_probabilities(bspec.m_plus, args.a)
    parts = [f"{k}={v:.4f}" if v is not None else f"{k}=n/a" for k, v in sorted(probs.items())]
    _emit(args, " ".join(parts) + "\n")


def cmd_gof(args) -> None:
    _need(args, "spec", "a", "n")
    bspec = load_spec(args.spec)
    if bspec.ts_alpha is None:
        raise UsageError("goodness of fit needs a tempered stable spec")
    seed = 0 if args.seed is None else args.seed
    ref = gof.reference_distribution(bspec)
    rows = []
    src = RandomSource(seed)
    for r in range(args.reps):
        x = samplers.sample_bilateral(bspec, args.a, args.n, src.spawn(r), algo=args.algo, threads=args.threads)
        ks, cvm = gof.ks_test(x, ref.cdf), gof.cvm_test(x, ref.cdf)
        rows.append({"rep": r, "ks_stat": ks.statistic, "ks_p": ks.p_value,
                     "cvm_stat": cvm.statistic, "cvm_p": cvm.p_value})
        if args.diagnostics and r == 0:
            gof.emit_diagnostics(x, ref, args.diagnostics)
    _emit(args, _table(rows, args.format))


def cmd_table1(args) -> None:
    n = 0 if args.n is None else args.n
    rows = gof.run_table1(n_proposals=n, seed=1 if args.seed is None else args.seed)
    _emit(args, _table(rows, args.format))


def cmd_table2(args) -> None:
    cfg = gof.StudyConfig(replications=args.reps if args.reps else (100 if args.full else 20),
                          n_per_sample=5000 if args.n is None else args.n,
                          seed=gof.StudyConfig.seed if args.seed is None else args.seed,
                          threads=args.threads, algo=args.algo)
    if args.spec:
        cfg.spec = load_spec(args.spec)
    if args.a_grid:
        cfg.a_values = _floats(args.a_grid)
    _emit(args, _table(gof.run_table2(cfg), args.format))


def cmd_rate_study(args) -> None:
    _need(args, "spec")
    bspec = load_spec(args.spec)
    if bspec.ts_alpha is None:
        raise UsageError("the rate study needs a tempered stable spec")
    a_values = _floats(args.a_grid) if args.a_grid else [2.0**-k for k in range(4, 13)]
    res = gof.run_rate_study(bspec, a_values)
    if args.format == "json":
        _emit(args, json.dumps(res, indent=2, sort_keys=True) + "\n")
    else:
        text = _table(res["rows"], "csv") + f"# slope {_num(res['slope'])}\n# predicted {_num(res['predicted_slope'])}\n"
        _emit(args, text)


COMMANDS = {
    "sample": (cmd_sample, "draw from the lattice approximation at scale a"),
    "pmf": (cmd_pmf, "exact lattice pmf p_0..p_kmax of Y_a / a (one-sided specs)"),
    "bounds": (cmd_bounds, "evaluate error bounds over a grid of a and p (JSON report)"),
    "accept": (cmd_accept, "acceptance probabilities of the two mixing-law samplers"),
    "gof": (cmd_gof, "KS and CVM tests of lattice samples against the continuous target"),
    "table1": (cmd_table1, "acceptance probability table for CTS(c=1, l=0.5)"),
    "table2": (cmd_table2, "mean KS/CVM p-value study for symmetric CTS and PT"),
    "rate-study": (cmd_rate_study, "exact Kolmogorov distance versus a, with bounds and slope"),
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="poismix", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="cmd", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text + ". a is the lattice scale (tick size).")
        p.add_argument("--spec", help="JSON spec file (schema poismix/1)")
        p.add_argument("--a", type=float, help="lattice scale (tick size), a > 0")
        p.add_argument("--n", type=int, help="sample size (table1: Monte Carlo proposals)")
        p.add_argument("--seed", type=int, help="integer seed")
        p.add_argument("--algo", choices=("auto", "inverse", "compound"), default="auto",
                       help="sampling route; all draw from the same law")
        p.add_argument("--out", help="output file (default stdout)")
        p.add_argument("--threads", type=int, default=None,
                       help=f"worker threads (default ${samplers.THREADS_ENV} or the CPU count); output does not depend on it")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--kmax", type=int, help="largest lattice index for pmf")
        p.add_argument("--a-grid", dest="a_grid", help="comma-separated lattice scales")
        p.add_argument("--p", help="comma-separated norm exponents, 'inf' allowed")
        p.add_argument("--exact", action="store_true", help="bounds: add exact Kolmogorov distances")
        p.add_argument("--reps", type=int, help="replications (gof, table2)")
        p.add_argument("--full", action="store_true", help="table2: 100 replications")
        p.add_argument("--diagnostics", help="gof: write KDE and qq CSVs with this path prefix")
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.reps is None and args.cmd == "gof":
        args.reps = 1
    if args.threads is not None and args.threads < 1:
        print("poismix: --threads must be positive", file=sys.stderr)
        return 2
    try:
        COMMANDS[args.cmd][0](args)
    except UsageError as exc:
        print(f"poismix {args.cmd}: {exc}", file=sys.stderr)
        return 2
    except (PoismixError, ArithmeticError, ValueError, OSError) as exc:
        print(f"poismix {args.cmd}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
