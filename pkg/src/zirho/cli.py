"""Command-line front end: ``zirho {exact,estimate,bounds,simulate}``."""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import sim
from .bounds import (RECIPES, bounds_closed_form, bounds_oracle, empirical_bounds,
                     estimate_inflation)
from .copulas import CopulaSpec, PairedSample, joint_pmf
from .estimator import estimate_rho_A
from .exact import decompose, spearman_exact, theorem1_eval
from .margins import DEFAULT_EPS, DiscretePmf, PoissonSpec, parse_margin, read_pmf_csv

SIG_DIGITS = 12


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _round(obj):
    """Round every float to 12 significant digits for output."""
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return float(format(x, f".{SIG_DIGITS}g")) if math.isfinite(x) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set)):
        items = sorted(obj) if isinstance(obj, set) else obj
        return [_round(v) for v in items]
    return obj


def read_pairs_csv(path) -> PairedSample:
    """Two integer columns ``x,y``; a non-numeric first row is taken as a header."""
    pairs = []
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or not "".join(row).strip():
                continue
            if len(row) != 2:
                raise ValueError(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
            try:
                x, y = (int(v.strip()) for v in row)
            except ValueError:
                if lineno == 1 and not pairs:
                    continue
                raise ValueError(f"{path}:{lineno}: non-integer value in {row!r}") from None
            pairs.append((x, y))
    if not pairs:
        raise ValueError(f"{path}: no data rows")
    return PairedSample.from_pairs(pairs)


def parse_base(text: str):
    """``poisson:lambda=<float>`` or ``pmf:<path>``."""
    kind, _, rest = text.partition(":")
    kind = kind.strip().lower()
    if kind == "poisson":
        key, sep, val = rest.partition("=")
        if key.strip().lower() != "lambda" or not sep:
            raise ValueError(f"expected poisson:lambda=<float>, got {text!r}")
        return PoissonSpec(float(val))
    if kind == "pmf" and rest:
        return read_pmf_csv(rest)
    raise ValueError(f"unknown base spec {text!r}")


def _margin_info(m: DiscretePmf) -> dict:
    return {"support_max": int(m.support[-1]), "mass_at_zero": m.mass_at_zero,
            "tail_eps": m.tail_eps}


def cmd_exact(args) -> dict:
    F = parse_margin(args.margin_x, args.eps)
    G = parse_margin(args.margin_y, args.eps)
    cop = CopulaSpec.parse(args.copula)
    J = joint_pmf(F, G, cop)
    d = decompose(J)
    return {
        "rho_s": spearman_exact(J),
        "rho_s_identity": theorem1_eval(d),
        "copula": str(cop),
        "margin_x": _margin_info(F),
        "margin_y": _margin_info(G),
        "decomposition": d.as_dict(),
    }


def cmd_estimate(args) -> dict:
    s = read_pairs_csv(args.input)
    out = estimate_rho_A(s).as_dict()
    if args.bounds:
        out["bounds"] = empirical_bounds(s, recipe=args.recipe).as_dict()
    return out


def _bases(values):
    if not values:
        return None, None
    if len(values) > 2:
        raise ValueError("--base may be given once (both axes) or twice (x, then y)")
    bases = [parse_base(v) for v in values]
    return bases[0], bases[-1]


def cmd_bounds(args) -> dict:
    if args.input:
        if args.margin_x or args.margin_y:
            raise ValueError("--input is exclusive with --margin-x/--margin-y")
        if args.method is not None:
            raise ValueError("--method applies to --margin-x/--margin-y; use --recipe with --input")
        s = read_pairs_csv(args.input)
        base_x, base_y = _bases(args.base)
        res = empirical_bounds(s, recipe=args.recipe, base_x=base_x, base_y=base_y,
                               p1=args.p1, p2=args.p2, eps=args.eps)
        out = {"empirical": res.as_dict(), "n": s.n}
        infl = {"p1": args.p1, "p2": args.p2}
        for key, vals, base in (("p1", s.x, base_x), ("p2", s.y, base_y)):
            if infl[key] is None:
                infl[key] = estimate_inflation(vals, base)
        out["inflation"] = infl
        if base_x is None and (args.p1 is None or args.p2 is None):
            out["caveat"] = ("no --base given: the whole empirical zero mass is reported as "
                             "inflation; the bounds themselves use only the empirical margins")
        return out
    if args.p1 is not None or args.p2 is not None or args.base:
        raise ValueError("--p1/--p2/--base apply to --input only")
    if not (args.margin_x and args.margin_y):
        raise ValueError("give --margin-x and --margin-y, or --input")
    F = parse_margin(args.margin_x, args.eps)
    G = parse_margin(args.margin_y, args.eps)
    method = args.method or "both"
    out = {}
    if method in ("closed", "both"):
        out["closed_form"] = bounds_closed_form(F, G).as_dict()
    if method in ("oracle", "both"):
        out["oracle"] = bounds_oracle(F, G).as_dict()
    if method == "both":
        c, o = out["closed_form"], out["oracle"]
        out["max_abs_diff"] = max(abs(c["rho_min"] - o["rho_min"]),
                                  abs(c["rho_max"] - o["rho_max"]))
    return out


def cmd_simulate(args):
    if args.scenarios and args.table:
        raise ValueError("--scenarios and --table are exclusive")
    if args.scenarios:
        configs = sim.read_scenarios(args.scenarios, args.seed)
        results = sim.run_scenarios(configs, args.workers)
        table = "scenarios"
    else:
        table = args.table or "1"
        n = args.n or 150
        reps = args.reps or 1000
        results = sim.reproduce_table1(args.seed, n, reps, args.workers)
        if table == "3":
            results = sim.reproduce_table3(args.seed, table1=results)
    if args.boxplot:
        sim.export_boxplot_data(results, args.boxplot)
    if args.format == "json":
        return {"table": table, "seed": args.seed,
                "scenarios": [sim.result_summary(r) for r in results]}
    return sim.table3_csv(results) if table == "3" else sim.table1_csv(results)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="zirho", description="Spearman's rho for zero-inflated count data.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ex = sub.add_parser("exact", help="population rho of two margins joined by a copula")
    ex.add_argument("--margin-x", required=True, help="zip:lambda=<f>,p=<f> or pmf:<path>")
    ex.add_argument("--margin-y", required=True)
    ex.add_argument("--copula", default="indep", help="frechet:alpha=<f> | m | w | indep")
    ex.add_argument("--eps", type=float, default=DEFAULT_EPS)

    es = sub.add_parser("estimate", help="rho_A estimate from a CSV of integer pairs")
    es.add_argument("--input", required=True)
    es.add_argument("--bounds", action="store_true", help="also estimate attainable bounds")
    es.add_argument("--recipe", choices=("plugin", "continuous"), default="plugin")

    bd = sub.add_parser("bounds", help="attainable bounds from margins or from data")
    bd.add_argument("--margin-x")
    bd.add_argument("--margin-y")
    bd.add_argument("--method", choices=("closed", "oracle", "both"))
    bd.add_argument("--input")
    bd.add_argument("--recipe", choices=RECIPES, default="plugin")
    bd.add_argument("--base", action="append", help="poisson:lambda=<f> or pmf:<path>")
    bd.add_argument("--p1", type=float)
    bd.add_argument("--p2", type=float)
    bd.add_argument("--eps", type=float, default=DEFAULT_EPS)

    sm = sub.add_parser("simulate", help="Monte Carlo reproduction of the simulation tables")
    sm.add_argument("--seed", type=int, required=True)
    sm.add_argument("--table", choices=("1", "3"))
    sm.add_argument("--scenarios", help="CSV: lambda_f,lambda_g,p1,p2,alpha,n,reps")
    sm.add_argument("--n", type=int)
    sm.add_argument("--reps", type=int)
    sm.add_argument("--workers", type=int, default=1)
    sm.add_argument("--boxplot", help="write per-replication estimates to this CSV")
    sm.add_argument("--format", choices=("csv", "json"), default="csv")
    sm.add_argument("--out", help="write output here instead of stdout")

    for parser in (ex, es, bd):
        parser.add_argument("--format", choices=("json",), default="json")
        parser.add_argument("--out")
    return p


COMMANDS = {"exact": cmd_exact, "estimate": cmd_estimate, "bounds": cmd_bounds,
            "simulate": cmd_simulate}


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        result = COMMANDS[args.command](args)
    except (UsageError, ValueError, OSError) as exc:
        msg = " ".join(str(exc).split())
        print(f"zirho: error: {msg}", file=stderr)
        return 2
    text = result if isinstance(result, str) else json.dumps(_round(result), indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        stdout.write(text)
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
