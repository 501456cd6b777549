"""Command-line entry points.

Subcommands:
  simulate       run a sweep from a flat key=value config file
  theory         closed-form prediction curves as CSV (simulation schema)
  oracle         exact lattice-contraction vs Monte Carlo comparison rows
  haar-baseline  uniform-ensemble and Haar-state baselines for a grid
  perm           cycle structure and distances for hand verification

Exit codes: 0 success, 2 bad usage or config, 3 memory/size budget exceeded,
4 unreadable or corrupt output file, 1 anything else.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import fields, replace
from pathlib import Path

from . import theory
from .engine import MemoryBudgetError
from .haar import HaarParams, haar_frame_potential, haar_state_projected_fp
from .perms import (
    Permutation,
    cycle_count,
    partner_alpha,
    permutation_overlap,
    transposition_distance,
)
from .runner import (
    CSV_COLUMNS,
    SCHEMA_VERSION,
    ExperimentConfig,
    SweepOutputError,
    oracle_comparison,
    run_sweep,
)
from .statmech import ContractionBudgetError

_LIST_FIELDS = {"l_b_list", "k_list", "t_list"}
_INT_FIELDS = {"q", "l_a", "t_max", "realizations", "master_seed", "workers", "amp_budget"}
_BOOL_FIELDS = {"resume"}


def parse_config_text(text: str) -> ExperimentConfig:
    """Flat key = value lines; lists are comma-separated; # starts a comment."""
    known = {f.name for f in fields(ExperimentConfig)}
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key = value, got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip().lower()
        val = val.strip()
        if key not in known:
            raise ValueError(f"config line {lineno}: unknown key {key!r}")
        if key in _LIST_FIELDS:
            values[key] = tuple(int(x) for x in val.replace(",", " ").split())
        elif key in _INT_FIELDS:
            values[key] = int(val)
        elif key in _BOOL_FIELDS:
            if val.lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(f"config line {lineno}: boolean expected, got {val!r}")
            values[key] = val.lower() in ("true", "1", "yes")
        else:
            values[key] = val
    return ExperimentConfig(**values)


def load_config(path: str) -> ExperimentConfig:
    return parse_config_text(Path(path).read_text())


def _cmd_simulate(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    if args.seed is not None:
        config = replace(config, master_seed=args.seed)
    if args.workers is not None:
        config = replace(config, workers=args.workers)
    if args.out is not None:
        config = replace(config, out=args.out)
    if args.resume:
        config = replace(config, resume=True)
    records = run_sweep(config, echo=lambda msg: print(msg, file=sys.stderr))
    print(f"{len(records)} records -> {config.out}")
    return 0


def _theory_rows(args: argparse.Namespace):
    ks = args.k
    for t in range(args.t_max + 1):
        for k in ks:
            common = [
                str(SCHEMA_VERSION),
                str(args.q),
                str(args.l_a),
                "0",
                args.geometry,
                args.boundary,
                str(t),
                str(k),
            ]
            curves = {
                "theory_membrane_fp": theory.membrane_frame_potential(args.q, args.l_a, t, k),
                "theory_haar_fp": haar_frame_potential(args.q**args.l_a, k),
                "theory_delta2_nonint": theory.delta2_nonint(args.q, args.l_a, t, k),
                "theory_large_q_fp": theory.large_q_frame_potential(args.q, args.l_a, t, k),
            }
            if k == 1:
                curves["theory_mean_purity"] = theory.mean_purity(args.q, t)
                curves["theory_rounded_fp1"] = theory.rounded_fp1(args.q, args.l_a, t)
            if args.geometry == "bulk":
                curves["theory_bulk_fp_large_q"] = theory.bulk_fp_large_q(
                    args.q, t, k, args.boundary
                )
            for name, value in curves.items():
                yield common + [name, repr(value), "", "0", "0.0", "0"]


def _cmd_theory(args: argparse.Namespace) -> int:
    writer = csv.writer(sys.stdout)
    writer.writerow(CSV_COLUMNS)
    for row in _theory_rows(args):
        writer.writerow(row)
    return 0


def _cmd_oracle(args: argparse.Namespace) -> int:
    rows = oracle_comparison(
        q=args.q,
        length=args.length,
        l_a=args.l_a,
        t_values=list(range(args.t_max + 1)),
        realizations=args.realizations,
        master_seed=args.seed,
    )
    writer = csv.writer(sys.stdout)
    writer.writerow(["q", "L", "L_A", "t", "exact", "mc_mean", "mc_sem"])
    for row in rows:
        writer.writerow(
            [row["q"], row["L"], row["L_A"], row["t"], repr(row["exact"]), repr(row["mc_mean"]), "" if row["mc_sem"] is None else repr(row["mc_sem"])]
        )
    return 0


def _cmd_haar_baseline(args: argparse.Namespace) -> int:
    writer = csv.writer(sys.stdout)
    writer.writerow(["q", "L_A", "L_B", "k", "F_haar", "F_haar_state_projected"])
    for l_b in args.l_b:
        for k in args.k:
            params = HaarParams(q=args.q, l_a=args.l_a, l_b=l_b, k=k)
            writer.writerow(
                [
                    args.q,
                    args.l_a,
                    l_b,
                    k,
                    repr(haar_frame_potential(args.q**args.l_a, k)),
                    repr(haar_state_projected_fp(params)),
                ]
            )
    return 0


def _parse_perm(text: str) -> Permutation:
    return Permutation(tuple(int(x) for x in text.replace(",", " ").split()))


def _cmd_perm(args: argparse.Namespace) -> int:
    p = _parse_perm(args.images)
    print(f"degree:      {p.m}")
    print(f"cycles:      {' '.join('(' + ' '.join(map(str, c)) + ')' for c in p.cycles())}")
    print(f"cycle count: {cycle_count(p)}")
    print(f"cycle type:  {p.cycle_type()}")
    if args.versus is not None:
        other = _parse_perm(args.versus)
        print(f"distance:    {transposition_distance(p, other)}")
        if args.q is not None:
            print(f"overlap:     {permutation_overlap(p, other, args.q)}")
    else:
        from .perms import identity

        print(f"distance to identity: {transposition_distance(p, identity(p.m))}")
        if args.q is not None:
            print(f"overlap with identity: {permutation_overlap(p, identity(p.m), args.q)}")
    if args.partner:
        print(f"partner:     {list(partner_alpha(p).images)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="brickpe", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a sweep from a config file")
    sim.add_argument("--config", required=True, help="flat key=value config file")
    sim.add_argument("--seed", type=int, help="override master_seed")
    sim.add_argument("--workers", type=int, help="override worker count")
    sim.add_argument("--out", help="override output CSV path")
    sim.add_argument("--resume", action="store_true", help="extend an existing output file")
    sim.set_defaults(func=_cmd_simulate)

    theo = sub.add_parser("theory", help="closed-form prediction curves as CSV")
    theo.add_argument("--q", type=int, default=2)
    theo.add_argument("--l-a", type=int, required=True)
    theo.add_argument("--t-max", type=int, required=True)
    theo.add_argument("--k", type=int, nargs="+", default=[1, 2, 3])
    theo.add_argument("--geometry", choices=["edge", "bulk"], default="edge")
    theo.add_argument("--boundary", choices=["obc", "pbc"], default="obc")
    theo.set_defaults(func=_cmd_theory)

    orc = sub.add_parser("oracle", help="exact contraction vs Monte Carlo")
    orc.add_argument("--q", type=int, default=2)
    orc.add_argument("--length", type=int, required=True)
    orc.add_argument("--l-a", type=int, required=True)
    orc.add_argument("--t-max", type=int, default=3)
    orc.add_argument("--realizations", type=int, default=1000)
    orc.add_argument("--seed", type=int, default=0)
    orc.set_defaults(func=_cmd_oracle)

    hb = sub.add_parser("haar-baseline", help="uniform-ensemble baselines as CSV")
    hb.add_argument("--q", type=int, default=2)
    hb.add_argument("--l-a", type=int, required=True)
    hb.add_argument("--l-b", type=int, nargs="+", required=True)
    hb.add_argument("--k", type=int, nargs="+", default=[1, 2, 3])
    hb.set_defaults(func=_cmd_haar_baseline)

    pm = sub.add_parser("perm", help="cycle structure and distances")
    pm.add_argument("images", help="one-line notation, e.g. 3,2,1,0")
    pm.add_argument("--versus", help="second permutation for distance/overlap")
    pm.add_argument("--q", type=int, help="local dimension for overlaps")
    pm.add_argument("--partner", action="store_true", help="print the distance-minimizing partner")
    pm.set_defaults(func=_cmd_perm)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (MemoryBudgetError, ContractionBudgetError) as err:
        print(f"budget exceeded: {err}", file=sys.stderr)
        return 3
    except SweepOutputError as err:
        print(f"output error: {err}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
