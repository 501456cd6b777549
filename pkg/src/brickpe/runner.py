"""Config-driven sweeps over circuit realizations, with seeded reproducibility.

A sweep walks a grid of measured-region sizes and times, simulates a fixed
number of independent circuit realizations at every grid point, and persists
aggregated rows (CSV, fixed schema) plus a per-realization sidecar that the
design-time bootstrap and the per-realization inequality checks consume.

Realization r of a sweep always uses the gate streams derived from
(master_seed, r), no matter which worker executes it or in which order, so
results are bit-identical for any worker count.  Output is append-only;
re-reading deduplicates on the grid key keeping the last write, which makes
interrupted runs resumable at grid-point granularity.

Both aggregation conventions for the squared design distance are recorded:
"delta2" is computed from the realization-averaged frame potential, while
"delta2_realization_mean" averages per-realization distances.  Because the
distance is affine in the frame potential the two provably coincide; recording
both keeps the files self-documenting.
"""

from __future__ import annotations

import csv
import json
import math
import os
import time
from dataclasses import asdict, dataclass
from multiprocessing import get_context
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import __version__
from .engine import (
    DEFAULT_AMP_BUDGET,
    GateSeeder,
    Geometry,
    evolve_brick_wall,
    product_state,
)
from .ensemble import ensemble_frame_potentials
from .haar import haar_frame_potential
from .statmech import contract_frame_potential

SCHEMA_VERSION = 1
CSV_COLUMNS = [
    "schema_version",
    "q",
    "L_A",
    "L_B",
    "geometry",
    "boundary",
    "t",
    "k",
    "observable",
    "mean",
    "sem",
    "n_realizations",
    "excluded_mass_max",
    "master_seed",
]
REALIZATION_COLUMNS = [
    "schema_version",
    "q",
    "L_A",
    "L_B",
    "geometry",
    "boundary",
    "t",
    "k",
    "realization",
    "F_value",
    "excluded_mass",
    "master_seed",
]
OBSERVABLES = ("F_k", "delta2", "delta2_realization_mean", "purity_moment")


class SweepOutputError(RuntimeError):
    """Existing output cannot be parsed; refuse to touch it."""


@dataclass(frozen=True)
class ExperimentConfig:
    q: int = 2
    l_a: int = 6
    l_b_list: tuple[int, ...] = (12,)
    t_max: int = 12
    k_list: tuple[int, ...] = (1, 2, 3)
    realizations: int = 200
    master_seed: int = 0
    geometry: str = "edge"
    boundary: str = "obc"
    out: str = "sweep.csv"
    resume: bool = False
    workers: int = 1
    t_list: tuple[int, ...] | None = None
    amp_budget: int = DEFAULT_AMP_BUDGET

    def validate(self) -> None:
        if self.q < 2 or self.l_a < 1 or not self.l_b_list:
            raise ValueError("need q >= 2, l_a >= 1 and at least one L_B")
        if self.realizations < 1:
            raise ValueError("need at least one realization")
        if self.workers < 1:
            raise ValueError("worker count must be >= 1")
        dim = self.q ** (self.l_a + max(self.l_b_list))
        if dim > self.amp_budget:
            raise ValueError(
                f"largest grid point needs q**L = {dim} amplitudes, over budget {self.amp_budget}"
            )
        for l_b in self.l_b_list:
            Geometry(l_a=self.l_a, l_b=l_b, boundary=self.boundary, placement=self.geometry)
        for t in self.times():
            if not 0 <= t <= self.t_max:
                raise ValueError(f"snapshot time {t} outside 0..t_max")

    def times(self) -> tuple[int, ...]:
        if self.t_list is not None:
            return tuple(sorted(set(self.t_list)))
        return tuple(range(self.t_max + 1))


@dataclass(frozen=True)
class ResultRecord:
    q: int
    l_a: int
    l_b: int
    geometry: str
    boundary: str
    t: int
    k: int
    observable: str
    mean: float
    sem: float | None
    n_realizations: int
    excluded_mass_max: float
    master_seed: int

    def key(self) -> tuple:
        return (self.q, self.l_a, self.l_b, self.geometry, self.boundary, self.t, self.k, self.observable)

    def to_row(self) -> list[str]:
        return [
            str(SCHEMA_VERSION),
            str(self.q),
            str(self.l_a),
            str(self.l_b),
            self.geometry,
            self.boundary,
            str(self.t),
            str(self.k),
            self.observable,
            repr(self.mean),
            "" if self.sem is None else repr(self.sem),
            str(self.n_realizations),
            repr(self.excluded_mass_max),
            str(self.master_seed),
        ]


@dataclass(frozen=True)
class RealizationRecord:
    q: int
    l_a: int
    l_b: int
    geometry: str
    boundary: str
    t: int
    k: int
    realization: int
    f_value: float
    excluded_mass: float
    master_seed: int


def _simulate_realization(payload: tuple) -> tuple[int, dict]:
    """One circuit realization: evolve incrementally, snapshot every requested t.

    Top-level so worker processes can receive it; returns plain floats only.
    """
    (q, l_a, l_b, placement, boundary, times, k_list, master_seed, realization, amp_budget) = payload
    geometry = Geometry(l_a=l_a, l_b=l_b, boundary=boundary, placement=placement)
    state = product_state(geometry.length, q, budget=amp_budget)
    seeder = GateSeeder(master_seed, realization)
    out: dict[int, dict] = {}
    reached = 0
    for t in times:
        evolve_brick_wall(state, t - reached, geometry, seeder, start_step=reached)
        reached = t
        results = ensemble_frame_potentials(state, geometry, k_list)
        out[t] = {k: (results[k].value, results[k].excluded_mass) for k in k_list}
    return realization, out


def _run_grid_point(config: ExperimentConfig, l_b: int) -> dict[int, dict]:
    payloads = [
        (
            config.q,
            config.l_a,
            l_b,
            config.geometry,
            config.boundary,
            config.times(),
            tuple(sorted(set(config.k_list))),
            config.master_seed,
            r,
            config.amp_budget,
        )
        for r in range(config.realizations)
    ]
    if config.workers == 1:
        results = [_simulate_realization(p) for p in payloads]
    else:
        # Keep each worker's BLAS single-threaded; the env var is read when the
        # spawned child imports numpy, so it must be set before the pool exists.
        saved = os.environ.get("OMP_NUM_THREADS")
        os.environ["OMP_NUM_THREADS"] = "1"
        try:
            with get_context("spawn").Pool(config.workers) as pool:
                results = list(pool.imap_unordered(_simulate_realization, payloads))
        finally:
            if saved is None:
                del os.environ["OMP_NUM_THREADS"]
            else:
                os.environ["OMP_NUM_THREADS"] = saved
    # Order-insensitive reduction: sort by realization index before aggregating.
    results.sort(key=lambda item: item[0])
    return {r: data for r, data in results}


def _aggregate(config: ExperimentConfig, l_b: int, per_real: dict[int, dict]) -> tuple[list[ResultRecord], list[RealizationRecord]]:
    records: list[ResultRecord] = []
    rrecords: list[RealizationRecord] = []
    ks = tuple(sorted(set(config.k_list)))
    n = config.realizations
    for t in config.times():
        excluded_max = max(per_real[r][t][k][1] for r in range(n) for k in ks)
        purities = np.array([per_real[r][t][1][0] for r in range(n)]) if 1 in ks else None
        for k in ks:
            values = np.array([per_real[r][t][k][0] for r in range(n)])
            f_h = haar_frame_potential(config.q**config.l_a, k)
            mean = float(values.mean())
            sem = float(values.std(ddof=1) / math.sqrt(n)) if n > 1 else None
            common = dict(
                q=config.q,
                l_a=config.l_a,
                l_b=l_b,
                geometry=config.geometry,
                boundary=config.boundary,
                t=t,
                k=k,
                n_realizations=n,
                excluded_mass_max=excluded_max,
                master_seed=config.master_seed,
            )
            records.append(ResultRecord(observable="F_k", mean=mean, sem=sem, **common))
            records.append(
                ResultRecord(
                    observable="delta2",
                    mean=mean / f_h - 1.0,
                    sem=None if sem is None else sem / f_h,
                    **common,
                )
            )
            deltas = values / f_h - 1.0
            records.append(
                ResultRecord(
                    observable="delta2_realization_mean",
                    mean=float(deltas.mean()),
                    sem=None if n < 2 else float(deltas.std(ddof=1) / math.sqrt(n)),
                    **common,
                )
            )
            if purities is not None:
                moments = purities**k
                records.append(
                    ResultRecord(
                        observable="purity_moment",
                        mean=float(moments.mean()),
                        sem=None if n < 2 else float(moments.std(ddof=1) / math.sqrt(n)),
                        **common,
                    )
                )
            for r in range(n):
                rrecords.append(
                    RealizationRecord(
                        q=config.q,
                        l_a=config.l_a,
                        l_b=l_b,
                        geometry=config.geometry,
                        boundary=config.boundary,
                        t=t,
                        k=k,
                        realization=r,
                        f_value=float(values[r]),
                        excluded_mass=float(per_real[r][t][k][1]),
                        master_seed=config.master_seed,
                    )
                )
    return records, rrecords


def realization_path(out: str | Path) -> Path:
    out = Path(out)
    return out.with_name(out.stem + ".realizations.csv")


def manifest_path(out: str | Path) -> Path:
    out = Path(out)
    return out.with_name(out.stem + ".manifest.json")


def _append_rows(path: Path, columns: list[str], rows: Iterable[Sequence[str]]) -> None:
    new_file = not path.exists()
    with open(path, "a", newline="") as fh:
        writer = csv.writer(fh)
        if new_file:
            writer.writerow(columns)
        writer.writerows(rows)


def read_records(path: str | Path) -> list[ResultRecord]:
    """Load aggregated rows, deduplicating on the grid key (last write wins)."""
    path = Path(path)
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header != CSV_COLUMNS:
                raise SweepOutputError(f"{path}: unexpected header {header}")
            by_key: dict[tuple, ResultRecord] = {}
            for lineno, row in enumerate(reader, start=2):
                if len(row) != len(CSV_COLUMNS):
                    raise SweepOutputError(f"{path}:{lineno}: expected {len(CSV_COLUMNS)} fields")
                if int(row[0]) != SCHEMA_VERSION:
                    raise SweepOutputError(f"{path}:{lineno}: schema version {row[0]} unsupported")
                rec = ResultRecord(
                    q=int(row[1]),
                    l_a=int(row[2]),
                    l_b=int(row[3]),
                    geometry=row[4],
                    boundary=row[5],
                    t=int(row[6]),
                    k=int(row[7]),
                    observable=row[8],
                    mean=float(row[9]),
                    sem=None if row[10] == "" else float(row[10]),
                    n_realizations=int(row[11]),
                    excluded_mass_max=float(row[12]),
                    master_seed=int(row[13]),
                )
                by_key[rec.key()] = rec
    except (OSError, ValueError, StopIteration) as err:
        raise SweepOutputError(f"cannot read sweep output {path}: {err}") from err
    return list(by_key.values())


def read_realizations(path: str | Path) -> list[RealizationRecord]:
    path = Path(path)
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header != REALIZATION_COLUMNS:
                raise SweepOutputError(f"{path}: unexpected header {header}")
            by_key: dict[tuple, RealizationRecord] = {}
            for lineno, row in enumerate(reader, start=2):
                if len(row) != len(REALIZATION_COLUMNS):
                    raise SweepOutputError(f"{path}:{lineno}: expected {len(REALIZATION_COLUMNS)} fields")
                rec = RealizationRecord(
                    q=int(row[1]),
                    l_a=int(row[2]),
                    l_b=int(row[3]),
                    geometry=row[4],
                    boundary=row[5],
                    t=int(row[6]),
                    k=int(row[7]),
                    realization=int(row[8]),
                    f_value=float(row[9]),
                    excluded_mass=float(row[10]),
                    master_seed=int(row[11]),
                )
                by_key[(rec.l_b, rec.boundary, rec.t, rec.k, rec.realization)] = rec
    except (OSError, ValueError, StopIteration) as err:
        raise SweepOutputError(f"cannot read realization sidecar {path}: {err}") from err
    return list(by_key.values())


def _matches_config(config: ExperimentConfig, rec: ResultRecord) -> bool:
    return (
        rec.q == config.q
        and rec.l_a == config.l_a
        and rec.geometry == config.geometry
        and rec.boundary == config.boundary
        and rec.master_seed == config.master_seed
        and rec.n_realizations == config.realizations
    )


def _complete_l_bs(config: ExperimentConfig, existing: list[ResultRecord]) -> set[int]:
    """Grid points whose full row set is already on disk."""
    ks = tuple(sorted(set(config.k_list)))
    have: dict[int, set] = {}
    for rec in existing:
        if _matches_config(config, rec):
            have.setdefault(rec.l_b, set()).add((rec.t, rec.k, rec.observable))
    wanted = set()
    for t in config.times():
        for k in ks:
            for obs in OBSERVABLES:
                if obs == "purity_moment" and 1 not in ks:
                    continue
                wanted.add((t, k, obs))
    return {l_b for l_b, got in have.items() if wanted <= got}


def run_sweep(config: ExperimentConfig, echo=None) -> list[ResultRecord]:
    """Execute the sweep, persisting results as grid points complete.

    With resume enabled, grid points whose complete row set is already in the
    output file are loaded instead of recomputed.
    """
    config.validate()
    out = Path(config.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    existing: list[ResultRecord] = read_records(out) if out.exists() else []
    if existing and not config.resume:
        raise SweepOutputError(f"{out} already exists; pass resume to extend it")
    done = _complete_l_bs(config, existing) if config.resume else set()
    t_begin = time.time()
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "package_version": __version__,
        "config": asdict(config),
        "started": time.strftime("%Y-%m-%dT%H:%M:%S"),
        "completed_grid_points": sorted(done),
    }
    all_records: list[ResultRecord] = [
        r for r in existing if r.l_b in done and _matches_config(config, r)
    ]
    for l_b in config.l_b_list:
        if l_b in done:
            if echo:
                echo(f"L_B={l_b}: complete in {out}, skipping")
            continue
        if echo:
            echo(f"L_B={l_b}: {config.realizations} realizations x {len(config.times())} snapshots ...")
        per_real = _run_grid_point(config, l_b)
        records, rrecords = _aggregate(config, l_b, per_real)
        _append_rows(out, CSV_COLUMNS, (r.to_row() for r in records))
        _append_rows(
            realization_path(out),
            REALIZATION_COLUMNS,
            (
                [
                    str(SCHEMA_VERSION),
                    str(rr.q),
                    str(rr.l_a),
                    str(rr.l_b),
                    rr.geometry,
                    rr.boundary,
                    str(rr.t),
                    str(rr.k),
                    str(rr.realization),
                    repr(rr.f_value),
                    repr(rr.excluded_mass),
                    str(rr.master_seed),
                ]
                for rr in rrecords
            ),
        )
        all_records.extend(records)
        manifest["completed_grid_points"] = sorted(set(manifest["completed_grid_points"]) | {l_b})
        manifest["wall_seconds"] = round(time.time() - t_begin, 3)
        with open(manifest_path(out), "w") as fh:
            json.dump(manifest, fh, indent=2)
    return all_records


@dataclass(frozen=True)
class DesignTimeEstimate:
    t_hat: float | None
    ci_low: float | None
    ci_high: float | None
    censored: bool
    censored_fraction: float = 0.0


def _crossing_time(times: Sequence[int], delta2: Sequence[float], eps2: float) -> float | None:
    """First downward crossing of eps2, linearly interpolated in (t, ln delta2).

    A curve that starts below eps2 crosses before the first sample (returns 0);
    one that never comes down is censored (returns None).
    """
    if delta2[0] <= eps2:
        return 0.0
    floor = 1e-300
    for i in range(1, len(times)):
        if delta2[i] <= eps2 < delta2[i - 1]:
            y0 = math.log(max(delta2[i - 1], floor))
            y1 = math.log(max(delta2[i], floor))
            y = math.log(eps2)
            if y0 == y1:
                return float(times[i])
            frac = (y - y0) / (y1 - y0)
            return times[i - 1] + frac * (times[i] - times[i - 1])
    return None


def estimate_design_time(
    f_by_t: dict[int, np.ndarray],
    n_a: int,
    k: int,
    epsilon: float,
    n_boot: int = 500,
    seed: int = 0,
) -> DesignTimeEstimate:
    """Threshold-crossing design time with a bootstrap interval.

    f_by_t maps snapshot time to the per-realization frame potentials at that
    time; all arrays must cover the same realizations.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError("tolerance must lie in (0, 1)")
    times = sorted(f_by_t)
    stacked = np.stack([np.asarray(f_by_t[t], dtype=float) for t in times])  # (T, R)
    f_h = haar_frame_potential(n_a, k)
    eps2 = epsilon * epsilon
    point = _crossing_time(times, stacked.mean(axis=1) / f_h - 1.0, eps2)
    if point is None:
        return DesignTimeEstimate(None, None, None, censored=True, censored_fraction=1.0)
    rng = np.random.default_rng(seed)
    n_real = stacked.shape[1]
    draws = []
    censored = 0
    for _ in range(n_boot):
        pick = rng.integers(0, n_real, size=n_real)
        cross = _crossing_time(times, stacked[:, pick].mean(axis=1) / f_h - 1.0, eps2)
        if cross is None:
            censored += 1
        else:
            draws.append(cross)
    if draws:
        lo, hi = np.percentile(draws, [2.5, 97.5])
    else:
        lo = hi = None
    return DesignTimeEstimate(
        t_hat=point,
        ci_low=None if lo is None else float(lo),
        ci_high=None if hi is None else float(hi),
        censored=False,
        censored_fraction=censored / n_boot,
    )


def markov_tail_bound(mean_f: float, f_h: float, epsilon: float) -> float:
    """Upper bound on Prob(F - F_H > eps) from the realization-averaged excess."""
    if epsilon <= 0:
        raise ValueError("threshold must be positive")
    return max(mean_f - f_h, 0.0) / epsilon


def oracle_comparison(
    q: int,
    length: int,
    l_a: int,
    t_values: Sequence[int],
    realizations: int,
    master_seed: int = 0,
) -> list[dict]:
    """Exact lattice-contraction purity vs statevector Monte Carlo, per time."""
    geometry = Geometry(l_a=l_a, l_b=length - l_a)
    rows = []
    per_t = {t: [] for t in t_values}
    for r in range(realizations):
        state = product_state(length, q)
        seeder = GateSeeder(master_seed, r)
        reached = 0
        for t in sorted(t_values):
            evolve_brick_wall(state, t - reached, geometry, seeder, start_step=reached)
            reached = t
            results = ensemble_frame_potentials(state, geometry, [1])
            per_t[t].append(results[1].value)
    for t in sorted(t_values):
        values = np.array(per_t[t])
        exact = contract_frame_potential(q, l_a, length - l_a, t, k=1, n=0)
        rows.append(
            {
                "q": q,
                "L": length,
                "L_A": l_a,
                "t": t,
                "exact": exact,
                "mc_mean": float(values.mean()),
                "mc_sem": float(values.std(ddof=1) / math.sqrt(len(values))) if len(values) > 1 else None,
            }
        )
    return rows
