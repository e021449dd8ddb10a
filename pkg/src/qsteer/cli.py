"""Batch experiment driver producing CSV artifacts with run manifests.

Four subcommands reproduce the package's desk-scale comparisons:

* ``scan``         random-state scatter of the five closed-form measures
* ``werner``       measures along a Werner grid, optionally with the SDP
* ``robust-scan``  fixed-settings robustness vs the entropic measure
* ``volume``       Monte Carlo volume of violations along a Werner grid

Conventions shared by all commands: CSV output with a header row, decimal
values at 12 significant digits, UTF-8, LF line endings; a flat key=value
manifest sidecar next to every CSV; deterministic output for a fixed seed
regardless of worker count (work is chunked and each chunk owns an RNG
stream derived from the master seed and the chunk index; rows are sorted
by state id or grid index).  Exit codes: 0 success, 2 usage error, 3
numerical failure (the failing state id is reported on stderr).

Random states are always drawn from the Hilbert-Schmidt (Ginibre) ensemble
and the robustness scan evaluates Alice's measurements along the canonical
axes of each state (the frame in which the closed-form measures live), so
a criterion violation is certified steerable by the SDP on the same
assemblage.
"""

import argparse
import csv
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .backend import BACKEND
from .criteria import CriterionKind
from .errors import QSteerError
from .measures import MeasureKind, all_measures
from .measurements import assemblage_from_directions
from .qstate import BlochForm, bloch_matrix, canonical_form, from_matrix, random_state, werner
from .robustness import lhs_feasibility, see_saw, steering_robustness
from .volume import DEFAULT_CHUNK_SIZE, estimate_volume

STATE_CHUNK = 1024
ENSEMBLE = "hilbert-schmidt"

MEASURE_ORDER = (
    MeasureKind.L2,
    MeasureKind.L3,
    MeasureKind.E23,
    MeasureKind.RI3,
    MeasureKind.DB3,
)

CRITERIA_BY_NAME = {k.value: k for k in CriterionKind}

#: guard band for the row-level hierarchy check: an entropic measure this
#: far above zero must come with a strictly positive robustness
HIERARCHY_MEASURE_GUARD = 1e-7
HIERARCHY_EPS_FLOOR = 1e-9


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".12g")


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _write_manifest(path: Path, entries: dict) -> None:
    manifest_path = path.with_suffix("") if path.suffix == ".csv" else path
    manifest_path = manifest_path.with_name(manifest_path.name + ".manifest.txt")
    with open(manifest_path, "w", encoding="utf-8", newline="") as fh:
        for key, value in entries.items():
            fh.write(f"{key}={value}\n")


def _chunk_ranges(n: int, chunk: int):
    start = 0
    idx = 0
    while start < n:
        yield idx, start, min(chunk, n - start)
        idx += 1
        start += chunk


def _chunk_rng(seed: int, chunk_idx: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(chunk_idx,)))


def _canonical_state(cf):
    return from_matrix(bloch_matrix(BlochForm(cf.a, cf.b, np.diag(cf.c))))


# ---------------------------------------------------------------------------
# scan


def _scan_chunk(task):
    seed, chunk_idx, start, count, werner_mode, n_states = task
    rows = []
    rng = _chunk_rng(seed, chunk_idx)
    for i in range(count):
        sid = start + i
        if werner_mode:
            w = sid / (n_states - 1) if n_states > 1 else 0.0
            rho = werner(w)
        else:
            rho = random_state(rng)
        cf = canonical_form(rho)
        ms = all_measures(cf)
        rows.append(
            (
                sid,
                *cf.a,
                *cf.b,
                *cf.c,
                *(ms[k] for k in MEASURE_ORDER),
            )
        )
    return rows


def cmd_scan(args) -> int:
    t0 = time.perf_counter()
    tasks = [
        (args.seed, idx, start, count, args.werner, args.n_states)
        for idx, start, count in _chunk_ranges(args.n_states, STATE_CHUNK)
    ]
    rows = []
    for chunk_rows in _run_tasks(_scan_chunk, tasks, args.workers):
        rows.extend(chunk_rows)
    rows.sort(key=lambda r: r[0])

    header = [
        "state_id",
        "a1",
        "a2",
        "a3",
        "b1",
        "b2",
        "b3",
        "c1",
        "c2",
        "c3",
        *(k.value for k in MEASURE_ORDER),
    ]
    out = Path(args.out)
    _write_csv(out, header, rows)

    values = {k: np.array([r[10 + i] for r in rows]) for i, k in enumerate(MEASURE_ORDER)}
    summary = {}
    for k1 in MEASURE_ORDER:
        for k2 in MEASURE_ORDER:
            if k1 == k2:
                continue
            key = f"summary_{k1.value}_pos_{k2.value}_zero"
            summary[key] = int(np.sum((values[k1] > 0.0) & (values[k2] == 0.0)))
    manifest = {
        "command": "scan",
        "schema": "scan-v1",
        "tool": f"qsteer {__version__}",
        "seed": args.seed,
        "n_states": args.n_states,
        "ensemble": ENSEMBLE,
        "werner_injected": str(args.werner).lower(),
        "state_chunk": STATE_CHUNK,
        "workers": args.workers,
        "kernel_backend": BACKEND,
        **summary,
        "wall_clock_s": f"{time.perf_counter() - t0:.3f}",
    }
    _write_manifest(out, manifest)
    for key, value in summary.items():
        print(f"{key}={value}")
    return 0


# ---------------------------------------------------------------------------
# werner


def cmd_werner(args) -> int:
    t0 = time.perf_counter()
    grid = _parse_grid(args.grid)
    rows = []
    for gi, w in enumerate(grid):
        rho = werner(float(w))
        cf = canonical_form(rho)
        ms = all_measures(cf)
        sr_eps = None
        feasible = None
        if args.with_sdp:
            asm = assemblage_from_directions(rho, np.eye(3)[: args.m])
            result = steering_robustness(asm)
            sr_eps = result.epsilon
            feasible = lhs_feasibility(asm).feasible
        rows.append((float(w), *(ms[k] for k in MEASURE_ORDER), sr_eps, feasible))
    header = ["w", *(k.value for k in MEASURE_ORDER), "sr_epsilon", "lhs_feasible"]
    out = Path(args.out)
    _write_csv(out, header, rows)
    _write_manifest(
        out,
        {
            "command": "werner",
            "schema": "werner-v1",
            "tool": f"qsteer {__version__}",
            "seed": args.seed,
            "grid": args.grid,
            "m": args.m,
            "ensemble": args.ensemble,
            "with_sdp": str(args.with_sdp).lower(),
            "noise_set": "all-assemblages",
            "kernel_backend": BACKEND,
            "wall_clock_s": f"{time.perf_counter() - t0:.3f}",
        },
    )
    return 0


# ---------------------------------------------------------------------------
# robust-scan


def _robust_chunk(task):
    seed, chunk_idx, start, count, with_seesaw, m = task
    rows = []
    rng = _chunk_rng(seed, chunk_idx)
    for i in range(count):
        sid = start + i
        rho = random_state(rng)
        cf = canonical_form(rho)
        s_e23 = all_measures(cf)[MeasureKind.E23]
        canonical = _canonical_state(cf)
        sra = steering_robustness(
            assemblage_from_directions(canonical, np.eye(3)[:m])
        ).epsilon
        ss_eps = None
        if with_seesaw:
            ss_eps = see_saw(canonical, m).epsilon
        rows.append((sid, sra, s_e23, ss_eps))
    return rows


def cmd_robust_scan(args) -> int:
    t0 = time.perf_counter()
    tasks = [
        (args.seed, idx, start, count, args.see_saw, args.m)
        for idx, start, count in _chunk_ranges(args.n_states, STATE_CHUNK)
    ]
    rows = []
    for chunk_rows in _run_tasks(_robust_chunk, tasks, args.workers):
        rows.extend(chunk_rows)
    rows.sort(key=lambda r: r[0])

    for sid, sra, s_e23, _ in rows:
        if s_e23 > HIERARCHY_MEASURE_GUARD and sra <= HIERARCHY_EPS_FLOOR:
            raise QSteerError(
                f"hierarchy violated at state {sid}: s_e23={s_e23} but sra={sra}"
            )

    header = ["state_id", "sra_epsilon", "s_e23", "seesaw_epsilon"]
    out = Path(args.out)
    _write_csv(out, header, rows)

    only_sdp = sum(1 for _, sra, e, _ in rows if sra > 1e-6 and e == 0.0)
    manifest = {
        "command": "robust-scan",
        "schema": "robust-scan-v1",
        "tool": f"qsteer {__version__}",
        "seed": args.seed,
        "n_states": args.n_states,
        "m": args.m,
        "ensemble": ENSEMBLE,
        "alice_settings": "canonical-axes",
        "noise_set": "all-assemblages",
        "see_saw": str(args.see_saw).lower(),
        "state_chunk": STATE_CHUNK,
        "workers": args.workers,
        "kernel_backend": BACKEND,
        "summary_sra_pos_e23_zero": only_sdp,
        "summary_sra_pos_e23_zero_fraction": f"{only_sdp / args.n_states:.6f}",
        "wall_clock_s": f"{time.perf_counter() - t0:.3f}",
    }
    _write_manifest(out, manifest)
    print(f"summary_sra_pos_e23_zero={only_sdp} fraction={only_sdp / args.n_states:.4f}")
    return 0


# ---------------------------------------------------------------------------
# volume


def _volume_task(task):
    seed, kind_name, kind_idx, gi, w, m, q, n_samples, chunk_size, db_convention = task
    est = estimate_volume(
        werner(w),
        CRITERIA_BY_NAME[kind_name],
        m,
        n_samples,
        (seed, kind_idx, gi),
        q=q,
        chunk_size=chunk_size,
        db_convention=db_convention,
    )
    return (gi, w, kind_name, est.violations, est.fraction, est.ci_low, est.ci_high)


def _closed_form_measure(kind: CriterionKind, w: float, m: int) -> float | None:
    if m != 3:
        return None
    ms = all_measures(canonical_form(werner(w)))
    key = {
        CriterionKind.LINEAR: MeasureKind.L3,
        CriterionKind.ENTROPIC: MeasureKind.E23,
        CriterionKind.ROT_INV: MeasureKind.RI3,
        CriterionKind.DIM_BOUND: MeasureKind.DB3,
    }[kind]
    return ms[key]


def cmd_volume(args) -> int:
    t0 = time.perf_counter()
    grid = _parse_grid(args.grid)
    kinds = _parse_criteria(args.criteria, args.m)
    tasks = [
        (
            args.seed,
            kind.value,
            kind_idx,
            gi,
            float(w),
            args.m,
            args.q,
            args.samples,
            args.chunk_size,
            args.db_convention,
        )
        for kind_idx, kind in enumerate(kinds)
        for gi, w in enumerate(grid)
    ]
    results = list(_run_tasks(_volume_task, tasks, args.workers))
    results.sort(key=lambda r: (r[0], r[2]))

    rows = []
    for gi, w, kind_name, violations, fraction, lo, hi in results:
        measure = (
            _closed_form_measure(CRITERIA_BY_NAME[kind_name], w, args.m)
            if args.with_measures
            else None
        )
        rows.append(
            (gi, w, kind_name, args.m, args.q, args.samples, violations, fraction, lo, hi, measure)
        )
    header = [
        "grid_index",
        "w",
        "criterion",
        "m",
        "q",
        "n_samples",
        "violations",
        "fraction",
        "wilson_low",
        "wilson_high",
        "measure",
    ]
    out = Path(args.out)
    _write_csv(out, header, rows)
    _write_manifest(
        out,
        {
            "command": "volume",
            "schema": "volume-v1",
            "tool": f"qsteer {__version__}",
            "seed": args.seed,
            "grid": args.grid,
            "criteria": ",".join(k.value for k in kinds),
            "m": args.m,
            "q": args.q,
            "samples": args.samples,
            "chunk_size": args.chunk_size,
            "ensemble": args.ensemble,
            "db_convention": args.db_convention,
            "alice_bob_triads": "independent",
            "workers": args.workers,
            "kernel_backend": BACKEND,
            "wall_clock_s": f"{time.perf_counter() - t0:.3f}",
        },
    )
    return 0


# ---------------------------------------------------------------------------
# plumbing


def _run_tasks(fn, tasks, workers):
    if workers <= 1:
        for task in tasks:
            yield fn(task)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(fn, tasks)


def _parse_grid(spec: str) -> np.ndarray:
    try:
        start, stop, count = spec.split(":")
        grid = np.linspace(float(start), float(stop), int(count))
    except ValueError as exc:
        raise _usage(f"bad grid {spec!r}; expected start:stop:count") from exc
    if grid.size < 1 or grid.min() < 0.0 or grid.max() > 1.0:
        raise _usage(f"grid {spec!r} must stay within [0, 1]")
    return grid


def _parse_criteria(spec: str, m: int):
    names = [s.strip() for s in spec.split(",")] if spec != "all" else None
    if names is None:
        names = ["linear", "entropic", "rot-inv"] + (["dim-bound"] if m == 3 else [])
    kinds = []
    for name in names:
        if name not in CRITERIA_BY_NAME:
            raise _usage(f"unknown criterion {name!r}")
        kind = CRITERIA_BY_NAME[name]
        if kind == CriterionKind.DIM_BOUND and m != 3:
            raise _usage("dim-bound requires --m 3")
        kinds.append(kind)
    return kinds


class _UsageError(Exception):
    pass


def _usage(msg: str) -> _UsageError:
    return _UsageError(msg)


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"{value} must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsteer",
        description="Two-qubit steering quantification experiments (CSV output).",
    )
    parser.add_argument("--version", action="version", version=f"qsteer {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0, help="master RNG seed (64-bit)")
        p.add_argument("--out", required=True, help="output CSV path")
        p.add_argument("--workers", type=_positive_int, default=1)
        p.add_argument(
            "--ensemble",
            default=ENSEMBLE,
            choices=[ENSEMBLE],
            help="random-state ensemble (fixed in this version, recorded anyway)",
        )

    p = sub.add_parser("scan", help="measure scatter over random states")
    common(p)
    p.add_argument("--n-states", type=_positive_int, required=True)
    p.add_argument(
        "--werner", action="store_true", help="inject a Werner grid instead of random states"
    )
    p.set_defaults(fn=cmd_scan)

    p = sub.add_parser("werner", help="closed-form measures along a Werner grid")
    common(p)
    p.add_argument("--grid", default="0:1:21", help="start:stop:count")
    p.add_argument("--m", type=int, default=3, choices=(2, 3))
    p.add_argument("--with-sdp", action="store_true")
    p.set_defaults(fn=cmd_werner)

    p = sub.add_parser("robust-scan", help="fixed-settings robustness vs entropic measure")
    common(p)
    p.add_argument("--n-states", type=_positive_int, required=True)
    p.add_argument("--m", type=int, default=3, choices=(2, 3))
    p.add_argument("--see-saw", action="store_true")
    p.set_defaults(fn=cmd_robust_scan)

    p = sub.add_parser("volume", help="volume of violations along a Werner grid")
    common(p)
    p.add_argument("--grid", default="0:1:21", help="start:stop:count")
    p.add_argument("--criteria", default="all", help="comma list or 'all'")
    p.add_argument("--m", type=int, default=3, choices=(2, 3))
    p.add_argument("--q", type=float, default=2.0)
    p.add_argument("--samples", type=_positive_int, required=True)
    p.add_argument("--chunk-size", type=_positive_int, default=DEFAULT_CHUNK_SIZE)
    p.add_argument("--db-convention", default="measure", choices=("measure", "separable"))
    p.add_argument(
        "--with-measures", action="store_true", help="add the closed-form measure column"
    )
    p.set_defaults(fn=cmd_volume)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.fn(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except QSteerError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
