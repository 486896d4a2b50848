"""Command-line front end.

Subcommands
-----------
- ``code info``: print code parameters for a family/size.
- ``checks export``: dump check supports as diffable text.
- ``simulate``: run a Monte Carlo grid, write CSV (+ JSON summary).
- ``fit crossing`` / ``fit sustainable``: fit previously written CSV data.
- ``sweep``: simulate + crossing fits per N + sustainable fit pipeline.

Exit codes: 0 success, 2 configuration error, 3 fit failure.  The master
seed defaults to the QEC_SEED environment variable (else 0), and results
are byte-identical for a given seed regardless of --workers.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import subprocess
import sys
import time
from dataclasses import asdict, dataclass, field
from importlib import metadata
from pathlib import Path

import numpy as np

from .codes import (
    CssCode,
    analytic_toric_single_shot,
    build_code,
    derive_single_shot_basis,
)
from .errors import FitFailureError, InvalidParameterError, SsqecError
from .gf2 import BitMatrix
from .protocol import CheckScheme
from .stats import (
    DEFAULT_BOOTSTRAP,
    DEFAULT_WINDOW,
    CrossingFit,
    NoThresholdResult,
    SweepRecord,
    SweepResult,
    SweepTemplate,
    fit_crossing,
    fit_sustainable,
    run_sweep,
)

CSV_HEADER = "model,scheme,family,L,N,p,trials,failures,p_L,stderr,seed"

_SCHEME_FLAGS = {
    "local-repeated": CheckScheme.LOCAL_REPEATED,
    "local-single-shot": CheckScheme.LOCAL_SINGLE_SHOT,
    "single-shot-analytic": CheckScheme.SINGLE_SHOT_ANALYTIC,
    "single-shot-eliminated": CheckScheme.SINGLE_SHOT_ELIMINATED,
}


def _g(x: float) -> str:
    """Floating-point CSV formatting: 6 significant digits."""
    return f"{x:.6g}"


def version_string() -> str:
    """git-describe-style version: tag/sha when run from a checkout."""
    try:
        base = f"v{metadata.version('ssqec')}"
    except metadata.PackageNotFoundError:  # pragma: no cover
        base = "v0.0.0"
    for parent in Path(__file__).resolve().parents:
        if (parent / ".git").exists():
            try:
                out = subprocess.run(
                    ["git", "describe", "--tags", "--always", "--dirty"],
                    cwd=parent,
                    capture_output=True,
                    text=True,
                    timeout=5,
                )
            except OSError:  # pragma: no cover
                break
            if out.returncode == 0:
                desc = out.stdout.strip()
                return desc if desc.startswith("v") else f"{base}-g{desc}"
            break
    return base


@dataclass
class ExperimentConfig:
    """One sweep request: grid, scheme, noise model, budget, outputs."""

    family: str = "toric"
    L: list[int] = field(default_factory=lambda: [3])
    check_scheme: str = "single-shot-analytic"
    model: str = "phenomenological"
    p: list[float] = field(default_factory=lambda: [0.05])
    q: float | None = None
    N: list[int] = field(default_factory=lambda: [1])
    trials: int = 1000
    seed: int = 0
    workers: int = 1
    out: str = "results.csv"
    summary: str | None = None
    sides: str = "Z"
    p_th_guess: float | None = None
    mu_guess: float = 1.5
    window: float = DEFAULT_WINDOW
    bootstrap: int = DEFAULT_BOOTSTRAP

    def validate(self) -> None:
        if self.check_scheme not in _SCHEME_FLAGS:
            raise InvalidParameterError(
                f"unknown scheme {self.check_scheme!r}; "
                f"choose from {sorted(_SCHEME_FLAGS)}"
            )
        if not self.L or not self.p or not self.N:
            raise InvalidParameterError("L, p and N lists must be non-empty")
        if any(v < 0 or v > 1 for v in self.p):
            raise InvalidParameterError("p values must lie in [0, 1]")
        if any(n < 0 for n in self.N):
            raise InvalidParameterError("N values must be >= 0")
        if self.trials < 100:
            raise InvalidParameterError("trials per point must be >= 100")
        if self.workers < 1:
            raise InvalidParameterError("workers must be >= 1")
        # Template construction validates family/model/sides coupling.
        self.template()

    def template(self) -> SweepTemplate:
        return SweepTemplate(
            family=self.family,
            check_scheme=_SCHEME_FLAGS[self.check_scheme],
            model=self.model,
            sides=self.sides,
            q=self.q,
        )

    def grid(self) -> list[tuple[float, int, int]]:
        return [(p, L, N) for N in self.N for L in self.L for p in self.p]


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig()
    file_keys: set[str] = set()
    if getattr(args, "config", None):
        with open(args.config) as fh:
            data = json.load(fh)
        unknown = set(data) - set(cfg.__dataclass_fields__)
        if unknown:
            raise InvalidParameterError(
                f"unknown config keys: {sorted(unknown)}"
            )
        for key, value in data.items():
            setattr(cfg, key, value)
        file_keys = set(data)
    # Flags override the file; only explicitly passed flags are non-None.
    for key in cfg.__dataclass_fields__:
        value = getattr(args, key, None)
        if value is not None:
            setattr(cfg, key, value)
    if getattr(args, "seed", None) is None and "seed" not in file_keys:
        cfg.seed = int(os.environ.get("QEC_SEED", "0"))
    cfg.validate()
    return cfg


def _write_rows(fh, records) -> None:
    for r in records:
        fh.write(
            f"{r.model},{r.check_scheme},{r.family},{r.L},{r.N},{_g(r.p)},"
            f"{r.trials},{r.failures},{_g(r.p_L)},{_g(r.stderr)},{r.seed}\n"
        )
    fh.flush()


def run_experiment(cfg: ExperimentConfig, do_fits: bool = False) -> int:
    """Execute a sweep (and, for the pipeline, fits); write CSV + JSON."""
    t0 = time.monotonic()
    template = cfg.template()
    grid = cfg.grid()
    records: list[SweepRecord] = []
    exit_code = 0
    failure_note: str | None = None
    with open(cfg.out, "w") as fh:
        fh.write(CSV_HEADER + "\n")
        try:
            for point in grid:
                res = run_sweep(
                    [point],
                    template,
                    trials=cfg.trials,
                    workers=cfg.workers,
                    master_seed=cfg.seed,
                )
                records.extend(res.records)
                _write_rows(fh, res.records)
        except (SsqecError, KeyboardInterrupt) as exc:
            fh.write(f"# partial: {len(records)}/{len(grid)} points\n")
            failure_note = f"{type(exc).__name__}: {exc}"
            exit_code = 3
    summary: dict = {
        "config": asdict(cfg),
        "version": version_string(),
        "points": len(records),
        "fits": {},
    }
    if failure_note is not None:
        summary["error"] = failure_note
        summary["partial"] = True
    sweep = SweepResult(tuple(records))
    if do_fits and exit_code == 0:
        thresholds = []
        if template.check_scheme is CheckScheme.LOCAL_REPEATED:
            # repeated runs use N = L rounds per record: one joint fit
            slices = [("crossing", sweep)]
        else:
            slices = [
                (f"crossing_N{N}", sweep.at_n(N))
                for N in sorted({r.N for r in records})
            ]
        for key, part in slices:
            try:
                fit = fit_crossing(
                    part,
                    p_th_guess=cfg.p_th_guess,
                    mu_guess=cfg.mu_guess,
                    window=cfg.window,
                    bootstrap=cfg.bootstrap,
                    seed=cfg.seed,
                )
            except (InvalidParameterError, FitFailureError) as exc:
                summary["fits"][key] = {
                    "error": f"{type(exc).__name__}: {exc}"
                }
                exit_code = 3
                continue
            summary["fits"][key] = _fit_payload(fit)
            if isinstance(fit, CrossingFit):
                N = part.records[0].N
                thresholds.append((N, fit.p_th))
        if len({n for n, _ in thresholds}) >= 4:
            try:
                sfit = fit_sustainable(thresholds, seed=cfg.seed)
                summary["fits"]["sustainable"] = _fit_payload(sfit)
            except (InvalidParameterError, FitFailureError) as exc:
                summary["fits"]["sustainable"] = {
                    "error": f"{type(exc).__name__}: {exc}"
                }
                exit_code = 3
    summary["wall_clock_seconds"] = round(time.monotonic() - t0, 3)
    summary_path = cfg.summary or str(Path(cfg.out).with_suffix(".json"))
    with open(summary_path, "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    print(f"wrote {cfg.out} and {summary_path}")
    return exit_code


def _fit_payload(fit) -> dict:
    if isinstance(fit, NoThresholdResult):
        return {
            "verdict": "no-threshold",
            "p_values": list(fit.p_values),
            "message": fit.message,
        }
    return asdict(fit)


def _cmd_code_info(args: argparse.Namespace) -> int:
    code = build_code(args.family, args.L)
    print(f"family: {code.family}")
    print(f"L: {code.L}")
    print(f"qubits: {code.n}")
    print(f"logical_qubits: {code.k}")
    print(f"x_checks: {code.hx.rows}")
    print(f"z_checks: {code.hz.rows}")
    lx = min(int((v != 0).sum()) for v in code.logical_x)
    lz = min(int((v != 0).sum()) for v in code.logical_z)
    print(f"min_logical_weight_x: {lx}")
    print(f"min_logical_weight_z: {lz}")
    if code.family == "toric":
        print(f"single_shot_rectangular: {(code.L - 1) * code.L}")
        print(f"single_shot_circular: {code.L - 1}")
    return 0


def _check_lines(code: CssCode, side: str, scheme: CheckScheme) -> list[str]:
    lines = []
    if scheme in (CheckScheme.LOCAL_REPEATED, CheckScheme.LOCAL_SINGLE_SHOT):
        H: BitMatrix = code.hz if side == "Z" else code.hx
        for i in range(H.rows):
            support = " ".join(str(j) for j in H.row_support(i))
            lines.append(f"{side} local {i} - {support}")
        return lines
    if scheme is CheckScheme.SINGLE_SHOT_ANALYTIC:
        if code.family != "toric":
            raise InvalidParameterError(
                "the analytic single-shot construction exists only for the "
                f"toric family, not {code.family!r}"
            )
        basis = analytic_toric_single_shot(code.L, side=side)
    else:
        basis = derive_single_shot_basis(code, side=side)
    for i in range(basis.checks.rows):
        kind = basis.kinds[i]
        dq = basis.designated_qubit[i]
        dq_s = "-" if dq < 0 else str(int(dq))
        support = " ".join(str(j) for j in basis.checks.row_support(i))
        lines.append(f"{side} {kind} {i} {dq_s} {support}")
    return lines


def _cmd_checks_export(args: argparse.Namespace) -> int:
    code = build_code(args.family, args.L)
    scheme = _SCHEME_FLAGS[args.scheme]
    sides = ["Z", "X"] if args.side == "both" else [args.side]
    lines: list[str] = []
    for side in sides:
        lines.extend(_check_lines(code, side, scheme))
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out} ({len(lines)} checks)")
    else:
        sys.stdout.write(text)
    return 0


def _read_csv(path: str) -> list[SweepRecord]:
    records = []
    with open(path) as fh:
        for row in csv.DictReader(
            line for line in fh if not line.startswith("#")
        ):
            records.append(
                SweepRecord(
                    model=row["model"],
                    check_scheme=row["scheme"],
                    family=row["family"],
                    L=int(row["L"]),
                    N=int(row["N"]),
                    p=float(row["p"]),
                    trials=int(row["trials"]),
                    failures=int(row["failures"]),
                    p_L=float(row["p_L"]),
                    stderr=float(row["stderr"]),
                    seed=int(row["seed"]),
                )
            )
    if not records:
        raise InvalidParameterError(f"no data rows in {path}")
    return records


def _cmd_fit_crossing(args: argparse.Namespace) -> int:
    records = _read_csv(args.infile)
    if args.N is not None:
        records = [r for r in records if r.N == args.N]
        if not records:
            raise InvalidParameterError(f"no rows with N={args.N}")
    fit = fit_crossing(
        records,
        p_th_guess=args.p_th_guess,
        mu_guess=args.mu_guess,
        window=args.window,
        bootstrap=args.bootstrap,
        seed=args.seed if args.seed is not None else 0,
    )
    print(json.dumps(_fit_payload(fit), indent=2))
    return 0


def _cmd_fit_sustainable(args: argparse.Namespace) -> int:
    points: list[tuple[float, float]] = []
    if args.infile:
        with open(args.infile) as fh:
            for row in csv.DictReader(fh):
                points.append((float(row["N"]), float(row["p_th"])))
    for spec in args.point or []:
        n_s, _, v_s = spec.partition(":")
        try:
            points.append((float(n_s), float(v_s)))
        except ValueError as exc:
            raise InvalidParameterError(
                f"--point expects N:p_th, got {spec!r}"
            ) from exc
    fit = fit_sustainable(points, seed=args.seed if args.seed is not None else 0)
    print(json.dumps(_fit_payload(fit), indent=2))
    return 0


def _add_grid_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", help="JSON config file; flags override it")
    sp.add_argument("--family", choices=["toric", "planar", "rotated"])
    sp.add_argument("--L", type=int, nargs="+")
    sp.add_argument(
        "--scheme", dest="check_scheme", choices=sorted(_SCHEME_FLAGS)
    )
    sp.add_argument("--model", choices=["phenomenological", "zx"])
    sp.add_argument("--p", type=float, nargs="+")
    sp.add_argument("--q", type=float)
    sp.add_argument("--N", type=int, nargs="+")
    sp.add_argument("--trials", type=int)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--workers", type=int)
    sp.add_argument("--sides", choices=["Z", "both"])
    sp.add_argument("--out")
    sp.add_argument("--summary")


def _add_fit_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--p-th-guess", dest="p_th_guess", type=float)
    sp.add_argument("--mu-guess", dest="mu_guess", type=float)
    sp.add_argument("--window", type=float)
    sp.add_argument("--bootstrap", type=int)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ssqec",
        description="Single-shot surface-code simulations and threshold fits.",
    )
    ap.add_argument("--version", action="version", version=version_string())
    sub = ap.add_subparsers(dest="command", required=True)

    code_p = sub.add_parser("code", help="code inspection")
    code_sub = code_p.add_subparsers(dest="subcommand", required=True)
    info = code_sub.add_parser("info", help="print code parameters")
    info.add_argument("--family", default="toric",
                      choices=["toric", "planar", "rotated"])
    info.add_argument("--L", type=int, required=True)
    info.set_defaults(func=_cmd_code_info)

    checks_p = sub.add_parser("checks", help="check operator export")
    checks_sub = checks_p.add_subparsers(dest="subcommand", required=True)
    exp = checks_sub.add_parser("export", help="dump check supports as text")
    exp.add_argument("--family", default="toric",
                     choices=["toric", "planar", "rotated"])
    exp.add_argument("--L", type=int, required=True)
    exp.add_argument("--side", default="Z", choices=["Z", "X", "both"])
    exp.add_argument("--scheme", default="single-shot-analytic",
                     choices=sorted(_SCHEME_FLAGS))
    exp.add_argument("--out")
    exp.set_defaults(func=_cmd_checks_export)

    sim = sub.add_parser("simulate", help="run a Monte Carlo grid")
    _add_grid_flags(sim)
    sim.set_defaults(
        func=lambda a: run_experiment(_config_from_args(a), do_fits=False)
    )

    sweep = sub.add_parser("sweep", help="simulate + fit pipeline")
    _add_grid_flags(sweep)
    _add_fit_flags(sweep)
    sweep.set_defaults(
        func=lambda a: run_experiment(_config_from_args(a), do_fits=True)
    )

    fit_p = sub.add_parser("fit", help="fit existing sweep data")
    fit_sub = fit_p.add_subparsers(dest="subcommand", required=True)
    fc = fit_sub.add_parser("crossing", help="finite-size-scaling crossing fit")
    fc.add_argument("--in", dest="infile", required=True)
    fc.add_argument("--N", type=int)
    fc.add_argument("--p-th-guess", dest="p_th_guess", type=float,
                    required=True)
    fc.add_argument("--mu-guess", dest="mu_guess", type=float, default=1.5)
    fc.add_argument("--window", type=float, default=DEFAULT_WINDOW)
    fc.add_argument("--bootstrap", type=int, default=DEFAULT_BOOTSTRAP)
    fc.add_argument("--seed", type=int)
    fc.set_defaults(func=_cmd_fit_crossing)
    fs = fit_sub.add_parser("sustainable", help="saturating-decay fit of p_th(N)")
    fs.add_argument("--in", dest="infile")
    fs.add_argument("--point", action="append",
                    help="N:p_th pair; repeatable")
    fs.add_argument("--seed", type=int)
    fs.set_defaults(func=_cmd_fit_sustainable)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FitFailureError as exc:
        print(f"fit failure: {exc}", file=sys.stderr)
        return 3
    except SsqecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
