"""Command-line entry point: reproducible experiment runs as CSV or JSON tables.

Every output carries a run manifest (command, resolved parameters, package
version and a checksum of the rows). Exit codes: 0 success, 1 runtime error,
2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass
from typing import Any, Sequence

import numpy as np

from . import __version__
from .correlate import (
    CLASSICAL_BOUND,
    TSIRELSON_BOUND,
    ChshSetting,
    apparatus_sweep,
    chsh_value,
    correlation_degree,
    correlation_sweep,
    joint_probs_analytic,
    joint_probs_from_state,
    table1_report,
)
from .entangle import (
    DetectorModel,
    coherence_ledger,
    equal_superposition,
    fringe_scan,
    premeasure,
    reduced_visibility,
)
from .optics import MziConfig, Placement, RtoConfig, mzi_probabilities
from .sampler import MASK64, estimate_correlation, sample_outcomes

SEED_ENV = "BIPHOTON_SEED"
# multiplier for per-point seeds of multi-point sampled runs (distinct from the chunk multiplier)
POINT_MULT = 0xBF58476D1CE4E5B9
GRID = {"start": 0.0, "stop": 2 * math.pi}


class UsageError(Exception):
    pass


@dataclass
class RunManifest:
    command: str
    parameters: dict
    version: str = __version__
    checksum: str = ""


def point_seed(seed: int, i: int) -> int:
    return seed ^ ((POINT_MULT * (i + 1)) & MASK64)


def _clean(x: Any) -> Any:
    """Round floats to 15 significant digits; numpy scalars become Python ones."""
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(f"{float(x):.15g}")
        return 0.0 if abs(x) < 1e-15 else x
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x


def _cell(x: Any) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.15g}"
    return str(x)


def render(manifest: RunManifest, rows: list[dict], fmt: str) -> str:
    """Serialize rows plus manifest; identical manifests give identical text."""
    rows = [{k: _clean(v) for k, v in row.items()} for row in rows]
    params = {k: _clean(v) for k, v in manifest.parameters.items()}
    payload = json.dumps(rows, sort_keys=False, separators=(",", ":"))
    manifest = RunManifest(manifest.command, params, manifest.version,
                           "sha256:" + hashlib.sha256(payload.encode()).hexdigest())
    if fmt == "json":
        return json.dumps({"manifest": asdict(manifest), "rows": rows}, indent=2) + "\n"
    buf = io.StringIO()
    buf.write(f"# command: {manifest.command}\n")
    buf.write(f"# parameters: {json.dumps(params, sort_keys=True)}\n")
    buf.write(f"# version: {manifest.version}\n")
    buf.write(f"# checksum: {manifest.checksum}\n")
    writer = csv.writer(buf, lineterminator="\n")
    columns = list(rows[0]) if rows else []
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row[c]) for c in columns])
    return buf.getvalue()


def emit(rows: list[dict], fmt: str, destination: str | None, manifest: RunManifest) -> None:
    text = render(manifest, rows, fmt)
    if destination in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _grid(args) -> list[float]:
    if args.points < 1:
        raise UsageError("--points must be at least 1")
    return [float(x) for x in np.linspace(args.start, args.stop, args.points)]


def _seed(args) -> int:
    if args.seed is not None:
        seed = args.seed
    else:
        env = os.environ.get(SEED_ENV)
        try:
            seed = int(env, 0) if env else 0
        except ValueError:
            raise UsageError(f"{SEED_ENV}={env!r} is not an integer") from None
    if not 0 <= seed <= MASK64:
        raise UsageError("seed must be a 64-bit unsigned integer")
    return seed


def _sampling(args) -> tuple[int | None, int | None]:
    if args.trials is None:
        return None, None
    if args.trials < 1:
        raise UsageError("--trials must be positive")
    return args.trials, _seed(args)


def _sampled_columns(jd, trials, seed) -> dict:
    est = estimate_correlation(sample_outcomes(jd, trials, seed))
    return {"c_hat": est.c_hat, "std_err": est.std_err, "trials": est.n}


def cmd_mzi(args):
    grid = [args.phi1] if args.phi1 is not None else _grid(args)
    rows = []
    for phi1 in grid:
        p1, p2 = mzi_probabilities(MziConfig(phi1, args.phi2))
        rows.append({"phi1_rad": phi1, "phi2_rad": args.phi2, "p_1d": p1, "p_2d": p2})
    params = {"phi1_rad": args.phi1, "phi2_rad": args.phi2}
    if args.phi1 is None:
        params.update(start_rad=args.start, stop_rad=args.stop, points=args.points)
    if args.plot:
        from .plotting import plot_mzi
        plot_mzi(rows, args.plot)
    return params, rows


def cmd_rto(args):
    placement = Placement.parse(args.placement)
    cfg = RtoConfig(args.phase_a, args.phase_b, args.w, placement)
    jd = joint_probs_from_state(cfg)
    rep = correlation_degree(jd, cfg.delta)
    row = {"delta_rad": cfg.delta, "w_rad": cfg.w, "p11": jd.p11, "p22": jd.p22, "p12": jd.p12,
           "p21": jd.p21, "p_corr": rep.p_corr, "p_anti": rep.p_anti, "degree": rep.degree}
    trials, seed = _sampling(args)
    if trials:
        row.update(_sampled_columns(jd, trials, seed))
    params = {"phase_a_rad": args.phase_a, "phase_b_rad": args.phase_b, "w_rad": args.w,
              "placement": placement.name, "trials": trials, "seed": seed}
    return params, [row]


def cmd_sweep(args):
    grid = _grid(args)
    trials, seed = _sampling(args)
    if args.source == "apparatus":
        reports = apparatus_sweep(grid, args.w)
    else:
        reports = correlation_sweep(grid, args.w)
    rows = []
    for i, rep in enumerate(reports):
        row = {"delta_rad": rep.delta, "p_corr": rep.p_corr, "p_anti": rep.p_anti, "degree": rep.degree}
        if trials:
            row.update(_sampled_columns(joint_probs_analytic(rep.delta, args.w), trials, point_seed(seed, i)))
        rows.append(row)
    params = {"start_rad": args.start, "stop_rad": args.stop, "points": args.points, "w_rad": args.w,
              "source": args.source, "trials": trials, "seed": seed}
    if args.plot:
        from .plotting import plot_sweep
        plot_sweep(rows, args.plot)
    return params, rows


def cmd_table1(args):
    grid = args.phases if args.phases else None
    report = table1_report(grid) if grid else table1_report()
    rows = [
        {"phase_rad": r.phase, "simple_p1": r.simple_p1, "local_p1_a": r.local_p1_a,
         "local_p1_b": r.local_p1_b, "p_corr": r.p_corr, "p_anti": r.p_anti,
         "paper_claim": r.paper_claim, "flag": r.flag}
        for r in report
    ]
    return {"phases_rad": [r.phase for r in report]}, rows


def cmd_chsh(args):
    s = ChshSetting(args.a, args.a_prime, args.b, args.b_prime)
    value = chsh_value(s)
    row = {"a_rad": s.a, "a_prime_rad": s.a_prime, "b_rad": s.b, "b_prime_rad": s.b_prime,
           "s_value": value, "classical_bound": CLASSICAL_BOUND, "tsirelson_bound": TSIRELSON_BOUND,
           "violated": value > CLASSICAL_BOUND}
    trials, seed = _sampling(args)
    if trials:
        pairs = [(s.a, s.b), (s.a, s.b_prime), (s.a_prime, s.b), (s.a_prime, s.b_prime)]
        est = [estimate_correlation(sample_outcomes(joint_probs_analytic(y - x), trials, point_seed(seed, i)))
               for i, (x, y) in enumerate(pairs)]
        row["s_sampled"] = abs(est[0].c_hat - est[1].c_hat + est[2].c_hat + est[3].c_hat)
        row["s_std_err"] = math.sqrt(sum(e.std_err ** 2 for e in est))
        row["trials"] = trials
    params = {"a_rad": s.a, "a_prime_rad": s.a_prime, "b_rad": s.b, "b_prime_rad": s.b_prime,
              "trials": trials, "seed": seed}
    return params, [row]


def _overlap(args) -> DetectorModel:
    try:
        return DetectorModel(complex(args.overlap, args.overlap_imag))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_whichpath(args):
    det = _overlap(args)
    scan = fringe_scan(equal_superposition(), det, _grid(args))
    rows = [{"phase_rad": phi, "p_port1": p} for phi, p in scan]
    params = {"overlap_re": det.overlap.real, "overlap_im": det.overlap.imag,
              "start_rad": args.start, "stop_rad": args.stop, "points": args.points}
    if args.plot:
        from .plotting import plot_fringes
        plot_fringes(rows, args.plot, det.overlap)
    return params, rows


def cmd_ledger(args):
    det = _overlap(args)
    joint = premeasure(equal_superposition(), det)
    led = coherence_ledger(joint)
    row = {"overlap_re": det.overlap.real, "overlap_im": det.overlap.imag, **asdict(led),
           "reduced_visibility": reduced_visibility(joint, "S")}
    return {"overlap_re": det.overlap.real, "overlap_im": det.overlap.imag}, [row]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="json")
    common.add_argument("-o", "--output", default=None, help="output file (default: standard output)")
    common.add_argument("--degrees", action="store_true", help="read phase arguments in degrees")

    def grid_opts(p, points):
        p.add_argument("--start", type=float, default=None, help="first phase (default 0)")
        p.add_argument("--stop", type=float, default=None, help="last phase (default 2 pi)")
        p.add_argument("--points", type=int, default=points)

    def sampling_opts(p):
        p.add_argument("--trials", type=int, default=None, help="add a Monte Carlo estimate with N trials")
        p.add_argument("--seed", type=lambda s: int(s, 0), default=None,
                       help=f"64-bit seed (default: ${SEED_ENV} or 0)")

    parser = _Parser(prog="biphoton", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("mzi", parents=[common], help="single-photon Mach-Zehnder detection probabilities")
    p.add_argument("--phi1", type=float, default=None, help="single path-1 phase instead of a sweep")
    p.add_argument("--phi2", type=float, default=None)
    grid_opts(p, 9)
    p.add_argument("--plot", default=None, help="also write a figure to this path")
    p.set_defaults(func=cmd_mzi, phase_defaults={"phi1": None, "phi2": 0.0, **GRID})

    p = sub.add_parser("rto", parents=[common], help="joint detector distribution at one setting")
    p.add_argument("--phase-a", type=float, default=None)
    p.add_argument("--phase-b", type=float, default=None)
    p.add_argument("--w", type=float, default=None, help="fixed apparatus offset (default 0)")
    p.add_argument("--placement", default="A1_B2", help="shifter arms, one of A1_B1, A1_B2, A2_B1, A2_B2")
    sampling_opts(p)
    p.set_defaults(func=cmd_rto, phase_defaults={"phase_a": 0.0, "phase_b": 0.0, "w": 0.0})

    p = sub.add_parser("sweep", parents=[common], help="degree of correlation over a nonlocal-phase grid")
    grid_opts(p, 25)
    p.add_argument("--w", type=float, default=None)
    p.add_argument("--source", choices=("analytic", "apparatus"), default="analytic")
    sampling_opts(p)
    p.add_argument("--plot", default=None)
    p.set_defaults(func=cmd_sweep, phase_defaults={**GRID, "w": 0.0})

    p = sub.add_parser("table1", parents=[common], help="superposition vs entanglement table with flags")
    p.add_argument("--phases", type=float, nargs="+", default=None)
    p.set_defaults(func=cmd_table1, phase_defaults={"phases": None})

    p = sub.add_parser("chsh", parents=[common], help="CHSH value of the cosine correlation law")
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--a-prime", type=float, default=None)
    p.add_argument("--b", type=float, default=None)
    p.add_argument("--b-prime", type=float, default=None)
    sampling_opts(p)
    p.set_defaults(func=cmd_chsh, phase_defaults=asdict(ChshSetting()))

    p = sub.add_parser("whichpath", parents=[common], help="fringe scan behind a which-path detector")
    p.add_argument("--overlap", type=float, default=0.0, help="pointer-state overlap c (real part)")
    p.add_argument("--overlap-imag", type=float, default=0.0)
    grid_opts(p, 25)
    p.add_argument("--plot", default=None)
    p.set_defaults(func=cmd_whichpath, phase_defaults=GRID)

    p = sub.add_parser("ledger", parents=[common], help="coherence ledger of a premeasured superposition")
    p.add_argument("--overlap", type=float, default=0.0)
    p.add_argument("--overlap-imag", type=float, default=0.0)
    p.set_defaults(func=cmd_ledger, phase_defaults={})
    return parser


def _resolve_phases(args) -> None:
    """Apply radian defaults and convert user-given phases when --degrees is set."""
    for name, default in args.phase_defaults.items():
        value = getattr(args, name)
        if value is None:
            setattr(args, name, default)
            continue
        values = value if isinstance(value, list) else [value]
        if not all(math.isfinite(v) for v in values):
            raise UsageError(f"--{name.replace('_', '-')} must be finite")
        if args.degrees:
            values = [math.radians(v) for v in values]
        setattr(args, name, values if isinstance(value, list) else values[0])


def dispatch(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _resolve_phases(args)
        params, rows = args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except (ValueError, ArithmeticError) as exc:
        print(f"biphoton {args.command}: error: {exc}", file=sys.stderr)
        return 1
    manifest = RunManifest(args.command, {**params, "format": args.format})
    try:
        emit(rows, args.format, args.output, manifest)
    except OSError as exc:
        print(f"biphoton {args.command}: cannot write output: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(dispatch())
