"""qbounce command line: figure data as CSV/JSON and the validation report.

Exit codes: 0 success, 1 usage or configuration error, 2 verification
failure (a checked invariant or the isospectrality test did not hold).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import bouncer, ermakov, spectra, susy, validation
from .numerics import QuadratureError
from .series import SampledSeries, make_grid

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2

INVARIANT_SPREAD_LIMIT = 1e-8
ADDITIVITY_LIMIT = 1e-10

# default constants per subcommand when --convention is not given
_DEFAULT_CONVENTION = {
    "modes": "exact",
    "invariant": "paper",
    "angles": "paper",
    "susy": "exact",
    "spectrum": "exact",
}


class UsageError(Exception):
    pass


class VerificationError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass(frozen=True)
class RunConfig:
    convention: str
    lam: float
    grid_min: float
    grid_max: float
    grid_points: int
    tolerance: float
    output_format: str

    def grid(self) -> np.ndarray:
        try:
            grid = make_grid(self.grid_min, self.grid_max, self.grid_points)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if self.grid_min < 0:
            raise UsageError(f"grid must lie in s >= 0 (hard wall at 0), got grid-min {self.grid_min}")
        return grid


def _config(args, command: str) -> RunConfig:
    conv = args.convention or _DEFAULT_CONVENTION.get(command, "exact")
    if not (math.isfinite(args.tol) and args.tol > 0):
        raise UsageError(f"--tol must be positive, got {args.tol}")
    if not math.isfinite(args.lam) or (command in ("susy", "spectrum") and args.lam <= 0):
        raise UsageError(f"--lambda must be positive, got {args.lam}")
    return RunConfig(conv, args.lam, args.grid_min, args.grid_max, args.grid_points, args.tol, args.format)


# ---------------------------------------------------------------- commands


def cmd_modes(config: RunConfig, n_max: int):
    if n_max < 1:
        raise UsageError(f"--n-max must be >= 1, got {n_max}")
    if config.convention == "paper" and n_max > 1:
        raise UsageError("WKB constants (--convention paper) exist for the ground state only; use --n-max 1")
    grid = config.grid()
    modes = [bouncer.eigenmode(n, config.convention) for n in range(1, n_max + 1)]
    series = SampledSeries(
        f"modes convention={config.convention}",
        grid,
        [(f"psi{m.n}", bouncer.psi(m, grid)) for m in modes],
    )
    table = [{"n": 1, "convention": "paper", "S": bouncer.PAPER_S1, "N": bouncer.PAPER_N1}]
    for n in range(1, n_max + 1):
        m = modes[n - 1] if config.convention == "exact" else bouncer.eigenmode(n, "exact")
        table.append({"n": n, "convention": "exact", "S": m.S, "N": m.N})
    summary = [f"n={row['n']} {row['convention']}: S={row['S']:.6f} N={row['N']:.6f}" for row in table]
    return series, {"constants": table}, summary


def cmd_invariant(config: RunConfig, h2_mode: str):
    grid = config.grid()
    pf = ermakov.pinney(config.convention)
    mode = bouncer.eigenmode(1, config.convention)
    h2 = 1.0 if h2_mode == "paper" else None
    values = np.asarray(ermakov.lewis_invariant(pf, mode, grid, h_squared_test=h2), dtype=float)
    mean = float(values.mean())
    spread = float((values.max() - values.min()) / abs(mean))
    series = SampledSeries(f"invariant convention={config.convention} h2={h2_mode}", grid, [("I", values)])
    meta = {"h2_mode": h2_mode, "h_squared": 1.0 if h2 else pf.h_squared, "mean": mean, "relative_spread": spread}
    summary = [f"invariant mean={mean:.12g} relative spread={spread:.3e}"]
    if h2_mode == "paper":
        summary.append(
            f"WARNING: with h^2 = 1 the invariant is not conserved (spread {spread:.3g}); "
            f"the Pinney function requires h^2 = {pf.h_squared:.8f}"
        )
    elif spread >= INVARIANT_SPREAD_LIMIT:
        raise VerificationError(f"invariant spread {spread:.3e} exceeds {INVARIANT_SPREAD_LIMIT:g}")
    return series, meta, summary


def cmd_angles(config: RunConfig):
    grid = config.grid()
    pf = ermakov.pinney(config.convention)
    try:
        rows = ermakov.lewis_angle_series(pf, grid, tol=config.tolerance)
    except QuadratureError as exc:
        raise VerificationError(f"angle quadrature failed at T={exc.abscissa!r}: {exc}") from None
    dyn = np.array([r.dynamical for r in rows])
    geo = np.array([r.geometric for r in rows])
    tot = np.array([r.total for r in rows])
    gap = np.abs(dyn + geo - tot) / np.maximum(1.0, np.abs(dyn) + np.abs(geo))
    if np.any(gap > ADDITIVITY_LIMIT):
        bad = int(np.argmax(gap))
        raise VerificationError(f"dynamical + geometric != total at T={grid[bad]!r}")
    series = SampledSeries(
        f"angles convention={config.convention}",
        grid,
        [("dynamical", dyn), ("geometric", geo), ("total", tot)],
        grid_label="T",
    )
    summary = [f"total angle at T={grid[-1]:g}: {tot[-1]:.12g}"]
    return series, {"total_final": float(tot[-1])}, summary


def cmd_susy(config: RunConfig):
    grid = config.grid()
    series = validation.susy_series(config.lam, grid, config.convention)
    i0 = series.column("I0")
    summary = [f"lambda={config.lam:g} I0({grid[-1]:g})={i0[-1]:.12g}"]
    return series, {"I0_final": float(i0[-1])}, summary


def cmd_spectrum(config: RunConfig, L: float, points: int, k: int, max_gap: float):
    if k < 1 or k > 10:
        raise UsageError(f"--k must be in [1, 10], got {k}")
    if points < 10:
        raise UsageError(f"--points must be >= 10, got {points}")
    if config.convention != "exact":
        raise UsageError("the spectral comparison uses the exact constants only")
    try:
        cmp = spectra.compare_spectra(config.lam, L, points, k)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    series = SampledSeries(
        f"spectrum lambda={config.lam!r} L={L!r} points={points}",
        np.arange(1, k + 1, dtype=float),
        [("qbb", cmp.eigenvalues_qbb), ("lambda", cmp.eigenvalues_lambda), ("airy_zero", cmp.airy_reference)],
        grid_label="n",
    )
    summary = ["  n            V_QBB        V(s;lambda)            a_n"]
    summary += [
        f"{n:3d} {q:16.10f} {d:18.10f} {a:14.10f}"
        for n, q, d, a in zip(range(1, k + 1), cmp.eigenvalues_qbb, cmp.eigenvalues_lambda, cmp.airy_reference)
    ]
    summary.append(f"max pairwise gap {cmp.max_pairwise_gap:.3e}, max gap to a_n {cmp.max_reference_gap:.3e}")
    meta = {"comparison": cmp.to_dict()}
    if cmp.max_pairwise_gap >= max_gap:
        return series, meta, summary + [f"FAIL: pairwise gap above {max_gap:g}"], False
    return series, meta, summary, True


def cmd_validate(out: Path, data_dir: Path) -> bool:
    def progress(check):
        print(f"criterion {check.number} {check.title}: {'PASS' if check.passed else 'FAIL'}", file=sys.stderr)

    checks = validation.run_all(data_dir, progress)
    validation.write_report(out, checks)
    print(f"wrote {out}", file=sys.stderr)
    return all(c.passed for c in checks)


# ---------------------------------------------------------------- plumbing


def _emit(series: SampledSeries, fmt: str, out: Optional[str], meta: dict, config: RunConfig) -> None:
    text = series.dumps(fmt)
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    path = Path(out)
    path.write_text(text)
    sidecar = path.with_name(path.name + ".meta.json")
    sidecar.write_text(json.dumps({"config": asdict(config), "series": series.name, **meta}, indent=1, default=float) + "\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--convention", choices=["paper", "exact"], default=None)
    common.add_argument("--lambda", dest="lam", type=float, default=1.0)
    common.add_argument("--grid-min", type=float, default=0.0)
    common.add_argument("--grid-max", type=float, default=12.0)
    common.add_argument("--grid-points", type=int, default=1201)
    common.add_argument("--tol", type=float, default=1e-12)
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--out", default=None, help="output path, '-' or omitted for stdout")

    parser = _Parser(prog="qbounce", description="Quantum bouncer: Ermakov-Lewis and isospectral figure data.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    modes = sub.add_parser("modes", parents=[common], help="bouncer eigenfunctions psi_n")
    modes.add_argument("--n-max", type=int, default=1)
    inv = sub.add_parser("invariant", parents=[common], help="Ermakov-Lewis invariant along s")
    inv.add_argument("--h2", choices=["paper", "consistent"], default="consistent")
    sub.add_parser("angles", parents=[common], help="dynamical, geometric and total Lewis angles")
    sub.add_parser("susy", parents=[common], help="I0, V(s;lambda), psi_1, phi_1")
    spectrum = sub.add_parser("spectrum", parents=[common], help="finite-difference isospectrality check")
    spectrum.add_argument("--L", type=float, default=40.0)
    spectrum.add_argument("--points", type=int, default=4000)
    spectrum.add_argument("--k", type=int, default=6)
    spectrum.add_argument("--max-gap", type=float, default=5e-4)
    val = sub.add_parser("validate", help="run every acceptance check and write VALIDATION.md")
    val.add_argument("--out", default="VALIDATION.md")
    val.add_argument("--data-dir", default=None, help="directory for figure data (default: next to --out)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "validate":
            out = Path(args.out)
            data_dir = Path(args.data_dir) if args.data_dir else out.parent / "validation_data"
            return EXIT_OK if cmd_validate(out, data_dir) else EXIT_VERIFY
        config = _config(args, args.command)
        ok = True
        if args.command == "modes":
            series, meta, summary = cmd_modes(config, args.n_max)
        elif args.command == "invariant":
            series, meta, summary = cmd_invariant(config, args.h2)
        elif args.command == "angles":
            series, meta, summary = cmd_angles(config)
        elif args.command == "susy":
            series, meta, summary = cmd_susy(config)
        else:
            series, meta, summary, ok = cmd_spectrum(config, args.L, args.points, args.k, args.max_gap)
        _emit(series, config.output_format, args.out, meta, config)
        for line in summary:
            print(line, file=sys.stderr)
        return EXIT_OK if ok else EXIT_VERIFY
    except UsageError as exc:
        print(f"qbounce: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except VerificationError as exc:
        print(f"qbounce: verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
