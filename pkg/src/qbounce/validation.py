"""End-to-end acceptance checks and the VALIDATION.md report.

Each ``check_*`` function measures one group of properties and returns a
``Check`` holding the measured numbers next to their limits. Reference
values come from mpmath, which shares no code with ``qbounce.airy``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import airy, bouncer, ermakov, spectra, susy
from .numerics import derivative, integrate_to_infinity
from .series import SampledSeries

__all__ = ["Measurement", "Check", "CHECKS", "run_all", "render_report", "write_report", "susy_series"]


@dataclass(frozen=True)
class Measurement:
    quantity: str
    value: float
    limit: float
    kind: str = "<"  # comparison of value against limit: "<", ">" or ">="

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.value):
            return False
        if self.kind == ">=":
            return self.value >= self.limit
        return self.value < self.limit if self.kind == "<" else self.value > self.limit


@dataclass
class Check:
    number: int
    title: str
    measurements: list = field(default_factory=list)
    seconds: float = 0.0
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(m.passed for m in self.measurements)

    def add(self, quantity: str, value: float, limit: float, kind: str = "<"):
        self.measurements.append(Measurement(quantity, float(value), float(limit), kind))


def _mixed_error(got, want):
    got = np.asarray(got, dtype=float)
    want = np.asarray(want, dtype=float)
    scale = np.maximum(np.abs(want), 1.0)
    return float(np.max(np.abs(got - want) / scale))


def check_airy() -> Check:
    import mpmath

    c = Check(1, "Airy substrate")
    x = np.linspace(-20.0, 30.0, 1000)
    start = time.perf_counter()
    values = airy.airy_eval(x)
    elapsed = time.perf_counter() - start
    with mpmath.workdps(30):
        ref = {
            "Ai": [float(mpmath.airyai(t)) for t in x],
            "Ai'": [float(mpmath.airyai(t, 1)) for t in x],
            "Bi": [float(mpmath.airybi(t)) for t in x],
            "Bi'": [float(mpmath.airybi(t, 1)) for t in x],
        }
    got = {"Ai": values.ai, "Ai'": values.ai_prime, "Bi": values.bi, "Bi'": values.bi_prime}
    for name in ref:
        c.add(f"max error {name} on 1000 points in [-20, 30]", _mixed_error(got[name], ref[name]), 1e-10)
    wide = np.linspace(airy.AIRY_MIN, airy.AIRY_MAX, 4001)
    w = airy.airy_eval(wide).wronskian
    c.add("max |W - 1/pi| over the full range", np.max(np.abs(w - airy.WRONSKIAN)), 1e-10)
    c.add("airy_eval runtime on 1000 points (s)", elapsed, 1.0)
    c.seconds = elapsed
    return c


def check_zeros() -> Check:
    import mpmath

    c = Check(2, "Airy zeros and the WKB ground-state energy")
    start = time.perf_counter()
    got = np.array([airy.airy_zero(n).a_n for n in range(1, 11)])
    with mpmath.workdps(30):
        want = np.array([-float(mpmath.airyaizero(n)) for n in range(1, 11)])
    c.add("max |a_n - reference|, n = 1..10", np.max(np.abs(got - want)), 1e-9)
    c.add("|a_1 - 2.33810741|", abs(got[0] - 2.33810741), 1e-8)
    wkb = (9.0 * math.pi / 8.0) ** (2.0 / 3.0)
    c.add("|PAPER_S1 - (9 pi/8)^(2/3)|", abs(bouncer.PAPER_S1 - wkb), 1e-15)
    c.add("|PAPER_S1 - 2.32025|", abs(bouncer.PAPER_S1 - 2.32025), 5e-6)
    c.seconds = time.perf_counter() - start
    c.notes.append(f"a_1 = {got[0]!r}; WKB S_1 = {bouncer.PAPER_S1!r}; offset {got[0] - bouncer.PAPER_S1:.6f}")
    return c


def check_modes() -> Check:
    c = Check(3, "Bouncer eigenmodes (exact constants)")
    start = time.perf_counter()
    worst = 0.0
    for n in range(1, 6):
        mode = bouncer.eigenmode(n, "exact")
        worst = max(worst, abs(bouncer.normalization_integral(mode).value - 1.0))
    c.add("max |int psi_n^2 - 1|, n = 1..5", worst, 1e-8)
    grid = np.linspace(0.1, 15.0, 300)
    residual = 0.0
    for n in range(1, 6):
        mode = bouncer.eigenmode(n, "exact")
        d2 = derivative(lambda t: bouncer.psi(mode, t), grid, 2, 1e-4)
        residual = max(residual, float(np.max(np.abs(-d2 + (grid - mode.S) * bouncer.psi(mode, grid)))))
    c.add("max |-psi'' + (s - S_n) psi| on [0.1, 15], n = 1..5", residual, 1e-6)
    c.seconds = time.perf_counter() - start
    return c


def check_ermakov() -> Check:
    c = Check(4, "Ermakov-Lewis invariant and Pinney function")
    start = time.perf_counter()
    s12 = np.linspace(0.0, 12.0, 601)
    s10 = np.linspace(0.0, 10.0, 501)
    for conv in ("paper", "exact"):
        pf = ermakov.pinney(conv)
        mode = bouncer.eigenmode(1, conv)
        c.add(f"[{conv}] max |MP residual| on [0, 12], h^2 = N^4/pi^2",
              np.max(np.abs(ermakov.mp_residual(pf, s12))), 1e-6)
        inv = ermakov.lewis_invariant(pf, mode, s10)
        c.add(f"[{conv}] invariant relative spread on [0, 10]",
              (inv.max() - inv.min()) / abs(inv.mean()), 1e-8)
        eps = max(max(abs(r) for r in ermakov.epsilon_system_residual(pf, s, scaled=True))
                  for s in np.linspace(0.0, 10.0, 101))
        c.add(f"[{conv}] max scaled epsilon-system residual on [0, 10]", eps, 1e-6)
    pf = ermakov.pinney("paper")
    drift = ermakov.paper_unit_drift(pf, bouncer.eigenmode(1, "paper"), s10)
    c.add("[paper, h^2 = 1] invariant relative spread (must be large)", drift["relative_spread"], 1e-3, ">")
    elapsed = time.perf_counter() - start
    c.add("runtime (s)", elapsed, 5.0)
    c.seconds = elapsed
    return c


def check_angles() -> Check:
    c = Check(5, "Lewis angles")
    start = time.perf_counter()
    pf = ermakov.pinney("paper")
    T = np.linspace(0.0, 12.0, 1201)
    rows = ermakov.lewis_angle_series(pf, T)
    dyn = np.array([r.dynamical for r in rows])
    geo = np.array([r.geometric for r in rows])
    tot = np.array([r.total for r in rows])
    scale = np.maximum(1.0, np.abs(dyn) + np.abs(geo))
    c.add("max |dyn + geo - total| / max(1, |dyn| + |geo|)", np.max(np.abs(dyn + geo - tot) / scale), 1e-10)
    c.add("min total(T_i+1) - total(T_i) (nondecreasing)", np.min(np.diff(tot)), 0.0, ">=")
    h = 2e-4
    probes = np.linspace(0.5, 11.5, 23)
    edges = np.sort(np.concatenate([probes - h, probes + h]))
    totals = np.array([r.total for r in ermakov.lewis_angle_series(pf, edges)]).reshape(-1, 2)
    slope = (totals[:, 1] - totals[:, 0]) / (2 * h)
    c.add("max |d total/dT - 1/rho^2| at 23 probes", np.max(np.abs(slope - ermakov.angle_rate(pf, probes))), 1e-6)
    c.seconds = time.perf_counter() - start
    c.notes.append(
        f"total angle at T = 12: {tot[-1]:.6f}; dynamical {dyn[-1]:.4e}, geometric {geo[-1]:.4e}. "
        "The two parts grow like Bi^2, so additivity is judged relative to their size."
    )
    return c


def susy_series(lam: float, grid: np.ndarray, convention: str = "exact") -> SampledSeries:
    pot = susy.isospectral_potential(lam, convention)
    return SampledSeries(
        f"susy lambda={lam!r} convention={convention}",
        grid,
        [
            ("I0", pot.i0(grid)),
            ("V", susy.family_potential(pot, grid)),
            ("psi1", bouncer.psi(pot.mode, grid)),
            ("phi1", susy.deformed_ground_state(pot, grid)),
        ],
    )


def check_susy(data_dir: Optional[Path] = None) -> Check:
    c = Check(6, "Supersymmetric deformation")
    start = time.perf_counter()
    grid = np.linspace(0.2, 10.0, 99)
    pot = susy.isospectral_potential(1.0, "exact")
    c.add("max relative Bernoulli residual on [0.2, 10]",
          max(abs(susy.bernoulli_residual(pot, s)) for s in grid), 1e-6)
    c.add("max |(w_g^2 + w_g') - (w_p^2 + w_p')| on [0.2, 10]",
          max(abs(susy.riccati_residual(pot, s)) for s in grid), 1e-6)
    c.add("max |V algebraic - V log form| on [0.2, 10]",
          max(abs(susy.family_potential(pot, s) - susy.family_potential_log_form(pot, s)) for s in grid), 1e-6)
    for lam in (0.5, 1.0, 5.0):
        p = susy.isospectral_potential(lam, "exact")
        norm = integrate_to_infinity(lambda s: susy.deformed_ground_state(p, s) ** 2, 0.0, 1e-12).value
        c.add(f"|int phi_1^2 - 1|, lambda = {lam:g}", abs(norm - 1.0), 1e-8)
    c.add("max |Schroedinger residual of phi_1| on [0.2, 10]",
          max(abs(susy.schrodinger_residual(pot, s)) for s in grid), 1e-5)
    if data_dir is not None:
        data_dir.mkdir(parents=True, exist_ok=True)
        series = susy_series(1.0, np.linspace(0.0, 12.0, 1201))
        path = data_dir / "susy_lambda1.csv"
        path.write_text(series.to_csv())
        back = SampledSeries.from_csv(path.read_text(), series.name)
        c.add("susy_lambda1.csv round-trip mismatches", 0.0 if back == series else 1.0, 0.5)
        c.notes.append(f"Figure data for lambda = 1 written to {path}")
    c.seconds = time.perf_counter() - start
    return c


def check_spectra() -> Check:
    c = Check(7, "Strict isospectrality")
    start = time.perf_counter()
    cmp = spectra.compare_spectra(1.0, 40.0, 4000, 6)
    c.add("max |E_n(V_QBB) - E_n(V(s;1))|, n = 1..6", cmp.max_pairwise_gap, 5e-4)
    c.add("max |E_n(V_QBB) - a_n|, n = 1..6", cmp.max_reference_gap, 5e-4)
    c.add("max |E_n(V(s;1)) - a_n|, n = 1..6",
          float(np.max(np.abs(cmp.eigenvalues_lambda - cmp.airy_reference))), 5e-4)
    ratio = spectra.richardson_ratio()
    c.add("|Richardson ratio - 4|", abs(ratio - 4.0), 0.1)
    c.add("pairwise gap at lambda = 1e6", spectra.compare_spectra(1e6).max_pairwise_gap, 1e-8)
    elapsed = time.perf_counter() - start
    c.add("runtime (s)", elapsed, 30.0)
    c.seconds = elapsed
    c.notes.append("E(V_QBB) = " + ", ".join(f"{v:.6f}" for v in cmp.eigenvalues_qbb))
    c.notes.append("E(V(s;1)) = " + ", ".join(f"{v:.6f}" for v in cmp.eigenvalues_lambda))
    c.notes.append(f"Richardson ratio = {ratio:.5f}")
    return c


CHECKS: dict = {
    1: check_airy,
    2: check_zeros,
    3: check_modes,
    4: check_ermakov,
    5: check_angles,
    6: check_susy,
    7: check_spectra,
}


def run_all(data_dir: Optional[Path] = None, progress: Optional[Callable[[Check], None]] = None) -> list:
    results = []
    for number, fn in CHECKS.items():
        check = fn(data_dir) if number == 6 else fn()
        if progress is not None:
            progress(check)
        results.append(check)
    return results


def _convention_table() -> list:
    lines = [
        "| convention | S_1 | N_1 | h^2 = N^4/pi^2 | invariant constant | spread (consistent h^2) | mean with h^2 = 1 | spread with h^2 = 1 |",
        "|---|---|---|---|---|---|---|---|",
    ]
    grid = np.linspace(0.0, 10.0, 501)
    for conv in ("paper", "exact"):
        pf = ermakov.pinney(conv)
        mode = bouncer.eigenmode(1, conv)
        inv = ermakov.lewis_invariant(pf, mode, grid)
        drift = ermakov.paper_unit_drift(pf, mode, grid)
        lines.append(
            f"| {conv} | {mode.S:.10f} | {mode.N:.10f} | {pf.h_squared:.8f} | "
            f"{ermakov.invariant_constant(pf, mode):.8f} | {(inv.max() - inv.min()) / inv.mean():.2e} | "
            f"{drift['mean']:.6f} | {drift['relative_spread']:.4f} |"
        )
    return lines


def _unit_strength_section() -> list:
    pf = ermakov.pinney("paper")
    mode = bouncer.eigenmode(1, "paper")
    grid = np.linspace(0.0, 10.0, 501)
    drift = ermakov.paper_unit_drift(pf, mode, grid)
    samples = [0.0, 1.0, 2.0, 4.0, 6.0, 8.0, 10.0]
    values = ermakov.lewis_invariant(pf, mode, np.array(samples), h_squared_test=1.0)
    lines = [
        "## Unit-strength invariant",
        "",
        "With the WKB constants and h^2 = 1 the invariant "
        "1/2 (rho psi' - rho' psi)^2 + 1/2 (psi/rho)^2 is not conserved. "
        f"The Pinney function built from the Airy pair solves the auxiliary equation only for "
        f"h^2 = N_1^4/pi^2 = {pf.h_squared:.6f}.",
        "",
        f"- mean {drift['mean']:.6f}, min {drift['min']:.6f}, max {drift['max']:.6f} on [0, 10]",
        f"- relative spread {drift['relative_spread']:.4f}",
        f"- claimed constant 0.5; mean offset {drift['mean'] - 0.5:+.6f}, "
        f"worst offset {max(abs(drift['min'] - 0.5), abs(drift['max'] - 0.5)):.6f}",
        f"- with the consistent h^2 the invariant equals {ermakov.invariant_constant(pf, mode):.8f} "
        "(= h^2), not 0.5",
        "",
        "| s | I(s) with h^2 = 1 |",
        "|---|---|",
    ]
    lines += [f"| {s:g} | {v:.8f} |" for s, v in zip(samples, values)]
    return lines


def render_report(checks: list) -> str:
    lines = ["# VALIDATION", ""]
    overall = all(c.passed for c in checks)
    lines.append(f"Overall: {'PASS' if overall else 'FAIL'} ({sum(c.passed for c in checks)}/{len(checks)} criteria)")
    lines.append("")
    for c in checks:
        lines.append(f"## {c.number}. {c.title}: {'PASS' if c.passed else 'FAIL'}")
        lines.append("")
        lines.append("| quantity | measured | limit | result |")
        lines.append("|---|---|---|---|")
        for m in c.measurements:
            lines.append(f"| {m.quantity} | {m.value:.3e} | {m.kind} {m.limit:.1e} | {'pass' if m.passed else 'FAIL'} |")
        lines.append("")
        for note in c.notes:
            lines.append(f"- {note}")
        if c.notes:
            lines.append("")
    lines.append("## Conventions")
    lines.append("")
    lines += _convention_table()
    lines.append("")
    lines += _unit_strength_section()
    lines.append("")
    return "\n".join(lines)


def write_report(path: Path, checks: list) -> str:
    text = render_report(checks)
    Path(path).write_text(text)
    return text
