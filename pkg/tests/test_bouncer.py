import math
import threading

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from qbounce import bouncer
from qbounce.bouncer import Convention
from qbounce.numerics import derivative, integrate

A1 = 2.338107410459767
N1_EXACT = 1.4261046287334949  # 1/|Ai'(-a_1)| from the series oracle
PSI_AT_S1 = 0.5063071509796607  # N_1 Ai(0)
PAPER_PSI0 = 0.01797981460967258  # (8 pi^2/9)^{1/6} Ai(-(9 pi/8)^{2/3}) from the series oracle


def test_frozen_values_match_oracle():
    aip = oracles.airy(-A1)[1]
    assert 1.0 / abs(aip) == pytest.approx(N1_EXACT, rel=1e-15)
    s1 = (9 * math.pi / 8) ** (2 / 3)
    assert (8 * math.pi ** 2 / 9) ** (1 / 6) * oracles.ai(-s1) == pytest.approx(PAPER_PSI0, rel=1e-14)


# ---------------------------------------------------------------- scaling


def test_unit_scaling():
    sc = bouncer.make_scaling(1.0, 1.0, math.sqrt(2.0))
    assert sc.length_unit == pytest.approx(1.0, rel=1e-15)
    assert sc.energy_unit == pytest.approx(1.0, rel=1e-15)


def test_scaling_heavier_mass():
    assert bouncer.make_scaling(2.0, 1.0, math.sqrt(2.0)).length_unit == pytest.approx(0.25 ** (1 / 3), rel=1e-14)
    assert 0.25 ** (1 / 3) == pytest.approx(0.62996, abs=1e-5)


def test_scaling_neutron():
    sc = bouncer.make_scaling(1.67492749804e-27, 9.80665, 1.054571817e-34)
    assert sc.length_unit == pytest.approx(5.87e-6, rel=1e-2)
    assert sc.to_dimensionless_height(sc.length_unit * 3.0) == pytest.approx(3.0)
    assert sc.to_dimensionless_energy(sc.energy_unit * A1) == pytest.approx(A1)


@pytest.mark.parametrize("args", [(0.0, 1.0, 1.0), (1.0, -1.0, 1.0), (1.0, 1.0, math.nan)])
def test_scaling_rejects_nonpositive(args):
    with pytest.raises(ValueError):
        bouncer.make_scaling(*args)


@settings(max_examples=50, deadline=None)
@given(*(st.floats(1e-3, 1e3),) * 3)
def test_scaling_invariants(m, g, hbar):
    sc = bouncer.make_scaling(m, g, hbar)
    assert sc.length_unit == pytest.approx((hbar ** 2 / (2 * m * m * g)) ** (1 / 3), rel=1e-13)
    assert sc.energy_unit == pytest.approx(m * g * sc.length_unit, rel=1e-13)


# ---------------------------------------------------------------- eigenmodes


def test_exact_ground_state_constants():
    m = bouncer.eigenmode(1, "exact")
    assert m.S == pytest.approx(2.33810741, abs=1e-8)
    assert m.N == pytest.approx(1.42610, abs=1e-5)
    assert m.N == pytest.approx(N1_EXACT, rel=1e-12)
    assert m.convention is Convention.EXACT


def test_paper_ground_state_constants():
    m = bouncer.eigenmode(1, Convention.PAPER)
    assert m.S == pytest.approx(2.32025, abs=5e-6)
    assert m.S == (9 * math.pi / 8) ** (2 / 3)
    assert m.N == (8 * math.pi ** 2 / 9) ** (1 / 6)
    assert m.N == pytest.approx(1.43612, abs=1e-5)


def test_third_exact_mode():
    assert bouncer.eigenmode(3).S == pytest.approx(5.52055983, abs=1e-8)


@pytest.mark.parametrize("n, conv", [(2, "paper"), (0, "exact"), (-1, "exact"), (1.0, "exact"), (1, "wkb")])
def test_eigenmode_rejects(n, conv):
    with pytest.raises(ValueError):
        bouncer.eigenmode(n, conv)


def test_psi_spot_values():
    exact = bouncer.eigenmode(1)
    assert bouncer.psi(exact, exact.S) == pytest.approx(PSI_AT_S1, rel=1e-13)
    assert bouncer.psi(exact, exact.S) == pytest.approx(0.50630, abs=1e-5)
    assert abs(bouncer.psi(exact, 0.0)) < 1e-9
    paper = bouncer.eigenmode(1, "paper")
    assert bouncer.psi(paper, 0.0) == pytest.approx(PAPER_PSI0, rel=1e-12)
    assert bouncer.psi(paper, 0.0) == pytest.approx(0.01794, abs=1e-4)


def test_psi_rejects_negative_height():
    m = bouncer.eigenmode(1)
    for f in (bouncer.psi, bouncer.psi_prime):
        with pytest.raises(ValueError):
            f(m, -0.1)


def test_normalization_exact_modes():
    for n in range(1, 6):
        assert abs(bouncer.normalization_integral(bouncer.eigenmode(n)).value - 1.0) < 1e-8


def test_node_count():
    s = np.linspace(0.0, 30.0, 30001)
    for n in range(1, 6):
        m = bouncer.eigenmode(n)
        assert bouncer.count_nodes(bouncer.psi(m, s[1:])) == n - 1


def test_schrodinger_residual():
    s = np.linspace(0.1, 15.0, 200)
    for n in range(1, 6):
        m = bouncer.eigenmode(n)
        d2 = derivative(lambda t: bouncer.psi(m, t), s, 2)
        assert np.max(np.abs(d2 - (s - m.S) * bouncer.psi(m, s))) < 1e-6


# ---------------------------------------------------------------- I0


def test_i0_spot_values():
    m = bouncer.eigenmode(1)
    assert bouncer.cumulative_I0(m, 0.0) == 0.0
    assert abs(bouncer.cumulative_I0(m, 200.0) - 1.0) < 1e-8
    assert abs(bouncer.cumulative_I0(m, 200.0, tol=1e-12) - 1.0) < 1e-8
    assert bouncer.cumulative_I0(m, 4.0) >= bouncer.cumulative_I0(m, 2.0)


def test_i0_cache_against_direct_quadrature():
    m = bouncer.eigenmode(1)
    off_grid = np.linspace(0.0037, 14.0, 157)
    cached = bouncer.cumulative_I0(m, off_grid)
    direct = bouncer.cumulative_I0(m, off_grid, tol=1e-13)
    assert np.max(np.abs(cached - direct)) < 1e-8


def test_i0_against_simpson_oracle():
    m = bouncer.eigenmode(1)
    want = oracles.richardson_simpson(lambda s: (N1_EXACT * oracles.ai(s - A1)) ** 2, 0.0, 3.0, 200)
    assert bouncer.cumulative_I0(m, 3.0) == pytest.approx(want, abs=1e-9)


def test_i0_paper_limit_is_recorded_not_one():
    m = bouncer.eigenmode(1, "paper")
    limit = bouncer.i0_table(m).limit
    direct = integrate(lambda s: bouncer.psi(m, s) ** 2, 0.0, m.S + 30.0).value
    assert limit == pytest.approx(direct, abs=1e-10)
    assert limit == pytest.approx(1.01409538, abs=1e-7)
    assert abs(limit - 1.0) > 1e-3


def test_i0_rejects_excited_modes_and_negative_s():
    with pytest.raises(ValueError):
        bouncer.cumulative_I0(bouncer.eigenmode(2), 1.0)
    with pytest.raises(ValueError):
        bouncer.cumulative_I0(bouncer.eigenmode(1), -1.0)


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 60), st.floats(0, 60))
def test_i0_monotone_and_bounded(a, b):
    m = bouncer.eigenmode(1)
    lo, hi = sorted((a, b))
    table = bouncer.i0_table(m)
    assert bouncer.cumulative_I0(m, lo) <= bouncer.cumulative_I0(m, hi) <= table.limit
    assert table.precise(lo) <= table.precise(hi) + 1e-15


def test_i0_table_built_once_under_threads():
    m = bouncer.eigenmode(1, "paper")
    tables = []
    threads = [threading.Thread(target=lambda: tables.append(bouncer.i0_table(m))) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(t is tables[0] for t in tables)
