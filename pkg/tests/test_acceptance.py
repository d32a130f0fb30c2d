"""Exit criteria of the build, one test per criterion at its pinned tolerance."""

import math

import numpy as np
import pytest

from biphoton.cli import dispatch
from biphoton.correlate import (
    TSIRELSON_BOUND,
    ChshSetting,
    chsh_value,
    correlation_degree,
    correlation_sweep,
    joint_probs_analytic,
    joint_probs_from_state,
    no_signaling_scan,
    table1_report,
)
from biphoton.entangle import (
    DetectorModel,
    coherence_ledger,
    equal_superposition,
    fringe_scan,
    fringe_visibility,
    premeasure,
)
from biphoton.hilbert import born_probabilities, partial_trace
from biphoton.optics import MziConfig, RtoConfig, build_rto_state, calibrate_offset, mzi_probabilities

from test_cli import csv_rows

SWEEP_25 = np.linspace(0, 2 * np.pi, 25)
PAIR = premeasure(equal_superposition(), DetectorModel(0))


@pytest.mark.criterion(1, "apparatus-simulated degree equals cos(delta) within 1e-12 on 25 points")
def test_cosine_law_from_apparatus():
    assert calibrate_offset() == pytest.approx(math.pi, abs=1e-12)
    worst = 0.0
    for delta in SWEEP_25:
        p11, p12, p21, p22 = born_probabilities(build_rto_state(RtoConfig.from_delta(delta)))
        worst = max(worst, abs((p11 + p22 - p12 - p21) - math.cos(delta)))
    assert worst <= 1e-12


@pytest.mark.criterion(2, "joint probabilities (1 +- cos delta)/4 within 1e-12 at five phases")
def test_joint_probability_points():
    for delta in (0, math.pi / 4, math.pi / 2, 3 * math.pi / 4, math.pi):
        c = math.cos(delta)
        want = ((1 + c) / 4, (1 + c) / 4, (1 - c) / 4, (1 - c) / 4)
        for jd in (joint_probs_analytic(delta, 0), joint_probs_from_state(RtoConfig.from_delta(delta))):
            assert np.max(np.abs(np.subtract(jd.as_tuple(), want))) <= 1e-12
    assert np.max(np.abs(np.subtract(joint_probs_analytic(0, 0).as_tuple(), (0.5, 0.5, 0, 0)))) <= 1e-12


@pytest.mark.criterion(3, "reduced states are I/2 and all marginals are 1/2 on a 10x10 grid (1e-12)")
def test_local_mixedness_and_no_signaling():
    for label in "SD":
        assert np.max(np.abs(partial_trace(PAIR, label).entries - np.eye(2) / 2)) <= 1e-12
    grid = [(a, b) for a in np.linspace(0, 2 * np.pi, 10) for b in np.linspace(0, 2 * np.pi, 10)]
    assert no_signaling_scan(grid) <= 1e-12


@pytest.mark.criterion(4, "S = 2 sqrt 2 within 1e-9, S > 2, and S <= 2 sqrt 2 + 1e-9 over 10^4 random settings")
def test_bell_violation():
    s = chsh_value(ChshSetting(0, math.pi / 2, math.pi / 4, 3 * math.pi / 4))
    assert abs(s - 2 * math.sqrt(2)) <= 1e-9
    assert s > 2
    rng = np.random.default_rng(1990)
    settings = rng.uniform(-2 * np.pi, 2 * np.pi, size=(10_000, 4))
    assert max(chsh_value(ChshSetting(*row)) for row in settings) <= TSIRELSON_BOUND + 1e-9


@pytest.mark.criterion(5, "fringe visibility 1 / 0 / c for c = 1, 0, 0.25, 0.5, 0.75 (1e-12)")
def test_which_path_decoherence():
    plus = equal_superposition()
    assert abs(fringe_visibility(fringe_scan(plus, DetectorModel(1), SWEEP_25)) - 1) <= 1e-12
    flat = fringe_scan(plus, DetectorModel(0), SWEEP_25)
    assert max(abs(p - 0.5) for _, p in flat) <= 1e-12
    assert abs(fringe_visibility(flat)) <= 1e-12
    for c in (0.25, 0.5, 0.75):
        assert abs(fringe_visibility(fringe_scan(plus, DetectorModel(c), SWEEP_25)) - c) <= 1e-12


@pytest.mark.criterion(6, "ledger of the entangled pair: purities 1, 1/2, 1/2; l1 0; correlation visibility 1")
def test_coherence_ledger():
    led = coherence_ledger(PAIR, correlation_sweep(SWEEP_25))
    assert abs(led.global_purity - 1) <= 1e-10
    assert abs(led.local_purity_a - 0.5) <= 1e-10
    assert abs(led.local_purity_b - 0.5) <= 1e-10
    assert led.local_l1_a <= 1e-12 and led.local_l1_b <= 1e-12
    assert abs(led.correlation_visibility - 1) <= 1e-10


@pytest.mark.criterion(7, "Monte Carlo n=1e5 on 9 points: >= 8 within 5 std_err; byte-identical rerun")
def test_monte_carlo_convergence(tmp_path):
    argv = ["sweep", "--start", "0", "--stop", str(2 * math.pi), "--points", "9",
            "--trials", "100000", "--seed", "20240611", "--format", "csv"]
    first, second = tmp_path / "first.csv", tmp_path / "second.csv"
    assert dispatch(argv + ["-o", str(first)]) == 0
    assert dispatch(argv + ["-o", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()
    rows = csv_rows(first.read_text())
    assert len(rows) == 9
    hits = sum(
        abs(float(r["c_hat"]) - math.cos(float(r["delta_rad"]))) <= 5 * float(r["std_err"]) for r in rows
    )
    assert hits >= 8


@pytest.mark.criterion(8, "P(1D) = 1 at zero difference, P(2D) = 1 at pi; difference-only over 64 pairs")
def test_mzi_law():
    p1, _ = mzi_probabilities(MziConfig(0, 0))
    _, p2 = mzi_probabilities(MziConfig(math.pi, 0))
    assert abs(p1 - 1) <= 1e-12 and abs(p2 - 1) <= 1e-12
    grid = np.linspace(0, 2 * np.pi, 8, endpoint=False)
    for phi1 in grid:
        for phi2 in grid:
            p1d, p2d = mzi_probabilities(MziConfig(phi1, phi2))
            assert abs(p1d - 0.5 * (1 + math.cos(phi1 - phi2))) <= 1e-12
            assert abs(p1d + p2d - 1) <= 1e-12
            shifted, _ = mzi_probabilities(MziConfig(phi1 + 0.37, phi2 + 0.37))
            assert abs(shifted - p1d) <= 1e-12


@pytest.mark.criterion(9, "superposition/entanglement table follows the equations and flags the pi/4, 3pi/4 rows")
def test_table_report(capsys):
    rows = table1_report()
    for r in rows:
        law = 0.5 * (1 + math.cos(r.phase))
        assert abs(r.simple_p1 - law) <= 1e-12
        assert abs(r.p_corr - law) <= 1e-12
        assert abs(r.p_anti - (1 - law)) <= 1e-12
        assert abs(r.local_p1_a - 0.5) <= 1e-12 and abs(r.local_p1_b - 0.5) <= 1e-12
        rep = correlation_degree(joint_probs_analytic(r.phase))
        assert abs(rep.p_corr - r.p_corr) <= 1e-12
    flagged = {round(r.phase / (math.pi / 4)) for r in rows if r.flag == "mismatch"}
    assert flagged == {1, 3}
    assert dispatch(["table1", "--format", "csv"]) == 0
    emitted = csv_rows(capsys.readouterr().out)
    assert [r["flag"] for r in emitted] == ["ok", "mismatch", "ok", "mismatch", "ok"]
