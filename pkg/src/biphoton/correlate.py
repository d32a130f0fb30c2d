"""Joint detector statistics of the two-photon interferometer.

Outcomes are indexed by (port at A, port at B). "Correlated" means 11 or 22,
"anticorrelated" means 12 or 21.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .hilbert import ALGEBRA_TOL, NormalizationError, born_probabilities, partial_trace
from .optics import (
    DEFAULT_PLACEMENT,
    SYMMETRIC,
    BsConvention,
    MziConfig,
    Placement,
    RtoConfig,
    build_rto_state,
    mzi_probabilities,
)

CLASSICAL_BOUND = 2.0
TSIRELSON_BOUND = 2.0 * math.sqrt(2.0)


class InputError(ValueError):
    """Empty or otherwise unusable input grid."""


@dataclass(frozen=True)
class JointDistribution:
    p11: float
    p22: float
    p12: float
    p21: float

    def __post_init__(self):
        probs = self.as_tuple()
        if not all(math.isfinite(p) and -ALGEBRA_TOL <= p <= 1 + ALGEBRA_TOL for p in probs):
            raise ValueError(f"probabilities out of range: {probs}")
        if abs(sum(probs) - 1.0) > ALGEBRA_TOL:
            raise NormalizationError(f"joint probabilities sum to {sum(probs)!r}")

    def as_tuple(self) -> tuple[float, float, float, float]:
        """Probabilities in sampling order (11, 22, 12, 21)."""
        return (self.p11, self.p22, self.p12, self.p21)

    @property
    def marginal_1a(self) -> float:
        return self.p11 + self.p12

    @property
    def marginal_1b(self) -> float:
        return self.p11 + self.p21


@dataclass(frozen=True)
class CorrelationReport:
    delta: float | None
    p_corr: float
    p_anti: float
    degree: float


@dataclass(frozen=True)
class ChshSetting:
    a: float = 0.0
    a_prime: float = math.pi / 2
    b: float = math.pi / 4
    b_prime: float = 3 * math.pi / 4

    def __post_init__(self):
        if not all(math.isfinite(x) for x in (self.a, self.a_prime, self.b, self.b_prime)):
            raise ValueError("CHSH settings must be finite")


def joint_probs_analytic(delta: float, w: float = 0.0) -> JointDistribution:
    c = math.cos(delta + w)
    same = 0.25 * (1 + c)
    diff = 0.25 * (1 - c)
    return JointDistribution(same, same, diff, diff)


def joint_probs_from_state(cfg: RtoConfig) -> JointDistribution:
    """Born distribution of the simulated apparatus over the four detector pairs."""
    p11, p12, p21, p22 = (float(x) for x in born_probabilities(build_rto_state(cfg)))
    return JointDistribution(p11, p22, p12, p21)


def correlation_degree(jd: JointDistribution, delta: float | None = None) -> CorrelationReport:
    p_corr = jd.p11 + jd.p22
    p_anti = jd.p12 + jd.p21
    return CorrelationReport(delta, p_corr, p_anti, p_corr - p_anti)


def _checked_grid(grid: Iterable[float]) -> list[float]:
    values = [float(x) for x in grid]
    if not values:
        raise InputError("grid is empty")
    if not all(math.isfinite(x) for x in values):
        raise InputError("grid values must be finite")
    return values


def correlation_sweep(grid: Iterable[float], w: float = 0.0) -> list[CorrelationReport]:
    """Analytic degree of correlation at each nonlocal phase of ``grid``."""
    return [correlation_degree(joint_probs_analytic(d, w), d) for d in _checked_grid(grid)]


def apparatus_sweep(grid: Iterable[float], w: float = 0.0, placement: Placement = DEFAULT_PLACEMENT,
                    convention: BsConvention = SYMMETRIC) -> list[CorrelationReport]:
    """Same as :func:`correlation_sweep`, but measured on the simulated apparatus."""
    return [
        correlation_degree(joint_probs_from_state(RtoConfig.from_delta(d, w, placement, convention)), d)
        for d in _checked_grid(grid)
    ]


TABLE1_GRID = (0.0, math.pi / 4, math.pi / 2, 3 * math.pi / 4, math.pi)

# Printed percentages: P("1") of the simple superposition and P(corr) of the pair.
# The same number appears in both columns of every row.
TABLE1_PRINTED = {0: 1.00, 1: 0.71, 2: 0.50, 3: 0.29, 4: 0.00}


@dataclass(frozen=True)
class Table1Row:
    phase: float
    simple_p1: float
    local_p1_a: float
    local_p1_b: float
    p_corr: float
    p_anti: float
    paper_claim: str
    flag: str


def _printed_value(phase: float) -> float | None:
    k = phase / (math.pi / 4)
    if abs(k - round(k)) < 1e-9:
        return TABLE1_PRINTED.get(int(round(k)))
    return None


def table1_report(grid: Sequence[float] = TABLE1_GRID, tolerance: float = 0.005) -> list[Table1Row]:
    """Superposition-versus-entanglement table computed from the equations.

    Rows at phases with a printed percentage carry ``flag = "mismatch"`` when
    the computed value differs from the printed one by more than
    ``tolerance`` (half a percent, i.e. beyond rounding), ``"ok"`` otherwise;
    other phases get ``"n/a"``.
    """
    rows = []
    for phase in _checked_grid(grid):
        simple_p1, _ = mzi_probabilities(MziConfig(phase, 0.0))
        state = build_rto_state(RtoConfig.from_delta(phase))
        local_a = float(partial_trace(state, "A").entries[0, 0].real)
        local_b = float(partial_trace(state, "B").entries[0, 0].real)
        rep = correlation_degree(joint_probs_analytic(phase), phase)
        printed = _printed_value(phase)
        if printed is None:
            claim, flag = "", "n/a"
        else:
            pct = round(printed * 100)
            claim = f'{pct}% "1", {100 - pct}% "2"; {pct}% corr, {100 - pct}% anti'
            off = max(abs(simple_p1 - printed), abs(rep.p_corr - printed))
            flag = "mismatch" if off > tolerance else "ok"
        rows.append(Table1Row(phase, simple_p1, local_a, local_b, rep.p_corr, rep.p_anti, claim, flag))
    return rows


def cosine_law(delta: float) -> float:
    return math.cos(delta)


def chsh_value(s: ChshSetting = ChshSetting(), correlation_fn: Callable[[float], float] = cosine_law) -> float:
    """CHSH combination |E(a,b) - E(a,b') + E(a',b) + E(a',b')| with E(x, y) = fn(y - x)."""
    def e(x, y):
        return correlation_fn(y - x)

    return abs(e(s.a, s.b) - e(s.a, s.b_prime) + e(s.a_prime, s.b) + e(s.a_prime, s.b_prime))


def no_signaling_scan(grid: Iterable[tuple[float, float]], w: float = 0.0,
                      placement: Placement = DEFAULT_PLACEMENT,
                      convention: BsConvention = SYMMETRIC) -> float:
    """Largest deviation of P(1A) or P(1B) from 1/2 over ``(phi_A, phi_B)`` settings."""
    pairs = [tuple(map(float, pair)) for pair in grid]
    if not pairs:
        raise InputError("grid is empty")
    worst = 0.0
    for phi_a, phi_b in pairs:
        jd = joint_probs_from_state(RtoConfig(phi_a, phi_b, w, placement, convention))
        worst = max(worst, abs(jd.marginal_1a - 0.5), abs(jd.marginal_1b - 0.5))
    return worst


def marginals(pairs: Iterable[tuple[float, float]], **kwargs) -> np.ndarray:
    """Rows of (phi_A, phi_B, P(1A), P(1B)) for inspection of single-station statistics."""
    out = []
    for phi_a, phi_b in pairs:
        jd = joint_probs_from_state(RtoConfig(phi_a, phi_b, **kwargs))
        out.append((phi_a, phi_b, jd.marginal_1a, jd.marginal_1b))
    return np.array(out)
