"""System-detector premeasurement, which-path decoherence and the coherence ledger."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .hilbert import (
    ALGEBRA_TOL,
    ShapeError,
    StateVector,
    apply_unitary,
    born_probabilities,
    l1_coherence,
    partial_trace,
    purity,
)
from .optics import SQRT_HALF, beam_splitter_unitary, phase_shifter_unitary

DETECTOR = "D"


class ModelError(ValueError):
    """Detector parameters outside their physical range."""


@dataclass(frozen=True)
class DetectorModel:
    """Which-path detector described by the overlap of its two pointer states.

    ``overlap = 0`` is an ideal which-path detector, ``|overlap| = 1`` records nothing.
    """

    overlap: complex = 0j

    def __post_init__(self):
        c = complex(self.overlap)
        if not cmath.isfinite(c):
            raise ModelError("overlap must be finite")
        if abs(c) > 1 + ALGEBRA_TOL:
            raise ModelError(f"|overlap| = {abs(c)!r} exceeds 1")
        object.__setattr__(self, "overlap", c)

    def pointer_states(self) -> tuple[np.ndarray, np.ndarray]:
        c = self.overlap
        d1 = np.array([1.0, 0.0], dtype=np.complex128)
        d2 = np.array([c, math.sqrt(max(0.0, 1.0 - abs(c) ** 2))], dtype=np.complex128)
        return d1, d2


@dataclass(frozen=True)
class CoherenceLedger:
    global_purity: float
    local_purity_a: float
    local_purity_b: float
    local_l1_a: float
    local_l1_b: float
    correlation_visibility: float


def equal_superposition(label: str = "S") -> StateVector:
    return StateVector((label,), (2,), [SQRT_HALF, SQRT_HALF])


def premeasure(system: StateVector, det: DetectorModel) -> StateVector:
    """Couple a two-path system to a detector: a|1>|d1> + b|2>|d2>."""
    if system.dims != (2,):
        raise ShapeError(f"system must be a single two-dimensional subsystem, got dims {system.dims}")
    label = system.labels[0]
    if label == DETECTOR:
        raise ShapeError(f"system label {DETECTOR!r} is reserved for the detector")
    alpha, beta = system.amplitudes
    d1, d2 = det.pointer_states()
    joint = np.concatenate([alpha * d1, beta * d2])
    return StateVector((label, DETECTOR), (2, 2), joint)


def reduced_visibility(joint: StateVector, subsystem: str) -> float:
    """Largest fringe contrast the subsystem could show on its own: 2|rho_12|."""
    rho = partial_trace(joint, subsystem)
    if rho.dim != 2:
        raise ShapeError(f"subsystem {subsystem!r} has dimension {rho.dim}, expected 2")
    return min(1.0, 2.0 * abs(rho.entries[0, 1]))


def fringe_scan(system: StateVector, det: DetectorModel, phase_grid: Sequence[float]) -> list[tuple[float, float]]:
    """Probability of system port 1 after a phase on path 1 and a beam splitter.

    The detector is left untouched, so the pattern has visibility ``|overlap|``.
    """
    joint = premeasure(system, det)
    label = system.labels[0]
    bs = beam_splitter_unitary()
    rows = []
    for phi in phase_grid:
        v = apply_unitary(phase_shifter_unitary(float(phi), 1), joint, label)
        v = apply_unitary(bs, v, label)
        p = born_probabilities(v).reshape(2, 2)
        rows.append((float(phi), float(p[0].sum())))
    return rows


def cosine_fit(phases: Sequence[float], values: Sequence[float]) -> tuple[float, float, float]:
    """Project ``values`` onto span{1, cos, sin} over the sample phases.

    Returns (mean, amplitude, phase) with values ~ mean + amplitude * cos(phase_grid + phase).
    Exact whenever the data lie in that span and the grid has three distinct phases mod 2 pi.
    """
    x = np.asarray(phases, dtype=float)
    y = np.asarray(values, dtype=float)
    design = np.column_stack([np.ones_like(x), np.cos(x), np.sin(x)])
    (mean, a, b), *_ = np.linalg.lstsq(design, y, rcond=None)
    return float(mean), float(math.hypot(a, b)), float(math.atan2(-b, a))


def fringe_visibility(scan: Sequence[tuple[float, float]]) -> float:
    """(max - min) / (max + min) of the sinusoid underlying a fringe scan."""
    phases, probs = zip(*scan)
    mean, amp, _ = cosine_fit(phases, probs)
    return amp / mean


def _default_correlation_sweep(joint: StateVector, points: int = 24) -> list[tuple[float, float]]:
    # analyze both subsystems with a phase on A's path 1 and a beam splitter at each side
    a, b = joint.labels
    bs = beam_splitter_unitary()
    rows = []
    for k in range(points):
        phi = 2 * math.pi * k / points
        v = apply_unitary(phase_shifter_unitary(phi, 1), joint, a)
        v = apply_unitary(bs, v, a)
        v = apply_unitary(bs, v, b)
        p = born_probabilities(v)
        rows.append((phi, float(p[0] + p[3] - p[1] - p[2])))
    return rows


def coherence_ledger(joint: StateVector, correlation_law=None) -> CoherenceLedger:
    """Where the coherence sits: globally, locally, and in the correlations.

    ``correlation_law`` is an optional sweep, either ``(delta, degree)`` pairs or
    objects with ``delta`` and ``degree`` attributes. Without one, the joint
    state is swept through a pair of analyzers.
    """
    if len(joint.dims) != 2:
        raise ShapeError(f"ledger needs a bipartite state, got {len(joint.dims)} subsystems")
    a, b = joint.labels
    rho_a = partial_trace(joint, a)
    rho_b = partial_trace(joint, b)
    if correlation_law is None:
        if joint.dims != (2, 2):
            raise ShapeError("default correlation sweep needs two two-path subsystems")
        sweep = _default_correlation_sweep(joint)
    else:
        sweep = [(r.delta, r.degree) if hasattr(r, "degree") else tuple(r) for r in correlation_law]
    phases, degrees = zip(*sweep)
    _, amp, _ = cosine_fit(phases, degrees)
    return CoherenceLedger(
        global_purity=purity(joint.density_matrix()),
        local_purity_a=purity(rho_a),
        local_purity_b=purity(rho_b),
        local_l1_a=l1_coherence(rho_a),
        local_l1_b=l1_coherence(rho_b),
        correlation_visibility=amp,
    )
