"""Beam splitters, phase shifters and the two interferometers built from them.

Path labels follow the optics convention: path/port 1 is basis index 0 and
path/port 2 is basis index 1.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .hilbert import (
    StateVector,
    UnitaryOperator,
    apply_unitary,
    basis_state,
    born_probabilities,
)

SQRT_HALF = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class BsConvention:
    """Phases picked up on transmission and reflection at a 50/50 splitter.

    The matrix is ``[[e^{it}, e^{ir}], [e^{ir}, -e^{i(2r - t)}]] / sqrt(2)``;
    the last entry is fixed by unitarity, so every pair of phases is legal.
    The default (t=0, r=pi/2) is the symmetric ``[[1, i], [i, 1]] / sqrt(2)``.
    """

    transmission_phase: float = 0.0
    reflection_phase: float = math.pi / 2

    def __post_init__(self):
        if not (math.isfinite(self.transmission_phase) and math.isfinite(self.reflection_phase)):
            raise ValueError("beam-splitter phases must be finite")


SYMMETRIC = BsConvention()


class Placement(enum.Enum):
    """Which arm of each station carries its phase shifter."""

    A1_B1 = (1, 1)
    A1_B2 = (1, 2)
    A2_B1 = (2, 1)
    A2_B2 = (2, 2)

    @property
    def path_a(self) -> int:
        return self.value[0]

    @property
    def path_b(self) -> int:
        return self.value[1]

    @property
    def signs(self) -> tuple[int, int]:
        """Signs (s_A, s_B) with which each shifter enters the nonlocal phase.

        A shifter on path 2 advances the |22> branch relative to |11>,
        one on path 1 retards it.
        """
        return (1 if self.path_a == 2 else -1, 1 if self.path_b == 2 else -1)

    @classmethod
    def parse(cls, text: str) -> "Placement":
        key = text.upper().replace("-", "_").replace("/", "_")
        try:
            return cls[key]
        except KeyError:
            raise ValueError(f"unknown placement {text!r}; expected one of {[p.name for p in cls]}") from None


DEFAULT_PLACEMENT = Placement.A1_B2


@dataclass(frozen=True)
class MziConfig:
    phi1: float = 0.0
    phi2: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.phi1) and math.isfinite(self.phi2)):
            raise ValueError("MZI phases must be finite")


@dataclass(frozen=True)
class RtoConfig:
    """Settings of the two-photon interferometer.

    ``w`` is the total fixed offset the apparatus adds to the nonlocal
    phase. The simulated apparatus includes a fixed path-length plate that
    makes the beam-splitter phases plus the plate add up to ``w``; the
    default ``w = 0`` is the calibrated origin.
    """

    phi_a: float = 0.0
    phi_b: float = 0.0
    w: float = 0.0
    placement: Placement = DEFAULT_PLACEMENT
    convention: BsConvention = SYMMETRIC

    def __post_init__(self):
        if not all(math.isfinite(x) for x in (self.phi_a, self.phi_b, self.w)):
            raise ValueError("RTO phases must be finite")
        if not isinstance(self.placement, Placement):
            raise ValueError(f"invalid placement {self.placement!r}")

    @property
    def delta(self) -> float:
        """Nonlocal phase set by the two shifters; phi_B - phi_A for the default placement."""
        s_a, s_b = self.placement.signs
        return s_a * self.phi_a + s_b * self.phi_b

    @classmethod
    def from_delta(cls, delta: float, w: float = 0.0, placement: Placement = DEFAULT_PLACEMENT,
                   convention: BsConvention = SYMMETRIC) -> "RtoConfig":
        """Config with phi_A = 0 and phi_B chosen so that ``delta`` is the nonlocal phase."""
        _, s_b = placement.signs
        return cls(0.0, s_b * delta, w, placement, convention)


@dataclass(frozen=True)
class PortLabel:
    station: str
    port: int

    def __post_init__(self):
        if self.station not in ("A", "B") or self.port not in (1, 2):
            raise ValueError(f"no detector {self.port}{self.station}")

    def __str__(self) -> str:
        return f"{self.port}{self.station}"


# Born-distribution order of build_rto_state: (1A,1B), (1A,2B), (2A,1B), (2A,2B)
RTO_PORTS = tuple(
    (PortLabel("A", a), PortLabel("B", b)) for a in (1, 2) for b in (1, 2)
)


def beam_splitter_unitary(conv: BsConvention = SYMMETRIC) -> UnitaryOperator:
    t, r = conv.transmission_phase, conv.reflection_phase
    m = SQRT_HALF * np.array(
        [[np.exp(1j * t), np.exp(1j * r)],
         [np.exp(1j * r), -np.exp(1j * (2 * r - t))]]
    )
    return UnitaryOperator(m)


def phase_shifter_unitary(phi: float, path: int) -> UnitaryOperator:
    if path not in (1, 2):
        raise ValueError(f"path must be 1 or 2, got {path!r}")
    if not math.isfinite(phi):
        raise ValueError("phase must be finite")
    diag = [1.0 + 0j, 1.0 + 0j]
    diag[path - 1] = np.exp(1j * phi)
    return UnitaryOperator(np.diag(diag))


def path_state(label: str, path: int) -> StateVector:
    """Single-photon state ``|path>`` on a two-path subsystem."""
    return basis_state(label, path - 1, 2)


def _mzi_output(cfg: MziConfig) -> np.ndarray:
    bs = beam_splitter_unitary()
    v = path_state("S", 1)
    v = apply_unitary(bs, v, "S")
    v = apply_unitary(phase_shifter_unitary(cfg.phi1, 1), v, "S")
    v = apply_unitary(phase_shifter_unitary(cfg.phi2, 2), v, "S")
    v = apply_unitary(bs, v, "S")
    return born_probabilities(v)


# The output port that is bright at zero path difference is detector 1D.
_PORT_1D = int(np.argmax(_mzi_output(MziConfig(0.0, 0.0))))


def mzi_probabilities(cfg: MziConfig) -> tuple[float, float]:
    """Single-photon detection probabilities (P_1D, P_2D) for the Mach-Zehnder."""
    p = _mzi_output(cfg)
    return float(p[_PORT_1D]), float(p[1 - _PORT_1D])


def _propagate_rto(phi_a, phi_b, placement, conv, plate) -> StateVector:
    # source: (|1>_A|1>_B + |2>_A|2>_B) / sqrt(2)
    src = StateVector(("A", "B"), (2, 2), [SQRT_HALF, 0, 0, SQRT_HALF])
    v = apply_unitary(phase_shifter_unitary(phi_a, placement.path_a), src, "A")
    v = apply_unitary(phase_shifter_unitary(phi_b, placement.path_b), v, "B")
    # fixed path-length plate on B's path 2 (the |22> branch)
    v = apply_unitary(phase_shifter_unitary(plate, 2), v, "B")
    bs = beam_splitter_unitary(conv)
    v = apply_unitary(bs, v, "A")
    return apply_unitary(bs, v, "B")


def _degree(p: np.ndarray) -> float:
    return float(p[0] + p[3] - p[1] - p[2])


def calibrate_offset(conv: BsConvention = SYMMETRIC, placement: Placement = DEFAULT_PLACEMENT) -> float:
    """Offset w that the beam splitters alone add to the nonlocal phase.

    Measured on the simulated apparatus with equal fixed path lengths: the
    correlation law is cos(delta + w), so its value at delta = 0 gives cos w
    and at delta = pi/2 gives -sin w. Returned in (-pi, pi].
    """
    s_a, _ = placement.signs
    c0 = _degree(born_probabilities(_propagate_rto(0.0, 0.0, placement, conv, 0.0)))
    c90 = _degree(born_probabilities(_propagate_rto(s_a * math.pi / 2, 0.0, placement, conv, 0.0)))
    w = math.atan2(-c90, c0)
    return math.pi if w <= -math.pi + 1e-15 else w


def build_rto_state(cfg: RtoConfig) -> StateVector:
    """Two-photon output state over detectors (1A/2A) x (1B/2B).

    Its Born distribution is the joint law with offset ``cfg.w`` whatever
    the beam-splitter convention and shifter placement.
    """
    plate = cfg.w - calibrate_offset(cfg.convention, cfg.placement)
    return _propagate_rto(cfg.phi_a, cfg.phi_b, cfg.placement, cfg.convention, plate)
