"""Bloch-sphere path programs and their reverse-engineered control fields.

A gate is specified as a cyclic path (theta(t), phi(t)) with phi constant
inside segments and discontinuous jumps between them.  The drive that
makes a qubit follow the path exactly is

    Omega(t) = i e^{i phi} [theta_dot + i cos(theta) sin(theta) phi_dot]
    Delta(t) = -(1/2) sin^2(theta) phi_dot

and after one cycle the qubit acquires the phase
``gamma = (1/2) \oint (1 - cos theta) d phi`` (half the enclosed solid
angle), realizing ``U(T) = exp(-i gamma n . sigma)`` with ``n`` set by the
starting point of the path.  phi jumps at the poles cost nothing in the
drive; jumps elsewhere carry an instantaneous detuning impulse which is
returned as a discrete unitary event.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .qops import ComplexOperator, HilbertSpace, StateVector

__all__ = [
    "PathSegment",
    "PathSchedule",
    "GateTarget",
    "control_fields",
    "control_hamiltonian",
    "jump_events",
    "geometric_phase",
    "schedule_phase_gate",
    "schedule_not_gate",
    "schedule_iswap",
    "schedule_target",
    "target_unitary",
    "embed_exchange_block",
    "auxiliary_states",
]

_TWO = HilbertSpace((2,))
_FOUR = HilbertSpace((2, 2))
_ANGLE_TOL = 1e-9

PROFILES = ("linear", "sine-ramp")


@dataclass(frozen=True)
class PathSegment:
    """One smooth stretch of the path: theta sweeps, phi stays fixed."""

    duration: float
    theta_start: float
    theta_end: float
    phi_value: float
    theta_profile: str = "sine-ramp"

    def __post_init__(self) -> None:
        if self.duration <= 0.0:
            raise ValueError("segment duration must be positive")
        if self.theta_profile not in PROFILES:
            raise ValueError(f"unknown theta profile {self.theta_profile!r}")
        for th in (self.theta_start, self.theta_end):
            if th < -_ANGLE_TOL or th > math.pi + _ANGLE_TOL:
                raise ValueError(f"theta {th} outside [0, pi]")

    @property
    def sweep(self) -> float:
        return self.theta_end - self.theta_start

    def theta(self, s: float) -> float:
        """Polar angle at normalized time s in [0, 1]."""
        if self.theta_profile == "linear":
            ramp = s
        else:
            ramp = s - math.sin(2.0 * math.pi * s) / (2.0 * math.pi)
        return self.theta_start + self.sweep * ramp

    def theta_dot(self, s: float) -> float:
        """d theta / dt at normalized time s."""
        if self.theta_profile == "linear":
            rate = 1.0
        else:
            rate = 1.0 - math.cos(2.0 * math.pi * s)
        return self.sweep * rate / self.duration


@dataclass(frozen=True)
class PathSchedule:
    """Ordered segments plus phi jumps at segment boundaries.

    ``phi_jumps`` holds ``(boundary, d_phi)`` pairs where boundary ``k``
    is the instant after segment ``k-1`` (so ``k`` ranges over
    ``1 .. n_segments``; ``k = n_segments`` is the final time).  The
    validator enforces theta continuity, a cyclic path, and -- unless
    ``allow_nonpole_jumps`` is set -- that jumps sit at the poles where
    the drive phase is unobservable.
    """

    segments: tuple[PathSegment, ...]
    phi_jumps: tuple[tuple[int, float], ...] = field(default_factory=tuple)
    allow_nonpole_jumps: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "segments", tuple(self.segments))
        object.__setattr__(
            self, "phi_jumps", tuple((int(k), float(d)) for k, d in self.phi_jumps)
        )
        self.validate()

    # -- structure ---------------------------------------------------------

    @property
    def total_duration(self) -> float:
        return sum(seg.duration for seg in self.segments)

    def boundary_times(self) -> np.ndarray:
        """Times of the n_segments+1 boundaries, starting at 0."""
        return np.concatenate(
            [[0.0], np.cumsum([seg.duration for seg in self.segments])]
        )

    def jumps_at(self, boundary: int) -> float:
        return sum(d for k, d in self.phi_jumps if k == boundary)

    def start_angles(self) -> tuple[float, float]:
        seg0 = self.segments[0]
        return seg0.theta_start, seg0.phi_value

    def validate(self) -> "PathSchedule":
        if not self.segments:
            raise ValueError("schedule needs at least one segment")
        n = len(self.segments)
        for k, _ in self.phi_jumps:
            if not 1 <= k <= n:
                raise ValueError(f"jump boundary {k} out of range 1..{n}")
        # theta continuity and phi bookkeeping
        phi = self.segments[0].phi_value
        for i, seg in enumerate(self.segments):
            if abs(seg.phi_value - phi) > _ANGLE_TOL:
                raise ValueError(
                    f"segment {i} starts at phi={seg.phi_value}, expected {phi} "
                    "(phi changes only through declared jumps)"
                )
            phi = seg.phi_value + self.jumps_at(i + 1)
            if i + 1 < n:
                nxt = self.segments[i + 1]
                if abs(nxt.theta_start - seg.theta_end) > _ANGLE_TOL:
                    raise ValueError(
                        f"theta discontinuity at boundary {i + 1}: "
                        f"{seg.theta_end} -> {nxt.theta_start}"
                    )
        # cyclic: theta and (mod 2pi) phi return to the start
        first, last = self.segments[0], self.segments[-1]
        if abs(last.theta_end - first.theta_start) > _ANGLE_TOL:
            raise ValueError("path is not cyclic in theta")
        if abs((phi - first.phi_value) % (2.0 * math.pi)) > _ANGLE_TOL and abs(
            (phi - first.phi_value) % (2.0 * math.pi) - 2.0 * math.pi
        ) > _ANGLE_TOL:
            raise ValueError("path is not cyclic in phi (mod 2 pi)")
        # pole placement of jumps
        if not self.allow_nonpole_jumps:
            for k, d in self.phi_jumps:
                theta_b = self.segments[k - 1].theta_end
                if abs(math.sin(theta_b)) > _ANGLE_TOL and abs(d) > _ANGLE_TOL:
                    raise ValueError(
                        f"phi jump of {d} at boundary {k} sits at theta={theta_b}, "
                        "not a pole; pass allow_nonpole_jumps=True to permit"
                    )
        return self

    # -- evaluation --------------------------------------------------------

    def locate(self, t: float) -> tuple[int, float]:
        """Segment index and normalized local time for global time t."""
        T = self.total_duration
        if t < -1e-15 or t > T * (1 + 1e-12):
            raise ValueError(f"time {t} outside schedule [0, {T}]")
        t = min(max(t, 0.0), T)
        bounds = self.boundary_times()
        idx = int(np.searchsorted(bounds, t, side="right") - 1)
        idx = min(idx, len(self.segments) - 1)
        seg = self.segments[idx]
        return idx, (t - bounds[idx]) / seg.duration

    def theta_phi(self, t: float) -> tuple[float, float]:
        idx, s = self.locate(t)
        seg = self.segments[idx]
        return seg.theta(s), seg.phi_value

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "segments": [
                {
                    "duration": seg.duration,
                    "theta_start": seg.theta_start,
                    "theta_end": seg.theta_end,
                    "phi_value": seg.phi_value,
                    "theta_profile": seg.theta_profile,
                }
                for seg in self.segments
            ],
            "phi_jumps": [[k, d] for k, d in self.phi_jumps],
            "allow_nonpole_jumps": self.allow_nonpole_jumps,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PathSchedule":
        segments = tuple(PathSegment(**seg) for seg in data["segments"])
        jumps = tuple((int(k), float(d)) for k, d in data.get("phi_jumps", []))
        return cls(segments, jumps, bool(data.get("allow_nonpole_jumps", False)))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "PathSchedule":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class GateTarget:
    """Closed-form gate label: rotation angle gamma about unit axis n."""

    gamma: float
    axis: tuple[float, float, float]
    qubit_count: int = 1

    def __post_init__(self) -> None:
        axis = tuple(float(a) for a in self.axis)
        if abs(np.linalg.norm(axis) - 1.0) > 1e-12:
            raise ValueError(f"axis {axis} is not a unit vector")
        if self.qubit_count not in (1, 2):
            raise ValueError("qubit_count must be 1 or 2")
        object.__setattr__(self, "axis", axis)


# ---------------------------------------------------------------------------
# control fields
# ---------------------------------------------------------------------------


def control_fields(schedule: PathSchedule, t: float) -> tuple[complex, float]:
    """Reverse-engineered drive ``(Omega, Delta)`` at time ``t``.

    phi is piecewise constant, so the detuning vanishes inside segments;
    the jump contributions are instantaneous and exposed separately via
    :func:`jump_events`.
    """
    idx, s = schedule.locate(t)
    seg = schedule.segments[idx]
    omega = 1j * np.exp(1j * seg.phi_value) * seg.theta_dot(s)
    return complex(omega), 0.0


def control_hamiltonian(schedule: PathSchedule, t: float) -> ComplexOperator:
    """Logical-qubit Hamiltonian ``Delta(|1><1|-|0><0|) + Omega/2 |1><0| + h.c.``."""
    omega, delta = control_fields(schedule, t)
    h = np.array(
        [[-delta, np.conj(omega) / 2.0], [omega / 2.0, delta]], dtype=complex
    )
    return ComplexOperator(_TWO, h)


def jump_events(schedule: PathSchedule) -> list[tuple[float, ComplexOperator]]:
    """Instantaneous unitaries carried by the phi jumps.

    A jump of d_phi at polar angle theta_b integrates the detuning
    impulse to ``exp(i (d_phi/2) sin^2(theta_b) (|1><1|-|0><0|))``; at the
    poles this is the identity and the event is omitted.
    """
    events = []
    bounds = schedule.boundary_times()
    for k, dphi in schedule.phi_jumps:
        theta_b = schedule.segments[k - 1].theta_end
        s2 = math.sin(theta_b) ** 2
        if abs(dphi) * s2 < 1e-15:
            continue
        half = 0.5 * dphi * s2
        u = np.diag([np.exp(-1j * half), np.exp(1j * half)])
        events.append((float(bounds[k]), ComplexOperator(_TWO, u)))
    return events


def geometric_phase(schedule: PathSchedule) -> float:
    """Cycle phase ``(1/2) \\oint (1 - cos theta) d phi`` along the traversal.

    phi only changes at the declared jumps, so the loop integral reduces
    to the jump contributions, with ``1 - cos theta`` equal to 0 at the
    north pole and 2 at the south pole.
    """
    schedule.validate()
    total = 0.0
    for k, dphi in schedule.phi_jumps:
        theta_b = schedule.segments[k - 1].theta_end
        total += 0.5 * (1.0 - math.cos(theta_b)) * dphi
    return total


# ---------------------------------------------------------------------------
# built-in gate schedules
# ---------------------------------------------------------------------------


def _duration(sweep: float, ceiling: float, profile: str) -> float:
    # sine-ramp peaks at twice the mean rate, so it needs twice the time
    # to respect the same |Omega| ceiling
    factor = 2.0 if profile == "sine-ramp" else 1.0
    return factor * abs(sweep) / ceiling


def schedule_phase_gate(
    phi0: float = 0.0,
    *,
    drive_ceiling: float = 1.0,
    profile: str = "sine-ramp",
    jump_theta: float = math.pi,
) -> PathSchedule:
    """Diagonal-phase gate: meridian out to ``jump_theta``, wedge of pi/4, back.

    The default turns at the south pole (``jump_theta = pi``), enclosing a
    lune of solid angle pi/2 and hence ``gamma = pi/4``; ``jump_theta =
    pi/2`` reproduces the half-traversal variant that turns at the
    equator (``gamma = pi/8``), whose jump carries a physical detuning
    impulse.  The target axis is z (north-pole start).
    """
    if not 0.0 < jump_theta <= math.pi:
        raise ValueError("jump_theta must lie in (0, pi]")
    wedge = math.pi / 4.0
    nonpole = abs(math.sin(jump_theta)) > _ANGLE_TOL
    dur = _duration(jump_theta, drive_ceiling, profile)
    segments = (
        PathSegment(dur, 0.0, jump_theta, phi0, profile),
        PathSegment(dur, jump_theta, 0.0, phi0 + wedge, profile),
    )
    jumps = ((1, wedge), (2, -wedge))
    return PathSchedule(segments, jumps, allow_nonpole_jumps=nonpole)


def schedule_not_gate(
    theta0: float = math.pi / 2,
    *,
    drive_ceiling: float = 1.0,
    profile: str = "sine-ramp",
) -> PathSchedule:
    """Pi rotation about the equatorial-plane axis at (theta0, phi=0).

    Meridian down to the south pole, up the phi = -pi/2 meridian through
    the north pole, and back out to the starting point; both phi changes
    sit at poles.  For theta0 = pi/2 the propagated gate is
    ``exp(-i pi sigma_x / 2)`` up to a global phase.
    """
    if not 0.0 < theta0 < math.pi:
        raise ValueError("theta0 at a pole is degenerate")
    segments = (
        PathSegment(_duration(math.pi - theta0, drive_ceiling, profile),
                    theta0, math.pi, 0.0, profile),
        PathSegment(_duration(math.pi, drive_ceiling, profile),
                    math.pi, 0.0, -math.pi / 2.0, profile),
        PathSegment(_duration(theta0, drive_ceiling, profile),
                    0.0, theta0, 0.0, profile),
    )
    jumps = ((1, -math.pi / 2.0), (2, math.pi / 2.0))
    return PathSchedule(segments, jumps)


def schedule_iswap(
    *,
    drive_ceiling: float = 1.0,
    profile: str = "sine-ramp",
    theta0: float = math.pi / 2,
) -> PathSchedule:
    """Exchange-block loop with phi in {pi, 3pi/2, pi} and gamma = pi/2.

    Driven on the {|01>, |10>} block with equal single-center detunings
    baked in (zero effective block detuning); |00> and |11> are fixed
    points.
    """
    if not 0.0 < theta0 < math.pi:
        raise ValueError("theta0 at a pole is degenerate")
    segments = (
        PathSegment(_duration(math.pi - theta0, drive_ceiling, profile),
                    theta0, math.pi, math.pi, profile),
        PathSegment(_duration(math.pi, drive_ceiling, profile),
                    math.pi, 0.0, 1.5 * math.pi, profile),
        PathSegment(_duration(theta0, drive_ceiling, profile),
                    0.0, theta0, math.pi, profile),
    )
    jumps = ((1, math.pi / 2.0), (2, -math.pi / 2.0))
    return PathSchedule(segments, jumps)


# ---------------------------------------------------------------------------
# targets
# ---------------------------------------------------------------------------


def schedule_target(schedule: PathSchedule, qubit_count: int = 1) -> GateTarget:
    """Realized gate of a schedule: gamma from the loop, axis from the start."""
    theta0, phi0 = schedule.start_angles()
    axis = (
        math.sin(theta0) * math.cos(phi0),
        math.sin(theta0) * math.sin(phi0),
        math.cos(theta0),
    )
    return GateTarget(geometric_phase(schedule), axis, qubit_count)


def _rotation_matrix(gamma: float, axis) -> np.ndarray:
    nx, ny, nz = axis
    n_dot_sigma = np.array([[nz, nx - 1j * ny], [nx + 1j * ny, -nz]], dtype=complex)
    return math.cos(gamma) * np.eye(2) - 1j * math.sin(gamma) * n_dot_sigma


def embed_exchange_block(block: np.ndarray) -> np.ndarray:
    """Embed a 2x2 block on {|01>, |10>} of the two-qubit logical space."""
    u = np.eye(4, dtype=complex)
    u[1:3, 1:3] = block
    return u


def target_unitary(target: GateTarget) -> ComplexOperator:
    """Closed-form evolution operator ``exp(-i gamma n . sigma)``.

    For two qubits the rotation acts on the {|01>, |10>} exchange block
    with |00> and |11> fixed.
    """
    block = _rotation_matrix(target.gamma, target.axis)
    if target.qubit_count == 1:
        return ComplexOperator(_TWO, block)
    return ComplexOperator(_FOUR, embed_exchange_block(block))


def auxiliary_states(theta: float, phi: float) -> tuple[StateVector, StateVector]:
    """Orthogonal moving-frame pair used by the reverse engineering."""
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    phi1 = np.array([s * np.exp(-1j * phi), -c], dtype=complex)
    phi2 = np.array([c, s * np.exp(1j * phi)], dtype=complex)
    return StateVector(_TWO, phi1), StateVector(_TWO, phi2)
