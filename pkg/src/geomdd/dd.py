"""Universal dynamical-decoupling sequences and their injection into gates.

Pulses are instantaneous pi/2-area kicks ``-i sigma_axis`` on the logical
qubit (the exchange block for two-qubit gates), placed at fixed fractions
of the gate window.  The ordered product of every built-in sequence is
proportional to the identity, so a sequence alone implements no logical
gate.  ``inject`` supports two modes: ``naive`` leaves the control
untouched (the pulses then scramble the gate), while ``toggled``
conjugates the control in every inter-pulse interval by the accumulated
pulse product so the noiseless net evolution equals the bare gate
exactly.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .qops import ComplexOperator, HilbertSpace
from .geometric import embed_exchange_block

__all__ = [
    "DDPulse",
    "DDSequence",
    "InjectionPlan",
    "pulse_unitary",
    "make_sequence",
    "identity_phase",
    "inject",
    "decoupling_error",
    "SEQUENCE_LABELS",
]

logger = logging.getLogger(__name__)

_PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}

SEQUENCE_LABELS = ("none", "XY4", "XY8", "XY12", "ZXZX")

# base axis patterns and in-window fractions; XY pulses sit at odd
# multiples of 1/(2N) (symmetric CPMG-style placement), the ZXZX window
# is evolve-then-pulse four times over
_BASE = {
    "XY4": (("x", "y", "x", "y"), (1 / 8, 3 / 8, 5 / 8, 7 / 8)),
    "XY8": (
        ("x", "y", "x", "y", "y", "x", "y", "x"),
        tuple((2 * k + 1) / 16 for k in range(8)),
    ),
    "XY12": (
        ("x", "y", "x", "y") * 3,
        tuple((2 * k + 1) / 24 for k in range(12)),
    ),
    "ZXZX": (("x", "z", "x", "z"), (1 / 4, 1 / 2, 3 / 4, 1.0)),
}


@dataclass(frozen=True)
class DDPulse:
    """One instantaneous pulse at a fraction of the gate window."""

    time_fraction: float
    axis: str

    def __post_init__(self) -> None:
        if not 0.0 < self.time_fraction <= 1.0:
            raise ValueError(f"time fraction {self.time_fraction} outside (0, 1]")
        if self.axis not in _PAULI:
            raise ValueError(f"axis must be one of x/y/z, got {self.axis!r}")


@dataclass(frozen=True)
class DDSequence:
    """Ordered pulse list; the ideal net effect is proportional to identity."""

    pulses: tuple[DDPulse, ...]
    label: str = "none"

    def __post_init__(self) -> None:
        object.__setattr__(self, "pulses", tuple(self.pulses))
        fracs = [p.time_fraction for p in self.pulses]
        if any(b <= a for a, b in zip(fracs, fracs[1:])):
            raise ValueError("pulse time fractions must be strictly increasing")
        if self.pulses:
            identity_phase(self)  # raises when the product is not ~ identity

    def __len__(self) -> int:
        return len(self.pulses)


def pulse_unitary(axis: str, qubit_count: int = 1) -> ComplexOperator:
    """Instantaneous pulse ``-i sigma_axis`` on the logical qubit.

    For two-qubit gates the kick acts on the {|01>, |10>} exchange block
    and leaves |00>, |11> (and any environment or phonon factor, which
    are tensored on by the caller) untouched.
    """
    if axis not in _PAULI:
        raise ValueError(f"axis must be one of x/y/z, got {axis!r}")
    block = -1j * _PAULI[axis]
    if qubit_count == 1:
        return ComplexOperator(HilbertSpace((2,)), block)
    if qubit_count == 2:
        return ComplexOperator(HilbertSpace((2, 2)), embed_exchange_block(block))
    raise ValueError("qubit_count must be 1 or 2")


def identity_phase(seq: DDSequence, tol: float = 1e-12) -> complex:
    """Scalar c with ``product of pulses = c * identity``; raises otherwise."""
    prod = np.eye(2, dtype=complex)
    for pulse in seq.pulses:
        prod = (-1j * _PAULI[pulse.axis]) @ prod
    c = prod[0, 0]
    if abs(abs(c) - 1.0) > tol or np.max(np.abs(prod - c * np.eye(2))) > tol:
        raise ValueError(
            f"pulse product of sequence {seq.label!r} is not proportional to identity"
        )
    return complex(c)


def make_sequence(label: str, periods: int = 1) -> DDSequence:
    """Build a named sequence, optionally repeated over ``periods`` windows."""
    if periods < 1:
        raise ValueError("periods must be >= 1")
    if label == "none":
        return DDSequence((), "none")
    if label not in _BASE:
        raise ValueError(f"unknown sequence label {label!r}; choose from {SEQUENCE_LABELS}")
    axes, fracs = _BASE[label]
    pulses = tuple(
        DDPulse((j + f) / periods, ax)
        for j in range(periods)
        for f, ax in zip(fracs, axes)
    )
    return DDSequence(pulses, label)


# ---------------------------------------------------------------------------
# injection into a gate window
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InjectionPlan:
    """Timed pulse events plus the toggling frames between them.

    ``frames[k]`` is the accumulated pulse product active in the interval
    before event ``k`` (``frames[0]`` is the identity); in ``toggled``
    mode the control Hamiltonian in that interval must be conjugated as
    ``W H W^dagger`` for the noiseless net evolution to equal the bare
    gate.  In ``naive`` mode every frame is the identity.
    """

    times: tuple[float, ...]
    axes: tuple[str, ...]
    unitaries: tuple[np.ndarray, ...] = field(repr=False)
    frames: tuple[np.ndarray, ...] = field(repr=False)
    mode: str = "toggled"

    def __len__(self) -> int:
        return len(self.times)

    def csv_rows(self):
        return [(t, ax) for t, ax in zip(self.times, self.axes)]


def inject(
    duration: float,
    seq: DDSequence,
    mode: str = "toggled",
    avoid_times=(),
    qubit_count: int = 1,
) -> InjectionPlan:
    """Place a sequence over a gate window of length ``duration``.

    Pulse times are ``fraction * duration``; a pulse colliding with one
    of ``avoid_times`` (segment boundaries, other events) is pulled back
    by ``1e-9 * duration`` and the shift is logged.
    """
    if duration <= 0.0:
        raise ValueError("gate duration must be positive")
    if mode not in ("naive", "toggled"):
        raise ValueError(f"unknown injection mode {mode!r}")
    avoid = np.asarray(sorted(set(float(t) for t in avoid_times) | {0.0, duration}))
    eps = 1e-9 * duration
    times, axes, unitaries = [], [], []
    for pulse in seq.pulses:
        t = pulse.time_fraction * duration
        if np.min(np.abs(avoid - t)) < 1e-12 * duration:
            logger.info(
                "DD pulse at t=%.6g collides with a schedule boundary; "
                "shifting by -%.3g", t, eps,
            )
            t -= eps
        times.append(t)
        axes.append(pulse.axis)
        unitaries.append(pulse_unitary(pulse.axis, qubit_count).entries)
    frames = [np.eye(2 if qubit_count == 1 else 4, dtype=complex)]
    for u in unitaries:
        nxt = u @ frames[-1] if mode == "toggled" else frames[0]
        frames.append(nxt)
    return InjectionPlan(
        tuple(times), tuple(axes), tuple(unitaries), tuple(frames), mode
    )


# ---------------------------------------------------------------------------
# error scaling of the universal window
# ---------------------------------------------------------------------------


def decoupling_error(
    tau: float,
    coupling: tuple[ComplexOperator, ComplexOperator, ComplexOperator],
    env: ComplexOperator,
) -> float:
    """Distance of the pulse-interleaved window from pure environment drift.

    The window ``Z f X f Z f X f`` with ``f = exp(-i tau (sum_a sigma_a
    (x) B_a + I (x) H_e))`` cancels the system-environment coupling to
    first order; the return value is the operator-norm distance between
    the window (with the deterministic -1 pulse-product phase divided
    out) and ``exp(-i 4 tau I (x) H_e)``.
    """
    if tau <= 0.0:
        raise ValueError("tau must be positive")
    for b in (*coupling, env):
        if b.space.total_dim != 2:
            raise ValueError("environment operators must be 2-dimensional")
    bx, by, bz = (b.entries for b in coupling)
    he = env.entries
    eye2 = np.eye(2)
    h_se = (
        np.kron(_PAULI["x"], bx)
        + np.kron(_PAULI["y"], by)
        + np.kron(_PAULI["z"], bz)
        + np.kron(eye2, he)
    )
    import scipy.linalg

    f = scipy.linalg.expm(-1j * tau * h_se)
    x = np.kron(-1j * _PAULI["x"], eye2)
    z = np.kron(-1j * _PAULI["z"], eye2)
    window = z @ f @ x @ f @ z @ f @ x @ f
    # pulse product alone: Z X Z X = -identity
    target = scipy.linalg.expm(-1j * 4.0 * tau * np.kron(eye2, he))
    return float(np.linalg.norm(-window - target, ord=2))
