"""Hamiltonians of driven SiV centers coupled through a phononic waveguide.

Three levels of reduction are provided: the interaction-picture
four-level + phonon model, the effective Jaynes-Cummings model on the
single-excitation logical pair, and the two-qubit exchange model for two
centers sharing one waveguide mode.  All frequencies are angular
(rad/s); SiV levels are labelled 1..4 as in the level diagram and stored
at indices 0..3.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.constants import hbar

from .qops import (
    ComplexOperator,
    HilbertSpace,
    StateVector,
    basis_ket,
    destroy,
    identity,
    outer,
    tensor,
    tensor_state,
)

__all__ = [
    "SivParams",
    "DriveParams",
    "PhononParams",
    "WaveguideParams",
    "ground_energies",
    "spin_phonon_transition",
    "raman_rabi",
    "effective_rabi",
    "build_four_level_hamiltonian",
    "build_effective_jc",
    "build_two_qubit_effective",
    "build_two_siv_exchange",
    "jc_logical_kets",
    "four_level_logical_kets",
    "two_qubit_logical_kets",
    "exchange_coupling",
    "compression_mode_frequency",
    "waveguide_coupling",
]


@dataclass(frozen=True)
class SivParams:
    """Ground-manifold constants of one SiV center (angular frequencies)."""

    lambda_so: float      # spin-orbit strength
    upsilon_x: float      # Jahn-Teller coupling along x
    upsilon_y: float      # Jahn-Teller coupling along y
    omega_b: float        # Zeeman splitting along z
    omega_x: float        # transverse Zeeman coupling

    @property
    def delta_gap(self) -> float:
        """Orbital gap sqrt(lambda_so^2 + 4(upsilon_x^2 + upsilon_y^2))."""
        return float(
            np.sqrt(self.lambda_so**2 + 4.0 * (self.upsilon_x**2 + self.upsilon_y**2))
        )

    @property
    def eta_plus(self) -> float:
        return 0.5 * self.omega_x / (self.delta_gap + self.omega_b)

    @property
    def eta_minus(self) -> float:
        return 0.5 * self.omega_x / (self.delta_gap - self.omega_b)

    def validate(self) -> "SivParams":
        if self.delta_gap <= 0.0:
            raise ValueError("orbital gap must be positive")
        if abs(self.eta_plus) >= 1.0 or abs(self.eta_minus) >= 1.0:
            raise ValueError(
                "perturbative validity violated: |eta_pm| must be < 1, got "
                f"eta_+={self.eta_plus:.3g}, eta_-={self.eta_minus:.3g}"
            )
        return self


@dataclass(frozen=True)
class DriveParams:
    """Two-laser Raman drive: complex Rabi frequencies and detunings."""

    omega_a2: complex     # Rabi frequency of the |2>-|A> laser
    omega_a3: complex     # Rabi frequency of the |3>-|A> laser
    delta1: float         # one-photon detuning
    delta: float          # two-photon detuning

    def validate(self) -> "DriveParams":
        rabi = max(abs(self.omega_a2), abs(self.omega_a3))
        if rabi > 0.0:
            ratio = abs(self.delta1) / rabi
            if ratio < 5.0:
                raise ValueError(
                    f"adiabatic-elimination condition violated: |delta1|/max Rabi "
                    f"= {ratio:.2f} < 5"
                )
            if ratio < 10.0:
                warnings.warn(
                    f"|delta1|/max Rabi = {ratio:.2f} is below 10; the "
                    "second-order reduction is marginal",
                    stacklevel=2,
                )
        return self


@dataclass(frozen=True)
class PhononParams:
    """Spin-phonon coupling and the two orbital detunings."""

    g: float              # spin-phonon coupling
    delta_big1: float     # detuning of the |1>-|3> phonon channel
    delta_big2: float     # detuning of the |2>-|4> phonon channel
    n_max: int = 2        # Fock truncation (states |0..n_max>)

    def validate(self) -> "PhononParams":
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        return self


@dataclass(frozen=True)
class WaveguideParams:
    """Mechanical and material constants of the 1D diamond waveguide (SI)."""

    length: float              # m
    cross_section: float       # m^2
    youngs_modulus: float      # Pa
    poisson_ratio: float       # dimensionless, in (0, 0.5)
    mass_density: float        # kg/m^3
    strain_sensitivity: float  # angular frequency
    coupling_profile: float = 1.0  # dimensionless mode profile at the defect

    def validate(self) -> "WaveguideParams":
        for name in ("length", "cross_section", "youngs_modulus",
                     "mass_density", "strain_sensitivity"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be strictly positive")
        if not 0.0 < self.poisson_ratio < 0.5:
            raise ValueError("poisson_ratio must lie in (0, 0.5)")
        return self


# ---------------------------------------------------------------------------
# ground energies and effective couplings
# ---------------------------------------------------------------------------


def ground_energies(p: SivParams, pattern_consistent: bool = False):
    """Approximate energies of the four ground levels.

    The third level's correction is published with the eta_+ coefficient
    although the pairing pattern of the eigenstates suggests eta_-; the
    printed form is the default and ``pattern_consistent=True`` selects
    the eta_- variant.
    """
    p.validate()
    d, wb, wx = p.delta_gap, p.omega_b, p.omega_x
    eta_p, eta_m = p.eta_plus, p.eta_minus
    eta3 = eta_m if pattern_consistent else eta_p
    w1 = -(d + wb) / 2 - eta_p * wx / 2
    w2 = -(d - wb) / 2 - eta_m * wx / 2
    w3 = +(d - wb) / 2 + eta3 * wx / 2
    w4 = +(d + wb) / 2 + eta_p * wx / 2
    return w1, w2, w3, w4


def spin_phonon_transition(p: SivParams) -> float:
    """Frequency of the strain-coupled |1> -> |3> transition."""
    w1, _, w3, _ = ground_energies(p)
    return w3 - w1


def raman_rabi(d: DriveParams) -> complex:
    """Second-order Raman Rabi frequency of the |2> -> |3> two-photon drive."""
    d.validate()
    if d.delta1 == 0.0 or d.delta1 + d.delta == 0.0:
        raise ZeroDivisionError("raman_rabi requires delta1 != 0 and delta1 + delta != 0")
    num = -np.conj(d.omega_a2) * d.omega_a3 * (2.0 * d.delta1 + d.delta)
    return complex(num / (4.0 * d.delta1 * (d.delta1 + d.delta)))


def effective_rabi(omega: complex, ph: PhononParams, delta: float) -> complex:
    """Phonon-assisted effective Rabi frequency of the logical transition."""
    if ph.delta_big1 == 0.0 or delta == 0.0:
        raise ZeroDivisionError("effective_rabi requires delta_big1 != 0 and delta != 0")
    return complex(omega * ph.g * (ph.delta_big1 + delta) / (2.0 * ph.delta_big1 * delta))


def exchange_coupling(omega_eff: complex, lambda1: float, lambda2: float) -> complex:
    """Phonon-mediated exchange rate between two centers, |01>-|10> block."""
    if lambda1 == 0.0 or lambda2 == 0.0:
        raise ZeroDivisionError("exchange coupling requires nonzero detunings")
    return complex(omega_eff**2 * (lambda1 + lambda2) / (4.0 * lambda1 * lambda2))


# ---------------------------------------------------------------------------
# Hamiltonian builders
# ---------------------------------------------------------------------------


def _four_level_space(n_max: int) -> HilbertSpace:
    return HilbertSpace((4, n_max + 1))


def build_four_level_hamiltonian(
    t: float, omega: complex, ph: PhononParams, delta: float
) -> ComplexOperator:
    """Interaction-picture Hamiltonian of one driven SiV center plus phonon.

    Couplings: ``g a (|3><1| e^{i D1 t} + |4><2| e^{i D2 t})`` for the
    strain channels and ``(omega/2)|3><2| e^{i delta t}`` for the Raman
    drive, plus Hermitian conjugates.  Hermitian by construction.
    """
    ph.validate()
    if t < 0.0:
        raise ValueError("time must be >= 0")
    nf = ph.n_max + 1
    siv_space = HilbertSpace((4,))
    a = destroy(nf)
    up = (
        ph.g * np.exp(1j * ph.delta_big1 * t) * tensor(outer(siv_space, 2, 0), a).entries
        + ph.g * np.exp(1j * ph.delta_big2 * t) * tensor(outer(siv_space, 3, 1), a).entries
        + (omega / 2.0) * np.exp(1j * delta * t)
        * tensor(outer(siv_space, 2, 1), identity(nf)).entries
    )
    return ComplexOperator(_four_level_space(ph.n_max), up + up.conj().T)


def four_level_logical_kets(n_max: int) -> tuple[StateVector, StateVector]:
    """Logical kets |0>_L = |1, 1ph> and |1>_L = |2, 0ph> on the 4-level space."""
    space = _four_level_space(n_max)
    nf = n_max + 1
    return basis_ket(space, 0 * nf + 1), basis_ket(space, 1 * nf + 0)


def build_effective_jc(
    t: float, omega_eff: complex, detuning: float, n_max: int = 2
) -> ComplexOperator:
    """Jaynes-Cummings reduction on [levels 1-2] x [Fock].

    ``(omega_eff/2) a^dag |1><2| e^{i detuning t} + h.c.``; restricted to
    the single-excitation pair {|1,1>, |2,0>} this is a 2x2 off-diagonal
    coupling.
    """
    if t < 0.0:
        raise ValueError("time must be >= 0")
    nf = n_max + 1
    two = HilbertSpace((2,))
    adag = destroy(nf).dagger()
    up = (omega_eff / 2.0) * np.exp(1j * detuning * t) * tensor(
        outer(two, 0, 1), adag
    ).entries
    return ComplexOperator(HilbertSpace((2, nf)), up + up.conj().T)


def jc_logical_kets(n_max: int = 2) -> tuple[StateVector, StateVector]:
    """Logical kets |0>_L = |1, 1ph> and |1>_L = |2, 0ph| on the JC space."""
    space = HilbertSpace((2, n_max + 1))
    nf = n_max + 1
    return basis_ket(space, 0 * nf + 1), basis_ket(space, 1 * nf + 0)


def _check_dispersive(omega_eff: complex, lambda1: float, lambda2: float) -> None:
    if lambda1 == 0.0 or lambda2 == 0.0:
        raise ZeroDivisionError("two-qubit reduction requires nonzero detunings")
    scale = abs(omega_eff)
    if scale > 0.0:
        ratio = min(abs(lambda1), abs(lambda2)) / scale
        if ratio < 5.0:
            warnings.warn(
                f"dispersive condition marginal: min|Lambda|/|Omega_eff| = {ratio:.2f} < 5",
                stacklevel=3,
            )


def build_two_qubit_effective(
    t: float, omega_eff: complex, lambda1: float, lambda2: float
) -> ComplexOperator:
    """Effective exchange Hamiltonian on the logical basis {|00>,|01>,|10>,|11>}.

    Off-diagonal ``-O_eff/2 e^{i(L1-L2)t}`` between |01> and |10> with
    ``O_eff = omega_eff^2 (L1+L2)/(4 L1 L2)``, and diagonal detunings
    ``-(L2-L1)`` / ``-(L1-L2)`` on the exchange pair.
    """
    _check_dispersive(omega_eff, lambda1, lambda2)
    coupling = -0.5 * exchange_coupling(omega_eff, lambda1, lambda2) * np.exp(
        1j * (lambda1 - lambda2) * t
    )
    h = np.zeros((4, 4), dtype=complex)
    h[1, 1] = -(lambda2 - lambda1)
    h[2, 2] = -(lambda1 - lambda2)
    h[1, 2] = coupling
    h[2, 1] = np.conj(coupling)
    return ComplexOperator(HilbertSpace((2, 2)), h)


def build_two_siv_exchange(
    t: float, omega_eff: complex, lambda1: float, lambda2: float, n_max: int = 2
) -> ComplexOperator:
    """Two logical-pair centers coupled to the shared phonon mode.

    Space [2] x [2] x [Fock]: each center carries the rotating coupling
    ``(omega_eff/2) a^dag |1><2|_n e^{i Lambda_n t} + h.c.``.
    """
    if t < 0.0:
        raise ValueError("time must be >= 0")
    nf = n_max + 1
    two = HilbertSpace((2,))
    adag = destroy(nf).dagger()
    lower1 = tensor(tensor(outer(two, 0, 1), identity(two)), adag)
    lower2 = tensor(tensor(identity(two), outer(two, 0, 1)), adag)
    up = (omega_eff / 2.0) * (
        np.exp(1j * lambda1 * t) * lower1.entries
        + np.exp(1j * lambda2 * t) * lower2.entries
    )
    return ComplexOperator(HilbertSpace((2, 2, nf)), up + up.conj().T)


def two_qubit_logical_kets(n_max: int = 2):
    """Kets |00>,|01>,|10>,|11> (levels |1>/|2| per center) x |0 phonons>."""
    space = HilbertSpace((2, 2, n_max + 1))
    nf = n_max + 1
    kets = []
    for q1 in (0, 1):
        for q2 in (0, 1):
            kets.append(basis_ket(space, (q1 * 2 + q2) * nf))
    return tuple(kets)


# ---------------------------------------------------------------------------
# waveguide coupling strength
# ---------------------------------------------------------------------------


def compression_mode_frequency(w: WaveguideParams, wavenumber: float) -> float:
    """Linear compression-branch dispersion ``omega = sqrt(E/rho) k``."""
    w.validate()
    if wavenumber <= 0.0:
        raise ValueError("wavenumber must be positive")
    return float(np.sqrt(w.youngs_modulus / w.mass_density) * wavenumber)


def waveguide_coupling(
    w: WaveguideParams, wavenumber: float, mode_frequency: float
) -> float:
    """Strain coupling ``g = d sqrt(hbar k^2 / (2 rho L A omega)) xi``."""
    w.validate()
    if wavenumber <= 0.0 or mode_frequency <= 0.0:
        raise ValueError("wavenumber and mode_frequency must be positive")
    root = np.sqrt(
        hbar * wavenumber**2
        / (2.0 * w.mass_density * w.length * w.cross_section * mode_frequency)
    )
    return float(w.strain_sensitivity * root * w.coupling_profile)
