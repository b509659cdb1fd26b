"""Reflecting-surface state: discrete phase sets, quantization, and the
graphene element physics behind the programmable phase response.

The surface is modeled as N reflecting elements with a common averaged
amplitude ``mu_bar`` and per-element phase shifts drawn from a finite set
{k * phi_max / 2**b : k = 0..2**b - 1}. The graphene functions give the
closed-form conductivity / Fermi-level / phase-response chain of a single
tunable element; plate-level quantities (phi_max, mu_bar) are treated as
configured hardware constants.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import InvalidInputError

__all__ = [
    "RisState",
    "GrapheneParams",
    "build_phase_set",
    "quantize_phases",
    "phi_matrix",
    "initial_state",
    "graphene_conductivity",
    "fermi_level_from_voltage",
    "element_phase_response",
    "export_phase_set_csv",
    "export_graphene_sweep_csv",
]

TWO_PI = 2.0 * math.pi

DEFAULT_PHI_MAX = math.radians(306.82)
DEFAULT_MU_BAR = 0.8
DEFAULT_BITS = 3

SPEED_OF_LIGHT = 3.0e8


def build_phase_set(phi_max: float, b: int) -> np.ndarray:
    """Admissible phase angles {0, phi_max/2^b, ..., (2^b-1)*phi_max/2^b}."""
    if b < 1:
        raise InvalidInputError("quantization bits b must be >= 1")
    if not 0.0 < phi_max <= TWO_PI:
        raise InvalidInputError("phi_max must lie in (0, 2*pi]")
    size = 2**b
    return phi_max * np.arange(size) / size


def quantize_phases(phases, phase_set) -> np.ndarray:
    """Map each angle to the circularly nearest member of ``phase_set``.

    Angles are first reduced modulo 2*pi; distance is measured around the
    circle (an angle near 2*pi is close to 0), and ties break toward the
    smaller set angle.
    """
    pset = np.asarray(phase_set, dtype=float)
    if pset.size == 0:
        raise InvalidInputError("phase set must be non-empty")
    wrapped = np.mod(np.asarray(phases, dtype=float), TWO_PI)
    diff = np.abs(wrapped[..., None] - pset)
    circ = np.minimum(diff, TWO_PI - diff)
    return pset[np.argmin(circ, axis=-1)]


@dataclass(frozen=True)
class RisState:
    """Phase configuration of the reflecting surface.

    ``phases`` holds one angle per element (radians); ``phase_set`` the
    admissible discrete angles; ``mu_bar`` the averaged reflecting
    amplitude shared by all elements. ``quantized`` marks that every
    entry of ``phases`` is a member of ``phase_set``.
    """

    phases: np.ndarray
    phase_set: np.ndarray
    mu_bar: float = DEFAULT_MU_BAR
    b: int = DEFAULT_BITS
    phi_max: float = DEFAULT_PHI_MAX
    quantized: bool = False

    def __post_init__(self):
        object.__setattr__(self, "phases", np.asarray(self.phases, dtype=float))
        object.__setattr__(self, "phase_set", np.asarray(self.phase_set, dtype=float))
        if not 0.5 <= self.mu_bar <= 1.0:
            raise InvalidInputError("mu_bar must lie in [0.5, 1]")
        if self.quantized and self.phases.size:
            member = np.isclose(self.phases[:, None], self.phase_set[None, :]).any(axis=1)
            if not member.all():
                raise InvalidInputError("quantized state has phases outside the phase set")

    @property
    def n_elements(self) -> int:
        return self.phases.size

    def reflection_coefficients(self) -> np.ndarray:
        """Per-element complex coefficients mu_bar * exp(j*phase)."""
        return self.mu_bar * np.exp(1j * self.phases)

    def with_phases(self, phases, quantized: bool = False) -> "RisState":
        return replace(self, phases=np.asarray(phases, dtype=float), quantized=quantized)

    def quantize(self) -> "RisState":
        return self.with_phases(quantize_phases(self.phases, self.phase_set), quantized=True)


def initial_state(
    n_elements: int,
    phi_max: float = DEFAULT_PHI_MAX,
    b: int = DEFAULT_BITS,
    mu_bar: float = DEFAULT_MU_BAR,
) -> RisState:
    """All-zero phase state (0 is always a member of the phase set)."""
    return RisState(
        phases=np.zeros(n_elements),
        phase_set=build_phase_set(phi_max, b),
        mu_bar=mu_bar,
        b=b,
        phi_max=phi_max,
        quantized=True,
    )


def phi_matrix(state: RisState) -> np.ndarray:
    """Diagonal reflection matrix diag(mu_bar * exp(j*phi_n))."""
    return np.diag(state.reflection_coefficients())


@dataclass(frozen=True)
class GrapheneParams:
    """Material and geometry constants of one graphene reflecting element.

    Defaults are calibration values for a narrowband element at 1.6 THz
    (patch width 66 um, monolayer thickness); physical constants are CODATA.
    """

    temperature: float = 300.0  # K
    relaxation_time: float = 1e-13  # s
    fermi_velocity: float = 1e6  # m/s
    residual_density: float = 1e15  # 1/m^2
    capacitivity: float = 1e31  # 1/(m^4 V^2), electrode coupling
    v_cnp: float = 1.0  # V, charge-neutrality compensating voltage
    graphene_thickness: float = 0.34e-9  # m
    patch_width: float = 66e-6  # m
    mode_integer: int = 3  # Fabry-Perot resonance order
    elementary_charge: float = 1.602176634e-19  # C
    hbar: float = 1.054571817e-34  # J s
    boltzmann: float = 1.380649e-23  # J/K
    vacuum_permittivity: float = 8.8541878128e-12  # F/m

    def __post_init__(self):
        if self.mode_integer < 1:
            raise InvalidInputError("mode_integer must be >= 1")
        for name in (
            "temperature",
            "relaxation_time",
            "fermi_velocity",
            "residual_density",
            "capacitivity",
            "v_cnp",
            "graphene_thickness",
            "patch_width",
        ):
            if getattr(self, name) <= 0:
                raise InvalidInputError(f"{name} must be positive")


def graphene_conductivity(p: GrapheneParams, fermi_level_ev: float, omega: float) -> complex:
    """Sheet conductivity (Siemens) of graphene in the THz intraband regime.

    sigma = (2 e^2 / (pi hbar^2)) * kB T * ln[2 cosh(E_F / (2 kB T))]
            * i / (omega + i / tau), with E_F supplied in eV.
    """
    if omega <= 0:
        raise InvalidInputError("omega must be positive")
    ef_joule = fermi_level_ev * p.elementary_charge
    kt = p.boltzmann * p.temperature
    x = ef_joule / (2.0 * kt)
    # ln(2 cosh x) = logaddexp(x, -x), overflow-safe for large |x|
    thermal = np.logaddexp(x, -x)
    prefactor = (2.0 * p.elementary_charge**2 / (math.pi * p.hbar**2)) * kt * thermal
    return complex(prefactor * (1j / (omega + 1j / p.relaxation_time)))


def fermi_level_from_voltage(p: GrapheneParams, v_g: float) -> float:
    """Fermi level (eV) induced by a gate voltage.

    Carrier density n_d = sqrt(n_0^2 + alpha_c |V_CNP - V_g|^2), then
    |E_F| = hbar v_F sqrt(pi n_d).
    """
    n_d = math.hypot(p.residual_density, math.sqrt(p.capacitivity) * abs(p.v_cnp - v_g))
    ef_joule = p.hbar * p.fermi_velocity * math.sqrt(math.pi * n_d)
    return ef_joule / p.elementary_charge


def element_phase_response(p: GrapheneParams, fermi_level_ev: float, omega: float) -> float:
    """Reflecting phase (radians) of one element at angular frequency omega.

    Uses the thin-film effective permittivity eps_eff = 1 + i sigma /
    (omega eps0 t_g), the principal square root for the effective index,
    and phi = m*pi - a*k0*Re(n_eff). The raw value is not wrapped.
    """
    sigma = graphene_conductivity(p, fermi_level_ev, omega)
    eps_eff = 1.0 + 1j * sigma / (omega * p.vacuum_permittivity * p.graphene_thickness)
    n_eff = np.sqrt(complex(eps_eff))
    k0 = omega / SPEED_OF_LIGHT
    return p.mode_integer * math.pi - p.patch_width * k0 * n_eff.real


def export_phase_set_csv(path, phase_set) -> None:
    """Write the admissible angles as CSV (index, phase_deg)."""
    pset = np.asarray(phase_set, dtype=float)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "phase_deg"])
        for k, angle in enumerate(pset):
            writer.writerow([k, f"{math.degrees(angle):.9g}"])


def export_graphene_sweep_csv(path, params: GrapheneParams, fermi_levels_ev, omega: float) -> None:
    """Tabulate conductivity and phase response over a Fermi-level sweep."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["fermi_level_eV", "sigma_re", "sigma_im", "phase_deg"])
        for ef in np.asarray(fermi_levels_ev, dtype=float):
            sigma = graphene_conductivity(params, ef, omega)
            phase = element_phase_response(params, ef, omega)
            writer.writerow(
                [
                    f"{ef:.9g}",
                    f"{sigma.real:.9g}",
                    f"{sigma.imag:.9g}",
                    f"{math.degrees(phase):.9g}",
                ]
            )
