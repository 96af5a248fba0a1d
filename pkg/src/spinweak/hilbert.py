"""Named states and operators of the spin/path two-qubit system."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .qmath import ALGEBRA_TOL, IDENTITY2, PAULI, Operator, StateVector, tensor

TWO_PI = 2.0 * math.pi


def wrap_signed(angle: float) -> float:
    """Wrap into [-pi, pi]; +pi stays +pi so sweep endpoints survive."""
    if -math.pi <= angle <= math.pi:
        return float(angle)
    return float((angle + math.pi) % TWO_PI - math.pi)


def wrap_positive(angle: float) -> float:
    w = float(angle % TWO_PI)
    return 0.0 if w == TWO_PI else w


@dataclass(frozen=True)
class PostSelection:
    """Bloch angles of the post-selected spin state.

    ``theta`` is kept signed in [-pi, pi] and ``phi`` is wrapped to
    [0, 2pi) on construction.
    """

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.theta) and math.isfinite(self.phi)):
            raise InvalidArgumentError("post-selection angles must be finite")
        object.__setattr__(self, "theta", wrap_signed(float(self.theta)))
        object.__setattr__(self, "phi", wrap_positive(float(self.phi)))

    @property
    def state(self) -> StateVector:
        return spin_state(self)


@dataclass(frozen=True)
class PhaseShifterSetting:
    """Relative path phase ``chi`` imposed by the phase-shifter plate.

    Either give ``chi`` directly or use :meth:`from_plate`, which records the
    plate parameters whose product is the phase.
    """

    chi: float
    particle_density: float | None = None
    scattering_length: float | None = None
    wavelength: float | None = None
    thickness: float | None = None

    def __post_init__(self):
        if not math.isfinite(self.chi):
            raise InvalidArgumentError("chi must be finite")
        record = (self.particle_density, self.scattering_length, self.wavelength, self.thickness)
        given = [v is not None for v in record]
        if any(given) and not all(given):
            raise InvalidArgumentError("plate record needs all of density, scattering length, wavelength, thickness")
        if all(given):
            product = math.prod(record)
            if abs(product - self.chi) > ALGEBRA_TOL * max(1.0, abs(product)):
                raise InvalidArgumentError(f"chi={self.chi} inconsistent with plate product {product}")

    @classmethod
    def from_plate(cls, particle_density: float, scattering_length: float,
                   wavelength: float, thickness: float) -> PhaseShifterSetting:
        """Units must be consistent so that the product comes out in radians."""
        chi = particle_density * scattering_length * wavelength * thickness
        return cls(chi, particle_density, scattering_length, wavelength, thickness)

    @property
    def has_plate_record(self) -> bool:
        return self.thickness is not None


def spin_state(p: PostSelection) -> StateVector:
    """cos(theta/2)|up> + sin(theta/2) exp(i phi)|down>."""
    return StateVector([math.cos(p.theta / 2), math.sin(p.theta / 2) * np.exp(1j * p.phi)])


SPIN_UP = StateVector([1, 0])
SPIN_DOWN = StateVector([0, 1])
SPIN_X_PLUS = StateVector(np.array([1, 1]) / math.sqrt(2))
SPIN_X_MINUS = StateVector(np.array([1, -1]) / math.sqrt(2))

PATH_I = StateVector([1, 0])
PATH_II = StateVector([0, 1])
PROJ_I = Operator([[1, 0], [0, 0]])
PROJ_II = Operator([[0, 0], [0, 1]])


def path_state(chi: float) -> StateVector:
    """(|I> + exp(i chi)|II>)/sqrt(2)."""
    return StateVector(np.array([1.0, np.exp(1j * chi)]) / math.sqrt(2))


def path_projector(chi: float) -> Operator:
    """Rank-one projector onto :func:`path_state` ``(chi)``."""
    v = path_state(chi).amps
    return Operator(np.outer(v, v.conj()))


def lifted_pauli(axis: str, subsystem: str) -> Operator:
    """Pauli ``axis`` on one subsystem, identity on the other (path (x) spin order)."""
    try:
        sigma = PAULI[axis]
    except KeyError:
        raise InvalidArgumentError(f"axis must be x, y or z, got {axis!r}") from None
    if subsystem == "path":
        return tensor(sigma, IDENTITY2)
    if subsystem == "spin":
        return tensor(IDENTITY2, sigma)
    raise InvalidArgumentError(f"subsystem must be 'spin' or 'path', got {subsystem!r}")
