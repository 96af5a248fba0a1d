"""Ideal intensities of the pre-select / weak-couple / post-select experiment.

Three evolution models are available:

``EXACT``
    the unitary ``exp(-i alpha sz_spin sz_path / 2)``;
``FIRST_ORDER``
    its linear truncation ``1 - i alpha sz_spin sz_path / 2``, renormalized;
``REEXP``
    the post-selected path amplitudes ``<f|i> exp(-+i alpha W / 2)`` in the
    two arms, with ``W`` the weak value, renormalized by ``cosh(alpha Im W)``.

All intensities are probabilities per incident particle, so the O- plus
H-beam flux equals the post-selection probability under ``EXACT``.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, UnsupportedModelError
from .hilbert import PostSelection, lifted_pauli, path_projector, path_state, spin_state
from .qmath import IDENTITY4, SIGMA_Z, Operator, StateVector, tensor_states, unitary_exp
from .weakvalue import weak_value

WEAK_WARN_ALPHA = 0.5
NOMINAL_ALPHA = math.radians(15.0)

# phase-shifter settings read out for each quartet slot
QUARTET_CHIS = {
    "x_plus": 0.0,
    "x_minus": math.pi,
    "y_plus": 0.5 * math.pi,
    "y_minus": 1.5 * math.pi,
}


class EvolutionModel(enum.Enum):
    EXACT = "exact"
    FIRST_ORDER = "first-order"
    REEXP = "re-exp"

    @classmethod
    def parse(cls, value) -> EvolutionModel:
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            names = ", ".join(m.value for m in cls)
            raise InvalidArgumentError(f"unknown model {value!r}; expected one of {names}") from None


@dataclass(frozen=True)
class Coupling:
    """Weak rotation angle per arm, in radians (+alpha in path I, -alpha in II)."""

    alpha: float = NOMINAL_ALPHA

    def __post_init__(self):
        a = float(self.alpha)
        if not math.isfinite(a) or abs(a) >= math.pi:
            raise InvalidArgumentError(f"|alpha| must be below pi, got {self.alpha}")
        if abs(a) > WEAK_WARN_ALPHA:
            warnings.warn(f"alpha={a:.3f} rad is outside the weak regime", stacklevel=3)
        object.__setattr__(self, "alpha", a)


def _asym(plus: float, minus: float) -> float:
    total = plus + minus
    return (plus - minus) / total if total > 0 else math.nan


@dataclass(frozen=True)
class IntensityQuartet:
    """O-detector intensities at the four path-readout phase settings."""

    i_x_plus: float
    i_x_minus: float
    i_y_plus: float
    i_y_minus: float

    @property
    def asymmetry_x(self) -> float:
        return _asym(self.i_x_plus, self.i_x_minus)

    @property
    def asymmetry_y(self) -> float:
        return _asym(self.i_y_plus, self.i_y_minus)

    def as_array(self) -> np.ndarray:
        return np.array([self.i_x_plus, self.i_x_minus, self.i_y_plus, self.i_y_minus])


@dataclass(frozen=True)
class PolarimeterPair:
    """Intensities of the two paths measured separately (no interference)."""

    i_z_plus: float
    i_z_minus: float

    @property
    def asymmetry(self) -> float:
        return _asym(self.i_z_plus, self.i_z_minus)

    def as_array(self) -> np.ndarray:
        return np.array([self.i_z_plus, self.i_z_minus])


# sigma_z(spin) sigma_z(path) = diag(1, -1, -1, 1)
COUPLING_GENERATOR = lifted_pauli("z", "spin") @ lifted_pauli("z", "path")


def incident_state(chi: float, pre: StateVector) -> StateVector:
    """(exp(i chi)|I> + |II>)/sqrt(2) tensored with the pre-selected spin."""
    if pre.dim != 2:
        raise InvalidArgumentError("pre-selected state must be a spin state")
    path = StateVector(np.array([np.exp(1j * chi), 1.0]) / math.sqrt(2))
    return tensor_states(path, pre.normalize())


def interaction(model: EvolutionModel, c: Coupling) -> Operator:
    model = EvolutionModel.parse(model)
    if model is EvolutionModel.EXACT:
        return unitary_exp(COUPLING_GENERATOR, c.alpha)
    if model is EvolutionModel.FIRST_ORDER:
        return IDENTITY4 - COUPLING_GENERATOR * (0.5j * c.alpha)
    raise UnsupportedModelError("the re-exponentiated model acts on post-selected amplitudes, not as an operator")


def _post_state(post) -> StateVector:
    return spin_state(post) if isinstance(post, PostSelection) else post


def _reexp_factors(pre: StateVector, post: StateVector, c: Coupling):
    ov = post.inner(pre)
    w = complex(weak_value(SIGMA_Z, pre, post))
    # re-exponentiated amplitudes are not normalized for complex W; rescale to |<f|i>|^2
    scale = 1.0 / math.sqrt(math.cosh(c.alpha * w.imag))
    return ov, w, scale


def path_amplitudes(chi: float, pre: StateVector, post, c: Coupling,
                    model: EvolutionModel = EvolutionModel.EXACT) -> np.ndarray:
    """Path-qubit amplitudes (arm I, arm II) after spin post-selection."""
    model = EvolutionModel.parse(model)
    f = _post_state(post)
    pre = pre.normalize()
    if model is EvolutionModel.REEXP:
        ov, w, scale = _reexp_factors(pre, f, c)
        half = 0.5j * c.alpha * w
        return scale * ov / math.sqrt(2) * np.array([np.exp(1j * chi) * np.exp(-half), np.exp(half)])
    psi = interaction(model, c) @ incident_state(chi, pre)
    if model is EvolutionModel.FIRST_ORDER:
        psi = psi.normalize()
    amps = psi.amps
    return np.array([np.vdot(f.amps, amps[:2]), np.vdot(f.amps, amps[2:])])


def interferogram(chis, pre: StateVector, post, c: Coupling,
                  model: EvolutionModel = EvolutionModel.EXACT) -> np.ndarray:
    """O- and H-beam intensities for each phase-shifter setting.

    Returns an array of shape ``(len(chis), 2)`` with columns ``(i_o, i_h)``.
    """
    chis = np.atleast_1d(np.asarray(chis, dtype=float))
    if chis.size == 0:
        raise InvalidArgumentError("need at least one phase setting")
    o_beam, h_beam = path_state(0.0).amps, path_state(math.pi).amps
    out = np.empty((chis.size, 2))
    for k, chi in enumerate(chis):
        a = path_amplitudes(chi, pre, post, c, model)
        out[k, 0] = abs(np.vdot(o_beam, a)) ** 2
        out[k, 1] = abs(np.vdot(h_beam, a)) ** 2
    return out


def intensity_quartet(pre: StateVector, post, c: Coupling,
                      model: EvolutionModel = EvolutionModel.EXACT) -> IntensityQuartet:
    """Projector readouts <Pi(chi)> of the path state evolved at chi = 0."""
    a = path_amplitudes(0.0, pre, post, c, model)
    vals = {slot: float(np.vdot(a, path_projector(chi).matrix @ a).real) for slot, chi in QUARTET_CHIS.items()}
    return IntensityQuartet(
        i_x_plus=vals["x_plus"], i_x_minus=vals["x_minus"],
        i_y_plus=vals["y_plus"], i_y_minus=vals["y_minus"],
    )


def polarimeter_pair(pre: StateVector, post, c: Coupling,
                     model: EvolutionModel = EvolutionModel.EXACT) -> PolarimeterPair:
    """Post-selected intensity behind each arm alone.

    Path I sees a rotation by +alpha and path II by -alpha; without the
    interferometer nothing interferes, so each is a single-path probability.
    """
    model = EvolutionModel.parse(model)
    f = _post_state(post)
    pre = pre.normalize()
    if model is EvolutionModel.REEXP:
        ov, w, _ = _reexp_factors(pre, f, c)
        av = c.alpha * w.imag
        p = abs(ov) ** 2
        norm = 2.0 * math.cosh(av)
        return PolarimeterPair(p * math.exp(av) / norm, p * math.exp(-av) / norm)
    if model is EvolutionModel.EXACT:
        u_plus = unitary_exp(SIGMA_Z, c.alpha)
        u_minus = unitary_exp(SIGMA_Z, -c.alpha)
    else:
        scale = 1.0 / math.sqrt(1.0 + 0.25 * c.alpha ** 2)
        u_plus = Operator((np.eye(2) - 0.5j * c.alpha * SIGMA_Z.matrix) * scale)
        u_minus = Operator((np.eye(2) + 0.5j * c.alpha * SIGMA_Z.matrix) * scale)
    return PolarimeterPair(
        abs(f.inner(u_plus @ pre)) ** 2,
        abs(f.inner(u_minus @ pre)) ** 2,
    )
