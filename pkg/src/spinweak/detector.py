"""Counting model: contrast loss, background, flux, exposure and Poisson noise."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError

NOMINAL_CONTRAST = 0.80
DEFAULT_BACKGROUND_FRACTION = 0.05


@dataclass(frozen=True)
class DetectorModel:
    """Detector and beam parameters.

    ``background_rate`` is in counts/s. When it is None the background is
    taken as ``background_fraction`` of the mean fringe rate at each setting.
    """

    contrast: float = NOMINAL_CONTRAST
    flux: float = 1000.0
    exposure: float = 60.0
    background_rate: float | None = None
    background_fraction: float = DEFAULT_BACKGROUND_FRACTION
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.contrast <= 1.0:
            raise InvalidArgumentError(f"contrast must lie in [0, 1], got {self.contrast}")
        if not (self.flux >= 0.0 and math.isfinite(self.flux)):
            raise InvalidArgumentError(f"flux must be a nonnegative rate, got {self.flux}")
        if not (self.exposure > 0.0 and math.isfinite(self.exposure)):
            raise InvalidArgumentError(f"exposure must be positive, got {self.exposure}")
        if self.background_rate is not None and not self.background_rate >= 0.0:
            raise InvalidArgumentError(f"background rate must be nonnegative, got {self.background_rate}")
        if not self.background_fraction >= 0.0:
            raise InvalidArgumentError("background fraction must be nonnegative")
        if int(self.seed) != self.seed or self.seed < 0:
            raise InvalidArgumentError(f"seed must be an unsigned integer, got {self.seed}")

    def background_rate_for(self, fringe_mean: float) -> float:
        if self.background_rate is not None:
            return self.background_rate
        return self.background_fraction * self.flux * fringe_mean

    def background_counts(self, fringe_mean: float) -> float:
        """Expected background counts per setting, as subtracted in the reduction."""
        return self.background_rate_for(fringe_mean) * self.exposure


@dataclass(frozen=True)
class CountRecord:
    expected: float
    sampled: int
    setting: object = None


def _check_probability(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise InvalidArgumentError(f"{name} must be a probability in [0, 1], got {value}")


def expected_counts(ideal: float, fringe_mean: float, d: DetectorModel, interference: bool = True) -> float:
    """Mean detected counts for one setting.

    The contrast shrinks only the oscillating part ``ideal - fringe_mean``,
    which is what pure dephasing of the path qubit does. Polarimeter
    readings (``interference=False``) have no such term and see no contrast.
    """
    _check_probability("ideal", ideal)
    _check_probability("fringe_mean", fringe_mean)
    if interference:
        signal = fringe_mean + d.contrast * (ideal - fringe_mean)
    else:
        signal = ideal
    return (d.flux * signal + d.background_rate_for(fringe_mean)) * d.exposure


def stream(seed: int, *keys: int) -> np.random.Generator:
    """Independent random stream keyed by ``(seed, *keys)``.

    Keys are typically (replicate index, setting index); the same key always
    gives the same draws, whatever order the streams are created in.
    """
    return np.random.default_rng([int(seed), *(int(k) for k in keys)])


def sample_counts(expected, rng: np.random.Generator):
    """Poisson draw(s) with the given mean(s)."""
    lam = np.asarray(expected, dtype=float)
    if np.any(lam < 0) or not np.all(np.isfinite(lam)):
        raise InvalidArgumentError("Poisson mean must be finite and nonnegative")
    draw = rng.poisson(lam)
    return int(draw) if np.ndim(draw) == 0 else draw
