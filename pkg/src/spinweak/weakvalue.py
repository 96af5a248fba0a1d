"""Weak values from the defining ratio and from the closed form for |S_x;+>."""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidArgumentError, OrthogonalPostselectionError
from .hilbert import PostSelection
from .qmath import Operator, StateVector

ORTHOGONAL_TOL = 1e-12

AS_DERIVED = "as-derived"
AS_PRINTED = "as-printed"


@dataclass(frozen=True)
class WeakValue:
    re: float
    im: float

    @property
    def modulus(self) -> float:
        return math.hypot(self.re, self.im)

    def __complex__(self) -> complex:
        return complex(self.re, self.im)

    @classmethod
    def from_complex(cls, w: complex) -> WeakValue:
        return cls(float(w.real), float(w.imag))


def weak_value(observable: Operator, pre: StateVector, post: StateVector) -> WeakValue:
    """<post|A|pre> / <post|pre>."""
    if observable.dim != 2 or pre.dim != 2 or post.dim != 2:
        raise InvalidArgumentError("weak_value works on single-qubit operators and states")
    overlap = post.inner(pre)
    if abs(overlap) ** 2 < ORTHOGONAL_TOL:
        raise OrthogonalPostselectionError(f"|<post|pre>|^2 = {abs(overlap) ** 2:.3g}")
    return WeakValue.from_complex(post.inner(observable @ pre) / overlap)


def overlap_sq(p: PostSelection) -> float:
    """Post-selection probability |<psi_f(theta, phi)|S_x;+>|^2."""
    return 0.5 * (1.0 + math.sin(p.theta) * math.cos(p.phi))


def closed_form(p: PostSelection, phase_sign: str = AS_DERIVED) -> WeakValue:
    """Weak value of sigma_z for pre-selection |S_x;+> and post-selection ``p``.

    The default sign of the imaginary part follows from the ket
    ``cos(theta/2)|up> + sin(theta/2) e^{i phi}|down>``; ``"as-printed"``
    flips it to the commonly quoted form with ``-i sin(phi) sin(theta)``.
    """
    denom = 1.0 + math.sin(p.theta) * math.cos(p.phi)
    if denom <= ORTHOGONAL_TOL:
        raise OrthogonalPostselectionError(f"1 + sin(theta)cos(phi) = {denom:.3g}")
    im = math.sin(p.theta) * math.sin(p.phi) / denom
    if phase_sign == AS_PRINTED:
        im = -im
    elif phase_sign != AS_DERIVED:
        raise InvalidArgumentError(f"phase_sign must be {AS_DERIVED!r} or {AS_PRINTED!r}")
    return WeakValue(math.cos(p.theta) / denom, im)


def is_anomalous(w: WeakValue, spectrum=(-1.0, 1.0)) -> bool:
    """True when the real part lies outside the observable's eigenvalue range."""
    lo, hi = spectrum
    return not (lo <= w.re <= hi)
