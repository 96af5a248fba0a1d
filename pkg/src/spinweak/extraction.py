"""Data reduction: fringe calibration, asymmetries and weak-value inversion.

The readout asymmetries of the path qubit invert to the weak value ``W``::

    Re W  = arcsin(r_y) / alpha
    Im W  = atanh(r_z) / alpha
    |W|   = arccos(r_x) / alpha

These hold to first order in ``alpha``. Beyond it the imaginary part damps
both interferometric asymmetries by ``cosh(alpha Im W)``, and ``r_x`` only
tracks ``|Re W|`` once that damping is removed. The default
``inversion="corrected"`` undoes the damping with the measured ``r_z`` and
returns ``|W| = hypot(|Re W|, Im W)``. It also reads the arcsin branch off
the sign of ``r_x``, so ``Re W`` stays continuous once ``|alpha Re W|``
passes pi/2. ``inversion="literal"`` applies the three formulas as written.
Both coincide when ``Im W = 0`` and ``|alpha Re W| < pi/2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import AtanhDivergenceError, FitFailureError, InvalidArgumentError, NoSignalError
from .experiment import QUARTET_CHIS, Coupling, IntensityQuartet, PolarimeterPair
from .hilbert import wrap_positive

MIN_FIT_POINTS = 5
MIN_FIT_SPAN = 1.5 * math.pi
# above this |ratio| the linearized error propagation is replaced by a secant
BOUNDARY_RATIO = 0.99

POLICIES = ("paper", "uniform", "none")
INVERSIONS = ("corrected", "literal")

_INVERSE = {"arcsin": math.asin, "arccos": math.acos, "atanh": math.atanh}


@dataclass(frozen=True)
class FringeFit:
    """``counts = mean + amplitude * cos(chi + phase_offset)``."""

    mean: float
    amplitude: float
    phase_offset: float
    residual_rms: float
    n_points: int = 0

    @property
    def contrast_est(self) -> float:
        return self.amplitude / self.mean if self.mean > 0 else math.nan

    @property
    def peak_chi(self) -> float:
        """Phase setting of the fringe maximum, in [0, 2pi)."""
        return wrap_positive(-self.phase_offset)

    def __call__(self, chi):
        return self.mean + self.amplitude * np.cos(np.asarray(chi, dtype=float) + self.phase_offset)


def fit_fringe(chis, counts) -> FringeFit:
    """Linear least-squares fit of a single-harmonic fringe.

    Solving for ``(mean, A cos(offset), A sin(offset))`` makes the problem
    linear, so the global optimum comes out directly with no starting guess.
    """
    chis = np.asarray(chis, dtype=float).ravel()
    y = np.asarray(counts, dtype=float).ravel()
    if chis.shape != y.shape:
        raise InvalidArgumentError("chis and counts differ in length")
    design = np.column_stack([np.ones_like(chis), np.cos(chis), -np.sin(chis)])
    if chis.size < 3 or np.linalg.matrix_rank(design) < 3:
        raise FitFailureError("phase scan does not determine a mean, amplitude and phase")
    if chis.size < MIN_FIT_POINTS:
        raise FitFailureError(f"need at least {MIN_FIT_POINTS} points, got {chis.size}")
    if np.ptp(chis) < MIN_FIT_SPAN:
        raise FitFailureError(f"scan spans {np.ptp(chis):.3f} rad, need {MIN_FIT_SPAN:.3f}")
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    mean, ac, as_ = coef
    resid = y - design @ coef
    if math.hypot(ac, as_) <= 1e-12 * max(abs(mean), 1e-300):
        raise FitFailureError("flat scan: no fringe, so the phase is undefined")
    return FringeFit(
        mean=float(mean),
        amplitude=float(math.hypot(ac, as_)),
        phase_offset=wrap_positive(math.atan2(as_, ac)),
        residual_rms=float(np.sqrt(np.mean(resid ** 2))),
        n_points=int(chis.size),
    )


def locate_settings(reference: FringeFit) -> dict[str, float]:
    """Phase-shifter positions of the four readout states from a reference fringe.

    The reference is recorded without the weak rotation, so its maximum marks
    the nominal setting 0 of the x readout.
    """
    origin = reference.peak_chi
    return {slot: wrap_positive(origin + chi) for slot, chi in QUARTET_CHIS.items()}


def read_quartet(fringe: FringeFit, positions: dict[str, float]) -> IntensityQuartet:
    """Evaluate a fitted fringe at the located phase settings."""
    vals = {slot: float(fringe(positions[slot])) for slot in QUARTET_CHIS}
    return IntensityQuartet(vals["x_plus"], vals["x_minus"], vals["y_plus"], vals["y_minus"])


class Asymmetry(NamedTuple):
    ratio: float
    clamped: bool


class ErrorBar(NamedTuple):
    se: float
    fallback: bool


def asymmetry(i_plus: float, i_minus: float, background: float = 0.0) -> Asymmetry:
    """Background-subtracted normalized difference, clipped into [-1, 1]."""
    plus, minus = i_plus - background, i_minus - background
    denom = plus + minus
    if not denom > 0.0:
        raise NoSignalError(f"no signal above background (sum after subtraction {denom})")
    r = (plus - minus) / denom
    if r > 1.0:
        return Asymmetry(1.0, True)
    if r < -1.0:
        return Asymmetry(-1.0, True)
    return Asymmetry(r, False)


def ratio_sigma(i_plus: float, i_minus: float, background: float = 0.0) -> float:
    """Poisson standard error of the background-subtracted asymmetry.

    The background is treated as known. With zero background this is
    ``sqrt(4 i+ i- / (i+ + i-)^3)``.
    """
    if not i_plus + i_minus > 0.0:
        raise NoSignalError("zero total counts")
    d = i_plus + i_minus - 2.0 * background
    if not d > 0.0:
        raise NoSignalError("no signal above background")
    n = i_plus - i_minus
    var = ((d - n) ** 2 * i_plus + (d + n) ** 2 * i_minus) / d ** 4
    return math.sqrt(var)


def _inverse_se(r: float, sigma: float, alpha: float, kind: str) -> ErrorBar:
    f = _INVERSE[kind]
    a = abs(alpha)
    if sigma == 0.0:
        return ErrorBar(0.0, False)
    if abs(r) < BOUNDARY_RATIO and abs(r) + sigma < 1.0:
        if kind == "atanh":
            return ErrorBar(sigma / (a * (1.0 - r * r)), False)
        return ErrorBar(sigma / (a * math.sqrt(1.0 - r * r)), False)
    # one-sided secant toward the interior of the domain
    r_edge = min(1.0, max(-1.0, r))
    direction = -1.0 if r_edge > 0 else 1.0
    r_in = min(1.0, max(-1.0, r_edge + direction * sigma))
    try:
        se = abs(f(r_edge) - f(r_in)) / a
    except ValueError:
        se = math.inf
    return ErrorBar(se, True)


def error_bars(i_plus: float, i_minus: float, c: Coupling, kind: str, background: float = 0.0) -> ErrorBar:
    """Standard error of one weak-value component from a pair of counts."""
    if kind not in _INVERSE:
        raise InvalidArgumentError(f"kind must be one of {sorted(_INVERSE)}")
    sigma = ratio_sigma(i_plus, i_minus, background)
    r, _ = asymmetry(i_plus, i_minus, background)
    return _inverse_se(r, sigma, c.alpha, kind)


@dataclass(frozen=True)
class WeakValueEstimate:
    re: float
    im: float
    modulus: float
    se_re: float = 0.0
    se_im: float = 0.0
    se_modulus: float = 0.0
    clamped: frozenset = field(default_factory=frozenset)
    fallback: frozenset = field(default_factory=frozenset)

    def __complex__(self) -> complex:
        return complex(self.re, self.im)


def _clip(x: float) -> tuple[float, bool]:
    if x > 1.0:
        return 1.0, True
    if x < -1.0:
        return -1.0, True
    return x, False


def extract(
    quartet: IntensityQuartet,
    pair: PolarimeterPair,
    c: Coupling,
    contrast: float | None = None,
    policy: str = "paper",
    background: float = 0.0,
    pair_background: float = 0.0,
    inversion: str = "corrected",
    poisson: bool = True,
) -> WeakValueEstimate:
    """Invert quartet and polarimeter intensities into a weak-value estimate.

    ``contrast`` divides the interferometric asymmetries according to
    ``policy``: ``"paper"`` corrects only the x readout (modulus),
    ``"uniform"`` corrects x and y, ``"none"`` neither. ``background`` is the
    expected background per quartet setting, ``pair_background`` per
    polarimeter reading. With ``poisson=False`` the inputs are treated as
    noiseless probabilities and all standard errors are zero.
    """
    if c.alpha == 0.0:
        raise InvalidArgumentError("alpha must be nonzero to invert intensities")
    if policy not in POLICIES:
        raise InvalidArgumentError(f"policy must be one of {POLICIES}")
    if inversion not in INVERSIONS:
        raise InvalidArgumentError(f"inversion must be one of {INVERSIONS}")
    counts = (*quartet.as_array(), *pair.as_array())
    if min(counts) < 0:
        raise InvalidArgumentError("intensities must be nonnegative")

    rx, cx = asymmetry(quartet.i_x_plus, quartet.i_x_minus, background)
    ry, cy = asymmetry(quartet.i_y_plus, quartet.i_y_minus, background)
    rz, cz = asymmetry(pair.i_z_plus, pair.i_z_minus, pair_background)
    if poisson:
        sx = ratio_sigma(quartet.i_x_plus, quartet.i_x_minus, background)
        sy = ratio_sigma(quartet.i_y_plus, quartet.i_y_minus, background)
        sz = ratio_sigma(pair.i_z_plus, pair.i_z_minus, pair_background)
    else:
        sx = sy = sz = 0.0

    if contrast is not None and policy != "none":
        if not 0.0 < contrast <= 1.0:
            raise InvalidArgumentError(f"contrast must lie in (0, 1], got {contrast}")
        rx, sx = rx / contrast, sx / contrast
        if policy == "uniform":
            ry, sy = ry / contrast, sy / contrast

    if abs(rz) >= 1.0:
        raise AtanhDivergenceError(f"polarimeter asymmetry {rz} leaves the atanh domain")
    alpha = c.alpha
    im = math.atanh(rz) / alpha

    if inversion == "corrected":
        k = 1.0 / math.sqrt(1.0 - rz * rz)
        dk = rz * k ** 3
        ey, sey = ry * k, math.hypot(k * sy, ry * dk * sz)
        ex, sex = rx * k, math.hypot(k * sx, rx * dk * sz)
    else:
        ey, sey, ex, sex = ry, sy, rx, sx
    ey, cy2 = _clip(ey)
    ex, cx2 = _clip(ex)

    alpha_u = math.asin(ey)
    if inversion == "corrected" and ex < 0.0:
        # cos(alpha u) < 0: the rotation went past pi/2, take the other branch
        alpha_u = math.copysign(math.pi, ey) - alpha_u
    re = alpha_u / alpha
    re_abs = math.acos(ex) / abs(alpha)

    e_re = _inverse_se(ey, sey, alpha, "arcsin")
    e_im = _inverse_se(rz, sz, alpha, "atanh")
    e_u = _inverse_se(ex, sex, alpha, "arccos")
    if inversion == "corrected":
        modulus = math.hypot(re_abs, im)
        if modulus > 0.0:
            se_mod = math.hypot(re_abs * e_u.se, im * e_im.se) / modulus
        else:
            se_mod = math.hypot(e_u.se, e_im.se)
    else:
        modulus, se_mod = re_abs, e_u.se

    clamped = {name for name, hit in (("re", cy or cy2), ("im", cz), ("modulus", cx or cx2)) if hit}
    fallback = {name for name, e in (("re", e_re), ("im", e_im), ("modulus", e_u)) if e.fallback}
    return WeakValueEstimate(
        re=re, im=im, modulus=modulus,
        se_re=e_re.se, se_im=e_im.se, se_modulus=se_mod,
        clamped=frozenset(clamped), fallback=frozenset(fallback),
    )
