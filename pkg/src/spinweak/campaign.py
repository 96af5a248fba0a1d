"""Simulation campaigns: phase-shifter fringes, post-selection sweeps, Monte Carlo.

Each campaign returns plain row dicts in a fixed column order (see the
``*_COLUMNS`` tuples) and is deterministic: random draws come from streams
keyed by ``(seed, replicate, setting)``, so results do not depend on how
many worker processes evaluate the grid.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .detector import DetectorModel, expected_counts, sample_counts, stream
from .errors import InvalidArgumentError, NumericalError
from .experiment import (
    NOMINAL_ALPHA,
    Coupling,
    EvolutionModel,
    IntensityQuartet,
    PolarimeterPair,
    interferogram,
    intensity_quartet,
    polarimeter_pair,
)
from .extraction import INVERSIONS, POLICIES, extract, fit_fringe, locate_settings, read_quartet
from .hilbert import SPIN_X_PLUS, PostSelection, spin_state
from .qmath import SIGMA_Z, StateVector
from .weakvalue import weak_value

SKIP_OVERLAP_SQ = 1e-3

FRINGE_COLUMNS = ("scan", "chi_rad", "i_o_ideal", "i_h_ideal", "expected_counts", "sampled_counts")
FIT_COLUMNS = ("quantity", "value")
SWEEP_COLUMNS = (
    "theta", "phi", "re_est", "se_re", "im_est", "se_im", "mod_est", "se_mod",
    "re_true", "im_true", "mod_true", "clamped_flags",
)
MC_COMPONENTS = ("re", "im", "mod")
MONTECARLO_COLUMNS = (
    "theta", "phi", "n_ok", "n_failed",
    *(f"{c}_{s}" for c in MC_COMPONENTS for s in ("mean", "spread", "se_mean", "pull_mean", "pull_std")),
    "re_true", "im_true", "mod_true", "n_clamped", "flags",
)


@dataclass(frozen=True)
class CampaignConfig:
    """Everything a campaign needs. ``detector=None`` means ideal intensities."""

    phi: float = 0.0
    theta: float = 5 * math.pi / 6
    theta_start: float = -math.pi
    theta_stop: float = math.pi
    theta_count: int = 61
    alpha: float = NOMINAL_ALPHA
    model: EvolutionModel = EvolutionModel.EXACT
    detector: DetectorModel | None = None
    contrast_policy: str = "paper"
    inversion: str = "corrected"
    pre_theta: float | None = None
    pre_phi: float | None = None
    replicates: int = 200
    n_chi: int = 32
    quartet_counts: float | None = None
    output: str | None = None
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "model", EvolutionModel.parse(self.model))
        angles = (self.phi, self.theta, self.theta_start, self.theta_stop, self.alpha)
        if not all(math.isfinite(a) for a in angles):
            raise InvalidArgumentError("all angles must be finite")
        if int(self.theta_count) != self.theta_count or self.theta_count < 2:
            raise InvalidArgumentError("theta grid needs at least 2 points")
        if not self.theta_stop > self.theta_start:
            raise InvalidArgumentError("theta grid stop must exceed start")
        if self.contrast_policy not in POLICIES:
            raise InvalidArgumentError(f"contrast_policy must be one of {POLICIES}")
        if self.inversion not in INVERSIONS:
            raise InvalidArgumentError(f"inversion must be one of {INVERSIONS}")
        if (self.pre_theta is None) != (self.pre_phi is None):
            raise InvalidArgumentError("pre-selection override needs both theta and phi")
        if self.n_chi < 5:
            raise InvalidArgumentError("a fringe scan needs at least 5 phase settings")
        if self.quartet_counts is not None and not self.quartet_counts > 0:
            raise InvalidArgumentError("quartet_counts must be positive")
        if self.workers < 1:
            raise InvalidArgumentError("workers must be at least 1")
        Coupling(self.alpha)

    @property
    def pre(self) -> StateVector:
        if self.pre_theta is None:
            return SPIN_X_PLUS
        return spin_state(PostSelection(self.pre_theta, self.pre_phi))

    @property
    def coupling(self) -> Coupling:
        return Coupling(self.alpha)

    @property
    def thetas(self) -> np.ndarray:
        return np.linspace(self.theta_start, self.theta_stop, int(self.theta_count))

    def replace(self, **changes) -> CampaignConfig:
        return dataclasses.replace(self, **changes)

    @classmethod
    def from_dict(cls, doc: dict) -> CampaignConfig:
        """Build from a parsed JSON campaign document."""
        doc = dict(doc)
        kw = {}
        grid = doc.pop("theta_grid", None)
        if grid is not None:
            try:
                kw.update(theta_start=float(grid["start"]), theta_stop=float(grid["stop"]),
                          theta_count=int(grid["count"]))
            except (KeyError, TypeError, ValueError) as exc:
                raise InvalidArgumentError(f"bad theta_grid: {exc}") from None
        pre = doc.pop("pre", None)
        if pre is not None:
            kw.update(pre_theta=float(pre["theta"]), pre_phi=float(pre["phi"]))
        det = doc.pop("detector", None)
        if det is not None and det != "ideal":
            kw["detector"] = detector_from_dict(det)
        for key in ("phi", "theta", "alpha"):
            if key in doc:
                kw[key] = float(doc.pop(key))
        for key in ("replicates", "n_chi", "workers"):
            if key in doc:
                kw[key] = int(doc.pop(key))
        for key in ("model", "contrast_policy", "inversion", "output"):
            if key in doc:
                kw[key] = doc.pop(key)
        if "quartet_counts" in doc:
            qc = doc.pop("quartet_counts")
            kw["quartet_counts"] = None if qc is None else float(qc)
        if doc:
            raise InvalidArgumentError(f"unknown configuration keys: {sorted(doc)}")
        return cls(**kw)


def detector_from_dict(doc: dict) -> DetectorModel:
    if not isinstance(doc, dict):
        raise InvalidArgumentError("detector must be 'ideal' or an object")
    doc = dict(doc)
    kw = {}
    if "background" in doc:
        doc["background_rate"] = doc.pop("background")
    for key in ("contrast", "flux", "exposure", "background_rate", "background_fraction"):
        if key in doc:
            val = doc.pop(key)
            kw[key] = None if val is None else float(val)
    if "seed" in doc:
        kw["seed"] = int(doc.pop("seed"))
    if doc:
        raise InvalidArgumentError(f"unknown detector keys: {sorted(doc)}")
    return DetectorModel(**kw)


# -- per-setting simulation -------------------------------------------------


@dataclass(frozen=True)
class PointCounts:
    """Expected counts and matching backgrounds for one post-selection."""

    quartet: np.ndarray
    pair: np.ndarray
    background: float
    pair_background: float
    detector: DetectorModel = field(repr=False)


def _point_expected(quartet: IntensityQuartet, pair: PolarimeterPair, d: DetectorModel) -> PointCounts:
    q = quartet.as_array()
    p = pair.as_array()
    q_mean = 0.5 * (q[0] + q[1])
    p_mean = 0.5 * (p[0] + p[1])
    exp_q = np.array([expected_counts(v, q_mean, d) for v in q])
    exp_p = np.array([expected_counts(v, p_mean, d, interference=False) for v in p])
    return PointCounts(exp_q, exp_p, d.background_counts(q_mean), d.background_counts(p_mean), d)


def point_counts(quartet: IntensityQuartet, pair: PolarimeterPair, d: DetectorModel,
                 quartet_counts: float | None = None) -> PointCounts:
    """Expected counts; with ``quartet_counts`` the flux is rescaled to hit that total."""
    if quartet_counts is None:
        return _point_expected(quartet, pair, d)
    # expected counts are affine in the flux
    at0 = _point_expected(quartet, pair, dataclasses.replace(d, flux=0.0)).quartet.sum()
    at1 = _point_expected(quartet, pair, dataclasses.replace(d, flux=1.0)).quartet.sum()
    if at1 - at0 <= 0:
        raise InvalidArgumentError("no signal to scale to the requested quartet counts")
    flux = (quartet_counts - at0) / (at1 - at0)
    if flux < 0:
        raise InvalidArgumentError("background alone exceeds the requested quartet counts")
    return _point_expected(quartet, pair, dataclasses.replace(d, flux=flux))


def sample_point(pc: PointCounts, seed: int, replicate: int, setting: int):
    rng = stream(seed, replicate, setting)
    draws = sample_counts(np.concatenate([pc.quartet, pc.pair]), rng)
    return IntensityQuartet(*(float(v) for v in draws[:4])), PolarimeterPair(*(float(v) for v in draws[4:]))


def _truth(cfg: CampaignConfig, post: PostSelection):
    w = weak_value(SIGMA_Z, cfg.pre, post.state)
    return w.re, w.im, w.modulus


def _overlap_sq(cfg: CampaignConfig, post: PostSelection) -> float:
    return abs(post.state.inner(cfg.pre)) ** 2


def _extract(cfg: CampaignConfig, quartet, pair, background=0.0, pair_background=0.0, poisson=True):
    contrast = cfg.detector.contrast if cfg.detector is not None else None
    if contrast == 0.0:
        contrast = None
    return extract(quartet, pair, cfg.coupling, contrast=contrast, policy=cfg.contrast_policy,
                   background=background, pair_background=pair_background,
                   inversion=cfg.inversion, poisson=poisson)


def _error_flag(exc: Exception) -> str:
    name = type(exc).__name__.removesuffix("Error")
    return "".join("_" + ch.lower() if ch.isupper() else ch for ch in name).lstrip("_")


def _map(func, args, workers: int):
    if workers <= 1 or len(args) <= 1:
        return [func(a) for a in args]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, args))


# -- sweep --------------------------------------------------------------------


def _sweep_row(arg) -> dict:
    cfg, index, theta = arg
    post = PostSelection(theta, cfg.phi)
    row = dict.fromkeys(SWEEP_COLUMNS, math.nan)
    row.update(theta=float(theta), phi=cfg.phi, clamped_flags="")
    if _overlap_sq(cfg, post) < SKIP_OVERLAP_SQ:
        row["clamped_flags"] = "skipped"
        return row
    row["re_true"], row["im_true"], row["mod_true"] = _truth(cfg, post)
    try:
        quartet = intensity_quartet(cfg.pre, post, cfg.coupling, cfg.model)
        pair = polarimeter_pair(cfg.pre, post, cfg.coupling, cfg.model)
        if cfg.detector is None:
            est = _extract(cfg, quartet, pair, poisson=False)
        else:
            pc = point_counts(quartet, pair, cfg.detector, cfg.quartet_counts)
            q, p = sample_point(pc, cfg.detector.seed, 0, index)
            est = _extract(cfg, q, p, pc.background, pc.pair_background)
    except NumericalError as exc:
        row["clamped_flags"] = _error_flag(exc)
        return row
    row.update(re_est=est.re, se_re=est.se_re, im_est=est.im, se_im=est.se_im,
               mod_est=est.modulus, se_mod=est.se_modulus,
               clamped_flags="|".join(sorted(est.clamped)))
    return row


def sweep_campaign(cfg: CampaignConfig) -> list[dict]:
    """One row per grid theta: estimated vs closed-form weak value."""
    args = [(cfg, i, float(t)) for i, t in enumerate(cfg.thetas)]
    return _map(_sweep_row, args, cfg.workers)


# -- Monte Carlo ----------------------------------------------------------------


def _mc_row(arg) -> dict:
    cfg, index, theta = arg
    post = PostSelection(theta, cfg.phi)
    row = dict.fromkeys(MONTECARLO_COLUMNS, math.nan)
    row.update(theta=float(theta), phi=cfg.phi, n_ok=0, n_failed=0, n_clamped=0, flags="")
    if _overlap_sq(cfg, post) < SKIP_OVERLAP_SQ:
        row["flags"] = "skipped"
        return row
    truth = _truth(cfg, post)
    row["re_true"], row["im_true"], row["mod_true"] = truth
    try:
        quartet = intensity_quartet(cfg.pre, post, cfg.coupling, cfg.model)
        pair = polarimeter_pair(cfg.pre, post, cfg.coupling, cfg.model)
        pc = point_counts(quartet, pair, cfg.detector, cfg.quartet_counts)
    except NumericalError as exc:
        row["flags"] = _error_flag(exc)
        return row
    est, se = [], []
    failures: set[str] = set()
    n_clamped = 0
    for rep in range(cfg.replicates):
        q, p = sample_point(pc, cfg.detector.seed, rep, index)
        try:
            e = _extract(cfg, q, p, pc.background, pc.pair_background)
        except NumericalError as exc:
            failures.add(_error_flag(exc))
            continue
        n_clamped += bool(e.clamped)
        est.append((e.re, e.im, e.modulus))
        se.append((e.se_re, e.se_im, e.se_modulus))
    row.update(n_ok=len(est), n_failed=cfg.replicates - len(est), n_clamped=n_clamped,
               flags="|".join(sorted(failures)))
    if not est:
        return row
    stats = replicate_stats(np.array(est), np.array(se), np.array(truth))
    for comp, s in zip(MC_COMPONENTS, stats):
        for key, val in s.items():
            row[f"{comp}_{key}"] = val
    return row


def replicate_stats(est: np.ndarray, se: np.ndarray, truth: np.ndarray) -> list[dict]:
    """Per-component mean, spread, mean reported error and pull statistics.

    ``est`` and ``se`` have shape (replicates, 3); pulls with zero reported
    error are left out.
    """
    out = []
    ddof = 1 if est.shape[0] > 1 else 0
    for j in range(est.shape[1]):
        ok = se[:, j] > 0
        pulls = (est[ok, j] - truth[j]) / se[ok, j]
        out.append({
            "mean": float(est[:, j].mean()),
            "spread": float(est[:, j].std(ddof=ddof)),
            "se_mean": float(se[:, j].mean()),
            "pull_mean": float(pulls.mean()) if pulls.size else math.nan,
            "pull_std": float(pulls.std(ddof=1)) if pulls.size > 1 else math.nan,
        })
    return out


def montecarlo_pulls(cfg: CampaignConfig, theta: float, setting: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Raw per-replicate pulls (replicates, 3) at one post-selection, plus truth."""
    post = PostSelection(theta, cfg.phi)
    truth = np.array(_truth(cfg, post))
    quartet = intensity_quartet(cfg.pre, post, cfg.coupling, cfg.model)
    pair = polarimeter_pair(cfg.pre, post, cfg.coupling, cfg.model)
    pc = point_counts(quartet, pair, cfg.detector, cfg.quartet_counts)
    pulls = []
    for rep in range(cfg.replicates):
        q, p = sample_point(pc, cfg.detector.seed, rep, setting)
        e = _extract(cfg, q, p, pc.background, pc.pair_background)
        pulls.append((np.array([e.re, e.im, e.modulus]) - truth) / np.array([e.se_re, e.se_im, e.se_modulus]))
    return np.array(pulls), truth


def montecarlo_campaign(cfg: CampaignConfig) -> list[dict]:
    """Replicate-aggregated estimates and pulls per grid theta."""
    if cfg.detector is None:
        raise InvalidArgumentError("a Monte Carlo campaign needs a detector model")
    if cfg.replicates < 2:
        raise InvalidArgumentError("need at least 2 replicates")
    args = [(cfg, i, float(t)) for i, t in enumerate(cfg.thetas)]
    return _map(_mc_row, args, cfg.workers)


# -- fringe -------------------------------------------------------------------


@dataclass(frozen=True)
class FringeResult:
    rows: list
    reference_fit: object
    weak_fit: object
    positions: dict
    shift: float

    def summary_rows(self) -> list[dict]:
        rows = []
        for label, fit in (("reference", self.reference_fit), ("weak", self.weak_fit)):
            rows += [
                {"quantity": f"{label}_mean", "value": fit.mean},
                {"quantity": f"{label}_amplitude", "value": fit.amplitude},
                {"quantity": f"{label}_phase_offset", "value": fit.phase_offset},
                {"quantity": f"{label}_contrast", "value": fit.contrast_est},
                {"quantity": f"{label}_residual_rms", "value": fit.residual_rms},
                {"quantity": f"{label}_peak_chi", "value": fit.peak_chi},
            ]
        rows += [{"quantity": f"chi_{slot}", "value": chi} for slot, chi in self.positions.items()]
        rows.append({"quantity": "fringe_shift", "value": self.shift})
        return rows


def fringe_campaign(cfg: CampaignConfig) -> FringeResult:
    """Reference (alpha = 0) and weak-rotation phase scans at ``cfg.theta``.

    The reference fit locates the four readout settings; the shift of the
    weak fringe's maximum relative to the reference is reported in
    (-pi, pi].
    """
    post = PostSelection(cfg.theta, cfg.phi)
    chis = np.linspace(0.0, 2 * math.pi, cfg.n_chi, endpoint=False)
    rows, fits = [], {}
    for scan_index, (label, alpha) in enumerate((("reference", 0.0), ("weak", cfg.alpha))):
        ideal = interferogram(chis, cfg.pre, post, Coupling(alpha), cfg.model)
        if cfg.detector is None:
            expected = sampled = None
            fits[label] = fit_fringe(chis, ideal[:, 0])
        else:
            d = cfg.detector
            i_mean = float(ideal[:, 0].mean())
            expected = np.array([expected_counts(min(max(v, 0.0), 1.0), i_mean, d) for v in ideal[:, 0]])
            rng = stream(d.seed, scan_index, 0)
            sampled = sample_counts(expected, rng)
            fits[label] = fit_fringe(chis, sampled)
        for k, chi in enumerate(chis):
            rows.append({
                "scan": label,
                "chi_rad": float(chi),
                "i_o_ideal": float(ideal[k, 0]),
                "i_h_ideal": float(ideal[k, 1]),
                "expected_counts": "" if expected is None else float(expected[k]),
                "sampled_counts": "" if sampled is None else int(sampled[k]),
            })
    shift = fits["weak"].peak_chi - fits["reference"].peak_chi
    shift = float((shift + math.pi) % (2 * math.pi) - math.pi)
    if shift == -math.pi:
        shift = math.pi
    return FringeResult(rows, fits["reference"], fits["weak"], locate_settings(fits["reference"]), shift)


def fringe_quartet(result: FringeResult) -> IntensityQuartet:
    """Quartet read off the fitted weak fringe at the reference-located settings."""
    return read_quartet(result.weak_fit, result.positions)


# -- CSV ------------------------------------------------------------------------


def format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return format(float(v), ".17g")
    return str(v)


def rows_to_csv(rows, columns) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row[c]) for c in columns])
    return buf.getvalue()
