"""Volume and boundary area from a spectrum, and the isoperimetric ball test."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .heat import boundary_constant, volume_constant
from .trace import CoefficientFit, fit_spectrum
from .spectra.types import Spectrum

BALL = "Ball"
NOT_BALL = "NotBall"
INCONCLUSIVE = "Inconclusive"


class IsoperimetricWarning(UserWarning):
    """Estimated ratio lies below the ball value by more than the tolerance allows."""


@dataclass(frozen=True)
class GeometryEstimate:
    vol_hat: float
    boundary_vol_hat: float
    n: int
    bc_sign: int
    confidence: float
    fit: CoefficientFit | None = None

    def to_dict(self) -> dict:
        return {"vol_hat": self.vol_hat, "boundary_vol_hat": self.boundary_vol_hat,
                "n": self.n, "bc_sign": self.bc_sign, "confidence": self.confidence}


def geometry_from_fit(fit: CoefficientFit, params) -> GeometryEstimate:
    n = fit.n
    vol = fit.a0_hat / volume_constant(n, params)
    bvol = fit.a1_hat / boundary_constant(n, params)
    if not vol > 0:
        raise ValueError(f"fitted volume coefficient is not positive ({fit.a0_hat:g})")
    return GeometryEstimate(vol, bvol, n, fit.sign, fit.residual_norm, fit)


def estimate_geometry(spectrum: Spectrum, params=None, window=None) -> GeometryEstimate:
    """Invert the two-term heat trace: a0 -> volume, a1 -> boundary area.

    ``params`` defaults to the parameters stored on the spectrum.
    """
    params = params or spectrum.params
    fit, _ = fit_spectrum(spectrum, window=window)
    return geometry_from_fit(fit, params)


def ball_ratio(n: int) -> float:
    """|dB|/|B|^{(n-1)/n} for the unit ball, i.e. n omega_n^{1/n}."""
    omega = math.pi ** (n / 2) / math.gamma(n / 2 + 1)
    return n * omega ** (1.0 / n)


@dataclass(frozen=True)
class RigidityVerdict:
    ratio: float
    ball_ratio: float
    verdict: str
    margin: float
    tolerance: float
    warning: str | None = None


def ball_rigidity_verdict(estimate: GeometryEstimate, tolerance: float = 0.05) -> RigidityVerdict:
    if not 0 < tolerance < 0.5:
        raise ValueError("tolerance must lie in (0, 0.5)")
    n = estimate.n
    ratio = estimate.boundary_vol_hat / estimate.vol_hat ** ((n - 1) / n)
    ball = ball_ratio(n)
    margin = ratio / ball - 1.0
    note = None
    if ratio < ball * (1 - 2 * tolerance):
        verdict = INCONCLUSIVE
        note = (f"ratio {ratio:.6g} is below the isoperimetric floor {ball:.6g} "
                "by more than twice the tolerance; the estimate is inconsistent")
        warnings.warn(note, IsoperimetricWarning, stacklevel=2)
    elif ratio <= ball * (1 + tolerance):
        verdict = BALL
    elif ratio > ball * (1 + 2 * tolerance):
        verdict = NOT_BALL
    else:
        verdict = INCONCLUSIVE
    return RigidityVerdict(ratio, ball, verdict, margin, tolerance, note)


def verdict_report(estimate: GeometryEstimate, verdict: RigidityVerdict) -> dict:
    out = {"vol_hat": estimate.vol_hat, "boundary_vol_hat": estimate.boundary_vol_hat,
           "ratio": verdict.ratio, "ball_ratio": verdict.ball_ratio,
           "verdict": verdict.verdict, "margin": verdict.margin,
           "confidence": estimate.confidence, "tolerance": verdict.tolerance}
    if verdict.warning:
        out["warning"] = verdict.warning
    return out
