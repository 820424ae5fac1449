"""Heat-trace sampling, two-term coefficient fits and the Weyl law."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import gammaincc

from .errors import IllConditionedFit, TruncationDominated
from .heat import CoefficientPrediction, predict_coefficients, weyl_coefficient
from .spectra.types import Spectrum

TRUNCATION_RTOL = 1e-3
CONDITION_LIMIT = 1e12
MIN_SAMPLES = 8
DEFAULT_SAMPLES = 24


@dataclass(frozen=True)
class HeatTraceSample:
    t: float
    value: float
    truncation_bound: float = 0.0

    def __post_init__(self):
        if not self.t > 0:
            raise ValueError("t must be positive")
        if self.value < 0 or self.truncation_bound < 0:
            raise ValueError("value and truncation_bound must be nonnegative")


def spectral_window(spectrum: Spectrum) -> float:
    """Largest eta below which the spectrum is known to be complete."""
    if "window" in spectrum.meta:
        return float(spectrum.meta["window"])
    return float(spectrum.eigenvalues[-1]) if spectrum.eigenvalues.size else 0.0


def weyl_tail(spectrum: Spectrum, t: float) -> float:
    """int_{tau_max}^inf e^{-t eta} dN_W(eta) for N_W(eta) = C_W eta^{n/2}."""
    n = spectrum.dim
    cw = weyl_coefficient(n, spectrum.params, spectrum.domain.volume)
    x = t * spectral_window(spectrum)
    # (n/2) C_W t^{-n/2} Gamma(n/2, x), with Gamma(s, x) = gammaincc(s, x) Gamma(s)
    return cw * math.gamma(n / 2 + 1) * t ** (-n / 2) * float(gammaincc(n / 2, x))


def trace_sum(eigenvalues, multiplicities, t: float) -> float:
    """Exactly rounded sum of m e^{-t tau}; independent of ordering."""
    terms = np.asarray(multiplicities, dtype=float) * np.exp(-t * np.asarray(eigenvalues, dtype=float))
    return math.fsum(terms.tolist())


def heat_trace(spectrum: Spectrum, t: float, strict: bool = True) -> HeatTraceSample:
    """Truncated heat trace with a Weyl-law bound on the omitted eigenvalues.

    With ``strict`` a sample whose bound exceeds 1e-3 of the value raises
    TruncationDominated.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    value = trace_sum(spectrum.eigenvalues, spectrum.multiplicities, t)
    bound = weyl_tail(spectrum, t)
    if strict and bound > TRUNCATION_RTOL * value:
        raise TruncationDominated(
            f"t={t:.3g}: omitted-eigenvalue bound {bound:.3g} exceeds "
            f"{TRUNCATION_RTOL:g} of the trace {value:.3g}; increase the eigenvalue count or t_min")
    return HeatTraceSample(float(t), value, bound)


# -- theta-function oracles -------------------------------------------------

def theta_tail(s: float) -> float:
    """sum_{k>=1} e^{-s k^2}, through the Jacobi transformation when s is small."""
    if s <= 0:
        raise ValueError("s must be positive")
    if s >= math.pi:
        k = np.arange(1, 40)
        return math.fsum(np.exp(-s * k * k).tolist())
    k = np.arange(1, 40)
    dual = 1.0 + 2.0 * math.fsum(np.exp(-math.pi ** 2 * k * k / s).tolist())
    return 0.5 * (math.sqrt(math.pi / s) * dual - 1.0)


def interval_trace_theta(length: float, modulus: float, t: float, neumann: bool = False) -> float:
    """Heat trace of modulus (k pi / L)^2, k >= 1 (or k >= 0 when ``neumann``)."""
    s = modulus * t * (math.pi / length) ** 2
    return theta_tail(s) + (1.0 if neumann else 0.0)


def square_vector_laplacian_trace(side: float, mu: float, t: float) -> float:
    """Dirichlet trace of the two-component Laplacian mu pi^2 (j^2 + k^2) / side^2."""
    s = theta_tail(mu * t * (math.pi / side) ** 2)
    return 2.0 * s * s


# -- fitting ---------------------------------------------------------------

@dataclass(frozen=True)
class CoefficientFit:
    a0_hat: float
    a1_hat: float
    sign: int
    t_window: tuple
    residual_norm: float
    n: int
    nuisance: float = 0.0
    prediction: CoefficientPrediction | None = None
    samples: int = 0

    def relative_errors(self) -> dict | None:
        if self.prediction is None:
            return None
        p = self.prediction
        return {"a0": abs(self.a0_hat - p.a0) / p.a0,
                "a1": abs(self.a1_hat - p.a1) / p.a1 if p.a1 else None}

    def to_dict(self) -> dict:
        return {
            "a0_hat": self.a0_hat,
            "a1_hat": self.a1_hat,
            "sign": self.sign,
            "t_window": list(self.t_window),
            "residual_norm": self.residual_norm,
            "nuisance": self.nuisance,
            "n": self.n,
            "samples": self.samples,
            "prediction": (None if self.prediction is None
                           else {"a0": self.prediction.a0, "a1": self.prediction.a1}),
            "relative_errors": self.relative_errors(),
        }

    def model(self, t):
        """Fitted three-term curve."""
        t = np.asarray(t, dtype=float)
        n = self.n
        return (self.a0_hat * t ** (-n / 2) + self.sign * self.a1_hat * t ** (-(n - 1) / 2)
                + self.nuisance * t ** (-(n - 2) / 2))


def design_matrix(t, n: int) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    return np.column_stack([t ** (-n / 2), t ** (-(n - 1) / 2), t ** (-(n - 2) / 2)])


def fit_coefficients(samples: Sequence[HeatTraceSample], n: int,
                     prediction: CoefficientPrediction | None = None) -> CoefficientFit:
    """Relative-error least squares against a0 t^{-n/2} + c1 t^{-(n-1)/2} + c2 t^{-(n-2)/2}."""
    if len(samples) < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples, got {len(samples)}")
    t = np.array([s.t for s in samples])
    y = np.array([s.value for s in samples])
    if t.max() < 10 * t.min():
        raise ValueError("samples must span at least a decade of t")
    if np.any(y <= 0):
        raise ValueError("heat-trace values must be positive")
    a = design_matrix(t, n) / y[:, None]
    col = np.linalg.norm(a, axis=0)
    scaled = a / col
    cond = np.linalg.cond(scaled)
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise IllConditionedFit(f"design condition number {cond:.3g} exceeds {CONDITION_LIMIT:g}")
    coef, *_ = np.linalg.lstsq(scaled, np.ones_like(y), rcond=None)
    coef = coef / col
    resid = design_matrix(t, n) @ coef / y - 1.0
    c1 = float(coef[1])
    return CoefficientFit(
        a0_hat=float(coef[0]), a1_hat=abs(c1), sign=1 if c1 >= 0 else -1,
        t_window=(float(t.min()), float(t.max())),
        residual_norm=float(np.sqrt(np.mean(resid ** 2))),
        n=n, nuisance=float(coef[2]), prediction=prediction, samples=len(samples))


def _first_positive(spectrum: Spectrum) -> float:
    ev = spectrum.eigenvalues
    pos = ev[ev > 1e-8 * max(ev[-1], 1.0)] if ev.size else ev
    if pos.size == 0:
        raise ValueError("spectrum has no positive eigenvalue")
    return float(pos[0])


def default_window(spectrum: Spectrum) -> tuple[float, float]:
    """[t_min, t_max]: t_max = 0.5 / tau_1, t_min the smallest t whose truncation bound
    stays under 1e-3 of the trace."""
    t_max = 0.5 / _first_positive(spectrum)

    def ok(t):
        return weyl_tail(spectrum, t) < TRUNCATION_RTOL * trace_sum(
            spectrum.eigenvalues, spectrum.multiplicities, t)

    if not ok(t_max):
        raise TruncationDominated("spectrum too short for any admissible t; compute more eigenvalues")
    lo, hi = math.log(t_max) - 40.0, math.log(t_max)
    if ok(math.exp(lo)):
        return math.exp(lo), t_max
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if ok(math.exp(mid)):
            hi = mid
        else:
            lo = mid
    t_min = math.exp(hi)
    if t_max < 10 * t_min:
        raise TruncationDominated(
            f"admissible window [{t_min:.3g}, {t_max:.3g}] spans less than a decade; "
            "compute more eigenvalues")
    return t_min, t_max


def sample_times(t_min: float, t_max: float, samples: int = DEFAULT_SAMPLES) -> np.ndarray:
    return np.geomspace(t_min, t_max, samples)


def fit_spectrum(spectrum: Spectrum, window: tuple[float, float] | None = None,
                 samples: int = DEFAULT_SAMPLES) -> tuple[CoefficientFit, list]:
    """Sample the heat trace of ``spectrum`` over ``window`` and fit it."""
    t_min, t_max = window if window is not None else default_window(spectrum)
    data = [heat_trace(spectrum, t) for t in sample_times(t_min, t_max, samples)]
    d = spectrum.domain
    prediction = predict_coefficients(spectrum.dim, spectrum.params, d.volume, d.boundary_volume)
    return fit_coefficients(data, spectrum.dim, prediction), data


def counting_function(spectrum: Spectrum, eta: float) -> int:
    """N(eta): eigenvalues <= eta, with multiplicity."""
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    k = int(np.searchsorted(spectrum.eigenvalues, eta, side="right"))
    return int(spectrum.multiplicities[:k].sum())


def weyl_check(spectrum: Spectrum, fraction: tuple[float, float] = (0.5, 1.0)) -> float:
    """Median of N(tau_k) / (C_W tau_k^{n/2}) over a slice of the spectrum (default top half)."""
    if spectrum.count < 200:
        raise ValueError("weyl_check needs at least 200 eigenvalues")
    n = spectrum.dim
    cw = weyl_coefficient(n, spectrum.params, spectrum.domain.volume)
    ev = spectrum.expanded()
    lo, hi = int(fraction[0] * ev.size), int(fraction[1] * ev.size)
    tau = ev[lo:hi]
    tau = tau[tau > 0]
    cum = np.cumsum(spectrum.multiplicities)
    idx = np.searchsorted(spectrum.eigenvalues, tau, side="right")
    counts = cum[idx - 1]
    return float(np.median(counts / (cw * tau ** (n / 2))))
