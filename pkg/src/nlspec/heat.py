"""Closed-form heat-trace densities and the two-term coefficient prediction.

Densities are per unit volume (interior) and per unit boundary area after
integrating over the normal depth (boundary layer).  Numerical oracles
(contour and Gauss-Hermite quadrature) live next to the closed forms so the
command line can run both routes.
"""

from __future__ import annotations

import functools
import math
from dataclasses import asdict, dataclass

import numpy as np

from .geometry import LameParameters
from .symbols import trace_q2_scalar

CONTOUR_NODES = 4096


@dataclass(frozen=True)
class HeatDensity:
    t: float
    interior: float
    boundary: float
    bc_sign: int

    def __post_init__(self):
        if self.t <= 0:
            raise ValueError("t must be positive")
        if self.bc_sign not in (-1, 1):
            raise ValueError("bc_sign must be -1 (Dirichlet) or +1 (Neumann)")


@dataclass(frozen=True)
class CoefficientPrediction:
    """Two-term small-t model a0 t^{-n/2} -+ a1 t^{-(n-1)/2}."""

    a0: float
    a1: float
    n: int
    vol: float
    boundary_vol: float
    params: LameParameters

    def trace(self, t, bc_sign: int = -1):
        t = np.asarray(t, dtype=float)
        return self.a0 * t ** (-self.n / 2) + bc_sign * self.a1 * t ** (-(self.n - 1) / 2)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["params"] = {"mu": self.params.mu, "lambda": self.params.lam}
        return d


def _wave_weights(n, params):
    """(multiplicity, modulus) for the shear and pressure branches."""
    return ((n - 1, params.mu), (1, params.pressure_modulus))


def volume_constant(n: int, params: LameParameters) -> float:
    """(n-1)/(4 pi mu)^{n/2} + 1/(4 pi (2mu+lambda))^{n/2}."""
    return sum(w / (4 * math.pi * c) ** (n / 2) for w, c in _wave_weights(n, params))


def boundary_constant(n: int, params: LameParameters) -> float:
    """1/4 [(n-1)/(4 pi mu)^{(n-1)/2} + 1/(4 pi (2mu+lambda))^{(n-1)/2}]."""
    return 0.25 * sum(w / (4 * math.pi * c) ** ((n - 1) / 2)
                      for w, c in _wave_weights(n, params))


def residue_heat_symbol(n: int, params: LameParameters, q, t: float):
    """(1/2 pi i) contour integral of e^{-t tau} Tr q_{-2}: (n-1) e^{-t mu Q} + e^{-t (2mu+lambda) Q}.

    ``q`` may be an array of |xi|^2 values.
    """
    q_arr = np.asarray(q, dtype=float)
    if t <= 0 or np.any(q_arr < 0):
        raise ValueError("requires t > 0 and Q >= 0")
    out = (n - 1) * np.exp(-t * params.mu * q_arr) + np.exp(-t * params.pressure_modulus * q_arr)
    return float(out) if out.ndim == 0 else out


@functools.lru_cache(maxsize=8)
def _legendre_rule(points: int):
    return np.polynomial.legendre.leggauss(points)


def contour_heat_symbol(n: int, params: LameParameters, q: float, t: float,
                        nodes: int = CONTOUR_NODES) -> float:
    """Numerical contour integral around both poles of Tr q_{-2}.

    The rectangle has corners -1 +- iH and 3(2mu+lambda)Q + 1 +- iH with
    H = 10 (1 + Q), traversed counter-clockwise; each side carries a
    Gauss-Legendre rule with ``nodes // 4`` points.
    """
    height = 10.0 * (1.0 + abs(q))
    left, right = -1.0, 3.0 * params.pressure_modulus * q + 1.0
    corners = [complex(left, -height), complex(right, -height),
               complex(right, height), complex(left, height)]
    x, w = _legendre_rule(max(nodes // 4, 8))
    total = 0j
    for a, b in zip(corners, corners[1:] + corners[:1]):
        z = 0.5 * (a + b) + 0.5 * (b - a) * x
        vals = trace_q2_scalar(n, params, q, z)
        total += 0.5 * (b - a) * np.sum(w * np.exp(-t * z) * vals)
    return (total / (2j * math.pi)).real


def interior_density(n: int, params: LameParameters, t: float) -> float:
    """Heat-trace density away from the boundary, (n-1)/(4 pi mu t)^{n/2} + 1/(4 pi (2mu+lambda) t)^{n/2}."""
    if t <= 0:
        raise ValueError("t must be positive")
    return volume_constant(n, params) * t ** (-n / 2)


def gauss_hermite_density(n: int, params: LameParameters, t: float,
                          points: int = 80) -> float:
    """(2 pi)^{-n} times a tensorized Gauss-Hermite integral of residue_heat_symbol over R^n."""
    c_min = min(params.mu, params.pressure_modulus)
    scale = 1.0 / math.sqrt(t * c_min)
    x, w = np.polynomial.hermite.hermgauss(points)
    grids = np.meshgrid(*([x] * n), indexing="ij")
    weights = np.prod(np.meshgrid(*([w] * n), indexing="ij"), axis=0)
    r2 = sum(g * g for g in grids)
    f = residue_heat_symbol(n, params, scale * scale * r2, t)
    integral = np.sum(weights * np.exp(r2) * f) * scale ** n
    return integral / (2 * math.pi) ** n


def boundary_layer_density(n: int, params: LameParameters, t: float, xn: float) -> float:
    """Image-term trace density at distance ``xn`` from a flat boundary."""
    if t <= 0 or xn < 0:
        raise ValueError("requires t > 0 and xn >= 0")
    return sum(w / (4 * math.pi * c * t) ** (n / 2) * math.exp(-(2 * xn) ** 2 / (4 * c * t))
               for w, c in _wave_weights(n, params))


def boundary_density(n: int, params: LameParameters, t: float) -> float:
    """Depth integral of boundary_layer_density: the per-area boundary term at time t."""
    return boundary_constant(n, params) * t ** (-(n - 1) / 2)


def image_tail_bound(n: int, params: LameParameters, t: float, eps: float) -> float:
    """Integral of boundary_layer_density over depths beyond ``eps``.

    Each branch contributes w (4 pi c t)^{-n/2} sqrt(pi c t)/2 erfc(eps/sqrt(c t)),
    which is bounded by the branch's share of ``boundary_density`` times
    exp(-eps^2/(c t)); that is O(t^{1-n/2}) for every fixed eps > 0.
    """
    if eps <= 0 or t <= 0:
        raise ValueError("requires eps > 0 and t > 0")
    total = 0.0
    for w, c in _wave_weights(n, params):
        amp = w / (4 * math.pi * c * t) ** (n / 2)
        total += amp * 0.5 * math.sqrt(math.pi * c * t) * math.erfc(eps / math.sqrt(c * t))
    return total


def heat_density(n: int, params: LameParameters, t: float, bc_sign: int) -> HeatDensity:
    return HeatDensity(t, interior_density(n, params, t), boundary_density(n, params, t), bc_sign)


def predict_coefficients(n: int, params: LameParameters, vol: float,
                         boundary_vol: float) -> CoefficientPrediction:
    if vol <= 0 or boundary_vol < 0:
        raise ValueError("requires vol > 0 and boundary_vol >= 0")
    return CoefficientPrediction(
        a0=volume_constant(n, params) * vol,
        a1=boundary_constant(n, params) * boundary_vol,
        n=n, vol=vol, boundary_vol=boundary_vol, params=params)


def weyl_coefficient(n: int, params: LameParameters, vol: float) -> float:
    """C_W in N(eta) ~ C_W eta^{n/2}."""
    if vol <= 0:
        raise ValueError("vol must be positive")
    return vol / math.gamma(n / 2 + 1) * volume_constant(n, params)
