"""Pointwise Riemannian data: Lame parameters, metric 2-jets and their curvature.

Index conventions used throughout the package::

    dg[j, k, l]       = d g_jk / d x_l
    d2g[j, k, l, m]   = d^2 g_jk / d x_l d x_m
    gamma[j, l, k]    = Gamma^j_lk
    dgamma[j, l, k, m] = d Gamma^j_lk / d x_m
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import _fd
from .errors import ChartError, InvalidMetric, InvalidParameters

DEFAULT_FD_STEP = 1e-3


@dataclass(frozen=True)
class LameParameters:
    """Shear modulus ``mu`` and second Lame parameter ``lam``."""

    mu: float
    lam: float

    def __post_init__(self):
        if not (math.isfinite(self.mu) and math.isfinite(self.lam)):
            raise InvalidParameters("Lame parameters must be finite")
        if self.mu <= 0:
            raise InvalidParameters(f"mu must be positive, got {self.mu}")
        if self.mu + self.lam < 0:
            raise InvalidParameters(
                f"mu + lambda must be >= 0, got {self.mu + self.lam}")

    @property
    def pressure_modulus(self) -> float:
        """2 mu + lambda, the longitudinal wave modulus."""
        return 2.0 * self.mu + self.lam

    @property
    def admissible(self) -> bool:
        """Strict ellipticity mu + lambda > 0."""
        return self.mu + self.lam > 0

    @property
    def laplacian_limit(self) -> bool:
        """mu + lambda == 0: the operator is mu times the vector Laplacian."""
        return self.mu + self.lam == 0

    @property
    def flag(self) -> str:
        return "strictly-elliptic" if self.admissible else "laplacian-limit"


@dataclass(frozen=True, eq=False)
class MetricJet:
    """Metric tensor and its first two coordinate derivatives at one point."""

    g: np.ndarray
    dg: Optional[np.ndarray] = None
    d2g: Optional[np.ndarray] = None
    dim: int = field(init=False)

    def __post_init__(self):
        g = np.array(self.g, dtype=float, ndmin=2)
        n = g.shape[0]
        if g.shape != (n, n) or n < 1:
            raise InvalidMetric(f"metric must be square, got shape {g.shape}")
        if not np.all(np.isfinite(g)):
            raise InvalidMetric("metric has non-finite entries")
        if not np.allclose(g, g.T, rtol=1e-12, atol=1e-14):
            raise InvalidMetric("metric is not symmetric")
        try:
            np.linalg.cholesky(g)
        except np.linalg.LinAlgError:
            raise InvalidMetric("metric is not positive definite") from None
        dg = np.zeros((n,) * 3) if self.dg is None else np.array(self.dg, dtype=float)
        d2g = np.zeros((n,) * 4) if self.d2g is None else np.array(self.d2g, dtype=float)
        if dg.shape != (n,) * 3 or d2g.shape != (n,) * 4:
            raise InvalidMetric("derivative arrays do not match the metric dimension")
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "dg", dg)
        object.__setattr__(self, "d2g", d2g)
        object.__setattr__(self, "dim", n)

    @classmethod
    def flat(cls, n: int) -> "MetricJet":
        return cls(np.eye(n))


@dataclass(frozen=True)
class MetricField:
    """A metric given as a function of coordinates on a chart.

    ``eval`` must be re-entrant; it is called concurrently-safe style from
    nested finite-difference stencils.
    """

    dim: int
    eval: Callable[[np.ndarray], np.ndarray]
    name: str = "custom"

    def __call__(self, x) -> np.ndarray:
        try:
            g = np.asarray(self.eval(np.asarray(x, dtype=float)), dtype=float)
        except Exception as exc:  # noqa: BLE001 - any user callback failure
            raise ChartError(f"metric field {self.name!r} failed at {x}: {exc}") from exc
        if g.shape != (self.dim, self.dim) or not np.all(np.isfinite(g)):
            raise ChartError(f"metric field {self.name!r} returned invalid value at {x}")
        return g


def flat_field(n: int) -> MetricField:
    eye = np.eye(n)
    return MetricField(n, lambda x: eye, name=f"flat{n}")


def polar_field() -> MetricField:
    """Euclidean plane in polar coordinates (r, theta): diag(1, r^2)."""
    return MetricField(2, lambda x: np.diag([1.0, x[0] ** 2]), name="polar")


def sphere_field(radius: float = 1.0) -> MetricField:
    """Round 2-sphere in (theta, phi): radius^2 diag(1, sin^2 theta)."""
    r2 = radius * radius
    return MetricField(2, lambda x: r2 * np.diag([1.0, np.sin(x[0]) ** 2]),
                       name=f"sphere(r={radius})")


def inverse_metric(jet: MetricJet) -> np.ndarray:
    """g^{jk}; symmetrized to remove round-off asymmetry."""
    ginv = np.linalg.solve(jet.g, np.eye(jet.dim))
    return 0.5 * (ginv + ginv.T)


def christoffel(jet: MetricJet) -> np.ndarray:
    """Gamma^j_lk = 1/2 g^jm (d_l g_km + d_k g_lm - d_m g_lk)."""
    ginv = inverse_metric(jet)
    dg = jet.dg
    # lowered[m, l, k] = d_l g_km + d_k g_lm - d_m g_lk
    lowered = (np.einsum("kml->mlk", dg) + np.einsum("lmk->mlk", dg)
               - np.einsum("lkm->mlk", dg))
    return 0.5 * np.einsum("jm,mlk->jlk", ginv, lowered)


def christoffel_derivative(jet: MetricJet) -> np.ndarray:
    """d Gamma^j_lk / d x_p from the exact chain rule through g, dg, d2g."""
    ginv = inverse_metric(jet)
    dg, d2g = jet.dg, jet.d2g
    lowered = (np.einsum("kml->mlk", dg) + np.einsum("lmk->mlk", dg)
               - np.einsum("lkm->mlk", dg))
    dlowered = (np.einsum("kmlp->mlkp", d2g) + np.einsum("lmkp->mlkp", d2g)
                - np.einsum("lkmp->mlkp", d2g))
    # d_p g^{jm} = -g^{ja} d_p g_ab g^{bm}
    dginv = -np.einsum("ja,abp,bm->jmp", ginv, dg, ginv)
    return 0.5 * (np.einsum("jmp,mlk->jlkp", dginv, lowered)
                  + np.einsum("jm,mlkp->jlkp", ginv, dlowered))


def ricci_lower(jet: MetricJet) -> np.ndarray:
    """R_jk = d_l Gamma^l_jk - d_k Gamma^l_jl + Gamma^l_sl Gamma^s_jk - Gamma^l_sk Gamma^s_jl."""
    gam = christoffel(jet)
    dgam = christoffel_derivative(jet)
    return (np.einsum("ljkl->jk", dgam)
            - np.einsum("ljlk->jk", dgam)
            + np.einsum("lsl,sjk->jk", gam, gam)
            - np.einsum("lsk,sjl->jk", gam, gam))


def ricci_mixed(jet: MetricJet) -> np.ndarray:
    """Mixed Ricci tensor R^j_k = g^jl R_lk."""
    return inverse_metric(jet) @ ricci_lower(jet)


def jet_from_field(field: MetricField, x, h: float = DEFAULT_FD_STEP) -> MetricJet:
    """Build a 2-jet of ``field`` at ``x`` by fourth-order central differences."""
    if h <= 0:
        raise ValueError("finite-difference step must be positive")
    x = np.asarray(x, dtype=float)
    n = field.dim
    if x.shape != (n,):
        raise ChartError(f"point {x} does not match field dimension {n}")
    g = field(x)
    dg = np.empty((n, n, n))
    d2g = np.empty((n, n, n, n))
    for p in range(n):
        dg[:, :, p] = _fd.first(field, x, p, h)
        for q in range(p, n):
            d2g[:, :, p, q] = _fd.second(field, x, p, q, h)
            d2g[:, :, q, p] = d2g[:, :, p, q]
    g = 0.5 * (g + g.T)
    dg = 0.5 * (dg + dg.transpose(1, 0, 2))
    d2g = 0.5 * (d2g + d2g.transpose(1, 0, 2, 3))
    return MetricJet(g, dg, d2g)
