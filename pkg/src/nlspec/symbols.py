"""Full symbol of the Navier-Lame operator and the resolvent parametrix.

For a metric jet at a point, the operator

    P u = mu nabla^* nabla u - (mu + lambda) grad div u - mu Ric(u)

has full symbol ``A(x, xi)`` (a 2nd order polynomial in ``xi``).  Writing
``tau I - A = a2 + a1 + a0`` by homogeneity in ``(xi, tau^(1/2))``, the
resolvent parametrix terms obey

    q_{-2}   = a2^{-1}
    q_{-2-l} = -a2^{-1} sum_{j<l, j+|alpha|+2-k=l} (d_xi^alpha a_k)(D_x^alpha q_{-2-j}) / alpha!

with ``D_x = -i d/dx``.  x-derivatives of the parametrix terms are taken
by finite differences over a :class:`~nlspec.geometry.MetricField`.
"""

from __future__ import annotations

import itertools
import math
from functools import partial

import numpy as np

from . import _fd
from .errors import PoleProximity
from .geometry import (
    DEFAULT_FD_STEP,
    LameParameters,
    MetricField,
    MetricJet,
    christoffel,
    christoffel_derivative,
    inverse_metric,
    jet_from_field,
    ricci_mixed,
)

POLE_RTOL = 1e-12
MAX_ORDER = 2


def _xi(xi, n):
    xi = np.asarray(xi, dtype=float).reshape(-1)
    if xi.shape != (n,) or not np.all(np.isfinite(xi)):
        raise ValueError(f"cotangent vector must be a finite {n}-vector")
    return xi


def xi_norm2(jet: MetricJet, xi) -> float:
    """|xi|^2_g = g^{lm} xi_l xi_m."""
    xi = _xi(xi, jet.dim)
    return float(xi @ inverse_metric(jet) @ xi)


def gram_block(jet: MetricJet, xi) -> np.ndarray:
    """G_jk = sum_r g^{jr} xi_r xi_k (rank one, G @ G = |xi|^2 G)."""
    xi = _xi(xi, jet.dim)
    return np.outer(inverse_metric(jet) @ xi, xi)


def _first_order_blocks(jet, xi):
    """The three xi-linear matrices appearing in the symbol."""
    n = jet.dim
    ginv = inverse_metric(jet)
    gam = christoffel(jet)
    trace_term = np.einsum("ml,sml,s->", ginv, gam, xi) * np.eye(n)
    # B1[j,k] = 2 g^{ml} Gamma^j_km xi_l
    b1 = 2.0 * np.einsum("ml,jkm,l->jk", ginv, gam, xi)
    # B2[j,k] = g^{jm} Gamma^l_kl xi_m
    b2 = np.outer(ginv @ xi, np.einsum("lkl->k", gam))
    return trace_term, b1, b2


def _zeroth_order_blocks(jet):
    ginv = inverse_metric(jet)
    gam = christoffel(jet)
    dgam = christoffel_derivative(jet)
    # C[j,k] = g^{ml} (d_m Gamma^j_kl + Gamma^j_hl Gamma^h_km - Gamma^j_kh Gamma^h_ml)
    c = (np.einsum("ml,jklm->jk", ginv, dgam)
         + np.einsum("ml,jhl,hkm->jk", ginv, gam, gam)
         - np.einsum("ml,jkh,hml->jk", ginv, gam, gam))
    # D[j,k] = g^{jm} d_m Gamma^l_kl
    d = np.einsum("jm,lklm->jk", ginv, dgam)
    return c, d, ricci_mixed(jet)


def symbol_A(jet: MetricJet, params: LameParameters, xi) -> np.ndarray:
    """Full symbol A_g(x, xi) of the operator at the jet's base point."""
    mu, lam = params.mu, params.lam
    xi = _xi(xi, jet.dim)
    n = jet.dim
    q = xi_norm2(jet, xi)
    tr1, b1, b2 = _first_order_blocks(jet, xi)
    c, d, ric = _zeroth_order_blocks(jet)
    return (mu * q * np.eye(n) + (mu + lam) * gram_block(jet, xi)
            + 1j * mu * tr1 - 1j * mu * b1 - 1j * (mu + lam) * b2
            - mu * c - (mu + lam) * d - mu * ric)


def a2_symbol(jet, params, xi, tau) -> np.ndarray:
    n = jet.dim
    return ((tau - params.mu * xi_norm2(jet, xi)) * np.eye(n)
            - (params.mu + params.lam) * gram_block(jet, xi)).astype(complex)


def a1_symbol(jet, params, xi) -> np.ndarray:
    tr1, b1, b2 = _first_order_blocks(jet, _xi(xi, jet.dim))
    mu, lam = params.mu, params.lam
    return -1j * mu * tr1 + 1j * mu * b1 + 1j * (mu + lam) * b2


def a0_symbol(jet, params) -> np.ndarray:
    c, d, ric = _zeroth_order_blocks(jet)
    mu, lam = params.mu, params.lam
    return (mu * c + (mu + lam) * d + mu * ric).astype(complex)


def split_symbol(jet, params, xi, tau):
    """Return ``(a2, a1, a0)`` with ``a2 + a1 + a0 == tau I - A_g``."""
    return a2_symbol(jet, params, xi, tau), a1_symbol(jet, params, xi), a0_symbol(jet, params)


def _check_poles(q, tau, params):
    tol = POLE_RTOL * (1.0 + abs(tau))
    for name, speed in (("shear", params.mu), ("pressure", params.pressure_modulus)):
        if abs(tau - speed * q) < tol:
            raise PoleProximity(
                f"tau={tau} lies on the {name} ray {speed}*|xi|^2 = {speed * q}")


def resolvent_weights(q, params, tau):
    """Scalars (s1, s2) with a2^{-1} = s1 I + s2 G."""
    _check_poles(q, tau, params)
    d_shear = tau - params.mu * q
    d_press = tau - params.pressure_modulus * q
    return 1.0 / d_shear, (params.mu + params.lam) / (d_shear * d_press)


def invert_a2(jet, params, xi, tau) -> np.ndarray:
    """Closed-form inverse of the principal part: s1 I + s2 G."""
    q = xi_norm2(jet, xi)
    s1, s2 = resolvent_weights(q, params, complex(tau))
    return s1 * np.eye(jet.dim) + s2 * gram_block(jet, xi)


def trace_q2(jet, params, xi, tau) -> complex:
    """Tr q_{-2} = n/(tau - mu Q) + (mu+lambda) Q / ((tau - mu Q)(tau - (2mu+lambda) Q))."""
    q = xi_norm2(jet, xi)
    tau = complex(tau)
    _check_poles(q, tau, params)
    return (jet.dim / (tau - params.mu * q)
            + (params.mu + params.lam) * q
            / ((tau - params.mu * q) * (tau - params.pressure_modulus * q)))


def trace_q2_scalar(n: int, params: LameParameters, q: float, tau):
    """Tr q_{-2} as a function of |xi|^2 only; ``tau`` may be an array."""
    if np.ndim(tau):
        tau = np.asarray(tau, dtype=complex)
        tol = POLE_RTOL * (1.0 + np.abs(tau))
        for speed in (params.mu, params.pressure_modulus):
            hit = np.abs(tau - speed * q) < tol
            if hit.any():
                _check_poles(q, complex(tau[hit][0]), params)
    else:
        tau = complex(tau)
        _check_poles(q, tau, params)
    return (n / (tau - params.mu * q)
            + (params.mu + params.lam) * q
            / ((tau - params.mu * q) * (tau - params.pressure_modulus * q)))


# -- xi-derivatives of the homogeneous pieces -------------------------------

def multi_indices(n: int, order: int):
    """All multi-indices alpha in N^n with |alpha| == order."""
    for combo in itertools.combinations_with_replacement(range(n), order):
        alpha = [0] * n
        for p in combo:
            alpha[p] += 1
        yield tuple(alpha)


def factorial(alpha) -> int:
    return math.prod(math.factorial(a) for a in alpha)


def xi_derivative(jet, params, xi, tau, k: int, alpha) -> np.ndarray:
    """Analytic d_xi^alpha a_k."""
    n = jet.dim
    order = sum(alpha)
    idx = [p for p, a in enumerate(alpha) for _ in range(a)]
    if order == 0:
        return split_symbol(jet, params, xi, tau)[2 - k]
    if k == 0 or order > k:
        return np.zeros((n, n), dtype=complex)
    ginv = inverse_metric(jet)
    xi = _xi(xi, n)
    if k == 1:
        return a1_symbol(jet, params, np.eye(n)[idx[0]])
    mu, lam = params.mu, params.lam
    eye = np.eye(n)
    if order == 1:
        p = idx[0]
        dq = 2.0 * ginv[p] @ xi
        dg_ = np.outer(ginv[:, p], xi) + np.outer(ginv @ xi, eye[p])
    else:
        p, r = idx
        dq = 2.0 * ginv[p, r]
        dg_ = np.outer(ginv[:, p], eye[r]) + np.outer(ginv[:, r], eye[p])
    return (-mu * dq * eye - (mu + lam) * dg_).astype(complex)


# -- recursion --------------------------------------------------------------

def recursion_terms(l: int, n: int):
    """(j, alpha, k) triples with j < l and j + |alpha| + 2 - k == l, j ascending."""
    out = []
    for j in range(l):
        for k in (0, 1, 2):
            order = l - j - 2 + k
            if order < 0:
                continue
            for alpha in multi_indices(n, order):
                out.append((j, alpha, k))
    return out


def _q_at(field, params, xi, tau, l, h, y):
    """q_{-2-l} at point y; helper closed over by finite differences."""
    return resolvent_term(field, params, y, xi, tau, l, h=h)


def _dx(field, params, xi, tau, j, alpha, h, x):
    """D_x^alpha q_{-2-j} at x by finite differences with step h."""
    f = partial(_q_at, field, params, xi, tau, j, h)
    return (-1j) ** sum(alpha) * _fd.partial(f, x, alpha, h)


def resolvent_term(field: MetricField, params: LameParameters, x, xi, tau, l: int,
                   h: float = DEFAULT_FD_STEP) -> np.ndarray:
    """Parametrix term q_{-2-l}(x, xi, tau) for l in {0, 1, 2}."""
    if not 0 <= l <= MAX_ORDER:
        raise ValueError(f"recursion order must be in 0..{MAX_ORDER}, got {l}")
    x = np.asarray(x, dtype=float)
    jet = jet_from_field(field, x, h) if l else _value_jet(field, x)
    q2 = invert_a2(jet, params, xi, tau)
    if l == 0:
        return q2
    acc = np.zeros((field.dim, field.dim), dtype=complex)
    for j, alpha, k in recursion_terms(l, field.dim):
        dak = xi_derivative(jet, params, xi, tau, k, alpha)
        if not np.any(dak):
            continue
        dq = _dx(field, params, xi, tau, j, alpha, h, x)
        acc += dak @ dq / factorial(alpha)
    return -q2 @ acc


def _value_jet(field, x):
    return MetricJet(field(x))


def q3_closed_form(field, params, x, xi, tau, h=DEFAULT_FD_STEP) -> np.ndarray:
    """-a2^{-1} (a1 a2^{-1} - i sum_l d_{xi_l} a2 d_{x_l} a2^{-1}), assembled directly."""
    x = np.asarray(x, dtype=float)
    n = field.dim
    jet = jet_from_field(field, x, h)
    inv = invert_a2(jet, params, xi, tau)
    inner = a1_symbol(jet, params, xi) @ inv
    for p in range(n):
        alpha = tuple(int(i == p) for i in range(n))
        da2 = xi_derivative(jet, params, xi, tau, 2, alpha)
        dinv = _fd.first(lambda y: invert_a2(_value_jet(field, y), params, xi, tau), x, p, h)
        inner = inner - 1j * da2 @ dinv
    return -inv @ inner


def parametrix_defect(field: MetricField, params: LameParameters, x, xi, tau, L: int,
                      h: float = DEFAULT_FD_STEP, check_step: float | None = None) -> float:
    """Residual of the homogeneous parametrix equations for 1 <= l <= L.

    The parametrix terms come from :func:`resolvent_term` (step ``h``).  The
    correction sums are re-derived term by term with an independent
    finite-difference step ``check_step`` (default ``2 h``), so the residual
    measures discretisation and implementation error rather than vanishing
    by construction.
    """
    if not 1 <= L <= MAX_ORDER:
        raise ValueError(f"defect order must be in 1..{MAX_ORDER}")
    hc = 2.0 * h if check_step is None else check_step
    x = np.asarray(x, dtype=float)
    n = field.dim
    jet = jet_from_field(field, x, hc)
    a2, a1, a0 = split_symbol(jet, params, xi, tau)
    unit = np.eye(n)
    # D_x^alpha q_{-2-j}, with q evaluated using step h and differenced with hc
    def d(j, alpha):
        f = partial(_q_at, field, params, xi, tau, j, h)
        return (-1j) ** sum(alpha) * _fd.partial(f, x, alpha, hc)

    def da(k, alpha):
        return xi_derivative(jet, params, xi, tau, k, alpha)

    q = {j: resolvent_term(field, params, x, xi, tau, j, h) for j in range(L + 1)}
    worst = 0.0
    for l in range(1, L + 1):
        res = a2 @ q[l]
        if l == 1:
            res = res + a1 @ q[0]
            for p in range(n):
                e = tuple(unit[p].astype(int))
                res = res + da(2, e) @ d(0, e)
        else:
            res = res + a0 @ q[0] + a1 @ q[1]
            for p in range(n):
                e = tuple(unit[p].astype(int))
                res = res + da(1, e) @ d(0, e) + da(2, e) @ d(1, e)
                for r in range(n):
                    # full double sum over ordered pairs: d^2/dxi_p dxi_r with weight 1/2
                    ee = tuple((unit[p] + unit[r]).astype(int))
                    res = res + 0.5 * da(2, ee) @ d(0, ee)
        worst = max(worst, float(np.max(np.abs(res))))
    return worst
