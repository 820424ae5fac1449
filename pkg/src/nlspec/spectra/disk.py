"""Dirichlet spectrum of the Navier-Lame operator on a disk.

Helmholtz potentials phi = J_m(alpha r) e^{i m theta} (pressure, alpha^2 = tau/(2mu+lambda))
and psi = J_m(beta r) e^{i m theta} (shear, beta^2 = tau/mu) give u = grad phi + curl psi.
Imposing u_r = u_theta = 0 at r = R leaves, in z = beta R and kappa = sqrt(mu/(2mu+lambda)),

    D_m(z) = kappa z^2 J_m'(kappa z) J_m'(z) - m^2 J_m(kappa z) J_m(z) = 0.

For m = 0 this factors into J_1(kappa z) J_1(z) = 0 (radial and torsional
families, each simple); every m >= 1 root is doubly degenerate.

``polar_fd_disk_spectrum`` is an independent oracle: a second-order radial
Galerkin discretisation of the separated energy for each angular order.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.special import jv, jvp

from ..errors import EigensolverFailure, RootBracketFailure
from ..geometry import LameParameters
from .types import BoundaryCondition, Domain, Spectrum

SCAN_POINTS_PER_SPACING = 40
BISECT_RTOL = 1e-13
RESIDUAL_RTOL = 1e-10


def determinant(m: int, z, kappa: float):
    """D_m(z) in the dimensionless variable z = beta R."""
    z = np.asarray(z, dtype=float)
    a = kappa * z
    return kappa * z * z * jvp(m, a) * jvp(m, z) - m * m * jv(m, a) * jv(m, z)


def determinant_scale(m: int, z, kappa: float):
    """Magnitude envelope of the two products in D_m; never vanishes for z > 0."""
    z = np.asarray(z, dtype=float)
    a = kappa * z
    env_a = np.hypot(jv(m, a), jvp(m, a))
    env_z = np.hypot(jv(m, z), jvp(m, z))
    return (kappa * z * z + m * m) * env_a * env_z


def _bisect(m, kappa, lo, hi):
    f_lo = np.sign(determinant(m, lo, kappa))
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = np.sign(determinant(m, mid, kappa))
        left = f_mid == f_lo
        lo = np.where(left, mid, lo)
        hi = np.where(left, hi, mid)
        if np.all(hi - lo <= BISECT_RTOL * hi):
            break
    root = 0.5 * (lo + hi)
    resid = np.abs(determinant(m, root, kappa))
    bad = resid > RESIDUAL_RTOL * determinant_scale(m, root, kappa)
    if np.any(bad):
        raise RootBracketFailure(
            f"order {m}: bisection residual too large near z={root[bad][0]:.6g}")
    return root


def _lower_bound(m: int) -> float:
    # Dirichlet Lame energy dominates mu |grad u|^2 and the Cartesian components
    # of an order-m field have angular orders m -+ 1, so beta R > j_{m-1,1} > m - 1.
    return max(m - 1.0, 0.0)


def branch_roots(m: int, kappa: float, z_max: float, step: float) -> np.ndarray:
    """All roots of D_m in (lower bound, z_max], located by a sign scan then bisection."""
    z_lo = max(_lower_bound(m), 1e-3)
    if z_lo >= z_max:
        return np.zeros(0)
    z = np.arange(z_lo, z_max + step, step)
    s = np.sign(determinant(m, z, kappa))
    idx = np.nonzero(s[:-1] * s[1:] < 0)[0]
    if idx.size == 0:
        return np.zeros(0)
    roots = _bisect(m, kappa, z[idx], z[idx + 1])
    return roots[roots <= z_max]


def _spacing(kappa):
    # roots of the two Bessel families interlace: pi per family in z and kappa z
    return math.pi / (1.0 + kappa)


def disk_spectrum(radius: float, params: LameParameters, m_max: int | None = None,
                  k_max: int | None = None, tau_max: float | None = None,
                  points_per_spacing: int = SCAN_POINTS_PER_SPACING) -> Spectrum:
    """Dirichlet eigenvalues of the disk, complete up to a cutoff.

    Either give ``tau_max`` (every eigenvalue <= tau_max is returned) or
    ``(m_max, k_max)``: the first ``k_max`` roots of each order ``m <= m_max``
    are located and the result is truncated to the largest window in which
    the list is provably complete.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    kappa = math.sqrt(params.mu / params.pressure_modulus)
    step = _spacing(kappa) / points_per_spacing
    scale = params.mu / radius ** 2  # tau = scale * z^2

    if tau_max is not None:
        z_max = math.sqrt(tau_max / scale)
        per_order = []
        m = 0
        while _lower_bound(m) < z_max:
            per_order.append(branch_roots(m, kappa, z_max, step))
            m += 1
        window = tau_max
    else:
        if m_max is None or k_max is None or m_max < 0 or k_max < 1:
            raise ValueError("give tau_max, or m_max >= 0 and k_max >= 1")
        per_order = []
        for m in range(m_max + 1):
            z_hi = _lower_bound(m) + (k_max + 2) * _spacing(kappa) * 2
            while True:
                r = branch_roots(m, kappa, z_hi, step)
                if r.size >= k_max:
                    break
                z_hi *= 1.5
                if z_hi > 1e6:
                    raise RootBracketFailure(f"order {m}: could not find {k_max} roots")
            per_order.append(r[:k_max])
        z_window = min(min(r[-1] for r in per_order), _lower_bound(m_max + 1))
        window = scale * z_window ** 2

    taus, mults = [], []
    for m, roots in enumerate(per_order):
        t = scale * roots ** 2
        t = t[t <= window * (1 + 1e-14)]
        taus.append(t)
        mults.append(np.full(t.size, 1 if m == 0 else 2))
    taus = np.concatenate(taus) if taus else np.zeros(0)
    mults = np.concatenate(mults) if mults else np.zeros(0, dtype=int)
    order = np.argsort(taus, kind="stable")
    meta = {"window": float(window), "orders": len(per_order)}
    return Spectrum(taus[order], mults[order], BoundaryCondition.DIRICHLET, params,
                    Domain.disk(radius), "bessel-roots", meta)


# -- independent radial Galerkin oracle ------------------------------------

_GAUSS3 = np.polynomial.legendre.leggauss(3)


def _radial_matrices(m, params, radius, n_r):
    """Stiffness and lumped mass for (U, V) with u_r = U cos m theta, u_theta = V sin m theta."""
    mu, lam = params.mu, params.lam
    h = radius / n_r
    r_nodes = np.linspace(0.0, radius, n_r + 1)
    xg, wg = _GAUSS3
    rows, cols, vals = [], [], []
    mass = np.zeros(2 * (n_r + 1))
    for e in range(n_r):
        ra, rb = r_nodes[e], r_nodes[e + 1]
        ke = np.zeros((4, 4))
        for xq, wq in zip(xg, wg):
            r = 0.5 * (ra + rb) + 0.5 * h * xq
            w = 0.5 * h * wq * r
            pa, pb = (rb - r) / h, (r - ra) / h
            da, db = -1.0 / h, 1.0 / h
            # local dofs: U_a, V_a, U_b, V_b
            u = np.array([pa, 0, pb, 0])
            v = np.array([0, pa, 0, pb])
            du = np.array([da, 0, db, 0])
            dv = np.array([0, da, 0, db])
            b = [du, (m * u + v) / r, dv, (m * v + u) / r]
            div = du + (u + m * v) / r
            ke += w * (mu * sum(np.outer(x, x) for x in b) + (mu + lam) * np.outer(div, div))
            mass[2 * e: 2 * e + 4] += w * np.array([pa, pa, pb, pb])
        dofs = np.arange(2 * e, 2 * e + 4)
        rows.append(np.repeat(dofs, 4))
        cols.append(np.tile(dofs, 4))
        vals.append(ke.ravel())
    k = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                      shape=(mass.size, mass.size))
    return k, mass


def _radial_basis(m, n_r):
    """Columns map free dofs to (U_i, V_i); Dirichlet at r = R and regularity at r = 0."""
    size = 2 * (n_r + 1)
    cols = []
    rows = []
    data = []
    c = 0
    if m == 1:
        # a translation has U(0) = -V(0); finite energy forces U + V = 0 at the centre
        rows += [0, 1]
        cols += [0, 0]
        data += [1.0, -1.0]
        c = 1
    for i in range(2, 2 * n_r):
        rows.append(i)
        cols.append(c)
        data.append(1.0)
        c += 1
    return sp.csr_matrix((data, (rows, cols)), shape=(size, c))


def radial_order_eigenvalues(m: int, params: LameParameters, radius: float, count: int,
                             n_r: int = 2000) -> np.ndarray:
    """Lowest ``count`` eigenvalues of the order-m radial problem (one polarisation)."""
    k, mass = _radial_matrices(m, params, radius, n_r)
    t = _radial_basis(m, n_r)
    kr = (t.T @ k @ t).tocsc()
    mr = t.T @ sp.diags(mass) @ t
    d = 1.0 / np.sqrt(mr.diagonal())
    a = sp.diags(d) @ kr @ sp.diags(d)
    a = 0.5 * (a + a.T)
    count = min(count, a.shape[0] - 2)
    try:
        vals = spla.eigsh(a.tocsc(), k=count, sigma=0.0, which="LM",
                          return_eigenvectors=False)
    except Exception as exc:  # noqa: BLE001 - ARPACK raises several types
        raise EigensolverFailure(f"radial order {m}: {exc}") from exc
    return np.sort(vals)


def polar_fd_disk_spectrum(radius: float, params: LameParameters, count: int,
                           n_r: int = 2000) -> Spectrum:
    """First ``count`` Dirichlet eigenvalues (with multiplicity) from the radial oracle."""
    collected = []
    m = 0
    while True:
        bound = params.mu * (_lower_bound(m) / radius) ** 2
        if len(collected) >= count and bound > sorted(collected)[count - 1]:
            break
        vals = radial_order_eigenvalues(m, params, radius, count, n_r)
        reps = 1 if m == 0 else 2
        collected.extend(np.repeat(vals, reps))
        m += 1
    ev = np.sort(np.array(collected))[:count]
    return Spectrum(ev, np.ones(count, dtype=int), BoundaryCondition.DIRICHLET, params,
                    Domain.disk(radius), "finite-difference", {"grid": f"polar n_r={n_r}"})
