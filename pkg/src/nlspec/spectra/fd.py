"""Rectangle eigenvalues from a strain-energy discretisation on a uniform grid.

The stiffness is assembled cell by cell from  2 mu eps:eps + lambda (tr eps)^2
(bilinear displacement per cell, 2x2 Gauss points), with nodal (lumped) mass.
This keeps the matrix symmetric positive semidefinite, makes the traction-free
condition natural, and leaves exactly the three rigid motions in the Neumann
kernel. The scheme is second-order accurate on a uniform grid.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..errors import DiscretizationTooCoarse, EigensolverFailure
from ..geometry import LameParameters
from .types import BoundaryCondition, Domain, Spectrum

MIN_GRID = 16
DENSE_LIMIT = 2500


def _element_stiffness(hx: float, hy: float, params: LameParameters) -> np.ndarray:
    """8x8 cell matrix; local nodes (0,0),(1,0),(0,1),(1,1), dofs interleaved (ux, uy)."""
    mu, lam = params.mu, params.lam
    g = 1.0 / np.sqrt(3.0)
    ke = np.zeros((8, 8))
    corners = [(0, 0), (1, 0), (0, 1), (1, 1)]
    for gx in (-g, g):
        for gy in (-g, g):
            s, t = 0.5 * (1 + gx), 0.5 * (1 + gy)
            b = np.zeros((3, 8))  # rows: eps_xx, eps_yy, 2 eps_xy
            for a, (cx, cy) in enumerate(corners):
                fx = s if cx else 1 - s
                fy = t if cy else 1 - t
                dx = (1 if cx else -1) / hx * fy
                dy = (1 if cy else -1) / hy * fx
                b[0, 2 * a] = dx
                b[1, 2 * a + 1] = dy
                b[2, 2 * a] = dy
                b[2, 2 * a + 1] = dx
            d = np.array([[2 * mu + lam, lam, 0], [lam, 2 * mu + lam, 0], [0, 0, mu]])
            ke += 0.25 * hx * hy * b.T @ d @ b
    return ke


def grid_shape(a: float, b: float, grid_n: int) -> tuple[int, int]:
    """Cells along x and y; ``grid_n`` cells across the shorter side."""
    short = min(a, b)
    nx = max(1, int(round(grid_n * a / short)))
    ny = max(1, int(round(grid_n * b / short)))
    return nx, ny


def assemble(a: float, b: float, params: LameParameters, grid_n: int):
    """Sparse stiffness and lumped mass diagonal over all nodes."""
    nx, ny = grid_shape(a, b, grid_n)
    hx, hy = a / nx, b / ny
    ke = _element_stiffness(hx, hy, params)
    ix, iy = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
    n00 = (iy * (nx + 1) + ix).ravel()
    nodes = np.stack([n00, n00 + 1, n00 + nx + 1, n00 + nx + 2], axis=1)
    dofs = np.empty((nodes.shape[0], 8), dtype=np.int64)
    dofs[:, 0::2] = 2 * nodes
    dofs[:, 1::2] = 2 * nodes + 1
    rows = np.repeat(dofs, 8, axis=1).ravel()
    cols = np.tile(dofs, (1, 8)).ravel()
    vals = np.tile(ke.ravel(), nodes.shape[0])
    size = 2 * (nx + 1) * (ny + 1)
    k = sp.csr_matrix((vals, (rows, cols)), shape=(size, size))
    mass = np.zeros(size)
    np.add.at(mass, dofs.ravel(), 0.25 * hx * hy)
    return k, mass, (nx, ny)


def _free_dofs(nx: int, ny: int, bc: BoundaryCondition) -> np.ndarray:
    if bc is BoundaryCondition.NEUMANN:
        return np.arange(2 * (nx + 1) * (ny + 1))
    ix, iy = np.meshgrid(np.arange(1, nx), np.arange(1, ny), indexing="ij")
    node = (iy * (nx + 1) + ix).ravel()
    return np.sort(np.concatenate([2 * node, 2 * node + 1]))


def rectangle_fd_spectrum(a: float, b: float, params: LameParameters, bc, grid_n: int,
                          count: int | None = None) -> Spectrum:
    """Discrete eigenvalues, ascending.

    With ``count`` unset every eigenvalue is returned (dense solve). Otherwise the
    lowest ``count`` are returned; large grids switch to shift-invert Lanczos.
    """
    bc = BoundaryCondition.parse(bc)
    if grid_n < MIN_GRID:
        raise DiscretizationTooCoarse(f"grid_n={grid_n} below minimum {MIN_GRID}")
    if a <= 0 or b <= 0:
        raise ValueError("rectangle sides must be positive")
    k, mass, (nx, ny) = assemble(a, b, params, grid_n)
    free = _free_dofs(nx, ny, bc)
    k = k[free][:, free]
    d = 1.0 / np.sqrt(mass[free])
    a_sym = sp.diags(d) @ k @ sp.diags(d)
    size = a_sym.shape[0]
    try:
        if count is None or size <= DENSE_LIMIT or count >= size // 3:
            ev = sla.eigh(a_sym.toarray(), eigvals_only=True, check_finite=False,
                          overwrite_a=True, driver="evr",
                          subset_by_index=None if count is None else [0, min(count, size) - 1])
        else:
            sigma = -1.0 if bc is BoundaryCondition.NEUMANN else 0.0
            # a margin keeps degenerate pairs at the cut from losing a copy
            k = min(count + max(8, count // 10), size - 2)
            v0 = np.random.default_rng(size).standard_normal(size)
            ev = spla.eigsh(a_sym.tocsc(), k=k, sigma=sigma, which="LM", v0=v0,
                            return_eigenvectors=False, tol=1e-12)
            ev = np.sort(ev)[:count]
    except (np.linalg.LinAlgError, spla.ArpackError, spla.ArpackNoConvergence) as exc:
        raise EigensolverFailure(str(exc)) from exc
    ev = np.sort(np.asarray(ev, dtype=float))
    if bc is BoundaryCondition.NEUMANN:
        # rigid modes come out at round-off level with either sign
        ev = np.where(np.abs(ev) < 1e-9 * max(ev[-1], 1.0), np.abs(ev), ev)
        ev = np.sort(np.maximum(ev, 0.0))
    meta = {"grid": f"{nx}x{ny}", "grid_n": grid_n}
    return Spectrum(ev, np.ones(ev.size, dtype=int), bc, params, Domain.rectangle(a, b),
                    "finite-difference", meta)


def richardson(coarse: Spectrum, fine: Spectrum, order: int = 2) -> Spectrum:
    """Index-wise extrapolation of two second-order spectra to zero mesh width."""
    if coarse.domain != fine.domain or coarse.bc != fine.bc:
        raise ValueError("spectra must share domain and boundary condition")
    hc, hf = coarse.meta["grid_n"], fine.meta["grid_n"]
    m = min(coarse.count, fine.count)
    ec, ef = coarse.expanded()[:m], fine.expanded()[:m]
    wc, wf = float(hc) ** order, float(hf) ** order
    ev = np.sort((wf * ef - wc * ec) / (wf - wc))
    ev = np.maximum(ev, 0.0)
    meta = {"grid": f"richardson({hc},{hf})", "grid_n": hf}
    return Spectrum(ev, np.ones(m, dtype=int), fine.bc, fine.params, fine.domain,
                    "finite-difference", meta)
