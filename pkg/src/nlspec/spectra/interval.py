import math

import numpy as np

from ..geometry import LameParameters
from .types import BoundaryCondition, Domain, Spectrum


def interval_spectrum(length: float, params: LameParameters, bc, count: int) -> Spectrum:
    """n = 1 reduction: the operator is -(2 mu + lambda) d^2/dx^2 on [0, length].

    Dirichlet modes are k >= 1, Neumann (traction free) modes k >= 0.
    """
    bc = BoundaryCondition.parse(bc)
    if length <= 0 or count < 0:
        raise ValueError("requires length > 0 and count >= 0")
    start = 1 if bc is BoundaryCondition.DIRICHLET else 0
    k = np.arange(start, start + count, dtype=float)
    ev = params.pressure_modulus * (k * math.pi / length) ** 2
    return Spectrum(ev, np.ones(count, dtype=int), bc, params, Domain.interval(length), "analytic")
