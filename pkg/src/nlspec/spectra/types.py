"""Domain, boundary condition and spectrum records."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from ..geometry import LameParameters


class BoundaryCondition(str, enum.Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"  # traction free: 2 mu Def(u) nu + lambda div(u) nu = 0

    @property
    def sign(self) -> int:
        """Sign of the boundary term in the two-term heat trace."""
        return -1 if self is BoundaryCondition.DIRICHLET else 1

    @classmethod
    def parse(cls, value) -> "BoundaryCondition":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {"d": "dirichlet", "n": "neumann", "traction": "neumann",
                   "neumann_traction": "neumann", "neumanntraction": "neumann"}
        return cls(aliases.get(key, key))


@dataclass(frozen=True)
class Domain:
    """Interval(length), Rectangle(a, b) or Disk(radius)."""

    kind: str
    dims: Tuple[float, ...]

    def __post_init__(self):
        expected = {"interval": 1, "rectangle": 2, "disk": 1}
        if self.kind not in expected:
            raise ValueError(f"unknown domain kind {self.kind!r}")
        dims = tuple(float(d) for d in self.dims)
        if len(dims) != expected[self.kind] or any(not d > 0 for d in dims):
            raise ValueError(f"{self.kind} needs {expected[self.kind]} positive length(s), got {self.dims}")
        object.__setattr__(self, "dims", dims)

    @classmethod
    def interval(cls, length):
        return cls("interval", (length,))

    @classmethod
    def rectangle(cls, a, b):
        return cls("rectangle", (a, b))

    @classmethod
    def disk(cls, radius):
        return cls("disk", (radius,))

    @property
    def dim(self) -> int:
        return 1 if self.kind == "interval" else 2

    @property
    def volume(self) -> float:
        if self.kind == "interval":
            return self.dims[0]
        if self.kind == "rectangle":
            return self.dims[0] * self.dims[1]
        return math.pi * self.dims[0] ** 2

    @property
    def boundary_volume(self) -> float:
        if self.kind == "interval":
            return 2.0
        if self.kind == "rectangle":
            return 2.0 * (self.dims[0] + self.dims[1])
        return 2.0 * math.pi * self.dims[0]

    def scaled(self, c: float) -> "Domain":
        return Domain(self.kind, tuple(c * d for d in self.dims))

    def label(self) -> str:
        return f"{self.kind}(" + ",".join(repr(d) for d in self.dims) + ")"


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Ascending eigenvalues, each with a multiplicity."""

    eigenvalues: np.ndarray
    multiplicities: np.ndarray
    bc: BoundaryCondition
    params: LameParameters
    domain: Domain
    method: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=float).reshape(-1)
        mult = np.asarray(self.multiplicities, dtype=int).reshape(-1)
        if ev.shape != mult.shape:
            raise ValueError("eigenvalues and multiplicities differ in length")
        if np.any(np.diff(ev) < 0):
            raise ValueError("eigenvalues must be sorted ascending")
        if np.any(mult < 1):
            raise ValueError("multiplicities must be >= 1")
        object.__setattr__(self, "eigenvalues", ev)
        object.__setattr__(self, "multiplicities", mult)
        object.__setattr__(self, "bc", BoundaryCondition.parse(self.bc))

    @property
    def count(self) -> int:
        """Number of eigenvalues counted with multiplicity."""
        return int(self.multiplicities.sum())

    @property
    def dim(self) -> int:
        return self.domain.dim

    def expanded(self) -> np.ndarray:
        return np.repeat(self.eigenvalues, self.multiplicities)

    def truncated(self, count: int) -> "Spectrum":
        """First ``count`` eigenvalues with multiplicity (a split multiplet is cut)."""
        ev = self.expanded()[:count]
        return Spectrum(ev, np.ones_like(ev, dtype=int), self.bc, self.params,
                        self.domain, self.method, dict(self.meta))

    def __eq__(self, other):
        if not isinstance(other, Spectrum):
            return NotImplemented
        return (np.array_equal(self.eigenvalues, other.eigenvalues)
                and np.array_equal(self.multiplicities, other.multiplicities)
                and self.bc == other.bc and self.params == other.params
                and self.domain == other.domain and self.method == other.method
                and self.meta == other.meta)

    def __len__(self):
        return len(self.eigenvalues)


def from_values(values, bc, params, domain, method, meta=None, rel_tol=0.0) -> Spectrum:
    """Build a spectrum from raw (possibly repeated) values.

    Values closer than ``rel_tol`` (relative) are merged into one entry; with
    the default 0 only bit-identical values merge.
    """
    values = np.sort(np.asarray(values, dtype=float))
    if values.size == 0:
        return Spectrum(values, np.zeros(0, dtype=int), bc, params, domain, method, meta or {})
    ev, mult = [values[0]], [1]
    for v in values[1:]:
        if abs(v - ev[-1]) <= rel_tol * max(abs(v), 1e-300):
            mult[-1] += 1
        else:
            ev.append(v)
            mult.append(1)
    return Spectrum(np.array(ev), np.array(mult), bc, params, domain, method, meta or {})
