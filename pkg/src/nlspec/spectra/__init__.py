from .disk import disk_spectrum, polar_fd_disk_spectrum
from .fd import rectangle_fd_spectrum, richardson
from .interval import interval_spectrum
from .io import spectrum_export, spectrum_import
from .types import BoundaryCondition, Domain, Spectrum, from_values

__all__ = [
    "BoundaryCondition", "Domain", "Spectrum", "from_values",
    "interval_spectrum", "disk_spectrum", "polar_fd_disk_spectrum",
    "rectangle_fd_spectrum", "richardson", "spectrum_export", "spectrum_import",
]
