"""Symbol calculus, heat-trace coefficients and spectra of the Navier-Lame operator.

Submodules are imported on first attribute access so that the command line can
pin BLAS thread counts before numpy loads.
"""

import importlib

__version__ = "0.1.0"

_EXPORTS = {
    "LameParameters": "geometry", "MetricJet": "geometry", "MetricField": "geometry",
    "symbol_A": "symbols", "split_symbol": "symbols", "invert_a2": "symbols",
    "resolvent_term": "symbols", "trace_q2": "symbols", "parametrix_defect": "symbols",
    "predict_coefficients": "heat", "weyl_coefficient": "heat",
    "heat_trace": "trace", "fit_coefficients": "trace", "fit_spectrum": "trace",
    "counting_function": "trace", "weyl_check": "trace",
    "estimate_geometry": "inverse", "ball_rigidity_verdict": "inverse",
    "disk_spectrum": "spectra", "rectangle_fd_spectrum": "spectra",
    "interval_spectrum": "spectra", "spectrum_export": "spectra", "spectrum_import": "spectra",
}

__all__ = ["__version__", *_EXPORTS]


def __getattr__(name):
    if name in _EXPORTS:
        module = importlib.import_module(f".{_EXPORTS[name]}", __name__)
        return getattr(module, name)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
