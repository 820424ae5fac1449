"""Figures written next to the CSV/JSON reports.

Everything renders off-screen with the Agg backend; nothing here opens a window.
"""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "figure.figsize": (5.0, 3.6),
    "figure.dpi": 120,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.2,
    "lines.markersize": 3.5,
    "legend.fontsize": 8,
}


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.stem}.", suffix=path.suffix)
    os.close(fd)
    try:
        fig.savefig(tmp)
        os.replace(tmp, path)
    finally:
        plt.close(fig)
        if os.path.exists(tmp):
            os.unlink(tmp)
    return path


def plot_trace_fit(samples, fit, path, title: str | None = None) -> Path:
    """Heat trace t^{n/2} S(t) against the fitted three-term curve and the two-term prediction."""
    t = np.array([s.t for s in samples])
    y = np.array([s.value for s in samples])
    n = fit.n
    tt = np.geomspace(t.min(), t.max(), 200)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.semilogx(t, y * t ** (n / 2), "o", label="spectrum")
        ax.semilogx(tt, fit.model(tt) * tt ** (n / 2), "-", label="fit")
        if fit.prediction is not None:
            pred = fit.prediction.trace(tt, fit.sign) * tt ** (n / 2)
            ax.semilogx(tt, pred, "--", label="two-term prediction")
        ax.set_xlabel("t")
        ax.set_ylabel(r"$t^{n/2}\,\sum_k e^{-t\tau_k}$")
        if title:
            ax.set_title(title)
        ax.legend(loc="best")
        fig.tight_layout()
        return _save(fig, path)


def plot_counting(spectrum, path, weyl_constant: float | None = None) -> Path:
    """Eigenvalue counting function N(eta), optionally with the Weyl curve."""
    ev = spectrum.expanded()
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.step(ev, np.arange(1, ev.size + 1), where="post", label="N(eta)")
        if weyl_constant is not None and ev.size:
            eta = np.linspace(0.0, ev[-1], 200)
            ax.plot(eta, weyl_constant * eta ** (spectrum.dim / 2), "--", label="Weyl law")
        ax.set_xlabel(r"$\eta$")
        ax.set_ylabel("count")
        ax.set_title(spectrum.domain.label())
        ax.legend(loc="best")
        fig.tight_layout()
        return _save(fig, path)
