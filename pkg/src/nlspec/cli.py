"""Command line front end.

    nlspec symbol-verify [--config FILE]
    nlspec predict       [--config FILE]
    nlspec eigs          [--config FILE]
    nlspec trace-fit     [--config FILE] [--spectrum CSV]
    nlspec hear          [--config FILE] [--spectrum CSV]

Exit codes: 0 success, 1 usage or configuration error, 2 threshold violation,
3 solver failure.  NLSPEC_OUTPUT_DIR overrides output.dir and NLSPEC_THREADS
caps BLAS threads; both are echoed in every report.
"""

from __future__ import annotations

import argparse
import json
import os
import platform
import sys

EXIT_OK, EXIT_USAGE, EXIT_THRESHOLD, EXIT_SOLVER = 0, 1, 2, 3
_THREAD_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nlspec", description="Navier-Lame spectral geometry toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_ in [("symbol-verify", "randomised symbol-inverse and parametrix checks"),
                        ("predict", "two-term heat coefficients and Weyl constant"),
                        ("eigs", "solve for a spectrum and write it as CSV"),
                        ("trace-fit", "fit heat-trace coefficients of a spectrum"),
                        ("hear", "recover volume and boundary area, ball verdict")]:
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", help="YAML configuration file")
        p.add_argument("--output-dir", help="override output.dir")
        p.add_argument("--seed", type=int, help="override seed")
        if name in ("trace-fit", "hear"):
            p.add_argument("--spectrum", help="spectrum CSV to analyse instead of solving")
    return parser


# -- helpers --------------------------------------------------------------

class _Context:
    def __init__(self, args, config):
        self.args = args
        self.config = config
        env_dir = os.environ.get("NLSPEC_OUTPUT_DIR")
        self.output_dir = args.output_dir or env_dir or config.section("output")["dir"]
        self.formats = set(config.section("output")["formats"])
        self.plots = config.section("output")["plots"] and "png" in self.formats

    def header(self, command):
        import numpy
        import scipy

        from . import __version__
        return {
            "command": command,
            "version": __version__,
            "seed": self.config.seed,
            "config": self.config.raw,
            "environment": {"NLSPEC_OUTPUT_DIR": os.environ.get("NLSPEC_OUTPUT_DIR"),
                            "NLSPEC_THREADS": os.environ.get("NLSPEC_THREADS"),
                            "output_dir": self.output_dir},
            "versions": {"python": platform.python_version(), "numpy": numpy.__version__,
                         "scipy": scipy.__version__},
        }

    def path(self, name):
        return os.path.join(self.output_dir, name)

    def write_json(self, name, payload):
        from .spectra.io import atomic_write_text
        text = json.dumps(payload, indent=2, sort_keys=False, default=_jsonable) + "\n"
        if "json" in self.formats:
            atomic_write_text(self.path(name), text)
        sys.stdout.write(text)


def _jsonable(obj):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if hasattr(obj, "tolist"):
        return obj.tolist()
    if hasattr(obj, "item"):
        return obj.item()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _error(exc):
    return {"type": type(exc).__name__, "message": str(exc)}


def _solve(ctx):
    """Spectrum for the configured domain and solver."""
    from .spectra import disk_spectrum, interval_spectrum, rectangle_fd_spectrum, richardson
    cfg = ctx.config
    s = cfg.section("solver")
    d = cfg.domain
    if d.kind == "interval":
        return interval_spectrum(d.dims[0], cfg.params, cfg.bc, s.get("count", 500))
    if d.kind == "disk":
        if "tau_max" in s:
            return disk_spectrum(d.dims[0], cfg.params, tau_max=s["tau_max"])
        if "m_max" in s or "k_max" in s:
            return disk_spectrum(d.dims[0], cfg.params, m_max=s.get("m_max", 40),
                                 k_max=s.get("k_max", 20))
        return disk_spectrum(d.dims[0], cfg.params, tau_max=10000.0)
    a, b = d.dims
    count = s.get("count")
    if "refine" in s:
        g0, g1 = s["refine"]
        coarse = rectangle_fd_spectrum(a, b, cfg.params, cfg.bc, g0, count=count)
        fine = rectangle_fd_spectrum(a, b, cfg.params, cfg.bc, g1, count=count)
        return richardson(coarse, fine)
    return rectangle_fd_spectrum(a, b, cfg.params, cfg.bc, s.get("grid_n", 32), count=count)


def _load_or_solve(ctx, section):
    from .spectra import spectrum_import
    path = getattr(ctx.args, "spectrum", None) or ctx.config.section(section).get("spectrum")
    if path:
        return spectrum_import(path)
    return _solve(ctx)


# -- commands -------------------------------------------------------------

def cmd_symbol_verify(ctx):
    import numpy as np

    from .errors import PoleProximity
    from .geometry import MetricJet, flat_field, polar_field, sphere_field
    from .symbols import a2_symbol, invert_a2, parametrix_defect, trace_q2, xi_norm2

    cfg = ctx.config
    sv = cfg.section("symbol_verify")
    params = cfg.params
    rng = np.random.default_rng(cfg.seed)
    fixed_tau = cfg.tau
    report = ctx.header("symbol-verify")
    inv_err = trace_err = 0.0
    try:
        for i in range(sv["samples"]):
            n = sv["dims"][i % len(sv["dims"])]
            m = rng.standard_normal((n, n))
            jet = MetricJet(m @ m.T + n * np.eye(n))
            xi = rng.standard_normal(n)
            if fixed_tau is None:
                tau = 1j * (1.0 + xi_norm2(jet, xi))
            else:
                xi = xi / np.sqrt(xi_norm2(jet, xi))  # |xi|_g = 1 so tau is read against the rays
                tau = fixed_tau
            a2 = a2_symbol(jet, params, xi, tau)
            inv = invert_a2(jet, params, xi, tau)
            eye = np.eye(n)
            inv_err = max(inv_err, np.abs(a2 @ inv - eye).max(), np.abs(inv @ a2 - eye).max())
            trace_err = max(trace_err, abs(trace_q2(jet, params, xi, tau) - np.trace(inv)))
        fields = {"flat": (flat_field(2), np.array([0.3, -0.2])),
                  "polar": (polar_field(), np.array([2.0, 0.3])),
                  "sphere": (sphere_field(1.0), np.array([np.pi / 4, 0.2]))}
        xi0 = np.array([1.0, 0.5])
        tau0 = fixed_tau if fixed_tau is not None else 4j
        defects = {}
        for name in sv["fields"]:
            field, x = fields[name]
            defects[name] = parametrix_defect(field, params, x, xi0, tau0, 2)
    except PoleProximity as exc:
        report["error"] = _error(exc)
        ctx.write_json("symbol_verify.json", report)
        return EXIT_USAGE
    limits = {name: (1e-10 if name == "flat" else sv["defect_threshold"]) for name in defects}
    passed = inv_err < sv["inverse_threshold"] and all(defects[k] < limits[k] for k in defects)
    report.update({"max_inverse_error": float(inv_err), "max_trace_error": float(trace_err),
                   "defects": defects, "defect_limits": limits,
                   "inverse_threshold": sv["inverse_threshold"], "passed": bool(passed)})
    ctx.write_json("symbol_verify.json", report)
    return EXIT_OK if passed else EXIT_THRESHOLD


def cmd_predict(ctx):
    from .heat import predict_coefficients, weyl_coefficient
    cfg = ctx.config
    d = cfg.domain
    pred = predict_coefficients(d.dim, cfg.params, d.volume, d.boundary_volume)
    report = ctx.header("predict")
    report.update({"domain": d.label(), "bc": cfg.bc.value, "prediction": pred.to_dict(),
                   "boundary_sign": cfg.bc.sign,
                   "weyl_coefficient": weyl_coefficient(d.dim, cfg.params, d.volume)})
    ctx.write_json("predict.json", report)
    return EXIT_OK


def cmd_eigs(ctx):
    from .heat import weyl_coefficient
    from .spectra import spectrum_export
    from .trace import weyl_check
    spectrum = _solve(ctx)
    csv_path = ctx.path("spectrum.csv")
    spectrum_export(spectrum, csv_path)
    report = ctx.header("eigs")
    report.update({"domain": spectrum.domain.label(), "bc": spectrum.bc.value,
                   "method": spectrum.method, "count": spectrum.count,
                   "distinct": int(spectrum.eigenvalues.size),
                   "tau_1": float(spectrum.eigenvalues[0]) if spectrum.count else None,
                   "spectrum_csv": csv_path})
    if spectrum.count >= 200:
        report["weyl_ratio"] = weyl_check(spectrum)
    if ctx.plots:
        from .plotting import plot_counting
        cw = weyl_coefficient(spectrum.dim, spectrum.params, spectrum.domain.volume)
        report["figure"] = str(plot_counting(spectrum, ctx.path("counting.png"), cw))
    ctx.write_json("eigs.json", report)
    return EXIT_OK


def _trace_csv(samples, fit):
    lines = ["t,trace,truncation_bound,fit,prediction"]
    for s in samples:
        pred = fit.prediction.trace(s.t, fit.sign) if fit.prediction else float("nan")
        lines.append(f"{s.t!r},{s.value!r},{s.truncation_bound!r},{float(fit.model(s.t))!r},{float(pred)!r}")
    return "\n".join(lines) + "\n"


def _fit(ctx, spectrum):
    from .trace import fit_spectrum
    t = ctx.config.section("trace")
    window = (t["t_min"], t["t_max"]) if "t_min" in t else None
    return fit_spectrum(spectrum, window=window, samples=t["samples"])


def cmd_trace_fit(ctx):
    from .spectra.io import atomic_write_text
    from .trace import weyl_check
    spectrum = _load_or_solve(ctx, "trace_fit")
    fit, samples = _fit(ctx, spectrum)
    report = ctx.header("trace-fit")
    report.update({"domain": spectrum.domain.label(), "bc": spectrum.bc.value,
                   "expected_sign": spectrum.bc.sign, **fit.to_dict()})
    if spectrum.count >= 200:
        report["weyl_ratio"] = weyl_check(spectrum)
    if "csv" in ctx.formats:
        atomic_write_text(ctx.path("trace.csv"), _trace_csv(samples, fit))
        report["trace_csv"] = ctx.path("trace.csv")
    if ctx.plots:
        from .plotting import plot_trace_fit
        report["figure"] = str(plot_trace_fit(samples, fit, ctx.path("trace.png"),
                                              spectrum.domain.label()))
    ctx.write_json("fit.json", report)
    return EXIT_OK


def cmd_hear(ctx):
    from .inverse import ball_rigidity_verdict, geometry_from_fit, verdict_report
    spectrum = _load_or_solve(ctx, "hear")
    fit, samples = _fit(ctx, spectrum)
    estimate = geometry_from_fit(fit, spectrum.params)
    verdict = ball_rigidity_verdict(estimate, ctx.config.section("hear")["tolerance"])
    report = ctx.header("hear")
    report.update({"domain": spectrum.domain.label(), **verdict_report(estimate, verdict)})
    if ctx.plots:
        from .plotting import plot_trace_fit
        report["figure"] = str(plot_trace_fit(samples, fit, ctx.path("hear_trace.png"),
                                              spectrum.domain.label()))
    ctx.write_json("verdict.json", report)
    return EXIT_OK


COMMANDS = {"symbol-verify": cmd_symbol_verify, "predict": cmd_predict, "eigs": cmd_eigs,
            "trace-fit": cmd_trace_fit, "hear": cmd_hear}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    threads = os.environ.get("NLSPEC_THREADS")
    if threads:
        if not threads.isdigit() or int(threads) < 1:
            print(f"nlspec: NLSPEC_THREADS must be a positive integer, got {threads!r}",
                  file=sys.stderr)
            return EXIT_USAGE
        for var in _THREAD_VARS:
            os.environ[var] = threads

    from .config import RunConfig
    from .errors import (ConfigError, DiscretizationTooCoarse, EigensolverFailure,
                         IllConditionedFit, MalformedFile, NLSpecError, RootBracketFailure,
                         TruncationDominated)
    try:
        config = RunConfig.load(args.config) if args.config else RunConfig()
        if args.seed is not None:
            config.raw["seed"] = args.seed
    except ConfigError as exc:
        print(f"nlspec: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    ctx = _Context(args, config)
    try:
        return COMMANDS[args.command](ctx)
    except (ConfigError, MalformedFile, FileNotFoundError) as exc:
        print(f"nlspec: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TruncationDominated as exc:
        print(f"nlspec: TruncationDominated: {exc} "
              "(hint: raise solver.count / solver.tau_max, or raise trace.t_min)", file=sys.stderr)
        return EXIT_SOLVER
    except (RootBracketFailure, EigensolverFailure, DiscretizationTooCoarse,
            IllConditionedFit, NLSpecError) as exc:
        print(f"nlspec: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
