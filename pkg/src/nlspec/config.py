"""Run configuration: one YAML file, shared sections plus one section per command.

Unknown keys anywhere are errors, and every value is range-checked before any
computation starts.
"""

from __future__ import annotations

import copy
from pathlib import Path

import yaml

from .errors import ConfigError, InvalidParameters
from .geometry import LameParameters
from .spectra.types import BoundaryCondition, Domain

_NUM = (int, float)

SCHEMA = {
    "seed": int,
    "lame": {"mu": _NUM, "lambda": _NUM},
    "domain": {"kind": str, "dims": list},
    "bc": str,
    "solver": {"grid_n": int, "m_max": int, "k_max": int, "count": int, "tau_max": _NUM,
               "refine": list, "n_r": int},
    "trace": {"t_min": _NUM, "t_max": _NUM, "samples": int},
    "output": {"dir": str, "formats": list, "plots": bool},
    "symbol_verify": {"samples": int, "dims": list, "fields": list, "tau": (int, float, list),
                      "inverse_threshold": _NUM, "defect_threshold": _NUM},
    "hear": {"tolerance": _NUM, "spectrum": str},
    "trace_fit": {"spectrum": str},
}

DEFAULTS = {
    "seed": 20240601,
    "lame": {"mu": 1.0, "lambda": 1.0},
    "domain": {"kind": "disk", "dims": [1.0]},
    "bc": "dirichlet",
    "solver": {},
    "trace": {"samples": 24},
    "output": {"dir": "nlspec-out", "formats": ["csv", "json", "png"], "plots": True},
    "symbol_verify": {"samples": 1000, "dims": [2, 3, 4], "fields": ["flat", "polar", "sphere"],
                      "inverse_threshold": 1e-12, "defect_threshold": 1e-5},
    "hear": {"tolerance": 0.05},
    "trace_fit": {},
}


def _check(node, schema, where):
    if not isinstance(node, dict):
        raise ConfigError(f"{where or 'config'}: expected a mapping")
    for key, value in node.items():
        path = f"{where}.{key}" if where else key
        if key not in schema:
            raise ConfigError(f"unknown key {path!r}")
        spec = schema[key]
        if isinstance(spec, dict):
            _check(value, spec, path)
            continue
        ok = isinstance(value, spec) and not (isinstance(value, bool) and spec is not bool)
        if not ok:
            raise ConfigError(f"{path}: unexpected value {value!r}")


def _merge(base, override):
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


class RunConfig:
    """Validated configuration; ``raw`` holds the merged mapping echoed in reports."""

    def __init__(self, data: dict | None = None):
        data = data or {}
        _check(data, SCHEMA, "")
        self.raw = _merge(DEFAULTS, data)
        self._validate()

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read {path}: {exc}") from None
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path}: invalid YAML: {exc}") from None
        return cls(data or {})

    def _validate(self):
        r = self.raw
        try:
            self.params = LameParameters(float(r["lame"]["mu"]), float(r["lame"]["lambda"]))
        except InvalidParameters as exc:
            raise ConfigError(f"lame: {exc}") from None
        try:
            self.domain = Domain(r["domain"]["kind"], tuple(float(d) for d in r["domain"]["dims"]))
            self.bc = BoundaryCondition.parse(r["bc"])
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc)) from None
        if self.domain.kind == "disk" and self.bc is not BoundaryCondition.DIRICHLET:
            raise ConfigError("the disk solver supports Dirichlet only")
        s = r["solver"]
        for key in ("grid_n", "m_max", "k_max", "count", "n_r"):
            if key in s and s[key] < 1:
                raise ConfigError(f"solver.{key} must be >= 1")
        if "grid_n" in s and s["grid_n"] < 16:
            raise ConfigError("solver.grid_n must be >= 16")
        if "tau_max" in s and not s["tau_max"] > 0:
            raise ConfigError("solver.tau_max must be positive")
        if "refine" in s and (len(s["refine"]) != 2 or any(not isinstance(g, int) or g < 16 for g in s["refine"])):
            raise ConfigError("solver.refine must list two grid sizes >= 16")
        t = r["trace"]
        if t["samples"] < 8:
            raise ConfigError("trace.samples must be >= 8")
        if ("t_min" in t) != ("t_max" in t):
            raise ConfigError("trace.t_min and trace.t_max go together")
        if "t_min" in t and not 0 < t["t_min"] < t["t_max"]:
            raise ConfigError("trace window must satisfy 0 < t_min < t_max")
        tol = r["hear"]["tolerance"]
        if not 0 < tol < 0.5:
            raise ConfigError("hear.tolerance must lie in (0, 0.5)")
        sv = r["symbol_verify"]
        if sv["samples"] < 1 or any(not isinstance(d, int) or d < 1 for d in sv["dims"]):
            raise ConfigError("symbol_verify: samples >= 1 and positive integer dims required")
        unknown = set(sv["fields"]) - {"flat", "polar", "sphere"}
        if unknown:
            raise ConfigError(f"symbol_verify.fields: unknown {sorted(unknown)}")
        if "tau" in sv:
            tau = sv["tau"]
            if isinstance(tau, list) and (len(tau) != 2 or not all(isinstance(v, _NUM) for v in tau)):
                raise ConfigError("symbol_verify.tau must be a number or [re, im]")
        bad = set(r["output"]["formats"]) - {"csv", "json", "png"}
        if bad:
            raise ConfigError(f"output.formats: unknown {sorted(bad)}")

    def section(self, name):
        return self.raw[name]

    @property
    def seed(self) -> int:
        return int(self.raw["seed"])

    @property
    def tau(self):
        tau = self.raw["symbol_verify"].get("tau")
        if tau is None:
            return None
        return complex(tau[0], tau[1]) if isinstance(tau, list) else complex(tau)
