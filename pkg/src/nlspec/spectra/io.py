"""Spectrum CSV files.

Layout::

    # nlspec-spectrum v1
    # domain=disk
    # dims=1.0
    # bc=dirichlet
    # mu=1.0
    # lambda=1.0
    # method=bessel-roots
    # grid=-
    # meta.window=40000.0
    index,eigenvalue,multiplicity
    1,11.322144637...,1

Eigenvalues are written with ``repr`` (shortest round-tripping decimal, up to
17 significant digits). Files lacking the multiplicity column (older exports)
read back with multiplicity 1.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from ..errors import MalformedFile, SortedViolation
from ..geometry import LameParameters
from .types import BoundaryCondition, Domain, Spectrum

MAGIC = "# nlspec-spectrum v1"
REQUIRED = ("domain", "dims", "bc", "mu", "lambda", "method")


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def format_spectrum(spectrum: Spectrum) -> str:
    lines = [MAGIC,
             f"# domain={spectrum.domain.kind}",
             f"# dims={';'.join(repr(d) for d in spectrum.domain.dims)}",
             f"# bc={spectrum.bc.value}",
             f"# mu={spectrum.params.mu!r}",
             f"# lambda={spectrum.params.lam!r}",
             f"# method={spectrum.method}",
             f"# grid={spectrum.meta.get('grid', '-')}"]
    for key in sorted(spectrum.meta):
        lines.append(f"# meta.{key}={json.dumps(spectrum.meta[key])}")
    lines.append("index,eigenvalue,multiplicity")
    for i, (ev, m) in enumerate(zip(spectrum.eigenvalues, spectrum.multiplicities), 1):
        lines.append(f"{i},{float(ev)!r},{int(m)}")
    return "\n".join(lines) + "\n"


def spectrum_export(spectrum: Spectrum, path) -> None:
    atomic_write_text(path, format_spectrum(spectrum))


def _float(text, lineno, what):
    try:
        value = float(text)
    except ValueError:
        raise MalformedFile(f"{what} {text!r} is not a number", lineno) from None
    if not math.isfinite(value):
        raise MalformedFile(f"{what} {text!r} is not finite", lineno)
    return value


def spectrum_import(path) -> Spectrum:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedFile(f"not a text file: {exc}") from None
    lines = text.splitlines()
    if not lines or lines[0].strip() != MAGIC:
        raise MalformedFile(f"expected header {MAGIC!r}", 1)
    header, meta = {}, {}
    row = 1
    while row < len(lines) and lines[row].startswith("#"):
        body = lines[row][1:].strip()
        if "=" not in body:
            raise MalformedFile(f"metadata line without '=': {lines[row]!r}", row + 1)
        key, value = (s.strip() for s in body.split("=", 1))
        if key.startswith("meta."):
            try:
                meta[key[5:]] = json.loads(value)
            except json.JSONDecodeError:
                raise MalformedFile(f"bad metadata value for {key}", row + 1) from None
        else:
            header[key] = value
        row += 1
    missing = [k for k in REQUIRED if k not in header]
    if missing:
        raise MalformedFile(f"missing metadata: {', '.join(missing)}", row + 1)
    if row >= len(lines):
        raise MalformedFile("missing column header", row + 1)
    columns = [c.strip() for c in lines[row].split(",")]
    if columns == ["index", "eigenvalue", "multiplicity"]:
        width = 3
    elif columns == ["index", "eigenvalue"]:
        width = 2
    else:
        raise MalformedFile(f"unexpected columns {lines[row]!r}", row + 1)
    header_line = row + 1

    try:
        domain = Domain(header["domain"],
                        tuple(float(d) for d in header["dims"].split(";")))
        params = LameParameters(float(header["mu"]), float(header["lambda"]))
        bc = BoundaryCondition.parse(header["bc"])
    except ValueError as exc:
        raise MalformedFile(f"invalid metadata: {exc}", header_line) from None

    ev, mult = [], []
    for lineno in range(header_line + 1, len(lines) + 1):
        raw = lines[lineno - 1].strip()
        if not raw:
            continue
        fields = raw.split(",")
        if len(fields) != width:
            raise MalformedFile(f"expected {width} fields, got {len(fields)}", lineno)
        value = _float(fields[1], lineno, "eigenvalue")
        if width == 3:
            try:
                m = int(fields[2])
            except ValueError:
                raise MalformedFile(f"multiplicity {fields[2]!r} is not an integer", lineno) from None
            if m < 1:
                raise MalformedFile("multiplicity must be >= 1", lineno)
        else:
            m = 1
        if ev and value < ev[-1]:
            raise SortedViolation(f"eigenvalue {value!r} follows larger {ev[-1]!r}", lineno)
        ev.append(value)
        mult.append(m)
    if header.get("grid", "-") != "-":
        meta.setdefault("grid", header["grid"])
    return Spectrum(np.array(ev, dtype=float), np.array(mult, dtype=int), bc, params,
                    domain, header["method"], meta)
