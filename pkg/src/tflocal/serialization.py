"""File formats: signals, phase-space fields, kernels, spectral summaries.

Writers emit every floating-point number in decimal with 17 significant
digits, which round-trips IEEE-754 doubles exactly and keeps files
byte-reproducible.  Readers accept ordinary JSON.  Array order is the fixed
lexicographic (slowest axis first) layout of the lattice module.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .errors import UsageError
from .lattice import LatticeSpec, PhaseSpaceField, Signal, TorusGrid
from .locop import OperatorKernel, SpectralSummary

__all__ = [
    "fmt17",
    "dump_signal",
    "load_signal",
    "dump_field",
    "load_field",
    "dump_kernel_json",
    "load_kernel_json",
    "dump_kernel_raw",
    "dump_summary",
]


def fmt17(x: float) -> str:
    """Decimal with 17 significant digits (exact double round trip)."""
    return format(float(x), ".17g")


def _pairs(values: np.ndarray) -> str:
    flat = np.ascontiguousarray(values).ravel()
    inner = ",".join(f"[{fmt17(v.real)},{fmt17(v.imag)}]" for v in flat)
    return f"[{inner}]"


def _parse_pairs(raw, count: int) -> np.ndarray:
    if not isinstance(raw, list) or len(raw) != count:
        raise UsageError(f"expected {count} complex pairs")
    arr = np.empty(count, dtype=np.complex128)
    for i, item in enumerate(raw):
        if not isinstance(item, list) or len(item) != 2:
            raise UsageError("complex values must be [re, im] pairs")
        arr[i] = complex(float(item[0]), float(item[1]))
    return arr


def dump_signal(f: Signal) -> str:
    s = f.spec
    return (
        "{"
        + f'"n": {s.n}, "K": {s.K}, "C": {s.C}, "values": {_pairs(f.values)}'
        + "}\n"
    )


def load_signal(text: str) -> Signal:
    try:
        obj = json.loads(text)
        spec = LatticeSpec(int(obj["n"]), int(obj["K"]), int(obj["C"]))
        vals = _parse_pairs(obj["values"], spec.side**spec.n)
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise UsageError(f"malformed signal file: {exc}") from exc
    return Signal(spec, vals.reshape(spec.shape))


def dump_field(F: PhaseSpaceField) -> str:
    s = F.spec
    return (
        "{"
        + f'"n": {s.n}, "K": {s.K}, "m_radius": {F.m_radius}, "M": {F.torus.M}, '
        + f'"degree_bound": {F.degree_bound}, "values": {_pairs(F.values)}'
        + "}\n"
    )


def load_field(text: str, C: int | None = None) -> PhaseSpaceField:
    """Load a field; the computation radius defaults to 3K (not stored)."""
    try:
        obj = json.loads(text)
        n, K = int(obj["n"]), int(obj["K"])
        spec = LatticeSpec(n, K, C)
        torus = TorusGrid(n, int(obj["M"]))
        r = int(obj["m_radius"])
        deg = int(obj["degree_bound"])
        count = (2 * r + 1) ** n * torus.M**n
        vals = _parse_pairs(obj["values"], count)
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise UsageError(f"malformed field file: {exc}") from exc
    shape = (2 * r + 1,) * n + torus.shape
    return PhaseSpaceField(spec, torus, r, vals.reshape(shape), degree_bound=deg)


def dump_kernel_json(K: OperatorKernel) -> str:
    s = K.spec
    prov = json.dumps(K.provenance, sort_keys=True)
    return (
        "{"
        + f'"n": {s.n}, "K": {s.K}, "C": {s.C}, "M": {K.torus.M}, '
        + f'"provenance": {prov}, "matrix": {_pairs(K.matrix)}'
        + "}\n"
    )


def load_kernel_json(text: str) -> OperatorKernel:
    try:
        obj = json.loads(text)
        spec = LatticeSpec(int(obj["n"]), int(obj["K"]), int(obj["C"]))
        torus = TorusGrid(spec.n, int(obj["M"]))
        size = spec.side**spec.n
        vals = _parse_pairs(obj["matrix"], size * size)
    except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
        raise UsageError(f"malformed kernel file: {exc}") from exc
    return OperatorKernel(
        spec, torus, vals.reshape(size, size), dict(obj.get("provenance", {}))
    )


def dump_kernel_raw(K: OperatorKernel) -> tuple[bytes, str]:
    """Raw export: little-endian float64 interleaved re/im plus a JSON sidecar."""
    size = K.spec.side ** K.spec.n
    flat = np.ascontiguousarray(K.matrix).ravel()
    inter = np.empty(2 * flat.size, dtype="<f8")
    inter[0::2] = flat.real
    inter[1::2] = flat.imag
    sidecar = json.dumps({"size": size, "order": "row-major"}, sort_keys=True) + "\n"
    return inter.tobytes(), sidecar


def dump_summary(summary: SpectralSummary) -> str:
    sv = ",".join(fmt17(v) for v in summary.singular_values)
    ps = sorted(summary.schatten)
    sch = ",".join(
        f'"{("inf" if math.isinf(p) else fmt17(p))}": {fmt17(summary.schatten[p])}'
        for p in ps
    )
    return (
        "{"
        + f'"singular_values": [{sv}], '
        + f'"trace": [{fmt17(summary.trace.real)},{fmt17(summary.trace.imag)}], '
        + f'"hs_norm": {fmt17(summary.hs_norm)}, '
        + f'"schatten": {{{sch}}}'
        + "}\n"
    )
