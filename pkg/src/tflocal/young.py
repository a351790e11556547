"""Young functions and their numeric calculus.

A Young function is convex with Phi(0) = 0 and Phi(t) -> infinity.  Four
evaluable kinds are supported:

* ``power``: Phi(t) = t^p with p >= 1.
* ``eq5``: the log-perturbed square -t^2 log t on [0, e^{-3/2}], continued
  by the unique C^1 convex quadratic tail t^2 + e^{-3}/2.  The raw formula
  stops being convex above e^{-3/2}, so the tail restores the Young-function
  axioms while keeping the small-argument behaviour, which is the regime all
  embedding arguments live in.
* ``quasi``: Phi0(t) = base(t^p) with 0 < p <= 1 (order-p quasi-Young).
  Quasi-Young functions need not be convex; flags are probed, not assumed.
* ``table``: piecewise-linear interpolation of sampled values, linearly
  extended past the last node.  Used mainly for tabulated conjugates, where
  convexity of the data makes the interpolant a pointwise majorant.

``complementary`` computes the conjugate Psi(y) = sup_{x>=0} (x y - Phi(x))
numerically; ``delta2_probe`` estimates a doubling constant on an interval.
Both are heuristic certificates over finite grids, not proofs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError, UnboundedError

__all__ = [
    "YoungFunction",
    "power",
    "eq5",
    "quasi_young",
    "table",
    "evaluate",
    "complementary",
    "conjugate_table",
    "delta2_probe",
    "young_to_dict",
    "young_from_dict",
]

EQ5_BREAK = math.exp(-1.5)  # convexity of -t^2 log t fails beyond this point
EQ5_TAIL = math.exp(-3.0) / 2.0  # constant making the quadratic tail C^1

_PROBE = np.geomspace(1e-9, 1e6, 61)


def _eval_power(p: float, t: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        return t**p


def _eval_eq5(t: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        safe = np.where(t > 0, t, 1.0)
        head = -safe * safe * np.log(safe)
        head = np.where(t > 0, head, 0.0)
        tail = t * t + EQ5_TAIL
    return np.where(t <= EQ5_BREAK, head, tail)


@dataclass(frozen=True)
class YoungFunction:
    """Evaluable Young (or quasi-Young) descriptor with probed flags."""

    kind: str
    p: Optional[float] = None
    base: Optional["YoungFunction"] = None
    xs: Optional[tuple] = None
    ys: Optional[tuple] = None
    finite: bool = field(default=True, compare=False)
    continuous: bool = field(default=True, compare=False)
    strictly_convex: bool = field(default=False, compare=False)

    def __call__(self, t):
        arr = np.asarray(t, dtype=np.float64)
        if np.any(arr < 0):
            raise DomainError("Young functions take non-negative arguments")
        out = self._eval(arr)
        return float(out) if np.isscalar(t) or arr.ndim == 0 else out

    def _eval(self, t: np.ndarray) -> np.ndarray:
        if self.kind == "power":
            return _eval_power(self.p, t)
        if self.kind == "eq5":
            return _eval_eq5(t)
        if self.kind == "quasi":
            with np.errstate(over="ignore"):
                return self.base._eval(t**self.p)
        if self.kind == "table":
            xs = np.asarray(self.xs)
            ys = np.asarray(self.ys)
            out = np.interp(t, xs, ys)
            if len(xs) >= 2:
                slope = (ys[-1] - ys[-2]) / (xs[-1] - xs[-2])
                with np.errstate(over="ignore", invalid="ignore"):
                    ext = ys[-1] + slope * (t - xs[-1])
                out = np.where(t > xs[-1], ext, out)
            return out
        raise DomainError(f"unknown Young-function kind {self.kind!r}")

    def label(self) -> str:
        if self.kind == "power":
            return f"power({self.p:g})"
        if self.kind == "quasi":
            return f"quasi({self.base.label()},{self.p:g})"
        return self.kind


def _probe_flags(phi: YoungFunction) -> dict:
    with np.errstate(all="ignore"):
        vals = phi._eval(_PROBE)
    finite = bool(np.all(np.isfinite(vals)))
    # strict convexity via midpoint gaps on the probe grid
    x, y = _PROBE[:-1], _PROBE[1:]
    with np.errstate(all="ignore"):
        mid = phi._eval((x + y) / 2.0)
        lo, hi = phi._eval(x), phi._eval(y)
    ok = np.isfinite(mid) & np.isfinite(lo) & np.isfinite(hi)
    strict = bool(np.all(mid[ok] < (lo[ok] + hi[ok]) / 2.0 - 1e-15 * (1 + hi[ok])))
    return {"finite": finite, "continuous": True, "strictly_convex": strict and finite}


def _validate(phi: YoungFunction) -> YoungFunction:
    if abs(phi._eval(np.asarray(0.0))) > 0:
        raise DomainError("Young function must vanish at 0")
    with np.errstate(all="ignore"):
        vals = phi._eval(_PROBE)
    good = np.isfinite(vals)
    if np.any(np.diff(vals[good]) < -1e-12 * (1 + np.abs(vals[good][:-1]))):
        raise DomainError("Young function must be nondecreasing")
    return phi


def power(p: float) -> YoungFunction:
    """Phi(t) = t^p, p >= 1 (use quasi_young for p < 1)."""
    if not p >= 1:
        raise DomainError("power kind needs p >= 1; wrap smaller orders with quasi_young")
    return _validate(
        YoungFunction("power", p=float(p), strictly_convex=p > 1)
    )


def eq5() -> YoungFunction:
    """The log-perturbed square with its C^1 convex quadratic tail."""
    return YoungFunction("eq5", strictly_convex=True)


def quasi_young(base: YoungFunction, p: float) -> YoungFunction:
    """Order-p quasi-Young function t -> base(t^p), 0 < p <= 1."""
    if not 0 < p <= 1:
        raise DomainError("quasi-Young order must lie in (0, 1]")
    if p == 1:
        return base
    cand = YoungFunction("quasi", p=float(p), base=base)
    flags = _probe_flags(cand)
    return _validate(
        YoungFunction(
            "quasi",
            p=float(p),
            base=base,
            finite=flags["finite"],
            continuous=flags["continuous"],
            strictly_convex=flags["strictly_convex"],
        )
    )


def table(xs, ys) -> YoungFunction:
    """Piecewise-linear Young function through (xs, ys); xs[0] must be 0."""
    xs = tuple(float(x) for x in xs)
    ys = tuple(float(y) for y in ys)
    if len(xs) != len(ys) or len(xs) < 2:
        raise DomainError("table needs matching xs/ys with at least two nodes")
    if xs[0] != 0.0 or ys[0] != 0.0:
        raise DomainError("table must start at (0, 0)")
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise DomainError("table abscissae must be strictly increasing")
    cand = YoungFunction("table", xs=xs, ys=ys)
    flags = _probe_flags(cand)
    return _validate(
        YoungFunction(
            "table",
            xs=xs,
            ys=ys,
            finite=flags["finite"],
            continuous=True,
            strictly_convex=flags["strictly_convex"],
        )
    )


def evaluate(phi: YoungFunction, t):
    """Evaluate phi at t >= 0 (scalar or array)."""
    return phi(t)


_BRACKET_CAP = 2.0**60


def complementary(phi: YoungFunction, y):
    """Conjugate Psi(y) = sup_{x >= 0} (x|y| - Phi(x)).

    The objective is concave, so the maximizer is bracketed by doubling
    x until the mean slope Phi(x)/x reaches y, then located by ternary
    search.  Raises UnboundedError when the bracket cap 2^60 is hit,
    which is how extended-valued conjugates are refused.
    """
    if not (phi.finite and phi.continuous):
        raise DomainError("complementary requires a finite continuous Young function")
    arr = np.abs(np.asarray(y, dtype=np.float64))
    scalar = np.isscalar(y) or arr.ndim == 0
    yv = np.atleast_1d(arr).astype(np.float64)

    hi = np.ones_like(yv)
    with np.errstate(all="ignore"):
        while np.any(need := phi._eval(hi) < hi * yv):
            if hi[need].min() >= _BRACKET_CAP:
                raise UnboundedError(
                    f"conjugate diverges: slope condition unmet below {_BRACKET_CAP:g}"
                )
            hi = np.where(need, hi * 2.0, hi)
        lo = np.zeros_like(yv)
        for _ in range(90):
            m1 = lo + (hi - lo) / 3.0
            m2 = hi - (hi - lo) / 3.0
            f1 = m1 * yv - phi._eval(m1)
            f2 = m2 * yv - phi._eval(m2)
            take = f1 < f2
            lo = np.where(take, m1, lo)
            hi = np.where(take, hi, m2)
        xstar = (lo + hi) / 2.0
        out = np.maximum(xstar * yv - phi._eval(xstar), 0.0)
    return float(out[0]) if scalar else out.reshape(arr.shape)


def conjugate_table(
    phi: YoungFunction, y_lo: float = 1e-9, y_hi: float = 1e9, nodes: int = 2048
) -> YoungFunction:
    """Tabulate the numeric conjugate on a log grid.

    Linear interpolation of a convex function overestimates between nodes,
    so the result is a pointwise majorant of the true conjugate (up to the
    ternary-search tolerance at the nodes).  That direction keeps Young's
    inequality x y <= Phi(x) + Psi(y) valid for the table, which is what the
    constant-2 Hoelder checks rely on.
    """
    ys_grid = np.geomspace(y_lo, y_hi, nodes)
    vals = complementary(phi, ys_grid)
    return table((0.0,) + tuple(ys_grid), (0.0,) + tuple(vals))


def delta2_probe(phi: YoungFunction, r: float, samples: int = 256) -> float:
    """Largest Phi(2x)/Phi(x) over a log grid in (0, r].

    A finite return C certifies Phi(2x) <= C Phi(x) on the probed grid only;
    this is a heuristic doubling certificate, not a proof.  Ratios 0/0 are
    skipped; Phi(x) = 0 with Phi(2x) > 0 reports +inf.
    """
    if not r > 0:
        raise DomainError("probe radius must be positive")
    if samples < 16:
        raise DomainError("need at least 16 probe samples")
    xs = np.geomspace(r * 1e-12, r, samples)
    with np.errstate(all="ignore"):
        num = phi._eval(2.0 * xs)
        den = phi._eval(xs)
    blowup = (den == 0) & (num > 0)
    if np.any(blowup):
        return float("inf")
    ok = den > 0
    if not np.any(ok):
        return 0.0
    return float(np.max(num[ok] / den[ok]))


def young_to_dict(phi: YoungFunction) -> dict:
    """Serializable spec: {"kind": "power"|"eq5"|"quasi", "p"?, "base"?}."""
    if phi.kind == "power":
        return {"kind": "power", "p": phi.p}
    if phi.kind == "eq5":
        return {"kind": "eq5"}
    if phi.kind == "quasi":
        return {"kind": "quasi", "p": phi.p, "base": young_to_dict(phi.base)}
    raise DomainError(f"kind {phi.kind!r} has no file representation")


def young_from_dict(spec: dict) -> YoungFunction:
    if not isinstance(spec, dict) or "kind" not in spec:
        raise DomainError("Young-function spec must be an object with a 'kind'")
    kind = spec["kind"]
    if kind == "power":
        return power(float(spec["p"]))
    if kind == "eq5":
        return eq5()
    if kind == "quasi":
        return quasi_young(young_from_dict(spec["base"]), float(spec["p"]))
    raise DomainError(f"unknown Young-function kind {kind!r}")
