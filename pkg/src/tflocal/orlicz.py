"""Luxemburg norms and the mixed Orlicz norms on the lattice-torus product.

The Luxemburg norm is inf{b > 0 : sum_i w_i Phi(|v_i|/b) <= 1}.  The modular
b -> G(b) is continuous and nonincreasing, so bisection brackets the norm to
a relative width of 1e-12; the returned value b satisfies G(b(1+eps)) <= 1
<= G(b(1-eps)) with eps = 1e-12.

Mixed norms take an inner Luxemburg norm along the lattice axes per torus
node and an outer one across the torus (or the other way round for the
swapped variant, where the inner torus norm uses the second Young function
and the outer lattice norm the first).  Phase-space convolution works in
torus-coefficient space, which is exact for the trigonometric polynomials
these fields represent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PrecisionError, RangeError
from .lattice import PhaseSpaceField, TorusGrid
from .young import YoungFunction

__all__ = [
    "MeasureSpec",
    "counting_measure",
    "torus_measure",
    "product_measure",
    "luxemburg",
    "orlicz_norm",
    "mixed_norm",
    "mixed_norm_swapped",
    "field_lp_norm",
    "field_l1_norm",
    "field_l2_norm",
    "convolve_phase_space",
    "holder_pairing",
]


@dataclass(frozen=True)
class MeasureSpec:
    """Uniform weight per point: counting (1), torus quadrature, or product."""

    kind: str
    weight: float

    def __post_init__(self):
        if self.weight <= 0 or not np.isfinite(self.weight):
            raise DomainError("measure weight must be positive and finite")


def counting_measure() -> MeasureSpec:
    return MeasureSpec("counting", 1.0)


def torus_measure(torus: TorusGrid) -> MeasureSpec:
    return MeasureSpec("quadrature", torus.weight)


def product_measure(torus: TorusGrid) -> MeasureSpec:
    return MeasureSpec("product", torus.weight)


_REL_TOL = 1e-12


def _lux_batched(v: np.ndarray, weight: float, phi: YoungFunction) -> np.ndarray:
    """Luxemburg norm of each row of v (shape (batch, N), nonnegative)."""
    batch = v.shape[0]
    out = np.zeros(batch)
    peak = v.max(axis=1)
    act = peak > 0
    if not np.any(act):
        return out
    va = v[act]
    with np.errstate(all="ignore"):

        def modular(b):
            return weight * phi._eval(va / b[:, None]).sum(axis=1)

        hi = weight * va.sum(axis=1) + peak[act]
        for _ in range(200):
            grow = modular(hi) > 1.0
            if not np.any(grow):
                break
            hi = np.where(grow, hi * 2.0, hi)
        lo = hi.copy()
        for _ in range(200):
            shrink = modular(lo) < 1.0
            if not np.any(shrink):
                break
            lo = np.where(shrink, lo / 2.0, lo)
        # invariant: G(hi) <= 1 <= G(lo); stop once the bracket is 1e-12 wide
        for _ in range(80):
            if np.all(hi - lo <= 0.5 * _REL_TOL * hi):
                break
            mid = 0.5 * (lo + hi)
            ok = modular(mid) <= 1.0
            hi = np.where(ok, mid, hi)
            lo = np.where(ok, lo, mid)
    out[act] = hi
    return out


def luxemburg(values, measure: MeasureSpec, phi: YoungFunction) -> float:
    """Luxemburg norm of a (flattened) array under a uniform-weight measure."""
    if not (phi.finite and phi.continuous):
        raise DomainError("luxemburg requires a finite continuous Young function")
    v = np.abs(np.asarray(values, dtype=np.complex128)).reshape(1, -1)
    if not np.all(np.isfinite(v)):
        raise DomainError("luxemburg input must be finite")
    return float(_lux_batched(v, measure.weight, phi)[0])


def _field_abs(F: PhaseSpaceField) -> np.ndarray:
    """|F| reshaped to (lattice points, torus points)."""
    L = int(np.prod(F.lattice_shape))
    return np.abs(F.values).reshape(L, -1)


def orlicz_norm(F: PhaseSpaceField, phi: YoungFunction) -> float:
    """Luxemburg norm over the product measure (counting x quadrature)."""
    return luxemburg(F.values, product_measure(F.torus), phi)


def mixed_norm(F: PhaseSpaceField, phi1: YoungFunction, phi2: YoungFunction) -> float:
    """Inner Luxemburg over the lattice per node (phi1), outer over the torus (phi2)."""
    v = _field_abs(F)
    inner = _lux_batched(v.T.copy(), 1.0, phi1)  # one norm per torus node
    return luxemburg(inner, torus_measure(F.torus), phi2)


def mixed_norm_swapped(
    F: PhaseSpaceField, phi1: YoungFunction, phi2: YoungFunction
) -> float:
    """Inner Luxemburg over the torus per lattice point (phi2), outer over the lattice (phi1)."""
    v = _field_abs(F)  # rows = lattice points, reduced over torus samples
    inner = _lux_batched(v, F.torus.weight, phi2)
    return luxemburg(inner, counting_measure(), phi1)


def field_lp_norm(F: PhaseSpaceField, p: float) -> float:
    """Quadrature L^p norm over the product measure; p = inf takes the grid max."""
    a = np.abs(F.values)
    if np.isinf(p):
        return float(a.max(initial=0.0))
    if p < 1:
        raise DomainError("p must be >= 1")
    return float((F.torus.weight * (a**p).sum()) ** (1.0 / p))


def field_l1_norm(F: PhaseSpaceField) -> float:
    return field_lp_norm(F, 1.0)


def field_l2_norm(F: PhaseSpaceField) -> float:
    return field_lp_norm(F, 2.0)


def _coeff_matrix(M: int, deg: int, sign: float) -> np.ndarray:
    """Per-axis phase matrix exp(sign * 2 pi i d j / M), shape (2deg+1, M)."""
    ds = np.arange(-deg, deg + 1)
    js = np.arange(M)
    return np.exp(sign * 2j * np.pi * np.outer(ds, js) / M)


def field_coefficients(F: PhaseSpaceField) -> np.ndarray:
    """Torus Fourier coefficients per lattice point, exact for deg <= (M-1)/2."""
    M, n, deg = F.torus.M, F.n, F.degree_bound
    if 2 * deg > M - 1:
        raise PrecisionError("coefficient extraction would alias: need 2*degree <= M-1")
    coef = F.values
    E = _coeff_matrix(M, deg, -1.0) / M
    for _ in range(n):
        # contract the leading torus axis, appending the degree axis at the end
        coef = np.tensordot(coef, E, axes=([n], [1]))
    return coef


def coefficients_to_values(coef: np.ndarray, torus: TorusGrid, deg: int) -> np.ndarray:
    vals = coef
    E = _coeff_matrix(torus.M, deg, +1.0)
    for _ in range(torus.n):
        vals = np.tensordot(vals, E, axes=([torus.n], [0]))
    return vals


def _lattice_convolve(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    """Full n-dimensional convolution along the first n axes."""
    out_shape = tuple(a.shape[i] + b.shape[i] - 1 for i in range(n)) + a.shape[n:]
    out = np.zeros(out_shape, dtype=np.complex128)
    for idx in np.ndindex(a.shape[:n]):
        window = tuple(slice(i, i + b.shape[ax]) for ax, i in enumerate(idx))
        out[window] += a[idx] * b
    return out


def convolve_phase_space(F: PhaseSpaceField, G: PhaseSpaceField) -> PhaseSpaceField:
    """Group convolution (F*G)(m,w) = sum_l int F(l,x) G(m-l, w-x) dx.

    The torus direction multiplies Fourier coefficients (exact); the lattice
    direction is dense convolution, giving output support radius
    F.m_radius + G.m_radius and torus degree min(deg F, deg G).
    """
    if F.torus != G.torus or F.spec != G.spec:
        raise DomainError("fields must share lattice and torus grids")
    r_out = F.m_radius + G.m_radius
    if r_out > 2 * F.spec.C:
        raise RangeError("convolution support would leave the doubled computation box")
    cf = field_coefficients(F)
    cg = field_coefficients(G)
    deg = min(F.degree_bound, G.degree_bound)
    n = F.n

    def trim(c, frm):
        sl = (slice(None),) * n + tuple(
            slice(frm - deg, frm + deg + 1) for _ in range(n)
        )
        return c[sl]

    cf = trim(cf, F.degree_bound)
    cg = trim(cg, G.degree_bound)
    conv = _lattice_convolve(cf, cg, n)
    vals = coefficients_to_values(conv, F.torus, deg)
    return PhaseSpaceField(F.spec, F.torus, r_out, vals, degree_bound=deg)


def holder_pairing(F: PhaseSpaceField, G: PhaseSpaceField) -> float:
    """L^1 mass of the product: sum_m (1/M^n) sum_j |F G|."""
    if F.values.shape != G.values.shape or F.torus != G.torus:
        raise DomainError("paired fields must have identical shape")
    return float(F.torus.weight * np.abs(F.values * G.values).sum())
