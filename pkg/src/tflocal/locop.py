"""Time-frequency localization operators and their spectral summaries.

The operator analyzes with g1, multiplies by a phase-space symbol, and
synthesizes with g2.  On the truncation it is a dense matrix assembled from
rank-one atom updates in a fixed (m, node) order, so kernels are
reproducible bit for bit.  Spectral data comes from a dense SVD; every
singular value is kept (thresholding would corrupt trace norms).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DomainError, PrecisionError, RangeError
from .lattice import (
    LatticeSpec,
    PhaseSpaceField,
    Signal,
    TorusGrid,
    shift_array,
)
from .stft import _stft_values, stft, stft_adjoint

__all__ = [
    "OperatorKernel",
    "SpectralSummary",
    "apply_operator",
    "weak_pairing",
    "kernel",
    "adjoint_kernel",
    "spectrum",
    "sigma_tilde",
]


def _content_id(arr: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(arr).tobytes()).hexdigest()[:12]


@dataclass
class OperatorKernel:
    """Dense matrix realization on the box [-C, C]^n, row/column lexicographic."""

    spec: LatticeSpec
    torus: TorusGrid
    matrix: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.matrix = np.ascontiguousarray(self.matrix, dtype=np.complex128)
        size = self.spec.side ** self.spec.n
        if self.matrix.shape != (size, size):
            raise DomainError(f"kernel must be {size}x{size}")
        if not np.all(np.isfinite(self.matrix.view(np.float64))):
            raise DomainError("kernel contains non-finite entries")

    def matvec(self, f: Signal) -> Signal:
        out = self.matrix @ f.values.ravel()
        return Signal(self.spec, out.reshape(self.spec.shape))

    def hermitian_defect(self) -> float:
        return float(np.abs(self.matrix - self.matrix.conj().T).max(initial=0.0))


@dataclass
class SpectralSummary:
    """Singular values (descending), trace, Hilbert-Schmidt norm, Schatten norms."""

    singular_values: np.ndarray
    trace: complex
    hs_norm: float
    schatten: dict

    def __post_init__(self):
        s = np.asarray(self.singular_values, dtype=np.float64)
        if np.any(np.diff(s) > 0):
            raise DomainError("singular values must be sorted descending")
        self.singular_values = s


@lru_cache(maxsize=None)
def _atom_phases(M: int, C: int, n: int) -> np.ndarray:
    """EP[k_flat, j_flat] = exp(2 pi i w_j . k) over the box and grid."""
    ks = np.arange(-C, C + 1)
    js = np.arange(M)
    E = np.exp(2j * np.pi * np.outer(ks, js) / M)
    out = E
    for _ in range(n - 1):
        out = np.kron(out, E)
    return out


def _check_operator_inputs(sigma: PhaseSpaceField, g1: Signal, g2: Signal) -> None:
    spec = sigma.spec
    if g1.spec != spec or g2.spec != spec:
        raise DomainError("windows must live on the symbol's lattice")
    if not (g1.admissible and g2.admissible):
        raise DomainError("windows must be supported in [-K, K]^n")
    if sigma.m_radius > 2 * spec.K:
        raise RangeError(
            "symbol lattice radius exceeds 2K; atoms would leave the computation box"
        )


def _overlap_block(F: PhaseSpaceField, r: int) -> np.ndarray:
    off = F.m_radius - r
    sl = tuple(slice(off, off + 2 * r + 1) for _ in range(F.spec.n))
    return F.values[sl]


def _product_field(sigma: PhaseSpaceField, V: PhaseSpaceField) -> PhaseSpaceField:
    """Pointwise product sigma * V on the overlap of their lattice ranges."""
    r = min(sigma.m_radius, V.m_radius)
    vals = _overlap_block(sigma, r) * _overlap_block(V, r)
    deg = sigma.degree_bound + V.degree_bound
    if deg > sigma.torus.M - 1:
        raise PrecisionError(
            f"product field degree {deg} exceeds the grid resolution M-1 = "
            f"{sigma.torus.M - 1}"
        )
    return PhaseSpaceField(sigma.spec, sigma.torus, r, vals, degree_bound=deg)


def apply_operator(
    sigma: PhaseSpaceField, g1: Signal, g2: Signal, f: Signal
) -> Signal:
    """Apply the localization operator: synthesize(sigma * analyze(f))."""
    _check_operator_inputs(sigma, g1, g2)
    V = stft(f, g1, sigma.torus)
    return stft_adjoint(_product_field(sigma, V), g2)


def weak_pairing(
    sigma: PhaseSpaceField, g1: Signal, g2: Signal, f: Signal, h: Signal
) -> complex:
    """<Lf, h> computed directly on phase space.

    h may be any box signal (for instance an operator output): the pairing
    only needs the atom inner products <h, M_w T_m g2> at |m| <= 2K, which
    are exact finite sums.
    """
    _check_operator_inputs(sigma, g1, g2)
    spec, torus = sigma.spec, sigma.torus
    Vf = stft(f, g1, torus)
    Vh_vals = _stft_values(h.values, g2.values, spec, torus, 2 * spec.K)
    Vh = PhaseSpaceField(spec, torus, 2 * spec.K, Vh_vals, degree_bound=torus.M - 1)
    r = min(sigma.m_radius, Vf.m_radius)
    prod = (
        _overlap_block(sigma, r)
        * _overlap_block(Vf, r)
        * np.conj(_overlap_block(Vh, r))
    )
    return complex(torus.weight * prod.sum())


def _conj_field(F: PhaseSpaceField) -> PhaseSpaceField:
    return PhaseSpaceField(
        F.spec, F.torus, F.m_radius, np.conj(F.values), degree_bound=F.degree_bound
    )


def kernel(sigma: PhaseSpaceField, g1: Signal, g2: Signal) -> OperatorKernel:
    """Dense kernel K(k, l) = sum_m int sigma(m, w) conj(atom1(l)) atom2(k) dw.

    Assembled by accumulating one rank-one update per (m, node) in a fixed
    order; the quadrature weight 1/M^n is folded into the symbol samples.
    """
    _check_operator_inputs(sigma, g1, g2)
    spec, torus = sigma.spec, sigma.torus
    n = spec.n
    size = spec.side**n
    EP = _atom_phases(torus.M, spec.C, n)
    weights = sigma.values.reshape(sigma.values.shape[: n] + (-1,)) * torus.weight
    K = np.zeros((size, size), dtype=np.complex128)
    for m in sigma.m_points():
        t1 = shift_array(g1.values, m).ravel()
        t2 = shift_array(g2.values, m).ravel()
        a1 = t1[:, None] * EP
        a2 = t2[:, None] * EP
        s = weights[sigma.m_index(m)]
        K += np.einsum("kj,j,lj->kl", a2, s, np.conj(a1), optimize=False)
    prov = {
        "symbol": _content_id(sigma.values),
        "g1": _content_id(g1.values),
        "g2": _content_id(g2.values),
        "grid": f"n{spec.n}K{spec.K}C{spec.C}M{torus.M}",
    }
    return OperatorKernel(spec, torus, K, prov)


def adjoint_kernel(sigma: PhaseSpaceField, g1: Signal, g2: Signal) -> OperatorKernel:
    """Kernel of the adjoint operator: conjugate the symbol and swap windows."""
    return kernel(_conj_field(sigma), g2, g1)


def spectrum(K: OperatorKernel, ps=(1.0, 2.0, math.inf)) -> SpectralSummary:
    """Dense SVD summary with trace and entrywise Hilbert-Schmidt cross-check."""
    try:
        s = np.linalg.svd(K.matrix, compute_uv=False)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise PrecisionError(f"SVD failed to converge: {exc}") from exc
    tr = complex(np.trace(K.matrix))
    hs = float(np.linalg.norm(K.matrix.ravel()))
    hs_sv = float(np.sqrt((s**2).sum()))
    if hs > 0 and abs(hs - hs_sv) > 1e-10 * hs:
        raise PrecisionError("Hilbert-Schmidt cross-check failed; SVD unreliable")
    sch = {}
    for p in ps:
        p = float(p)
        if np.isinf(p):
            sch[p] = float(s[0]) if s.size else 0.0
        elif p >= 1:
            sch[p] = float((s**p).sum() ** (1.0 / p))
        else:
            raise DomainError("Schatten exponents must satisfy p >= 1")
    return SpectralSummary(s, tr, hs, sch)


def sigma_tilde(sigma: PhaseSpaceField, g: Signal) -> PhaseSpaceField:
    """Diagonal expectations <L atom, atom> over every phase-space grid point."""
    _check_operator_inputs(sigma, g, g)
    if g.is_zero():
        raise DomainError("window must be non-zero")
    spec, torus = sigma.spec, sigma.torus
    n = spec.n
    K = kernel(sigma, g, g).matrix
    EP = _atom_phases(torus.M, spec.C, n)
    Mn = torus.M**n
    out = np.empty(sigma.lattice_shape + (Mn,), dtype=np.complex128)
    for m in sigma.m_points():
        t = shift_array(g.values, m).ravel()
        a = t[:, None] * EP
        out[sigma.m_index(m)] = np.einsum(
            "kj,kl,lj->j", np.conj(a), K, a, optimize=False
        )
    vals = out.reshape(sigma.lattice_shape + torus.shape)
    return PhaseSpaceField(
        spec, torus, sigma.m_radius, vals, degree_bound=min(2 * spec.K, torus.M - 1)
    )
