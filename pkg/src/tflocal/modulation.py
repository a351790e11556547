"""Modulation-space norms of signals and of phase-space symbols.

A modulation norm measures a signal through the size of its analysis
transform: L^p gives M^p, a Luxemburg norm over the product measure gives
M^Phi, the mixed norms give M^{Phi,Psi}, and the swapped mixed norm gives
the amalgam-style W^{Phi,Psi}.  Symbols on the lattice-torus product get
their own M^p through the second-level transform.

The default analysis window is an l2-normalized truncated Gaussian; the
phase-space window for symbol norms is that Gaussian tensored with a Fejer
kernel, which is nonnegative and of exactly representable degree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError
from .lattice import (
    LatticeSpec,
    PhaseSpaceField,
    Signal,
    TorusGrid,
    delta_signal,
    norm2,
)
from .orlicz import field_lp_norm, mixed_norm, mixed_norm_swapped, orlicz_norm
from .stft import stft, stft_symbol
from .young import YoungFunction

__all__ = [
    "WindowSpec",
    "window_signal",
    "default_window",
    "symbol_window",
    "modulation_norm",
    "orlicz_modulation_norm",
    "symbol_modulation_norm",
    "EmbeddingResult",
    "embedding_condition",
]


@dataclass(frozen=True)
class WindowSpec:
    """Analysis window: gaussian(width), kronecker, or loaded from file."""

    kind: str = "gaussian"
    width: Optional[float] = None
    normalization: str = "l2"  # "l2" or "none"
    path: Optional[str] = None

    def __post_init__(self):
        if self.kind not in ("gaussian", "kronecker", "file"):
            raise DomainError(f"unknown window kind {self.kind!r}")
        if self.normalization not in ("l2", "none"):
            raise DomainError("window normalization must be 'l2' or 'none'")


def window_signal(spec: WindowSpec, lattice: LatticeSpec) -> Signal:
    """Realize a window spec as an admissible non-zero signal."""
    if spec.kind == "kronecker" or (spec.kind == "gaussian" and lattice.K == 0):
        g = delta_signal(lattice)
    elif spec.kind == "gaussian":
        width = spec.width if spec.width is not None else lattice.K / 2.0
        if width <= 0:
            raise DomainError("gaussian window width must be positive")
        ks = lattice.axis()
        v = np.zeros(lattice.shape, dtype=np.complex128)
        prof = np.exp(-math.pi * (np.arange(-lattice.K, lattice.K + 1) ** 2) / width)
        block = prof
        for _ in range(lattice.n - 1):
            block = np.multiply.outer(block, prof)
        sl = lattice.admissible_slices()
        v[sl] = block.reshape((2 * lattice.K + 1,) * lattice.n)
        del ks
        g = Signal(lattice, v)
    else:
        raise DomainError("file windows must be loaded before use")
    if spec.normalization == "l2":
        g = Signal(lattice, g.values / norm2(g))
    return g


def default_window(lattice: LatticeSpec) -> Signal:
    return window_signal(WindowSpec(), lattice)


def _fejer_values(M: int, degree: int) -> np.ndarray:
    """Fejer kernel samples sum_{|d|<=L} (1 - |d|/(L+1)) e^{2 pi i d j / M}."""
    ds = np.arange(-degree, degree + 1)
    coefs = 1.0 - np.abs(ds) / (degree + 1.0)
    js = np.arange(M)
    vals = (coefs[None, :] * np.exp(2j * np.pi * np.outer(js, ds) / M)).sum(axis=1)
    return vals.real


def symbol_window(lattice: LatticeSpec, torus: TorusGrid) -> PhaseSpaceField:
    """Phase-space window: lattice Gaussian times a degree-floor(M/4) Fejer kernel."""
    degree = torus.M // 4
    prof = np.exp(
        -math.pi * (np.arange(-lattice.K, lattice.K + 1) ** 2) / max(lattice.K / 2.0, 0.5)
    )
    lat = prof
    for _ in range(lattice.n - 1):
        lat = np.multiply.outer(lat, prof)
    fej = _fejer_values(torus.M, degree)
    tor = fej
    for _ in range(torus.n - 1):
        tor = np.multiply.outer(tor, fej)
    vals = np.multiply.outer(lat, tor).astype(np.complex128)
    scale = math.sqrt(torus.weight * float((np.abs(vals) ** 2).sum()))
    field = PhaseSpaceField(
        lattice, torus, lattice.K, vals / scale, degree_bound=degree
    )
    return field


def _as_window(g0, lattice: LatticeSpec) -> Signal:
    if isinstance(g0, Signal):
        return g0
    if isinstance(g0, WindowSpec):
        return window_signal(g0, lattice)
    raise DomainError("window must be a Signal or WindowSpec")


def modulation_norm(f: Signal, g0, p: float, torus: TorusGrid) -> float:
    """M^p norm: the L^p size of the analysis transform (grid sup for p = inf)."""
    g = _as_window(g0, f.spec)
    return field_lp_norm(stft(f, g, torus), p)


def orlicz_modulation_norm(
    f: Signal,
    g0,
    phi: YoungFunction,
    psi: Optional[YoungFunction] = None,
    variant: str = "MPhi",
    torus: Optional[TorusGrid] = None,
) -> float:
    """Orlicz modulation norms: 'MPhi', 'MPhiPsi' (mixed), 'WPhiPsi' (swapped)."""
    if torus is None:
        raise DomainError("a torus grid is required")
    g = _as_window(g0, f.spec)
    F = stft(f, g, torus)
    if variant == "MPhi":
        return orlicz_norm(F, phi)
    if psi is None:
        raise DomainError(f"variant {variant!r} needs a second Young function")
    if variant == "MPhiPsi":
        return mixed_norm(F, phi, psi)
    if variant == "WPhiPsi":
        return mixed_norm_swapped(F, phi, psi)
    raise DomainError(f"unknown modulation-norm variant {variant!r}")


def symbol_modulation_norm(
    sigma: PhaseSpaceField, G0: PhaseSpaceField, p: float
) -> float:
    """M^p norm of a symbol via the second-level transform.

    The measure is counting on both lattice-type axes and quadrature on both
    torus-type axes.
    """
    T = stft_symbol(sigma, G0)
    a = np.abs(T.values)
    w = T.torus.weight**2
    if np.isinf(p):
        return float(a.max(initial=0.0))
    if p < 1:
        raise DomainError("p must be >= 1")
    return float((w * (a**p).sum()) ** (1.0 / p))


@dataclass(frozen=True)
class EmbeddingResult:
    holds: bool
    C: float


def embedding_condition(
    phi_pair, psi_pair, x0: float, grid: int = 256
) -> EmbeddingResult:
    """Grid certificate for Psi_i(x) <= C Phi_i(x) on (0, x0], i = 1, 2.

    Returns the smallest grid-certified constant.  The condition is declared
    failed when the ratio still grows at the small end of the grid, which is
    how a divergence like -log x is detected.
    """
    if not x0 > 0:
        raise DomainError("x0 must be positive")
    xs = np.geomspace(x0 * 1e-8, x0, grid)
    worst = 0.0
    holds = True
    for phi, psi in zip(phi_pair, psi_pair):
        with np.errstate(all="ignore"):
            num = psi._eval(xs)
            den = phi._eval(xs)
        if np.any((den == 0) & (num > 0)):
            return EmbeddingResult(False, float("inf"))
        ratio = np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)
        if ratio[0] > ratio[1] * (1 + 1e-9):
            holds = False
        worst = max(worst, float(ratio.max()))
    return EmbeddingResult(holds, worst)
