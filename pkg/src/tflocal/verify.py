"""Randomized verification harness.

Every identity and inequality the toolkit claims is registered here as a
named check.  A check draws a seeded ensemble, evaluates its predicate
trial by trial, and reports the worst margin, where margins are normalized
by the right-hand side (or by the natural scale of an identity) so that
tolerances are scale free.  Equality checks report minus the relative
deviation, hence their margins are never positive.

Per-trial randomness comes from a counter-based Philox stream keyed by
(master seed, check id) with the trial index as the counter, so results are
identical across runs and across worker-thread counts; trials may execute
in parallel but are merged in trial order.

Serialized reports are JSON Lines with the fixed field set
{"id","trials","violations","worst_margin","seed","elapsed","tier"}.  The
elapsed field is canonicalized to 0 in the serialized form to keep reports
byte-identical between runs; wall-clock timings stay available on the
CheckResult objects (timing is informational only).
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .errors import UsageError
from .lattice import (
    LatticeSpec,
    PhaseSpaceField,
    Signal,
    TorusGrid,
    inner,
    modulate,
    norm2,
    shift_array,
    signal_from_block,
    translate,
)
from .locop import (
    adjoint_kernel,
    apply_operator,
    kernel,
    sigma_tilde,
    weak_pairing,
)
from .modulation import (
    WindowSpec,
    embedding_condition,
    modulation_norm,
    orlicz_modulation_norm,
    symbol_modulation_norm,
    symbol_window,
    window_signal,
)
from .orlicz import (
    convolve_phase_space,
    counting_measure,
    field_l1_norm,
    field_l2_norm,
    holder_pairing,
    luxemburg,
    mixed_norm,
    mixed_norm_swapped,
    orlicz_norm,
    product_measure,
)
from .serialization import fmt17
from .stft import _stft_values, stft, invert
from .young import YoungFunction, conjugate_table, eq5, power

__all__ = [
    "CheckSpec",
    "CheckResult",
    "Environment",
    "REGISTRY",
    "SPEC_INVARIANTS",
    "registered_ids",
    "default_specs",
    "generate_ensemble",
    "run_suite",
    "report_lines",
    "parse_report",
    "trial_rng",
]

_TINY = 1e-300
_NEG_CAP = -1e300


# ---------------------------------------------------------------------------
# environment


class Environment:
    """Shared fixtures for a suite run: grids, windows, Young functions."""

    def __init__(
        self,
        lattice: LatticeSpec,
        torus: TorusGrid,
        window_spec: WindowSpec = WindowSpec(),
    ):
        if torus.M < 6 * lattice.K + 1:
            raise UsageError("suite requires M >= 6K + 1 for exact quadrature")
        if torus.n != lattice.n:
            raise UsageError("lattice and torus dimensions differ")
        self.lattice = lattice
        self.torus = torus
        self.window_spec = window_spec
        self._cache: dict = {}

    def _get(self, key, builder):
        if key not in self._cache:
            self._cache[key] = builder()
        return self._cache[key]

    @property
    def window(self) -> Signal:
        return self._get("window", lambda: window_signal(self.window_spec, self.lattice))

    @property
    def window2(self) -> Signal:
        spec = WindowSpec("gaussian", width=max(self.lattice.K / 3.0, 0.5))
        return self._get("window2", lambda: window_signal(spec, self.lattice))

    @property
    def phi(self) -> YoungFunction:
        return self._get("phi", eq5)

    @property
    def psi(self) -> YoungFunction:
        """Tabulated numeric conjugate of the default Young function."""
        return self._get("psi", lambda: conjugate_table(self.phi))

    @property
    def G0(self) -> PhaseSpaceField:
        return self._get("G0", lambda: symbol_window(self.lattice, self.torus))


# ---------------------------------------------------------------------------
# seeded ensembles


def trial_rng(seed: int, check_id: str, trial: int) -> np.random.Generator:
    """Counter-based stream split on (seed, check id, trial index)."""
    digest = hashlib.sha256(f"{seed}:{check_id}".encode()).digest()
    key = [
        int.from_bytes(digest[:8], "little"),
        int.from_bytes(digest[8:16], "little"),
    ]
    return np.random.Generator(np.random.Philox(counter=[trial, 0, 0, 0], key=key))


def _crandn(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2)


def _random_signal(env: Environment, rng, half: bool = False) -> Signal:
    """Admissible signal with i.i.d. standard complex normal entries."""
    K, n = env.lattice.K, env.lattice.n
    block = np.zeros((2 * K + 1,) * n, dtype=np.complex128)
    r = K // 2 if half else K
    sl = tuple(slice(K - r, K + r + 1) for _ in range(n))
    block[sl] = _crandn(rng, (2 * r + 1,) * n)
    return signal_from_block(env.lattice, block)


def _trig_symbol(env: Environment, rng) -> PhaseSpaceField:
    """Random trigonometric coefficients up to degree K per axis, per slice."""
    K, n, M = env.lattice.K, env.lattice.n, env.torus.M
    R = 2 * K
    coefs = _crandn(rng, (2 * R + 1,) * n + (2 * K + 1,) * n)
    ds = np.arange(-K, K + 1)
    js = np.arange(M)
    E = np.exp(2j * np.pi * np.outer(ds, js) / M)
    vals = coefs
    for _ in range(n):
        vals = np.tensordot(vals, E, axes=([n], [0]))
    return PhaseSpaceField(env.lattice, env.torus, R, vals, degree_bound=K)


def _fixed_bump(env: Environment) -> np.ndarray:
    """Nonnegative trig bump of degree K: a squared Dirichlet-style kernel."""
    K, M, n = env.lattice.K, env.torus.M, env.lattice.n
    half = K // 2
    ds = np.arange(-half, half + 1)
    js = np.arange(M)
    d = np.exp(2j * np.pi * np.outer(js, ds) / M).sum(axis=1)
    bump = (np.abs(d) ** 2).real  # degree 2*half <= K
    out = bump
    for _ in range(n - 1):
        out = np.multiply.outer(out, bump)
    return out


def _indicator_symbol(env: Environment, rng) -> PhaseSpaceField:
    """Random lattice-box indicator times a fixed nonnegative trig bump."""
    K, n = env.lattice.K, env.lattice.n
    R = 2 * K
    ind = np.ones((1,) * n)
    axes = []
    for _ in range(n):
        a, b = np.sort(rng.integers(-R, R + 1, size=2))
        line = np.zeros(2 * R + 1)
        line[a + R : b + R + 1] = 1.0
        axes.append(line)
    ind = axes[0]
    for line in axes[1:]:
        ind = np.multiply.outer(ind, line)
    vals = np.multiply.outer(ind, _fixed_bump(env)).astype(np.complex128)
    vals = vals.reshape((2 * R + 1,) * n + env.torus.shape)
    return PhaseSpaceField(
        env.lattice, env.torus, R, vals, degree_bound=2 * (K // 2)
    )


def _rank_one_symbol(env: Environment, rng, same: bool = False) -> PhaseSpaceField:
    u = _random_signal(env, rng)
    v = u if same else _random_signal(env, rng)
    Vu = stft(u, env.window, env.torus)
    Vv = Vu if same else stft(v, env.window, env.torus)
    vals = Vu.values * np.conj(Vv.values)
    return PhaseSpaceField(
        env.lattice, env.torus, Vu.m_radius, vals, degree_bound=2 * env.lattice.K
    )


def _constant_symbol(env: Environment, value: complex = 1.0) -> PhaseSpaceField:
    R = 2 * env.lattice.K
    n = env.lattice.n
    vals = np.full((2 * R + 1,) * n + env.torus.shape, value, dtype=np.complex128)
    return PhaseSpaceField(env.lattice, env.torus, R, vals, degree_bound=0)


ENSEMBLE_KINDS = (
    "gaussian-signal",
    "trig-symbol",
    "indicator-symbol",
    "rank-one-symbol",
)


def generate_ensemble(kind: str, seed: int, env: Environment):
    """Draw one registered ensemble member deterministically from the seed."""
    rng = trial_rng(seed, f"ensemble:{kind}", 0)
    if kind == "gaussian-signal":
        return _random_signal(env, rng)
    if kind == "trig-symbol":
        return _trig_symbol(env, rng)
    if kind == "indicator-symbol":
        return _indicator_symbol(env, rng)
    if kind == "rank-one-symbol":
        return _rank_one_symbol(env, rng)
    raise UsageError(f"unknown ensemble kind {kind!r}")


# ---------------------------------------------------------------------------
# margins


def _eq_margin(lhs: float, rhs: float, scale: Optional[float] = None) -> float:
    s = max(abs(rhs) if scale is None else scale, _TINY)
    return max(-abs(lhs - rhs) / s, _NEG_CAP)


def _le_margin(lhs: float, rhs: float, scale: Optional[float] = None) -> float:
    s = max(abs(rhs) if scale is None else scale, _TINY)
    m = (rhs - lhs) / s
    if not np.isfinite(m):
        return _NEG_CAP
    return float(np.clip(m, _NEG_CAP, 1e300))


# ---------------------------------------------------------------------------
# check implementations (each returns a list of submargins, optional payload)


def _chk_plancherel(env, ctx, rng, t):
    f = _random_signal(env, rng)
    g = _random_signal(env, rng)
    lhs = field_l2_norm(stft(f, g, env.torus))
    rhs = norm2(f) * norm2(g)
    return [_eq_margin(lhs, rhs)], None


def _chk_orthogonality(env, ctx, rng, t):
    f1, f2 = _random_signal(env, rng), _random_signal(env, rng)
    g1, g2 = _random_signal(env, rng), _random_signal(env, rng)
    V1 = stft(f1, g1, env.torus)
    V2 = stft(f2, g2, env.torus)
    lhs = env.torus.weight * np.sum(V1.values * np.conj(V2.values))
    rhs = inner(f1, f2) * inner(g2, g1)
    scale = norm2(f1) * norm2(f2) * norm2(g1) * norm2(g2)
    return [_eq_margin(abs(lhs - rhs), 0.0, scale=scale)], None


def _chk_inversion(env, ctx, rng, t):
    f = _random_signal(env, rng)
    g = _random_signal(env, rng)
    for _ in range(200):
        h = _random_signal(env, rng)
        if abs(inner(h, g)) >= 0.1 * norm2(h) * norm2(g):
            break
    rec = invert(stft(f, g, env.torus), g, h)
    return [_eq_margin(norm2(Signal(f.spec, rec.values - f.values)), 0.0, norm2(f))], None


def _chk_covariance(env, ctx, rng, t):
    K, n = env.lattice.K, env.lattice.n
    f = _random_signal(env, rng, half=True)
    tau = tuple(int(x) for x in rng.integers(-(K - K // 2), K - K // 2 + 1, size=n))
    jnu = tuple(int(x) for x in rng.integers(0, env.torus.M, size=n))
    nu = tuple(j / env.torus.M for j in jnu)
    g = env.window
    shifted = modulate(translate(f, tau), nu)
    A = np.abs(stft(shifted, g, env.torus).values)
    B = np.abs(stft(f, g, env.torus).values)
    B = shift_array(B, tau + (0,) * n)  # lattice shift with zero fill
    B = np.roll(B, jnu, axis=tuple(range(n, 2 * n)))  # torus shift is cyclic
    scale = max(float(A.max()), _TINY)
    return [_eq_margin(float(np.abs(A - B).max()), 0.0, scale)], None


_NORM_STYLES = ("product", "mixed", "swapped")


def _field_norm(style, F, phi1, phi2):
    if style == "product":
        return orlicz_norm(F, phi1)
    if style == "mixed":
        return mixed_norm(F, phi1, phi2)
    return mixed_norm_swapped(F, phi1, phi2)


def _axiom_phis(t):
    cycle = [
        (power(1.5), power(2)),
        (power(2), power(3)),
        (eq5(), power(2)),
    ]
    return cycle[t % 3]


def _chk_homogeneity(env, ctx, rng, t):
    F = _trig_symbol(env, rng)
    c = complex(_crandn(rng, ()) * 3)
    phi1, phi2 = _axiom_phis(t)
    style = _NORM_STYLES[t % 3]
    a = _field_norm(style, PhaseSpaceField(F.spec, F.torus, F.m_radius, c * F.values, degree_bound=F.degree_bound), phi1, phi2)
    b = abs(c) * _field_norm(style, F, phi1, phi2)
    return [_eq_margin(a, b, scale=max(b, _TINY))], None


def _chk_triangle(env, ctx, rng, t):
    F = _trig_symbol(env, rng)
    G = _trig_symbol(env, rng)
    phi1, phi2 = _axiom_phis(t)
    style = _NORM_STYLES[t % 3]
    H = PhaseSpaceField(
        F.spec, F.torus, F.m_radius, F.values + G.values, degree_bound=F.degree_bound
    )
    lhs = _field_norm(style, H, phi1, phi2)
    rhs = _field_norm(style, F, phi1, phi2) + _field_norm(style, G, phi1, phi2)
    return [_le_margin(lhs, rhs)], None


def _chk_monotonicity(env, ctx, rng, t):
    G = _trig_symbol(env, rng)
    u = rng.uniform(0.0, 1.0, size=G.values.shape)
    F = PhaseSpaceField(
        G.spec, G.torus, G.m_radius, G.values * u, degree_bound=env.torus.M - 1
    )
    phi1, phi2 = _axiom_phis(t)
    style = _NORM_STYLES[t % 3]
    lhs = _field_norm(style, F, phi1, phi2)
    rhs = _field_norm(style, G, phi1, phi2)
    return [_le_margin(lhs, rhs, scale=max(rhs, _TINY))], None


_LUX_PS = (1.0, 1.5, 2.0, 3.0)


def _chk_power_reduction(env, ctx, rng, t):
    K, n = env.lattice.K, env.lattice.n
    use_field = t % 2 == 1
    if use_field:
        F = _trig_symbol(env, rng)
        v = np.abs(F.values).ravel()
        measure = product_measure(env.torus)
    else:
        v = np.abs(_crandn(rng, ((2 * K + 1) ** n,)))
        measure = counting_measure()
    margins = []
    for p in _LUX_PS:
        phi = power(p)
        b = luxemburg(v, measure, phi)
        direct = float((measure.weight * v**p).sum() ** (1.0 / p))
        margins.append(_eq_margin(b, direct, scale=max(direct, _TINY)))
        if b > 0:
            eps = 1e-12
            up = (measure.weight * phi._eval(v / (b * (1 + eps)))).sum()
            dn = (measure.weight * phi._eval(v / (b * (1 - eps)))).sum()
            margins.append(0.0 if (up <= 1.0 <= dn) else -1.0)
    return margins, None


_HOLDER_PS = (4.0 / 3.0, 1.5, 2.0, 3.0)


def _chk_holder_lattice_power(env, ctx, rng, t):
    K, n = env.lattice.K, env.lattice.n
    size = (2 * K + 1) ** n
    f = np.abs(_crandn(rng, (size,)))
    g = np.abs(_crandn(rng, (size,)))
    p = _HOLDER_PS[t % len(_HOLDER_PS)]
    q = p / (p - 1.0)
    lhs = float((f * g).sum())
    rhs = luxemburg(f, counting_measure(), power(p)) * luxemburg(
        g, counting_measure(), power(q)
    )
    return [_le_margin(lhs, rhs)], None


def _chk_holder_lattice_conj(env, ctx, rng, t):
    K, n = env.lattice.K, env.lattice.n
    size = (2 * K + 1) ** n
    f = np.abs(_crandn(rng, (size,)))
    g = np.abs(_crandn(rng, (size,)))
    lhs = float((f * g).sum())
    rhs = 2.0 * luxemburg(f, counting_measure(), env.phi) * luxemburg(
        g, counting_measure(), env.psi
    )
    return [_le_margin(lhs, rhs)], None


def _chk_holder_mixed_power(env, ctx, rng, t):
    F = _trig_symbol(env, rng)
    G = _trig_symbol(env, rng)
    p1 = _HOLDER_PS[t % len(_HOLDER_PS)]
    p2 = _HOLDER_PS[(t // len(_HOLDER_PS)) % len(_HOLDER_PS)]
    q1, q2 = p1 / (p1 - 1.0), p2 / (p2 - 1.0)
    lhs = holder_pairing(F, G)
    rhs = mixed_norm(F, power(p1), power(p2)) * mixed_norm(G, power(q1), power(q2))
    return [_le_margin(lhs, rhs)], None


def _chk_holder_mixed_conj(env, ctx, rng, t):
    F = _trig_symbol(env, rng)
    G = _trig_symbol(env, rng)
    lhs = holder_pairing(F, G)
    rhs = 2.0 * mixed_norm(F, env.phi, power(2)) * mixed_norm(G, env.psi, power(2))
    return [_le_margin(lhs, rhs)], None


def _conv_pair(env, rng, t):
    F = _trig_symbol(env, rng)
    G = _rank_one_symbol(env, rng) if t % 2 else _trig_symbol(env, rng)
    return F, G


def _chk_convolution_mixed_power(env, ctx, rng, t):
    F, G = _conv_pair(env, rng, t)
    H = convolve_phase_space(F, G)
    p1 = _HOLDER_PS[t % len(_HOLDER_PS)]
    p2 = p1 if t % 3 == 0 else _HOLDER_PS[(t + 1) % len(_HOLDER_PS)]
    lhs = mixed_norm(H, power(p1), power(p2))
    rhs = field_l1_norm(F) * mixed_norm(G, power(p1), power(p2))
    return [_le_margin(lhs, rhs)], None


def _chk_convolution_mixed_orlicz(env, ctx, rng, t):
    F, G = _conv_pair(env, rng, t)
    H = convolve_phase_space(F, G)
    lhs = mixed_norm(H, env.phi, power(2))
    rhs = field_l1_norm(F) * mixed_norm(G, env.phi, power(2))
    return [_le_margin(lhs, rhs)], None


def _chk_convolution_product(env, ctx, rng, t):
    F, G = _conv_pair(env, rng, t)
    H = convolve_phase_space(F, G)
    phi = env.phi if t % 2 else power(1.5)
    lhs = orlicz_norm(H, phi)
    rhs = field_l1_norm(F) * orlicz_norm(G, phi)
    return [_le_margin(lhs, rhs)], None


_X0 = math.exp(-2.0)


def _chk_embedding(env, ctx, rng, t):
    margins = []
    # source power(1.5) absorbs target power(2) on (0, 1] with constant 1
    r = embedding_condition((power(1.5),) * 2, (power(2),) * 2, 1.0)
    margins.append(_le_margin(r.C, 1.0) if r.holds else -1.0)
    # the log-perturbed square dominates the plain square below e^{-2}: C <= 1/2
    r = embedding_condition((env.phi,) * 2, (power(2),) * 2, _X0)
    margins.append(_le_margin(r.C, 0.5) if r.holds else -1.0)
    # the reverse direction diverges like -log x and must be rejected
    r = embedding_condition((power(2),) * 2, (env.phi,) * 2, _X0)
    margins.append(0.0 if not r.holds else -1.0)
    return margins, None


def _chk_inclusion_flanks(env, ctx, rng, t):
    left = embedding_condition((power(1.5),) * 2, (env.phi,) * 2, _X0)
    right = embedding_condition((env.phi,) * 2, (power(2),) * 2, _X0)
    margins = [0.0 if left.holds else -1.0, 0.0 if right.holds else -1.0]
    payload = (left.C, right.C)
    return margins, payload


def _fin_inclusion(env, ctx, payloads):
    if not payloads:
        return None
    lc, rc = payloads[0]
    return f"C_left={fmt17(lc)};C_right={fmt17(rc)}"


def _chk_m2_identity(env, ctx, rng, t):
    f = _random_signal(env, rng)
    val = modulation_norm(f, env.window, 2.0, env.torus)
    return [_eq_margin(val, norm2(f), scale=max(norm2(f), _TINY))], None


def _chk_shift_invariance(env, ctx, rng, t):
    K, n = env.lattice.K, env.lattice.n
    f = _random_signal(env, rng, half=True)
    tau = tuple(int(x) for x in rng.integers(-(K - K // 2), K - K // 2 + 1, size=n))
    jnu = tuple(int(x) for x in rng.integers(0, env.torus.M, size=n))
    nu = tuple(j / env.torus.M for j in jnu)
    shifted = modulate(translate(f, tau), nu)

    which = t % 5
    if which == 0:
        norm = lambda x: modulation_norm(x, env.window, 1.0, env.torus)
    elif which == 1:
        norm = lambda x: modulation_norm(x, env.window, 2.0, env.torus)
    elif which == 2:
        norm = lambda x: modulation_norm(x, env.window, math.inf, env.torus)
    elif which == 3:
        norm = lambda x: orlicz_modulation_norm(
            x, env.window, env.phi, variant="MPhi", torus=env.torus
        )
    else:
        norm = lambda x: orlicz_modulation_norm(
            x, env.window, env.phi, power(2), variant="MPhiPsi", torus=env.torus
        )
    a, b = norm(f), norm(shifted)
    return [_eq_margin(b, a, scale=max(a, _TINY))], None


def _chk_window_robustness(env, ctx, rng, t):
    f = _random_signal(env, rng)
    a = orlicz_modulation_norm(f, env.window, env.phi, variant="MPhi", torus=env.torus)
    b = orlicz_modulation_norm(f, env.window2, env.phi, variant="MPhi", torus=env.torus)
    r = a / b if b > 0 else math.inf
    ok = np.isfinite(r) and r > 0
    return [0.0 if ok else _NEG_CAP], (r if ok else math.inf)


def _fin_window_robustness(env, ctx, payloads):
    rs = [r for r in payloads if np.isfinite(r)]
    if not rs:
        return "R=inf"
    R = max(max(rs), 1.0 / min(rs))
    return f"R={fmt17(R)}"


def _chk_two_path(env, ctx, rng, t):
    sigma = _trig_symbol(env, rng)
    g1, g2 = env.window, env.window2
    f = _random_signal(env, rng)
    h = _random_signal(env, rng)
    out = apply_operator(sigma, g1, g2, f)
    K = kernel(sigma, g1, g2)
    via_matrix = K.matvec(f)
    scale = max(float(np.abs(out.values).max()), _TINY)
    m1 = _eq_margin(float(np.abs(via_matrix.values - out.values).max()), 0.0, scale)
    wp = weak_pairing(sigma, g1, g2, f, h)
    ip = inner(out, h)
    m2 = _eq_margin(abs(wp - ip), 0.0, max(abs(ip), scale * norm2(h)))
    return [m1, m2], None


def _chk_identity_operator(env, ctx, rng, t):
    sigma = _constant_symbol(env)
    g = env.window
    K = kernel(sigma, g, g).matrix
    spec = env.lattice
    idx = np.arange(spec.side**spec.n).reshape(spec.shape)
    sel = idx[spec.admissible_slices()].ravel()
    block = K[np.ix_(sel, sel)]
    eye = np.eye(block.shape[0])
    return [_eq_margin(float(np.abs(block - eye).max()), 0.0, 1.0)], None


def _chk_adjoint_identity(env, ctx, rng, t):
    sigma = _trig_symbol(env, rng)
    g1 = _random_signal(env, rng)
    g2 = _random_signal(env, rng)
    A = kernel(sigma, g1, g2).matrix.conj().T
    B = adjoint_kernel(sigma, g1, g2).matrix
    scale = max(float(np.abs(A).max()), 1.0)
    m1 = _eq_margin(float(np.abs(A - B).max()), 0.0, scale)
    real_sigma = PhaseSpaceField(
        sigma.spec,
        sigma.torus,
        sigma.m_radius,
        sigma.values.real.astype(np.complex128),
        degree_bound=sigma.degree_bound,
    )
    H = kernel(real_sigma, g1, g1)
    m2 = _eq_margin(H.hermitian_defect(), 0.0, max(float(np.abs(H.matrix).max()), 1.0))
    return [m1, m2], None


def _chk_trace_identity(env, ctx, rng, t):
    sigma = _trig_symbol(env, rng)
    if t % 2:
        g1, g2 = env.window, env.window2
    else:
        g1, g2 = _random_signal(env, rng), _random_signal(env, rng)
    K = kernel(sigma, g1, g2)
    mass = complex(env.torus.weight * sigma.values.sum())
    expected = inner(g2, g1) * mass
    scale = max(
        abs(expected),
        norm2(g1) * norm2(g2) * env.torus.weight * float(np.abs(sigma.values).sum()),
        _TINY,
    )
    tr = complex(np.trace(K.matrix))
    m1 = _eq_margin(abs(tr - expected), 0.0, scale)
    s = np.linalg.svd(K.matrix, compute_uv=False)
    hs_e = float(np.linalg.norm(K.matrix.ravel()))
    hs_s = float(np.sqrt((s**2).sum()))
    m2 = _eq_margin(hs_e, hs_s, scale=max(hs_e, _TINY))
    return [m1, m2], None


def _chk_opnorm_plancherel(env, ctx, rng, t):
    sigma = _trig_symbol(env, rng)
    g1 = _random_signal(env, rng)
    g2 = _random_signal(env, rng)
    s = np.linalg.svd(kernel(sigma, g1, g2).matrix, compute_uv=False)
    rhs = float(np.abs(sigma.values).max()) * norm2(g1) * norm2(g2)
    return [_le_margin(float(s[0]), rhs)], None


def _chk_opnorm_schur(env, ctx, rng, t):
    sigma = _trig_symbol(env, rng)
    g1 = _random_signal(env, rng)
    g2 = _random_signal(env, rng)
    K = kernel(sigma, g1, g2).matrix
    s1 = float(np.linalg.svd(K, compute_uv=False)[0])
    a = np.abs(K)
    rhs = math.sqrt(float(a.sum(axis=0).max()) * float(a.sum(axis=1).max()))
    return [_le_margin(s1, rhs)], None


def _nonneg_symbol(env, rng, t):
    return _indicator_symbol(env, rng) if t % 2 else _rank_one_symbol(env, rng, same=True)


def _chk_s1_positive(env, ctx, rng, t):
    sigma = _nonneg_symbol(env, rng, t)
    g = env.window
    K = kernel(sigma, g, g).matrix
    s = np.linalg.svd(K, compute_uv=False)
    s1v = float(s[0])
    eigs = np.linalg.eigvalsh((K + K.conj().T) / 2.0)
    m_psd = float(eigs.min()) / max(s1v, _TINY)
    trace = float(np.trace(K).real)
    S1 = float(s.sum())
    m_eq = _eq_margin(S1, trace, scale=max(trace, _TINY))
    mass = env.torus.weight * float(np.abs(sigma.values).sum())
    m_bound = _le_margin(S1, mass * norm2(g) ** 2)
    m_exact = _eq_margin(trace, mass * norm2(g) ** 2, scale=max(trace, _TINY))
    return [m_psd, m_eq, m_bound, m_exact], None


def _chk_s1_general(env, ctx, rng, t):
    sigma = _trig_symbol(env, rng)
    g1 = _random_signal(env, rng)
    g2 = _random_signal(env, rng)
    gmax2 = max(norm2(g1), norm2(g2)) ** 2
    parts = [
        np.maximum(sigma.values.real, 0.0),
        np.maximum(-sigma.values.real, 0.0),
        np.maximum(sigma.values.imag, 0.0),
        np.maximum(-sigma.values.imag, 0.0),
    ]
    margins = []
    for pv in parts:
        pf = PhaseSpaceField(
            sigma.spec,
            sigma.torus,
            sigma.m_radius,
            pv.astype(np.complex128),
            degree_bound=env.torus.M - 1,
        )
        s = np.linalg.svd(kernel(pf, g1, g2).matrix, compute_uv=False)
        l1 = env.torus.weight * float(pv.sum())
        margins.append(_le_margin(float(s.sum()), l1 * gmax2))
    s = np.linalg.svd(kernel(sigma, g1, g2).matrix, compute_uv=False)
    l1 = env.torus.weight * float(np.abs(sigma.values).sum())
    margins.append(_le_margin(float(s.sum()), 4.0 * l1 * gmax2))
    return margins, None


_SCH_PS = (1.0, 1.5, 2.0, 3.0, math.inf)


def _chk_schatten_logconvexity(env, ctx, rng, t):
    sigma = _trig_symbol(env, rng)
    g1 = _random_signal(env, rng)
    g2 = _random_signal(env, rng)
    s = np.linalg.svd(kernel(sigma, g1, g2).matrix, compute_uv=False)
    S1, Sinf = float(s.sum()), float(s[0])
    margins = []
    for p in _SCH_PS:
        if math.isinf(p):
            lhs, rhs = Sinf, Sinf
        else:
            lhs = float((s**p).sum() ** (1.0 / p))
            rhs = S1 ** (1.0 / p) * Sinf ** (1.0 - 1.0 / p)
        margins.append(_le_margin(lhs, rhs))
    return margins, None


def _chk_trace_sandwich(env, ctx, rng, t):
    sigma = _nonneg_symbol(env, rng, t)
    g = env.window
    st = sigma_tilde(sigma, g)
    lhs = env.torus.weight * float(np.abs(st.values).sum())
    s = np.linalg.svd(kernel(sigma, g, g).matrix, compute_uv=False)
    rhs = norm2(g) ** 2 * float(s.sum())
    return [_le_margin(lhs, rhs)], None


def _pre_mphi(env, spec):
    rng = trial_rng(spec.seed, spec.id + ":setup", 0)
    sigma = _trig_symbol(env, rng)
    g1, g2 = env.window, env.window2
    Kmat = kernel(sigma, g1, g2).matrix
    s1v = float(np.linalg.svd(Kmat, compute_uv=False)[0])
    a = np.abs(Kmat)
    hard = [
        _le_margin(s1v, float(np.abs(sigma.values).max()) * norm2(g1) * norm2(g2)),
        _le_margin(
            s1v, math.sqrt(float(a.sum(axis=0).max()) * float(a.sum(axis=1).max()))
        ),
    ]
    g0 = env.window
    norm_g1_psi = orlicz_modulation_norm(g1, g0, env.psi, variant="MPhi", torus=env.torus)
    norm_g2_phi = orlicz_modulation_norm(g2, g0, env.phi, variant="MPhi", torus=env.torus)
    sym_m1 = symbol_modulation_norm(sigma, env.G0, 1.0)
    rhs_m1 = sym_m1 * norm_g1_psi * norm_g2_phi
    rhs_l1 = field_l1_norm(sigma) * norm_g1_psi * norm_g2_phi
    g1_m1 = modulation_norm(g1, g0, 1.0, env.torus)
    g2_m1 = modulation_norm(g2, g0, 1.0, env.torus)
    g1_inf = float(np.abs(g1.values).max())
    g2_inf = float(np.abs(g2.values).max())
    rhs_schur = max(g1_m1 * g2_inf, g1_inf * g2_m1) * sym_m1
    return {
        "sigma": sigma,
        "g1": g1,
        "g2": g2,
        "hard": hard,
        "rhs": {"symbol_m1": rhs_m1, "l1": rhs_l1, "schur": rhs_schur},
    }


def _truncated_mphi(env, x: Signal) -> float:
    """Luxemburg size of the analysis sum over the fixed [-2K, 2K]^n window range.

    Operator outputs extend past the admissible block, so their exact
    modulation norm is not representable at C = 3K; this functional measures
    every box signal against the same truncated phase-space region and
    coincides with the M^Phi norm on admissible inputs.  It feeds the
    reported boundedness ratios only, never a hard assertion.
    """
    vals = _stft_values(
        x.values, env.window.values, env.lattice, env.torus, 2 * env.lattice.K
    )
    F = PhaseSpaceField(
        env.lattice, env.torus, 2 * env.lattice.K, vals, degree_bound=env.torus.M - 1
    )
    return orlicz_norm(F, env.phi)


def _chk_mphi(env, ctx, rng, t):
    f = _random_signal(env, rng)
    num = _truncated_mphi(env, apply_operator(ctx["sigma"], ctx["g1"], ctx["g2"], f))
    den = _truncated_mphi(env, f)
    r = num / den if den > 0 else math.inf
    margins = [0.0 if np.isfinite(r) else _NEG_CAP]
    if t == 0:
        margins.extend(ctx["hard"])
    return margins, r


def _fin_mphi(env, ctx, payloads):
    rs = np.asarray([r for r in payloads if np.isfinite(r)], dtype=float)
    if rs.size == 0:
        return "kappa=inf;cov=inf"
    kappa = float(rs.max()) / max(ctx["rhs"]["symbol_m1"], _TINY)
    cov = float(rs.std() / max(rs.mean(), _TINY))
    return f"kappa={fmt17(kappa)};cov={fmt17(cov)}"


# ---------------------------------------------------------------------------
# registry


@dataclass(frozen=True)
class CheckDef:
    id: str
    trials: int
    tolerance: float
    ensemble: str
    trial_fn: Callable
    tier: Optional[str] = None
    precompute: Optional[Callable] = None
    finalize: Optional[Callable] = None


@dataclass(frozen=True)
class CheckSpec:
    """One requested check run; None fields fall back to registry defaults."""

    id: str
    trials: Optional[int] = None
    tolerance: Optional[float] = None
    ensemble: Optional[str] = None
    seed: int = 20240801


@dataclass
class CheckResult:
    id: str
    trials: int
    violations: int
    worst_margin: float
    seed: int
    elapsed: float
    tier: Optional[str] = None


def _defs():
    d = [
        CheckDef("plancherel", 100, 1e-10, "gaussian-signal", _chk_plancherel),
        CheckDef("orthogonality", 100, 1e-10, "gaussian-signal", _chk_orthogonality),
        CheckDef("inversion_roundtrip", 100, 1e-10, "gaussian-signal", _chk_inversion),
        CheckDef("stft_covariance", 100, 1e-12, "gaussian-signal", _chk_covariance),
        CheckDef("orlicz_homogeneity", 100, 1e-9, "trig-symbol", _chk_homogeneity),
        CheckDef("orlicz_triangle", 100, 1e-9, "trig-symbol", _chk_triangle),
        CheckDef("orlicz_monotonicity", 100, 1e-12, "trig-symbol", _chk_monotonicity),
        CheckDef(
            "luxemburg_power_reduction", 100, 1e-9, "trig-symbol", _chk_power_reduction
        ),
        CheckDef(
            "holder_lattice_power",
            500,
            1e-9,
            "gaussian-signal",
            _chk_holder_lattice_power,
            tier="holder-constant-1",
        ),
        CheckDef(
            "holder_lattice_conjugate",
            500,
            1e-9,
            "gaussian-signal",
            _chk_holder_lattice_conj,
            tier="holder-constant-2",
        ),
        CheckDef(
            "holder_mixed_power",
            500,
            1e-9,
            "trig-symbol",
            _chk_holder_mixed_power,
            tier="holder-constant-1",
        ),
        CheckDef(
            "holder_mixed_conjugate",
            500,
            1e-9,
            "trig-symbol",
            _chk_holder_mixed_conj,
            tier="holder-constant-2",
        ),
        CheckDef(
            "convolution_mixed_power",
            100,
            1e-9,
            "trig-symbol",
            _chk_convolution_mixed_power,
        ),
        CheckDef(
            "convolution_mixed_orlicz",
            100,
            1e-9,
            "trig-symbol",
            _chk_convolution_mixed_orlicz,
        ),
        CheckDef(
            "convolution_product", 100, 1e-9, "trig-symbol", _chk_convolution_product
        ),
        CheckDef("embedding_criteria", 1, 1e-9, "trig-symbol", _chk_embedding),
        CheckDef(
            "inclusion_chain_flanks",
            1,
            1e-9,
            "trig-symbol",
            _chk_inclusion_flanks,
            finalize=_fin_inclusion,
        ),
        CheckDef("m2_identity", 100, 1e-10, "gaussian-signal", _chk_m2_identity),
        CheckDef(
            "tf_shift_invariance", 100, 1e-10, "gaussian-signal", _chk_shift_invariance
        ),
        CheckDef(
            "window_robustness",
            100,
            1e-9,
            "gaussian-signal",
            _chk_window_robustness,
            finalize=_fin_window_robustness,
        ),
        CheckDef("locop_two_path", 50, 1e-12, "trig-symbol", _chk_two_path),
        CheckDef("identity_operator", 1, 1e-10, "trig-symbol", _chk_identity_operator),
        CheckDef("adjoint_identity", 50, 1e-12, "trig-symbol", _chk_adjoint_identity),
        CheckDef("trace_identity", 50, 1e-10, "trig-symbol", _chk_trace_identity),
        CheckDef(
            "opnorm_plancherel_bound", 100, 1e-9, "trig-symbol", _chk_opnorm_plancherel
        ),
        CheckDef("opnorm_schur_bound", 100, 1e-9, "trig-symbol", _chk_opnorm_schur),
        CheckDef(
            "s1_positive_trace", 50, 1e-10, "indicator-symbol", _chk_s1_positive
        ),
        CheckDef("s1_general_split", 50, 1e-9, "trig-symbol", _chk_s1_general),
        CheckDef(
            "schatten_logconvexity", 50, 1e-9, "trig-symbol", _chk_schatten_logconvexity
        ),
        CheckDef("trace_sandwich", 50, 1e-9, "indicator-symbol", _chk_trace_sandwich),
        CheckDef(
            "mphi_boundedness",
            100,
            1e-9,
            "gaussian-signal",
            _chk_mphi,
            precompute=_pre_mphi,
            finalize=_fin_mphi,
        ),
    ]
    return {c.id: c for c in d}


REGISTRY = _defs()

# module invariants (stft / orlicz / modulation / locop) -> check ids; the
# registry-completeness test enumerates both sides of this table
SPEC_INVARIANTS = {
    "stft.orthogonality": ["orthogonality"],
    "stft.plancherel": ["plancherel"],
    "stft.inversion_round_trip": ["inversion_roundtrip"],
    "stft.covariance": ["stft_covariance"],
    "orlicz.norm_axioms": [
        "orlicz_homogeneity",
        "orlicz_triangle",
        "orlicz_monotonicity",
    ],
    "orlicz.power_reduction": ["luxemburg_power_reduction"],
    "orlicz.holder_lattice": ["holder_lattice_power", "holder_lattice_conjugate"],
    "orlicz.holder_mixed": ["holder_mixed_power", "holder_mixed_conjugate"],
    "orlicz.convolution_young": [
        "convolution_mixed_power",
        "convolution_mixed_orlicz",
        "convolution_product",
    ],
    "modulation.m2_identity": ["m2_identity"],
    "modulation.shift_invariance": ["tf_shift_invariance"],
    "modulation.embedding_criteria": ["embedding_criteria", "inclusion_chain_flanks"],
    "modulation.window_robustness": ["window_robustness"],
    "locop.two_path_consistency": ["locop_two_path"],
    "locop.identity_case": ["identity_operator"],
    "locop.adjoint_identity": ["adjoint_identity"],
    "locop.trace_identity": ["trace_identity"],
    "locop.operator_norm_bound": ["opnorm_plancherel_bound"],
    "locop.schur_test": ["opnorm_schur_bound"],
    "locop.positive_trace_class": ["s1_positive_trace"],
    "locop.general_trace_class": ["s1_general_split"],
    "locop.schatten_interpolation": ["schatten_logconvexity"],
    "locop.trace_sandwich": ["trace_sandwich"],
    "locop.mphi_harness": ["mphi_boundedness"],
}


def registered_ids():
    return sorted(REGISTRY)


def default_specs(ids=None, seed: int = 20240801):
    """CheckSpecs with registry defaults, in a fixed order."""
    sel = registered_ids() if ids is None else list(ids)
    out = []
    for cid in sel:
        if cid not in REGISTRY:
            raise UsageError(f"unknown check id {cid!r}")
        out.append(CheckSpec(id=cid, seed=seed))
    return out


# ---------------------------------------------------------------------------
# runner


def _resolve(spec: CheckSpec) -> CheckSpec:
    if spec.id not in REGISTRY:
        raise UsageError(f"unknown check id {spec.id!r}")
    cd = REGISTRY[spec.id]
    return replace(
        spec,
        trials=cd.trials if spec.trials is None else spec.trials,
        tolerance=cd.tolerance if spec.tolerance is None else spec.tolerance,
        ensemble=cd.ensemble if spec.ensemble is None else spec.ensemble,
    )


def run_suite(specs, env: Environment, threads: int = 1):
    """Run the requested checks; deterministic for fixed seeds and any thread count."""
    results = []
    threads = max(1, int(threads))
    for raw in specs:
        spec = _resolve(raw)
        if spec.trials < 1:
            raise UsageError("trials must be >= 1")
        cd = REGISTRY[spec.id]
        t0 = time.perf_counter()
        ctx = cd.precompute(env, spec) if cd.precompute else None

        def one(t, _spec=spec, _cd=cd, _ctx=ctx):
            rng = trial_rng(_spec.seed, _spec.id, t)
            margins, payload = _cd.trial_fn(env, _ctx, rng, t)
            return min(margins), payload

        if threads > 1 and spec.trials > 1:
            with ThreadPoolExecutor(max_workers=threads) as ex:
                outs = list(ex.map(one, range(spec.trials)))
        else:
            outs = [one(t) for t in range(spec.trials)]
        margins = [m for m, _ in outs]
        payloads = [p for _, p in outs if p is not None]
        violations = sum(1 for m in margins if m < -spec.tolerance)
        tier = cd.finalize(env, ctx, payloads) if cd.finalize else cd.tier
        results.append(
            CheckResult(
                id=spec.id,
                trials=spec.trials,
                violations=violations,
                worst_margin=float(min(margins)),
                seed=spec.seed,
                elapsed=time.perf_counter() - t0,
                tier=tier,
            )
        )
    return results


# ---------------------------------------------------------------------------
# report I/O


def report_lines(results, canonical_elapsed: bool = True) -> str:
    """JSON Lines report; elapsed is canonicalized to 0 for reproducibility."""
    lines = []
    for r in results:
        tier = json.dumps(r.tier) if r.tier is not None else "null"
        elapsed = 0.0 if canonical_elapsed else r.elapsed
        lines.append(
            "{"
            + f'"id": {json.dumps(r.id)}, "trials": {r.trials}, '
            + f'"violations": {r.violations}, '
            + f'"worst_margin": {fmt17(r.worst_margin)}, '
            + f'"seed": {r.seed}, "elapsed": {fmt17(elapsed)}, "tier": {tier}'
            + "}"
        )
    return "\n".join(lines) + ("\n" if lines else "")


def parse_report(text: str):
    out = []
    for line in text.splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        out.append(
            CheckResult(
                id=obj["id"],
                trials=int(obj["trials"]),
                violations=int(obj["violations"]),
                worst_margin=float(obj["worst_margin"]),
                seed=int(obj["seed"]),
                elapsed=float(obj["elapsed"]),
                tier=obj.get("tier"),
            )
        )
    return out
