import math

import numpy as np
import pytest

from tflocal import (
    DomainError,
    PhaseSpaceField,
    PrecisionError,
    RangeError,
    convolve_phase_space,
    counting_measure,
    eq5,
    holder_pairing,
    luxemburg,
    mixed_norm,
    mixed_norm_swapped,
    orlicz_norm,
    power,
    product_measure,
    torus_measure,
)
from tflocal.orlicz import field_l1_norm, field_l2_norm
from tflocal.verify import (
    _rank_one_symbol,
    _trig_symbol,
    trial_rng,
)
from tflocal.young import conjugate_table


def lux_oracle(vals, weight, phi, iters=200):
    """Independent scalar bisection on the modular, for cross-checking."""
    vals = np.abs(np.asarray(vals, float))
    if vals.max(initial=0.0) == 0.0:
        return 0.0

    def modular(b):
        with np.errstate(all="ignore"):
            return float((weight * phi(vals / b)).sum())

    hi = float(weight * vals.sum() + vals.max())
    while modular(hi) > 1.0:
        hi *= 2.0
    lo = hi
    while modular(lo) < 1.0:
        lo /= 2.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if modular(mid) <= 1.0:
            hi = mid
        else:
            lo = mid
    return hi


def test_luxemburg_zero_and_pythagoras():
    assert luxemburg(np.zeros(5), counting_measure(), power(2)) == 0.0
    got = luxemburg(np.array([3.0, 4.0]), counting_measure(), power(2))
    assert abs(got - 5.0) <= 1e-9 * 5.0


def test_luxemburg_eq5_atom():
    phi = eq5()
    got = luxemburg(np.array([1.0]), counting_measure(), phi)
    analytic = 1.0 / math.sqrt(1.0 - math.exp(-3) / 2)
    assert abs(got - analytic) <= 1e-9 * analytic
    oracle = lux_oracle(np.array([1.0]), 1.0, phi)
    assert abs(got - oracle) <= 1e-9 * oracle


def test_luxemburg_bracket_property():
    rng = trial_rng(5, "lux-bracket", 0)
    for phi in (power(1.5), power(3), eq5()):
        v = np.abs(rng.standard_normal(40)) + 0.01
        b = luxemburg(v, counting_measure(), phi)
        eps = 1e-12
        up = float(phi(v / (b * (1 + eps))).sum())
        dn = float(phi(v / (b * (1 - eps))).sum())
        assert up <= 1.0 <= dn


def test_power_case_reduction(env):
    rng = trial_rng(6, "lux-power", 0)
    for t in range(10):
        v = np.abs(rng.standard_normal(50))
        for p in (1.0, 1.5, 2.0, 3.0):
            got = luxemburg(v, counting_measure(), power(p))
            want = float((v**p).sum() ** (1 / p))
            assert abs(got - want) <= 1e-9 * want
    F = _trig_symbol(env, rng)
    w = env.torus.weight
    for p in (1.0, 1.5, 2.0, 3.0):
        got = luxemburg(F.values, product_measure(env.torus), power(p))
        want = float((w * np.abs(F.values) ** p).sum() ** (1 / p))
        assert abs(got - want) <= 1e-9 * want


def test_luxemburg_cross_oracle(env):
    rng = trial_rng(7, "lux-oracle", 0)
    phi = eq5()
    v = np.abs(rng.standard_normal(30)) * 3
    got = luxemburg(v, counting_measure(), phi)
    want = lux_oracle(v, 1.0, phi)
    assert abs(got - want) <= 1e-9 * want


def test_luxemburg_rejects_bad_input():
    with pytest.raises(DomainError):
        luxemburg(np.array([np.inf]), counting_measure(), power(2))


def test_mixed_norm_power_oracle(env):
    rng = trial_rng(8, "mixed-oracle", 0)
    F = _trig_symbol(env, rng)
    a = np.abs(F.values)
    for p, q in ((1.5, 3.0), (2.0, 2.0), (3.0, 1.5)):
        got = mixed_norm(F, power(p), power(q))
        want = float(((((a**p).sum(axis=0)) ** (q / p)).mean()) ** (1 / q))
        assert abs(got - want) <= 1e-9 * want
        got_sw = mixed_norm_swapped(F, power(p), power(q))
        inner_m = (a**q).mean(axis=1) ** (1 / q)
        want_sw = float((inner_m**p).sum() ** (1 / p))
        assert abs(got_sw - want_sw) <= 1e-9 * want_sw


def test_mixed_norm_separable(env):
    # F(m, w) = a(m) b(w) with b >= 0 splits into a product of norms.
    lat, tor = env.lattice, env.torus
    R = 2 * lat.K
    a = np.exp(-np.linspace(-2, 2, 2 * R + 1) ** 2)
    b = 1.5 + np.cos(2 * np.pi * np.arange(tor.M) / tor.M)
    F = PhaseSpaceField(
        lat, tor, R, np.multiply.outer(a, b).astype(complex), degree_bound=1
    )
    phi, psi = eq5(), power(2)
    na = luxemburg(a, counting_measure(), phi)
    nb = luxemburg(b, torus_measure(tor), psi)
    assert abs(mixed_norm(F, phi, psi) - na * nb) <= 1e-9 * na * nb
    # swapped variant: the first function measures the lattice factor, the
    # second the torus factor
    na2 = luxemburg(a, counting_measure(), psi)
    nb2 = luxemburg(b, torus_measure(tor), phi)
    got = mixed_norm_swapped(F, psi, phi)
    assert abs(got - na2 * nb2) <= 1e-9 * na2 * nb2


def test_zero_fields(env):
    lat, tor = env.lattice, env.torus
    Z = PhaseSpaceField(
        lat, tor, 2 * lat.K, np.zeros((4 * lat.K + 1, tor.M), complex), degree_bound=0
    )
    assert mixed_norm(Z, power(2), power(2)) == 0.0
    assert mixed_norm_swapped(Z, power(2), power(2)) == 0.0
    assert orlicz_norm(Z, eq5()) == 0.0
    assert holder_pairing(Z, Z) == 0.0


def test_convolution_torus_mean(env):
    # unit mass at m = 0, constant in w: convolution takes torus means
    lat, tor = env.lattice, env.torus
    rng = trial_rng(9, "conv-mean", 0)
    G = _trig_symbol(env, rng)
    R = G.m_radius
    ind = np.zeros((2 * R + 1, tor.M), complex)
    ind[R, :] = 1.0
    F = PhaseSpaceField(lat, tor, R, ind, degree_bound=0)
    H = convolve_phase_space(F, G)
    means = G.values.mean(axis=1)
    mid = H.m_radius
    for i, m in enumerate(range(-R, R + 1)):
        assert np.allclose(H.values[m + mid], means[i], atol=1e-12)


def test_convolution_dirichlet_reproduces(env):
    # a full-degree Dirichlet slice at m = 0 reproduces fields of that degree
    lat, tor = env.lattice, env.torus
    rng = trial_rng(10, "conv-dirichlet", 0)
    G = _trig_symbol(env, rng)
    deg = G.degree_bound
    ds = np.arange(-deg, deg + 1)
    js = np.arange(tor.M)
    dirichlet = np.exp(2j * np.pi * np.outer(js, ds) / tor.M).sum(axis=1)
    F = PhaseSpaceField(
        lat,
        tor,
        0,
        dirichlet.reshape((1, tor.M)),
        degree_bound=deg,
    )
    H = convolve_phase_space(F, G)
    assert H.m_radius == G.m_radius
    assert np.allclose(H.values, G.values, atol=1e-10 * np.abs(G.values).max())


def test_convolution_zero(env):
    lat, tor = env.lattice, env.torus
    Z = PhaseSpaceField(lat, tor, 1, np.zeros((3, tor.M), complex), degree_bound=0)
    H = convolve_phase_space(Z, Z)
    assert not np.any(H.values)


def test_convolution_range_error(env):
    lat, tor = env.lattice, env.torus
    big = PhaseSpaceField(
        lat, tor, lat.C, np.zeros((2 * lat.C + 1, tor.M), complex), degree_bound=0
    )
    bigger = PhaseSpaceField(
        lat, tor, lat.C + 1, np.zeros((2 * lat.C + 3, tor.M), complex), degree_bound=0
    )
    with pytest.raises(RangeError):
        convolve_phase_space(big, bigger)


def test_coefficient_alias_refusal(env):
    lat, tor = env.lattice, env.torus
    F = PhaseSpaceField(
        lat, tor, 1, np.ones((3, tor.M), complex), degree_bound=tor.M - 1
    )
    with pytest.raises(PrecisionError):
        convolve_phase_space(F, F)


def test_holder_pairing_cases(env):
    lat, tor = env.lattice, env.torus
    R = 2 * lat.K
    ones_slice = np.zeros((2 * R + 1, tor.M), complex)
    ones_slice[R, :] = 1.0
    F = PhaseSpaceField(lat, tor, R, ones_slice, degree_bound=0)
    assert abs(holder_pairing(F, F) - 1.0) <= 1e-12
    Z = PhaseSpaceField(lat, tor, R, np.zeros_like(ones_slice), degree_bound=0)
    assert holder_pairing(F, Z) == 0.0
    rng = trial_rng(11, "pairing", 0)
    G = _trig_symbol(env, rng)
    Gn = PhaseSpaceField(
        lat, tor, G.m_radius, G.values / field_l2_norm(G), degree_bound=G.degree_bound
    )
    assert abs(holder_pairing(Gn, Gn) - 1.0) <= 1e-10


def test_holder_inequalities_small(env):
    rng_seed = 13
    psi = conjugate_table(eq5())
    for t in range(40):
        rng = trial_rng(rng_seed, "holder-small", t)
        f = np.abs(rng.standard_normal(17))
        g = np.abs(rng.standard_normal(17))
        lhs = float((f * g).sum())
        p = 1.5
        rhs1 = luxemburg(f, counting_measure(), power(p)) * luxemburg(
            g, counting_measure(), power(3.0)
        )
        assert lhs <= rhs1 * (1 + 1e-9)
        rhs2 = (
            2.0
            * luxemburg(f, counting_measure(), eq5())
            * luxemburg(g, counting_measure(), psi)
        )
        assert lhs <= rhs2 * (1 + 1e-9)


def test_convolution_inequality_small(env):
    psi = power(2)
    for t in range(10):
        rng = trial_rng(14, "conv-small", t)
        F = _trig_symbol(env, rng)
        G = _rank_one_symbol(env, rng)
        H = convolve_phase_space(F, G)
        lhs = mixed_norm(H, eq5(), psi)
        rhs = field_l1_norm(F) * mixed_norm(G, eq5(), psi)
        assert lhs <= rhs * (1 + 1e-9)
        lhs2 = orlicz_norm(H, eq5())
        rhs2 = field_l1_norm(F) * orlicz_norm(G, eq5())
        assert lhs2 <= rhs2 * (1 + 1e-9)
