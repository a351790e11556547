import math

import mpmath
import numpy as np
import pytest

from tflocal import (
    DomainError,
    UnboundedError,
    complementary,
    conjugate_table,
    delta2_probe,
    eq5,
    evaluate,
    power,
    quasi_young,
)
from tflocal.young import EQ5_BREAK, EQ5_TAIL, table, young_from_dict, young_to_dict

YSTAR = 2 * math.exp(-1.5)


def conj_eq5_closed(y: float) -> float:
    """Independent closed form: quadratic tail plus a Lambert-W head."""
    if y == 0:
        return 0.0
    if y > YSTAR:
        return y * y / 4 - math.exp(-3) / 2
    t = mpmath.re(mpmath.lambertw(-y * math.sqrt(math.e) / 2, -1)) - mpmath.mpf("0.5")
    x = float(mpmath.e**t)
    return x * y - eq5()(x)


def test_power_eval():
    assert evaluate(power(2), 3.0) == 9.0
    assert evaluate(power(1), 0.0) == 0.0
    with pytest.raises(DomainError):
        evaluate(power(2), -1.0)
    with pytest.raises(DomainError):
        power(0.5)  # not convex; use quasi_young


def test_eq5_values():
    phi = eq5()
    x = math.exp(-2)
    assert abs(phi(x) - 2 * math.exp(-4)) <= 1e-15
    # both branches agree at the break point
    head = -EQ5_BREAK**2 * math.log(EQ5_BREAK)
    tail = EQ5_BREAK**2 + EQ5_TAIL
    assert abs(head - 1.5 * math.exp(-3)) <= 1e-16
    assert abs(tail - 1.5 * math.exp(-3)) <= 1e-16
    assert abs(phi(EQ5_BREAK) - 1.5 * math.exp(-3)) <= 1e-15
    assert phi(0.0) == 0.0


def test_eq5_convexity_second_differences():
    phi = eq5()
    xs = np.geomspace(1e-6, 10.0, 512)
    mids = phi((xs[:-1] + xs[1:]) / 2)
    avg = (phi(xs[:-1]) + phi(xs[1:])) / 2
    assert np.all(mids <= avg + 1e-12 * (1 + avg))


def test_complementary_trivial_and_closed_forms():
    for phi in (power(2), power(3), eq5()):
        assert complementary(phi, 0.0) == 0.0
    assert abs(complementary(power(2), 2.0) - 1.0) <= 1e-9
    assert abs(complementary(power(3), 3.0) - 2.0) <= 1e-9


def test_complementary_power2_quarter_square():
    ys = np.geomspace(1e-3, 1e3, 60)
    vals = complementary(power(2), ys)
    assert np.all(np.abs(vals - ys**2 / 4) <= 1e-8 * ys**2 / 4)


def test_complementary_eq5_matches_lambert_w():
    phi = eq5()
    for y in np.geomspace(1e-6, 1e3, 120):
        closed = conj_eq5_closed(float(y))
        got = complementary(phi, float(y))
        assert abs(got - closed) <= 1e-9 * max(closed, 1e-12)


def test_complementary_unbounded_refusal():
    with pytest.raises(UnboundedError):
        complementary(power(1), 2.0)
    # inside the slope range the linear conjugate is fine
    assert complementary(power(1), 0.5) == pytest.approx(0.0, abs=1e-12)


def test_biconjugation_lower_bound():
    for phi in (power(1.5), power(2), power(3), eq5()):
        psi = conjugate_table(phi)
        ts = np.geomspace(1e-3, 1e2, 40)
        second = complementary(psi, ts)
        orig = phi(ts)
        assert np.all(second <= orig * (1 + 1e-6) + 1e-9)


def test_delta2_power_cases():
    assert abs(delta2_probe(power(2), 1.0) - 4.0) <= 1e-12
    assert abs(delta2_probe(power(1), 1.0) - 2.0) <= 1e-12
    assert abs(delta2_probe(power(3), 0.5) - 8.0) <= 1e-12


def test_delta2_eq5_ratio():
    # Phi(2x)/Phi(x) = 4 log(2x)/log(x) on the head branch, which increases
    # toward 4 as x -> 0, so the grid supremum sits at the smallest probe
    # point and stays strictly below 4.
    r = 0.1
    got = delta2_probe(eq5(), r, samples=256)
    xmin = r * 1e-12
    expected = 4.0 * math.log(2 * xmin) / math.log(xmin)
    assert abs(got - expected) <= 1e-12
    assert got < 4.0
    # certificate property on the probed grid
    xs = np.geomspace(xmin, r, 256)
    phi = eq5()
    assert np.all(phi(2 * xs) <= got * phi(xs) * (1 + 1e-12))


def test_delta2_validation():
    with pytest.raises(DomainError):
        delta2_probe(power(2), -1.0)
    with pytest.raises(DomainError):
        delta2_probe(power(2), 1.0, samples=4)


def test_quasi_young():
    base = power(2)
    assert quasi_young(base, 1.0) is base
    half = quasi_young(base, 0.5)
    ts = np.geomspace(1e-3, 1e3, 30)
    assert np.allclose(half(ts), ts)
    q = quasi_young(power(4), 0.5)
    assert np.allclose(q(ts), ts**2)
    with pytest.raises(DomainError):
        quasi_young(base, 0.0)
    with pytest.raises(DomainError):
        quasi_young(base, 1.5)


def test_flags():
    assert power(2).strictly_convex
    assert not power(1).strictly_convex
    assert eq5().strictly_convex
    assert quasi_young(power(2), 0.5).finite  # t -> t, convex but not strictly


def test_table_kind():
    xs = (0.0, 1.0, 2.0, 4.0)
    ys = (0.0, 1.0, 4.0, 16.0)
    phi = table(xs, ys)
    assert phi(1.0) == 1.0
    assert phi(3.0) == 10.0  # linear between (2,4) and (4,16)
    assert phi(5.0) == 22.0  # linear extension with the last slope
    with pytest.raises(DomainError):
        table((0.5, 1.0), (0.0, 1.0))


def test_conjugate_table_majorizes():
    phi = eq5()
    psi = conjugate_table(phi, nodes=512)
    ys = np.geomspace(2e-9, 5e8, 200)
    exact = complementary(phi, ys)
    assert np.all(psi(ys) >= exact * (1 - 1e-9))


def test_young_json_round_trip():
    specs = [
        {"kind": "power", "p": 2.0},
        {"kind": "eq5"},
        {"kind": "quasi", "p": 0.5, "base": {"kind": "power", "p": 4.0}},
    ]
    for s in specs:
        phi = young_from_dict(s)
        assert young_from_dict(young_to_dict(phi))(1.25) == phi(1.25)
    with pytest.raises(DomainError):
        young_from_dict({"kind": "mystery"})
