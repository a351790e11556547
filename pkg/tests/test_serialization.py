import json

import numpy as np
import pytest

from tflocal import UsageError, kernel
from tflocal.serialization import (
    dump_field,
    dump_kernel_json,
    dump_kernel_raw,
    dump_signal,
    dump_summary,
    fmt17,
    load_field,
    load_kernel_json,
    load_signal,
)
from tflocal.locop import spectrum
from tflocal.verify import _random_signal, _trig_symbol, trial_rng


def test_fmt17_round_trips():
    for x in (0.1, 1 / 3, 1e-300, 5.0, -0.0, 123456789.123456789, 2**-52):
        assert float(fmt17(x)) == float(x)


def test_signal_round_trip(env):
    rng = trial_rng(61, "ser", 0)
    f = _random_signal(env, rng)
    text = dump_signal(f)
    g = load_signal(text)
    assert g.spec == f.spec
    assert np.array_equal(g.values, f.values)
    assert dump_signal(g) == text  # byte-stable second pass
    obj = json.loads(text)
    assert set(obj) == {"n", "K", "C", "values"}


def test_field_round_trip(env):
    rng = trial_rng(62, "ser", 0)
    F = _trig_symbol(env, rng)
    text = dump_field(F)
    G = load_field(text)
    assert G.m_radius == F.m_radius and G.degree_bound == F.degree_bound
    assert np.array_equal(G.values, F.values)
    assert dump_field(G) == text
    obj = json.loads(text)
    assert set(obj) == {"n", "K", "m_radius", "M", "degree_bound", "values"}


def test_kernel_round_trips(env):
    rng = trial_rng(63, "ser", 0)
    K = kernel(_trig_symbol(env, rng), env.window, env.window2)
    text = dump_kernel_json(K)
    K2 = load_kernel_json(text)
    assert np.array_equal(K2.matrix, K.matrix)
    assert K2.provenance == K.provenance

    payload, sidecar = dump_kernel_raw(K)
    meta = json.loads(sidecar)
    size = meta["size"]
    assert meta["order"] == "row-major"
    assert len(payload) == 2 * size * size * 8
    arr = np.frombuffer(payload, dtype="<f8")
    mat = (arr[0::2] + 1j * arr[1::2]).reshape(size, size)
    assert np.array_equal(mat, K.matrix)


def test_summary_output(env):
    rng = trial_rng(64, "ser", 0)
    K = kernel(_trig_symbol(env, rng), env.window, env.window)
    s = spectrum(K, ps=(1.0, 2.0, float("inf")))
    text = dump_summary(s)
    obj = json.loads(text)
    assert set(obj) == {"singular_values", "trace", "hs_norm", "schatten"}
    assert set(obj["schatten"]) == {"1", "2", "inf"}
    assert obj["singular_values"] == sorted(obj["singular_values"], reverse=True)


def test_malformed_inputs():
    with pytest.raises(UsageError):
        load_signal("not json")
    with pytest.raises(UsageError):
        load_signal('{"n": 1, "K": 1}')
    with pytest.raises(UsageError):
        load_field('{"n": 1, "K": 1, "m_radius": 1, "M": 7, "degree_bound": 0, "values": [[0, 0]]}')
    with pytest.raises(UsageError):
        load_kernel_json('{"n": 1}')
