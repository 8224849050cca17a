"""Stream derivation: determinism, separation, and key validation."""

import numpy as np
import pytest

from bcforest import (
    ConfigError,
    ROLE_BASE,
    ROLE_SHADOW,
    RngSpec,
    UsageError,
    child_seed,
    child_spec,
    derive_stream,
)


def test_same_index_same_sequence():
    spec = RngSpec(42)
    a = derive_stream(spec, 0).random(100)
    b = derive_stream(spec, 0).random(100)
    assert np.array_equal(a, b)


def test_different_indices_differ():
    spec = RngSpec(42)
    a = derive_stream(spec, 0).random(100)
    b = derive_stream(spec, 1).random(100)
    assert not np.array_equal(a, b)


def test_different_roles_differ():
    spec = RngSpec(42)
    a = derive_stream(spec, 3, role=ROLE_BASE).random(50)
    b = derive_stream(spec, 3, role=ROLE_SHADOW).random(50)
    assert not np.array_equal(a, b)


def test_different_master_seeds_differ():
    a = derive_stream(RngSpec(1), 0).random(50)
    b = derive_stream(RngSpec(2), 0).random(50)
    assert not np.array_equal(a, b)


def test_first_draw_uniformity():
    spec = RngSpec(42)
    draws = np.array([derive_stream(spec, i).random() for i in range(10_000)])
    assert abs(draws.mean() - 0.5) < 0.02


def test_spec_stream_method_matches_function():
    spec = RngSpec(9)
    a = spec.stream(4, role=ROLE_SHADOW).random(20)
    b = derive_stream(spec, 4, role=ROLE_SHADOW).random(20)
    assert np.array_equal(a, b)


def test_master_seed_validation():
    with pytest.raises(ConfigError):
        RngSpec(-1)
    with pytest.raises(ConfigError):
        RngSpec(2**64)
    with pytest.raises(ConfigError):
        RngSpec(1.5)
    RngSpec(0)
    RngSpec(2**64 - 1)


def test_negative_key_rejected():
    with pytest.raises(UsageError):
        derive_stream(RngSpec(1), -2)


def test_child_seed_deterministic_and_key_sensitive():
    spec = RngSpec(7)
    assert child_seed(spec, 1, 2) == child_seed(spec, 1, 2)
    assert child_seed(spec, 1, 2) != child_seed(spec, 2, 1)
    assert 0 <= child_seed(spec, 5) < 2**64


def test_child_spec_streams_independent_of_parent():
    spec = RngSpec(7)
    sub = child_spec(spec, 4, 0)
    a = derive_stream(sub, 0).random(50)
    b = derive_stream(spec, 0).random(50)
    assert not np.array_equal(a, b)
    again = derive_stream(child_spec(spec, 4, 0), 0).random(50)
    assert np.array_equal(a, again)
