"""Test keyed random streams"""
import numpy as np
import pytest

from epstein_zeros.streams import KeyedStream

# pylint: disable=missing-function-docstring


def test_stream_is_deterministic() -> None:
    first = KeyedStream(7, "X/-15").uniforms(3, 16)
    second = KeyedStream(7, "X/-15").uniforms(3, 16)
    assert np.array_equal(first, second)


def test_streams_are_keyed() -> None:
    base = KeyedStream(7, "X/-15").words(0, 8)
    assert not np.array_equal(base, KeyedStream(8, "X/-15").words(0, 8))
    assert not np.array_equal(base, KeyedStream(7, "X/-23").words(0, 8))
    assert not np.array_equal(base, KeyedStream(7, "X/-15").words(1, 8))


def test_prefix_property() -> None:
    stream = KeyedStream(0, "prefix")
    assert np.array_equal(stream.uniforms(5, 10), stream.uniforms(5, 100)[:10])


def test_uniform_range() -> None:
    values = KeyedStream(1).uniforms(0, 10_000)
    assert values.min() >= 0.0
    assert values.max() < 1.0
    assert abs(values.mean() - 0.5) < 0.02


def test_normals_moments() -> None:
    values = KeyedStream(2).normals(0, 100_000)
    assert np.all(np.isfinite(values))
    assert abs(values.mean()) < 0.02
    assert abs(values.std() - 1.0) < 0.02


def test_normal_rows_thread_invariant() -> None:
    stream = KeyedStream(3, "rows")
    single = stream.normal_rows(10_000, 4, threads=1)
    threaded = stream.normal_rows(10_000, 4, threads=4)
    assert single.shape == (10_000, 4)
    assert np.array_equal(single, threaded)


def test_normal_rows_prefix() -> None:
    stream = KeyedStream(3, "rows")
    assert np.array_equal(stream.normal_rows(100, 3), stream.normal_rows(5000, 3)[:100])
    assert stream.normal_rows(0, 3).shape == (0, 3)


def test_negative_index() -> None:
    with pytest.raises(ValueError):
        KeyedStream(0).words(-1, 4)


def test_child_domain() -> None:
    child = KeyedStream(4, "region").child("chunk0")
    assert child.domain == "region/chunk0"
    assert child.seed == 4
    assert "chunk0" in repr(child)
