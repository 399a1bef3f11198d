import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twotemp.errors import ValidationError
from twotemp.rng import (
    McEstimate,
    batch_sizes,
    combine_batches,
    jackknife,
    run_batches,
    stream,
    uniform_sphere,
)


def test_streams_are_reproducible_and_distinct():
    a = stream(7, 3).random(5)
    assert np.array_equal(a, stream(7, 3).random(5))
    assert not np.array_equal(a, stream(7, 4).random(5))
    assert not np.array_equal(a, stream(8, 3).random(5))
    with pytest.raises(ValidationError):
        stream(-1, 0)


def test_uniform_sphere_is_unit_and_centred():
    v = uniform_sphere(stream(1, 1), 200_000)
    assert np.allclose(np.linalg.norm(v, axis=1), 1.0)
    assert np.all(np.abs(v.mean(axis=0)) < 5 / np.sqrt(3 * 200_000))


def test_batches_independent_of_workers():
    def batch_sum(rng, m):
        return rng.random(m).sum()

    m1, s1 = run_batches(batch_sum, 10_000, 3)
    m4, s4 = run_batches(batch_sum, 10_000, 3, workers=4)
    assert np.array_equal(m1, m4)
    mean, se = combine_batches(m1, s1)
    assert abs(mean - 0.5) < 4 * se


@settings(max_examples=50, deadline=None)
@given(st.integers(16, 5000))
def test_batch_sizes_partition(n):
    sizes = batch_sizes(n)
    assert sum(sizes) == n and max(sizes) - min(sizes) <= 1


def test_jackknife_of_identity_matches_batch_means():
    r = np.random.default_rng(0)
    means = r.normal(size=32)
    sizes = np.full(32, 10.0)
    theta, se = jackknife(lambda x: x, means, sizes)
    mean, se_bm = combine_batches(means, sizes)
    assert theta == pytest.approx(mean)
    assert se == pytest.approx(se_bm, rel=1e-12)


def test_estimate_helpers():
    e = McEstimate(1.0, 0.1, 100, 0)
    assert e.within(1.25) and not e.within(1.35)
    assert e.z_score(0.8) == pytest.approx(2.0)
    assert e.relative_error == pytest.approx(0.1)
    assert McEstimate(0.0, 0.0, 1, 0).z_score(0.0) == 0.0
