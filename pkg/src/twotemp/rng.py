"""Counter-based random streams and batch-means Monte-Carlo estimation.

Every batch owns a Philox stream keyed by (seed, batch index), so results do not
depend on how batches are scheduled across workers.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ValidationError

N_BATCHES = 32
_MASK = (1 << 64) - 1


def stream(seed: int, key: int) -> np.random.Generator:
    """Independent generator for the pair (seed, key)."""
    if seed < 0 or key < 0:
        raise ValidationError("seed and stream key must be nonnegative")
    return np.random.Generator(
        np.random.Philox(key=np.array([seed & _MASK, key & _MASK], dtype=np.uint64))
    )


def uniform_sphere(rng: np.random.Generator, n: int) -> np.ndarray:
    """n unit vectors drawn uniformly on the sphere."""
    v = rng.standard_normal((n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


@dataclass(frozen=True)
class McEstimate:
    value: float
    std_error: float
    n_samples: int
    seed: int

    def z_score(self, reference: float) -> float:
        if self.std_error == 0.0:
            return 0.0 if self.value == reference else np.inf
        return (self.value - reference) / self.std_error

    def within(self, reference: float, n_sigma: float = 3.0) -> bool:
        return abs(self.value - reference) <= n_sigma * self.std_error

    @property
    def relative_error(self) -> float:
        return self.std_error / abs(self.value) if self.value != 0.0 else np.inf


def batch_sizes(n: int, n_batches: int = N_BATCHES) -> list[int]:
    base, extra = divmod(n, n_batches)
    return [base + (1 if b < extra else 0) for b in range(n_batches)]


def run_batches(
    batch_sum: Callable[[np.random.Generator, int], np.ndarray],
    n: int,
    seed: int,
    n_batches: int = N_BATCHES,
    chunk: int = 250_000,
    workers: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate per-batch means of a vector-valued estimator.

    ``batch_sum(rng, m)`` returns the sum over m fresh samples. Returns the
    array of batch means (n_batches, ...) and the batch sizes.
    """
    if n_batches < 16:
        raise ValidationError("batch-means needs at least 16 batches")
    sizes = batch_sizes(n, n_batches)
    if min(sizes) < 1:
        raise ValidationError(f"n={n} too small for {n_batches} batches")

    def one(b: int) -> np.ndarray:
        rng = stream(seed, b)
        m = sizes[b]
        total = None
        done = 0
        while done < m:
            k = min(chunk, m - done)
            part = np.asarray(batch_sum(rng, k), dtype=float)
            total = part if total is None else total + part
            done += k
        return total / m

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            means = list(pool.map(one, range(n_batches)))
    else:
        means = [one(b) for b in range(n_batches)]
    return np.array(means), np.array(sizes, dtype=float)


def combine_batches(means: np.ndarray, sizes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Weighted mean and batch-means standard error along axis 0."""
    w = sizes / sizes.sum()
    shape = (-1,) + (1,) * (means.ndim - 1)
    mean = np.sum(w.reshape(shape) * means, axis=0)
    k = means.shape[0]
    var = np.sum(w.reshape(shape) * (means - mean) ** 2, axis=0) * k / (k - 1)
    return mean, np.sqrt(var / k)


def jackknife(fn: Callable[[np.ndarray], np.ndarray], means: np.ndarray, sizes: np.ndarray):
    """Delete-one-batch jackknife estimate and standard error of fn(mean)."""
    k = means.shape[0]
    full, _ = combine_batches(means, sizes)
    theta = np.asarray(fn(full), dtype=float)
    loo = []
    shape = (-1,) + (1,) * (means.ndim - 1)
    for b in range(k):
        keep = np.arange(k) != b
        w = sizes[keep] / sizes[keep].sum()
        loo.append(np.asarray(fn(np.sum(w.reshape(shape) * means[keep], axis=0)), dtype=float))
    loo = np.array(loo)
    se = np.sqrt((k - 1) / k * np.sum((loo - loo.mean(axis=0)) ** 2, axis=0))
    return theta, se
