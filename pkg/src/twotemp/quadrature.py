"""Gauss rules normalized as expectations over standard distributions."""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from numpy.polynomial.hermite_e import hermegauss
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_genlaguerre, roots_jacobi


def _frozen(nodes, weights):
    nodes = np.ascontiguousarray(nodes, dtype=float)
    weights = np.ascontiguousarray(weights, dtype=float)
    weights = weights / weights.sum()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


@lru_cache(maxsize=None)
def normal_rule(n: int):
    """Nodes and weights with sum(w f(x)) = E f(X), X ~ N(0, 1)."""
    x, w = hermegauss(n)
    return _frozen(x, w)


@lru_cache(maxsize=None)
def gamma_rule(n: int, shape: float):
    """E f(X) for X ~ Gamma(shape, 1); exact for polynomials of degree 2n-1."""
    x, w = roots_genlaguerre(n, shape - 1.0)
    return _frozen(x, w)


@lru_cache(maxsize=None)
def beta_rule(n: int, a: float, b: float):
    """E f(X) for X ~ Beta(a, b) on [0, 1]."""
    x, w = roots_jacobi(n, b - 1.0, a - 1.0)
    return _frozen(0.5 * (1.0 + x), w)


@lru_cache(maxsize=None)
def uniform_rule(n: int):
    """E f(X) for X uniform on [-1, 1]."""
    x, w = leggauss(n)
    return _frozen(x, w)


def tensor(*rules):
    """Flattened tensor product of one-dimensional rules.

    Returns a tuple of node arrays (one per rule, each of length prod(n)) and the
    product weights.
    """
    grids = np.meshgrid(*[r[0] for r in rules], indexing="ij")
    wgrids = np.meshgrid(*[r[1] for r in rules], indexing="ij")
    weights = np.ones(grids[0].size)
    for wg in wgrids:
        weights = weights * wg.ravel()
    return tuple(g.ravel() for g in grids), weights
