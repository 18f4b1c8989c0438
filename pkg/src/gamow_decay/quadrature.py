"""Vectorized adaptive Gauss-Legendre quadrature on a finite interval."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import QuadratureFailure


@lru_cache(maxsize=None)
def _rule(order):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def adaptive_gauss_legendre(func, a, b, *, order=32, abs_tol=1e-12, rel_tol=0.0,
                            max_depth=30, min_depth=1):
    """Integrate ``func`` over [a, b] by bisection until panels agree.

    ``func`` maps a 1-D array of nodes to an array whose leading axis runs
    over the nodes; every trailing component is integrated at once and the
    refinement test uses the worst component. A panel is accepted when the
    one-panel and two-half-panel estimates differ by no more than its share
    of ``max(abs_tol, rel_tol * |I|)``, with ``|I|`` from the coarse pass.
    ``min_depth`` forces that many uniform bisections first, which matters
    for oscillatory integrands a single panel can alias.
    """
    x, w = _rule(order)
    a = float(a)
    b = float(b)
    if b == a:
        probe = np.asarray(func(np.array([a])))
        return np.zeros(probe.shape[1:], dtype=probe.dtype)

    def panel(lo, hi):
        # lo, hi: (p,) arrays -> (p, ...) estimates
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
        vals = np.asarray(func(nodes))
        vals = vals.reshape((lo.size, x.size) + vals.shape[1:])
        wshape = (1, x.size) + (1,) * (vals.ndim - 2)
        return half.reshape((-1,) + (1,) * (vals.ndim - 2)) * np.sum(
            vals * w.reshape(wshape), axis=1)

    n0 = 2 ** max(min_depth - 1, 0)
    edges = np.linspace(a, b, n0 + 1)
    lo, hi = edges[:-1], edges[1:]
    coarse = panel(lo, hi)
    scale = np.max(np.abs(np.sum(coarse, axis=0)))
    target = max(abs_tol, rel_tol * scale)
    total = None
    depth = max(min_depth - 1, 0)
    while lo.size:
        mid = 0.5 * (lo + hi)
        left = panel(lo, mid)
        right = panel(mid, hi)
        fine = left + right
        err = np.abs(fine - coarse)
        err = err.reshape(err.shape[0], -1).max(axis=1)
        share = target * (hi - lo) / (b - a)
        done = err <= share
        acc = np.sum(fine[done], axis=0)
        total = acc if total is None else total + acc
        if np.all(done):
            break
        depth += 1
        if depth >= max_depth:
            raise QuadratureFailure(
                f"adaptive quadrature did not reach {target:.3g} within depth {max_depth}")
        keep = ~done
        lo = np.concatenate([lo[keep], mid[keep]])
        hi = np.concatenate([mid[keep], hi[keep]])
        coarse = np.concatenate([left[keep], right[keep]])
        order_idx = np.argsort(lo, kind="stable")
        lo, hi, coarse = lo[order_idx], hi[order_idx], coarse[order_idx]
    return total


def gauss_legendre_nodes(a, b, panels, order=32):
    """Composite fixed rule: nodes and weights for ``panels`` equal panels."""
    x, w = _rule(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights
