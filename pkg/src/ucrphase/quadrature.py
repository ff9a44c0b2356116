"""Piecewise Gauss-Legendre quadrature with an order-doubling convergence check."""
from __future__ import annotations

from functools import lru_cache
from typing import Callable, Sequence

import numpy as np


class QuadratureError(RuntimeError):
    """Raised when a term does not converge before the order limit."""

    def __init__(self, term: str, error: float, scale: float):
        self.term = term
        self.error = error
        self.scale = scale
        super().__init__(f"quadrature of term {term!r} did not converge "
                         f"(|change| = {error:.3e}, scale = {scale:.3e})")


@lru_cache(maxsize=None)
def gauss_legendre(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _rule(a: float, b: float, order: int):
    x, w = gauss_legendre(order)
    half = 0.5 * (b - a)
    return 0.5 * (a + b) + half * x, half * w


def integrate_segments(f: Callable[[np.ndarray, int], np.ndarray], breaks: Sequence[float],
                       order: int):
    """Integrate ``f(t, segment_index) -> (n_terms, len(t))`` over consecutive breaks.

    Returns (integrals, absolute scales), both of shape (n_terms,). The scale
    is the quadrature of |f| and bounds the rounding error of the result.
    """
    total = None
    scale = None
    for i, (a, b) in enumerate(zip(breaks[:-1], breaks[1:])):
        if b <= a:
            continue
        t, w = _rule(a, b, order)
        vals = np.atleast_2d(f(t, i))
        part = vals @ w
        mag = np.abs(vals) @ np.abs(w)
        total = part if total is None else total + part
        scale = mag if scale is None else scale + mag
    return total, scale


def integrate_checked(f, breaks, names: Sequence[str], order: int = 32, rtol: float = 1e-10,
                      max_order: int = 128):
    """Integrate at ``order`` and ``2*order`` and keep doubling until all terms agree.

    Agreement is measured against each term's absolute scale, so terms that
    integrate to zero are handled. Raises QuadratureError naming the first
    term still off when ``max_order`` is exceeded.
    """
    if 2 * order > max_order:
        raise ValueError("max_order must be at least twice the starting order")
    lo, scale = integrate_segments(f, breaks, order)
    while 2 * order <= max_order:
        order *= 2
        hi, scale = integrate_segments(f, breaks, order)
        err = np.abs(hi - lo)
        ratio = err / np.maximum(scale, np.finfo(float).tiny)
        if np.all(ratio <= rtol):
            return hi, scale
        lo = hi
    bad = int(np.argmax(ratio))
    raise QuadratureError(names[bad], float(err[bad]), float(scale[bad]))
