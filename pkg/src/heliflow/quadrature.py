"""Gauss-Legendre quadrature and cumulative integral tables.

The tables here back every profile function that has no closed form
(the Bour arc coordinate, the helicoidal height and phase).  Values between
nodes are obtained by integrating from the nearest node on the left with a
fixed high-order rule, so a table is as smooth as its integrand; that matters
because the surfaces built on top of it are differentiated by finite
differences.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import DomainError

Integrand = Callable[[np.ndarray], np.ndarray]

DEFAULT_TOL = 1e-10
LOCAL_ORDER = 32


@lru_cache(maxsize=None)
def _legendre_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(f: Integrand, a, b, n: int = LOCAL_ORDER) -> np.ndarray:
    """n-point Gauss-Legendre rule on [a, b], vectorised over arrays of limits.

    ``b < a`` is allowed and gives the negated integral.
    """
    x, w = _legendre_rule(n)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    pts = mid[..., None] + half[..., None] * x
    return half * np.sum(f(pts) * w, axis=-1)


def adaptive_gauss_legendre(
    f: Integrand,
    a,
    b,
    tol: float = DEFAULT_TOL,
    n: int = 16,
    max_depth: int = 60,
) -> tuple[np.ndarray, np.ndarray]:
    """Adaptive bisection with an n-point rule, vectorised over intervals.

    A panel is accepted once the single-panel and two-half estimates agree to
    ``tol`` times the panel width (absolute tolerance per unit length).
    Returns ``(integral, error_estimate)`` with the shape of the broadcast
    limits.
    """
    a, b = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    shape = a.shape
    lo = a.ravel().copy()
    hi = b.ravel().copy()
    owner = np.arange(lo.size)
    total = np.zeros(lo.size)
    err = np.zeros(lo.size)

    whole = gauss_legendre(f, lo, hi, n)
    for _ in range(max_depth):
        if lo.size == 0:
            break
        mid = 0.5 * (lo + hi)
        left = gauss_legendre(f, lo, mid, n)
        right = gauss_legendre(f, mid, hi, n)
        halves = left + right
        diff = np.abs(halves - whole)
        done = diff <= tol * np.abs(hi - lo)
        np.add.at(total, owner[done], halves[done])
        np.add.at(err, owner[done], diff[done])
        keep = ~done
        lo, mid, hi, owner = lo[keep], mid[keep], hi[keep], owner[keep]
        left, right = left[keep], right[keep]
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
        owner = np.concatenate([owner, owner])
        whole = np.concatenate([left, right])
    else:
        if lo.size:
            raise RuntimeError(
                f"adaptive quadrature did not converge on {lo.size} panels "
                f"(worst near {lo[0]:.6g})"
            )
    return total.reshape(shape), err.reshape(shape)


class CumulativeTable:
    """F(x) = anchor + integral of ``integrand`` from ``nodes[0]`` to x.

    Node values come from adaptive quadrature.  Panels on which the fixed
    local rule disagrees with the adaptive value by more than ``tol`` per unit
    length are bisected until it does not, so interpolation by local
    quadrature is accurate everywhere in the table.
    """

    def __init__(
        self,
        integrand: Integrand,
        lo: float,
        hi: float,
        n_nodes: int = 512,
        anchor: float = 0.0,
        tol: float = DEFAULT_TOL,
        order: int = LOCAL_ORDER,
        max_refine: int = 12,
    ):
        if not hi > lo:
            raise DomainError(f"empty table interval [{lo}, {hi}]")
        if n_nodes < 2:
            raise ValueError("a table needs at least two nodes")
        self.integrand = integrand
        self.order = order
        self.tol = tol
        nodes = np.linspace(lo, hi, n_nodes)
        for _ in range(max_refine):
            inc, _ = adaptive_gauss_legendre(integrand, nodes[:-1], nodes[1:], tol=tol * 1e-2)
            fixed = gauss_legendre(integrand, nodes[:-1], nodes[1:], order)
            bad = np.abs(fixed - inc) > tol * np.diff(nodes)
            if not bad.any():
                break
            mids = 0.5 * (nodes[:-1] + nodes[1:])[bad]
            nodes = np.sort(np.concatenate([nodes, mids]))
        else:
            raise RuntimeError("cumulative table refinement did not converge")
        self.nodes = nodes
        self.values = anchor + np.concatenate([[0.0], np.cumsum(inc)])
        self.nodes.setflags(write=False)
        self.values.setflags(write=False)

    @property
    def lo(self) -> float:
        return float(self.nodes[0])

    @property
    def hi(self) -> float:
        return float(self.nodes[-1])

    def _check(self, x: np.ndarray) -> None:
        slack = 1e-12 * max(1.0, abs(self.hi - self.lo))
        if np.any(x < self.lo - slack) or np.any(x > self.hi + slack):
            raise DomainError(
                f"table query outside [{self.lo:.9g}, {self.hi:.9g}]: "
                f"[{np.min(x):.9g}, {np.max(x):.9g}]"
            )

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        self._check(x)
        k = np.clip(np.searchsorted(self.nodes, x, side="right") - 1, 0, len(self.nodes) - 2)
        base = self.nodes[k]
        return self.values[k] + gauss_legendre(self.integrand, base, x, self.order)

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        self._check(x)
        return self.integrand(x)

    def inverse(self, y, iters: int = 50):
        """Invert a strictly increasing table by safeguarded Newton iteration."""
        y = np.asarray(y, dtype=float)
        if np.any(np.diff(self.values) <= 0):
            raise DomainError("table is not strictly increasing; cannot invert")
        vlo, vhi = self.values[0], self.values[-1]
        slack = 1e-12 * max(1.0, abs(vhi - vlo))
        if np.any(y < vlo - slack) or np.any(y > vhi + slack):
            raise DomainError(f"inverse query outside [{vlo:.9g}, {vhi:.9g}]")
        k = np.clip(np.searchsorted(self.values, y, side="right") - 1, 0, len(self.nodes) - 2)
        a = self.nodes[k].copy()
        b = self.nodes[k + 1].copy()
        x = np.interp(y, self.values, self.nodes)
        for _ in range(iters):
            r = self(x) - y
            a = np.where(r < 0, x, a)
            b = np.where(r > 0, x, b)
            nxt = x - r / self.integrand(x)
            outside = (nxt < a) | (nxt > b) | ~np.isfinite(nxt)
            nxt = np.where(outside, 0.5 * (a + b), nxt)
            # quadratic convergence: a 1e-13 step leaves an error far below rounding
            done = np.all(np.abs(nxt - x) <= 1e-13 * np.maximum(1.0, np.abs(x)))
            x = nxt
            if done:
                break
        return x
