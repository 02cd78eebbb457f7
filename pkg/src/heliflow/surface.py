"""Parametric patches and their numerical differential geometry.

All evaluation is vectorised: ``u`` and ``v`` may be scalars or arrays of any
broadcastable shape, and vector-valued results carry a trailing axis of
length 3.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

from .errors import DomainError, SingularityError

FIRST_STEP = 1e-5
SECOND_STEP = 1e-4
# relative tolerance for the immersion test ||X_u x X_v|| > 0
DEGENERATE_RTOL = 1e-12


class Jet(NamedTuple):
    Xu: np.ndarray
    Xv: np.ndarray
    Xuu: np.ndarray
    Xuv: np.ndarray
    Xvv: np.ndarray


PositionFn = Callable[[np.ndarray, np.ndarray], np.ndarray]
JetFn = Callable[[np.ndarray, np.ndarray], Jet]


@dataclass(frozen=True)
class ParametricPatch:
    """Immutable map (u, v) -> R^3 over a rectangle, optionally with an analytic jet."""

    position: PositionFn
    domain: tuple[float, float, float, float]
    analytic_jet: Optional[JetFn] = None
    label: str = ""

    @property
    def u_range(self) -> tuple[float, float]:
        return self.domain[0], self.domain[1]

    @property
    def v_range(self) -> tuple[float, float]:
        return self.domain[2], self.domain[3]

    def contains(self, u, v, margin_u=0.0, margin_v=0.0) -> np.ndarray:
        u0, u1, v0, v1 = self.domain
        su = 1e-12 * max(1.0, abs(u1 - u0))
        sv = 1e-12 * max(1.0, abs(v1 - v0))
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        return (
            (u >= u0 + margin_u - su)
            & (u <= u1 - margin_u + su)
            & (v >= v0 + margin_v - sv)
            & (v <= v1 - margin_v + sv)
        )


class MetricSample(NamedTuple):
    E: np.ndarray
    F: np.ndarray
    G: np.ndarray

    @property
    def det(self) -> np.ndarray:
        return self.E * self.G - self.F**2


class FundamentalForms(NamedTuple):
    metric: MetricSample
    e: np.ndarray
    f: np.ndarray
    g: np.ndarray
    K: np.ndarray
    n3: np.ndarray


def first_step(x) -> np.ndarray:
    return np.maximum(FIRST_STEP, FIRST_STEP * np.abs(x))


def second_step(x) -> np.ndarray:
    return np.maximum(SECOND_STEP, SECOND_STEP * np.abs(x))


def evaluate(patch: ParametricPatch, u, v) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if not np.all(patch.contains(u, v)):
        raise DomainError(f"parameters outside the domain {patch.domain} of patch {patch.label!r}")
    return patch.position(u, v)


def numeric_jet(patch: ParametricPatch, u, v) -> Jet:
    """Central-difference jet; the finite-difference oracle for analytic jets."""
    u, v = np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    du1, dv1 = first_step(u), first_step(v)
    du2, dv2 = second_step(u), second_step(v)
    if not np.all(patch.contains(u, v, 2 * du2, 2 * dv2)):
        raise DomainError(
            f"finite-difference stencil leaves the domain of {patch.label!r}; "
            "sample further inside"
        )
    X = patch.position
    eu1, ev1 = du1[..., None], dv1[..., None]
    eu2, ev2 = du2[..., None], dv2[..., None]
    Xu = (X(u + du1, v) - X(u - du1, v)) / (2 * eu1)
    Xv = (X(u, v + dv1) - X(u, v - dv1)) / (2 * ev1)
    X0 = X(u, v)
    Xuu = (X(u + du2, v) - 2 * X0 + X(u - du2, v)) / eu2**2
    Xvv = (X(u, v + dv2) - 2 * X0 + X(u, v - dv2)) / ev2**2
    Xuv = (
        X(u + du2, v + dv2) - X(u + du2, v - dv2) - X(u - du2, v + dv2) + X(u - du2, v - dv2)
    ) / (4 * eu2 * ev2)
    return Jet(Xu, Xv, Xuu, Xuv, Xvv)


def jet(patch: ParametricPatch, u, v, mode: str = "auto") -> Jet:
    """Jet by ``mode``: 'analytic', 'numeric', or 'auto' (analytic when available)."""
    if mode not in ("auto", "analytic", "numeric"):
        raise ValueError(f"unknown jet mode {mode!r}")
    if mode == "numeric" or (mode == "auto" and patch.analytic_jet is None):
        return numeric_jet(patch, u, v)
    if patch.analytic_jet is None:
        raise ValueError(f"patch {patch.label!r} has no analytic jet")
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if not np.all(patch.contains(u, v)):
        raise DomainError(f"parameters outside the domain of {patch.label!r}")
    return patch.analytic_jet(u, v)


def _dot(a, b):
    return np.sum(a * b, axis=-1)


def metric_from_jet(J: Jet) -> MetricSample:
    return MetricSample(_dot(J.Xu, J.Xu), _dot(J.Xu, J.Xv), _dot(J.Xv, J.Xv))


def first_fundamental_form(patch: ParametricPatch, u, v, mode: str = "auto") -> MetricSample:
    """(E, F, G).  Degenerate points are not an error here; check ``.det``."""
    return metric_from_jet(jet(patch, u, v, mode))


def degenerate_mask(J: Jet) -> np.ndarray:
    cross = np.cross(J.Xu, J.Xv)
    scale = np.linalg.norm(J.Xu, axis=-1) * np.linalg.norm(J.Xv, axis=-1)
    return np.linalg.norm(cross, axis=-1) <= DEGENERATE_RTOL * np.maximum(scale, 1e-300)


def normal_from_jet(J: Jet) -> np.ndarray:
    cross = np.cross(J.Xu, J.Xv)
    return cross / np.linalg.norm(cross, axis=-1)[..., None]


def unit_normal_and_angle(patch: ParametricPatch, u, v, mode: str = "auto"):
    """Unit normal X_u x X_v / |X_u x X_v| and its z-component (the angle function)."""
    J = jet(patch, u, v, mode)
    if np.any(degenerate_mask(J)):
        raise SingularityError(f"X_u x X_v vanishes on patch {patch.label!r}")
    n = normal_from_jet(J)
    return n, n[..., 2]


def forms_from_jet(J: Jet) -> FundamentalForms:
    """Fundamental forms from a jet; degenerate samples come back as NaN."""
    metric = metric_from_jet(J)
    with np.errstate(invalid="ignore", divide="ignore"):
        n = normal_from_jet(J)
        e = _dot(J.Xuu, n)
        f = _dot(J.Xuv, n)
        g = _dot(J.Xvv, n)
        K = (e * g - f**2) / metric.det
    bad = degenerate_mask(J)
    K = np.where(bad, np.nan, K)
    return FundamentalForms(metric, e, f, g, K, np.where(bad, np.nan, n[..., 2]))


def fundamental_forms(patch: ParametricPatch, u, v, mode: str = "auto") -> FundamentalForms:
    return forms_from_jet(jet(patch, u, v, mode))


def gauss_curvature(patch: ParametricPatch, u, v, mode: str = "auto") -> np.ndarray:
    """K = (eg - f^2) / (EG - F^2) from the second fundamental form."""
    J = jet(patch, u, v, mode)
    if np.any(degenerate_mask(J)):
        raise SingularityError(f"degenerate metric on patch {patch.label!r}")
    return forms_from_jet(J).K


def warped_metric_curvature(U: Callable, s, d2U: Optional[Callable] = None) -> np.ndarray:
    """Gaussian curvature -U''(s)/U(s) of the warped metric ds^2 + U(s)^2 dt^2.

    ``U`` must accept arrays.  Without ``d2U`` the second derivative is a
    central difference with the package step policy.
    """
    s = np.asarray(s, dtype=float)
    U0 = np.asarray(U(s), dtype=float)
    if np.any(U0 <= 0):
        raise DomainError("warping function must be positive")
    if d2U is not None:
        Upp = np.asarray(d2U(s), dtype=float)
    else:
        hs = second_step(s)
        Upp = (U(s + hs) - 2 * U0 + U(s - hs)) / hs**2
    return -Upp / U0
