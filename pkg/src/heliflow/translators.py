"""Closed-form and quadrature-built surfaces with K = n3^4, rotational and helicoidal.

A member H^h_c of the two-parameter family is parametrised by the geometric
coordinates (U, t):

    X(U, t) = (R cos phi, R sin phi, Lambda(U) + h phi),   phi = t - Theta(U),

    R^2 = U^2 - h^2,
    Lambda'(U) = U sqrt(Q) / (U^2 - h^2),
    Theta'(U) = h Lambda'(U) / U^2,
    Q(U) = U^4 + (c - 1 - h^2) U^2 - h^2 c,

and carries the metric (U^2 + c) dU^2 + U^2 dt^2 with angle function
1 / sqrt(U^2 + c) up to sign.  For h = 0 the height is the closed-form
profile :func:`rotational_profile`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .bour import WarpingFunction
from .errors import DomainError, EmptyDomainError
from .quadrature import DEFAULT_TOL, CumulativeTable
from .surface import Jet, ParametricPatch, first_step, second_step

EPS_DOM_FRACTION = 1e-3
DEFAULT_U_CAP = 5.0
DEFAULT_GRID_N = 512


@dataclass(frozen=True)
class FamilyParams:
    c: float
    h: float = 0.0
    mu: Optional[float] = None

    def __post_init__(self):
        for name in ("c", "h"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")

    @property
    def kappa(self) -> float:
        return math.sqrt(abs(self.c - 1.0))

    def Q(self, U):
        U2 = np.asarray(U, dtype=float) ** 2
        return U2 * U2 + (self.c - 1 - self.h**2) * U2 - self.h**2 * self.c


def rotational_slope(c: float, U):
    return np.sqrt(np.asarray(U, dtype=float) ** 2 + c - 1)


def rotational_profile(c: float, U):
    """Closed-form height Lambda_c(U) of the rotational translator H_c.

    Lambda_c(0) = 0 for c >= 1 and Lambda_c(kappa) = 0 for c < 1, where
    kappa = sqrt(|c - 1|).
    """
    U = np.asarray(U, dtype=float)
    if c > 1:
        k2 = c - 1
        k = math.sqrt(k2)
        if np.any(U <= 0):
            raise DomainError(f"Lambda_c needs U > 0 for c = {c:g}")
        return 0.5 * (U * np.sqrt(U**2 + k2) + k2 * np.arcsinh(U / k))
    if c == 1:
        if np.any(U < 0):
            raise DomainError("Lambda_1 needs U >= 0")
        return 0.5 * U**2
    k2 = 1 - c
    k = math.sqrt(k2)
    if np.any(U <= k):
        raise DomainError(f"Lambda_c needs U > kappa = {k:.9g} for c = {c:g}")
    return 0.5 * (U * np.sqrt(U**2 - k2) - k2 * np.arccosh(U / k))


@dataclass(frozen=True)
class UDomain:
    lower: float
    upper: float
    raw_lower: float

    @property
    def empty(self) -> bool:
        return not self.upper > self.lower

    def __iter__(self):
        yield self.lower
        yield self.upper


def positive_Q_root(c: float, h: float) -> float:
    """Largest U >= 0 with Q(U) = 0 (zero when Q >= 0 for all U > 0)."""
    b = c - 1 - h**2
    disc = b * b + 4 * h**2 * c
    if disc < 0:
        return 0.0
    r = math.sqrt(disc)
    # both forms of the root; pick the cancellation-free one
    y = 0.5 * (r - b) if b <= 0 else (2 * h**2 * c / (b + r) if b + r > 0 else 0.0)
    return math.sqrt(max(y, 0.0))


def domain_bounds(params: FamilyParams, U_cap: float = DEFAULT_U_CAP) -> UDomain:
    """Admissible U-interval [U_min, U_cap] for H^h_c, inset at the singular end."""
    if not U_cap > 0:
        raise DomainError("U_cap must be positive")
    raw = max(abs(params.h), math.sqrt(max(0.0, -params.c)), positive_Q_root(params.c, params.h))
    if raw >= U_cap:
        return UDomain(U_cap, U_cap, raw)
    lower = raw + EPS_DOM_FRACTION * (U_cap - raw)
    return UDomain(lower, U_cap, raw)


def _profile_slopes(params: FamilyParams, U):
    """(Lambda', Lambda'', Theta', Theta'') in U on the positive branch."""
    c, h = params.c, params.h
    U = np.asarray(U, dtype=float)
    U2 = U * U
    P = U2 - h * h
    Q = U2 * U2 + (c - 1 - h * h) * U2 - h * h * c
    dQ = 4 * U2 * U + 2 * (c - 1 - h * h) * U
    sq = np.sqrt(Q)
    dL = U * sq / P
    d2L = (sq + U * dQ / (2 * sq)) / P - 2 * U2 * sq / P**2
    dT = h * dL / U2
    d2T = h * (d2L / U2 - 2 * dL / (U2 * U))
    return dL, d2L, dT, d2T


@dataclass(frozen=True)
class TranslatorSurface:
    """A constructed translator: a cylinder or a member H^h_c in (U, t) coordinates."""

    kind: str
    patch: ParametricPatch
    params: Optional[FamilyParams] = None
    U_domain: Optional[UDomain] = None
    radius: Optional[float] = None
    Lambda_table: Optional[CumulativeTable] = field(default=None, repr=False)
    Theta_table: Optional[CumulativeTable] = field(default=None, repr=False)

    @property
    def c(self) -> Optional[float]:
        return None if self.params is None else self.params.c

    @property
    def h(self) -> float:
        return 0.0 if self.params is None else self.params.h

    def R(self, U):
        return np.sqrt(np.asarray(U, dtype=float) ** 2 - self.h**2)

    def Lambda(self, U):
        return self.Lambda_table(U)

    def Theta(self, U):
        if self.h == 0:
            return np.zeros_like(np.asarray(U, dtype=float))
        return self.Theta_table(U)

    def abs_n3(self, U):
        """|n3| = 1 / sqrt(U^2 + c)."""
        return 1.0 / np.sqrt(np.asarray(U, dtype=float) ** 2 + self.c)


def build_helicoidal(
    params: FamilyParams,
    U_cap: float = DEFAULT_U_CAP,
    grid_n: int = DEFAULT_GRID_N,
    t_range: tuple[float, float] = (-math.pi, math.pi),
    tol: float = DEFAULT_TOL,
) -> TranslatorSurface:
    """Build H^h_c by quadrature of Lambda' and Theta' over its admissible U-interval.

    Lambda starts at 0 at U_min except for h = 0, where it is anchored to the
    closed-form rotational profile so both constructions agree pointwise.
    """
    dom = domain_bounds(params, U_cap)
    if dom.empty:
        raise EmptyDomainError(
            f"no admissible U-interval for c={params.c:g}, h={params.h:g} below U_cap={U_cap:g} "
            f"(need U > {dom.raw_lower:.9g} from U^2 > h^2, U^2 + c > 0 and Q(U) >= 0)"
        )
    c, h = params.c, params.h
    anchor = float(rotational_profile(c, dom.lower)) if h == 0 else 0.0
    Lt = CumulativeTable(lambda U: _profile_slopes(params, U)[0], dom.lower, dom.upper, grid_n, anchor=anchor, tol=tol)
    Tt = None
    if h != 0:
        Tt = CumulativeTable(lambda U: _profile_slopes(params, U)[2], dom.lower, dom.upper, grid_n, tol=tol)

    def theta(U):
        return np.zeros_like(U) if Tt is None else Tt(U)

    def position(U, t):
        U, t = np.broadcast_arrays(np.asarray(U, dtype=float), np.asarray(t, dtype=float))
        phi = t - theta(U)
        R = np.sqrt(U**2 - h**2)
        return np.stack([R * np.cos(phi), R * np.sin(phi), Lt(U) + h * phi], axis=-1)

    def analytic_jet(U, t):
        U, t = np.broadcast_arrays(np.asarray(U, dtype=float), np.asarray(t, dtype=float))
        R = np.sqrt(U**2 - h**2)
        dR = U / R
        d2R = -(h**2) / R**3
        dL, d2L, dT, d2T = _profile_slopes(params, U)
        phi = t - theta(U)
        cp, sp = np.cos(phi), np.sin(phi)
        pU, pUU = -dT, -d2T
        zero = np.zeros_like(U)
        Xu = np.stack([dR * cp - R * sp * pU, dR * sp + R * cp * pU, dL + h * pU], axis=-1)
        Xt = np.stack([-R * sp, R * cp, np.full_like(U, h)], axis=-1)
        Xuu = np.stack(
            [
                d2R * cp - 2 * dR * sp * pU - R * cp * pU**2 - R * sp * pUU,
                d2R * sp + 2 * dR * cp * pU - R * sp * pU**2 + R * cp * pUU,
                d2L + h * pUU,
            ],
            axis=-1,
        )
        Xut = np.stack([-dR * sp - R * cp * pU, dR * cp - R * sp * pU, zero], axis=-1)
        Xtt = np.stack([-R * cp, -R * sp, zero], axis=-1)
        return Jet(Xu, Xt, Xuu, Xut, Xtt)

    patch = ParametricPatch(position, (dom.lower, dom.upper, *t_range), analytic_jet, label=f"H(c={c:g},h={h:g})")
    return TranslatorSurface("helicoidal", patch, params, dom, None, Lt, Tt)


def rotational_patch(c: float, U_range: tuple[float, float], t_range=(-math.pi, math.pi)) -> ParametricPatch:
    """(U cos t, U sin t, Lambda_c(U)) straight from the closed form."""

    def position(U, t):
        U, t = np.broadcast_arrays(np.asarray(U, dtype=float), np.asarray(t, dtype=float))
        return np.stack([U * np.cos(t), U * np.sin(t), rotational_profile(c, U)], axis=-1)

    def analytic_jet(U, t):
        U, t = np.broadcast_arrays(np.asarray(U, dtype=float), np.asarray(t, dtype=float))
        ct, st = np.cos(t), np.sin(t)
        dL = rotational_slope(c, U)
        d2L = U / dL
        zero = np.zeros_like(U)
        return Jet(
            np.stack([ct, st, dL], axis=-1),
            np.stack([-U * st, U * ct, zero], axis=-1),
            np.stack([zero, zero, d2L], axis=-1),
            np.stack([-st, ct, zero], axis=-1),
            np.stack([-U * ct, -U * st, zero], axis=-1),
        )

    return ParametricPatch(position, (*U_range, *t_range), analytic_jet, label=f"rotational(c={c:g})")


def cylinder_translator(radius: float, z_range=(-1.0, 1.0), t_range=(-math.pi, math.pi)) -> TranslatorSurface:
    """Cylinder over a circle of ``radius``, parametrised by (z, t)."""
    if not radius > 0:
        raise DomainError("cylinder radius must be positive")
    r = float(radius)

    def position(z, t):
        z, t = np.broadcast_arrays(np.asarray(z, dtype=float), np.asarray(t, dtype=float))
        return np.stack([r * np.cos(t), r * np.sin(t), z], axis=-1)

    def analytic_jet(z, t):
        z, t = np.broadcast_arrays(np.asarray(z, dtype=float), np.asarray(t, dtype=float))
        ct, st = np.cos(t), np.sin(t)
        zero = np.zeros_like(z)
        return Jet(
            np.stack([zero, zero, zero + 1.0], axis=-1),
            np.stack([-r * st, r * ct, zero], axis=-1),
            np.stack([zero, zero, zero], axis=-1),
            np.stack([zero, zero, zero], axis=-1),
            np.stack([-r * ct, -r * st, zero], axis=-1),
        )

    patch = ParametricPatch(position, (*z_range, *t_range), analytic_jet, label=f"cylinder(r={r:g})")
    return TranslatorSurface("cylinder", patch, radius=r)


def common_window(surfaces) -> tuple[float, float]:
    lo = max(s.patch.domain[0] for s in surfaces)
    hi = min(s.patch.domain[1] for s in surfaces)
    if not hi > lo:
        raise EmptyDomainError(
            "no common U-interval; member domains: "
            + ", ".join(f"h={s.h:g}: [{s.patch.domain[0]:.6g}, {s.patch.domain[1]:.6g}]" for s in surfaces)
        )
    return lo, hi


def deformation_path(
    mu: float,
    c: float,
    h_target: float = 0.0,
    steps: int = 5,
    U_cap: float = DEFAULT_U_CAP,
    grid_n: int = DEFAULT_GRID_N,
) -> list[TranslatorSurface]:
    """Members H^h_c for h stepping linearly from ``mu`` to ``h_target``.

    h = 0 is inserted when the path crosses it, so the rotational member is
    always present on such paths.
    """
    if steps < 2:
        raise ValueError("a path needs at least two members")
    hs = list(np.linspace(mu, h_target, steps))
    if min(mu, h_target) < 0 < max(mu, h_target) and 0.0 not in hs:
        hs.append(0.0)
        hs.sort(reverse=mu > h_target)
    doms = {h: domain_bounds(FamilyParams(c, h, mu), U_cap) for h in hs}
    lo = max(d.lower for d in doms.values())
    if any(d.empty for d in doms.values()) or not U_cap > lo:
        raise EmptyDomainError(
            "no common U-interval along the path; member domains: "
            + ", ".join(f"h={h:g}: [{d.lower:.6g}, {d.upper:.6g}]" for h, d in doms.items())
        )
    return [build_helicoidal(FamilyParams(c, float(h), mu), U_cap, grid_n) for h in hs]


def screw_motion(point, T, h):
    """Rotate (x, y) by T about the z-axis and lift z by h T."""
    p = np.asarray(point, dtype=float)
    T = np.asarray(T, dtype=float)
    ct, st = np.cos(T), np.sin(T)
    x, y, z = p[..., 0], p[..., 1], p[..., 2]
    return np.stack(np.broadcast_arrays(ct * x - st * y, st * x + ct * y, z + h * T), axis=-1)


def first_integral_chart(c: float, U_range: tuple[float, float], n_nodes: int = DEFAULT_GRID_N) -> WarpingFunction:
    """Bour function U(s) of a translator, obtained by inverting s(U) = int sqrt(U^2 + c) dU."""
    lo, hi = U_range
    if lo <= 0 or lo * lo + c <= 0:
        raise DomainError(f"first integral needs U > 0 and U^2 + c > 0 on [{lo}, {hi}]")
    table = CumulativeTable(lambda U: np.sqrt(U * U + c), lo, hi, n_nodes)

    def U(s):
        return table.inverse(s)

    def dU(s):
        return 1.0 / np.sqrt(U(s) ** 2 + c)

    chart = WarpingFunction(U, dU, (table.values[0], table.values[-1]), label=f"first-integral(c={c:g})")
    chart.s_of_U = table
    return chart


def ode_residual(U_of_s: Callable, s):
    """U''/U + (U')^4 with both derivatives by central differences."""
    U = U_of_s.U if isinstance(U_of_s, WarpingFunction) else U_of_s
    s = np.asarray(s, dtype=float)
    U0 = U(s)
    h1, h2 = first_step(s), second_step(s)
    d1 = (U(s + h1) - U(s - h1)) / (2 * h1)
    d2 = (U(s + h2) - 2 * U0 + U(s - h2)) / h2**2
    return d2 / U0 + d1**4


def rotational_graph(surface: TranslatorSurface):
    """Height function f(x, y) of an h = 0 member and its analytic Hessian.

    f is resampled from the surface's quadrature table by the radius
    sqrt(x^2 + y^2); the Hessian uses the closed-form slopes.
    """
    if surface.kind != "helicoidal" or surface.h != 0:
        raise DomainError("only rotational members are graphs over the xy-plane")
    c = surface.c

    def f(x, y):
        return surface.Lambda(np.hypot(x, y))

    def hessian(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        r = np.hypot(x, y)
        d1 = rotational_slope(c, r)
        d2 = r / d1
        fxx = d2 * x * x / r**2 + d1 * y * y / r**3
        fyy = d2 * y * y / r**2 + d1 * x * x / r**3
        fxy = (d2 / r**2 - d1 / r**3) * x * y
        return fxx, fxy, fyy

    return f, hessian
