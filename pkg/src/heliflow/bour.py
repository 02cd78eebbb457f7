"""Bour coordinates and the two-parameter isometric family of helicoidal surfaces.

A helicoidal surface of pitch ``mu`` swept by the curve (R(u), 0, Lambda(u))

    (u, theta) -> (R cos theta, R sin theta, Lambda + mu * theta)

is reparametrised by the arc-type coordinate s and the angle t = theta + Theta,

    ds^2 = dR^2 + R^2 / (R^2 + mu^2) dLambda^2,
    dTheta = mu / (R^2 + mu^2) dLambda,

after which its metric is the warped product ds^2 + U(s)^2 dt^2 with
U^2 = R^2 + mu^2.  Any warping function U(s) then generates the surfaces
X^(lam, h) below, all isometric to the original.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DegeneracyError, DomainError, DomainViolationError
from .quadrature import DEFAULT_TOL, CumulativeTable
from .surface import ParametricPatch, first_step

EPS_RAD = 1e-12


class WarpingFunction:
    """A Bour function U(s) > 0 with its first derivative on an s-interval."""

    def __init__(self, U: Callable, dU: Callable, s_domain: tuple[float, float], label: str = ""):
        self._U = U
        self._dU = dU
        self.s_domain = (float(s_domain[0]), float(s_domain[1]))
        self.label = label

    @classmethod
    def from_callable(cls, U: Callable, s_domain, dU: Optional[Callable] = None, label: str = ""):
        if dU is None:
            def dU(s):
                hs = first_step(s)
                return (U(s + hs) - U(s - hs)) / (2 * hs)
        return cls(U, dU, s_domain, label)

    def U(self, s):
        return self._U(np.asarray(s, dtype=float))

    def dU(self, s):
        return self._dU(np.asarray(s, dtype=float))

    def U_and_dU(self, s):
        return self.U(s), self.dU(s)


@dataclass(frozen=True)
class HelicoidalSeed:
    """Generating curve (R(u), 0, Lambda(u)) on ``domain`` with pitch ``mu``.

    Derivatives default to central differences when not supplied.
    """

    mu: float
    R: Callable
    Lambda: Callable
    domain: tuple[float, float]
    dR: Optional[Callable] = None
    dLambda: Optional[Callable] = None

    def R_prime(self, u):
        if self.dR is not None:
            return self.dR(u)
        hu = first_step(u)
        return (self.R(u + hu) - self.R(u - hu)) / (2 * hu)

    def Lambda_prime(self, u):
        if self.dLambda is not None:
            return self.dLambda(u)
        hu = first_step(u)
        return (self.Lambda(u + hu) - self.Lambda(u - hu)) / (2 * hu)

    def position(self, u, theta):
        u = np.asarray(u, dtype=float)
        theta = np.asarray(theta, dtype=float)
        R = self.R(u)
        return np.stack(
            np.broadcast_arrays(R * np.cos(theta), R * np.sin(theta), self.Lambda(u) + self.mu * theta),
            axis=-1,
        )


class BourChart(WarpingFunction):
    """Bour coordinates (s, t) of a helicoidal seed, with U and Theta as functions of s."""

    def __init__(self, seed: HelicoidalSeed, s_table: CumulativeTable, theta_table: CumulativeTable):
        self.seed = seed
        self.s_table = s_table
        self.theta_table = theta_table
        super().__init__(self._U_of_s, self._dU_of_s, (s_table.values[0], s_table.values[-1]), "bour-chart")

    def u_of_s(self, s):
        return self.s_table.inverse(s)

    def U_of_u(self, u):
        R = self.seed.R(u)
        return np.sqrt(R**2 + self.seed.mu**2)

    def _U_of_s(self, s):
        return self.U_of_u(self.u_of_s(s))

    def _dU_of_s(self, s):
        u = self.u_of_s(s)
        R = self.seed.R(u)
        dUdu = R * self.seed.R_prime(u) / self.U_of_u(u)
        return dUdu / self.s_table.derivative(u)

    def U_and_dU(self, s):
        u = self.u_of_s(s)
        U = self.U_of_u(u)
        dUdu = self.seed.R(u) * self.seed.R_prime(u) / U
        return U, dUdu / self.s_table.derivative(u)

    def Theta(self, s):
        return self.theta_table(self.u_of_s(s))

    def patch(self, t_range=(-math.pi, math.pi)) -> ParametricPatch:
        """The seed surface itself in Bour coordinates (s, t)."""
        mu = self.seed.mu

        def position(s, t):
            u = self.u_of_s(s)
            phi = t - self.theta_table(u)
            R = self.seed.R(u)
            return np.stack(
                np.broadcast_arrays(R * np.cos(phi), R * np.sin(phi), self.seed.Lambda(u) + mu * phi),
                axis=-1,
            )

        return ParametricPatch(position, (*self.s_domain, *t_range), label=f"bour-seed(mu={mu:g})")


def build_bour_chart(seed: HelicoidalSeed, n_nodes: int = 512, tol: float = DEFAULT_TOL) -> BourChart:
    """Tabulate s(u) and Theta(u) from the left end of the seed's domain."""
    mu = seed.mu
    u0, u1 = seed.domain
    probe = np.linspace(u0, u1, 4 * n_nodes + 1)[1:-1]
    if np.any(seed.R(probe) <= 0):
        raise DomainError("seed profile R must be positive inside its domain")

    def speed(u):
        R = seed.R(u)
        dR = seed.R_prime(u)
        dL = seed.Lambda_prime(u)
        U2 = R**2 + mu**2
        with np.errstate(invalid="ignore", divide="ignore"):
            coupling = np.where(U2 > 0, R**2 / U2, 1.0)
        return np.sqrt(dR**2 + coupling * dL**2)

    def phase_rate(u):
        R = seed.R(u)
        return mu * seed.Lambda_prime(u) / (R**2 + mu**2)

    if np.any(speed(probe) <= 1e-14):
        raise DegeneracyError("generating curve has zero speed; s is not monotone")
    s_table = CumulativeTable(speed, u0, u1, n_nodes, tol=tol)
    if np.any(np.diff(s_table.values) <= 0):
        raise DegeneracyError("arc coordinate s is not strictly increasing")
    theta_table = CumulativeTable(phase_rate, u0, u1, n_nodes, tol=tol)
    return BourChart(seed, s_table, theta_table)


def _radicands(U, dU, lam, h):
    lU2 = lam**2 * U**2
    return lU2 - h**2, lU2 * (1 - lam**2 * dU**2) - h**2


def _longest_run(ok: np.ndarray) -> Optional[tuple[int, int]]:
    best = None
    start = None
    for i, flag in enumerate(np.append(ok, False)):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            if best is None or i - start > best[1] - best[0] + 1:
                best = (start, i - 1)
            start = None
    return best


@dataclass(frozen=True)
class DeformedDatum:
    """Profile data (R, Lambda, Theta) of the member X^(lam, h) as functions of s."""

    lam: float
    h: float
    sign: int
    warping: WarpingFunction
    Lambda_table: CumulativeTable
    Theta_table: CumulativeTable
    s_domain: tuple[float, float]

    def R(self, s):
        U = self.warping.U(s)
        return np.sqrt(self.lam**2 * U**2 - self.h**2)

    def Lambda(self, s):
        return self.Lambda_table(s)

    def Theta(self, s):
        return self.Theta_table(s)

    def dLambda(self, s):
        return self.Lambda_table.derivative(s)

    def dTheta(self, s):
        return self.Theta_table.derivative(s)


def recover_datum(
    warping: WarpingFunction,
    lam: float,
    h: float,
    sign: int = 1,
    s_range: Optional[tuple[float, float]] = None,
    n_nodes: int = 512,
    tol: float = DEFAULT_TOL,
    anchors: tuple[float, float] = (0.0, 0.0),
) -> DeformedDatum:
    """Integrate the profile of X^(lam, h) from a Bour function.

    With ``s_range`` given, every radicand must stay positive on it or a
    :class:`DomainViolationError` names the offending s-interval.  Without
    it, the longest subinterval of the warping domain on which both radicands
    exceed ``EPS_RAD`` is used.  ``anchors`` are the values of (Lambda, Theta)
    at the left end.
    """
    if lam == 0:
        raise DomainError("lambda must be non-zero")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    lo, hi = warping.s_domain if s_range is None else s_range
    s = np.linspace(lo, hi, 8 * n_nodes + 1)
    rad_R, rad_L = _radicands(*warping.U_and_dU(s), lam, h)
    ok = (rad_R > EPS_RAD) & (rad_L > EPS_RAD)
    if s_range is not None:
        if not ok.all():
            bad = s[~ok]
            raise DomainViolationError(
                f"radicand of the (lam={lam:g}, h={h:g}) datum is not positive on "
                f"s in [{bad.min():.6g}, {bad.max():.6g}]",
                interval=(float(bad.min()), float(bad.max())),
            )
    else:
        run = _longest_run(ok)
        if run is None or run[1] == run[0]:
            raise DomainViolationError(
                f"no s-interval where the (lam={lam:g}, h={h:g}) datum exists",
                interval=(lo, hi),
            )
        lo, hi = float(s[run[0]]), float(s[run[1]])

    def slopes(x):
        U, dU = warping.U_and_dU(x)
        rad_R, rad_L = _radicands(U, dU, lam, h)
        dL = sign * abs(lam) * U / rad_R * np.sqrt(np.maximum(rad_L, 0.0))
        return dL, h / (lam**2 * U**2) * dL

    def dLambda(x):
        return slopes(x)[0]

    def dTheta(x):
        return slopes(x)[1]

    Lt = CumulativeTable(dLambda, lo, hi, n_nodes, anchor=anchors[0], tol=tol)
    Tt = CumulativeTable(dTheta, lo, hi, n_nodes, anchor=anchors[1], tol=tol)
    return DeformedDatum(lam, h, sign, warping, Lt, Tt, (lo, hi))


def family_patch(datum: DeformedDatum, t_range: Optional[tuple[float, float]] = None) -> ParametricPatch:
    """X^(lam, h)(s, t) = (R cos phi, R sin phi, Lambda + h phi), phi = t/lam - Theta."""
    lam, h = datum.lam, datum.h
    if t_range is None:
        t_range = (-math.pi * abs(lam), math.pi * abs(lam))

    def position(s, t):
        phi = t / lam - datum.Theta(s)
        R = datum.R(s)
        return np.stack(
            np.broadcast_arrays(R * np.cos(phi), R * np.sin(phi), datum.Lambda(s) + h * phi), axis=-1
        )

    return ParametricPatch(position, (*datum.s_domain, *t_range), label=f"bour(lam={lam:g},h={h:g})")


def family_angle_sq(warping, lam: float, s):
    """Squared angle function lam^2 (dU/ds)^2 shared by every member X^(lam, h)."""
    dU = warping.dU(s) if isinstance(warping, WarpingFunction) else WarpingFunction.from_callable(
        warping, (-np.inf, np.inf)
    ).dU(s)
    return lam**2 * np.asarray(dU) ** 2


def align_about_z(a: np.ndarray, b: np.ndarray):
    """Least-squares rotation about z plus vertical shift taking points ``a`` onto ``b``.

    Returns ``(angle, dz, max_error)`` where ``max_error`` is the largest
    pointwise distance after alignment.
    """
    a = np.asarray(a, dtype=float).reshape(-1, 3)
    b = np.asarray(b, dtype=float).reshape(-1, 3)
    cross = np.sum(a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0])
    dot = np.sum(a[:, 0] * b[:, 0] + a[:, 1] * b[:, 1])
    angle = math.atan2(cross, dot)
    dz = float(np.mean(b[:, 2] - a[:, 2]))
    c, s = math.cos(angle), math.sin(angle)
    moved = np.column_stack([c * a[:, 0] - s * a[:, 1], s * a[:, 0] + c * a[:, 1], a[:, 2] + dz])
    return angle, dz, float(np.max(np.linalg.norm(moved - b, axis=1)))
