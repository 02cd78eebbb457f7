"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line; the lines are printed as the test runs
and again in the terminal summary.  Run standalone with
``python3 -m tests.test_acceptance`` for just the summary lines.
"""

import math
from itertools import combinations

import numpy as np
import pytest
from scipy import integrate

from heliflow import (
    FamilyParams,
    GridSpec,
    build_bour_chart,
    build_helicoidal,
    check_angle,
    check_bour_identity,
    check_isometry,
    check_metric,
    check_monge_ampere,
    check_screw_invariance,
    check_translator,
    domain_bounds,
    evaluate,
    family_angle_sq,
    family_patch,
    first_integral_chart,
    ode_residual,
    recover_datum,
    rotational_patch,
    rotational_profile,
)
from heliflow.translators import rotational_graph
from heliflow.verify import annulus_box, seed_from_surface

MEMBERS = [(c, h) for c in (0.5, 1.0, 2.0) for h in (0.0, 0.5, 1.0)]
GRID = GridSpec(40, 40)
RESULTS: dict[int, str] = {}

_cache: dict = {}


def surf(c, h):
    key = (c, h)
    if key not in _cache:
        _cache[key] = build_helicoidal(FamilyParams(c, h))
    return _cache[key]


def record(n, ok, detail):
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line)
    return ok


def nonempty(c, h):
    return not domain_bounds(FamilyParams(c, h)).empty


def criterion_1():
    worst = 0.0
    for c in (2.0, 1.0, 0.0):
        base = 0.0 if c >= 1 else math.sqrt(1 - c)
        U = np.linspace(base + 1e-3, 5.0, 200)
        ref = np.array(
            [integrate.quad(lambda u: math.sqrt(max(u * u + c - 1, 0.0)), base, x, epsabs=1e-13, epsrel=1e-13)[0] for x in U]
        )
        worst = max(worst, float(np.max(np.abs(rotational_profile(c, U) - ref))))
    return record(1, worst < 1e-8, f"closed forms vs quadrature max err {worst:.3g} (tol 1e-8)")


def criterion_2():
    fd = max(check_translator(surf(c, h), GRID, 1e-4).max_residual for c, h in MEMBERS if nonempty(c, h))
    an = max(check_translator(surf(c, 0.0), GRID, 1e-8, "analytic").max_residual for c in (0.5, 1.0, 2.0))
    return record(2, fd < 1e-4 and an < 1e-8, f"|K - n3^4| fd {fd:.3g} (tol 1e-4), analytic h=0 {an:.3g} (tol 1e-8)")


def criterion_3():
    reps = [check_metric(surf(c, h), c, GRID) for c, h in MEMBERS if nonempty(c, h)]
    worst = max(r.max_residual for r in reps)
    return record(3, all(r.passed for r in reps), f"metric max residual {worst:.3g} (tol 1e-5)")


def criterion_4():
    members = [surf(1.0, h) for h in (0.0, 0.25, 0.5, 0.75, 1.0)]
    reps = [check_isometry(a, b, GRID, 2e-5) for a, b in combinations(members, 2)]
    iso = max(r.max_residual for r in reps)
    p = members[0].patch
    rot = rotational_patch(1.0, p.u_range)
    U, T = GRID.mesh(p.domain)
    pos = float(np.max(np.linalg.norm(evaluate(p, U, T) - evaluate(rot, U, T), axis=-1)))
    ok = all(r.passed for r in reps) and pos < 1e-8
    return record(4, ok, f"pairwise isometry {iso:.3g} (tol 2e-5), paraboloid position {pos:.3g} (tol 1e-8)")


def criterion_5():
    reps = [check_angle(surf(c, h), c, GRID) for c, h in MEMBERS if nonempty(c, h)]
    worst = max(r.max_residual for r in reps)
    return record(5, all(r.passed for r in reps), f"angle max residual {worst:.3g} (tol 1e-5)")


def criterion_6():
    rep = check_bour_identity(surf(1.0, 1.0), tol=1e-7)
    return record(6, rep.passed, f"(lam, h) = (1, 1) rebuild error {rep.max_residual:.3g} (tol 1e-7)")


def criterion_7():
    S = surf(1.0, 0.0)
    f, hess = rotational_graph(S)
    box = annulus_box(S, GRID)
    an = check_monge_ampere(f, box, 1e-10, hessian=hess)
    fd = check_monge_ampere(f, box, 1e-5)
    return record(7, an.passed and fd.passed, f"Hessian-one analytic {an.max_residual:.3g} (tol 1e-10), fd {fd.max_residual:.3g} (tol 1e-5)")


def criterion_8():
    worst = 0.0
    for c in (0.5, 1.0, 2.0):
        chart = first_integral_chart(c, (0.5, 5.0))
        lo, hi = chart.s_domain
        s = np.linspace(lo + 0.02 * (hi - lo), hi - 0.02 * (hi - lo), 50)
        worst = max(worst, float(np.max(np.abs(ode_residual(chart, s)))))
    return record(8, worst < 1e-6, f"U''/U + U'^4 max {worst:.3g} (tol 1e-6)")


def criterion_9():
    reps = [check_screw_invariance(surf(c, h), h, 10, 1e-9) for c, h in MEMBERS if nonempty(c, h)]
    worst = max(r.max_residual for r in reps)
    return record(9, all(r.passed for r in reps), f"screw invariance max {worst:.3g} (tol 1e-9)")


def criterion_10():
    wrong_c = check_metric(surf(1.0, 0.5), 2.0, GRID)
    chart = build_bour_chart(seed_from_surface(surf(1.0, 0.5)))
    lo, hi = chart.s_domain
    angle_sq = float(np.max(family_angle_sq(chart, 2.0, np.linspace(lo + 1e-3, hi - 1e-3, 400))))
    lam2 = check_translator(family_patch(recover_datum(chart, 2.0, 0.5)), GridSpec(20, 20), 1e-4)
    box = GridSpec(20, 20, 0.0, (-1.0, 1.0, -1.0, 1.0))
    quad = check_monge_ampere(lambda x, y: x**2 + y**2, box, 1e-5, hessian=lambda x, y: (2 + 0 * x, 0 * x, 2 + 0 * x))
    ok = (
        not wrong_c.passed
        and not lam2.passed
        and angle_sq > 1
        and not quad.passed
        and abs(quad.max_residual - 3) <= 1e-10
    )
    return record(
        10,
        ok,
        f"wrong c residual {wrong_c.max_residual:.3g}, lam=2 translator {lam2.max_residual:.3g} "
        f"with max angle^2 {angle_sq:.3g}, x^2+y^2 residual {quad.max_residual:.12g}",
    )


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


@pytest.mark.parametrize("crit", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 11)])
def test_acceptance(crit):
    assert crit()


def main():
    results = [crit() for crit in CRITERIA]
    print(f"{sum(results)}/{len(results)} acceptance criteria pass")
    return 0 if all(results) else 1


if __name__ == "__main__":
    raise SystemExit(main())
