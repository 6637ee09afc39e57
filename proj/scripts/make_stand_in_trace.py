#!/usr/bin/env python3
"""Regenerates data/energy_demand.csv, the bundled stand-in demand pool.

The simulator's default trace is a CSV of building-energy records whose
heating_load column serves as the demand pool. The original building-energy
export is not redistributable here, so this script produces a deterministic
stand-in with the same schema and a similar value profile: 768 rows,
heating loads in roughly [6, 43] kWh/m^2, leaning toward low values
(median of the normalized column < 0.5), with a sparse low tail.

Usage: python3 scripts/make_stand_in_trace.py > data/energy_demand.csv
"""

import math
import random

ROWS = 768
SEED = 20240811
LOAD_LO, LOAD_HI = 6.01, 43.10
BETA_A, BETA_B = 1.8, 1.93  # F(0.5) ~ 0.53 for the normalized column


def beta_ppf(u, a, b, tol=1e-12):
    """Inverse regularized incomplete beta via bisection (SciPy-free)."""

    def betainc(x):
        # Continued-fraction evaluation of I_x(a, b) (Numerical Recipes form).
        if x <= 0.0:
            return 0.0
        if x >= 1.0:
            return 1.0
        ln_beta = math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)
        front = math.exp(a * math.log(x) + b * math.log(1.0 - x) - ln_beta)
        if x < (a + 1.0) / (a + b + 2.0):
            return front * _betacf(x, a, b) / a
        return 1.0 - front * _betacf(1.0 - x, b, a) / b

    def _betacf(x, aa, bb):
        max_iter, eps, tiny = 200, 3e-14, 1e-30
        qab, qap, qam = aa + bb, aa + 1.0, aa - 1.0
        c, d = 1.0, 1.0 - qab * x / qap
        if abs(d) < tiny:
            d = tiny
        d = 1.0 / d
        h = d
        for m in range(1, max_iter + 1):
            m2 = 2 * m
            num = m * (bb - m) * x / ((qam + m2) * (aa + m2))
            d = 1.0 + num * d
            if abs(d) < tiny:
                d = tiny
            c = 1.0 + num / c
            if abs(c) < tiny:
                c = tiny
            d = 1.0 / d
            h *= d * c
            num = -(aa + m) * (qab + m) * x / ((aa + m2) * (qap + m2))
            d = 1.0 + num * d
            if abs(d) < tiny:
                d = tiny
            c = 1.0 + num / c
            if abs(c) < tiny:
                c = tiny
            d = 1.0 / d
            delta = d * c
            h *= delta
            if abs(delta - 1.0) < eps:
                break
        return h

    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if betainc(mid) < u:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def main():
    rng = random.Random(SEED)

    # Deterministic quantile grid, then a seeded shuffle of row order.
    xs = [beta_ppf((i + 0.5) / ROWS, BETA_A, BETA_B) for i in range(ROWS)]
    rows = []
    for i, x in enumerate(xs):
        heating = LOAD_LO + (LOAD_HI - LOAD_LO) * x
        cooling = 4.0 + 0.92 * heating + rng.uniform(-1.5, 1.5)
        compact = 0.62 + 0.36 * (1.0 - x) + rng.uniform(-0.02, 0.02)
        surface = 514.5 + 294.0 * x + rng.uniform(-8.0, 8.0)
        wall = 245.0 + 173.5 * x * 0.6 + rng.uniform(-6.0, 6.0)
        roof = 110.25 + 110.25 * x + rng.uniform(-4.0, 4.0)
        height = 3.5 if x < 0.45 else 7.0
        orientation = rng.choice([2, 3, 4, 5])
        glazing = rng.choice([0.0, 0.1, 0.25, 0.4])
        glazing_dist = rng.randint(0, 5)
        rows.append(
            (
                round(compact, 3),
                round(surface, 2),
                round(wall, 2),
                round(roof, 2),
                height,
                orientation,
                glazing,
                glazing_dist,
                round(heating, 4),
                round(max(cooling, 1.0), 4),
            )
        )
    rng.shuffle(rows)

    print(
        "relative_compactness,surface_area,wall_area,roof_area,overall_height,"
        "orientation,glazing_area,glazing_distribution,heating_load,cooling_load"
    )
    for r in rows:
        print(",".join(str(v) for v in r))


if __name__ == "__main__":
    main()
