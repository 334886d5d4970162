#!/usr/bin/env python3
"""Regenerate the frozen high-precision oracle values used by the tests.

Writes tests/data/golden_bounds.json. Every value is computed with mpmath
at 50 significant digits straight from the defining expressions -- never
through the package code -- so the test suite compares two independent
routes. Inputs are drawn as ordinary doubles (the package consumes
doubles) and converted exactly into mpmath.

Run from the repository root:

    python scripts/gen_golden.py
"""

from __future__ import annotations

import json
import math
import os

import mpmath as mp
import numpy as np

mp.mp.dps = 50

HERE = os.path.dirname(os.path.abspath(__file__))
OUT_PATH = os.path.join(HERE, "..", "tests", "data", "golden_bounds.json")

SQRT6 = mp.sqrt(6)


def e1_quadrature(x: float):
    """Adaptive quadrature of the tail integral defining E1."""
    xm = mp.mpf(x)
    return mp.quad(lambda t: mp.exp(-t) / t, [xm, mp.inf])


def exp_integral_grid():
    xs = np.logspace(-3, math.log10(20.0), 100)
    values = []
    for x in xs:
        q = e1_quadrature(float(x))
        # Guard the oracle itself against quadrature trouble.
        assert abs(q - mp.e1(mp.mpf(float(x)))) / q < mp.mpf("1e-30")
        values.append({"x": float(x), "e1": float(q)})
    return values


def scaling_denominator(scenario, k, rho, alpha, sigma_delta, g_th, delta_max):
    k = mp.mpf(k)
    rho = mp.mpf(rho)
    alpha = mp.mpf(alpha)
    if scenario == "noiseless":
        return mp.mpf(1)
    if scenario == "awgn":
        return 1 - 1 / (k * mp.sqrt(rho))
    none_mass = (1 - alpha) ** k
    denom = 1 - none_mass - 2 / (alpha * k * mp.sqrt(rho))
    if scenario == "fading":
        return denom
    t = mp.mpf(sigma_delta) / mp.sqrt(mp.sqrt(mp.mpf(g_th)) - mp.mpf(delta_max))
    return denom - 2 * SQRT6 * t / mp.sqrt(alpha * k)


def bias_term(scenario, k, rho, alpha, sigma_delta, g_th, delta_max, gamma, sigma1):
    k = mp.mpf(k)
    rho = mp.mpf(rho)
    alpha = mp.mpf(alpha)
    gamma = mp.mpf(gamma)
    sigma1 = mp.mpf(sigma1)
    if scenario == "noiseless":
        return mp.mpf(0)
    if scenario == "awgn":
        return 2 * gamma * sigma1 / (k * mp.sqrt(rho))
    fading_part = 4 / (alpha * k * mp.sqrt(rho))
    if scenario == "fading":
        return fading_part * gamma * sigma1
    t = mp.mpf(sigma_delta) / mp.sqrt(mp.sqrt(mp.mpf(g_th)) - mp.mpf(delta_max))
    return (fading_part + 4 * SQRT6 * t / mp.sqrt(alpha * k)) * gamma * sigma1


def bound_rhs(a, b, k, l1, sigma1, f0, fstar, gamma, n):
    return (
        a
        / mp.sqrt(mp.mpf(n))
        * (
            mp.sqrt(mp.mpf(l1)) * (mp.mpf(f0) - mp.mpf(fstar) + mp.mpf(gamma) / 2)
            + 2 * mp.mpf(gamma) / mp.sqrt(mp.mpf(k)) * mp.mpf(sigma1)
            + b
        )
    )


def conv_bound_points(n_points=50, seed=20240501):
    rng = np.random.default_rng(seed)
    points = []
    for scenario in ("noiseless", "awgn", "fading", "imperfect"):
        kept = 0
        while kept < n_points:
            k = int(rng.integers(1, 1001))
            rho = float(10.0 ** rng.uniform(0.0, 4.0))
            if scenario in ("fading", "imperfect"):
                g_th = float(rng.uniform(0.05, 1.5))
                alpha = math.exp(-g_th)
            else:
                g_th, alpha = 0.0, 1.0
            if scenario == "imperfect":
                sigma_delta = float(rng.uniform(1e-3, 0.17 * math.sqrt(g_th)))
                delta_max = math.sqrt(3.0) * sigma_delta
            else:
                sigma_delta, delta_max = 0.0, 0.0
            l1 = float(10.0 ** rng.uniform(-1.0, 3.0))
            sigma1 = float(10.0 ** rng.uniform(-1.0, 3.0))
            fstar = float(rng.uniform(-5.0, 5.0))
            f0 = fstar + float(10.0 ** rng.uniform(-1.0, 2.0))
            gamma = float(10.0 ** rng.uniform(-1.0, 1.0))
            n = int(rng.integers(1, 1001))
            denom = scaling_denominator(
                scenario, k, rho, alpha, sigma_delta, g_th, delta_max
            )
            # Near-vacuous points amplify double rounding; they are covered
            # by the vacuous-bound error path instead.
            if denom < mp.mpf("0.05"):
                continue
            a = 1 / denom
            b = bias_term(
                scenario, k, rho, alpha, sigma_delta, g_th, delta_max, gamma, sigma1
            )
            rhs = bound_rhs(a, b, k, l1, sigma1, f0, fstar, gamma, n)
            points.append(
                {
                    "scenario": scenario,
                    "k": k,
                    "rho": rho,
                    "alpha": alpha,
                    "sigma_delta": sigma_delta,
                    "g_th": g_th,
                    "delta_max": delta_max,
                    "l1": l1,
                    "sigma1": sigma1,
                    "f0": f0,
                    "fstar": fstar,
                    "gamma": gamma,
                    "n": n,
                    "a": float(a),
                    "b": float(b),
                    "rhs": float(rhs),
                }
            )
            kept += 1
    return points


def perr_examples():
    """Hand-picked bit-error bound evaluations at 50 digits."""

    def awgn(k, s, rho):
        k, s, rho = map(mp.mpf, (k, s, rho))
        return 1 / (mp.sqrt(k) * s) + 1 / (k * s * mp.sqrt(rho)) + 1 / (
            2 * k * mp.sqrt(rho)
        )

    def fading(k, alpha, s, rho):
        k, alpha, s, rho = map(mp.mpf, (k, alpha, s, rho))
        return (
            (1 - alpha) ** k / 2
            + SQRT6 / (mp.sqrt(alpha * k) * s)
            + 2 / (alpha * k) / mp.sqrt(rho) * (1 / s + mp.mpf(1) / 2)
        )

    def imperfect(k, alpha, s, rho, sigma_delta, g_th, delta_max):
        t = mp.mpf(sigma_delta) / mp.sqrt(mp.sqrt(mp.mpf(g_th)) - mp.mpf(delta_max))
        base = fading(k, alpha, s, rho)
        k, alpha, s = map(mp.mpf, (k, alpha, s))
        return base + SQRT6 / mp.sqrt(alpha * k) * (2 / s + 1) * t

    g_th = math.log(1.0 / 0.9)
    alpha = math.exp(-g_th)
    sigma_delta = 0.01
    delta_max = math.sqrt(3.0) * sigma_delta
    return {
        "awgn_k100_s1_rho10": float(awgn(100, 1, 10)),
        "fading_k100_a09_s1_rho10": float(fading(100, alpha, 1, 10)),
        "imperfect_k100_a09_s1_rho10_sd001": {
            "k": 100,
            "alpha": alpha,
            "s": 1.0,
            "rho": 10.0,
            "sigma_delta": sigma_delta,
            "g_th": g_th,
            "delta_max": delta_max,
            "value": float(imperfect(100, alpha, 1, 10, sigma_delta, g_th, delta_max)),
        },
        "rho0_p1_m10_gth1": float(1 / (10 * e1_quadrature(1.0))),
    }


def main():
    payload = {
        "exp_integral": exp_integral_grid(),
        "conv_bounds": conv_bound_points(),
        "perr_examples": perr_examples(),
    }
    os.makedirs(os.path.dirname(OUT_PATH), exist_ok=True)
    with open(OUT_PATH, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")
    print(f"wrote {os.path.normpath(OUT_PATH)}")
    print(f"  exp_integral points: {len(payload['exp_integral'])}")
    print(f"  conv_bound points:   {len(payload['conv_bounds'])}")


if __name__ == "__main__":
    main()
