"""Greedy minimax quintic schedule for Newton-Schulz orthogonalization.

Each step picks (a, b, c) minimizing max |a x + b x^3 + c x^5 - 1| over the
current singular-value interval (an LP on a dense grid), then shrinks the
interval to [1 - E, 1 + E]. The coefficients printed here are frozen in
src/linalg.cpp as the default schedule.

    python3 tools/calibration/ns_schedule.py --lower 5e-3 --steps 5
"""
import argparse

import numpy as np
from scipy.optimize import linprog


def minimax_step(lo, hi, n=4000):
    x = np.concatenate([np.geomspace(lo, hi, n), np.linspace(lo, hi, n)])
    basis = np.stack([x, x**3, x**5], 1)
    ones = np.ones((len(x), 1))
    a_ub = np.vstack([np.hstack([basis, -ones]), np.hstack([-basis, -ones])])
    b_ub = np.concatenate([np.ones(len(x)), -np.ones(len(x))])
    res = linprog([0, 0, 0, 1], A_ub=a_ub, b_ub=b_ub,
                  bounds=[(None, None)] * 3 + [(0, None)])
    return res.x[:3], res.x[3]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--lower", type=float, default=5e-3)
    ap.add_argument("--steps", type=int, default=5)
    args = ap.parse_args()
    lo, hi = args.lower, 1.0
    coeffs = []
    for _ in range(args.steps):
        c, err = minimax_step(lo, hi)
        coeffs.append(c)
        lo, hi = 1 - err, 1 + err
    x = np.geomspace(args.lower, 1, 200000)
    for a, b, c in coeffs:
        x = a * x + b * x**3 + c * x**5
        print(f"    {{{a:.17g}, {b:.17g}, {c:.17g}}},")
    print(f"# output range on [{args.lower}, 1]: [{x.min():.6g}, {x.max():.6g}]")


if __name__ == "__main__":
    main()
