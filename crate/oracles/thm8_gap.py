#!/usr/bin/env python3
"""Independent oracle for the thm8_gap scenario.

Evaluates the shipped joint and chronological mixtures in closed form with
Python fractions (no shared code with the Rust crates), runs the greedy
anti-copy adversary and freezes the threshold crossing into thm8_gap.json.
"""
import json
import sys
from fractions import Fraction as F

HALF = F(1, 2)


def copy(x):
    v = F(1)
    for i, s in enumerate(x):
        if i % 2 == 0:
            v *= HALF
        elif s != x[i - 1]:
            return F(0)
    return v


def uniform(x):
    return HALF ** len(x)


def dual_noisy(p, policy):
    def nu(x):
        v = F(1)
        for i, s in enumerate(x):
            t = i // 2
            if i % 2 == 0:
                if s != policy(t):
                    return F(0)
            else:
                v *= p if s == x[i - 1] else 1 - p
        return v
    return nu


JOINT = [
    (F(1, 4), copy),
    (F(1, 4), dual_noisy(F(3, 4), lambda t: t % 2)),
    (F(1, 4), dual_noisy(F(2, 3), lambda t: 1)),
    (F(1, 4), uniform),
]

# chronological analog: the environment halves, same weights
W_ID = F(1, 4)


def chron_on_diagonal(t):
    return W_ID + F(1, 4) * F(3, 4) ** t + F(1, 4) * F(2, 3) ** t + F(1, 4) * HALF ** t


def xi(x):
    return sum(w * nu(x) for w, nu in JOINT)


THRESHOLD = F(1, 256)
T_MAX = 30


def main():
    h = []
    product = F(1)
    rows = []
    crossed = None
    for t in range(1, T_MAX + 1):
        conds = []
        for a in (0, 1):
            den = xi(h + [a])
            conds.append(xi(h + [a, a]) / den)
        a = 0 if conds[0] <= conds[1] else 1
        product *= conds[a]
        h += [a, a]
        chron = chron_on_diagonal(t)
        rows.append({
            "t": t,
            "action": a,
            "conditional": f"{conds[a].numerator}/{conds[a].denominator}",
            "product_float": float(product),
            "chron_float": float(chron),
        })
        if crossed is None and product < THRESHOLD:
            crossed = t
    # ratio chron/product must be strictly increasing
    ratios = []
    p = F(1)
    for r in rows:
        c = F(r["conditional"])
        p *= c
        ratios.append(chron_on_diagonal(r["t"]) / p)
    increasing = all(b > a for a, b in zip(ratios, ratios[1:]))
    out = {
        "scenario": "thm8_gap",
        "w_id": "1/4",
        "threshold": f"{THRESHOLD.numerator}/{THRESHOLD.denominator}",
        "crossing_step": crossed,
        "trace_length": T_MAX,
        "actions": [r["action"] for r in rows],
        "ratio_strictly_increasing": increasing,
        "conditionals": [r["conditional"] for r in rows],
        "final_product_float": float(p),
    }
    json.dump(out, sys.stdout, indent=2)
    print()


if __name__ == "__main__":
    main()
