#!/usr/bin/env python3
"""Independent oracle for the thm11_convergence scenario.

Closed-form evaluation of the shipped thm11 joint mixture with Python
fractions. For every deterministic environment in the class and every
binary action sequence of length N, computes the correct-percept
conditional of the normalized mixture (and of the raw mixture for the
contrast), then freezes epsilon and t_star into thm11_convergence.json.
"""
import itertools
import json
import sys
from fractions import Fraction as F

HALF = F(1, 2)
N = 10

# deterministic environments in the class; they disagree on every action,
# so no action sequence can postpone identifying the true one
ENVS = {
    "mu_id": lambda a: a,
    "mu_not": lambda a: 1 - a,
}


def chron_joint(rule):
    def nu(x):
        v = F(1)
        for i, s in enumerate(x):
            if i % 2 == 0:
                v *= HALF
            elif s != rule(x[i - 1]):
                return F(0)
        return v
    return nu


def uniform(x):
    return HALF ** len(x)


def lossy_echo_const(b):
    # dual(lossy_echo(1/2), constant policy b)
    def nu(x):
        v = F(1)
        for i, s in enumerate(x):
            if i % 2 == 0:
                if s != b:
                    return F(0)
            else:
                if s != x[i - 1]:
                    return F(0)
                v *= HALF
        return v
    return nu


W = F(1, 5)
MIXTURE = [
    (W, chron_joint(ENVS["mu_id"])),
    (W, chron_joint(ENVS["mu_not"])),
    (W, uniform),
    (W, lossy_echo_const(0)),
    (W, lossy_echo_const(1)),
]


def xi(x):
    return sum(w * nu(x) for w, nu in MIXTURE)


def conditionals(rule, actions):
    h = []
    normalized, raw = [], []
    for a in actions:
        e = rule(a)
        ctx = h + [a]
        num = xi(ctx + [e])
        mass = xi(ctx + [0]) + xi(ctx + [1])
        normalized.append(num / mass)
        raw.append(num / xi(ctx))
        h = ctx + [e]
    return normalized, raw


def frac(q):
    return f"{q.numerator}/{q.denominator}"


def main():
    min_norm = [F(1)] * N
    min_raw = [F(1)] * N
    for rule in ENVS.values():
        for actions in itertools.product((0, 1), repeat=N):
            norm, raw = conditionals(rule, list(actions))
            min_norm = [min(m, c) for m, c in zip(min_norm, norm)]
            min_raw = [min(m, c) for m, c in zip(min_raw, raw)]
    epsilon = F(1, 20)
    bound = 1 - epsilon
    t_star = None
    for t in range(1, N + 1):
        if all(m > bound for m in min_norm[t - 1:]):
            t_star = t
            break
    raw_fails = [t for t in range(t_star, N + 1) if not min_raw[t - 1] > bound]
    out = {
        "scenario": "thm11_convergence",
        "sequence_length": N,
        "epsilon": frac(epsilon),
        "t_star": t_star,
        "min_normalized": [frac(m) for m in min_norm],
        "min_raw": [frac(m) for m in min_raw],
        "raw_fails_at": raw_fails,
    }
    json.dump(out, sys.stdout, indent=2)
    print()


if __name__ == "__main__":
    main()
