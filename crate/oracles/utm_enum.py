"""Brute-force masses for the frozen machine in crates/core/machine.json.

Each of the 2^L programs of exactly L bits is run to completion (or until it
asks for a bit beyond L, exhausts S steps, halts, suspends or reaches the
output depth). mass(y) is the fraction of those programs whose output
extends y; the prefix-accounting sum equals that fraction.
"""
import json
from fractions import Fraction
from itertools import product


def run(bits, actions, joint, S, depth):
    code, pc, r, steps, pos, out, read_a = [], 0, 0, 0, 0, [], 0

    def nxt():
        nonlocal pos
        if pos >= len(bits):
            return None
        pos += 1
        return bits[pos - 1]

    while len(out) < depth:
        if pc == len(code):
            val = 0
            for _ in range(3):
                b = nxt()
                if b is None:
                    return out
                val = 2 * val + b
            code.append(val)
            continue
        if steps >= S:
            return out
        op = code[pc]
        if op == 5:  # READA
            if joint:
                return out
            j = read_a + 1
            if j > len(out) + 1 or j > len(actions):
                return out
            steps += 1
            r = actions[j - 1]
            read_a = j
            pc += 1
            continue
        steps += 1
        if op in (0, 1):
            out.append(op)
            pc += 1
        elif op == 2:
            out.append(r)
            pc += 1
        elif op == 3:
            r ^= 1
            pc += 1
        elif op == 4:
            b = nxt()
            if b is None:
                return out
            r = b
            pc += 1
        elif op == 6:
            pc = 0
        else:
            return out
    return out


def masses(L, S, depth, actions=None):
    joint = actions is None
    counts = {}
    for p in product((0, 1), repeat=L):
        out = run(list(p), actions or [], joint, S, depth)
        for n in range(len(out) + 1):
            k = "".join(map(str, out[:n]))
            counts[k] = counts.get(k, 0) + 1
    return {k: str(Fraction(v, 2 ** L)) for k, v in sorted(counts.items(), key=lambda kv: (len(kv[0]), kv[0]))}


def main():
    cases = [
        {"kind": "joint", "l": 8, "s": 40, "depth": 5, "actions": None},
        {"kind": "joint", "l": 10, "s": 30, "depth": 4, "actions": None},
        {"kind": "chron", "l": 9, "s": 40, "depth": 3, "actions": [1, 0, 1]},
        {"kind": "chron", "l": 12, "s": 60, "depth": 4, "actions": [0, 1, 1, 0]},
    ]
    for c in cases:
        c["masses"] = masses(c["l"], c["s"], c["depth"], c["actions"])
        if c["actions"] is None:
            c["actions"] = []
    with open("utm_enum.json", "w") as f:
        json.dump({"cases": cases}, f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main()
