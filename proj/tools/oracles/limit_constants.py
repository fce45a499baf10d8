#!/usr/bin/env python3
"""Five limit constants of a fixture, straight from the coefficient formulas.

Reads the sectioned config format (Fourier-term entries only), samples A(x, t)
on the config grid and evaluates

    C_under      = -mean_t max_x mu(A)        C_star       = -max_x mean_t mu(A)
    C_star_plus  = -max_x mu(mean_t A)        C_under_plus = -mean_t mu(avg_x A)
    C_bar        = -mu(avg_x mean_t A)

with mu the largest eigenvalue of the symmetric matrix, avg_x the trapezoid
mean over [0, L] and mean_t the mean over the periodic time samples. For
mutation models A = M + diag(c). Prints key = value lines, plus the
persistence case when given --case.
"""

import argparse
import math

import numpy as np


def parse(path):
    sections, current = {}, None
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("["):
                current = line[1:-1].strip()
                sections.setdefault(current, [])
                continue
            key, value = (s.strip() for s in line.split("=", 1))
            sections[current].append((key, value))
    return sections


def value_of(items, key, default=None):
    for k, v in items:
        if k == key:
            return v
    return default


def entry_field(items, x, t, length):
    out = np.zeros((len(x), len(t)))
    for k, v in items:
        if k != "term":
            raise ValueError("only Fourier-term entries are supported")
        amp, kx, kt, kind = (s.strip() for s in v.split(","))
        amp, kx, kt = float(amp), int(kx), int(kt)
        fx = np.cos(kx * math.pi * x / length)
        ft = {"const": np.ones_like(t), "cos": np.cos(2 * math.pi * kt * t),
              "sin": np.sin(2 * math.pi * kt * t)}[kind]
        out += amp * np.outer(fx, ft)
    return out


def field(sections):
    prob, grid = dict(sections["problem"]), dict(sections.get("grid", []))
    n = int(prob["n"])
    length = float(grid.get("length", 1.0))
    nodes = int(grid.get("nodes", 201))
    steps = int(grid.get("steps", 512))
    x = np.linspace(0.0, length, nodes)
    t = np.arange(steps) / steps
    A = np.zeros((nodes, steps, n, n))
    mutation = any(s.startswith("mutation.") for s in sections)
    prefix = "mutation." if mutation else "entry."
    for name, items in sections.items():
        if name.startswith(prefix):
            i, j = (int(s) - 1 for s in name.split(".")[1:])
            f = entry_field(items, x, t, length)
            A[:, :, i, j] += f
            if i != j:
                A[:, :, j, i] += f
        elif name.startswith("rate."):
            i = int(name.split(".")[1]) - 1
            A[:, :, i, i] += entry_field(items, x, t, length)
    return A, x, length


def mu(mats):
    return np.linalg.eigvalsh(mats)[..., -1]


def constants(A, x, length):
    w = np.full(len(x), x[1] - x[0])
    w[0] = w[-1] = 0.5 * (x[1] - x[0])
    w /= length
    pointwise = mu(A)                                   # (nodes, steps)
    c_under = -pointwise.max(axis=0).mean()
    c_star = -pointwise.mean(axis=1).max()
    c_star_plus = -mu(A.mean(axis=1)).max()
    space_avg = np.einsum("j,jtab->tab", w, A)
    c_under_plus = -mu(space_avg).mean()
    c_bar = -mu(space_avg.mean(axis=0)[None])[0]
    return dict(C_under=c_under, C_star=c_star, C_star_plus=c_star_plus, C_under_plus=c_under_plus, C_bar=c_bar)


def region_case(c):
    if not (c["C_under"] < 0 < c["C_bar"]):
        return 0
    if c["C_star"] >= 0:
        return 1
    if min(c["C_star_plus"], c["C_under_plus"]) > 0:
        return 2
    if max(c["C_star_plus"], c["C_under_plus"]) <= 0:
        return 5
    return 3 if c["C_star_plus"] < c["C_under_plus"] else 4


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("config")
    ap.add_argument("--case", action="store_true", help="also print the persistence case")
    args = ap.parse_args()
    c = constants(*field(parse(args.config)))
    for k, v in c.items():
        print(f"{k} = {v:.12g}")
    if args.case:
        print(f"case = {region_case(c)}")


if __name__ == "__main__":
    main()
