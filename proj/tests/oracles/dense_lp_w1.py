#!/usr/bin/env python3
"""Dense linear-programming oracle for the l1 Wasserstein distance.

Builds random pairs of lattice pmfs, solves the full transport LP with HiGHS
and writes atoms plus optimal values to JSON. The C++ tests read that file,
so the network simplex is checked against a solver that shares no code.

    python3 dense_lp_w1.py ../data/w1_lp_oracle.json
"""
import json
import math
import sys

import numpy as np
from scipy.optimize import linprog


def random_pmf(rng, dim, atoms, extent):
    pts = set()
    while len(pts) < atoms:
        pts.add(tuple(int(v) for v in rng.integers(0, extent + 1, size=dim)))
    pts = sorted(pts)
    w = rng.gamma(0.7, size=len(pts))
    w = w / w.sum()
    return [(list(p), float(m)) for p, m in zip(pts, w)]


def poisson_atoms(lam, eps):
    n = 0
    while True:
        tail = 1.0 - sum(math.exp(-lam) * lam ** k / math.factorial(k) for k in range(n + 1))
        if tail <= eps:
            break
        n += 1
    return [([k], math.exp(-lam) * lam ** k / math.factorial(k)) for k in range(n + 1)]


def solve(p, q):
    xs = [np.array(a) for a, _ in p]
    ys = [np.array(b) for b, _ in q]
    a = np.array([m for _, m in p])
    b = np.array([m for _, m in q])
    a = a / a.sum()
    b = b / b.sum()
    n, m = len(xs), len(ys)
    cost = np.array([[np.abs(x - y).sum() for y in ys] for x in xs], dtype=float).ravel()
    rows = []
    for i in range(n):
        r = np.zeros(n * m)
        r[i * m:(i + 1) * m] = 1.0
        rows.append(r)
    for j in range(m):
        r = np.zeros(n * m)
        r[j::m] = 1.0
        rows.append(r)
    res = linprog(cost, A_eq=np.array(rows), b_eq=np.concatenate([a, b]), bounds=(0, None), method="highs",
                  options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10})
    assert res.status == 0, res.message
    return float(res.fun)


def main():
    out_path = sys.argv[1]
    rng = np.random.default_rng(20240601)
    cases = []
    for t in range(30):
        dim = int(rng.integers(1, 4))
        extent = int(rng.integers(3, {1: 260, 2: 20, 3: 8}[dim]))
        cap = (extent + 1) ** dim
        na = int(min(cap, rng.integers(1, 201)))
        nb = int(min(cap, rng.integers(1, 201)))
        p = random_pmf(rng, dim, na, extent)
        q = random_pmf(rng, dim, nb, extent)
        cases.append({"name": f"random_{t}", "dim": dim, "p": p, "q": q, "w1": solve(p, q)})
    binom = [([0], 0.25), ([1], 0.5), ([2], 0.25)]
    pois = poisson_atoms(1.0, 1e-10)
    cases.append({"name": "binomial_vs_poisson", "dim": 1, "p": binom, "q": pois, "w1": solve(binom, pois)})
    with open(out_path, "w") as f:
        json.dump({"cases": [{"name": c["name"], "dim": c["dim"],
                              "p": [{"x": x, "p": m} for x, m in c["p"]],
                              "q": [{"x": x, "p": m} for x, m in c["q"]],
                              "w1": c["w1"]} for c in cases]}, f, indent=1)


if __name__ == "__main__":
    main()
