"""Numerical check of the hybrid-argument lower bound.

For random k-query algorithms the total distance between marked and unmarked
runs stays under 2 k sqrt(N), so some marked element is barely noticed.
"""
import math

import numpy as np

from groverlab.lowerbound import hadamard_query_algorithm, random_algorithm, run_hybrid, verify_algorithm

rng = np.random.default_rng(3)
n = 4
print(f"{'k':>2} {'sum D':>8} {'2k sqrt N':>10} {'min D':>7} {'2k/sqrt N':>10} {'advantage':>10}")
for k in range(1, 7):
    rep = verify_algorithm(random_algorithm(n, n + 1, k, rng))
    s = rep.sum_bound
    print(f"{k:>2} {s.sum_d:8.3f} {s.bound:10.3f} {s.min_d:7.3f} {s.min_bound:10.3f} {rep.advantage.advantage:10.4f}")

tr = run_hybrid(hadamard_query_algorithm(n, 1), 5)
print(f"one query on the uniform state: D = {tr.D[1]:.6f}, 2/sqrt(N) = {2 / math.sqrt(1 << n):.6f}")
