"""Search without knowing how many items are marked.

Compares the mean number of Grover iterations of the randomized schedule
with the known-count optimum and with classical probing.
"""
import statistics

from groverlab import analytic
from groverlab._random import trial_rng
from groverlab.search import classical_baseline, search_unknown
from groverlab.sv import OracleSpec

TRIALS = 500
print(f"{'n':>3} {'a':>4} {'k*':>5} {'unknown':>9} {'16 m*':>8} {'classical':>10}")
for n in (6, 8, 10):
    for a in (1, 4):
        model = analytic.make_model(n, a)
        marked = range(a)
        q = [search_unknown(OracleSpec(n, marked), rng=trial_rng(1, i)).total_queries for i in range(TRIALS)]
        c = [classical_baseline(OracleSpec(n, marked), trial_rng(2, i)).total_queries for i in range(TRIALS)]
        print(f"{n:>3} {a:>4} {analytic.optimal_k(model):>5} {statistics.fmean(q):>9.2f} "
              f"{16 * analytic.critical_m(model):>8.1f} {statistics.fmean(c):>10.1f}")
