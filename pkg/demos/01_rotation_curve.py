"""Success probability of plain Grover search versus iteration count.

Simulates the state vector for one marked item among 1024 and prints it next
to sin^2((2k+1) theta).
"""
from groverlab import analytic
from groverlab.sv import OracleSpec, apply_grover_iteration, project_marked_mass, uniform_state

n, marked = 10, [613]
model = analytic.make_model(n, len(marked))
oracle = OracleSpec(n, marked)
k_star = analytic.optimal_k(model)
print(f"N={model.N} a={model.a} theta={model.theta_a:.7f} k*={k_star}")

state = uniform_state(n)
for k in range(2 * k_star + 1):
    if k:
        state = apply_grover_iteration(state, oracle)
    sim = project_marked_mass(state, oracle)
    if k % 5 == 0 or k == k_star:
        bar = "#" * int(40 * sim)
        print(f"k={k:3d}  {sim:.6f}  {analytic.success_prob(model, k):.6f}  {bar}")
