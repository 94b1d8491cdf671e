"""Dev scratch: cross-check the numpy kernel against scipy.optimize.linprog."""
import sys
sys.path.insert(0, "src")
import numpy as np
from scipy.optimize import linprog
from gridlife import milp

rng = np.random.default_rng(7)
bad = 0
statuses = {"optimal": 0, "infeasible": 0, "unbounded": 0}
for trial in range(400):
    n = int(rng.integers(1, 9))
    m = int(rng.integers(0, 13))
    model = milp.MilpModel()
    lb = rng.uniform(-5, 0, n)
    ub = lb + rng.uniform(0, 6, n)
    # Sprinkle some infinite bounds.
    for j in range(n):
        if rng.random() < 0.1:
            ub[j] = np.inf
        if rng.random() < 0.05:
            lb[j] = -np.inf
    c = rng.uniform(-3, 3, n)
    for j in range(n):
        model.add_variable(f"x{j}", lb[j], ub[j], obj=c[j])
    a_ub, b_ub, a_eq, b_eq = [], [], [], []
    for i in range(m):
        coefs = rng.uniform(-2, 2, n) * (rng.random(n) < 0.7)
        rhs = float(rng.uniform(-4, 8))
        sense = rng.choice(["<=", ">=", "="], p=[0.6, 0.3, 0.1])
        model.add_row(f"r{i}", [(j, coefs[j]) for j in range(n)], sense, rhs)
        if sense == "<=":
            a_ub.append(coefs); b_ub.append(rhs)
        elif sense == ">=":
            a_ub.append(-coefs); b_ub.append(-rhs)
        else:
            a_eq.append(coefs); b_eq.append(rhs)
    sol = milp.solve_lp(model)
    ref = linprog(c, A_ub=np.array(a_ub) if a_ub else None,
                  b_ub=np.array(b_ub) if b_ub else None,
                  A_eq=np.array(a_eq) if a_eq else None,
                  b_eq=np.array(b_eq) if b_eq else None,
                  bounds=list(zip(lb, ub)), method="highs")
    if ref.status == 0:
        want = "optimal"
    elif ref.status == 2:
        want = "infeasible"
    elif ref.status == 3:
        want = "unbounded"
    else:
        continue
    statuses[want] += 1
    got = sol.status.value
    if got != want:
        print(f"trial {trial}: status mismatch ours={got} scipy={want}")
        bad += 1
        continue
    if want == "optimal":
        if abs(sol.objective - ref.fun) > 1e-7 * max(1, abs(ref.fun)):
            print(f"trial {trial}: objective ours={sol.objective:.9f} scipy={ref.fun:.9f}")
            bad += 1
            continue
        certs = milp.check_lp_certificates(model, sol)
        if certs:
            print(f"trial {trial}: certificates: {certs}")
            bad += 1
print(f"done: {statuses}, bad={bad}")
