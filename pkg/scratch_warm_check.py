"""Dev scratch: warm restarts after bound changes must match cold solves."""
import sys
sys.path.insert(0, "src")
import numpy as np
from gridlife import milp
import gridlife._core as sx

rng = np.random.default_rng(11)
bad = 0
tested = 0
for trial in range(300):
    n = int(rng.integers(2, 10))
    m = int(rng.integers(1, 14))
    lb = rng.uniform(-4, 0, n)
    ub = lb + rng.uniform(0.5, 5, n)
    c = rng.uniform(-3, 3, n)
    a = rng.uniform(-2, 2, (m, n)) * (rng.random((m, n)) < 0.7)
    # Keep rows loose enough that most instances stay feasible.
    mid = (lb + ub) / 2
    b = a @ mid + rng.uniform(0.0, 4.0, m)
    senses = rng.choice(["<=", ">=", "="], size=m, p=[0.7, 0.2, 0.1])
    slb = np.where(senses == "<=", 0.0, np.where(senses == ">=", -np.inf, 0.0))
    sub = np.where(senses == "<=", np.inf, np.where(senses == ">=", 0.0, 0.0))
    full_lb = np.concatenate([lb, slb])
    full_ub = np.concatenate([ub, sub])

    kern = sx.DenseSimplex(a, b, c, full_lb, full_ub)
    kern.reset_cold()
    st = kern.solve()
    if st != sx.OPTIMAL:
        continue
    tested += 1
    # A few rounds of branch-like bound fixing with warm resolves.
    for round_ in range(4):
        j = int(rng.integers(0, n))
        if rng.random() < 0.5:
            newlo, newhi = lb[j], (lb[j] + ub[j]) / 2
        else:
            newlo, newhi = (lb[j] + ub[j]) / 2, ub[j]
        kern.set_bounds(j, newlo, newhi)
        st_warm = kern.solve()

        cold = sx.DenseSimplex(a, b, c, kern.lb.copy(), kern.ub.copy())
        cold.reset_cold()
        st_cold = cold.solve()
        if st_warm != st_cold:
            print(f"trial {trial}.{round_}: warm status {st_warm} cold {st_cold}")
            bad += 1
            break
        if st_warm == sx.OPTIMAL:
            if abs(kern.objective() - cold.objective()) > 1e-7 * max(1, abs(cold.objective())):
                print(f"trial {trial}.{round_}: warm obj {kern.objective():.10f} "
                      f"cold {cold.objective():.10f}")
                bad += 1
                break
        else:
            break
print(f"tested={tested}, bad={bad}")
