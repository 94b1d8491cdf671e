"""Branch and bound against exhaustive enumeration and known instances."""
import numpy as np
import pytest
from scipy.optimize import linprog

from gridlife.milp import (
    BranchStats,
    MilpModel,
    MilpStatus,
    SolverLimits,
    solve_lp,
    solve_milp,
)


def knapsack_model():
    """max 3a + 4b + 2c s.t. 2a + 3b + c <= 4  ->  min form, optimum -7."""
    m = MilpModel()
    for name, neg in (("a", -3.0), ("b", -4.0), ("c", -2.0)):
        m.add_variable(name, 0.0, 1.0, obj=neg, binary=True)
    m.add_row("cap", [(0, 2.0), (1, 3.0), (2, 1.0)], "<=", 4.0)
    return m


def test_knapsack():
    sol = solve_milp(knapsack_model())
    assert sol.status is MilpStatus.OPTIMAL
    assert sol.objective == pytest.approx(-7.0, abs=1e-9)
    assert np.allclose(sol.values, [0.0, 1.0, 1.0], atol=1e-9)


def random_mip(rng, max_bin=8, max_cont=5, max_rows=10):
    model = MilpModel()
    nb = int(rng.integers(1, max_bin + 1))
    nc = int(rng.integers(0, max_cont + 1))
    for j in range(nb):
        model.add_variable(f"b{j}", 0.0, 1.0, obj=float(rng.uniform(-4, 4)),
                           binary=True)
    for j in range(nc):
        lo = float(rng.uniform(-3, 0))
        model.add_variable(f"x{j}", lo, lo + float(rng.uniform(0.5, 4)),
                           obj=float(rng.uniform(-3, 3)))
    n = nb + nc
    for i in range(int(rng.integers(1, max_rows + 1))):
        coefs = rng.uniform(-2, 2, n) * (rng.random(n) < 0.75)
        sense = rng.choice(["<=", ">="], p=[0.7, 0.3])
        model.add_row(f"r{i}", [(j, coefs[j]) for j in range(n)],
                      sense, float(rng.uniform(-2, 6)))
    return model, nb


def enumeration_objective(model, nb):
    """Oracle: fix every binary pattern, solve the continuous rest."""
    best = None
    lb = np.asarray(model.lb, dtype=float).copy()
    ub = np.asarray(model.ub, dtype=float).copy()
    c = np.asarray(model.obj, dtype=float)
    a_ub, b_ub = [], []
    for row in model.rows:
        coefs = np.zeros(model.n_variables)
        coefs[row.idx] = row.coef
        if row.sense in ("<=", "="):
            a_ub.append(coefs); b_ub.append(row.rhs)
        if row.sense in (">=", "="):
            a_ub.append(-coefs); b_ub.append(-row.rhs)
    a_ub = np.array(a_ub); b_ub = np.array(b_ub)
    for mask in range(1 << nb):
        bl = lb.copy(); bu = ub.copy()
        for j in range(nb):
            bl[j] = bu[j] = float((mask >> j) & 1)
        ref = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=list(zip(bl, bu)),
                      method="highs")
        if ref.status == 0 and (best is None or ref.fun < best):
            best = ref.fun
    return best


def test_against_enumeration_oracle():
    rng = np.random.default_rng(100)
    solved = 0
    for trial in range(40):
        model, nb = random_mip(rng)
        want = enumeration_objective(model, nb)
        sol = solve_milp(model)
        if want is None:
            assert sol.status is MilpStatus.INFEASIBLE, f"trial {trial}"
            continue
        solved += 1
        assert sol.status is MilpStatus.OPTIMAL, f"trial {trial}: {sol.status}"
        assert sol.objective == pytest.approx(want, rel=1e-6, abs=1e-6), \
            f"trial {trial}"
        assert sol.bound <= sol.objective + 1e-6 * max(1.0, abs(sol.objective))
    assert solved >= 10


def test_deterministic_resolve():
    rng = np.random.default_rng(17)
    model, _ = random_mip(rng)
    a = solve_milp(model)
    b = solve_milp(model)
    assert a.status == b.status and a.node_count == b.node_count
    if a.values is not None:
        assert np.array_equal(a.values, b.values)


def test_node_limit_reports_bound():
    rng = np.random.default_rng(23)
    # A model large enough that one node cannot close it.
    model, nb = random_mip(rng, max_bin=14, max_cont=5, max_rows=14)
    sol = solve_milp(model, SolverLimits(max_nodes=1))
    assert sol.status in (MilpStatus.OPTIMAL, MilpStatus.INFEASIBLE,
                          MilpStatus.FEASIBLE_WITH_GAP, MilpStatus.LIMIT_REACHED)
    full = solve_milp(model)
    if full.status is MilpStatus.OPTIMAL:
        # Whatever the capped solve proved must still bound the optimum.
        assert sol.bound <= full.objective + 1e-6


def test_incumbent_seeding_accepts_feasible_point():
    model = knapsack_model()
    seed = np.array([0.0, 1.0, 1.0])
    sol = solve_milp(model, SolverLimits(max_nodes=1), incumbent=seed)
    assert sol.values is not None
    assert sol.objective <= -7.0 + 1e-9


def test_incumbent_seeding_drops_infeasible_point():
    model = knapsack_model()
    bad = np.array([1.0, 1.0, 1.0])            # violates the capacity row
    sol = solve_milp(model, incumbent=bad)
    assert sol.status is MilpStatus.OPTIMAL
    assert sol.objective == pytest.approx(-7.0, abs=1e-9)
    sol = solve_milp(model, incumbent=np.array([0.5, 1.0, 0.0]))  # fractional
    assert sol.objective == pytest.approx(-7.0, abs=1e-9)


def test_branch_stats_do_not_change_the_optimum():
    rng = np.random.default_rng(31)
    stats = BranchStats()
    for trial in range(12):
        model, nb = random_mip(rng, max_bin=7, max_cont=4)
        plain = solve_milp(model)
        warmed = solve_milp(model, branch_stats=stats)
        assert plain.status == warmed.status
        if plain.objective is not None:
            assert warmed.objective == pytest.approx(plain.objective,
                                                     rel=1e-9, abs=1e-9)


def test_relaxation_bounds_integer_optimum():
    rng = np.random.default_rng(41)
    for _ in range(15):
        model, nb = random_mip(rng)
        relax = solve_lp(model)
        sol = solve_milp(model)
        if sol.status is MilpStatus.OPTIMAL and relax.objective is not None:
            assert relax.objective <= sol.objective + 1e-7


def test_pure_lp_passthrough():
    model = MilpModel()
    model.add_variable("x", 0.0, 2.0, obj=-1.0)
    model.add_variable("y", 0.0, 3.0, obj=-1.0)
    model.add_row("r", [(0, 1.0), (1, 1.0)], "<=", 4.0)
    sol = solve_milp(model)
    assert sol.status is MilpStatus.OPTIMAL
    assert sol.objective == pytest.approx(-4.0, abs=1e-9)


def test_infeasible_binary_model():
    model = MilpModel()
    model.add_variable("a", 0.0, 1.0, obj=1.0, binary=True)
    model.add_variable("b", 0.0, 1.0, obj=1.0, binary=True)
    model.add_row("need2", [(0, 1.0), (1, 1.0)], ">=", 2.0)
    model.add_row("cap1", [(0, 1.0), (1, 1.0)], "<=", 1.0)
    assert solve_milp(model).status is MilpStatus.INFEASIBLE
