"""Mixed-integer linear programming on top of the bounded-simplex kernel.

MilpModel is the model language the scheduling layer speaks: box-bounded
variables (continuous or binary), sparse rows, minimization. solve_lp runs
the relaxation; solve_milp runs branch and bound with best-bound node
selection, depth-first plunging until a first incumbent exists, and
most-fractional binary branching with lowest-index tie breaks. Warm starts
flow through the kernel: a child node continues from its parent's basis and
the dual simplex repairs the single changed bound.

Models may install a ``rounding_hint`` callable that proposes an integral
completion of a fractional LP point; candidates are verified against every
row and bound before being accepted as incumbents, so hints can only help.
"""

from __future__ import annotations

import heapq
import math
import time
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import _core

__all__ = [
    "LpStatus",
    "MilpStatus",
    "SolverLimits",
    "MilpModel",
    "LpSolution",
    "MilpSolution",
    "NumericalSolveError",
    "solve_lp",
    "solve_milp",
    "check_lp_certificates",
    "to_lp_text",
]

ROW_FEAS_TOL = 1e-8


class NumericalSolveError(RuntimeError):
    """Pivoting stalled beyond every cap and retry; no trustworthy result."""


class LpStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    NUMERICAL = "numerical-failure"


class MilpStatus(Enum):
    OPTIMAL = "optimal"
    FEASIBLE_WITH_GAP = "feasible-with-gap"
    INFEASIBLE = "infeasible"
    LIMIT_REACHED = "limit-reached"


@dataclass(frozen=True)
class SolverLimits:
    max_nodes: int = 1_000_000
    max_seconds: float = 3600.0
    relative_gap: float = 1e-6
    integrality_tol: float = 1e-6

    def __post_init__(self) -> None:
        if self.max_nodes <= 0 or self.max_seconds <= 0:
            raise ValueError("limits must be positive")
        if self.relative_gap <= 0 or self.integrality_tol <= 0:
            raise ValueError("tolerances must be positive")


@dataclass
class BranchStats:
    """Pseudocost history, reusable across solves of structurally identical
    models (same variable count and meaning). Passing one instance to a
    sequence of solve_milp calls lets later trees start with learned
    branching scores instead of the flat prior."""
    pseudo_sum: np.ndarray | None = None
    pseudo_count: np.ndarray | None = None

    def ensure(self, n: int) -> None:
        if self.pseudo_sum is None or self.pseudo_sum.shape != (2, n):
            self.pseudo_sum = np.zeros((2, n))
            self.pseudo_count = np.zeros((2, n), dtype=np.int64)


@dataclass
class _Row:
    name: str
    idx: np.ndarray
    coef: np.ndarray
    sense: str
    rhs: float


class MilpModel:
    """Minimization MILP with box bounds, sparse rows, and binary flags."""

    def __init__(self, name: str = "model"):
        self.name = name
        self.var_names: list[str] = []
        self.lb: list[float] = []
        self.ub: list[float] = []
        self.obj: list[float] = []
        self.is_binary: list[bool] = []
        self.rows: list[_Row] = []
        # Optional callable: fractional LP point -> integral candidate or None.
        self.rounding_hint = None

    @property
    def n_variables(self) -> int:
        return len(self.var_names)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    def add_variable(self, name: str, lb: float, ub: float,
                     obj: float = 0.0, binary: bool = False) -> int:
        if np.isnan(lb) or np.isnan(ub):
            raise ValueError(f"variable {name}: bounds must not be NaN")
        if lb > ub:
            raise ValueError(f"variable {name}: lb {lb} exceeds ub {ub}")
        if binary and (lb < 0.0 or ub > 1.0):
            raise ValueError(f"binary variable {name}: bounds must sit within [0, 1]")
        if not np.isfinite(obj):
            raise ValueError(f"variable {name}: objective coefficient must be finite")
        self.var_names.append(name)
        self.lb.append(float(lb))
        self.ub.append(float(ub))
        self.obj.append(float(obj))
        self.is_binary.append(bool(binary))
        return len(self.var_names) - 1

    def add_row(self, name: str, coeffs, sense: str, rhs: float) -> int:
        if sense not in ("<=", "=", ">="):
            raise ValueError(f"row {name}: sense must be <=, = or >=")
        if not np.isfinite(rhs):
            raise ValueError(f"row {name}: rhs must be finite")
        idx = []
        coef = []
        if isinstance(coeffs, dict):
            coeffs = coeffs.items()
        for j, v in coeffs:
            if not 0 <= j < self.n_variables:
                raise ValueError(f"row {name}: variable index {j} out of range")
            if not np.isfinite(v):
                raise ValueError(f"row {name}: coefficient for index {j} not finite")
            if v != 0.0:
                idx.append(j)
                coef.append(float(v))
        self.rows.append(_Row(name, np.asarray(idx, dtype=np.int64),
                              np.asarray(coef, dtype=np.float64), sense, float(rhs)))
        return len(self.rows) - 1

    def binary_indices(self) -> np.ndarray:
        return np.flatnonzero(np.asarray(self.is_binary, dtype=bool))


@dataclass
class LpSolution:
    status: LpStatus
    objective: float | None
    values: np.ndarray | None        # structural variables only
    duals: np.ndarray | None         # one per row: d(objective)/d(rhs)
    reduced_costs: np.ndarray | None
    iterations: int = 0


@dataclass
class MilpSolution:
    status: MilpStatus
    objective: float | None
    values: np.ndarray | None
    bound: float
    gap: float
    node_count: int
    wall_time: float


@dataclass
class _Arrays:
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    lb: np.ndarray           # structurals then slacks
    ub: np.ndarray
    n: int
    m: int


def _standardize(model: MilpModel) -> _Arrays:
    n = model.n_variables
    m = model.n_rows
    a = np.zeros((m, n))
    b = np.empty(m)
    slack_lb = np.empty(m)
    slack_ub = np.empty(m)
    for i, row in enumerate(model.rows):
        a[i, row.idx] = row.coef
        b[i] = row.rhs
        if row.sense == "<=":
            slack_lb[i], slack_ub[i] = 0.0, np.inf
        elif row.sense == ">=":
            slack_lb[i], slack_ub[i] = -np.inf, 0.0
        else:
            slack_lb[i], slack_ub[i] = 0.0, 0.0
    lb = np.concatenate([np.asarray(model.lb), slack_lb])
    ub = np.concatenate([np.asarray(model.ub), slack_ub])
    return _Arrays(a=a, b=b, c=np.asarray(model.obj, dtype=np.float64),
                   lb=lb, ub=ub, n=n, m=m)


def _lp_status(kernel_status: int) -> LpStatus:
    return {
        _core.OPTIMAL: LpStatus.OPTIMAL,
        _core.INFEASIBLE: LpStatus.INFEASIBLE,
        _core.UNBOUNDED: LpStatus.UNBOUNDED,
        _core.ITERATION_LIMIT: LpStatus.NUMERICAL,
    }[kernel_status]


def solve_lp(model: MilpModel) -> LpSolution:
    """Solve the continuous relaxation (binary flags ignored)."""
    arrays = _standardize(model)
    kern = _core.DenseSimplex(arrays.a, arrays.b, arrays.c, arrays.lb, arrays.ub)
    kern.reset_cold()
    try:
        status = _lp_status(kern.solve())
    except np.linalg.LinAlgError as exc:
        raise NumericalSolveError(
            f"basis refactorization failed: {exc}") from exc
    if status is not LpStatus.OPTIMAL:
        return LpSolution(status, None, None, None, None, kern.last_iterations)
    x = kern.primal()
    return LpSolution(
        status=status,
        objective=kern.objective(),
        values=x[: arrays.n].copy(),
        duals=kern.duals(),
        reduced_costs=kern.reduced_costs()[: arrays.n].copy(),
        iterations=kern.last_iterations,
    )


def check_lp_certificates(model: MilpModel, sol: LpSolution,
                          tol: float = ROW_FEAS_TOL) -> list[str]:
    """Primal/dual/complementary-slackness violations of an optimal solution."""
    if sol.status is not LpStatus.OPTIMAL:
        return [f"status {sol.status.value} carries no certificates"]
    problems = []
    x = sol.values
    y = sol.duals
    d = sol.reduced_costs
    lb = np.asarray(model.lb)
    ub = np.asarray(model.ub)
    if (x < lb - tol).any() or (x > ub + tol).any():
        problems.append("variable bound violated")
    for i, row in enumerate(model.rows):
        act = float(x[row.idx] @ row.coef)
        resid = act - row.rhs
        if row.sense == "<=" and resid > tol:
            problems.append(f"row {row.name}: exceeds rhs by {resid:.3e}")
        elif row.sense == ">=" and resid < -tol:
            problems.append(f"row {row.name}: short of rhs by {-resid:.3e}")
        elif row.sense == "=" and abs(resid) > tol:
            problems.append(f"row {row.name}: off rhs by {abs(resid):.3e}")
        # A row strictly slack in both directions must carry a zero dual.
        slack_room = min(abs(resid) if row.sense != "<=" else row.rhs - act,
                         abs(resid) if row.sense != ">=" else act - row.rhs)
        if row.sense != "=" and slack_room > 1e-7 and abs(y[i]) > tol:
            problems.append(f"row {row.name}: slack but dual {y[i]:.3e}")
    # Reduced-cost signs and complementarity with the bounds.
    obj_check = np.asarray(model.obj, dtype=float)
    for i, row in enumerate(model.rows):
        obj_check[row.idx] -= y[i] * row.coef
    if np.max(np.abs(obj_check - d)) > 1e-7:
        problems.append("reduced costs inconsistent with duals")
    at_lb = x < lb + 1e-7
    at_ub = x > ub - 1e-7
    interior = ~(at_lb | at_ub)
    if (d[at_lb & ~at_ub] < -tol).any():
        problems.append("negative reduced cost at a lower bound")
    if (d[at_ub & ~at_lb] > tol).any():
        problems.append("positive reduced cost at an upper bound")
    if interior.any() and np.max(np.abs(d[interior])) > tol:
        problems.append("nonzero reduced cost strictly inside the bounds")
    return problems


def _candidate_ok(model: MilpModel, arrays: _Arrays, x: np.ndarray,
                  int_tol: float) -> bool:
    """Exact acceptance test for incumbent candidates (root bounds, all rows)."""
    if x.shape != (arrays.n,):
        return False
    if (x < arrays.lb[: arrays.n] - 1e-9).any() or (x > arrays.ub[: arrays.n] + 1e-9).any():
        return False
    for j in np.flatnonzero(model.is_binary):
        if abs(x[j] - round(x[j])) > int_tol:
            return False
    for row in model.rows:
        act = float(x[row.idx] @ row.coef)
        if row.sense == "<=" and act - row.rhs > ROW_FEAS_TOL:
            return False
        if row.sense == ">=" and row.rhs - act > ROW_FEAS_TOL:
            return False
        if row.sense == "=" and abs(act - row.rhs) > ROW_FEAS_TOL:
            return False
    return True


@dataclass
class _Node:
    changes: dict          # var index -> (lb, ub), cumulative from the root
    bound: float           # parent LP objective, a valid lower bound here
    snapshot: tuple | None  # (basis, vstat) to start from, None = kernel current
    token: int             # kernel-state id the snapshot/current state carries
    seq: int               # insertion order, the deterministic heap tie-break
    branch_var: int = -1   # binary this node fixed, for pseudocost updates
    branch_step: float = 0.0  # |fractional distance| that fixing covered

    def sort_key(self):
        return (self.bound, self.seq)


def solve_milp(model: MilpModel, limits: SolverLimits | None = None,
               incumbent=None, branch_stats: BranchStats | None = None) -> MilpSolution:
    """Branch and bound over the model's binary variables.

    ``incumbent`` optionally seeds the search with a known feasible point
    (full-length variable vector); it is verified against rows, bounds, and
    integrality before being trusted, and silently dropped otherwise.
    ``branch_stats`` optionally carries pseudocosts in from earlier solves
    of same-shaped models and is updated in place.
    """
    limits = limits or SolverLimits()
    t0 = time.perf_counter()
    arrays = _standardize(model)
    binaries = model.binary_indices()
    root_lb = arrays.lb[: arrays.n].copy()
    root_ub = arrays.ub[: arrays.n].copy()

    kern = _core.DenseSimplex(arrays.a, arrays.b, arrays.c, arrays.lb, arrays.ub)
    kern.reset_cold()

    incumbent_obj = np.inf
    incumbent_x = None
    if incumbent is not None:
        cand = np.asarray(incumbent, dtype=float).copy()
        if _candidate_ok(model, arrays, cand, limits.integrality_tol):
            for j in binaries:
                cand[j] = round(cand[j])
            incumbent_obj = float(arrays.c[: arrays.n] @ cand)
            incumbent_x = cand

    # Pseudocosts: observed objective degradation per unit of fractional
    # distance, kept per binary and direction; unseen variables borrow the
    # global average.
    if branch_stats is not None:
        branch_stats.ensure(arrays.n)
        pc_sum = branch_stats.pseudo_sum
        pc_cnt = branch_stats.pseudo_count
    else:
        pc_sum = np.zeros((2, arrays.n))
        pc_cnt = np.zeros((2, arrays.n), dtype=np.int64)
    min_closed_bound = np.inf   # best bound among nodes pruned by the gap test
    node_count = 0
    seq = 0
    applied: dict = {}
    token_counter = 0   # increments after every kernel solve
    kernel_token = 0    # token of the state the kernel currently holds

    heap: list[tuple[tuple, _Node]] = []
    stack: list[_Node] = []
    root = _Node(changes={}, bound=-np.inf, snapshot=None, token=0, seq=seq)
    stack.append(root)

    def open_bound() -> float:
        vals = [incumbent_obj, min_closed_bound]
        vals.extend(nd.bound for nd in stack)
        if heap:
            vals.append(heap[0][1].bound)
        return min(vals)

    def rel_gap(inc: float, bnd: float) -> float:
        if not np.isfinite(inc):
            return np.inf
        return (inc - bnd) / max(1.0, abs(inc))

    def switch_to(node: _Node) -> None:
        # Apply the node's bound set as a diff, then re-anchor the kernel to
        # the parent's optimal basis unless it already holds it (plunge hit).
        # Starting from an unrelated subtree's basis is not just slow: on the
        # degenerate scheduling masters it lands on different alternate
        # optima and the branching trajectory balloons.
        nonlocal applied, kernel_token
        for v in list(applied):
            if v not in node.changes:
                kern.set_bounds(v, root_lb[v], root_ub[v])
        for v, (lo, hi) in node.changes.items():
            if applied.get(v) != (lo, hi):
                kern.set_bounds(v, lo, hi)
        applied = dict(node.changes)
        if node.token != kernel_token and node.snapshot is not None:
            kern.load_state(*node.snapshot)
            kernel_token = node.token

    status = None
    while True:
        if not stack and not heap:
            status = MilpStatus.OPTIMAL if incumbent_x is not None else MilpStatus.INFEASIBLE
            break
        if incumbent_x is not None and rel_gap(incumbent_obj, open_bound()) <= limits.relative_gap:
            status = MilpStatus.OPTIMAL
            break
        if node_count >= limits.max_nodes or time.perf_counter() - t0 > limits.max_seconds:
            status = MilpStatus.FEASIBLE_WITH_GAP if incumbent_x is not None else MilpStatus.LIMIT_REACHED
            break

        # Plunge the stack first: its top continues from the kernel's
        # current basis, so no refactorization is paid. The heap re-anchors
        # to the best open bound once the plunge dies out.
        if stack:
            node = stack.pop()
        else:
            node = heapq.heappop(heap)[1]

        # A node queued before a better incumbent appeared may be prunable now.
        if incumbent_x is not None and node.bound >= incumbent_obj - limits.relative_gap * max(1.0, abs(incumbent_obj)):
            min_closed_bound = min(min_closed_bound, node.bound)
            continue

        switch_to(node)
        node_count += 1
        # A drifted warm basis can stall or turn numerically singular; one
        # cold solve (bounds persist, only the basis resets) settles whether
        # the node is genuinely hard.
        try:
            kstat = kern.solve()
            retry = kstat == _core.ITERATION_LIMIT
        except np.linalg.LinAlgError:
            retry = True
        if retry:
            kern.reset_cold()
            try:
                kstat = kern.solve()
            except np.linalg.LinAlgError as exc:
                raise NumericalSolveError(
                    f"basis refactorization failed on a cold solve: {exc}") from exc
        token_counter += 1
        kernel_token = token_counter
        if kstat == _core.INFEASIBLE:
            continue
        if kstat == _core.UNBOUNDED:
            raise NumericalSolveError(
                "LP relaxation unbounded; the model violates the finite-bounds contract")
        if kstat == _core.ITERATION_LIMIT:
            raise NumericalSolveError(
                f"simplex stalled beyond the iteration cap at node {node_count}")

        bound = kern.objective()
        node_bound = max(bound, node.bound) if np.isfinite(node.bound) else bound
        if node.branch_var >= 0 and np.isfinite(node.bound):
            # Credit the observed degradation to the branching that made
            # this node; direction 1 means the variable was fixed up.
            d = int(applied[node.branch_var][0] == 1.0)
            pc_sum[d, node.branch_var] += max(bound - node.bound, 0.0) / max(
                node.branch_step, 1e-6)
            pc_cnt[d, node.branch_var] += 1
        accept_tol = limits.relative_gap * max(1.0, abs(incumbent_obj))
        if incumbent_x is not None and node_bound >= incumbent_obj - accept_tol:
            min_closed_bound = min(min_closed_bound, node_bound)
            continue

        x = kern.primal()[: arrays.n]
        rc_fixes: dict = {}
        if incumbent_x is not None and binaries.size:
            # Any binary whose reduced cost exceeds the gap to the incumbent
            # cannot leave its bound in an improving solution below here.
            slack = (incumbent_obj - accept_tol) - node_bound
            rcs = kern.reduced_costs()
            vst = kern.vstat
            for j in binaries:
                lo, hi = node.changes.get(j, (root_lb[j], root_ub[j]))
                if lo == hi:
                    continue
                if vst[j] == _core.AT_LOWER and rcs[j] > slack + 1e-9:
                    rc_fixes[int(j)] = (lo, lo)
                elif vst[j] == _core.AT_UPPER and rcs[j] < -slack - 1e-9:
                    rc_fixes[int(j)] = (hi, hi)

        branch_var = -1
        if binaries.size:
            frac = x[binaries] - np.round(x[binaries])
            open_mask = np.abs(frac) > limits.integrality_tol
            if open_mask.any():
                cand = binaries[open_mask]
                dist_dn = x[cand] - np.floor(x[cand])
                dist_up = 1.0 - dist_dn
                tot_cnt = pc_cnt.sum()
                glob = pc_sum.sum() / tot_cnt if tot_cnt else 1.0
                dn = np.where(pc_cnt[0, cand] > 0,
                              pc_sum[0, cand] / np.maximum(pc_cnt[0, cand], 1),
                              glob)
                up = np.where(pc_cnt[1, cand] > 0,
                              pc_sum[1, cand] / np.maximum(pc_cnt[1, cand], 1),
                              glob)
                score = (np.maximum(dn * dist_dn, 1e-9)
                         * np.maximum(up * dist_up, 1e-9))
                branch_var = int(cand[int(np.argmax(score))])

        if branch_var < 0:
            # Integral point: the LP optimum of this node is an incumbent.
            if bound < incumbent_obj:
                incumbent_obj = bound
                incumbent_x = x.copy()
            min_closed_bound = min(min_closed_bound, node_bound)
            continue

        if model.rounding_hint is not None:
            cand = model.rounding_hint(x.copy())
            if cand is not None:
                cand = np.asarray(cand, dtype=np.float64)
                if _candidate_ok(model, arrays, cand, limits.integrality_tol):
                    cand_obj = float(arrays.c @ cand)
                    if cand_obj < incumbent_obj:
                        incumbent_obj = cand_obj
                        incumbent_x = cand
                    if incumbent_obj <= node_bound + 1e-9:
                        # The hint already attains this subtree's bound.
                        min_closed_bound = min(min_closed_bound, node_bound)
                        continue

        up_first = x[branch_var] >= 0.5
        near = dict(node.changes)
        near.update(rc_fixes)
        far = dict(near)
        step_dn = x[branch_var] - math.floor(x[branch_var])
        if up_first:
            near[branch_var] = (1.0, 1.0)
            far[branch_var] = (0.0, 0.0)
            near_step, far_step = 1.0 - step_dn, step_dn
        else:
            near[branch_var] = (0.0, 0.0)
            far[branch_var] = (1.0, 1.0)
            near_step, far_step = step_dn, 1.0 - step_dn
        snap = kern.snapshot()
        seq += 1
        far_node = _Node(changes=far, bound=node_bound, snapshot=snap,
                         token=token_counter, seq=seq,
                         branch_var=branch_var, branch_step=far_step)
        seq += 1
        near_node = _Node(changes=near, bound=node_bound, snapshot=snap,
                          token=token_counter, seq=seq,
                          branch_var=branch_var, branch_step=near_step)
        if incumbent_x is None:
            stack.append(far_node)
        else:
            heapq.heappush(heap, (far_node.sort_key(), far_node))
        stack.append(near_node)

    wall = time.perf_counter() - t0
    if incumbent_x is None:
        final_bound = min_closed_bound if np.isfinite(min_closed_bound) else np.inf
        return MilpSolution(status=status, objective=None, values=None,
                            bound=float(final_bound), gap=np.inf,
                            node_count=node_count, wall_time=wall)
    final_bound = open_bound()
    return MilpSolution(
        status=status,
        objective=float(incumbent_obj),
        values=incumbent_x,
        bound=float(final_bound),
        gap=float(rel_gap(incumbent_obj, final_bound)),
        node_count=node_count,
        wall_time=wall,
    )


def to_lp_text(model: MilpModel) -> str:
    """Plain-text dump of the model; columns appear in creation order."""
    out = [f"\\ model {model.name}", "minimize"]
    terms = [f"{model.obj[j]:+.12g} {model.var_names[j]}"
             for j in range(model.n_variables) if model.obj[j] != 0.0]
    out.append(" obj: " + (" ".join(terms) if terms else "0"))
    out.append("subject to")
    for row in model.rows:
        body = " ".join(f"{c:+.12g} {model.var_names[j]}"
                        for j, c in zip(row.idx, row.coef))
        out.append(f" {row.name}: {body or '0'} {row.sense} {row.rhs:.12g}")
    out.append("bounds")
    for j, name in enumerate(model.var_names):
        out.append(f" {model.lb[j]:.12g} <= {name} <= {model.ub[j]:.12g}")
    names = [model.var_names[j] for j in model.binary_indices()]
    if names:
        out.append("binary")
        out.append(" " + " ".join(names))
    out.append("end")
    return "\n".join(out) + "\n"
