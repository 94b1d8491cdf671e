"""Decomposition loop coupling the dispatch master to transformer aging.

The master MILP (scheduling.build_model) prices insulation wear through a
single epigraph variable bounded below by accumulated optimality cuts. The
subproblem needs no solver: given the master's exchange profile, the loss of
life over the block and its partials in each hour's loading follow in closed
form from the thermal chain, so each iteration evaluates the true aging cost
Q and emits one supporting hyperplane in the per-hour exchange magnitudes.

Cut geometry: hour t's interval aging depends on the loading ratio held
through t (ultimate, dual mu_t) and the ratio carried in from t-1 (initial,
dual lambda_t). Both ratios are |P_M|/P_nom, so the cut coefficient on hour
t's split magnitude is mu_t + lambda_{t+1}; the trailing lambda leaves the
block and is dropped. At a thermally steady start hour 1's initial ratio is
its own loading, so lambda_1 folds into mu_1. Sensitivity to the carried-in
exchange of a previous block is a constant within the block and never enters
a cut.

Horizons run as consecutive blocks (default one day). Each block converges
on its own cuts, then hands commitment, storage, and exchange state to the
next through scheduling.advance_carry; the reported schedule is the
incumbent attaining the best upper bound in each block.

Bounds: the lower bound is the running maximum of master *bounds* (not
incumbent objectives, which a gap-limited master may leave above its bound);
the upper bound is operation cost plus true aging cost at the incumbent.
With zero insulation weight the subproblem contributes nothing and the loop
exits after one iteration.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import thermal
from .milp import (BranchStats, MilpStatus, NumericalSolveError, SolverLimits,
                   solve_milp)
from .scheduling import (
    AssetFleet,
    BlockCarry,
    OptimalityCut,
    ScheduleSolution,
    advance_carry,
    build_model,
    decode_solution,
    encode_solution,
    initial_carry,
    make_cut,
)

__all__ = [
    "BendersOptions",
    "IterationRecord",
    "CutRecord",
    "BendersResult",
    "InfeasibleScheduleError",
    "evaluate_subproblem",
    "optimize",
]

_LOG = logging.getLogger("gridlife.benders")


class InfeasibleScheduleError(RuntimeError):
    """No feasible dispatch exists for some hour of the horizon."""


@dataclass(frozen=True)
class BendersOptions:
    """Loop controls; defaults match the reference runs."""

    gap_tolerance: float = 1e-4        # relative, on (best UB - LB)
    max_iterations: int = 50           # per block
    block_hours: int = 24
    loading_floor: float = thermal.GRADIENT_FLOOR   # pu, for gradient queries
    master_limits: SolverLimits = field(default_factory=SolverLimits)

    def __post_init__(self) -> None:
        if self.gap_tolerance <= 0.0:
            raise ValueError("gap tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("need at least one iteration")
        if self.block_hours < 1:
            raise ValueError("block must cover at least one hour")
        if self.loading_floor <= 0.0:
            raise ValueError("loading floor must be positive")


@dataclass(frozen=True)
class IterationRecord:
    """One master/subproblem round; bounds are monotone across a block."""

    block: int
    iteration: int
    lower_bound: float        # running max of master bounds
    subproblem_value: float   # Q at this iterate
    upper_bound: float        # operation cost + Q at this iterate
    best_upper_bound: float
    gap: float                # (best UB - LB) / max(1, |best UB|)
    cut_added: bool
    clamped_hours: int        # hours below the gradient loading floor
    master_seconds: float
    subproblem_seconds: float


@dataclass(frozen=True)
class CutRecord:
    """A cut with the iterate it supports, kept for audit."""

    block: int
    iteration: int
    q_hat: float
    anchor: tuple             # split magnitudes |P_M| the cut is tight at
    cut: OptimalityCut


@dataclass(frozen=True)
class BendersResult:
    blocks: tuple             # ScheduleSolution per block (best incumbents)
    exchange: np.ndarray      # signed MW over the full horizon
    loading: np.ndarray       # |exchange| / rated power, pu
    operation_cost: float
    lol_percent: float
    lifetime_years: float
    iterations: tuple         # IterationRecord, in execution order
    cuts: tuple               # CutRecord, in execution order
    termination: str          # "converged" | "iteration-limit"


def evaluate_subproblem(exchange_profile, ambient, params, *,
                        initial_exchange: float | None = None,
                        floor: float = thermal.GRADIENT_FLOOR):
    """Aging cost of an exchange profile and its per-hour loading duals.

    Returns (q_hat, lambda_duals, mu_duals). q_hat is the insulation cost
    psi * lol_percent / 100 over the block at the true loadings; mu_t and
    lambda_t are its partials in hour t's ultimate and initial loading
    ratios, rescaled to per-MW-of-split by psi / (100 * P_nom). Ratios
    below ``floor`` are lifted to it for the gradient query only, where the
    winding rise slope blows up; the value keeps the true ratios.

    ``initial_exchange`` is the signed MW carried into the first hour; None
    means a thermally steady start, folding hour 1's initial-ratio partial
    into mu_1 (its initial ratio then IS its own loading) and zeroing
    lambda_1.
    """
    exch = np.asarray(exchange_profile, dtype=float)
    amb = np.asarray(ambient, dtype=float)
    if exch.shape != amb.shape or exch.ndim != 1 or exch.size == 0:
        raise ValueError("exchange and ambient must be equal-length 1-d series")

    rated = params.rated_power
    k_ult = np.abs(exch) / rated
    k_init = np.empty_like(k_ult)
    k_init[1:] = k_ult[:-1]
    steady = initial_exchange is None
    k_init[0] = k_ult[0] if steady else abs(initial_exchange) / rated

    scale = params.investment_cost / (100.0 * rated)
    total_lol = 0.0
    lam = np.zeros(exch.size)
    mu = np.zeros(exch.size)
    for t in range(exch.size):
        state = thermal.IntervalLoading(
            k_initial=k_init[t], k_ultimate=k_ult[t], ambient=amb[t])
        total_lol += thermal.interval_loss_of_life(state, params).lol_percent
        grad_state = thermal.IntervalLoading(
            k_initial=max(k_init[t], floor),
            k_ultimate=max(k_ult[t], floor),
            ambient=amb[t])
        grad = thermal.loss_gradient(grad_state, params)
        mu[t] = scale * grad.d_lol_d_k_ultimate
        lam[t] = scale * grad.d_lol_d_k_initial
    if steady:
        mu[0] += lam[0]
        lam[0] = 0.0

    q_hat = params.investment_cost * total_lol / 100.0
    return q_hat, lam, mu


def optimize(fleet: AssetFleet, inputs,
             options: BendersOptions | None = None) -> BendersResult:
    """Schedule the horizon block by block, cutting until the gap closes.

    ``inputs`` is the hourly series for the whole horizon; blocks of
    ``options.block_hours`` are solved in order, chained through carry
    state. Raises InfeasibleScheduleError when the master has no feasible
    dispatch, NumericalSolveError when it cannot produce an incumbent.
    """
    if options is None:
        options = BendersOptions()
    hours = tuple(inputs)
    if not hours:
        raise ValueError("empty horizon")
    params = fleet.transformer
    psi = params.investment_cost

    carry = initial_carry(fleet)
    records: list[IterationRecord] = []
    cut_log: list[CutRecord] = []
    blocks: list[ScheduleSolution] = []
    all_converged = True
    # Pseudocosts transfer across masters: cuts only add rows, so the
    # variable layout repeats within a block and across equal-length blocks
    # (ensure() resets the arrays if a trailing short block changes it).
    stats = BranchStats()
    # Anchors worth re-linearizing for the next block: the aging surface
    # changes with ambient and carry, so the cut constants and slopes are
    # recomputed there, but the split profiles that shaped one day remain
    # informative for the next.
    carry_anchors: list[np.ndarray] = []

    for b, start in enumerate(range(0, len(hours), options.block_hours)):
        chunk = hours[start:start + options.block_hours]
        amb = np.array([h.ambient for h in chunk])
        block_carry = carry
        cuts: list[OptimalityCut] = []
        seen_anchors: set[tuple] = set()
        anchors: list[np.ndarray] = []
        best: ScheduleSolution | None = None
        best_ub = math.inf
        lb = -math.inf
        gap = math.inf
        converged = False

        def push_cut(q_val, lam_val, mu_val, anchor, iteration):
            cut = make_cut(q_val, lam_val, mu_val, anchor)
            cuts.append(cut)
            anchors.append(anchor)
            cut_log.append(CutRecord(
                block=b, iteration=iteration, q_hat=q_val,
                anchor=tuple(float(s) for s in anchor), cut=cut))

        # Seed the pool with the previous block's anchors re-linearized
        # under this block's ambient and carry; each is a fresh tangent of
        # this block's aging surface, so validity and anchor tightness are
        # untouched, and the first master already sees the learned shape.
        if psi > 0.0:
            for anchor in carry_anchors:
                if anchor.shape != (len(chunk),):
                    continue
                key = tuple(round(float(s), 12) for s in anchor)
                if key in seen_anchors:
                    continue
                seen_anchors.add(key)
                q_c, lam_c, mu_c = evaluate_subproblem(
                    anchor, amb, params,
                    initial_exchange=block_carry.exchange,
                    floor=options.loading_floor)
                push_cut(q_c, lam_c, mu_c, anchor, 0)

        # The previous block's schedule, re-balanced for this block's hours,
        # is usually still feasible (the solver verifies) and spares the
        # first master an uncapped incumbent hunt.
        seed = blocks[-1] if blocks and blocks[-1].n_hours == len(chunk) else None
        for it in range(1, options.max_iterations + 1):
            t0 = time.perf_counter()
            model, _ = build_model(fleet, chunk, block_carry, cuts)
            # Master proof effort tracks the decomposition gap: proving the
            # bound to 20% of the current gap is enough for the outer loop
            # to contract, and the seeded incumbent carries the previous
            # iterate's exact cost, so even a repeated iterate forces the
            # gap down by a factor of five. The user limit stays the floor;
            # with psi = 0 the single master solve is the whole answer and
            # runs at the floor directly.
            if psi == 0.0:
                rg = options.master_limits.relative_gap
            else:
                rg = min(0.2 * gap, 1e-3) if math.isfinite(gap) else 1e-3
                rg = max(rg, options.master_limits.relative_gap)
            mlimits = replace(options.master_limits, relative_gap=rg)
            # The best schedule seen (this block's, or the previous block's
            # on the first iteration) seeds the master: encode_solution
            # re-balances it against this model and lifts its aging bound
            # onto the cut stack, where its own cut makes the lifted
            # objective equal best_ub exactly, so pruning starts at node 1.
            svec = None if seed is None else encode_solution(
                model, fleet, seed, cuts)
            msol = solve_milp(model, mlimits, incumbent=svec,
                              branch_stats=stats)
            if msol.values is None and msol.status is not MilpStatus.INFEASIBLE:
                # A node cap is an effort budget, not a correctness bound;
                # without an incumbent there is no iterate to cut at, so one
                # uncapped retry settles whether the block is feasible.
                msol = solve_milp(model, replace(mlimits, max_nodes=1_000_000),
                                  incumbent=svec, branch_stats=stats)
            master_s = time.perf_counter() - t0
            if msol.status is MilpStatus.INFEASIBLE:
                raise InfeasibleScheduleError(
                    f"no feasible dispatch in block {b} "
                    f"(hours {start}..{start + len(chunk) - 1})")
            if msol.values is None:
                raise NumericalSolveError(
                    f"master gave no incumbent in block {b} "
                    f"(status {msol.status.value})")
            lb = max(lb, msol.bound)

            t1 = time.perf_counter()
            dec = decode_solution(model, msol.values, fleet)
            q_hat, lam, mu = evaluate_subproblem(
                dec.exchange, amb, params,
                initial_exchange=block_carry.exchange,
                floor=options.loading_floor)
            sub_s = time.perf_counter() - t1

            ub = dec.operation_cost + q_hat
            if ub < best_ub:
                best_ub = ub
                best = dec
                seed = dec
            gap = (best_ub - lb) / max(1.0, abs(best_ub))
            clamped = int(np.count_nonzero(
                np.abs(dec.exchange) / params.rated_power
                < options.loading_floor))

            done = gap <= options.gap_tolerance or psi == 0.0
            added = False
            if not done and it < options.max_iterations:
                # A coarsened master may hand back the seeded iterate; its
                # cut is already in the stack, so only the anchor set grows
                # the model.
                anchor = dec.export_part + dec.import_part
                key = tuple(round(float(s), 12) for s in anchor)
                if key not in seen_anchors:
                    seen_anchors.add(key)
                    push_cut(q_hat, lam, mu, anchor, it)
                    added = True
            records.append(IterationRecord(
                block=b, iteration=it, lower_bound=lb,
                subproblem_value=q_hat, upper_bound=ub,
                best_upper_bound=best_ub, gap=gap, cut_added=added,
                clamped_hours=clamped, master_seconds=master_s,
                subproblem_seconds=sub_s))
            _LOG.info("block %d iter %02d  lb %.6f  ub %.6f  gap %.3e  cuts %d",
                      b, it, lb, best_ub, gap, len(cuts))
            if done:
                converged = True
                break

        if not converged:
            all_converged = False
        assert best is not None
        blocks.append(best)
        carry = advance_carry(fleet, carry, best)
        # Most recent profiles first; 32 rows bounds the pool growth while
        # keeping every anchor a short horizon can have produced.
        carry_anchors = anchors[-32:]

    exchange = np.concatenate([s.exchange for s in blocks])
    amb_all = np.array([h.ambient for h in hours])
    lol, life = thermal.horizon_loss_of_life(np.abs(exchange), amb_all, params)
    return BendersResult(
        blocks=tuple(blocks),
        exchange=exchange,
        loading=np.abs(exchange) / params.rated_power,
        operation_cost=float(sum(s.operation_cost for s in blocks)),
        lol_percent=lol,
        lifetime_years=life,
        iterations=tuple(records),
        cuts=tuple(cut_log),
        termination="converged" if all_converged else "iteration-limit",
    )
