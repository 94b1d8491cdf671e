"""Bounded-variable revised simplex, pure numpy implementation.

This is the reference kernel: a dense explicit basis inverse maintained by
rank-1 updates with scheduled refactorization, a composite (infeasibility
priced) primal phase 1, a Dantzig phase 2 with an automatic permanent switch
to Bland's rule when the objective stalls, and a dual simplex used both for
warm restarts after bound changes and for cold starts whenever a
dual-feasible bound placement exists.

The compiled kernel (_simplex.pyx) implements the same algorithm with the
same pivot rules; this module is selected when the extension is unavailable
or when GRIDLIFE_BACKEND=python.

Problem form: minimize c.x over A x + s = b with box bounds on the
structural variables x and on the row slacks s (senses are encoded as slack
bounds by the caller). Variables are indexed structurals first, slacks after.
"""

from __future__ import annotations

import numpy as np

# Solve statuses shared by both kernels.
OPTIMAL = 0
INFEASIBLE = 1
UNBOUNDED = 2
ITERATION_LIMIT = 3

# Nonbasic/basic variable states.
AT_LOWER = 0
AT_UPPER = 1
BASIC = 2
FREE = 3

FEAS_TOL = 1e-9
DUAL_TOL = 1e-9
PIVOT_TOL = 1e-10
DUAL_PIVOT_TOL = 1e-7   # dual entering eligibility; updates divide by this
RATIO_TIE = 1e-12
REFACTOR_EVERY = 120
STALL_LIMIT = 300


class DenseSimplex:
    """One LP instance with mutable bounds and a persistent basis.

    The instance survives bound changes, which is how branch-and-bound
    children reuse the parent basis: change a bound, call solve(), and the
    dual simplex repairs primal feasibility from the current basis.
    """

    def __init__(self, a, b, c, lb, ub):
        a = np.ascontiguousarray(a, dtype=np.float64)
        self.m, self.n = a.shape
        self.nt = self.n + self.m
        self.a = a
        self.b = np.asarray(b, dtype=np.float64).copy()
        self.c = np.zeros(self.nt)
        self.c[: self.n] = np.asarray(c, dtype=np.float64)
        self.lb = np.asarray(lb, dtype=np.float64).copy()
        self.ub = np.asarray(ub, dtype=np.float64).copy()
        if self.lb.shape != (self.nt,) or self.ub.shape != (self.nt,):
            raise ValueError("bounds must cover structurals plus one slack per row")
        self.basis = np.arange(self.n, self.n + self.m, dtype=np.int64)
        self.vstat = np.empty(self.nt, dtype=np.int8)
        self.binv = np.eye(self.m)
        self.x = np.zeros(self.nt)
        self.last_iterations = 0
        self._bland = False
        self._pivots_since_refactor = 0
        self._have_basis = False

    # ------------------------------------------------------------------ setup

    def reset_cold(self):
        """Slack basis with structurals placed at their cost-favorable bounds."""
        self.basis = np.arange(self.n, self.n + self.m, dtype=np.int64)
        self.binv = np.eye(self.m)
        lo_fin = np.isfinite(self.lb)
        up_fin = np.isfinite(self.ub)
        stat = np.full(self.nt, FREE, dtype=np.int8)
        prefer_up = (self.c < 0.0) & up_fin
        stat[up_fin] = AT_UPPER
        stat[lo_fin] = AT_LOWER
        stat[prefer_up] = AT_UPPER
        stat[self.basis] = BASIC
        self.vstat = stat
        self._bland = False
        self._have_basis = True

    def load_state(self, basis, vstat):
        """Adopt a basis/status snapshot (e.g. the parent node's optimum)."""
        self.basis = np.asarray(basis, dtype=np.int64).copy()
        self.vstat = np.asarray(vstat, dtype=np.int8).copy()
        self._refactor()
        self._bland = False
        self._have_basis = True

    def snapshot(self):
        return self.basis.copy(), self.vstat.copy()

    def set_bounds(self, j, lo, hi):
        self.lb[j] = lo
        self.ub[j] = hi

    # ------------------------------------------------------------ linear algebra

    def _column(self, j):
        if j < self.n:
            return self.a[:, j]
        col = np.zeros(self.m)
        col[j - self.n] = 1.0
        return col

    def _ftran(self, j):
        if j < self.n:
            return self.binv @ self.a[:, j]
        return self.binv[:, j - self.n].copy()

    def _refactor(self):
        bmat = np.empty((self.m, self.m))
        for k, j in enumerate(self.basis):
            bmat[:, k] = self._column(j)
        self.binv = np.linalg.inv(bmat)
        self._pivots_since_refactor = 0

    def _recompute_x(self):
        """Nonbasic values from status, basic values by solving with the inverse."""
        x = np.where(self.vstat == AT_UPPER, self.ub, self.lb)
        x[~np.isfinite(x)] = 0.0
        x[self.vstat == FREE] = 0.0
        x[self.basis] = 0.0
        r = self.b - self.a @ x[: self.n]
        r -= x[self.n:]
        x[self.basis] = self.binv @ r
        self.x = x

    def _update_binv(self, w, r):
        piv = w[r]
        self.binv[r] /= piv
        scale = w.copy()
        scale[r] = 0.0
        self.binv -= np.outer(scale, self.binv[r])
        self._pivots_since_refactor += 1
        if self._pivots_since_refactor >= REFACTOR_EVERY:
            self._refactor()
            self._recompute_x()

    def _reduced_costs(self, crow):
        """Reduced costs for objective ``crow`` restricted to basic entries."""
        y = self.binv.T @ crow
        d = np.empty(self.nt)
        d[: self.n] = -(self.a.T @ y)
        d[self.n:] = -y
        d += self.c_active
        return d, y

    # ------------------------------------------------------------------ solve

    def solve(self, max_iter=0):
        """Optimize from the current state; dispatches primal/dual as needed."""
        if max_iter <= 0:
            max_iter = 200 * (self.m + self.n) + 10000
        if not self._have_basis:
            self.reset_cold()
        # Factors within the refactor cadence are trusted as-is; the pivot
        # loops refresh them on schedule and the optimal exit refactors.
        self._recompute_x()
        self.last_iterations = 0

        if self._primal_infeasibility() > FEAS_TOL and self._dual_feasible():
            status = self._dual(max_iter)
            if status == INFEASIBLE:
                return status
        # Primal phases finish the job (and are a no-op at an optimum).
        status = self._primal(max_iter)
        if status == OPTIMAL:
            self._refactor()
            self._recompute_x()
        return status

    def _primal_infeasibility(self):
        xb = self.x[self.basis]
        lo = self.lb[self.basis]
        hi = self.ub[self.basis]
        return float(np.sum(np.maximum(lo - xb, 0.0) + np.maximum(xb - hi, 0.0)))

    def _dual_feasible(self):
        self.c_active = self.c
        d, _ = self._reduced_costs(self.c[self.basis])
        bad_lo = (self.vstat == AT_LOWER) & (d < -DUAL_TOL) & (self.lb < self.ub)
        bad_up = (self.vstat == AT_UPPER) & (d > DUAL_TOL) & (self.lb < self.ub)
        bad_fr = (self.vstat == FREE) & (np.abs(d) > DUAL_TOL)
        return not (bad_lo.any() or bad_up.any() or bad_fr.any())

    # ------------------------------------------------------------------ primal

    def _primal(self, max_iter):
        stall = 0
        while self.last_iterations < max_iter:
            self.last_iterations += 1
            xb = self.x[self.basis]
            lob = self.lb[self.basis]
            upb = self.ub[self.basis]
            below = xb < lob - FEAS_TOL
            above = xb > upb + FEAS_TOL
            phase1 = bool(below.any() or above.any())

            if phase1:
                crow = np.zeros(self.m)
                crow[below] = -1.0
                crow[above] = 1.0
                self.c_active = np.zeros(self.nt)
            else:
                crow = self.c[self.basis]
                self.c_active = self.c
            d, _ = self._reduced_costs(crow)

            q = self._primal_entering(d)
            if q < 0:
                if phase1:
                    return INFEASIBLE
                return OPTIMAL

            sigma = 1.0
            if self.vstat[q] == AT_UPPER or (self.vstat[q] == FREE and d[q] > 0.0):
                sigma = -1.0
            w = self._ftran(q)
            wt = sigma * w

            t, row, bound_code = self._primal_ratio(wt, below, above, phase1)
            flip = np.inf
            if np.isfinite(self.lb[q]) and np.isfinite(self.ub[q]):
                flip = self.ub[q] - self.lb[q]

            if not np.isfinite(t) and not np.isfinite(flip):
                if phase1:
                    # An improving phase-1 direction always has a blocking
                    # out-of-bound row in exact arithmetic; reaching this
                    # point means tolerance noise, not unboundedness.
                    self._bland = True
                    continue
                return UNBOUNDED

            if flip < t:
                # Entering variable jumps to its other bound, basis unchanged.
                self.x[q] += sigma * flip
                self.x[self.basis] = self.x[self.basis] - wt * flip
                self.vstat[q] = AT_UPPER if self.vstat[q] == AT_LOWER else AT_LOWER
                step = flip
            else:
                leave = self.basis[row]
                self.x[q] += sigma * t
                self.x[self.basis] = self.x[self.basis] - wt * t
                self.x[leave] = self.lb[leave] if bound_code == 0 else self.ub[leave]
                self.vstat[leave] = AT_LOWER if bound_code == 0 else AT_UPPER
                self.vstat[q] = BASIC
                self.basis[row] = q
                self._update_binv(w, row)
                step = t

            if step <= RATIO_TIE:
                stall += 1
                if stall >= STALL_LIMIT:
                    self._bland = True
            else:
                stall = 0
        return ITERATION_LIMIT

    def _primal_entering(self, d):
        movable = self.lb < self.ub
        viol = np.zeros(self.nt)
        lo_mask = (self.vstat == AT_LOWER) & movable & (d < -DUAL_TOL)
        up_mask = (self.vstat == AT_UPPER) & movable & (d > DUAL_TOL)
        fr_mask = (self.vstat == FREE) & (np.abs(d) > DUAL_TOL)
        viol[lo_mask] = -d[lo_mask]
        viol[up_mask] = d[up_mask]
        viol[fr_mask] = np.abs(d[fr_mask])
        if not viol.any():
            return -1
        if self._bland:
            return int(np.flatnonzero(viol > 0.0)[0])
        return int(np.argmax(viol))

    def _primal_ratio(self, wt, below, above, phase1):
        """Blocking step along +wt. Returns (t, row, bound_code 0=lb/1=ub)."""
        xb = self.x[self.basis]
        lob = self.lb[self.basis]
        upb = self.ub[self.basis]
        t = np.full(self.m, np.inf)
        code = np.zeros(self.m, dtype=np.int8)

        feas = ~(below | above)
        mask = feas & (wt > PIVOT_TOL) & np.isfinite(lob)
        t[mask] = (xb[mask] - lob[mask]) / wt[mask]
        mask = feas & (wt < -PIVOT_TOL) & np.isfinite(upb)
        t[mask] = (xb[mask] - upb[mask]) / wt[mask]
        code[mask] = 1
        if phase1:
            # Out-of-bound rows block at the bound they are violating, which
            # both restores their feasibility and keeps the measure monotone.
            mask = below & (wt < -PIVOT_TOL)
            t[mask] = (xb[mask] - lob[mask]) / wt[mask]
            code[mask] = 0
            mask = above & (wt > PIVOT_TOL)
            t[mask] = (xb[mask] - upb[mask]) / wt[mask]
            code[mask] = 1
        np.maximum(t, 0.0, out=t)

        tmin = t.min() if self.m else np.inf
        if not np.isfinite(tmin):
            return np.inf, -1, 0
        cands = np.flatnonzero(t <= tmin + RATIO_TIE)
        if self._bland:
            row = int(cands[np.argmin(self.basis[cands])])
        else:
            row = int(cands[np.argmax(np.abs(wt[cands]))])
        return float(t[row]), row, int(code[row])

    # -------------------------------------------------------------------- dual

    def _dual(self, max_iter):
        stall = 0
        self.c_active = self.c
        while self.last_iterations < max_iter:
            self.last_iterations += 1
            xb = self.x[self.basis]
            lob = self.lb[self.basis]
            upb = self.ub[self.basis]
            below = np.maximum(lob - xb, 0.0)
            above = np.maximum(xb - upb, 0.0)
            viol = np.maximum(below, above)
            if viol.max() <= FEAS_TOL:
                return OPTIMAL
            if self._bland:
                row = int(np.flatnonzero(viol > FEAS_TOL)[0])
            else:
                row = int(np.argmax(viol))
            sigma = 1.0 if above[row] > below[row] else -1.0

            rho = self.binv[row]
            alpha = np.empty(self.nt)
            alpha[: self.n] = self.a.T @ rho
            alpha[self.n:] = rho
            abar = sigma * alpha

            d, _ = self._reduced_costs(self.c[self.basis])
            movable = (self.lb < self.ub) & (self.vstat != BASIC)
            may_up = movable & ((self.vstat == AT_LOWER) | (self.vstat == FREE))
            may_dn = movable & ((self.vstat == AT_UPPER) | (self.vstat == FREE))
            cand = (may_up & (abar > DUAL_PIVOT_TOL)) | (may_dn & (abar < -DUAL_PIVOT_TOL))
            if not cand.any():
                # Dual unboundedness read off stale factors is not trustworthy.
                if self._pivots_since_refactor:
                    self._refactor()
                    self._recompute_x()
                    continue
                if ((may_up & (abar > PIVOT_TOL)) | (may_dn & (abar < -PIVOT_TOL))).any():
                    # Only pivots too small to divide by remain; updating on
                    # one would wreck the factorization, so hand over to the
                    # primal phases, which settle feasibility soundly.
                    return OPTIMAL
                return INFEASIBLE
            ratio = np.full(self.nt, np.inf)
            ratio[cand] = d[cand] / abar[cand]
            np.maximum(ratio, 0.0, out=ratio)
            rmin = ratio.min()
            ties = np.flatnonzero(ratio <= rmin + RATIO_TIE)
            if self._bland:
                q = int(ties[0])
            else:
                q = int(ties[np.argmax(np.abs(abar[ties]))])

            w = self._ftran(q)
            # The btran-priced pivot must agree with the ftran one; a tiny or
            # inconsistent value here would corrupt the basis update.
            if abs(w[row]) <= PIVOT_TOL or \
                    abs(w[row] - alpha[q]) > 1e-6 * (1.0 + abs(alpha[q])):
                if self._pivots_since_refactor:
                    self._refactor()
                    self._recompute_x()
                    continue
                return OPTIMAL   # let the primal phases finish from here
            leave = self.basis[row]
            target = self.ub[leave] if sigma > 0.0 else self.lb[leave]
            delta = (xb[row] - target) / w[row]
            self.x[q] += delta
            self.x[self.basis] = self.x[self.basis] - w * delta
            self.x[leave] = target
            self.vstat[leave] = AT_UPPER if sigma > 0.0 else AT_LOWER
            self.vstat[q] = BASIC
            self.basis[row] = q
            self._update_binv(w, row)

            if abs(delta) <= RATIO_TIE:
                stall += 1
                if stall >= STALL_LIMIT:
                    self._bland = True
            else:
                stall = 0
        return ITERATION_LIMIT

    # ------------------------------------------------------------------ output

    def objective(self):
        return float(self.c @ self.x)

    def primal(self):
        return self.x.copy()

    def duals(self):
        """Row duals: objective change per unit increase of each rhs."""
        return self.binv.T @ self.c[self.basis]

    def reduced_costs(self):
        self.c_active = self.c
        d, _ = self._reduced_costs(self.c[self.basis])
        return d
