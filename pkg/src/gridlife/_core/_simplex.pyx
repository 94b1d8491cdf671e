# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Bounded-variable revised simplex, compiled kernel.

Same algorithm and pivot rules as simplex_py.DenseSimplex; that module holds
the algorithm notes. Here the per-pivot dense operations go through BLAS on
the row-major buffers, exploiting the row/column-major transpose duality:

- binv is stored row-major, so the same memory read column-major is binv^T.
  dgemv(trans='T') therefore applies binv and dgemv(trans='N') applies
  binv^T without any copies.
- the constraint matrix is row-major (m, n); read column-major with lda=n it
  is the (n, m) transpose, so one dgemv prices every structural column.
- refactorization fills the binv buffer with B in row-major order (LAPACK
  sees B^T), then dgetrf+dgetri invert in place; the buffer afterwards holds
  (B^T)^-1 column-major, which is exactly B^-1 row-major.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, fabs, isfinite
from libc.string cimport memset
from scipy.linalg.cython_blas cimport dcopy, dgemv, dger, dscal
from scipy.linalg.cython_lapack cimport dgetrf, dgetri

cnp.import_array()

OPTIMAL = 0
INFEASIBLE = 1
UNBOUNDED = 2
ITERATION_LIMIT = 3

AT_LOWER = 0
AT_UPPER = 1
BASIC = 2
FREE = 3

FEAS_TOL = 1e-9
DUAL_TOL = 1e-9
PIVOT_TOL = 1e-10
RATIO_TIE = 1e-12
REFACTOR_EVERY = 120
STALL_LIMIT = 300

cdef enum:
    _OPTIMAL = 0
    _INFEASIBLE = 1
    _UNBOUNDED = 2
    _ITERATION_LIMIT = 3
    _AT_LOWER = 0
    _AT_UPPER = 1
    _BASIC = 2
    _FREE = 3
    _REFACTOR_EVERY = 120
    _STALL_LIMIT = 300

cdef double _FEAS_TOL = 1e-9
cdef double _DUAL_TOL = 1e-9
cdef double _PIVOT_TOL = 1e-10
cdef double _DUAL_PIVOT_TOL = 1e-7
cdef double _RATIO_TIE = 1e-12


cdef class DenseSimplex:
    """One LP instance with mutable bounds and a persistent basis.

    Mirrors simplex_py.DenseSimplex: change a bound, call solve(), and the
    dual simplex repairs primal feasibility from the current basis.
    """

    cdef readonly Py_ssize_t m, n, nt
    cdef public int last_iterations
    cdef readonly cnp.ndarray a, b, c, lb, ub, basis, vstat, binv, x
    cdef double[:, ::1] av, binvv
    cdef double[::1] bv, cv, lbv, ubv, xv
    cdef cnp.int64_t[::1] basisv
    cdef cnp.int8_t[::1] vstatv
    cdef bint _bland, _have_basis
    cdef int _pivots_since_refactor
    # scratch (allocated once; methods are not reentrant)
    cdef double[::1] w, wt, d, y, crow, alpha, rbuf, pivrow, tarr, lwork
    cdef cnp.int8_t[::1] codearr, belowv, abovev, candv
    cdef int[::1] ipiv

    def __init__(self, a, b, c, lb, ub):
        a = np.ascontiguousarray(a, dtype=np.float64)
        self.m, self.n = a.shape
        self.nt = self.n + self.m
        lb_arr = np.asarray(lb, dtype=np.float64).copy()
        ub_arr = np.asarray(ub, dtype=np.float64).copy()
        if lb_arr.shape != (self.nt,) or ub_arr.shape != (self.nt,):
            raise ValueError("bounds must cover structurals plus one slack per row")
        cfull = np.zeros(self.nt)
        cfull[: self.n] = np.asarray(c, dtype=np.float64)
        self.a = a
        self.b = np.asarray(b, dtype=np.float64).copy()
        self.c = cfull
        self.lb = lb_arr
        self.ub = ub_arr
        self.basis = np.arange(self.n, self.n + self.m, dtype=np.int64)
        self.vstat = np.empty(self.nt, dtype=np.int8)
        self.binv = np.eye(self.m)
        self.x = np.zeros(self.nt)
        self.last_iterations = 0
        self._bland = False
        self._pivots_since_refactor = 0
        self._have_basis = False

        self.av = self.a
        self.bv = self.b
        self.cv = self.c
        self.lbv = self.lb
        self.ubv = self.ub
        self.basisv = self.basis
        self.vstatv = self.vstat
        self.binvv = self.binv
        self.xv = self.x

        self.w = np.empty(self.m)
        self.wt = np.empty(self.m)
        self.y = np.empty(self.m)
        self.crow = np.empty(self.m)
        self.rbuf = np.empty(self.m)
        self.pivrow = np.empty(self.m)
        self.tarr = np.empty(self.m)
        self.d = np.empty(self.nt)
        self.alpha = np.empty(self.nt)
        self.codearr = np.empty(self.m, dtype=np.int8)
        self.belowv = np.empty(self.m, dtype=np.int8)
        self.abovev = np.empty(self.m, dtype=np.int8)
        self.candv = np.empty(self.nt, dtype=np.int8)
        self.ipiv = np.empty(max(self.m, 1), dtype=np.intc)
        self.lwork = np.empty(max(64 * self.m, 1))

    # ------------------------------------------------------------------ setup

    def reset_cold(self):
        """Slack basis with structurals placed at their cost-favorable bounds."""
        cdef Py_ssize_t i, j
        cdef bint lo_fin, up_fin
        for i in range(self.m):
            self.basisv[i] = self.n + i
        if self.m:
            memset(&self.binvv[0, 0], 0, self.m * self.m * sizeof(double))
            for i in range(self.m):
                self.binvv[i, i] = 1.0
        for j in range(self.nt):
            lo_fin = isfinite(self.lbv[j])
            up_fin = isfinite(self.ubv[j])
            if self.cv[j] < 0.0 and up_fin:
                self.vstatv[j] = _AT_UPPER
            elif lo_fin:
                self.vstatv[j] = _AT_LOWER
            elif up_fin:
                self.vstatv[j] = _AT_UPPER
            else:
                self.vstatv[j] = _FREE
        for i in range(self.m):
            self.vstatv[self.n + i] = _BASIC
        self._bland = False
        self._pivots_since_refactor = 0
        self._have_basis = True

    def load_state(self, basis, vstat):
        """Adopt a basis/status snapshot (e.g. the parent node's optimum)."""
        cdef cnp.int64_t[::1] bsrc = np.ascontiguousarray(basis, dtype=np.int64)
        cdef cnp.int8_t[::1] vsrc = np.ascontiguousarray(vstat, dtype=np.int8)
        if bsrc.shape[0] != self.m or vsrc.shape[0] != self.nt:
            raise ValueError("snapshot shape does not match the model")
        cdef Py_ssize_t i
        for i in range(self.m):
            self.basisv[i] = bsrc[i]
        for i in range(self.nt):
            self.vstatv[i] = vsrc[i]
        self._refactor()
        self._bland = False
        self._have_basis = True

    def snapshot(self):
        return self.basis.copy(), self.vstat.copy()

    def set_bounds(self, Py_ssize_t j, double lo, double hi):
        self.lbv[j] = lo
        self.ubv[j] = hi

    # ------------------------------------------------------------ linear algebra

    cdef void _ftran(self, Py_ssize_t q):
        """w = binv @ column(q)."""
        cdef int mm = <int> self.m, inc1 = 1, incn = <int> self.n
        cdef double one = 1.0, zero = 0.0
        cdef char tT = b'T'
        if self.m == 0:
            return
        if q < self.n:
            dgemv(&tT, &mm, &mm, &one, &self.binvv[0, 0], &mm,
                  &self.av[0, q], &incn, &zero, &self.w[0], &inc1)
        else:
            dcopy(&mm, &self.binvv[0, q - self.n], &mm, &self.w[0], &inc1)

    cdef void _refactor(self):
        cdef Py_ssize_t k, i, j
        cdef int mm = <int> self.m, info = 0, lw = <int> self.lwork.shape[0]
        if self.m == 0:
            self._pivots_since_refactor = 0
            return
        memset(&self.binvv[0, 0], 0, self.m * self.m * sizeof(double))
        for k in range(self.m):
            j = self.basisv[k]
            if j < self.n:
                for i in range(self.m):
                    self.binvv[i, k] = self.av[i, j]
            else:
                self.binvv[j - self.n, k] = 1.0
        dgetrf(&mm, &mm, &self.binvv[0, 0], &mm, &self.ipiv[0], &info)
        if info == 0:
            dgetri(&mm, &self.binvv[0, 0], &mm, &self.ipiv[0],
                   &self.lwork[0], &lw, &info)
        if info != 0:
            raise np.linalg.LinAlgError("singular basis matrix")
        self._pivots_since_refactor = 0

    cdef void _recompute_x(self):
        """Nonbasic values from status, basic values by solving with the inverse."""
        cdef Py_ssize_t i, j
        cdef double v
        cdef int st
        cdef int mm = <int> self.m, nn = <int> self.n, inc1 = 1
        cdef double one = 1.0, neg1 = -1.0, zero = 0.0
        cdef char tT = b'T'
        for j in range(self.nt):
            st = self.vstatv[j]
            if st == _AT_UPPER:
                v = self.ubv[j]
            elif st == _AT_LOWER:
                v = self.lbv[j]
            else:
                v = 0.0
            if not isfinite(v):
                v = 0.0
            self.xv[j] = v
        for i in range(self.m):
            self.xv[self.basisv[i]] = 0.0
        for i in range(self.m):
            self.rbuf[i] = self.bv[i] - self.xv[self.n + i]
        if self.m and self.n:
            # rbuf -= a @ x[:n]; the (n, m) column-major view of a is a^T,
            # so trans='T' applies a itself.
            dgemv(&tT, &nn, &mm, &neg1, &self.av[0, 0], &nn,
                  &self.xv[0], &inc1, &one, &self.rbuf[0], &inc1)
        if self.m:
            dgemv(&tT, &mm, &mm, &one, &self.binvv[0, 0], &mm,
                  &self.rbuf[0], &inc1, &zero, &self.w[0], &inc1)
        for i in range(self.m):
            self.xv[self.basisv[i]] = self.w[i]

    cdef void _update_binv(self, Py_ssize_t r):
        """Rank-1 basis inverse update; self.w holds the entering column."""
        cdef int mm = <int> self.m, inc1 = 1
        cdef double inv_piv = 1.0 / self.w[r], neg1 = -1.0, save
        dscal(&mm, &inv_piv, &self.binvv[r, 0], &inc1)
        # dger on the column-major (transposed) view: binv[j,:] -= w[j]*pivrow.
        # The pivot row is copied out first so no aliasing reaches BLAS.
        dcopy(&mm, &self.binvv[r, 0], &inc1, &self.pivrow[0], &inc1)
        save = self.w[r]
        self.w[r] = 0.0
        dger(&mm, &mm, &neg1, &self.pivrow[0], &inc1, &self.w[0], &inc1,
             &self.binvv[0, 0], &mm)
        self.w[r] = save
        self._pivots_since_refactor += 1
        if self._pivots_since_refactor >= _REFACTOR_EVERY:
            self._refactor()
            self._recompute_x()

    cdef void _reduced_costs(self, bint phase1):
        """d = c_active - A^T y with y = binv^T @ crow; crow set by the caller."""
        cdef int mm = <int> self.m, nn = <int> self.n, inc1 = 1
        cdef double one = 1.0, neg1 = -1.0, zero = 0.0
        cdef char tN = b'N'
        cdef Py_ssize_t j
        if self.m:
            dgemv(&tN, &mm, &mm, &one, &self.binvv[0, 0], &mm,
                  &self.crow[0], &inc1, &zero, &self.y[0], &inc1)
        if self.n:
            if self.m:
                dgemv(&tN, &nn, &mm, &neg1, &self.av[0, 0], &nn,
                      &self.y[0], &inc1, &zero, &self.d[0], &inc1)
            else:
                memset(&self.d[0], 0, self.n * sizeof(double))
        for j in range(self.m):
            self.d[self.n + j] = -self.y[j]
        if not phase1:
            for j in range(self.nt):
                self.d[j] += self.cv[j]

    # ------------------------------------------------------------------ solve

    def solve(self, max_iter=0):
        """Optimize from the current state; dispatches primal/dual as needed."""
        cdef int mi = int(max_iter)
        if mi <= 0:
            mi = 200 * (self.m + self.n) + 10000
        if not self._have_basis:
            self.reset_cold()
        # Factors within the refactor cadence are trusted as-is; the pivot
        # loops refresh them on schedule and the optimal exit refactors.
        self._recompute_x()
        self.last_iterations = 0

        cdef int status
        if self._primal_infeasibility() > _FEAS_TOL and self._dual_feasible():
            status = self._dual(mi)
            if status == _INFEASIBLE:
                return status
        # Primal phases finish the job (and are a no-op at an optimum).
        status = self._primal(mi)
        if status == _OPTIMAL:
            self._refactor()
            self._recompute_x()
        return status

    cdef double _primal_infeasibility(self):
        cdef Py_ssize_t i, j
        cdef double s = 0.0, xb
        for i in range(self.m):
            j = self.basisv[i]
            xb = self.xv[j]
            if xb < self.lbv[j]:
                s += self.lbv[j] - xb
            if xb > self.ubv[j]:
                s += xb - self.ubv[j]
        return s

    cdef bint _dual_feasible(self):
        cdef Py_ssize_t i, j
        cdef int st
        for i in range(self.m):
            self.crow[i] = self.cv[self.basisv[i]]
        self._reduced_costs(False)
        for j in range(self.nt):
            st = self.vstatv[j]
            if st == _AT_LOWER:
                if self.d[j] < -_DUAL_TOL and self.lbv[j] < self.ubv[j]:
                    return False
            elif st == _AT_UPPER:
                if self.d[j] > _DUAL_TOL and self.lbv[j] < self.ubv[j]:
                    return False
            elif st == _FREE:
                if fabs(self.d[j]) > _DUAL_TOL:
                    return False
        return True

    # ------------------------------------------------------------------ primal

    cdef int _primal(self, int max_iter):
        cdef int stall = 0, bound_code
        cdef Py_ssize_t i, j, q, row, leave
        cdef bint phase1
        cdef double xb, sigma, t, flip, step
        while self.last_iterations < max_iter:
            self.last_iterations += 1
            phase1 = False
            for i in range(self.m):
                j = self.basisv[i]
                xb = self.xv[j]
                self.belowv[i] = xb < self.lbv[j] - _FEAS_TOL
                self.abovev[i] = xb > self.ubv[j] + _FEAS_TOL
                if self.belowv[i] or self.abovev[i]:
                    phase1 = True
            if phase1:
                for i in range(self.m):
                    if self.belowv[i]:
                        self.crow[i] = -1.0
                    elif self.abovev[i]:
                        self.crow[i] = 1.0
                    else:
                        self.crow[i] = 0.0
            else:
                for i in range(self.m):
                    self.crow[i] = self.cv[self.basisv[i]]
            self._reduced_costs(phase1)

            q = self._primal_entering()
            if q < 0:
                if phase1:
                    return _INFEASIBLE
                return _OPTIMAL

            sigma = 1.0
            if self.vstatv[q] == _AT_UPPER or (self.vstatv[q] == _FREE and self.d[q] > 0.0):
                sigma = -1.0
            self._ftran(q)
            for i in range(self.m):
                self.wt[i] = sigma * self.w[i]

            bound_code = self._primal_ratio(phase1, &t, &row)
            flip = INFINITY
            if isfinite(self.lbv[q]) and isfinite(self.ubv[q]):
                flip = self.ubv[q] - self.lbv[q]

            if not isfinite(t) and not isfinite(flip):
                if phase1:
                    # An improving phase-1 direction always has a blocking
                    # out-of-bound row in exact arithmetic; reaching this
                    # point means tolerance noise, not unboundedness.
                    self._bland = True
                    continue
                return _UNBOUNDED

            if flip < t:
                # Entering variable jumps to its other bound, basis unchanged.
                self.xv[q] += sigma * flip
                for i in range(self.m):
                    self.xv[self.basisv[i]] -= self.wt[i] * flip
                self.vstatv[q] = _AT_UPPER if self.vstatv[q] == _AT_LOWER else _AT_LOWER
                step = flip
            else:
                leave = self.basisv[row]
                self.xv[q] += sigma * t
                for i in range(self.m):
                    self.xv[self.basisv[i]] -= self.wt[i] * t
                self.xv[leave] = self.lbv[leave] if bound_code == 0 else self.ubv[leave]
                self.vstatv[leave] = _AT_LOWER if bound_code == 0 else _AT_UPPER
                self.vstatv[q] = _BASIC
                self.basisv[row] = q
                self._update_binv(row)
                step = t

            if step <= _RATIO_TIE:
                stall += 1
                if stall >= _STALL_LIMIT:
                    self._bland = True
            else:
                stall = 0
        return _ITERATION_LIMIT

    cdef Py_ssize_t _primal_entering(self):
        cdef Py_ssize_t j, best = -1
        cdef double v, bestv = 0.0
        cdef int st
        for j in range(self.nt):
            st = self.vstatv[j]
            if st == _AT_LOWER:
                if self.lbv[j] < self.ubv[j] and self.d[j] < -_DUAL_TOL:
                    v = -self.d[j]
                else:
                    continue
            elif st == _AT_UPPER:
                if self.lbv[j] < self.ubv[j] and self.d[j] > _DUAL_TOL:
                    v = self.d[j]
                else:
                    continue
            elif st == _FREE:
                if fabs(self.d[j]) > _DUAL_TOL:
                    v = fabs(self.d[j])
                else:
                    continue
            else:
                continue
            if self._bland:
                return j
            if v > bestv:
                bestv = v
                best = j
        return best

    cdef int _primal_ratio(self, bint phase1, double *t_out, Py_ssize_t *row_out):
        """Blocking step along +wt. Fills *t_out/*row_out, returns bound code."""
        cdef Py_ssize_t i, j, row = -1
        cdef double xb, lo, hi, wv, ti, tmin = INFINITY, bestw = -1.0
        cdef cnp.int64_t bestj
        cdef int code_i
        for i in range(self.m):
            j = self.basisv[i]
            xb = self.xv[j]
            lo = self.lbv[j]
            hi = self.ubv[j]
            wv = self.wt[i]
            ti = INFINITY
            code_i = 0
            if not (self.belowv[i] or self.abovev[i]):
                if wv > _PIVOT_TOL and isfinite(lo):
                    ti = (xb - lo) / wv
                elif wv < -_PIVOT_TOL and isfinite(hi):
                    ti = (xb - hi) / wv
                    code_i = 1
            elif phase1:
                # Out-of-bound rows block at the bound they are violating,
                # which restores feasibility and keeps the measure monotone.
                if self.belowv[i] and wv < -_PIVOT_TOL:
                    ti = (xb - lo) / wv
                elif self.abovev[i] and wv > _PIVOT_TOL:
                    ti = (xb - hi) / wv
                    code_i = 1
            if ti < 0.0:
                ti = 0.0
            self.tarr[i] = ti
            self.codearr[i] = code_i
            if ti < tmin:
                tmin = ti
        if not isfinite(tmin):
            t_out[0] = INFINITY
            row_out[0] = -1
            return 0
        if self._bland:
            bestj = self.nt
            for i in range(self.m):
                if self.tarr[i] <= tmin + _RATIO_TIE and self.basisv[i] < bestj:
                    bestj = self.basisv[i]
                    row = i
        else:
            for i in range(self.m):
                if self.tarr[i] <= tmin + _RATIO_TIE and fabs(self.wt[i]) > bestw:
                    bestw = fabs(self.wt[i])
                    row = i
        t_out[0] = self.tarr[row]
        row_out[0] = row
        return self.codearr[row]

    # -------------------------------------------------------------------- dual

    cdef int _dual(self, int max_iter):
        cdef int stall = 0, st
        cdef Py_ssize_t i, j, q, row, leave
        cdef double xb, lo, hi, below, above, viol, best, sigma
        cdef double ab, ratio, rmin, delta, target, besta
        cdef int mm = <int> self.m, nn = <int> self.n, inc1 = 1
        cdef double one = 1.0, zero = 0.0
        cdef char tN = b'N'
        while self.last_iterations < max_iter:
            self.last_iterations += 1
            row = -1
            best = _FEAS_TOL
            sigma = -1.0
            for i in range(self.m):
                j = self.basisv[i]
                xb = self.xv[j]
                below = self.lbv[j] - xb
                if below < 0.0:
                    below = 0.0
                above = xb - self.ubv[j]
                if above < 0.0:
                    above = 0.0
                viol = above if above > below else below
                if viol > best:
                    row = i
                    best = viol
                    sigma = 1.0 if above > below else -1.0
                    if self._bland:
                        break
            if row < 0:
                return _OPTIMAL

            # alpha = row `row` of binv @ [A I]; rho is just a row read.
            if self.n:
                dgemv(&tN, &nn, &mm, &one, &self.av[0, 0], &nn,
                      &self.binvv[row, 0], &inc1, &zero, &self.alpha[0], &inc1)
            for j in range(self.m):
                self.alpha[self.n + j] = self.binvv[row, j]

            for i in range(self.m):
                self.crow[i] = self.cv[self.basisv[i]]
            self._reduced_costs(False)

            rmin = INFINITY
            weak = 0
            for j in range(self.nt):
                self.candv[j] = 0
                st = self.vstatv[j]
                if st == _BASIC or self.lbv[j] >= self.ubv[j]:
                    continue
                ab = sigma * self.alpha[j]
                if (st == _AT_LOWER or st == _FREE) and ab > _PIVOT_TOL:
                    pass
                elif (st == _AT_UPPER or st == _FREE) and ab < -_PIVOT_TOL:
                    pass
                else:
                    continue
                if fabs(ab) <= _DUAL_PIVOT_TOL:
                    weak = 1
                    continue
                self.candv[j] = 1
                ratio = self.d[j] / ab
                if ratio < 0.0:
                    ratio = 0.0
                if ratio < rmin:
                    rmin = ratio
            if not isfinite(rmin):
                # Dual unboundedness read off stale factors is not trustworthy.
                if self._pivots_since_refactor:
                    self._refactor()
                    self._recompute_x()
                    continue
                if weak:
                    # Only pivots too small to divide by remain; updating on
                    # one would wreck the factorization, so hand over to the
                    # primal phases, which settle feasibility soundly.
                    return _OPTIMAL
                return _INFEASIBLE
            q = -1
            besta = -1.0
            for j in range(self.nt):
                if not self.candv[j]:
                    continue
                ratio = self.d[j] / (sigma * self.alpha[j])
                if ratio < 0.0:
                    ratio = 0.0
                if ratio <= rmin + _RATIO_TIE:
                    if self._bland:
                        q = j
                        break
                    if fabs(sigma * self.alpha[j]) > besta:
                        besta = fabs(sigma * self.alpha[j])
                        q = j

            self._ftran(q)
            # The btran-priced pivot must agree with the ftran one; a tiny or
            # inconsistent value here would corrupt the basis update.
            if fabs(self.w[row]) <= _PIVOT_TOL or \
                    fabs(self.w[row] - self.alpha[q]) > 1e-6 * (1.0 + fabs(self.alpha[q])):
                if self._pivots_since_refactor:
                    self._refactor()
                    self._recompute_x()
                    continue
                return _OPTIMAL   # let the primal phases finish from here
            leave = self.basisv[row]
            target = self.ubv[leave] if sigma > 0.0 else self.lbv[leave]
            delta = (self.xv[leave] - target) / self.w[row]
            self.xv[q] += delta
            for i in range(self.m):
                self.xv[self.basisv[i]] -= self.w[i] * delta
            self.xv[leave] = target
            self.vstatv[leave] = _AT_UPPER if sigma > 0.0 else _AT_LOWER
            self.vstatv[q] = _BASIC
            self.basisv[row] = q
            self._update_binv(row)

            if fabs(delta) <= _RATIO_TIE:
                stall += 1
                if stall >= _STALL_LIMIT:
                    self._bland = True
            else:
                stall = 0
        return _ITERATION_LIMIT

    # ------------------------------------------------------------------ output

    def objective(self):
        return float(np.dot(self.c, self.x))

    def primal(self):
        return self.x.copy()

    def duals(self):
        """Row duals: objective change per unit increase of each rhs."""
        cdef Py_ssize_t i
        cdef int mm = <int> self.m, inc1 = 1
        cdef double one = 1.0, zero = 0.0
        cdef char tN = b'N'
        for i in range(self.m):
            self.crow[i] = self.cv[self.basisv[i]]
        out = np.empty(self.m)
        cdef double[::1] outv = out
        if self.m:
            dgemv(&tN, &mm, &mm, &one, &self.binvv[0, 0], &mm,
                  &self.crow[0], &inc1, &zero, &outv[0], &inc1)
        return out

    def reduced_costs(self):
        cdef Py_ssize_t i
        for i in range(self.m):
            self.crow[i] = self.cv[self.basisv[i]]
        self._reduced_costs(False)
        return np.asarray(self.d).copy()
