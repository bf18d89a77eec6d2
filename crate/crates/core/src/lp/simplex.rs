//! Reference dense revised simplex with bounded variables.
//!
//! Two-phase method: artificial variables absorb the initial bound
//! violations of the slack basis, phase 1 minimizes their sum, phase 2
//! minimizes the true objective. The basis inverse is kept explicitly
//! (row-major, product-form updates) and rebuilt from scratch every
//! `refactor_every` pivots and before the solution is extracted.
//!
//! Intended for desk-scale problems (a few thousand rows). The pluggable
//! [`super::LpBackend`] trait leaves room for sparse or interior-point
//! backends behind the same contract.

use std::sync::Arc;
use std::time::Instant;

use super::{LpBackend, LpError, LpSolution, LpStatus, Sense, StandardLp};

#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Primal feasibility tolerance on the reported solution.
    pub feas_tol: f64,
    /// Complementary slackness tolerance on the reported solution.
    pub comp_tol: f64,
    /// Reduced-cost tolerance for entering-variable selection.
    pub opt_tol: f64,
    /// Pivot magnitude below which a ratio-test row is skipped.
    pub pivot_tol: f64,
    pub max_iters: u64,
    /// Pivots between refactorizations of the basis inverse.
    pub refactor_every: u64,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub bland_after: u64,
    /// Optional wall-clock limit in milliseconds. Off by default so that
    /// results stay deterministic.
    pub time_limit_ms: Option<u64>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            feas_tol: 1e-7,
            comp_tol: 1e-7,
            opt_tol: 1e-9,
            pivot_tol: 1e-9,
            max_iters: 400_000,
            refactor_every: 250,
            bland_after: 400,
            time_limit_ms: None,
        }
    }
}

/// The reference backend.
pub struct DenseSimplex;

impl LpBackend for DenseSimplex {
    fn solve(&self, problem: &StandardLp, options: &SolveOptions) -> Result<LpSolution, LpError> {
        match Worker::new(problem, options)?.run() {
            Err(LpError::Numerical { .. }) => {
                // One retry with a tighter refactorization cadence; drift
                // is the usual culprit on long degenerate pivot chains.
                let strict = SolveOptions {
                    refactor_every: 40,
                    bland_after: 80,
                    ..options.clone()
                };
                Worker::new(problem, &strict)?.run()
            }
            other => other,
        }
    }
}

const INF: f64 = f64::INFINITY;

#[derive(Debug, Clone, Copy, PartialEq)]
enum VarState {
    Basic(usize),
    AtLower,
    AtUpper,
    /// Nonbasic free variable resting at zero.
    FreeAtZero,
}

struct Worker<'a> {
    lp: &'a StandardLp,
    opts: &'a SolveOptions,
    n_struct: usize,
    m: usize,
    /// Internal row -> original row index (empty rows are dropped).
    row_map: Vec<usize>,
    /// Sparse columns for structural variables, by internal row.
    cols: Vec<Vec<(usize, f64)>>,
    /// Slack direction is +1; artificial columns carry +-1.
    art_sign: Vec<f64>,
    /// Row each artificial column belongs to.
    art_rows: Vec<usize>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    rhs: Vec<f64>,
    state: Vec<VarState>,
    basis: Vec<usize>,
    binv: Vec<f64>,
    xb: Vec<f64>,
    y: Vec<f64>,
    work: Vec<f64>,
    iterations: u64,
    degenerate_streak: u64,
    since_refactor: u64,
    cost_scale: f64,
    started: Instant,
}

enum LoopExit {
    OptimalPhase,
    Unbounded,
}

impl<'a> Worker<'a> {
    fn new(lp: &'a StandardLp, opts: &'a SolveOptions) -> Result<Self, LpError> {
        let n = lp.num_vars();
        let mut row_map = Vec::new();
        for (i, row) in lp.rows.iter().enumerate() {
            if row.terms.iter().any(|&(_, c)| c != 0.0) {
                row_map.push(i);
            }
        }
        let m = row_map.len();

        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        let mut rhs = vec![0.0; m];
        for (ir, &orig) in row_map.iter().enumerate() {
            let row = &lp.rows[orig];
            rhs[ir] = row.rhs;
            for &(v, c) in &row.terms {
                if c != 0.0 {
                    cols[v as usize].push((ir, c));
                }
            }
        }

        let mut lower = Vec::with_capacity(n + m);
        let mut upper = Vec::with_capacity(n + m);
        for v in &lp.vars {
            lower.push(v.lower);
            upper.push(v.upper);
        }
        // Slack bounds encode the row sense: a'x + s = b.
        for &orig in &row_map {
            match lp.rows[orig].sense {
                Sense::Le => {
                    lower.push(0.0);
                    upper.push(INF);
                }
                Sense::Ge => {
                    lower.push(-INF);
                    upper.push(0.0);
                }
                Sense::Eq => {
                    lower.push(0.0);
                    upper.push(0.0);
                }
            }
        }

        let cost_scale = lp
            .vars
            .iter()
            .map(|v| v.cost.abs())
            .fold(0.0f64, f64::max)
            .max(1.0);

        Ok(Worker {
            lp,
            opts,
            n_struct: n,
            m,
            row_map,
            cols,
            art_sign: Vec::new(),
            art_rows: Vec::new(),
            lower,
            upper,
            cost: Vec::new(),
            rhs,
            state: Vec::new(),
            basis: Vec::new(),
            binv: Vec::new(),
            xb: Vec::new(),
            y: vec![0.0; m],
            work: vec![0.0; m],
            iterations: 0,
            degenerate_streak: 0,
            since_refactor: 0,
            cost_scale,
            started: Instant::now(),
        })
    }

    fn total_cols(&self) -> usize {
        self.n_struct + self.m + self.art_sign.len()
    }

    fn run(mut self) -> Result<LpSolution, LpError> {
        // Empty rows must still be consistent with their sense.
        for (i, row) in self.lp.rows.iter().enumerate() {
            if row.terms.iter().all(|&(_, c)| c == 0.0) {
                let ok = match row.sense {
                    Sense::Le => 0.0 <= row.rhs + self.opts.feas_tol,
                    Sense::Ge => 0.0 >= row.rhs - self.opts.feas_tol,
                    Sense::Eq => row.rhs.abs() <= self.opts.feas_tol,
                };
                if !ok {
                    return Ok(self.finish_status(LpStatus::Infeasible));
                }
                let _ = i;
            }
        }
        for v in 0..self.n_struct {
            if self.lower[v] > self.upper[v] {
                return Ok(self.finish_status(LpStatus::Infeasible));
            }
        }

        self.init_basis();

        // Phase 1: drive artificials to zero.
        if !self.art_sign.is_empty() {
            let mut cost = vec![0.0; self.total_cols()];
            for a in 0..self.art_sign.len() {
                cost[self.n_struct + self.m + a] = 1.0;
            }
            self.cost = cost;
            match self.simplex_loop(1.0)? {
                LoopExit::Unbounded => {
                    return Err(LpError::Numerical {
                        problem: self.lp.name.clone(),
                        detail: "phase-1 objective unbounded".into(),
                    })
                }
                LoopExit::OptimalPhase => {}
            }
            let infeas: f64 = self
                .basis
                .iter()
                .zip(&self.xb)
                .filter(|(&b, _)| b >= self.n_struct + self.m)
                .map(|(_, &v)| v.abs())
                .sum();
            if infeas > self.opts.feas_tol * (1.0 + self.rhs_scale()) {
                return Ok(self.finish_status(LpStatus::Infeasible));
            }
            // Artificials are pinned at zero for phase 2.
            for a in 0..self.art_sign.len() {
                let c = self.n_struct + self.m + a;
                self.lower[c] = 0.0;
                self.upper[c] = 0.0;
            }
        }

        // Phase 2: true objective.
        let mut cost = vec![0.0; self.total_cols()];
        for (j, v) in self.lp.vars.iter().enumerate() {
            cost[j] = v.cost;
        }
        self.cost = cost;
        match self.simplex_loop(self.cost_scale)? {
            LoopExit::Unbounded => Ok(self.finish_status(LpStatus::Unbounded)),
            LoopExit::OptimalPhase => self.finish_optimal(),
        }
    }

    fn rhs_scale(&self) -> f64 {
        self.rhs.iter().map(|r| r.abs()).fold(0.0f64, f64::max)
    }

    #[allow(clippy::needless_range_loop)]
    fn init_basis(&mut self) {
        let n = self.n_struct;
        let m = self.m;
        let mut state = Vec::with_capacity(self.total_cols());
        for j in 0..n {
            state.push(if self.lower[j].is_finite() {
                VarState::AtLower
            } else if self.upper[j].is_finite() {
                VarState::AtUpper
            } else {
                VarState::FreeAtZero
            });
        }
        for i in 0..m {
            state.push(VarState::Basic(i));
        }
        self.state = state;
        self.basis = (n..n + m).collect();

        // xb = b - N x_N with the slack basis.
        let mut xb = self.rhs.clone();
        for j in 0..n {
            let v = self.nonbasic_value(j);
            if v != 0.0 {
                for &(i, c) in &self.cols[j] {
                    xb[i] -= c * v;
                }
            }
        }

        // Where the slack value violates its own bounds, park the slack at
        // the nearest bound and let an artificial absorb the residual.
        self.binv = vec![0.0; m * m];
        for i in 0..m {
            let s = n + i;
            let v = xb[i];
            let clamped = v.clamp(self.lower[s], self.upper[s]);
            if (v - clamped).abs() > 0.0 {
                let resid = v - clamped;
                self.state[s] = if clamped == self.lower[s] {
                    VarState::AtLower
                } else {
                    VarState::AtUpper
                };
                let sign = resid.signum();
                let a = self.total_cols();
                self.art_sign.push(sign);
                self.art_rows.push(i);
                self.lower.push(0.0);
                self.upper.push(INF);
                self.state.push(VarState::Basic(i));
                self.basis[i] = a;
                self.binv[i * m + i] = sign;
                xb[i] = resid.abs();
            } else {
                self.binv[i * m + i] = 1.0;
                xb[i] = v;
            }
        }
        self.xb = xb;
    }

    fn nonbasic_value(&self, j: usize) -> f64 {
        match self.state[j] {
            VarState::AtLower => self.lower[j],
            VarState::AtUpper => self.upper[j],
            VarState::FreeAtZero => 0.0,
            VarState::Basic(r) => self.xb[r],
        }
    }

    /// column j of the full constraint matrix applied into `out` (+= c*scale).
    fn scatter_col(&self, j: usize, scale: f64, out: &mut [f64]) {
        if j < self.n_struct {
            for &(i, c) in &self.cols[j] {
                out[i] += c * scale;
            }
        } else if j < self.n_struct + self.m {
            out[j - self.n_struct] += scale;
        } else {
            let a = j - self.n_struct - self.m;
            out[self.art_row(a)] += self.art_sign[a] * scale;
        }
    }

    fn art_row(&self, a: usize) -> usize {
        self.art_rows[a]
    }

    fn dot_col_y(&self, j: usize) -> f64 {
        if j < self.n_struct {
            self.cols[j].iter().map(|&(i, c)| self.y[i] * c).sum()
        } else if j < self.n_struct + self.m {
            self.y[j - self.n_struct]
        } else {
            let a = j - self.n_struct - self.m;
            self.art_sign[a] * self.y[self.art_row(a)]
        }
    }

    fn compute_y(&mut self) {
        let m = self.m;
        self.y.iter_mut().for_each(|v| *v = 0.0);
        for r in 0..m {
            let cb = self.cost[self.basis[r]];
            if cb != 0.0 {
                let row = &self.binv[r * m..(r + 1) * m];
                for (yv, bv) in self.y.iter_mut().zip(row) {
                    *yv += cb * bv;
                }
            }
        }
    }

    /// w = B^-1 A_q.
    fn compute_w(&mut self, q: usize) {
        let m = self.m;
        self.work.iter_mut().for_each(|v| *v = 0.0);
        if q < self.n_struct {
            // w = sum over nnz of column: a_iq * binv[:, i]
            for &(i, c) in &self.cols[q] {
                if c != 0.0 {
                    for r in 0..m {
                        self.work[r] += c * self.binv[r * m + i];
                    }
                }
            }
        } else if q < self.n_struct + self.m {
            let i = q - self.n_struct;
            for r in 0..m {
                self.work[r] = self.binv[r * m + i];
            }
        } else {
            let a = q - self.n_struct - self.m;
            let i = self.art_row(a);
            let s = self.art_sign[a];
            for r in 0..m {
                self.work[r] = s * self.binv[r * m + i];
            }
        }
    }

    fn simplex_loop(&mut self, cost_scale: f64) -> Result<LoopExit, LpError> {
        let d_tol = self.opts.opt_tol * cost_scale.max(1.0);
        loop {
            if self.iterations >= self.opts.max_iters {
                return Err(LpError::IterationLimit(self.opts.max_iters));
            }
            if let Some(ms) = self.opts.time_limit_ms {
                if self.started.elapsed().as_millis() as u64 >= ms {
                    return Err(LpError::TimeLimit);
                }
            }
            if self.since_refactor >= self.opts.refactor_every {
                self.refactor()?;
            }

            self.compute_y();
            let bland = self.degenerate_streak >= self.opts.bland_after;

            // Pricing.
            let mut best: Option<(usize, f64, f64)> = None; // (col, |d|, dir)
            for j in 0..self.total_cols() {
                if let VarState::Basic(_) = self.state[j] { continue }
                if self.lower[j] == self.upper[j] {
                    continue;
                }
                let d = self.cost[j] - self.dot_col_y(j);
                let dir = match self.state[j] {
                    VarState::AtLower if d < -d_tol => 1.0,
                    VarState::AtUpper if d > d_tol => -1.0,
                    VarState::FreeAtZero if d < -d_tol => 1.0,
                    VarState::FreeAtZero if d > d_tol => -1.0,
                    _ => continue,
                };
                if bland {
                    best = Some((j, d.abs(), dir));
                    break;
                }
                if best.is_none_or(|(_, bd, _)| d.abs() > bd) {
                    best = Some((j, d.abs(), dir));
                }
            }
            let Some((q, _, dir)) = best else {
                return Ok(LoopExit::OptimalPhase);
            };

            self.compute_w(q);

            // Two-pass Harris-style ratio test: find the tightest step with
            // a small feasibility relaxation, then among rows blocking
            // within it pick the largest pivot for stability.
            let span_q = self.upper[q] - self.lower[q];
            let relax = self.opts.feas_tol;
            let ratio = |g: f64, r: usize, b: usize, slack: f64| -> Option<(f64, bool)> {
                if g < 0.0 {
                    if self.lower[b] == -INF {
                        return None;
                    }
                    Some((((self.xb[r] - self.lower[b] + slack).max(0.0)) / -g, false))
                } else {
                    if self.upper[b] == INF {
                        return None;
                    }
                    Some((((self.upper[b] - self.xb[r] + slack).max(0.0)) / g, true))
                }
            };
            let mut t_relaxed = INF;
            for r in 0..self.m {
                let g = -dir * self.work[r];
                if g.abs() <= self.opts.pivot_tol {
                    continue;
                }
                if let Some((t, _)) = ratio(g, r, self.basis[r], relax) {
                    t_relaxed = t_relaxed.min(t);
                }
            }
            let mut t_block = INF;
            let mut r_block: Option<usize> = None;
            let mut hit_upper = false;
            let mut best_piv = 0.0f64;
            for r in 0..self.m {
                let g = -dir * self.work[r];
                if g.abs() <= self.opts.pivot_tol {
                    continue;
                }
                if let Some((t, hits_up)) = ratio(g, r, self.basis[r], 0.0) {
                    if t <= t_relaxed && self.work[r].abs() > best_piv {
                        best_piv = self.work[r].abs();
                        t_block = t;
                        r_block = Some(r);
                        hit_upper = hits_up;
                    }
                }
            }

            self.iterations += 1;
            self.since_refactor += 1;

            if span_q.is_finite() && span_q <= t_block {
                // Bound flip, no basis change.
                for r in 0..self.m {
                    self.xb[r] -= dir * span_q * self.work[r];
                }
                self.state[q] = match self.state[q] {
                    VarState::AtLower => VarState::AtUpper,
                    VarState::AtUpper => VarState::AtLower,
                    s => s,
                };
                self.degenerate_streak = 0;
                continue;
            }

            let Some(r) = r_block else {
                return Ok(LoopExit::Unbounded);
            };
            let t = t_block;
            if t <= 1e-11 {
                self.degenerate_streak += 1;
            } else {
                self.degenerate_streak = 0;
            }

            // Update basic values and swap q in for basis[r].
            for i in 0..self.m {
                self.xb[i] -= dir * t * self.work[i];
            }
            let enter_from = match self.state[q] {
                VarState::AtLower => self.lower[q],
                VarState::AtUpper => self.upper[q],
                VarState::FreeAtZero => 0.0,
                VarState::Basic(_) => unreachable!(),
            };
            let leaving = self.basis[r];
            self.state[leaving] = if hit_upper {
                VarState::AtUpper
            } else {
                VarState::AtLower
            };
            self.basis[r] = q;
            self.state[q] = VarState::Basic(r);
            self.xb[r] = enter_from + dir * t;

            // Product-form update of the inverse.
            let m = self.m;
            let piv = self.work[r];
            if piv.abs() < 1e-12 {
                return Err(LpError::Numerical {
                    problem: self.lp.name.clone(),
                    detail: format!("tiny pivot {piv:e}"),
                });
            }
            let inv = 1.0 / piv;
            {
                let row = &mut self.binv[r * m..(r + 1) * m];
                for v in row.iter_mut() {
                    *v *= inv;
                }
            }
            for i in 0..m {
                if i == r {
                    continue;
                }
                let f = self.work[i];
                if f == 0.0 {
                    continue;
                }
                let (head, tail) = self.binv.split_at_mut(r * m);
                let (pivot_row, rest) = tail.split_at_mut(m);
                let target = if i < r {
                    &mut head[i * m..(i + 1) * m]
                } else {
                    &mut rest[(i - r - 1) * m..(i - r) * m]
                };
                for (tv, pv) in target.iter_mut().zip(pivot_row.iter()) {
                    *tv -= f * pv;
                }
            }
        }
    }

    /// Rebuilds the inverse by Gauss-Jordan with partial pivoting and
    /// recomputes basic values from the bounds of nonbasic variables.
    fn refactor(&mut self) -> Result<(), LpError> {
        let m = self.m;
        self.since_refactor = 0;
        if m == 0 {
            return Ok(());
        }
        // Assemble B column by column into `a`, identity into `binv`.
        let mut a = vec![0.0; m * m];
        for (r, &b) in self.basis.iter().enumerate() {
            let mut col = vec![0.0; m];
            self.scatter_col(b, 1.0, &mut col);
            for i in 0..m {
                a[i * m + r] = col[i];
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for k in 0..m {
            let mut piv_row = k;
            let mut piv_val = a[k * m + k].abs();
            for i in k + 1..m {
                let v = a[i * m + k].abs();
                if v > piv_val {
                    piv_val = v;
                    piv_row = i;
                }
            }
            if piv_val < 1e-11 {
                return Err(LpError::Numerical {
                    problem: self.lp.name.clone(),
                    detail: "singular basis during refactorization".into(),
                });
            }
            if piv_row != k {
                for j in 0..m {
                    a.swap(k * m + j, piv_row * m + j);
                    inv.swap(k * m + j, piv_row * m + j);
                }
            }
            let p = a[k * m + k];
            let pinv = 1.0 / p;
            for j in 0..m {
                a[k * m + j] *= pinv;
                inv[k * m + j] *= pinv;
            }
            for i in 0..m {
                if i == k {
                    continue;
                }
                let f = a[i * m + k];
                if f == 0.0 {
                    continue;
                }
                for j in 0..m {
                    a[i * m + j] -= f * a[k * m + j];
                    inv[i * m + j] -= f * inv[k * m + j];
                }
            }
        }
        self.binv = inv;

        // xb = B^-1 (b - N x_N)
        let mut b_eff = self.rhs.clone();
        for j in 0..self.total_cols() {
            match self.state[j] {
                VarState::Basic(_) => continue,
                _ => {
                    let v = self.nonbasic_value(j);
                    if v != 0.0 {
                        self.scatter_col(j, -v, &mut b_eff);
                    }
                }
            }
        }
        for r in 0..m {
            let row = &self.binv[r * m..(r + 1) * m];
            self.xb[r] = row.iter().zip(&b_eff).map(|(a, b)| a * b).sum();
        }
        Ok(())
    }

    fn finish_status(&self, status: LpStatus) -> LpSolution {
        let mut sol = LpSolution::new(Arc::clone(&self.lp.labels));
        sol.status = status;
        sol.iterations = self.iterations;
        sol.primal = vec![0.0; self.lp.num_vars()];
        sol.duals = vec![0.0; self.lp.num_rows()];
        sol
    }

    fn finish_optimal(mut self) -> Result<LpSolution, LpError> {
        self.refactor()?;
        self.compute_y();

        let mut primal = vec![0.0; self.n_struct];
        for (j, p) in primal.iter_mut().enumerate() {
            *p = self.nonbasic_value(j);
        }
        let mut duals = vec![0.0; self.lp.num_rows()];
        for (ir, &orig) in self.row_map.iter().enumerate() {
            duals[orig] = self.y[ir];
        }

        let objective = self.lp.objective_value(&primal);

        // Residual checks certify the Optimal status.
        let mut feas = 0.0f64;
        for row in &self.lp.rows {
            let act: f64 = row.terms.iter().map(|&(v, c)| c * primal[v as usize]).sum();
            let viol = match row.sense {
                Sense::Le => (act - row.rhs).max(0.0),
                Sense::Ge => (row.rhs - act).max(0.0),
                Sense::Eq => (act - row.rhs).abs(),
            };
            feas = feas.max(viol);
        }
        for (j, v) in self.lp.vars.iter().enumerate() {
            feas = feas.max(v.lower - primal[j]).max(primal[j] - v.upper);
        }

        let mut comp = 0.0f64;
        for (ir, &orig) in self.row_map.iter().enumerate() {
            let row = &self.lp.rows[orig];
            if row.sense == Sense::Eq {
                continue;
            }
            let act: f64 = row.terms.iter().map(|&(v, c)| c * primal[v as usize]).sum();
            comp = comp.max((self.y[ir] * (row.rhs - act)).abs());
        }

        // Strong duality: c'x = y'b + sum of reduced costs times bound values.
        let mut dual_obj: f64 = self.y.iter().zip(&self.rhs).map(|(a, b)| a * b).sum();
        for j in 0..self.total_cols() {
            match self.state[j] {
                VarState::Basic(_) => continue,
                _ => {
                    let v = self.nonbasic_value(j);
                    if v != 0.0 {
                        let d = self.cost[j] - self.dot_col_y(j);
                        dual_obj += d * v;
                    }
                }
            }
        }
        let dual_resid = (objective - dual_obj).abs();

        let scale = 1.0 + self.rhs_scale().max(objective.abs());
        if feas > self.opts.feas_tol * scale {
            return Err(LpError::Numerical {
                problem: self.lp.name.clone(),
                detail: format!("feasibility residual {feas:e} above tolerance"),
            });
        }
        if comp > self.opts.comp_tol * scale * self.cost_scale {
            return Err(LpError::Numerical {
                problem: self.lp.name.clone(),
                detail: format!("complementarity residual {comp:e} above tolerance"),
            });
        }
        if dual_resid > 1e-6 * (1.0 + objective.abs()) {
            return Err(LpError::Numerical {
                problem: self.lp.name.clone(),
                detail: format!("duality residual {dual_resid:e} above tolerance"),
            });
        }

        let mut sol = LpSolution::new(Arc::clone(&self.lp.labels));
        sol.status = LpStatus::Optimal;
        sol.objective = objective;
        sol.primal = primal;
        sol.duals = duals;
        sol.iterations = self.iterations;
        sol.feasibility_residual = feas;
        sol.complementarity_residual = comp;
        sol.duality_residual = dual_resid;
        Ok(sol)
    }
}
