//! Bounded-variable simplex for LP relaxations.
//!
//! Every row `r` gets a logical variable `s_r` with `A x - s = 0`; the row
//! sense becomes the bounds of `s_r` (equality rows fix it, acting as the
//! artificial variable of a two-phase method). Phase one minimizes the sum of
//! bound violations of the basic variables starting from any basis, so warm
//! starts whose basis became infeasible after a bound change or an appended
//! row are repaired in place. When the starting basis is dual feasible, which
//! is the case for the slack basis with nonnegative costs and for a parent
//! node's optimal basis, dual simplex iterations run first.

mod lu;

use std::fmt;

use rand::{Rng, SeedableRng};

use lu::{Factor, SparseCol};

use crate::model::{MipModel, Sense};

pub const FEAS_TOL: f64 = 1e-7;
pub const OPT_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const DEGENERATE_STEP: f64 = 1e-12;
const DUAL_PERTURBATION: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct LpRow {
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// Minimize `objective . x` subject to rows and variable bounds.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub rows: Vec<LpRow>,
}

impl LpProblem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, cost: f64, lower: f64, upper: f64) -> usize {
        self.objective.push(cost);
        self.lower.push(lower);
        self.upper.push(upper);
        self.objective.len() - 1
    }

    pub fn add_row(&mut self, terms: Vec<(usize, f64)>, sense: Sense, rhs: f64) -> usize {
        self.rows.push(LpRow { terms, sense, rhs });
        self.rows.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// LP relaxation of a MIP model.
    pub fn from_model(model: &MipModel) -> Self {
        let mut lp = LpProblem::new();
        for v in &model.variables {
            lp.add_var(0.0, v.lo, v.hi);
        }
        for &(v, c) in &model.objective {
            lp.objective[v] += c;
        }
        for c in &model.constraints {
            lp.add_row(c.terms.clone(), c.sense, c.rhs);
        }
        lp
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective.iter().zip(values).map(|(c, v)| c * v).sum()
    }

    /// Largest violation of any row or bound by `values`.
    pub fn max_violation(&self, values: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for (j, &v) in values.iter().enumerate() {
            worst = worst.max(self.lower[j] - v).max(v - self.upper[j]);
        }
        for row in &self.rows {
            let lhs: f64 = row.terms.iter().map(|&(j, c)| c * values[j]).sum();
            let viol = match row.sense {
                Sense::Le => lhs - row.rhs,
                Sense::Ge => row.rhs - lhs,
                Sense::Eq => (lhs - row.rhs).abs(),
            };
            worst = worst.max(viol);
        }
        worst
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarStatus {
    Basic,
    AtLower,
    AtUpper,
    /// Nonbasic free variable held at zero.
    Free,
}

/// Basis descriptor: status of every structural and logical variable plus the
/// variable occupying each basis position.
#[derive(Clone, Debug, PartialEq)]
pub struct Basis {
    num_vars: usize,
    status: Vec<VarStatus>,
    head: Vec<usize>,
}

impl Basis {
    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_rows(&self) -> usize {
        self.head.len()
    }

    pub fn status(&self, var: usize) -> VarStatus {
        self.status[var]
    }

    /// A basis can seed a problem with the same variables and at least as
    /// many rows; rows added since are covered by their logicals.
    pub fn is_compatible(&self, problem: &LpProblem) -> bool {
        self.num_vars == problem.num_vars()
            && self.head.len() <= problem.num_rows()
            && self.status.len() == self.num_vars + self.head.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

impl fmt::Display for LpStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective: f64,
    pub values: Vec<f64>,
    pub basis: Basis,
    pub iterations: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimplexOptions {
    pub feas_tol: f64,
    pub opt_tol: f64,
    /// Defaults to `50 * (rows + cols)`.
    pub max_iterations: Option<usize>,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub bland_after: usize,
    pub refactor_interval: usize,
    /// Start with dual simplex iterations whenever the basis is dual feasible
    /// (after flipping boxed variables). Cheap reoptimization after bound
    /// changes and added rows.
    pub dual_start: bool,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            feas_tol: FEAS_TOL,
            opt_tol: OPT_TOL,
            max_iterations: None,
            bland_after: 1000,
            refactor_interval: 80,
            dual_start: true,
        }
    }
}

pub fn solve_lp(problem: &LpProblem, warm: Option<&Basis>) -> LpSolution {
    solve_lp_with(problem, warm, &SimplexOptions::default())
}

pub fn solve_lp_with(problem: &LpProblem, warm: Option<&Basis>, options: &SimplexOptions) -> LpSolution {
    Simplex::new(problem, warm, *options).run()
}

struct Simplex {
    opts: SimplexOptions,
    n: usize,
    m: usize,
    cols: Vec<SparseCol>,
    cost: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    status: Vec<VarStatus>,
    head: Vec<usize>,
    x: Vec<f64>,
    factor: Factor,
    scratch: Vec<f64>,
    iterations: usize,
}

enum Step {
    Flip,
    Pivot { pos: usize, to_upper: bool },
    Unbounded,
}

impl Simplex {
    fn new(problem: &LpProblem, warm: Option<&Basis>, opts: SimplexOptions) -> Self {
        let n = problem.num_vars();
        let m = problem.num_rows();
        let mut cols: Vec<SparseCol> = vec![Vec::new(); n];
        for (r, row) in problem.rows.iter().enumerate() {
            for &(j, c) in &row.terms {
                if c != 0.0 {
                    cols[j].push((r, c));
                }
            }
        }
        let mut lo = problem.lower.clone();
        let mut hi = problem.upper.clone();
        for row in &problem.rows {
            let (l, h) = match row.sense {
                Sense::Le => (f64::NEG_INFINITY, row.rhs),
                Sense::Ge => (row.rhs, f64::INFINITY),
                Sense::Eq => (row.rhs, row.rhs),
            };
            lo.push(l);
            hi.push(h);
        }
        let mut cost = problem.objective.clone();
        cost.resize(n + m, 0.0);

        let (status, head) = match warm {
            Some(b) if b.is_compatible(problem) => {
                let mut status = b.status.clone();
                let mut head = b.head.clone();
                for r in b.head.len()..m {
                    status.push(VarStatus::Basic);
                    head.push(n + r);
                }
                (status, head)
            }
            _ => {
                let mut status = vec![VarStatus::AtLower; n];
                status.extend(std::iter::repeat_n(VarStatus::Basic, m));
                (status, (n..n + m).collect())
            }
        };

        let mut s = Simplex {
            opts,
            n,
            m,
            cols,
            cost,
            lo,
            hi,
            status,
            head,
            x: vec![0.0; n + m],
            factor: Factor::default(),
            scratch: Vec::new(),
            iterations: 0,
        };
        for j in 0..n + m {
            if s.status[j] != VarStatus::Basic {
                s.place_nonbasic(j, s.status[j]);
            }
        }
        s
    }

    /// Put nonbasic `j` on a finite bound consistent with `preferred`.
    fn place_nonbasic(&mut self, j: usize, preferred: VarStatus) {
        let (l, h) = (self.lo[j], self.hi[j]);
        let st = match preferred {
            VarStatus::AtUpper if h.is_finite() => VarStatus::AtUpper,
            _ if l.is_finite() => VarStatus::AtLower,
            _ if h.is_finite() => VarStatus::AtUpper,
            _ => VarStatus::Free,
        };
        self.status[j] = st;
        self.x[j] = match st {
            VarStatus::AtLower => l,
            VarStatus::AtUpper => h,
            _ => 0.0,
        };
    }

    fn column(&self, j: usize, dense: &mut [f64]) {
        if j < self.n {
            for &(r, c) in &self.cols[j] {
                dense[r] = c;
            }
        } else {
            dense[j - self.n] = -1.0;
        }
    }

    fn column_sparse(&self, j: usize) -> SparseCol {
        if j < self.n {
            self.cols[j].clone()
        } else {
            vec![(j - self.n, -1.0)]
        }
    }

    fn refactor(&mut self) {
        loop {
            let cols: Vec<SparseCol> = self.head.iter().map(|&j| self.column_sparse(j)).collect();
            match Factor::new(self.m, &cols) {
                Ok(f) => {
                    self.factor = f;
                    break;
                }
                Err(singular) => {
                    // Swap deficient columns for the logicals of uncovered rows.
                    for (&pos, &row) in singular.positions.iter().zip(&singular.rows) {
                        let leaving = self.head[pos];
                        let logical = self.n + row;
                        let pref = if self.x[leaving] >= self.hi[leaving] {
                            VarStatus::AtUpper
                        } else {
                            VarStatus::AtLower
                        };
                        self.place_nonbasic(leaving, pref);
                        self.status[logical] = VarStatus::Basic;
                        self.head[pos] = logical;
                    }
                }
            }
        }
        self.compute_basics();
    }

    fn compute_basics(&mut self) {
        let mut rhs = vec![0.0; self.m];
        for j in 0..self.n + self.m {
            if self.status[j] == VarStatus::Basic {
                continue;
            }
            let v = self.x[j];
            if v == 0.0 {
                continue;
            }
            if j < self.n {
                for &(r, c) in &self.cols[j] {
                    rhs[r] -= c * v;
                }
            } else {
                rhs[j - self.n] += v;
            }
        }
        self.factor.ftran(&mut rhs, &mut self.scratch);
        for (pos, &j) in self.head.iter().enumerate() {
            self.x[j] = rhs[pos];
        }
    }

    fn infeasibility(&self, j: usize) -> f64 {
        let v = self.x[j];
        if v < self.lo[j] - self.opts.feas_tol {
            self.lo[j] - v
        } else if v > self.hi[j] + self.opts.feas_tol {
            v - self.hi[j]
        } else {
            0.0
        }
    }

    fn max_basic_infeasibility(&self) -> f64 {
        self.head.iter().map(|&j| self.infeasibility(j)).fold(0.0, f64::max)
    }

    fn run(mut self) -> LpSolution {
        let max_iter = self.opts.max_iterations.unwrap_or(50 * (self.m + self.n).max(1));
        self.refactor();

        let total = self.n + self.m;
        let mut degenerate = 0usize;
        let mut d = vec![0.0; total];
        // Devex reference weights.
        let mut weights = vec![1.0; total];
        let mut alpha = vec![0.0; self.m];
        let mut rho = vec![0.0; self.m];
        let mut rejected: Vec<usize> = Vec::new();
        let mut stale = true;
        let mut was_phase_one = true;

        let early = if self.opts.dual_start {
            // Perturbed costs break dual degeneracy; the true costs come back
            // before the primal loop, which removes any leftover dual infeasibility.
            let original = self.cost.clone();
            self.perturb_costs();
            let st = self.dual_phase(&mut d, max_iter);
            self.cost = original;
            st
        } else {
            None
        };
        let status = loop {
            if let Some(st) = early {
                break st;
            }
            if self.iterations >= max_iter {
                break LpStatus::IterationLimit;
            }
            if self.factor.num_updates() >= self.opts.refactor_interval {
                self.refactor();
                stale = true;
            }

            let phase_one = self.max_basic_infeasibility() > 0.0;
            if phase_one != was_phase_one {
                weights.iter_mut().for_each(|w| *w = 1.0);
                was_phase_one = phase_one;
                stale = true;
            }
            if phase_one || stale {
                self.reduced_costs(phase_one, &mut d);
                stale = false;
            }

            let bland = degenerate >= self.opts.bland_after;
            let Some(q) = self.price(&d, &weights, bland, &rejected) else {
                // No improving column; confirm on a fresh factorization.
                self.refactor();
                self.reduced_costs(phase_one, &mut d);
                let still_phase_one = self.max_basic_infeasibility() > 0.0;
                if still_phase_one != phase_one || self.price(&d, &weights, bland, &rejected).is_some() {
                    stale = true;
                    continue;
                }
                if !rejected.is_empty() {
                    break LpStatus::IterationLimit;
                }
                break if phase_one { LpStatus::Infeasible } else { LpStatus::Optimal };
            };
            let dq = d[q];

            alpha.iter_mut().for_each(|v| *v = 0.0);
            self.column(q, &mut alpha);
            self.factor.ftran(&mut alpha, &mut self.scratch);
            let dir = if dq < 0.0 { 1.0 } else { -1.0 };

            let (theta, step) = self.ratio_test(q, dir, &alpha, phase_one, bland);
            self.iterations += 1;
            match step {
                Step::Unbounded => {
                    if phase_one {
                        rejected.push(q);
                        continue;
                    }
                    break LpStatus::Unbounded;
                }
                Step::Flip => {
                    self.shift(q, dir, theta, &alpha);
                    let st = if dir > 0.0 { VarStatus::AtUpper } else { VarStatus::AtLower };
                    self.place_nonbasic(q, st);
                }
                Step::Pivot { pos, to_upper } => {
                    self.shift(q, dir, theta, &alpha);
                    let leaving = self.head[pos];
                    let arq = alpha[pos];

                    // Pivot row of the current tableau.
                    rho.iter_mut().for_each(|v| *v = 0.0);
                    rho[pos] = 1.0;
                    self.factor.btran(&mut rho, &mut self.scratch);
                    let wq = weights[q];
                    for j in 0..total {
                        if self.status[j] == VarStatus::Basic || j == q {
                            continue;
                        }
                        let arj = self.row_dot(j, &rho);
                        if arj == 0.0 {
                            continue;
                        }
                        let ratio = arj / arq;
                        d[j] -= dq * ratio;
                        weights[j] = weights[j].max(ratio * ratio * wq);
                    }
                    d[leaving] = -dq / arq;
                    d[q] = 0.0;
                    weights[leaving] = (wq / (arq * arq)).max(1.0);

                    let st = if to_upper { VarStatus::AtUpper } else { VarStatus::AtLower };
                    self.place_nonbasic(leaving, st);
                    self.status[q] = VarStatus::Basic;
                    self.head[pos] = q;
                    self.factor.update(pos, &alpha);
                    if weights[leaving] > 1e6 {
                        weights.iter_mut().for_each(|w| *w = 1.0);
                    }
                }
            }
            rejected.clear();
            if theta <= DEGENERATE_STEP {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
        };

        let values = self.x[..self.n].to_vec();
        let objective = self.cost[..self.n].iter().zip(&values).map(|(c, v)| c * v).sum();
        LpSolution {
            status,
            objective,
            values,
            basis: Basis { num_vars: self.n, status: self.status, head: self.head },
            iterations: self.iterations,
        }
    }

    /// Push each nonbasic cost a little further in its dual feasible direction.
    fn perturb_costs(&mut self) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
        for j in 0..self.n + self.m {
            if self.lo[j] == self.hi[j] {
                continue;
            }
            let eps = DUAL_PERTURBATION * (1.0 + self.cost[j].abs()) * rng.gen_range(1.0..2.0);
            match self.status[j] {
                VarStatus::AtLower => self.cost[j] += eps,
                VarStatus::AtUpper => self.cost[j] -= eps,
                _ => {}
            }
        }
    }

    /// Flip boxed nonbasics whose reduced cost has the wrong sign. False when
    /// some dual infeasibility cannot be repaired that way.
    fn make_dual_feasible(&mut self, d: &[f64]) -> bool {
        let tol = self.opts.opt_tol;
        let mut flipped = false;
        let mut ok = true;
        for j in 0..self.n + self.m {
            if self.lo[j] == self.hi[j] {
                continue;
            }
            let want = match self.status[j] {
                VarStatus::AtLower if d[j] < -tol => VarStatus::AtUpper,
                VarStatus::AtUpper if d[j] > tol => VarStatus::AtLower,
                VarStatus::Free if d[j].abs() > tol => {
                    ok = false;
                    continue;
                }
                _ => continue,
            };
            let finite = if want == VarStatus::AtUpper { self.hi[j] } else { self.lo[j] }.is_finite();
            if finite {
                self.place_nonbasic(j, want);
                flipped = true;
            } else {
                ok = false;
            }
        }
        if flipped {
            self.compute_basics();
        }
        ok
    }

    /// Dual simplex with dual Devex row selection and a Harris ratio test.
    /// `None` hands over to the primal loop: the basis is primal feasible, or
    /// dual feasibility was lost to a refactorization repair.
    fn dual_phase(&mut self, d: &mut [f64], max_iter: usize) -> Option<LpStatus> {
        let total = self.n + self.m;
        self.reduced_costs(false, d);
        if !self.make_dual_feasible(d) {
            return None;
        }
        let tol = self.opts.opt_tol;
        let mut rho = vec![0.0; self.m];
        let mut row = vec![0.0; total];
        let mut alpha = vec![0.0; self.m];
        let mut weights = vec![1.0; self.m];
        let mut cands: Vec<(usize, f64, f64)> = Vec::new();
        loop {
            if self.iterations >= max_iter {
                return Some(LpStatus::IterationLimit);
            }
            if self.factor.num_updates() >= self.opts.refactor_interval {
                self.refactor();
                self.reduced_costs(false, d);
                if !self.make_dual_feasible(d) {
                    return None;
                }
            }

            let mut best: Option<(usize, f64)> = None;
            for (pos, &j) in self.head.iter().enumerate() {
                let inf = self.infeasibility(j);
                if inf > 0.0 {
                    let score = inf * inf / weights[pos];
                    if best.is_none_or(|(_, b)| score > b) {
                        best = Some((pos, score));
                    }
                }
            }
            let (r, _) = best?;
            let leaving = self.head[r];
            let to_lower = self.x[leaving] < self.lo[leaving];
            let target = if to_lower { self.lo[leaving] } else { self.hi[leaving] };
            let s = if to_lower { 1.0 } else { -1.0 };

            rho.fill(0.0);
            rho[r] = 1.0;
            self.factor.btran(&mut rho, &mut self.scratch);
            cands.clear();
            for j in 0..total {
                if self.status[j] == VarStatus::Basic {
                    row[j] = 0.0;
                    continue;
                }
                let a = self.row_dot(j, &rho);
                row[j] = a;
                if self.lo[j] == self.hi[j] {
                    continue;
                }
                let sa = s * a;
                let dj = match self.status[j] {
                    VarStatus::AtLower if sa < -PIVOT_TOL => d[j].max(0.0),
                    VarStatus::AtUpper if sa > PIVOT_TOL => (-d[j]).max(0.0),
                    VarStatus::Free if sa.abs() > PIVOT_TOL => d[j].abs(),
                    _ => continue,
                };
                cands.push((j, dj / a.abs(), a.abs()));
            }
            if cands.is_empty() {
                if self.factor.num_updates() > 0 {
                    self.refactor();
                    self.reduced_costs(false, d);
                    if !self.make_dual_feasible(d) {
                        return None;
                    }
                    continue;
                }
                return Some(LpStatus::Infeasible);
            }
            // Long step: pass breakpoints of boxed variables, flipping them,
            // while the leaving row stays infeasible.
            cands.sort_by(|a, b| a.1.total_cmp(&b.1));
            let mut slope = (self.x[leaving] - target).abs();
            let mut passed = 0;
            while passed + 1 < cands.len() {
                let (j, _, a) = cands[passed];
                let drop = a * (self.hi[j] - self.lo[j]);
                if !(drop < slope) {
                    break;
                }
                slope -= drop;
                passed += 1;
            }
            let bound = cands[passed..].iter().map(|&(j, _, a)| (d[j].abs() + tol) / a).fold(f64::INFINITY, f64::min);
            let mut q = cands[passed].0;
            let mut best_abs = -1.0;
            for &(j, ratio, a) in &cands[passed..] {
                if ratio <= bound && a > best_abs {
                    best_abs = a;
                    q = j;
                }
            }
            if passed > 0 {
                alpha.fill(0.0);
                for &(j, _, _) in &cands[..passed] {
                    let (old, st) = match self.status[j] {
                        VarStatus::AtLower => (self.lo[j], VarStatus::AtUpper),
                        _ => (self.hi[j], VarStatus::AtLower),
                    };
                    self.place_nonbasic(j, st);
                    let delta = self.x[j] - old;
                    if j < self.n {
                        for &(r, c) in &self.cols[j] {
                            alpha[r] += c * delta;
                        }
                    } else {
                        alpha[j - self.n] -= delta;
                    }
                }
                self.factor.ftran(&mut alpha, &mut self.scratch);
                for (pos, &j) in self.head.iter().enumerate() {
                    self.x[j] -= alpha[pos];
                }
            }

            alpha.fill(0.0);
            self.column(q, &mut alpha);
            self.factor.ftran(&mut alpha, &mut self.scratch);
            let arq = alpha[r];
            if (arq - row[q]).abs() > 1e-7 * (1.0 + arq.abs()) && self.factor.num_updates() > 0 {
                self.refactor();
                self.reduced_costs(false, d);
                if !self.make_dual_feasible(d) {
                    return None;
                }
                continue;
            }

            let theta_p = (self.x[leaving] - target) / arq;
            self.x[q] += theta_p;
            for (pos, &j) in self.head.iter().enumerate() {
                if alpha[pos] != 0.0 {
                    self.x[j] -= theta_p * alpha[pos];
                }
            }
            let theta_d = d[q] / row[q];
            if theta_d != 0.0 {
                for j in 0..total {
                    if row[j] != 0.0 {
                        d[j] -= theta_d * row[j];
                    }
                }
            }
            d[leaving] = -theta_d;
            d[q] = 0.0;

            let wr = weights[r];
            for (pos, w) in weights.iter_mut().enumerate() {
                if pos != r && alpha[pos] != 0.0 {
                    let ratio = alpha[pos] / arq;
                    *w = w.max(ratio * ratio * wr);
                }
            }
            weights[r] = (wr / (arq * arq)).max(1.0);
            if weights[r] > 1e6 {
                weights.fill(1.0);
            }

            let st = if to_lower { VarStatus::AtLower } else { VarStatus::AtUpper };
            self.place_nonbasic(leaving, st);
            self.x[leaving] = target;
            self.status[q] = VarStatus::Basic;
            self.head[r] = q;
            self.factor.update(r, &alpha);
            self.iterations += 1;
        }
    }

    fn row_dot(&self, j: usize, rho: &[f64]) -> f64 {
        if j < self.n {
            self.cols[j].iter().map(|&(r, c)| rho[r] * c).sum()
        } else {
            -rho[j - self.n]
        }
    }

    /// Reduced costs of all variables for the phase objective.
    fn reduced_costs(&mut self, phase_one: bool, d: &mut [f64]) {
        let mut duals = vec![0.0; self.m];
        for (pos, &j) in self.head.iter().enumerate() {
            duals[pos] = if phase_one {
                let v = self.x[j];
                if v < self.lo[j] - self.opts.feas_tol {
                    -1.0
                } else if v > self.hi[j] + self.opts.feas_tol {
                    1.0
                } else {
                    0.0
                }
            } else {
                self.cost[j]
            };
        }
        self.factor.btran(&mut duals, &mut self.scratch);
        for (j, dj) in d.iter_mut().enumerate() {
            *dj = if self.status[j] == VarStatus::Basic {
                0.0
            } else {
                let base = if phase_one { 0.0 } else { self.cost[j] };
                base - self.row_dot(j, &duals)
            };
        }
    }

    /// Devex pricing, or lowest eligible index under Bland's rule.
    fn price(&self, d: &[f64], weights: &[f64], bland: bool, rejected: &[usize]) -> Option<usize> {
        let tol = self.opts.opt_tol;
        let mut best: Option<(usize, f64)> = None;
        for (j, &dj) in d.iter().enumerate() {
            let st = self.status[j];
            if st == VarStatus::Basic || self.lo[j] == self.hi[j] {
                continue;
            }
            let eligible = match st {
                VarStatus::AtLower => dj < -tol,
                VarStatus::AtUpper => dj > tol,
                VarStatus::Free => dj.abs() > tol,
                VarStatus::Basic => false,
            };
            if !eligible || rejected.contains(&j) {
                continue;
            }
            if bland {
                return Some(j);
            }
            let score = dj * dj / weights[j];
            if best.is_none_or(|(_, b)| score > b) {
                best = Some((j, score));
            }
        }
        best.map(|(j, _)| j)
    }

    fn shift(&mut self, q: usize, dir: f64, theta: f64, alpha: &[f64]) {
        if theta == 0.0 {
            return;
        }
        self.x[q] += dir * theta;
        for (pos, &j) in self.head.iter().enumerate() {
            let a = alpha[pos];
            if a != 0.0 {
                self.x[j] -= dir * theta * a;
            }
        }
    }

    /// Harris two-pass ratio test; phase one stops at the first breakpoint.
    fn ratio_test(&self, q: usize, dir: f64, alpha: &[f64], phase_one: bool, bland: bool) -> (f64, Step) {
        let tol = self.opts.feas_tol;
        let flip = self.hi[q] - self.lo[q];

        // (position, exact ratio, relaxed ratio, leaves at upper)
        let mut cands: Vec<(usize, f64, f64, bool)> = Vec::new();
        for (pos, &j) in self.head.iter().enumerate() {
            let a = alpha[pos];
            if a.abs() <= PIVOT_TOL {
                continue;
            }
            let rate = -dir * a;
            let v = self.x[j];
            let (l, h) = (self.lo[j], self.hi[j]);
            if rate < 0.0 {
                if phase_one && v > h + tol {
                    cands.push((pos, (v - h) / -rate, (v - h) / -rate, true));
                } else if l.is_finite() && !(phase_one && v < l - tol) {
                    cands.push((pos, ((v - l) / -rate).max(0.0), (v - l + tol) / -rate, false));
                }
            } else if phase_one && v < l - tol {
                cands.push((pos, (l - v) / rate, (l - v) / rate, false));
            } else if h.is_finite() && !(phase_one && v > h + tol) {
                cands.push((pos, ((h - v) / rate).max(0.0), (h - v + tol) / rate, true));
            }
        }

        if bland {
            let min = cands.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
            if flip <= min {
                return (flip, if flip.is_finite() { Step::Flip } else { Step::Unbounded });
            }
            let pick = cands
                .iter()
                .filter(|c| c.1 <= min + DEGENERATE_STEP)
                .min_by_key(|c| self.head[c.0])
                .expect("candidate");
            return (pick.1, Step::Pivot { pos: pick.0, to_upper: pick.3 });
        }

        let bound = cands.iter().map(|c| c.2).fold(f64::INFINITY, f64::min);
        if flip <= bound && flip <= cands.iter().map(|c| c.1).fold(f64::INFINITY, f64::min) {
            return (flip, if flip.is_finite() { Step::Flip } else { Step::Unbounded });
        }
        if !bound.is_finite() {
            return (f64::INFINITY, Step::Unbounded);
        }
        let mut pick: Option<(usize, f64, bool)> = None;
        let mut best_abs = -1.0;
        for &(pos, exact, _, up) in &cands {
            if exact <= bound && alpha[pos].abs() > best_abs {
                best_abs = alpha[pos].abs();
                pick = Some((pos, exact, up));
            }
        }
        let (pos, theta, to_upper) = pick.expect("a candidate within the Harris bound");
        (theta, Step::Pivot { pos, to_upper })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_replays(problem: &LpProblem, sol: &LpSolution) {
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!(problem.max_violation(&sol.values) <= FEAS_TOL, "{}", problem.max_violation(&sol.values));
    }

    #[test]
    fn bound_only() {
        let mut lp = LpProblem::new();
        lp.add_var(1.0, 1.0, 10.0);
        let sol = solve_lp(&lp, None);
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.objective, 1.0);
    }

    #[test]
    fn contradictory_rows_are_infeasible() {
        let mut lp = LpProblem::new();
        let x = lp.add_var(0.0, f64::NEG_INFINITY, f64::INFINITY);
        lp.add_row(vec![(x, 1.0)], Sense::Ge, 2.0);
        lp.add_row(vec![(x, 1.0)], Sense::Le, 1.0);
        assert_eq!(solve_lp(&lp, None).status, LpStatus::Infeasible);
    }

    #[test]
    fn simplex_corner() {
        // Vertices of {x + y <= 1, 0 <= x, y <= 1}: (0,0), (1,0), (0,1).
        let vertices = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)];
        let best = vertices.iter().map(|&(x, y)| -x - y).fold(f64::INFINITY, f64::min);
        let mut lp = LpProblem::new();
        let x = lp.add_var(-1.0, 0.0, 1.0);
        let y = lp.add_var(-1.0, 0.0, 1.0);
        lp.add_row(vec![(x, 1.0), (y, 1.0)], Sense::Le, 1.0);
        let sol = solve_lp(&lp, None);
        assert_replays(&lp, &sol);
        assert!((sol.objective - best).abs() < 1e-12);
        assert!((sol.values[0] + sol.values[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unbounded() {
        let mut lp = LpProblem::new();
        let x = lp.add_var(-1.0, 0.0, f64::INFINITY);
        let y = lp.add_var(0.0, 0.0, f64::INFINITY);
        lp.add_row(vec![(x, 1.0), (y, -1.0)], Sense::Le, 1.0);
        assert_eq!(solve_lp(&lp, None).status, LpStatus::Unbounded);
    }

    #[test]
    fn equality_rows_and_free_variables() {
        // min x + 2y + 3z, x + y + z = 6, x - y = 1, z free, z >= -1 via row.
        let mut lp = LpProblem::new();
        let x = lp.add_var(1.0, 0.0, f64::INFINITY);
        let y = lp.add_var(2.0, 0.0, f64::INFINITY);
        let z = lp.add_var(3.0, f64::NEG_INFINITY, f64::INFINITY);
        lp.add_row(vec![(x, 1.0), (y, 1.0), (z, 1.0)], Sense::Eq, 6.0);
        lp.add_row(vec![(x, 1.0), (y, -1.0)], Sense::Eq, 1.0);
        lp.add_row(vec![(z, 1.0)], Sense::Ge, -1.0);
        let sol = solve_lp(&lp, None);
        assert_replays(&lp, &sol);
        // z = -1 and y = 0 give x = 7 but x - y = 1 forces x = y + 1:
        // 2y + 1 + z = 6 -> y = (5 - z) / 2 = 3, x = 4, cost 4 + 6 - 3 = 7.
        assert!((sol.objective - 7.0).abs() < 1e-9, "{}", sol.objective);
    }

    #[test]
    fn iteration_limit() {
        let mut lp = LpProblem::new();
        let x = lp.add_var(-1.0, 0.0, 5.0);
        let y = lp.add_var(-1.0, 0.0, 5.0);
        lp.add_row(vec![(x, 1.0), (y, 2.0)], Sense::Le, 4.0);
        lp.add_row(vec![(x, 3.0), (y, 1.0)], Sense::Le, 6.0);
        let opts = SimplexOptions { max_iterations: Some(0), ..SimplexOptions::default() };
        assert_eq!(solve_lp_with(&lp, None, &opts).status, LpStatus::IterationLimit);
        let sol = solve_lp(&lp, None);
        assert_replays(&lp, &sol);
        assert!((sol.objective + 2.8).abs() < 1e-9);
    }

    #[test]
    fn warm_start_after_bound_change_and_new_row() {
        let mut lp = LpProblem::new();
        let x = lp.add_var(-1.0, 0.0, 5.0);
        let y = lp.add_var(-1.0, 0.0, 5.0);
        lp.add_row(vec![(x, 1.0), (y, 2.0)], Sense::Le, 4.0);
        lp.add_row(vec![(x, 3.0), (y, 1.0)], Sense::Le, 6.0);
        let first = solve_lp(&lp, None);
        assert_replays(&lp, &first);

        let mut tightened = lp.clone();
        tightened.upper[x] = 1.0;
        let warm = solve_lp(&tightened, Some(&first.basis));
        let cold = solve_lp(&tightened, None);
        assert_replays(&tightened, &warm);
        assert!((warm.objective - cold.objective).abs() < 1e-9);

        tightened.add_row(vec![(y, 1.0)], Sense::Le, 1.0);
        assert!(first.basis.is_compatible(&tightened));
        let warm = solve_lp(&tightened, Some(&warm.basis));
        assert_replays(&tightened, &warm);
        assert!((warm.objective + 2.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_assignment_lp() {
        // 4x4 assignment polytope, heavily degenerate; optimum from
        // enumerating all 24 permutations.
        let cost = [[4.0, 1.0, 3.0, 2.0], [2.0, 0.0, 5.0, 3.0], [3.0, 2.0, 2.0, 4.0], [1.0, 3.0, 4.0, 1.0]];
        let mut best = f64::INFINITY;
        let mut perm = [0usize, 1, 2, 3];
        permute(&mut perm, 0, &mut |p| {
            best = best.min((0..4).map(|i| cost[i][p[i]]).sum());
        });
        let mut lp = LpProblem::new();
        let mut v = [[0usize; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                v[i][j] = lp.add_var(cost[i][j], 0.0, 1.0);
            }
        }
        for i in 0..4 {
            lp.add_row((0..4).map(|j| (v[i][j], 1.0)).collect(), Sense::Eq, 1.0);
            lp.add_row((0..4).map(|j| (v[j][i], 1.0)).collect(), Sense::Eq, 1.0);
        }
        let sol = solve_lp(&lp, None);
        assert_replays(&lp, &sol);
        assert!((sol.objective - best).abs() < 1e-9);

        let bland = SimplexOptions { bland_after: 0, ..SimplexOptions::default() };
        let sol = solve_lp_with(&lp, None, &bland);
        assert_replays(&lp, &sol);
        assert!((sol.objective - best).abs() < 1e-9);
    }

    fn permute(p: &mut [usize; 4], k: usize, f: &mut impl FnMut(&[usize; 4])) {
        if k == p.len() {
            f(p);
            return;
        }
        for i in k..p.len() {
            p.swap(k, i);
            permute(p, k + 1, f);
            p.swap(k, i);
        }
    }
}
