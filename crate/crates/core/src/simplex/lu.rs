//! Sparse LU factorization of a simplex basis with product-form updates.
//!
//! Left-looking elimination with threshold partial pivoting. Columns are
//! processed sparsest first and, among acceptable pivots, the row with the
//! fewest entries wins, which keeps fill low for the 0/1-heavy bases seen
//! in routing models.

const NONE: usize = usize::MAX;
const PIVOT_THRESHOLD: f64 = 0.1;
const SINGULAR_TOL: f64 = 1e-11;

/// Sparse column: `(row, value)` pairs.
pub(crate) type SparseCol = Vec<(usize, f64)>;

#[derive(Debug)]
pub(crate) struct Singular {
    /// Basis positions whose column could not be pivoted.
    pub positions: Vec<usize>,
    /// Rows left without a pivot, one per entry of `positions`.
    pub rows: Vec<usize>,
}

#[derive(Clone, Debug)]
struct Eta {
    pos: usize,
    pivot: f64,
    others: Vec<(usize, f64)>,
}

#[derive(Clone, Debug, Default)]
pub(crate) struct Factor {
    m: usize,
    /// Basis position factored at each step.
    col_of_step: Vec<usize>,
    /// Row pivoted at each step.
    row_of_step: Vec<usize>,
    /// L columns per step, excluding the unit diagonal (original row indices).
    l_cols: Vec<SparseCol>,
    /// U columns per step, strictly upper part (step indices).
    u_cols: Vec<SparseCol>,
    u_diag: Vec<f64>,
    etas: Vec<Eta>,
}

impl Factor {
    pub fn num_updates(&self) -> usize {
        self.etas.len()
    }

    /// Factor the `m x m` matrix whose column `k` is `cols[k]`.
    pub fn new(m: usize, cols: &[SparseCol]) -> Result<Self, Singular> {
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by_key(|&k| (cols[k].len(), k));

        let mut row_count = vec![0usize; m];
        for col in cols {
            for &(r, _) in col {
                row_count[r] += 1;
            }
        }

        let mut step_of_row = vec![NONE; m];
        let mut f = Factor {
            m,
            col_of_step: Vec::with_capacity(m),
            row_of_step: Vec::with_capacity(m),
            l_cols: Vec::with_capacity(m),
            u_cols: Vec::with_capacity(m),
            u_diag: Vec::with_capacity(m),
            etas: Vec::new(),
        };

        let mut work = vec![0.0f64; m];
        let mut mark = vec![false; m];
        let mut pattern: Vec<usize> = Vec::new();
        let mut topo: Vec<usize> = Vec::new();
        let mut dfs_stack: Vec<(usize, usize)> = Vec::new();
        let mut visited = vec![false; m];
        let mut singular_positions = Vec::new();

        for &pos in &order {
            // Nonzero pattern of L \ b via depth-first search from b's rows.
            pattern.clear();
            topo.clear();
            for &(r, v) in &cols[pos] {
                work[r] += v;
                if !mark[r] {
                    mark[r] = true;
                    pattern.push(r);
                }
            }
            for &(r, _) in &cols[pos] {
                if visited[r] || step_of_row[r] == NONE {
                    continue;
                }
                dfs_stack.push((r, 0));
                visited[r] = true;
                while let Some(&(row, next)) = dfs_stack.last() {
                    let lcol = &f.l_cols[step_of_row[row]];
                    let mut k = next;
                    let mut descend = None;
                    while k < lcol.len() {
                        let child = lcol[k].0;
                        k += 1;
                        if !mark[child] {
                            mark[child] = true;
                            pattern.push(child);
                        }
                        if !visited[child] && step_of_row[child] != NONE {
                            visited[child] = true;
                            descend = Some(child);
                            break;
                        }
                    }
                    if let Some(top) = dfs_stack.last_mut() {
                        top.1 = k;
                    }
                    match descend {
                        Some(child) => dfs_stack.push((child, 0)),
                        None => {
                            topo.push(row);
                            dfs_stack.pop();
                        }
                    }
                }
            }
            // Eliminate in reverse post-order.
            for &row in topo.iter().rev() {
                let s = step_of_row[row];
                let xr = work[row];
                if xr != 0.0 {
                    for &(j, lv) in &f.l_cols[s] {
                        work[j] -= lv * xr;
                    }
                }
            }

            let mut max_abs = 0.0f64;
            for &r in &pattern {
                if step_of_row[r] == NONE {
                    max_abs = max_abs.max(work[r].abs());
                }
            }
            let mut pivot_row = NONE;
            if max_abs > SINGULAR_TOL {
                let threshold = PIVOT_THRESHOLD * max_abs;
                let mut best = (usize::MAX, usize::MAX);
                for &r in &pattern {
                    if step_of_row[r] == NONE && work[r].abs() >= threshold {
                        let key = (row_count[r], r);
                        if key < best {
                            best = key;
                            pivot_row = r;
                        }
                    }
                }
            }

            if pivot_row == NONE {
                singular_positions.push(pos);
            } else {
                let step = f.col_of_step.len();
                let pivot = work[pivot_row];
                let mut ucol = Vec::new();
                let mut lcol = Vec::new();
                for &r in &pattern {
                    let v = work[r];
                    if r == pivot_row || v == 0.0 {
                        continue;
                    }
                    let s = step_of_row[r];
                    if s != NONE {
                        ucol.push((s, v));
                    } else if v.abs() > 1e-14 {
                        lcol.push((r, v / pivot));
                    }
                }
                step_of_row[pivot_row] = step;
                f.col_of_step.push(pos);
                f.row_of_step.push(pivot_row);
                f.l_cols.push(lcol);
                f.u_cols.push(ucol);
                f.u_diag.push(pivot);
            }

            for &r in &pattern {
                work[r] = 0.0;
                mark[r] = false;
            }
            for &r in &topo {
                visited[r] = false;
            }
        }

        if singular_positions.is_empty() {
            Ok(f)
        } else {
            let rows = (0..m).filter(|&r| step_of_row[r] == NONE).collect();
            Err(Singular { positions: singular_positions, rows })
        }
    }

    /// Solve `B x = rhs` in place; `rhs` is indexed by row on input and by
    /// basis position on output.
    pub fn ftran(&self, rhs: &mut [f64], scratch: &mut Vec<f64>) {
        let m = self.m;
        // L w = rhs, w indexed by step.
        scratch.clear();
        scratch.resize(m, 0.0);
        for s in 0..m {
            let w = rhs[self.row_of_step[s]];
            scratch[s] = w;
            if w != 0.0 {
                for &(j, lv) in &self.l_cols[s] {
                    rhs[j] -= lv * w;
                }
            }
        }
        // U v = w, backwards.
        for k in (0..m).rev() {
            let v = scratch[k] / self.u_diag[k];
            scratch[k] = v;
            if v != 0.0 {
                for &(s, uv) in &self.u_cols[k] {
                    scratch[s] -= uv * v;
                }
            }
        }
        for k in 0..m {
            rhs[self.col_of_step[k]] = scratch[k];
        }
        for eta in &self.etas {
            let xr = rhs[eta.pos];
            if xr != 0.0 {
                rhs[eta.pos] = xr * eta.pivot;
                for &(i, v) in &eta.others {
                    rhs[i] += v * xr;
                }
            }
        }
    }

    /// Solve `B^T y = rhs` in place; `rhs` is indexed by basis position on
    /// input and by row on output.
    pub fn btran(&self, rhs: &mut [f64], scratch: &mut Vec<f64>) {
        let m = self.m;
        for eta in self.etas.iter().rev() {
            let mut acc = rhs[eta.pos] * eta.pivot;
            for &(i, v) in &eta.others {
                acc += rhs[i] * v;
            }
            rhs[eta.pos] = acc;
        }
        scratch.clear();
        scratch.resize(m, 0.0);
        // U^T u = Q^T rhs.
        for k in 0..m {
            let mut acc = rhs[self.col_of_step[k]];
            for &(s, uv) in &self.u_cols[k] {
                acc -= uv * scratch[s];
            }
            scratch[k] = acc / self.u_diag[k];
        }
        // L~^T y = u, backwards over steps.
        for v in rhs.iter_mut() {
            *v = 0.0;
        }
        for s in (0..m).rev() {
            let mut acc = scratch[s];
            for &(j, lv) in &self.l_cols[s] {
                acc -= lv * rhs[j];
            }
            rhs[self.row_of_step[s]] = acc;
        }
    }

    /// Record the replacement of basis position `pos` by a column whose
    /// FTRAN image is `alpha`.
    pub fn update(&mut self, pos: usize, alpha: &[f64]) {
        let ar = alpha[pos];
        let pivot = 1.0 / ar;
        let others = alpha
            .iter()
            .enumerate()
            .filter(|&(i, &v)| i != pos && v.abs() > 1e-13)
            .map(|(i, &v)| (i, -v / ar))
            .collect();
        self.etas.push(Eta { pos, pivot, others });
    }
}
