//! Exact solver by enumeration: every section-respecting item order
//! ("instant") induces a placeholder assignment problem solved with the
//! Hungarian method; the cheapest instant wins.
//!
//! Instants are walked depth-first in lexicographic order. The Hungarian
//! solver adds one row at a time, so the rows of a shared prefix are solved
//! once for the whole subtree below it.

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::instance::{count_instants, CostMatrix, ProblemInstance};
use crate::solution::{Solution, SolveExtras, SolverTag, Tour};

/// Cost standing in for a type-incompatible placement.
pub const INCOMPATIBLE: f64 = 1e12;

/// Ordered non-stop items; the stop item follows implicitly.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Instant {
    pub items: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AssignmentResult {
    /// Column assigned to each row.
    pub assignment: Vec<usize>,
    pub cost: f64,
}

/// Lexicographic stream of instants for `sections`.
pub fn enumerate_instants(sections: &[Vec<usize>]) -> InstantIter {
    let blocks: Vec<Vec<usize>> = sections
        .iter()
        .map(|s| {
            let mut b = s.clone();
            b.sort_unstable();
            b
        })
        .collect();
    InstantIter { blocks, started: false, done: false }
}

pub struct InstantIter {
    blocks: Vec<Vec<usize>>,
    started: bool,
    done: bool,
}

impl Iterator for InstantIter {
    type Item = Instant;

    fn next(&mut self) -> Option<Instant> {
        if self.done {
            return None;
        }
        if self.started {
            // Odometer: the last block turns fastest.
            let mut advanced = false;
            for b in self.blocks.iter_mut().rev() {
                if next_permutation(b) {
                    advanced = true;
                    break;
                }
                // `next_permutation` wrapped the block back to ascending.
            }
            if !advanced {
                self.done = true;
                return None;
            }
        }
        self.started = true;
        Some(Instant { items: self.blocks.concat() })
    }
}

/// Advance to the next lexicographic permutation; on the last one, reset to
/// ascending order and return false.
fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        v.reverse();
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Minimum-cost assignment of every row to a distinct column.
pub fn hungarian(cost: &[Vec<f64>]) -> Result<AssignmentResult> {
    let m = cost.len();
    let k = cost.first().map_or(0, |r| r.len());
    if m > k {
        return Err(Error::AssignmentShape { rows: m, cols: k });
    }
    if cost.iter().any(|r| r.len() != k || r.iter().any(|c| !c.is_finite())) {
        return Err(Error::InvalidArgument("cost matrix must be rectangular and finite".into()));
    }
    let mut h = RowHungarian::new(m, k);
    for row in cost {
        h.add_row(row);
    }
    let assignment = h.assignment();
    let total = assignment.iter().enumerate().map(|(r, &c)| cost[r][c]).sum();
    Ok(AssignmentResult { assignment, cost: total })
}

/// Shortest augmenting path Hungarian method with potentials, one row at a
/// time; the state after `r` rows is optimal for those rows.
#[derive(Clone)]
struct RowHungarian {
    k: usize,
    rows: usize,
    u: Vec<f64>,
    v: Vec<f64>,
    /// Row (1-based) matched to column `j` (1-based); 0 is free.
    p: Vec<usize>,
    way: Vec<usize>,
    minv: Vec<f64>,
    used: Vec<bool>,
    /// Row slices by 1-based index, kept for reduced costs of earlier rows.
    row_costs: Vec<f64>,
}

impl RowHungarian {
    fn new(m: usize, k: usize) -> Self {
        RowHungarian {
            k,
            rows: 0,
            u: vec![0.0; m + 1],
            v: vec![0.0; k + 1],
            p: vec![0; k + 1],
            way: vec![0; k + 1],
            minv: vec![0.0; k + 1],
            used: vec![false; k + 1],
            row_costs: vec![0.0; (m + 1) * k],
        }
    }

    fn add_row(&mut self, row: &[f64]) {
        let k = self.k;
        self.rows += 1;
        let i = self.rows;
        self.row_costs[i * k..(i + 1) * k].copy_from_slice(row);
        self.p[0] = i;
        let mut j0 = 0usize;
        self.minv.iter_mut().for_each(|x| *x = f64::INFINITY);
        self.used.iter_mut().for_each(|x| *x = false);
        loop {
            self.used[j0] = true;
            let i0 = self.p[j0];
            let base = i0 * k;
            let ui0 = self.u[i0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=k {
                if !self.used[j] {
                    let cur = self.row_costs[base + j - 1] - ui0 - self.v[j];
                    if cur < self.minv[j] {
                        self.minv[j] = cur;
                        self.way[j] = j0;
                    }
                    if self.minv[j] < delta {
                        delta = self.minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=k {
                if self.used[j] {
                    self.u[self.p[j]] += delta;
                    self.v[j] -= delta;
                } else {
                    self.minv[j] -= delta;
                }
            }
            j0 = j1;
            if self.p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = self.way[j0];
            self.p[j0] = self.p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    fn assignment(&self) -> Vec<usize> {
        let mut out = vec![0; self.rows];
        for j in 1..=self.k {
            if self.p[j] != 0 {
                out[self.p[j] - 1] = j - 1;
            }
        }
        out
    }

    fn cost(&self) -> f64 {
        let k = self.k;
        (1..=k)
            .filter(|&j| self.p[j] != 0)
            .map(|j| self.row_costs[self.p[j] * k + j - 1])
            .sum()
    }

    fn snapshot(&self) -> Snapshot {
        Snapshot { rows: self.rows, u: self.u.clone(), v: self.v.clone(), p: self.p.clone() }
    }

    fn restore(&mut self, s: &Snapshot) {
        self.rows = s.rows;
        self.u.copy_from_slice(&s.u);
        self.v.copy_from_slice(&s.v);
        self.p.copy_from_slice(&s.p);
    }
}

struct Snapshot {
    rows: usize,
    u: Vec<f64>,
    v: Vec<f64>,
    p: Vec<usize>,
}

/// Slot-cost table: row for the consecutive pair `(a, b)` holds
/// `c(a, p) + c(p, b)` for every assignable placeholder `p`.
struct SlotTable {
    n: usize,
    cols: Vec<usize>,
    data: Vec<f64>,
}

impl SlotTable {
    fn new(instance: &ProblemInstance, cost: &CostMatrix) -> Self {
        let n = instance.n_items();
        let start = instance.start_placeholder();
        let cols: Vec<usize> = instance.placeholder_nodes().filter(|&p| p != start).collect();
        let k = cols.len();
        let mut data = vec![0.0; n * n * k];
        for a in 0..n {
            for b in 0..n {
                for (c, &p) in cols.iter().enumerate() {
                    data[(a * n + b) * k + c] = if instance.compatible(a, p) {
                        cost.get(a, p) + cost.get(p, b)
                    } else {
                        INCOMPATIBLE
                    };
                }
            }
        }
        SlotTable { n, cols, data }
    }

    fn row(&self, a: usize, b: usize) -> &[f64] {
        let k = self.cols.len();
        &self.data[(a * self.n + b) * k..(a * self.n + b + 1) * k]
    }
}

/// Best instant found in one subtree: `(cost, order, items, assignment)`.
type Best = (f64, usize, Vec<usize>, Vec<usize>);

struct Search<'a> {
    table: &'a SlotTable,
    /// Section block of each position in the instant.
    block_of_pos: Vec<usize>,
    blocks: Vec<Vec<usize>>,
    stop: usize,
    lead: Vec<f64>,
    tail: f64,
    seq: Vec<usize>,
    used: Vec<bool>,
    hung: RowHungarian,
    best: Option<(f64, Vec<usize>, Vec<usize>)>,
    evaluated: u64,
}

impl Search<'_> {
    /// Extend `seq` from position `seq.len()`; rows for all complete pairs
    /// are already in `hung`.
    fn dfs(&mut self) {
        let d = self.seq.len();
        let m = self.block_of_pos.len();
        if d == m {
            let last = if m == 0 { None } else { Some(self.seq[m - 1]) };
            let snap = self.hung.snapshot();
            if let Some(a) = last {
                let table = self.table;
                self.hung.add_row(table.row(a, self.stop));
            }
            let first = self.seq.first().copied().unwrap_or(self.stop);
            let total = self.lead[first] + self.tail + self.hung.cost();
            self.evaluated += 1;
            if self.best.as_ref().is_none_or(|b| total < b.0) {
                self.best = Some((total, self.seq.clone(), self.hung.assignment()));
            }
            self.hung.restore(&snap);
            return;
        }
        let block = self.block_of_pos[d];
        for idx in 0..self.blocks[block].len() {
            let item = self.blocks[block][idx];
            if self.used[item] {
                continue;
            }
            self.used[item] = true;
            let snap = (d > 0).then(|| {
                let s = self.hung.snapshot();
                let table = self.table;
                self.hung.add_row(table.row(self.seq[d - 1], item));
                s
            });
            self.seq.push(item);
            self.dfs();
            self.seq.pop();
            if let Some(s) = snap {
                self.hung.restore(&s);
            }
            self.used[item] = false;
        }
    }
}

/// Enumerate all instants and return the cheapest tour.
pub fn solve_shaking(instance: &ProblemInstance, cost: &CostMatrix) -> Result<Solution> {
    instance.validate().into_result()?;
    let started = std::time::Instant::now();
    let n = instance.n_items();
    let stop = instance.stop_item();
    let start = instance.start_placeholder();
    let table = SlotTable::new(instance, cost);
    let sections = instance.effective_sections();
    let m = n - 1;
    if table.cols.len() < m {
        return Err(Error::AssignmentShape { rows: m, cols: table.cols.len() });
    }

    let mut blocks: Vec<Vec<usize>> = sections.clone();
    for b in &mut blocks {
        b.sort_unstable();
    }
    let block_of_pos: Vec<usize> =
        blocks.iter().enumerate().flat_map(|(k, b)| std::iter::repeat_n(k, b.len())).collect();
    let lead: Vec<f64> = (0..n).map(|i| cost.get(start, i)).collect();
    let tail = cost.get(stop, start);

    // Split the search on a prefix long enough to feed the thread pool.
    let want = 8 * rayon::current_num_threads().max(1);
    let mut prefixes: Vec<Vec<usize>> = vec![Vec::new()];
    while prefixes.len() < want && prefixes[0].len() < m {
        let d = prefixes[0].len();
        let block = block_of_pos[d];
        prefixes = prefixes
            .into_iter()
            .flat_map(|pre| {
                blocks[block]
                    .iter()
                    .filter(|i| !pre.contains(i))
                    .map(|&i| {
                        let mut next = pre.clone();
                        next.push(i);
                        next
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }

    let results: Vec<(Option<Best>, u64)> = prefixes
        .par_iter()
        .enumerate()
        .map(|(order, prefix)| {
            let mut search = Search {
                table: &table,
                block_of_pos: block_of_pos.clone(),
                blocks: blocks.clone(),
                stop,
                lead: lead.clone(),
                tail,
                seq: Vec::with_capacity(m),
                used: vec![false; n],
                hung: RowHungarian::new(m, table.cols.len()),
                best: None,
                evaluated: 0,
            };
            for (d, &item) in prefix.iter().enumerate() {
                if d > 0 {
                    search.hung.add_row(table.row(prefix[d - 1], item));
                }
                search.used[item] = true;
                search.seq.push(item);
            }
            search.dfs();
            let best = search.best.map(|(c, items, assign)| (c, order, items, assign));
            (best, search.evaluated)
        })
        .collect();

    let evaluated: u64 = results.iter().map(|r| r.1).sum();
    let best = results
        .into_iter()
        .filter_map(|r| r.0)
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .ok_or_else(|| Error::Infeasible("no instant to evaluate".into()))?;
    let (total, _, items, assignment) = best;
    if total >= INCOMPATIBLE {
        return Err(Error::Infeasible("every instant needs an incompatible placement".into()));
    }

    let mut nodes = vec![start];
    for (slot, &item) in items.iter().enumerate() {
        nodes.push(item);
        nodes.push(table.cols[assignment[slot]]);
    }
    nodes.push(stop);
    let tour = Tour::from_nodes(nodes, instance, cost);
    let mut solution = Solution::new(tour, SolverTag::Shaking, started.elapsed().as_secs_f64());
    solution.extras = SolveExtras { instants: Some(evaluated), ..SolveExtras::default() };
    debug_assert_eq!(BigUint::from(evaluated), count_instants(&sections.iter().map(Vec::len).collect::<Vec<_>>()));
    Ok(solution)
}

/// Cost of the best placement for one instant, as used by [`solve_shaking`].
pub fn evaluate_instant(instance: &ProblemInstance, cost: &CostMatrix, instant: &Instant) -> Result<AssignmentResult> {
    let table = SlotTable::new(instance, cost);
    let stop = instance.stop_item();
    let start = instance.start_placeholder();
    let mut seq = instant.items.clone();
    seq.push(stop);
    let rows: Vec<Vec<f64>> = seq.windows(2).map(|w| table.row(w[0], w[1]).to_vec()).collect();
    let mut result = if rows.is_empty() {
        AssignmentResult { assignment: Vec::new(), cost: 0.0 }
    } else {
        hungarian(&rows)?
    };
    result.assignment = result.assignment.into_iter().map(|c| table.cols[c]).collect();
    result.cost += cost.get(start, seq[0]) + cost.get(stop, start);
    Ok(result)
}
