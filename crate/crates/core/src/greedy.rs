//! Nearest-available baseline heuristic.

use crate::error::{Error, Result};
use crate::instance::{CostMatrix, ProblemInstance};
use crate::solution::{Solution, SolverTag, Tour};

/// Section by section, walk to the nearest unvisited item, then drop it on the
/// nearest free compatible placeholder. The start placeholder is kept for the
/// stop item.
pub fn solve_greedy(instance: &ProblemInstance, cost: &CostMatrix) -> Result<Solution> {
    instance.validate().into_result()?;
    let started = std::time::Instant::now();
    let start = instance.start_placeholder();
    let mut used = vec![false; instance.n_nodes()];
    used[start] = true;
    let mut pos = start;
    let mut nodes = vec![start];

    for section in instance.effective_sections() {
        let mut remaining = section.clone();
        remaining.sort_unstable();
        while !remaining.is_empty() {
            let k = argmin(remaining.iter().map(|&i| cost.get(pos, i)));
            let item = remaining.remove(k);
            nodes.push(item);
            let free: Vec<usize> = instance
                .placeholder_nodes()
                .filter(|&p| !used[p] && instance.compatible(item, p))
                .collect();
            if free.is_empty() {
                return Err(Error::Infeasible(format!("no free placeholder for item {item}")));
            }
            let p = free[argmin(free.iter().map(|&p| cost.get(item, p)))];
            used[p] = true;
            nodes.push(p);
            pos = p;
        }
    }
    nodes.push(instance.stop_item());

    let tour = Tour::from_nodes(nodes, instance, cost);
    Ok(Solution::new(tour, SolverTag::Greedy, started.elapsed().as_secs_f64()))
}

/// First index of the smallest value.
fn argmin(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::INFINITY);
    for (k, v) in values.enumerate() {
        if v < best.1 {
            best = (k, v);
        }
    }
    best.0
}
