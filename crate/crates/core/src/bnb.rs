//! Best-bound branch-and-bound over the LP relaxation, with lazy subtour
//! cuts for models that do not carry their own connectivity constraints.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::rc::Rc;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::instance::{CostMatrix, ProblemInstance};
use crate::model::{ConstraintTag, Integrality, LinConstraint, MipModel, Sense};
use crate::simplex::{solve_lp, Basis, LpProblem, LpStatus};
use crate::solution::{encode_unchecked, extract_tour, Solution, SolverTag, SolveExtras, Tour};

#[derive(Clone, Debug)]
pub struct MipParams {
    /// Absolute optimality gap.
    pub gap_tol: f64,
    pub int_tol: f64,
    pub node_limit: Option<u64>,
    pub time_limit: Option<Duration>,
    pub warm_start: Option<Tour>,
}

impl Default for MipParams {
    fn default() -> Self {
        Self { gap_tol: 1e-6, int_tol: 1e-6, node_limit: None, time_limit: None, warm_start: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MipStatus {
    Optimal,
    Infeasible,
    /// Node or time limit hit; the incumbent (if any) and bound are reported.
    Aborted,
}

impl fmt::Display for MipStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TracePoint {
    pub nodes: u64,
    pub best_bound: f64,
    pub incumbent: f64,
}

#[derive(Clone, Debug)]
pub struct MipResult {
    pub status: MipStatus,
    /// Incumbent objective, `+inf` without one.
    pub objective: f64,
    /// Incumbent vector, empty without one.
    pub values: Vec<f64>,
    pub best_bound: f64,
    pub gap: f64,
    pub nodes_explored: u64,
    pub cuts_added: u64,
    pub wall_time: f64,
    /// Bound and incumbent after every processed node.
    pub trace: Vec<TracePoint>,
    /// Largest row or bound violation of any optimal node LP, replayed.
    pub lp_max_violation: f64,
}

impl MipResult {
    pub fn has_incumbent(&self) -> bool {
        !self.values.is_empty()
    }
}

/// `sum_{i,j in S} x_ij <= |S| - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubtourCut {
    pub nodes: Vec<usize>,
}

impl SubtourCut {
    pub fn to_constraint(&self, model: &MipModel, name: String) -> LinConstraint {
        let mut terms = Vec::new();
        for &u in &self.nodes {
            for &v in &self.nodes {
                if let Some(id) = model.x_var(u, v) {
                    terms.push((id, 1.0));
                }
            }
        }
        LinConstraint {
            name,
            tag: ConstraintTag::G5,
            terms,
            sense: Sense::Le,
            rhs: self.nodes.len() as f64 - 1.0,
        }
    }
}

/// One cut per connected component of the support graph `x > 0.5` when it
/// has more than one component.
pub fn separate_subtours(values: &[f64], model: &MipModel) -> Vec<SubtourCut> {
    let nn = model.n_nodes();
    let mut parent: Vec<usize> = (0..nn).collect();
    fn find(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    let mut touched = vec![false; nn];
    for (from, to, id) in model.edge_vars() {
        if values[id] > 0.5 {
            touched[from] = true;
            touched[to] = true;
            let (a, b) = (find(&mut parent, from), find(&mut parent, to));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; nn];
    for v in 0..nn {
        if !touched[v] {
            continue;
        }
        let r = find(&mut parent, v);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(v);
    }
    if groups.len() <= 1 {
        return Vec::new();
    }
    groups.into_iter().map(|nodes| SubtourCut { nodes }).collect()
}

struct Node {
    bound: f64,
    seq: u64,
    /// Bound changes along the path from the root.
    fixes: Vec<(usize, f64, f64)>,
    basis: Option<Rc<Basis>>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // Max-heap order: lowest bound first, then first created.
    fn cmp(&self, other: &Self) -> Ordering {
        other.bound.total_cmp(&self.bound).then_with(|| other.seq.cmp(&self.seq))
    }
}

pub fn solve_mip(model: &MipModel, params: &MipParams) -> Result<MipResult> {
    let started = Instant::now();
    let mut lp = LpProblem::from_model(model);
    let root_lo = lp.lower.clone();
    let root_hi = lp.upper.clone();
    let integer: Vec<usize> = model
        .variables
        .iter()
        .filter(|v| v.integrality != Integrality::Continuous)
        .map(|v| v.id)
        .collect();

    let mut incumbent = f64::INFINITY;
    let mut best_values: Vec<f64> = Vec::new();
    if let Some(tour) = &params.warm_start {
        match encode_unchecked(tour, model) {
            Ok(values) if model.is_feasible(&values, 1e-9) => {
                incumbent = model.objective_value(&values);
                best_values = values;
                log::debug!("warm start installed, objective {incumbent}");
            }
            _ => log::debug!("warm start rejected"),
        }
    }

    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    heap.push(Node { bound: f64::NEG_INFINITY, seq, fixes: Vec::new(), basis: None });
    let mut nodes_explored = 0u64;
    let mut cuts_added = 0u64;
    let mut trace = Vec::new();
    let mut closing_bound = None;
    let mut aborted = false;
    let mut lp_max_violation = 0.0f64;

    while let Some(node) = heap.pop() {
        if node.bound >= incumbent - params.gap_tol {
            // Every open node is at least this good.
            closing_bound = Some(node.bound.min(incumbent));
            break;
        }
        let over_nodes = params.node_limit.is_some_and(|l| nodes_explored >= l);
        let over_time = params.time_limit.is_some_and(|l| started.elapsed() >= l);
        if over_nodes || over_time {
            heap.push(node);
            aborted = true;
            break;
        }
        nodes_explored += 1;

        lp.lower.copy_from_slice(&root_lo);
        lp.upper.copy_from_slice(&root_hi);
        for &(v, lo, hi) in &node.fixes {
            lp.lower[v] = lo;
            lp.upper[v] = hi;
        }

        let mut basis = node.basis.clone();
        loop {
            let sol = solve_lp(&lp, basis.as_deref());
            match sol.status {
                LpStatus::Optimal => lp_max_violation = lp_max_violation.max(lp.max_violation(&sol.values)),
                LpStatus::Infeasible => break,
                other => {
                    return Err(Error::Solver(format!(
                        "LP relaxation returned {other} at node {nodes_explored}"
                    )))
                }
            }
            if sol.objective >= incumbent - params.gap_tol {
                break;
            }
            let branch = most_fractional(&sol.values, &integer, params.int_tol);
            let Some(var) = branch else {
                let mut values = sol.values;
                for &v in &integer {
                    values[v] = values[v].round();
                }
                if model.lazy_subtour_enabled {
                    let cuts = separate_subtours(&values, model);
                    if !cuts.is_empty() {
                        for cut in &cuts {
                            let row = cut.to_constraint(model, format!("G5_CUT_{cuts_added}"));
                            lp.add_row(row.terms, row.sense, row.rhs);
                            cuts_added += 1;
                        }
                        basis = Some(Rc::new(sol.basis));
                        continue;
                    }
                }
                let objective = model.objective_value(&values);
                if objective < incumbent {
                    incumbent = objective;
                    best_values = values;
                    log::debug!("node {nodes_explored}: incumbent {incumbent}");
                }
                break;
            };
            let bound = sol.objective.max(node.bound);
            let shared = Rc::new(sol.basis);
            for value in [1.0, 0.0] {
                let mut fixes = node.fixes.clone();
                fixes.push((var, value, value));
                seq += 1;
                heap.push(Node { bound, seq, fixes, basis: Some(shared.clone()) });
            }
            break;
        }

        let open = heap.peek().map_or(f64::INFINITY, |n| n.bound);
        if nodes_explored.is_multiple_of(50) {
            log::debug!(
                "{nodes_explored} nodes, {} open, bound {:.6}, incumbent {incumbent:.6}, {:.1}s",
                heap.len(),
                open.min(incumbent),
                started.elapsed().as_secs_f64()
            );
        }
        trace.push(TracePoint {
            nodes: nodes_explored,
            best_bound: open.min(incumbent),
            incumbent,
        });
    }

    let open = heap.peek().map_or(f64::INFINITY, |n| n.bound);
    let best_bound = closing_bound.unwrap_or(open.min(incumbent));
    let status = if aborted {
        MipStatus::Aborted
    } else if best_values.is_empty() {
        MipStatus::Infeasible
    } else {
        MipStatus::Optimal
    };
    let gap = if best_values.is_empty() { f64::INFINITY } else { (incumbent - best_bound).max(0.0) };
    Ok(MipResult {
        status,
        objective: incumbent,
        values: best_values,
        best_bound,
        gap,
        nodes_explored,
        cuts_added,
        wall_time: started.elapsed().as_secs_f64(),
        trace,
        lp_max_violation,
    })
}

fn most_fractional(values: &[f64], integer: &[usize], tol: f64) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for &v in integer {
        let frac = (values[v] - values[v].round()).abs();
        if frac > tol && best.is_none_or(|(_, f)| frac > f) {
            best = Some((v, frac));
        }
    }
    best.map(|(v, _)| v)
}

/// Solve `model` and decode the optimum into a solution for `instance`.
pub fn mip_solution(
    instance: &ProblemInstance,
    model: &MipModel,
    params: &MipParams,
) -> Result<(Solution, MipResult)> {
    let result = solve_mip(model, params)?;
    match result.status {
        MipStatus::Optimal => {}
        MipStatus::Infeasible => return Err(Error::Infeasible(format!("model {} has no feasible tour", model.name))),
        MipStatus::Aborted => {
            return Err(Error::Solver(format!(
                "search aborted after {} nodes (incumbent {}, bound {})",
                result.nodes_explored, result.objective, result.best_bound
            )))
        }
    }
    let solution = decode_solution(instance, model, &result)?;
    Ok((solution, result))
}

/// Turn the incumbent of `result` into a solution, whether or not the search
/// finished. Fails when there is no incumbent.
pub fn decode_solution(instance: &ProblemInstance, model: &MipModel, result: &MipResult) -> Result<Solution> {
    if result.values.is_empty() {
        return Err(Error::Solver(format!("no incumbent after {} nodes", result.nodes_explored)));
    }
    let tour = extract_tour(&result.values, model, instance)?;
    let mut solution = Solution::new(tour, SolverTag::Mip, result.wall_time);
    solution.extras = SolveExtras {
        nodes: Some(result.nodes_explored),
        cuts: Some(result.cuts_added),
        instants: None,
        best_bound: Some(result.best_bound),
    };
    Ok(solution)
}

/// Build the model for `instance` with its natural options and solve it.
pub fn solve_instance(instance: &ProblemInstance, cost: &CostMatrix, params: &MipParams) -> Result<(Solution, MipResult)> {
    let model = crate::model::build_model(instance, cost, &crate::model::ModelOptions::for_instance(instance))?;
    mip_solution(instance, &model, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{build_cost_matrix, generate_random_instance};
    use crate::model::{build_model, ModelOptions};
    use crate::solution::{encode_tour, validate_tour};

    #[test]
    fn single_item_is_forced() {
        let inst = generate_random_instance(1, &[], 1, 9).unwrap();
        let cost = build_cost_matrix(&inst).unwrap();
        let (sol, res) = solve_instance(&inst, &cost, &MipParams::default()).unwrap();
        assert_eq!(res.status, MipStatus::Optimal);
        assert_eq!(res.nodes_explored, 1);
        assert!((sol.objective - 2.0 * cost.get(0, 1)).abs() < 1e-9);
    }

    #[test]
    fn two_disjoint_cycles() {
        let inst = generate_random_instance(2, &[], 2, 1).unwrap();
        let cost = build_cost_matrix(&inst).unwrap();
        let model = build_model(&inst, &cost, &ModelOptions::default()).unwrap();
        let mut values = vec![0.0; model.num_vars()];
        for (u, v) in [(0, 2), (2, 0), (1, 3), (3, 1)] {
            values[model.x_var(u, v).unwrap()] = 1.0;
        }
        let cuts = separate_subtours(&values, &model);
        assert_eq!(cuts, vec![SubtourCut { nodes: vec![0, 2] }, SubtourCut { nodes: vec![1, 3] }]);
        for cut in &cuts {
            assert!(!cut.to_constraint(&model, "c".into()).is_satisfied(&values, 1e-9));
        }
        let tour = crate::solution::Tour::from_nodes(vec![3, 0, 2, 1], &inst, &cost);
        let values = encode_tour(&tour, &model, &inst).unwrap();
        assert!(separate_subtours(&values, &model).is_empty());
    }

    #[test]
    fn node_limit_aborts_with_bound() {
        let inst = generate_random_instance(5, &[], 5, 3).unwrap();
        let cost = build_cost_matrix(&inst).unwrap();
        let model = build_model(&inst, &cost, &ModelOptions::default()).unwrap();
        let params = MipParams { node_limit: Some(0), ..MipParams::default() };
        let res = solve_mip(&model, &params).unwrap();
        assert_eq!(res.status, MipStatus::Aborted);
        assert_eq!(res.nodes_explored, 0);
        assert!(!res.has_incumbent());
    }

    #[test]
    fn time_frame_optimum_is_a_valid_tour() {
        let inst = generate_random_instance(6, &[2, 3], 7, 5).unwrap();
        let cost = build_cost_matrix(&inst).unwrap();
        let (sol, res) = solve_instance(&inst, &cost, &MipParams::default()).unwrap();
        assert_eq!(res.status, MipStatus::Optimal);
        assert_eq!(res.cuts_added, 0);
        assert!(res.gap <= 1e-6);
        assert!(validate_tour(&sol.tour, &inst).is_ok());
        assert!((sol.objective - res.objective).abs() < 1e-9);
        for w in res.trace.windows(2) {
            assert!(w[1].best_bound >= w[0].best_bound - 1e-9);
            assert!(w[1].incumbent <= w[0].incumbent);
        }
        let warm = MipParams { warm_start: Some(sol.tour.clone()), ..MipParams::default() };
        let (again, _) = solve_instance(&inst, &cost, &warm).unwrap();
        assert!((again.objective - sol.objective).abs() < 1e-9);
    }
}
