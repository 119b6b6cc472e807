//! Build the MIP for an instance and solve it by branch-and-bound.
//!
//! ```text
//! cargo run --release --example mip [n] [seed]
//! ```

use jra::bnb::{mip_solution, MipParams};
use jra::greedy::solve_greedy;
use jra::instance::{build_cost_matrix, generate_random_instance};
use jra::model::{build_model, ModelOptions};

fn main() -> jra::Result<()> {
    let args: Vec<u64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let n = args.first().copied().unwrap_or(9) as usize;
    let seed = args.get(1).copied().unwrap_or(0);

    // Two sections of roughly equal size, two spare placeholders.
    let sizes = [(n - 1) / 2, n - 1 - (n - 1) / 2];
    let inst = generate_random_instance(n, &sizes, n + 2, seed)?;
    let cost = build_cost_matrix(&inst)?;
    let model = build_model(&inst, &cost, &ModelOptions::for_instance(&inst))?;
    println!("{} model: {} variables, {} constraints", model.variant, model.num_vars(), model.constraints.len());
    for (tag, count) in model.constraint_counts() {
        println!("  {tag:?}: {count}");
    }

    let warm = solve_greedy(&inst, &cost)?;
    let params = MipParams { warm_start: Some(warm.tour.clone()), ..MipParams::default() };
    let (sol, result) = mip_solution(&inst, &model, &params)?;
    println!("greedy start {:.4} m", warm.objective);
    println!(
        "optimum {:.4} m, bound {:.4}, {} nodes, {} cuts, {:.2} s",
        sol.objective, result.best_bound, result.nodes_explored, result.cuts_added, result.wall_time
    );
    println!("tour {:?}", sol.tour.nodes);
    for (item, ph) in sol.tour.placements.iter().filter(|(i, _)| **i != inst.stop_item()) {
        println!("  item {item} -> placeholder {ph}");
    }
    Ok(())
}
