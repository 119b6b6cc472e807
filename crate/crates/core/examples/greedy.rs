//! How far the nearest-neighbour baseline is from the optimum.

use jra::greedy::solve_greedy;
use jra::instance::{build_cost_matrix, generate_random_instance};
use jra::shaking::solve_shaking;
use jra::solution::greedy_error_pct;

fn main() -> jra::Result<()> {
    let mut total = 0.0;
    let count = 10;
    for seed in 0..count {
        let inst = generate_random_instance(13, &[3, 5, 4], 14, seed)?;
        let cost = build_cost_matrix(&inst)?;
        let greedy = solve_greedy(&inst, &cost)?;
        let exact = solve_shaking(&inst, &cost)?;
        let pct = greedy_error_pct(greedy.objective, exact.objective)?;
        total += pct;
        println!("seed {seed}: greedy {:.4}  exact {:.4}  +{pct:.2}%", greedy.objective, exact.objective);
    }
    println!("mean error {:.2}%", total / count as f64);
    Ok(())
}
