//! Render an optimal tour to SVG.

use jra::instance::{build_cost_matrix, generate_random_instance};
use jra::plot::plot_route;
use jra::shaking::solve_shaking;

fn main() -> jra::Result<()> {
    let inst = generate_random_instance(12, &[3, 4, 4], 14, 1)?;
    let cost = build_cost_matrix(&inst)?;
    let sol = solve_shaking(&inst, &cost)?;
    let out = std::env::temp_dir().join("jra_route.svg");
    std::fs::write(&out, plot_route(&sol, &inst))?;
    println!("{:.4} m tour written to {}", sol.objective, out.display());
    Ok(())
}
