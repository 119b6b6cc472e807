//! The general model has no sequencing constraints; disconnected cycles are
//! cut off lazily whenever an integral LP optimum contains them.

use jra::bnb::{separate_subtours, solve_mip, MipParams};
use jra::instance::{build_cost_matrix, generate_random_instance};
use jra::model::{build_model, ModelOptions};

fn main() -> jra::Result<()> {
    let inst = generate_random_instance(6, &[], 6, 11)?;
    let cost = build_cost_matrix(&inst)?;
    let model = build_model(&inst, &cost, &ModelOptions::default())?;
    println!("lazy cuts enabled: {}", model.lazy_subtour_enabled);

    // Two alternating 2-cycles plus a longer one over the rest.
    let n = inst.n_items();
    let mut values = vec![0.0; model.num_vars()];
    let cycles = [vec![(0, n), (n, 0)], vec![(1, n + 1), (n + 1, 1)]];
    for &(u, v) in cycles.iter().flatten() {
        values[model.x_var(u, v).unwrap()] = 1.0;
    }
    let rest = [(2, n + 2), (n + 2, 3), (3, n + 3), (n + 3, 4), (4, n + 4), (n + 4, 5), (5, n + 5), (n + 5, 2)];
    for (u, v) in rest {
        values[model.x_var(u, v).unwrap()] = 1.0;
    }
    for cut in separate_subtours(&values, &model) {
        let row = cut.to_constraint(&model, "demo".into());
        println!("cut on {:?}: {} terms, rhs {}", cut.nodes, row.terms.len(), row.rhs);
    }

    let result = solve_mip(&model, &MipParams::default())?;
    println!(
        "optimum {:.4} after {} nodes and {} cuts",
        result.objective, result.nodes_explored, result.cuts_added
    );
    Ok(())
}
