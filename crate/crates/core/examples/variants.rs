//! Surplus placeholders and typed matching.

use jra::bnb::{solve_instance, MipParams};
use jra::instance::{build_cost_matrix, generate_random_instance, InstanceGenerator};
use jra::model::{build_model, ModelOptions};

fn main() -> jra::Result<()> {
    // Three more placeholders than items: the solver also picks which to use.
    let inst = generate_random_instance(5, &[2, 2], 8, 3)?;
    let cost = build_cost_matrix(&inst)?;
    let (sol, _) = solve_instance(&inst, &cost, &MipParams::default())?;
    println!("selected placeholders {:?} of {}", sol.tour.selected, inst.n_placeholders());
    println!("objective {:.4}", sol.objective);

    // Two types; items may only be placed on placeholders of their own type.
    let typed = InstanceGenerator::new(6, vec![], 7, 9).types(2).generate()?;
    let cost = build_cost_matrix(&typed)?;
    let model = build_model(&typed, &cost, &ModelOptions::for_instance(&typed))?;
    println!("{} model with {} variables", model.variant, model.num_vars());
    let (sol, _) = solve_instance(&typed, &cost, &MipParams::default())?;
    for (item, ph) in &sol.tour.placements {
        println!("  item {item} (type {:?}) -> placeholder {ph} (type {:?})", typed.node_type(*item), typed.node_type(*ph));
    }
    Ok(())
}
