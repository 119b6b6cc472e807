//! Write the model in fixed MPS for an external solver.
//!
//! ```text
//! cargo run --example export_mps > model.mps
//! ```

use jra::instance::{build_cost_matrix, generate_random_instance};
use jra::model::{build_model, ModelOptions};
use jra::mps::export_mps;

fn main() -> jra::Result<()> {
    let inst = generate_random_instance(17, &[2, 5, 5, 4], 19, 0)?;
    let cost = build_cost_matrix(&inst)?;
    let model = build_model(&inst, &cost, &ModelOptions::for_instance(&inst))?;
    eprintln!("{}: {} columns, {} rows", model.variant, model.num_vars(), model.constraints.len());
    print!("{}", export_mps(&model));
    Ok(())
}
