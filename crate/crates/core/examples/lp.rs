//! The simplex engine on its own: a small LP, then the relaxation of a model
//! re-solved warm after fixing a variable.

use jra::instance::{build_cost_matrix, generate_random_instance};
use jra::model::{build_model, ModelOptions, Sense};
use jra::simplex::{solve_lp, LpProblem};

fn main() -> jra::Result<()> {
    // max x + 2y  s.t.  x + y <= 4,  x - y >= -2,  0 <= x, y <= 3
    let mut lp = LpProblem::new();
    let x = lp.add_var(-1.0, 0.0, 3.0);
    let y = lp.add_var(-2.0, 0.0, 3.0);
    lp.add_row(vec![(x, 1.0), (y, 1.0)], Sense::Le, 4.0);
    lp.add_row(vec![(x, 1.0), (y, -1.0)], Sense::Ge, -2.0);
    let sol = solve_lp(&lp, None);
    println!("{}: x = {}, y = {}, objective {}", sol.status, sol.values[x], sol.values[y], sol.objective);

    let inst = generate_random_instance(9, &[4, 4], 10, 2)?;
    let cost = build_cost_matrix(&inst)?;
    let model = build_model(&inst, &cost, &ModelOptions::for_instance(&inst))?;
    let mut relax = LpProblem::from_model(&model);
    let root = solve_lp(&relax, None);
    println!("root relaxation {:.4} in {} iterations", root.objective, root.iterations);

    // Fix the first binary that is not already at 1.
    let j = (0..relax.num_vars()).find(|&j| relax.upper[j] == 1.0 && root.values[j] < 0.5).unwrap();
    relax.lower[j] = 1.0;
    relax.upper[j] = 1.0;
    let child = solve_lp(&relax, Some(&root.basis));
    println!(
        "fixing {} to 1: {:.4} in {} warm iterations, max violation {:.1e}",
        model.variables[j].kind.name(),
        child.objective,
        child.iterations,
        relax.max_violation(&child.values)
    );
    Ok(())
}
