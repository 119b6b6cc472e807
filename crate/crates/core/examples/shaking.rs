//! Exact search by enumerating item orders and solving one assignment
//! problem per order.
//!
//! ```text
//! cargo run --release --example shaking [seed]
//! ```

use jra::instance::{build_cost_matrix, count_instants, generate_random_instance};
use jra::shaking::{enumerate_instants, evaluate_instant, hungarian, solve_shaking};

fn main() -> jra::Result<()> {
    // Rectangular assignment: 3 rows, 4 columns.
    let m = vec![vec![4.0, 1.0, 3.0, 9.0], vec![2.0, 0.0, 5.0, 1.0], vec![3.0, 2.0, 2.0, 7.0]];
    let a = hungarian(&m)?;
    println!("assignment {:?}, cost {}", a.assignment, a.cost);

    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let inst = generate_random_instance(11, &[3, 4, 3], 12, seed)?;
    let cost = build_cost_matrix(&inst)?;
    let sizes: Vec<usize> = inst.sections.iter().map(Vec::len).collect();
    println!("{} instants", count_instants(&sizes));

    for instant in enumerate_instants(&inst.sections).take(3) {
        let r = evaluate_instant(&inst, &cost, &instant)?;
        println!("order {:?}: {:.4} m", instant.items, r.cost);
    }

    let sol = solve_shaking(&inst, &cost)?;
    println!(
        "best {:.4} m over {} instants in {:.3} s",
        sol.objective,
        sol.extras.instants.unwrap_or(0),
        sol.wall_time
    );
    println!("tour {:?}", sol.tour.nodes);
    Ok(())
}
