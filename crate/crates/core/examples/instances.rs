//! Generating, saving, validating and counting instances.
//!
//! ```text
//! cargo run --example instances
//! ```

use jra::instance::{
    build_cost_matrix, count_instants, count_pick_place_combinations, generate_random_instance, InstanceGenerator,
    Point2D, ProblemInstance,
};

fn main() -> jra::Result<()> {
    // A hand-written instance: two items to collect (one section each), the
    // stop item last among the items, the start placeholder last among the
    // placeholders.
    let p = |x, y| Point2D::new(x, y);
    let hand = ProblemInstance::new(
        "hand",
        vec![p(1.0, 0.0), p(2.0, 1.0), p(0.0, 2.0)],
        vec![p(1.0, 1.0), p(2.0, 2.0), p(0.0, 0.0)],
        vec![vec![0], vec![1]],
    );
    println!("{} items, {} placeholders, valid: {}", hand.n_items(), hand.n_placeholders(), hand.validate().is_ok());
    println!("stop item {}, start placeholder node {}", hand.stop_item(), hand.start_placeholder());

    // Broken on purpose: a section references the stop item.
    let mut broken = hand.clone();
    broken.sections = vec![vec![0, 2], vec![1]];
    println!("broken instance:\n{}", broken.validate());

    let inst = generate_random_instance(17, &[2, 5, 5, 4], 19, 0)?;
    let path = std::env::temp_dir().join("jra_example_instance.json");
    inst.save(&path)?;
    let back = ProblemInstance::load(&path)?;
    assert_eq!(back, inst);
    println!("round-tripped {} through {}", inst.name, path.display());

    let cost = build_cost_matrix(&inst)?;
    println!("c(start, stop) = {:.4} m", cost.get(inst.start_placeholder(), inst.stop_item()));

    let typed = InstanceGenerator::new(7, vec![3, 3], 9, 5).types(2).generate()?;
    println!("item types {:?}", typed.item_types.as_deref().unwrap_or_default());
    println!("placeholder types {:?}", typed.placeholder_types.as_deref().unwrap_or_default());

    println!("instants for [2,5,5,4]: {}", count_instants(&[2, 5, 5, 4]));
    println!("pick-and-place combinations with 18 placeholders: {}", count_pick_place_combinations(&[2, 5, 5, 4], 18));
    Ok(())
}
