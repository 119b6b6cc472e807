//! Benchmark table over a directory of instances.

use jra::bench::{run_bench, BenchOptions, SolverSet};
use jra::instance::generate_random_instance;

fn main() -> jra::Result<()> {
    let dir = std::env::temp_dir().join("jra_bench_example");
    std::fs::create_dir_all(&dir)?;
    for seed in 0..5 {
        generate_random_instance(8, &[3, 4], 9, seed)?.save(dir.join(format!("sample_{seed}.json")))?;
    }
    let options = BenchOptions { solvers: SolverSet::parse("shaking,mip,greedy")?, ..BenchOptions::default() };
    let table = run_bench(&dir, &options)?;
    print!("{}", table.to_text());
    std::fs::write(dir.join("bench.csv"), table.to_csv()?)?;
    Ok(())
}
