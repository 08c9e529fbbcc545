//! Tree DPs over person-hour budgets, compared with the brute-force oracle.

use timepd::dispatch::{solve_with, SolveOptions};
use timepd::generators::{gen_random_instance, GenParams, TreeShape};
use timepd::Algorithm;

fn main() -> timepd::Result<()> {
    let opts = SolveOptions::default();
    for seed in 0..5 {
        let params = GenParams { n: 6, teams: 2, max_ex: 5, shape: TreeShape::RandomMultifurcating, ..GenParams::default() };
        let instance = gen_random_instance(&params, seed)?;
        let row: Vec<String> = [Algorithm::Brute, Algorithm::HoursTeams, Algorithm::HoursBudget, Algorithm::XpCounts]
            .into_iter()
            .map(|alg| {
                let out = solve_with(&instance, alg, &opts).expect("small instance");
                format!("{alg}={:?}", out.diagnostics.optimum)
            })
            .collect();
        println!("seed {seed} target {}: {}", instance.target(), row.join(" "));
    }
    Ok(())
}
