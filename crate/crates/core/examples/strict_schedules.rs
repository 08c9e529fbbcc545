//! Strict mode: each taxon is worked by one team in one unbroken run.

use timepd::dispatch::{solve_with, SolveOptions};
use timepd::generators::{gen_random_instance, GenParams, TargetRule, TreeShape};
use timepd::{Algorithm, Mode};

fn main() -> timepd::Result<()> {
    let params = GenParams {
        n: 5,
        teams: 2,
        max_ex: 5,
        max_len: 3,
        shape: TreeShape::Caterpillar,
        mode: Mode::Strict,
        target: TargetRule::Fixed(6),
        ..GenParams::default()
    };
    let instance = gen_random_instance(&params, 4)?;
    let opts = SolveOptions::default();
    for alg in [Algorithm::Brute, Algorithm::HoursSubsets, Algorithm::FptD] {
        let out = solve_with(&instance, alg, &opts)?;
        print!("{alg}: {}", if out.yes { "yes" } else { "no" });
        if let Some(w) = out.witness {
            let runs: Vec<String> = w
                .schedule
                .assignments
                .iter()
                .map(|(&(team, slot), &x)| format!("{}@{team}:{slot}", instance.taxon(x).name))
                .collect();
            print!(" [{}]", runs.join(" "));
        }
        println!();
    }
    Ok(())
}
