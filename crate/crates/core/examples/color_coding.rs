//! The randomized solver parameterized by the target diversity, with its
//! trial count and seed.

use timepd::color_coding::trial_count;
use timepd::fpt_d::solve_time_pd_by_d;
use timepd::generators::{gen_random_instance, GenParams, TargetRule};
use timepd::Guards;

fn main() -> timepd::Result<()> {
    for d in [4, 8, 12] {
        println!("D = {d}: {} trials at delta 1e-3", trial_count(d, 1e-3)?);
    }
    let params = GenParams { n: 7, teams: 3, target: TargetRule::Fixed(7), ..GenParams::default() };
    let instance = gen_random_instance(&params, 2)?;
    for seed in [1, 2, 3] {
        let out = solve_time_pd_by_d(&instance, 1e-3, seed, &Guards::default())?;
        let d = &out.diagnostics;
        println!("seed {seed}: yes = {}, trials {}/{}", out.yes, d.trials_run, d.trials_planned);
    }
    Ok(())
}
