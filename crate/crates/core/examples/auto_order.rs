//! How `auto` orders solvers for differently shaped instances.

use timepd::dispatch::{auto_order, solve_auto, SolveOptions};
use timepd::fixtures::{anchored_tree, four_teams, subset_sum};
use timepd::Mode;

fn main() -> timepd::Result<()> {
    let opts = SolveOptions::default();
    let cases = [
        ("subset-sum star", subset_sum()),
        ("four-team star", four_teams()),
        ("cherries", anchored_tree()),
        ("cherries, low target", anchored_tree().with_target(6)),
        ("cherries, strict", anchored_tree().with_mode(Mode::Strict).with_target(6)),
    ];
    for (name, instance) in cases {
        let order: Vec<&str> = auto_order(&instance, &opts)?.into_iter().map(|a| a.name()).collect();
        let report = solve_auto(&instance, &opts)?;
        println!("{name}: order {order:?}, decided by {} -> {}", report.outcome.diagnostics.algorithm, report.outcome.yes);
    }
    Ok(())
}
