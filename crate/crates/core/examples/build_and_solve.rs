//! Builds a small instance by hand and lets `auto` pick a solver.

use timepd::dispatch::{solve_auto, SolveOptions};
use timepd::{Instance, Mode, TaxonInfo, TeamWindow, TreeBuilder};

fn main() -> timepd::Result<()> {
    let mut b = TreeBuilder::new();
    let root = b.root();
    let left = b.add_internal(root, 2);
    b.add_leaf(left, 3, "wolf");
    b.add_leaf(left, 1, "fox");
    b.add_leaf(root, 4, "lynx");
    let taxa = [
        ("wolf", TaxonInfo::new(3, 4)),
        ("fox", TaxonInfo::new(2, 4)),
        ("lynx", TaxonInfo::new(4, 6)),
    ];
    let teams = vec![TeamWindow::new(0, 4), TeamWindow::new(2, 6)];
    let instance = Instance::new(b.build()?, taxa, teams, 9, Mode::Collaborative)?;

    let report = solve_auto(&instance, &SolveOptions::default())?;
    let out = report.outcome;
    println!("solver: {}", out.diagnostics.algorithm);
    match out.witness {
        Some(w) => println!("yes: save {:?} for diversity {}", instance.names(&w.saved), w.pd),
        None => println!("no: diversity {} is out of reach", instance.target()),
    }
    Ok(())
}
