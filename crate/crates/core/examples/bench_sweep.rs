//! A seeded sweep through every solver, cross-checked and written as CSV.

use timepd::bench::{run_bench, BenchSpec};
use timepd::dispatch::SolveOptions;
use timepd::generators::{GenParams, TargetRule, TreeShape};

fn main() -> timepd::Result<()> {
    let spec = BenchSpec {
        instances: 24,
        n_range: Some([2, 6]),
        shapes: TreeShape::ALL.to_vec(),
        params: GenParams { max_ex: 5, target: TargetRule::Loss(2), ..GenParams::default() },
        ..BenchSpec::default()
    };
    let report = run_bench(&spec, &SolveOptions::default(), false)?;
    report.write_csv(std::io::stdout(), false)?;
    eprintln!("disagreements: {}, randomized misses: {}", report.disagreements.len(), report.false_negatives.len());
    Ok(())
}
