//! Seeded sweeps that run several solvers per instance and cross-check them.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispatch::{algorithms_for, planned_trials, solve_with, SolveOptions};
use crate::error::{Error, Result};
use crate::generators::{gen_random_instance, GenParams, TreeShape};
use crate::model::Instance;
use crate::outcome::{Algorithm, SolveOutcome};

/// A sweep: instance `i` uses generator seed `first_seed + i`, cycles through
/// `shapes` and through the sizes in `n_range`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchSpec {
    pub instances: u64,
    pub first_seed: u64,
    pub params: GenParams,
    pub n_range: Option<[usize; 2]>,
    pub shapes: Vec<TreeShape>,
    /// Solver names; empty means every solver for the mode except `trivial`.
    pub algorithms: Vec<String>,
    pub delta: f64,
    pub solver_seed: u64,
    /// Randomized solvers planning more trials than this are recorded as skipped.
    pub trial_budget: u64,
}

impl Default for BenchSpec {
    fn default() -> Self {
        BenchSpec {
            instances: 100,
            first_seed: 0,
            params: GenParams::default(),
            n_range: None,
            shapes: Vec::new(),
            algorithms: Vec::new(),
            delta: 1e-3,
            solver_seed: 0,
            trial_budget: 50_000,
        }
    }
}

impl BenchSpec {
    pub fn params_for(&self, i: u64) -> GenParams {
        let mut p = self.params.clone();
        if let Some([lo, hi]) = self.n_range {
            p.n = lo + (i as usize) % (hi - lo + 1);
        }
        if !self.shapes.is_empty() {
            p.shape = self.shapes[i as usize % self.shapes.len()];
        }
        p
    }

    fn algorithms(&self) -> Result<Vec<Algorithm>> {
        if self.algorithms.is_empty() {
            return Ok(algorithms_for(self.params.mode).iter().copied().filter(|&a| a != Algorithm::Trivial).collect());
        }
        self.algorithms.iter().map(|s| s.parse()).collect()
    }

    fn validate(&self) -> Result<()> {
        if let Some([lo, hi]) = self.n_range {
            if lo > hi {
                return Err(Error::BadParams(format!("empty n range {lo}..={hi}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
    /// The solver refused the instance on a size or shape guard.
    Skipped,
    Error,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Skipped => "skipped",
            Verdict::Error => "error",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub instance: u64,
    pub seed: u64,
    pub n: usize,
    pub teams: usize,
    pub shape: TreeShape,
    pub target: u64,
    pub total_pd: u64,
    pub algorithm: Algorithm,
    pub verdict: Verdict,
    /// Diversity of the witness on yes, else the optimum when the solver knows it.
    pub value: Option<u64>,
    pub optimum: Option<u64>,
    pub trials: u64,
    pub runtime_us: u128,
}

#[derive(Clone, Debug)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub instances: Vec<Instance>,
    /// Instances where solvers contradict each other.
    pub disagreements: Vec<u64>,
    /// Randomized no answers on instances an exact solver decided yes.
    pub false_negatives: Vec<(u64, Algorithm)>,
}

fn row_for(i: u64, seed: u64, p: &GenParams, inst: &Instance, alg: Algorithm, r: &Result<SolveOutcome>, us: u128) -> BenchRow {
    let (verdict, value, optimum, trials) = match r {
        Ok(o) => {
            let opt = o.diagnostics.optimum;
            let value = o.witness.as_ref().map(|w| w.pd).or(opt);
            (if o.yes { Verdict::Yes } else { Verdict::No }, value, opt, o.diagnostics.trials_run)
        }
        Err(e) if e.is_guard() => (Verdict::Skipped, None, None, 0),
        Err(_) => (Verdict::Error, None, None, 0),
    };
    BenchRow {
        instance: i,
        seed,
        n: inst.n(),
        teams: inst.teams().len(),
        shape: p.shape,
        target: inst.target(),
        total_pd: inst.index().total_pd,
        algorithm: alg,
        verdict,
        value,
        optimum,
        trials,
        runtime_us: us,
    }
}

/// Exact solvers must agree on the decision and on any optimum they report;
/// a randomized yes needs an exact yes or no exact verdict at all.
fn judge(rows: &[BenchRow]) -> (bool, Vec<Algorithm>) {
    if rows.iter().any(|r| r.verdict == Verdict::Error) {
        return (false, Vec::new());
    }
    let exact: Vec<&BenchRow> =
        rows.iter().filter(|r| !r.algorithm.is_randomized() && matches!(r.verdict, Verdict::Yes | Verdict::No)).collect();
    let decisions_agree = exact.windows(2).all(|w| w[0].verdict == w[1].verdict);
    let optima: Vec<u64> = exact.iter().filter_map(|r| r.optimum).collect();
    let optima_agree = optima.windows(2).all(|w| w[0] == w[1]);
    let Some(truth) = exact.first().map(|r| r.verdict) else {
        return (true, Vec::new());
    };
    let mut misses = Vec::new();
    let mut ok = decisions_agree && optima_agree;
    for r in rows.iter().filter(|r| r.algorithm.is_randomized()) {
        match (r.verdict, truth) {
            (Verdict::Yes, Verdict::No) => ok = false,
            (Verdict::No, Verdict::Yes) => misses.push(r.algorithm),
            _ => {}
        }
    }
    (ok, misses)
}

pub fn run_bench(spec: &BenchSpec, opts: &SolveOptions, time: bool) -> Result<BenchReport> {
    spec.validate()?;
    let algorithms = spec.algorithms()?;
    let opts = SolveOptions { delta: spec.delta, seed: spec.solver_seed, ..opts.clone() };
    let per_instance: Vec<(Instance, Vec<BenchRow>)> = (0..spec.instances)
        .into_par_iter()
        .map(|i| {
            let p = spec.params_for(i);
            let seed = spec.first_seed + i;
            let inst = gen_random_instance(&p, seed)?;
            let rows = algorithms
                .iter()
                .filter(|a| algorithms_for(inst.mode()).contains(a))
                .map(|&alg| {
                    let start = time.then(Instant::now);
                    let r = match planned_trials(&inst, alg, opts.delta) {
                        Ok(Some(t)) if t > spec.trial_budget => Err(Error::SearchSpaceTooLarge {
                            size: t as f64,
                            limit: spec.trial_budget as f64,
                        }),
                        _ => solve_with(&inst, alg, &opts),
                    };
                    let us = start.map_or(0, |s| s.elapsed().as_micros());
                    row_for(i, seed, &p, &inst, alg, &r, us)
                })
                .collect();
            Ok((inst, rows))
        })
        .collect::<Result<_>>()?;
    let mut report = BenchReport { rows: Vec::new(), instances: Vec::new(), disagreements: Vec::new(), false_negatives: Vec::new() };
    for (i, (inst, rows)) in per_instance.into_iter().enumerate() {
        let (ok, misses) = judge(&rows);
        if !ok {
            report.disagreements.push(i as u64);
        }
        report.false_negatives.extend(misses.into_iter().map(|a| (i as u64, a)));
        report.rows.extend(rows);
        report.instances.push(inst);
    }
    Ok(report)
}

impl BenchReport {
    /// The disagreeing instance with the fewest taxa, then least diversity.
    pub fn smallest_disagreement(&self) -> Option<&Instance> {
        self.disagreements
            .iter()
            .map(|&i| &self.instances[i as usize])
            .min_by_key(|inst| (inst.n(), inst.index().total_pd))
    }

    pub fn write_csv(&self, out: impl Write, with_timings: bool) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::Io(e.to_string());
        let mut header =
            vec!["instance", "seed", "n", "teams", "shape", "target", "total_pd", "algorithm", "decision", "value", "trials"];
        if with_timings {
            header.push("runtime_us");
        }
        w.write_record(&header).map_err(csv_err)?;
        for r in &self.rows {
            let mut rec = vec![
                r.instance.to_string(),
                r.seed.to_string(),
                r.n.to_string(),
                r.teams.to_string(),
                r.shape.name().to_owned(),
                r.target.to_string(),
                r.total_pd.to_string(),
                r.algorithm.name().to_owned(),
                r.verdict.name().to_owned(),
                r.value.map_or_else(String::new, |v| v.to_string()),
                r.trials.to_string(),
            ];
            if with_timings {
                rec.push(r.runtime_us.to_string());
            }
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}
