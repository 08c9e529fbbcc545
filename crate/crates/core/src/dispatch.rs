//! Running a named solver, and picking one automatically.

use crate::color_coding::trial_count;
use crate::dp_hours::{solve_s_time_pd_team_subsets, solve_time_pd_hour_vectors, solve_time_pd_team_vectors};
use crate::dp_structured::{solve_star, solve_time_pd_xp, KernelMode};
use crate::error::{Error, Result};
use crate::feasibility::{collaborative_feasible, Schedule};
use crate::fpt_d::{solve_s_time_pd_by_d, solve_time_pd_by_d};
use crate::fpt_dbar::solve_time_pd_by_dbar;
use crate::model::{Instance, Mode, TaxaSet};
use crate::oracle::{brute_force_s_time_pd, brute_force_time_pd};
use crate::outcome::{Algorithm, Diagnostics, Guards, SolveOutcome};

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOptions {
    pub delta: f64,
    pub seed: u64,
    pub kernel: KernelMode,
    pub guards: Guards,
    /// `auto` skips a randomized solver that would plan more trials than this.
    pub auto_trial_budget: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            delta: 1e-3,
            seed: 0,
            kernel: KernelMode::ByCapacity,
            guards: Guards::default(),
            auto_trial_budget: 50_000,
        }
    }
}

/// Solvers that accept instances of `mode`.
pub fn algorithms_for(mode: Mode) -> &'static [Algorithm] {
    match mode {
        Mode::Collaborative => &[
            Algorithm::Trivial,
            Algorithm::Brute,
            Algorithm::FptD,
            Algorithm::FptDbar,
            Algorithm::HoursTeams,
            Algorithm::HoursBudget,
            Algorithm::XpCounts,
            Algorithm::Star,
        ],
        Mode::Strict => &[Algorithm::Trivial, Algorithm::Brute, Algorithm::FptD, Algorithm::HoursSubsets],
    }
}

/// Decides instances that need no search; `None` otherwise.
///
/// Catches a target of 0, a target above the total diversity, a target above
/// the diversity of all individually savable taxa, and collaborative
/// instances where every taxon fits.
pub fn solve_trivial(instance: &Instance) -> Result<Option<SolveOutcome>> {
    let mode = instance.mode();
    let diag = Diagnostics::new(Algorithm::Trivial, mode);
    let target = instance.target();
    if target == 0 {
        return SolveOutcome::certified(instance, TaxaSet::new(), Schedule::empty(mode), diag).map(Some);
    }
    if target > instance.index().total_pd {
        return Ok(Some(SolveOutcome::no(diag)));
    }
    let savable: TaxaSet = (0..instance.n()).filter(|&x| instance.savable_alone(x, mode)).collect();
    if instance.pd(&savable) < target {
        return Ok(Some(SolveOutcome::no(diag)));
    }
    let all = instance.all_taxa();
    if mode == Mode::Collaborative && collaborative_feasible(instance.index(), &all) {
        return SolveOutcome::certified_collaborative(instance, all, diag).map(Some);
    }
    Ok(None)
}

/// Runs `algorithm` on `instance` under the instance's mode.
pub fn solve_with(instance: &Instance, algorithm: Algorithm, opts: &SolveOptions) -> Result<SolveOutcome> {
    let mode = instance.mode();
    if !algorithms_for(mode).contains(&algorithm) {
        return Err(Error::BadParams(format!("algorithm `{algorithm}` does not handle {mode} instances")));
    }
    let g = &opts.guards;
    match (algorithm, mode) {
        (Algorithm::Trivial, _) => solve_trivial(instance)?
            .ok_or_else(|| Error::BadParams("instance is not decided by the trivial checks".into())),
        (Algorithm::Brute, Mode::Collaborative) => brute_force_time_pd(instance, g),
        (Algorithm::Brute, Mode::Strict) => brute_force_s_time_pd(instance, g),
        (Algorithm::FptD, Mode::Collaborative) => solve_time_pd_by_d(instance, opts.delta, opts.seed, g),
        (Algorithm::FptD, Mode::Strict) => solve_s_time_pd_by_d(instance, opts.delta, opts.seed, g),
        (Algorithm::FptDbar, _) => solve_time_pd_by_dbar(instance, opts.delta, opts.seed, g),
        (Algorithm::HoursTeams, _) => solve_time_pd_team_vectors(instance, g),
        (Algorithm::HoursBudget, _) => solve_time_pd_hour_vectors(instance, g),
        (Algorithm::HoursSubsets, _) => solve_s_time_pd_team_subsets(instance, g),
        (Algorithm::XpCounts, _) => solve_time_pd_xp(instance, g),
        (Algorithm::Star, _) => solve_star(instance, opts.kernel, g),
    }
}

/// Trials a randomized solver would plan on this instance; `None` for
/// deterministic solvers and for instances it settles without trials.
pub fn planned_trials(instance: &Instance, algorithm: Algorithm, delta: f64) -> Result<Option<u64>> {
    let exponent = match algorithm {
        Algorithm::FptD => instance.target(),
        Algorithm::FptDbar => match instance.index().diversity_loss() {
            loss if loss <= 0 => return Ok(None),
            loss => 2 * loss as u64,
        },
        _ => return Ok(None),
    };
    trial_count(exponent, delta).map(Some)
}

fn within_trial_budget(instance: &Instance, algorithm: Algorithm, opts: &SolveOptions) -> Result<bool> {
    Ok(planned_trials(instance, algorithm, opts.delta)?.is_none_or(|t| t <= opts.auto_trial_budget))
}

/// Order in which `auto` tries solvers on this instance.
pub fn auto_order(instance: &Instance, opts: &SolveOptions) -> Result<Vec<Algorithm>> {
    let mut order = Vec::new();
    match instance.mode() {
        Mode::Collaborative => {
            if instance.tree().is_star() {
                order.push(Algorithm::Star);
            }
            if instance.tree().is_binary() && within_trial_budget(instance, Algorithm::FptDbar, opts)? {
                order.push(Algorithm::FptDbar);
            }
            if within_trial_budget(instance, Algorithm::FptD, opts)? {
                order.push(Algorithm::FptD);
            }
            order.extend([Algorithm::HoursBudget, Algorithm::HoursTeams, Algorithm::XpCounts]);
        }
        Mode::Strict => {
            if within_trial_budget(instance, Algorithm::FptD, opts)? {
                order.push(Algorithm::FptD);
            }
            order.push(Algorithm::HoursSubsets);
        }
    }
    order.push(Algorithm::Brute);
    Ok(order)
}

/// Outcome of `auto`, with the solvers skipped on the way.
#[derive(Clone, Debug)]
pub struct AutoReport {
    pub outcome: SolveOutcome,
    pub skipped: Vec<(Algorithm, Error)>,
}

/// Tries the trivial checks, then each solver of [`auto_order`] until one
/// stays within its guards. The first solver that runs decides, including a
/// randomized no. If every solver hits a guard the last guard error is returned.
pub fn solve_auto(instance: &Instance, opts: &SolveOptions) -> Result<AutoReport> {
    if let Some(outcome) = solve_trivial(instance)? {
        return Ok(AutoReport { outcome, skipped: Vec::new() });
    }
    let mut skipped = Vec::new();
    for alg in auto_order(instance, opts)? {
        match solve_with(instance, alg, opts) {
            Ok(outcome) => return Ok(AutoReport { outcome, skipped }),
            Err(e) if e.is_guard() => skipped.push((alg, e)),
            Err(e) => return Err(e),
        }
    }
    Err(skipped.pop().map(|(_, e)| e).expect("auto always tries brute force"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{anchored_tree, four_teams, subset_sum, subset_sum_no, three_teams_star};
    use crate::generators::{gen_random_instance, GenParams, TreeShape};

    #[test]
    fn trivial_cases() {
        let inst = four_teams();
        let total = inst.index().total_pd;
        assert!(!solve_trivial(&inst.with_target(total + 1)).unwrap().unwrap().yes);
        let zero = solve_trivial(&inst.with_target(0)).unwrap().unwrap();
        assert!(zero.yes);
        assert!(zero.witness.unwrap().saved.is_empty());
        let all = solve_trivial(&three_teams_star()).unwrap().unwrap();
        assert_eq!(all.witness.unwrap().saved.len(), 6);
        assert!(solve_trivial(&anchored_tree()).unwrap().is_none());
        assert!(matches!(
            solve_with(&anchored_tree(), Algorithm::Trivial, &SolveOptions::default()),
            Err(Error::BadParams(_))
        ));
    }

    #[test]
    fn mode_mismatch() {
        let strict = four_teams().with_mode(Mode::Strict);
        let opts = SolveOptions::default();
        for alg in [Algorithm::Star, Algorithm::XpCounts, Algorithm::FptDbar, Algorithm::HoursBudget] {
            assert!(matches!(solve_with(&strict, alg, &opts), Err(Error::BadParams(_))));
        }
        assert!(matches!(solve_with(&four_teams(), Algorithm::HoursSubsets, &opts), Err(Error::BadParams(_))));
    }

    #[test]
    fn auto_on_fixtures() {
        let opts = SolveOptions::default();
        let r = solve_auto(&subset_sum(), &opts).unwrap();
        assert!(r.outcome.yes);
        assert_eq!(r.outcome.diagnostics.algorithm, Algorithm::Star);
        assert_eq!(r.outcome.witness.unwrap().pd, 19);
        assert!(!solve_auto(&subset_sum_no(), &opts).unwrap().outcome.yes);
        let r = solve_auto(&anchored_tree(), &opts).unwrap();
        assert_eq!(auto_order(&anchored_tree(), &opts).unwrap()[0], Algorithm::HoursBudget);
        assert_eq!(r.outcome.diagnostics.algorithm, Algorithm::HoursBudget);
        let small = anchored_tree().with_target(7);
        assert_eq!(auto_order(&small, &opts).unwrap()[0], Algorithm::FptD);
    }

    #[test]
    fn auto_reports_guards() {
        let tight = SolveOptions {
            guards: Guards { brute_taxa: 1, dp_states: 1.0, d_mask_width: 1, ..Guards::default() },
            auto_trial_budget: 10,
            ..SolveOptions::default()
        };
        let err = solve_auto(&anchored_tree(), &tight).unwrap_err();
        assert!(err.is_guard());
    }

    #[test]
    fn auto_matches_oracle() {
        let opts = SolveOptions::default();
        for seed in 0..120 {
            let mode = if seed % 3 == 0 { Mode::Strict } else { Mode::Collaborative };
            let p = GenParams { n: 2 + seed as usize % 5, shape: TreeShape::ALL[seed as usize % 4], mode, max_ex: 5, ..GenParams::default() };
            let inst = gen_random_instance(&p, seed).unwrap();
            let oracle = solve_with(&inst, Algorithm::Brute, &opts).unwrap();
            let auto = solve_auto(&inst, &opts).unwrap().outcome;
            if auto.yes || !auto.diagnostics.algorithm.is_randomized() {
                assert_eq!(auto.yes, oracle.yes, "seed {seed}");
            }
            assert!(!auto.yes || oracle.yes, "seed {seed}");
        }
    }
}
