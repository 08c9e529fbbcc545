//! Exhaustive reference solvers.

use crate::error::{Error, Result};
use crate::feasibility::{collaborative_feasible, strict_feasible, Schedule};
use crate::model::{Instance, Mode, TaxaSet, TaxonId};
use crate::outcome::{Algorithm, Diagnostics, Guards, SolveOutcome};

/// Candidate ranking: higher diversity, then fewer person-hours, then the
/// lexicographically smaller set.
fn better(pd: u64, hours: u64, set: &TaxaSet, best: &Option<(u64, u64, TaxaSet)>) -> bool {
    match best {
        None => true,
        Some((bp, bh, bs)) => (pd, std::cmp::Reverse(hours), std::cmp::Reverse(set)) > (*bp, std::cmp::Reverse(*bh), std::cmp::Reverse(bs)),
    }
}

fn enumerate_best(
    instance: &Instance,
    mut feasible: impl FnMut(&TaxaSet) -> Result<Option<Schedule>>,
) -> Result<Option<(u64, u64, TaxaSet, Schedule)>> {
    let n = instance.n();
    let mut best: Option<(u64, u64, TaxaSet)> = None;
    let mut best_schedule = None;
    for mask in 0u64..(1 << n) {
        let set = TaxaSet::from_mask(mask);
        let pd = instance.pd(&set);
        let hours: u64 = set.iter().map(|x| instance.length(x)).sum();
        if !better(pd, hours, &set, &best) {
            continue;
        }
        if let Some(schedule) = feasible(&set)? {
            best = Some((pd, hours, set));
            best_schedule = Some(schedule);
        }
    }
    Ok(best.zip(best_schedule).map(|((p, h, s), sch)| (p, h, s, sch)))
}

fn finish(
    instance: &Instance,
    best: Option<(u64, u64, TaxaSet, Schedule)>,
    mut diag: Diagnostics,
    empty_schedule: Schedule,
) -> Result<SolveOutcome> {
    let (pd, _, set, schedule) = best.expect("the empty set is always feasible");
    diag.optimum = Some(pd);
    if instance.target() == 0 {
        return SolveOutcome::certified(instance, TaxaSet::new(), empty_schedule, diag);
    }
    if pd >= instance.target() {
        SolveOutcome::certified(instance, set, schedule, diag)
    } else {
        Ok(SolveOutcome::no(diag))
    }
}

/// Tries every subset of taxa under the collaborative rules.
pub fn brute_force_time_pd(instance: &Instance, guards: &Guards) -> Result<SolveOutcome> {
    if instance.n() > guards.brute_taxa {
        return Err(Error::InstanceTooLarge { n: instance.n(), limit: guards.brute_taxa });
    }
    let best = enumerate_best(instance, |set| {
        Ok(collaborative_feasible(instance.index(), set)
            .then(|| crate::feasibility::build_collaborative_schedule(instance, set))
            .transpose()?)
    })?;
    let diag = Diagnostics::new(Algorithm::Brute, Mode::Collaborative);
    finish(instance, best, diag, Schedule::empty(Mode::Collaborative))
}

/// Tries every subset of taxa and every ordering under the strict rules.
pub fn brute_force_s_time_pd(instance: &Instance, guards: &Guards) -> Result<SolveOutcome> {
    if instance.n() > guards.brute_strict_taxa {
        return Err(Error::InstanceTooLarge { n: instance.n(), limit: guards.brute_strict_taxa });
    }
    let best = enumerate_best(instance, |set| {
        if !collaborative_feasible(instance.index(), set) {
            return Ok(None);
        }
        strict_feasible(instance, set, usize::MAX)
    })?;
    let diag = Diagnostics::new(Algorithm::Brute, Mode::Strict);
    finish(instance, best, diag, Schedule::empty(Mode::Strict))
}

/// Searches all assignments of (team, slot) pairs to members of `a` or idle.
///
/// Assignments past a taxon's deadline and branches that can no longer reach
/// every rescue length are skipped.
pub fn exhaustive_schedule_search(
    instance: &Instance,
    a: &TaxaSet,
    mode: Mode,
    guards: &Guards,
) -> Result<bool> {
    let pairs: Vec<(usize, u64)> = instance
        .teams()
        .iter()
        .enumerate()
        .flat_map(|(i, t)| (t.start + 1..=t.end).map(move |j| (i, j)))
        .collect();
    let space = (a.len() as f64 + 1.0).powf(pairs.len() as f64);
    if space > guards.exhaustive_space {
        return Err(Error::SearchSpaceTooLarge { size: space, limit: guards.exhaustive_space });
    }
    let members: Vec<TaxonId> = a.ids().to_vec();
    let mut search = Search {
        instance,
        mode,
        pairs: &pairs,
        members: &members,
        missing: members.iter().map(|&x| instance.length(x)).collect(),
        chosen: vec![None; pairs.len()],
    };
    let need: u64 = search.missing.iter().sum();
    Ok(search.run(0, need))
}

struct Search<'a> {
    instance: &'a Instance,
    mode: Mode,
    pairs: &'a [(usize, u64)],
    members: &'a [TaxonId],
    missing: Vec<u64>,
    chosen: Vec<Option<usize>>,
}

impl Search<'_> {
    fn run(&mut self, k: usize, need: u64) -> bool {
        if need > (self.pairs.len() - k) as u64 {
            return false;
        }
        if k == self.pairs.len() {
            return self.mode == Mode::Collaborative || self.strict_ok();
        }
        let (_, slot) = self.pairs[k];
        for m in 0..self.members.len() {
            if slot > self.instance.extinction(self.members[m]) {
                continue;
            }
            self.chosen[k] = Some(m);
            let counted = self.missing[m] > 0;
            if counted {
                self.missing[m] -= 1;
            }
            let found = self.run(k + 1, need - u64::from(counted));
            if counted {
                self.missing[m] += 1;
            }
            if found {
                return true;
            }
        }
        self.chosen[k] = None;
        self.run(k + 1, need)
    }

    fn strict_ok(&self) -> bool {
        (0..self.members.len()).all(|m| {
            let runs: Vec<(usize, u64)> = self
                .pairs
                .iter()
                .zip(&self.chosen)
                .filter(|(_, c)| **c == Some(m))
                .map(|(p, _)| *p)
                .collect();
            runs.iter().enumerate().all(|(k, &(t, s))| t == runs[0].0 && s == runs[0].1 + k as u64)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feasibility::verify_schedule;
    use crate::fixtures;
    use crate::model::{PhyloTree, TaxonInfo, TeamWindow};

    fn star(weights: &[u64], infos: &[(u64, u64)], teams: &[(u64, u64)], d: u64, mode: Mode) -> Instance {
        let names: Vec<String> = (1..=weights.len()).map(|i| format!("x{i}")).collect();
        let leaves: Vec<(&str, u64)> = names.iter().map(String::as_str).zip(weights.iter().copied()).collect();
        Instance::new(
            PhyloTree::star(&leaves),
            names.iter().zip(infos).map(|(n, &(l, e))| (n.as_str(), TaxonInfo::new(l, e))),
            teams.iter().map(|&(s, e)| TeamWindow::new(s, e)).collect(),
            d,
            mode,
        )
        .unwrap()
    }

    #[test]
    fn small_star() {
        let i = star(&[2, 3], &[(2, 2), (2, 4)], &[(0, 4)], 5, Mode::Collaborative);
        let out = brute_force_time_pd(&i, &Guards::default()).unwrap();
        assert!(out.yes);
        let w = out.witness.unwrap();
        assert_eq!(w.saved, i.all_taxa());
        assert_eq!(w.pd, 5);
        let zero = brute_force_time_pd(&i.with_target(0), &Guards::default()).unwrap();
        assert!(zero.yes && zero.witness.unwrap().saved.is_empty());
    }

    #[test]
    fn subset_sum_reduction() {
        let i = fixtures::subset_sum();
        let out = brute_force_time_pd(&i, &Guards::default()).unwrap();
        assert!(out.yes);
        assert_eq!(out.witness.unwrap().saved, i.set_of(&["x2", "x3"]).unwrap());
    }

    #[test]
    fn strict_brute() {
        let one = star(&[2, 3, 1], &[(2, 2), (2, 4), (1, 3)], &[(0, 4)], 4, Mode::Strict);
        let a = brute_force_time_pd(&one, &Guards::default()).unwrap();
        let b = brute_force_s_time_pd(&one, &Guards::default()).unwrap();
        assert_eq!(a.yes, b.yes);
        assert_eq!(a.diagnostics.optimum, b.diagnostics.optimum);
        assert!(brute_force_s_time_pd(&one.with_target(0), &Guards::default()).unwrap().yes);

        // six jobs of total length 20 on three windows of 5: any 15 hours of
        // loads must split into three bins of at most 5
        let three = star(
            &[1; 6],
            &[(2, 5), (3, 5), (5, 5), (2, 5), (3, 5), (5, 5)],
            &[(0, 5), (0, 5), (0, 5)],
            6,
            Mode::Strict,
        );
        let out = brute_force_s_time_pd(&three, &Guards::default()).unwrap();
        assert!(!out.yes);
        assert_eq!(out.diagnostics.optimum, Some(5));
        let collab = brute_force_time_pd(&three, &Guards::default()).unwrap();
        assert_eq!(collab.diagnostics.optimum, Some(5));
        let five = brute_force_s_time_pd(&three.with_target(5), &Guards::default()).unwrap();
        let w = five.witness.unwrap();
        assert!(verify_schedule(&three, &w.schedule).unwrap().passed());
    }

    #[test]
    fn guards() {
        let i = fixtures::four_teams();
        let tight = Guards { brute_taxa: 5, brute_strict_taxa: 5, ..Guards::default() };
        assert!(matches!(brute_force_time_pd(&i, &tight), Err(Error::InstanceTooLarge { .. })));
        assert!(matches!(brute_force_s_time_pd(&i, &tight), Err(Error::InstanceTooLarge { .. })));
    }

    #[test]
    fn exhaustive_examples() {
        let g = Guards::default();
        let i = star(&[1, 1], &[(3, 2), (2, 2)], &[(0, 2)], 1, Mode::Collaborative);
        assert!(exhaustive_schedule_search(&i, &TaxaSet::new(), Mode::Collaborative, &g).unwrap());
        assert!(!exhaustive_schedule_search(&i, &i.set_of(&["x1"]).unwrap(), Mode::Collaborative, &g).unwrap());
        let j = star(&[1, 1], &[(2, 2), (1, 3)], &[(0, 3)], 1, Mode::Collaborative);
        assert!(exhaustive_schedule_search(&j, &j.set_of(&["x1"]).unwrap(), Mode::Collaborative, &g).unwrap());
        let big = Guards { exhaustive_space: 10.0, ..Guards::default() };
        assert!(matches!(
            exhaustive_schedule_search(&j, &j.all_taxa(), Mode::Strict, &big),
            Err(Error::SearchSpaceTooLarge { .. })
        ));
    }
}
