//! Deciding whether a set of taxa can be saved, building schedules that do
//! it, and checking schedules.

use std::collections::BTreeMap;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::model::{DerivedIndex, Instance, Mode, TaxaSet, TaxonId, TaxonInfo, TeamWindow};

/// Assignment of (team, timeslot) pairs to taxa. Pairs that are absent are idle.
///
/// Timeslots are 1-based: team `i` works in slots `start_i + 1 ..= end_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    pub mode: Mode,
    pub assignments: BTreeMap<(usize, u64), TaxonId>,
    pub saved: TaxaSet,
}

impl Schedule {
    pub fn empty(mode: Mode) -> Self {
        Schedule { mode, assignments: BTreeMap::new(), saved: TaxaSet::new() }
    }

    pub fn get(&self, team: usize, slot: u64) -> Option<TaxonId> {
        self.assignments.get(&(team, slot)).copied()
    }

    pub fn hours_for(&self, x: TaxonId) -> u64 {
        self.assignments.values().filter(|&&y| y == x).count() as u64
    }

    fn assign_run(&mut self, team: usize, first: u64, last: u64, x: TaxonId) {
        for slot in first..=last {
            self.assignments.insert((team, slot), x);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    PostDeadline { taxon: TaxonId, team: usize, slot: u64 },
    InsufficientHours { taxon: TaxonId, assigned: u64, required: u64 },
    StrictnessViolation { taxon: TaxonId },
    NotInSavedSet { taxon: TaxonId },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaxonHours {
    pub taxon: TaxonId,
    pub assigned: u64,
    pub required: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub hours: Vec<TaxonHours>,
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Prefix test: the hours needed by `a` up to every deadline fit the hours available.
pub fn collaborative_feasible(idx: &DerivedIndex, a: &TaxaSet) -> bool {
    let mut ids = a.iter().peekable();
    let mut need: u128 = 0;
    for j in 0..idx.var_ex() {
        let end = idx.class_bounds[j + 1];
        while let Some(x) = ids.next_if(|&x| x < end) {
            need += u128::from(idx.lengths[x]);
        }
        if need > u128::from(idx.capacity[j]) {
            return false;
        }
    }
    true
}

/// Earliest-deadline greedy over (slot, team) pairs.
pub fn build_collaborative_schedule(instance: &Instance, a: &TaxaSet) -> Result<Schedule> {
    if !collaborative_feasible(instance.index(), a) {
        return Err(Error::InfeasibleSet);
    }
    let mut schedule = Schedule::empty(Mode::Collaborative);
    schedule.saved = a.clone();
    let Some(first_slot) = instance.teams().iter().map(|t| t.start + 1).min() else {
        return Ok(schedule);
    };
    let mut pairs = (first_slot..).flat_map(|slot| {
        instance
            .teams()
            .iter()
            .enumerate()
            .filter(move |(_, t)| t.start < slot && slot <= t.end)
            .map(move |(i, _)| (i, slot))
    });
    for x in a.iter() {
        for _ in 0..instance.length(x) {
            let (team, slot) = pairs.next().ok_or(Error::InfeasibleSet)?;
            if slot > instance.extinction(x) {
                return Err(Error::InfeasibleSet);
            }
            schedule.assignments.insert((team, slot), x);
        }
    }
    Ok(schedule)
}

/// Can one team save all of `taxa` on its own?
pub fn single_team_feasible(team: &TeamWindow, taxa: &[TaxonInfo]) -> bool {
    let mut sorted: Vec<&TaxonInfo> = taxa.iter().collect();
    sorted.sort_by_key(|t| t.extinction_time);
    let mut need: u128 = 0;
    for (k, t) in sorted.iter().enumerate() {
        need += u128::from(t.rescue_length);
        let last_of_deadline =
            sorted.get(k + 1).is_none_or(|n| n.extinction_time != t.extinction_time);
        if last_of_deadline && need > u128::from(team.hours_until(t.extinction_time)) {
            return false;
        }
    }
    true
}

/// Places taxa back to back in the given order, moving to the next team as
/// soon as the current one cannot finish the next taxon in time.
pub fn strict_feasible_given_ordering(instance: &Instance, ordering: &[TaxonId]) -> Option<Schedule> {
    let mut schedule = Schedule::empty(Mode::Strict);
    let mut k = 0;
    for (i, team) in instance.teams().iter().enumerate() {
        let mut cursor = team.start;
        while let Some(&x) = ordering.get(k) {
            let end = cursor.checked_add(instance.length(x))?;
            if end > team.end.min(instance.extinction(x)) {
                break;
            }
            schedule.assign_run(i, cursor + 1, end, x);
            cursor = end;
            k += 1;
        }
    }
    if k < ordering.len() {
        return None;
    }
    schedule.saved = ordering.iter().copied().collect();
    Some(schedule)
}

pub const DEFAULT_ORDERING_GUARD: usize = 10;

/// Tries every ordering of `a` in lexicographic order.
pub fn strict_feasible(instance: &Instance, a: &TaxaSet, max_set: usize) -> Result<Option<Schedule>> {
    if a.len() > max_set {
        return Err(Error::SetTooLarge { size: a.len(), limit: max_set });
    }
    if a.is_empty() {
        return Ok(Some(Schedule::empty(Mode::Strict)));
    }
    Ok(a.ids()
        .iter()
        .copied()
        .permutations(a.len())
        .find_map(|order| strict_feasible_given_ordering(instance, &order)))
}

/// Runs each team's taxa back to back in order of extinction time.
///
/// Returns `None` if some team cannot finish its taxa in time.
pub fn strict_schedule_from_partition(instance: &Instance, parts: &[TaxaSet]) -> Option<Schedule> {
    let mut schedule = Schedule::empty(Mode::Strict);
    for (i, part) in parts.iter().enumerate() {
        let team = instance.teams()[i];
        let mut cursor = team.start;
        for x in part.iter() {
            let end = cursor + instance.length(x);
            if end > team.end.min(instance.extinction(x)) {
                return None;
            }
            schedule.assign_run(i, cursor + 1, end, x);
            cursor = end;
            schedule.saved.insert(x);
        }
    }
    Some(schedule)
}

pub fn verify_schedule(instance: &Instance, schedule: &Schedule) -> Result<VerificationReport> {
    let teams = instance.teams();
    let n = instance.n();
    let mut assigned = vec![0u64; n];
    let mut runs: Vec<Vec<(usize, u64)>> = vec![Vec::new(); n];
    let mut violations = Vec::new();
    for (&(team, slot), &x) in &schedule.assignments {
        let Some(window) = teams.get(team) else {
            return Err(Error::DomainMismatch(format!("team {team} does not exist")));
        };
        if slot <= window.start || slot > window.end {
            return Err(Error::DomainMismatch(format!("team {team} is not available at slot {slot}")));
        }
        if x >= n {
            return Err(Error::UnknownTaxon(format!("#{x}")));
        }
        if slot > instance.extinction(x) {
            violations.push(Violation::PostDeadline { taxon: x, team, slot });
        }
        assigned[x] += 1;
        runs[x].push((team, slot));
    }
    if let Some(&x) = schedule.saved.ids().last() {
        if x >= n {
            return Err(Error::UnknownTaxon(format!("#{x}")));
        }
    }
    for x in 0..n {
        if assigned[x] > 0 && !schedule.saved.contains(x) {
            violations.push(Violation::NotInSavedSet { taxon: x });
        }
        if schedule.saved.contains(x) && assigned[x] < instance.length(x) {
            violations.push(Violation::InsufficientHours {
                taxon: x,
                assigned: assigned[x],
                required: instance.length(x),
            });
        }
        if schedule.mode == Mode::Strict && !runs[x].is_empty() {
            let (team, first) = runs[x][0];
            let one_run = runs[x]
                .iter()
                .enumerate()
                .all(|(k, &(t, s))| t == team && s == first + k as u64);
            if !one_run {
                violations.push(Violation::StrictnessViolation { taxon: x });
            }
        }
    }
    let hours = (0..n)
        .map(|x| TaxonHours { taxon: x, assigned: assigned[x], required: instance.length(x) })
        .collect();
    Ok(VerificationReport { hours, violations })
}

/// Checks that `schedule` saves exactly `set` and passes verification.
pub(crate) fn check_witness(instance: &Instance, set: &TaxaSet, schedule: &Schedule) -> Result<()> {
    if &schedule.saved != set {
        return Err(Error::WitnessRejected("schedule saves a different set".into()));
    }
    let report = verify_schedule(instance, schedule)?;
    if !report.passed() {
        return Err(Error::WitnessRejected(format!("{:?}", report.violations)));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::PhyloTree;

    fn inst(taxa: &[(&str, u64, u64)], teams: &[(u64, u64)], mode: Mode) -> Instance {
        let leaves: Vec<(&str, u64)> = taxa.iter().map(|t| (t.0, 1)).collect();
        let tree = if leaves.len() == 1 {
            let mut b = crate::model::TreeBuilder::new();
            b.add_leaf(0, 1, leaves[0].0);
            b.build().unwrap()
        } else {
            PhyloTree::star(&leaves)
        };
        Instance::new(
            tree,
            taxa.iter().map(|t| (t.0, TaxonInfo::new(t.1, t.2))),
            teams.iter().map(|&(s, e)| TeamWindow::new(s, e)).collect(),
            1,
            mode,
        )
        .unwrap()
    }

    #[test]
    fn prefix_condition_on_four_teams() {
        let four = fixtures::four_teams();
        assert!(collaborative_feasible(four.index(), &four.all_taxa()));
        assert!(collaborative_feasible(four.index(), &TaxaSet::new()));
        let raised = inst(
            &[("x1", 11, 7), ("x2", 9, 7), ("x3", 13, 18), ("x4", 8, 12), ("x5", 7, 12), ("x6", 5, 18)],
            &[(0, 17), (2, 13), (3, 15), (4, 18)],
            Mode::Collaborative,
        );
        assert!(!collaborative_feasible(raised.index(), &raised.all_taxa()));
    }

    #[test]
    fn greedy_schedule() {
        let i = inst(&[("a", 2, 2), ("b", 2, 4)], &[(0, 4)], Mode::Collaborative);
        let s = build_collaborative_schedule(&i, &i.all_taxa()).unwrap();
        let a = i.taxon_id("a").unwrap();
        let b = i.taxon_id("b").unwrap();
        let got: Vec<_> = (1..=4).map(|j| s.get(0, j)).collect();
        assert_eq!(got, vec![Some(a), Some(a), Some(b), Some(b)]);
        assert!(verify_schedule(&i, &s).unwrap().passed());

        let empty = build_collaborative_schedule(&i, &TaxaSet::new()).unwrap();
        assert!(empty.assignments.is_empty());

        for fixture in [fixtures::four_teams(), fixtures::three_teams_star()] {
            let s = build_collaborative_schedule(&fixture, &fixture.all_taxa()).unwrap();
            assert!(verify_schedule(&fixture, &s).unwrap().passed());
        }
        let big = i.set_of(&["a", "b"]).unwrap();
        let tight = inst(&[("a", 3, 2), ("b", 1, 4)], &[(0, 4)], Mode::Collaborative);
        assert_eq!(build_collaborative_schedule(&tight, &big), Err(Error::InfeasibleSet));
    }

    #[test]
    fn single_team_examples() {
        assert!(single_team_feasible(&TeamWindow::new(0, 10), &[TaxonInfo::new(10, 10)]));
        assert!(!single_team_feasible(&TeamWindow::new(2, 10), &[TaxonInfo::new(9, 10)]));
        assert!(!single_team_feasible(
            &TeamWindow::new(0, 15),
            &[TaxonInfo::new(4, 7), TaxonInfo::new(7, 7)]
        ));
    }

    #[test]
    fn ordering_greedy() {
        let i = inst(&[("xa", 9, 19), ("xb", 10, 19)], &[(0, 19)], Mode::Strict);
        let xa = i.taxon_id("xa").unwrap();
        let xb = i.taxon_id("xb").unwrap();
        let s = strict_feasible_given_ordering(&i, &[xa, xb]).unwrap();
        assert!((1..=9).all(|j| s.get(0, j) == Some(xa)));
        assert!((10..=19).all(|j| s.get(0, j) == Some(xb)));
        assert!(strict_feasible_given_ordering(&i, &[]).unwrap().assignments.is_empty());

        let late = inst(&[("x", 3, 2)], &[(0, 5)], Mode::Strict);
        assert!(strict_feasible_given_ordering(&late, &[0]).is_none());
    }

    #[test]
    fn strict_enumeration() {
        let two = inst(&[("a", 5, 5), ("b", 5, 5)], &[(0, 5), (0, 5)], Mode::Strict);
        let s = strict_feasible(&two, &two.all_taxa(), DEFAULT_ORDERING_GUARD).unwrap().unwrap();
        assert!(verify_schedule(&two, &s).unwrap().passed());
        let teams_used: std::collections::BTreeSet<usize> = s.assignments.keys().map(|k| k.0).collect();
        assert_eq!(teams_used.len(), 2);

        let one = inst(&[("a", 3, 3), ("b", 3, 5)], &[(0, 5)], Mode::Strict);
        assert_eq!(strict_feasible(&one, &one.all_taxa(), DEFAULT_ORDERING_GUARD).unwrap(), None);
        assert!(strict_feasible(&one, &TaxaSet::new(), 10).unwrap().unwrap().assignments.is_empty());
        assert!(matches!(
            strict_feasible(&one, &one.all_taxa(), 1),
            Err(Error::SetTooLarge { size: 2, limit: 1 })
        ));
    }

    #[test]
    fn verification_flags() {
        let i = inst(&[("a", 2, 2), ("b", 2, 4)], &[(0, 4), (0, 4)], Mode::Strict);
        let a = i.taxon_id("a").unwrap();
        let mut s = Schedule::empty(Mode::Collaborative);
        s.saved = TaxaSet::from_iter([a]);
        s.assignments.insert((0, 1), a);
        s.assignments.insert((0, 3), a);
        let r = verify_schedule(&i, &s).unwrap();
        assert!(r.violations.contains(&Violation::PostDeadline { taxon: a, team: 0, slot: 3 }));

        let mut s = Schedule::empty(Mode::Strict);
        s.saved = TaxaSet::from_iter([a]);
        s.assignments.insert((0, 1), a);
        s.assignments.insert((1, 2), a);
        let r = verify_schedule(&i, &s).unwrap();
        assert_eq!(r.violations, vec![Violation::StrictnessViolation { taxon: a }]);

        let mut s = Schedule::empty(Mode::Strict);
        s.assignments.insert((0, 5), a);
        assert!(matches!(verify_schedule(&i, &s), Err(Error::DomainMismatch(_))));
    }
}
