//! Tree DPs over person-hour budgets.
//!
//! All solvers share one engine: a budget is a vector in a mixed-radix box,
//! a leaf decides from its share whether it can be saved, and siblings split
//! the budget of their parent componentwise.

use crate::error::{Error, Result};
use crate::feasibility::Schedule;
use crate::model::{Instance, Mode, TaxaSet, TaxonId, VertexId};
use crate::outcome::{Algorithm, Diagnostics, Guards, SolveOutcome};

pub(crate) const NEG: i64 = i64::MIN;

/// Budget vectors `0 ≤ a_k < radix_k`, stored little-endian.
#[derive(Clone, Debug)]
pub(crate) struct BoxShape {
    radix: Vec<usize>,
    stride: Vec<usize>,
    size: usize,
}

impl BoxShape {
    pub(crate) fn new(radix: Vec<usize>, guards: &Guards) -> Result<Self> {
        let states: f64 = radix.iter().map(|&r| r as f64).product();
        if states > guards.dp_states {
            return Err(Error::StateSpaceTooLarge { states, limit: guards.dp_states });
        }
        let mut stride = Vec::with_capacity(radix.len());
        let mut size = 1;
        for &r in &radix {
            stride.push(size);
            size *= r;
        }
        Ok(BoxShape { radix, stride, size })
    }

    pub(crate) fn size(&self) -> usize {
        self.size
    }

    pub(crate) fn top(&self) -> usize {
        self.size - 1
    }

    pub(crate) fn digits(&self, mut idx: usize) -> Vec<usize> {
        self.radix
            .iter()
            .map(|&r| {
                let d = idx % r;
                idx /= r;
                d
            })
            .collect()
    }

    /// Pairs of budgets visited when splitting every budget in two.
    fn split_work(&self) -> f64 {
        self.radix.iter().map(|&r| (r * (r + 1) / 2) as f64).product()
    }

    /// Visits every vector with `a_k < limits[k]` until `f` returns false.
    fn for_each_below(&self, limits: &[usize], mut f: impl FnMut(usize) -> bool) {
        if limits.contains(&0) {
            return;
        }
        let mut digits = vec![0; limits.len()];
        let mut idx = 0;
        loop {
            if !f(idx) {
                return;
            }
            let mut k = 0;
            loop {
                if k == limits.len() {
                    return;
                }
                digits[k] += 1;
                idx += self.stride[k];
                if digits[k] < limits[k] {
                    break;
                }
                idx -= digits[k] * self.stride[k];
                digits[k] = 0;
                k += 1;
            }
        }
    }

    /// Best value of splitting each budget between `f` and `g`, including
    /// giving all of it to one side.
    fn combine(&self, f: &[i64], g: &[i64]) -> Vec<i64> {
        let mut h: Vec<i64> = f.iter().zip(g).map(|(&a, &b)| a.max(b)).collect();
        let mut limits = vec![0; self.radix.len()];
        for d in 0..self.size {
            if f[d] == NEG {
                continue;
            }
            let mut rest = d;
            for (k, l) in limits.iter_mut().enumerate() {
                *l = self.radix[k] - rest % self.radix[k];
                rest /= self.radix[k];
            }
            let fd = f[d];
            self.for_each_below(&limits, |e| {
                if g[e] != NEG && fd + g[e] > h[d + e] {
                    h[d + e] = fd + g[e];
                }
                true
            });
        }
        h
    }
}

/// Per-vertex tables of best diversity with at least one saved taxon below.
pub(crate) struct BoxDp {
    shape: BoxShape,
    table: Vec<Vec<i64>>,
    /// `prefix[v][i]`: the first `i + 1` children of `v` combined.
    prefix: Vec<Vec<Vec<i64>>>,
}

impl BoxDp {
    pub(crate) fn run(
        instance: &Instance,
        shape: BoxShape,
        guards: &Guards,
        leaf_ok: impl Fn(TaxonId, &[usize]) -> bool,
    ) -> Result<Self> {
        let tree = instance.tree();
        let tables = 2 * tree.vertex_count();
        let states = shape.size as f64 * tables as f64;
        if states > guards.dp_states {
            return Err(Error::StateSpaceTooLarge { states, limit: guards.dp_states });
        }
        let work = shape.split_work() * tree.edges().len() as f64;
        if work > guards.dp_work {
            return Err(Error::StateSpaceTooLarge { states: work, limit: guards.dp_work });
        }
        let all_digits: Vec<Vec<usize>> = (0..shape.size).map(|i| shape.digits(i)).collect();
        let mut table = vec![Vec::new(); tree.vertex_count()];
        let mut prefix = vec![Vec::new(); tree.vertex_count()];
        let order = tree.edges().iter().rev().copied().chain([tree.root()]);
        for v in order {
            let w = tree.weight(v) as i64;
            if tree.is_leaf(v) {
                let x = instance.taxon_at_leaf(v).expect("leaves carry taxa");
                table[v] = all_digits.iter().map(|a| if leaf_ok(x, a) { w } else { NEG }).collect();
                continue;
            }
            let children = tree.children(v);
            let mut acc = table[children[0]].clone();
            let mut kept = Vec::with_capacity(children.len() - 1);
            for &c in &children[1..] {
                let next = shape.combine(&acc, &table[c]);
                kept.push(acc);
                acc = next;
            }
            prefix[v] = kept;
            table[v] = acc.into_iter().map(|s| if s == NEG { NEG } else { s + w }).collect();
        }
        Ok(BoxDp { shape, table, prefix })
    }

    pub(crate) fn shape(&self) -> &BoxShape {
        &self.shape
    }

    pub(crate) fn root_table(&self, instance: &Instance) -> &[i64] {
        &self.table[instance.tree().root()]
    }

    /// Saved taxa of an optimal solution at the root budget `a`, each with
    /// the share of the budget it received.
    pub(crate) fn shares(&self, instance: &Instance, a: usize) -> Vec<(TaxonId, usize)> {
        let mut out = Vec::new();
        let root = instance.tree().root();
        if self.table[root][a] != NEG {
            self.descend(instance, root, a, &mut out);
        }
        out
    }

    fn descend(&self, instance: &Instance, v: VertexId, a: usize, out: &mut Vec<(TaxonId, usize)>) {
        let tree = instance.tree();
        if tree.is_leaf(v) {
            out.push((instance.taxon_at_leaf(v).expect("leaves carry taxa"), a));
            return;
        }
        let need = self.table[v][a] - tree.weight(v) as i64;
        self.split(instance, v, tree.children(v).len() - 1, a, need, out);
    }

    fn split(&self, instance: &Instance, v: VertexId, i: usize, a: usize, need: i64, out: &mut Vec<(TaxonId, usize)>) {
        let child = instance.tree().children(v)[i];
        if i == 0 {
            debug_assert_eq!(self.table[child][a], need);
            self.descend(instance, child, a, out);
            return;
        }
        let f = &self.prefix[v][i - 1];
        let g = &self.table[child];
        if f[a] == need {
            return self.split(instance, v, i - 1, a, need, out);
        }
        if g[a] == need {
            return self.descend(instance, child, a, out);
        }
        let limits: Vec<usize> = self.shape.digits(a).into_iter().map(|d| d + 1).collect();
        let mut found = None;
        self.shape.for_each_below(&limits, |d| {
            let e = a - d;
            if f[d] != NEG && g[e] != NEG && f[d] + g[e] == need {
                found = Some(d);
                return false;
            }
            true
        });
        let d = found.expect("table value has a witnessing split");
        self.split(instance, v, i - 1, d, f[d], out);
        self.descend(instance, child, a - d, out);
    }
}

fn finish_collaborative(
    instance: &Instance,
    dp: &BoxDp,
    budget: usize,
    mut diag: Diagnostics,
) -> Result<SolveOutcome> {
    let best = dp.root_table(instance)[budget];
    diag.optimum = Some(best.max(0) as u64);
    if instance.target() == 0 {
        return SolveOutcome::certified_collaborative(instance, TaxaSet::new(), diag);
    }
    if best == NEG || (best as u64) < instance.target() {
        return Ok(SolveOutcome::no(diag));
    }
    let saved = dp.shares(instance, budget).into_iter().map(|(x, _)| x).collect();
    SolveOutcome::certified_collaborative(instance, saved, diag)
}

/// Teams working in each timeslot `1..=max_ex`.
fn teams_per_slot(instance: &Instance) -> Vec<usize> {
    let max_ex = instance.index().max_ex;
    (1..=max_ex).map(|i| instance.teams().iter().filter(|t| t.start < i && i <= t.end).count()).collect()
}

/// Budgets are the numbers of teams granted in each timeslot.
pub fn solve_time_pd_team_vectors(instance: &Instance, guards: &Guards) -> Result<SolveOutcome> {
    let diag = Diagnostics::new(Algorithm::HoursTeams, Mode::Collaborative);
    let counts = teams_per_slot(instance);
    let shape = BoxShape::new(counts.iter().map(|&c| c + 1).collect(), guards)?;
    let dp = BoxDp::run(instance, shape, guards, |x, a| {
        let ex = instance.extinction(x) as usize;
        a[..ex].iter().sum::<usize>() as u64 >= instance.length(x)
    })?;
    let top = dp.shape().top();
    finish_collaborative(instance, &dp, top, diag)
}

/// Budgets cap the hours spent on each prefix of deadline classes.
pub fn solve_time_pd_hour_vectors(instance: &Instance, guards: &Guards) -> Result<SolveOutcome> {
    let diag = Diagnostics::new(Algorithm::HoursBudget, Mode::Collaborative);
    let idx = instance.index();
    let radix = idx.capacity.iter().map(|&h| usize::try_from(h).ok().and_then(|h| h.checked_add(1)));
    let radix: Vec<usize> = radix
        .collect::<Option<_>>()
        .ok_or(Error::StateSpaceTooLarge { states: f64::INFINITY, limit: guards.dp_states })?;
    let shape = BoxShape::new(radix, guards)?;
    let dp = BoxDp::run(instance, shape, guards, |x, a| {
        a[idx.class_of[x]..].iter().all(|&h| h as u64 >= instance.length(x))
    })?;
    let top = dp.shape().top();
    finish_collaborative(instance, &dp, top, diag)
}

/// Budgets are sets of teams granted in each timeslot; a taxon needs one
/// team for a contiguous run ending by its deadline.
pub fn solve_s_time_pd_team_subsets(instance: &Instance, guards: &Guards) -> Result<SolveOutcome> {
    let mut diag = Diagnostics::new(Algorithm::HoursSubsets, Mode::Strict);
    let max_ex = instance.index().max_ex;
    let mut dim = vec![vec![None; max_ex as usize + 1]; instance.teams().len()];
    let mut k = 0;
    for (t, team) in instance.teams().iter().enumerate() {
        for slot in team.start + 1..=team.end.min(max_ex) {
            dim[t][slot as usize] = Some(k);
            k += 1;
        }
    }
    let shape = BoxShape::new(vec![2; k], guards)?;
    let placement = |x: TaxonId, a: &[usize]| -> Option<(usize, u64)> {
        let (len, ex) = (instance.length(x), instance.extinction(x));
        instance.teams().iter().enumerate().find_map(|(t, team)| {
            let last = ex.min(team.end);
            (team.start..=last.saturating_sub(len))
                .filter(|&s| s + len <= last)
                .find(|&s| (s + 1..=s + len).all(|slot| dim[t][slot as usize].is_some_and(|d| a[d] == 1)))
                .map(|s| (t, s + 1))
        })
    };
    let dp = BoxDp::run(instance, shape, guards, |x, a| placement(x, a).is_some())?;
    let top = dp.shape().top();
    let best = dp.root_table(instance)[top];
    diag.optimum = Some(best.max(0) as u64);
    if instance.target() == 0 {
        return SolveOutcome::certified(instance, TaxaSet::new(), Schedule::empty(Mode::Strict), diag);
    }
    if best == NEG || (best as u64) < instance.target() {
        return Ok(SolveOutcome::no(diag));
    }
    let mut schedule = Schedule::empty(Mode::Strict);
    for (x, share) in dp.shares(instance, top) {
        let (team, first) = placement(x, &dp.shape().digits(share)).expect("saved leaves have a placement");
        for slot in first..first + instance.length(x) {
            schedule.assignments.insert((team, slot), x);
        }
        schedule.saved.insert(x);
    }
    let saved = schedule.saved.clone();
    SolveOutcome::certified(instance, saved, schedule, diag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{anchored_tree, four_teams, three_teams_star};
    use crate::generators::{gen_random_instance, GenParams, TreeShape};
    use crate::model::{PhyloTree, TaxonInfo, TeamWindow, TreeBuilder};
    use crate::oracle::{brute_force_s_time_pd, brute_force_time_pd};

    fn single(len: u64, ex: u64) -> Instance {
        Instance::new(
            PhyloTree::star(&[("x1", 4)]),
            [("x1", TaxonInfo::new(len, ex))],
            vec![TeamWindow::new(0, 5)],
            4,
            Mode::Collaborative,
        )
        .unwrap()
    }

    #[test]
    fn one_taxon() {
        let g = Guards::default();
        assert!(solve_time_pd_team_vectors(&single(3, 3), &g).unwrap().yes);
        assert!(!solve_time_pd_team_vectors(&single(3, 2), &g).unwrap().yes);
        assert!(solve_time_pd_hour_vectors(&single(3, 3), &g).unwrap().yes);
        assert!(!solve_time_pd_hour_vectors(&single(3, 2), &g).unwrap().yes);
        let strict = single(2, 2).with_mode(Mode::Strict);
        assert!(solve_s_time_pd_team_subsets(&strict, &g).unwrap().yes);
    }

    #[test]
    fn three_teams_saves_all() {
        let inst = three_teams_star();
        let out = solve_time_pd_hour_vectors(&inst, &Guards::default()).unwrap();
        assert!(out.yes);
        assert_eq!(out.witness.unwrap().saved, inst.all_taxa());
        assert_eq!(out.diagnostics.optimum, Some(6));
        let zero = solve_time_pd_hour_vectors(&inst.with_target(0), &Guards::default()).unwrap();
        assert!(zero.yes);
    }

    #[test]
    fn shared_window_is_exclusive() {
        let inst = Instance::new(
            PhyloTree::star(&[("x1", 1), ("x2", 1)]),
            [("x1", TaxonInfo::new(3, 3)), ("x2", TaxonInfo::new(3, 3))],
            vec![TeamWindow::new(0, 3)],
            1,
            Mode::Strict,
        )
        .unwrap();
        let g = Guards::default();
        let out = solve_s_time_pd_team_subsets(&inst, &g).unwrap();
        assert_eq!(out.diagnostics.optimum, Some(1));
        assert!(!solve_s_time_pd_team_subsets(&inst.with_target(2), &g).unwrap().yes);
    }

    #[test]
    fn child_order_does_not_matter() {
        let build = |flip: bool| {
            let mut b = TreeBuilder::new();
            let r = b.root();
            let u = b.add_internal(r, 2);
            let (a, c) = if flip { ("x2", "x1") } else { ("x1", "x2") };
            b.add_leaf(u, if flip { 3 } else { 1 }, a);
            b.add_leaf(u, if flip { 1 } else { 3 }, c);
            b.add_leaf(r, 2, "x3");
            let taxa = [("x1", TaxonInfo::new(2, 3)), ("x2", TaxonInfo::new(2, 4)), ("x3", TaxonInfo::new(3, 4))];
            Instance::new(b.build().unwrap(), taxa, vec![TeamWindow::new(0, 4)], 5, Mode::Collaborative).unwrap()
        };
        let g = Guards::default();
        for solve in [solve_time_pd_team_vectors, solve_time_pd_hour_vectors] {
            let a = solve(&build(false), &g).unwrap();
            let b = solve(&build(true), &g).unwrap();
            assert_eq!(a.diagnostics.optimum, b.diagnostics.optimum);
            assert_eq!(a.yes, b.yes);
        }
    }

    #[test]
    fn guards() {
        let tight = Guards { dp_states: 50.0, ..Guards::default() };
        assert!(matches!(
            solve_time_pd_hour_vectors(&four_teams(), &tight),
            Err(Error::StateSpaceTooLarge { .. })
        ));
        let slow = Guards { dp_work: 10.0, ..Guards::default() };
        assert!(matches!(solve_time_pd_team_vectors(&anchored_tree(), &slow), Err(Error::StateSpaceTooLarge { .. })));
    }

    #[test]
    fn collaborative_sweep_matches_oracle() {
        let g = Guards::default();
        for seed in 0..150 {
            let shape = TreeShape::ALL[seed as usize % 4];
            let p = GenParams { n: 2 + seed as usize % 5, teams: 1 + seed as usize % 2, max_ex: 4, max_len: 3, shape, ..GenParams::default() };
            let inst = gen_random_instance(&p, seed).unwrap();
            let oracle = brute_force_time_pd(&inst, &g).unwrap();
            for out in [solve_time_pd_team_vectors(&inst, &g).unwrap(), solve_time_pd_hour_vectors(&inst, &g).unwrap()] {
                assert_eq!(out.yes, oracle.yes, "seed {seed}");
                assert_eq!(out.diagnostics.optimum, oracle.diagnostics.optimum, "seed {seed}");
            }
        }
    }

    #[test]
    fn strict_sweep_matches_oracle() {
        let g = Guards::default();
        for seed in 0..150 {
            let shape = TreeShape::ALL[seed as usize % 4];
            let p = GenParams {
                n: 2 + seed as usize % 4,
                teams: 1 + seed as usize % 2,
                max_ex: 3,
                max_len: 2,
                shape,
                mode: Mode::Strict,
                ..GenParams::default()
            };
            let inst = gen_random_instance(&p, seed).unwrap();
            let oracle = brute_force_s_time_pd(&inst, &g).unwrap();
            let out = solve_s_time_pd_team_subsets(&inst, &g).unwrap();
            assert_eq!(out.yes, oracle.yes, "seed {seed}");
            assert_eq!(out.diagnostics.optimum, oracle.diagnostics.optimum, "seed {seed}");
        }
    }
}
