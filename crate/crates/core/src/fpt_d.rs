//! Color-coding solvers parameterized by the diversity target D.
//!
//! Each edge receives at most ω(e) colors out of `1..=D`. A set of taxa whose
//! root paths together show all `D` colors has diversity at least `D`, so the
//! colored problems ask for a cheapest color-covering set that can still be
//! scheduled.

use rayon::prelude::*;

use crate::color_coding::{random_hash, trial_count, trial_rng};
use crate::error::{Error, Result};
use crate::feasibility::{strict_feasible_given_ordering, strict_schedule_from_partition, Schedule};
use crate::model::{DerivedIndex, Instance, Mode, PhyloTree, TaxaSet, TaxonId};
use crate::outcome::{Algorithm, Diagnostics, Guards, SolveOutcome};

pub type ColorMask = u32;

const INF: u64 = u64::MAX;

fn psi(value: u64, bound: u64) -> u64 {
    if value <= bound {
        value
    } else {
        INF
    }
}

/// Edge colors for the D-parameterized DPs. Color `c` is bit `c - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DColoring {
    d: u32,
    edge_colors: Vec<ColorMask>,
}

impl DColoring {
    /// Builds a coloring from color lists given per edge in canonical order.
    pub fn from_edge_sets(tree: &PhyloTree, d: u32, sets: &[Vec<u32>]) -> Result<Self> {
        if sets.len() != tree.edges().len() {
            return Err(Error::InvalidInstance("one color set per edge is required".into()));
        }
        let mut edge_colors: Vec<ColorMask> = vec![0; tree.vertex_count()];
        for (&e, set) in tree.edges().iter().zip(sets) {
            for &c in set {
                if c == 0 || c > d {
                    return Err(Error::InvalidInstance(format!("color {c} outside 1..={d}")));
                }
                edge_colors[e] |= 1 << (c - 1);
            }
            if u64::from(edge_colors[e].count_ones()) > tree.weight(e) {
                return Err(Error::InvalidInstance("edge has more colors than its weight".into()));
            }
        }
        Ok(DColoring { d, edge_colors })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn edge_colors(&self, e: usize) -> ColorMask {
        self.edge_colors[e]
    }

    /// Colors on the root path of every taxon.
    pub fn taxon_colors(&self, instance: &Instance) -> Vec<ColorMask> {
        let mut out = Vec::with_capacity(instance.n());
        self.taxon_colors_into(instance, &mut out);
        out
    }

    fn taxon_colors_into(&self, instance: &Instance, out: &mut Vec<ColorMask>) {
        let tree = instance.tree();
        out.clear();
        out.extend(
            instance
                .taxa()
                .iter()
                .map(|t| tree.path_to_root(t.leaf).fold(0, |m, e| m | self.edge_colors[e])),
        );
    }

    pub fn full(&self) -> ColorMask {
        full_mask(self.d)
    }
}

fn full_mask(d: u32) -> ColorMask {
    if d == 0 {
        0
    } else {
        ColorMask::MAX >> (32 - d)
    }
}

/// Edge `j` in canonical order gets the colors `f` assigns to its block of
/// `ω(e_j)` consecutive positions.
pub fn color_edges_from_hash(tree: &PhyloTree, d: u32, f: &[u32]) -> DColoring {
    let mut edge_colors: Vec<ColorMask> = vec![0; tree.vertex_count()];
    let mut pos = 0;
    for &e in tree.edges() {
        let w = tree.weight(e) as usize;
        edge_colors[e] = f[pos..pos + w].iter().fold(0, |m, &c| m | 1 << (c - 1));
        pos += w;
    }
    DColoring { d, edge_colors }
}

fn check_width(d: u64, guards: &Guards) -> Result<()> {
    if d > guards.d_mask_width.min(31) {
        return Err(Error::DTooLarge { d, limit: guards.d_mask_width.min(31) });
    }
    Ok(())
}

/// Reusable tables for the collaborative colored DP.
#[derive(Default)]
struct CollabTables {
    table: Vec<u64>,
    colors: Vec<ColorMask>,
}

impl CollabTables {
    fn solve(&mut self, instance: &Instance, coloring: &DColoring) -> Option<TaxaSet> {
        let idx = instance.index();
        let k = idx.var_ex();
        coloring.taxon_colors_into(instance, &mut self.colors);
        let size = 1usize << coloring.d;
        self.table.clear();
        self.table.resize(size * k, INF);
        self.table[..k].fill(0);
        for c in 1..size {
            let mask = c as ColorMask;
            for p in 0..k {
                let mut best = if p > 0 { self.table[c * k + p - 1] } else { INF };
                for x in idx.class(p) {
                    let cx = self.colors[x];
                    if cx & mask == 0 {
                        continue;
                    }
                    let rest = self.table[(mask & !cx) as usize * k + p];
                    if rest != INF {
                        best = best.min(psi(rest + idx.lengths[x], idx.capacity[p]));
                    }
                }
                self.table[c * k + p] = best;
            }
        }
        let full = coloring.full() as usize;
        if self.table[full * k + k - 1] == INF {
            return None;
        }
        let mut set = TaxaSet::new();
        let (mut mask, mut p) = (coloring.full(), k - 1);
        while mask != 0 {
            let target = self.table[mask as usize * k + p];
            let x = idx
                .prefix(p)
                .find(|&x| {
                    let cx = self.colors[x];
                    let q = idx.class_of[x];
                    let rest = self.table[(mask & !cx) as usize * k + q];
                    cx & mask != 0 && rest != INF && psi(rest + idx.lengths[x], idx.capacity[q]) == target
                })
                .expect("finite entries have a witness");
            set.insert(x);
            mask &= !self.colors[x];
            p = idx.class_of[x];
        }
        Some(set)
    }
}

/// Cheapest set covering every color whose prefix sums respect all capacities.
pub fn solve_colored_time_pd(instance: &Instance, coloring: &DColoring, guards: &Guards) -> Result<Option<TaxaSet>> {
    check_width(coloring.d.into(), guards)?;
    Ok(CollabTables::default().solve(instance, coloring))
}

/// Which per-team capacity bounds a run of taxa ending in class `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum CapacityRule {
    /// Capacity up to the deadline of the newly added taxon.
    NewTaxonClass,
    /// Capacity up to the deadline of the previous partial set.
    #[cfg_attr(not(test), allow(dead_code))]
    IntermediateClass,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrictColoredWitness {
    pub saved: TaxaSet,
    /// Taxa handled by each team, disjoint and ordered by team index.
    pub parts: Vec<TaxaSet>,
}

#[derive(Default)]
struct StrictTables {
    /// Per team: best over classes `q <= p` of the per-class table.
    prefix_min: Vec<Vec<u64>>,
    per_class: Vec<Vec<u64>>,
    covers: Vec<Vec<bool>>,
    layers: Vec<Vec<bool>>,
    colors: Vec<ColorMask>,
}

impl StrictTables {
    fn fill_team(&mut self, idx: &DerivedIndex, i: usize, d: u32, rule: CapacityRule) {
        let k = idx.var_ex();
        let size = 1usize << d;
        let cap = &idx.team_capacity[i];
        let pm = &mut self.prefix_min[i];
        let pc = &mut self.per_class[i];
        pm.clear();
        pm.resize(size * k, INF);
        pc.clear();
        pc.resize(size * k, INF);
        pm[..k].fill(0);
        pc[..k].fill(0);
        for c in 1..size {
            let mask = c as ColorMask;
            for p in 0..k {
                let mut best = INF;
                for x in idx.class(p) {
                    let cx = self.colors[x];
                    if cx & mask == 0 {
                        continue;
                    }
                    let base = (mask & !cx) as usize * k;
                    match rule {
                        CapacityRule::NewTaxonClass => {
                            let rest = pm[base + p];
                            if rest != INF {
                                best = best.min(psi(rest + idx.lengths[x], cap[p]));
                            }
                        }
                        CapacityRule::IntermediateClass => {
                            for q in 0..=p {
                                let rest = pc[base + q];
                                if rest != INF {
                                    best = best.min(psi(rest + idx.lengths[x], cap[q]));
                                }
                            }
                        }
                    }
                }
                pc[c * k + p] = best;
                pm[c * k + p] = if p > 0 { best.min(pm[c * k + p - 1]) } else { best };
            }
        }
        let cover = &mut self.covers[i];
        cover.clear();
        cover.extend((0..size).map(|c| pm[c * k + k - 1] != INF));
    }

    fn decide(&mut self, instance: &Instance, coloring: &DColoring, rule: CapacityRule) -> bool {
        let idx = instance.index();
        let teams = instance.teams().len();
        coloring.taxon_colors_into(instance, &mut self.colors);
        self.prefix_min.resize(teams, Vec::new());
        self.per_class.resize(teams, Vec::new());
        self.covers.resize(teams, Vec::new());
        self.layers.clear();
        for i in 0..teams {
            self.fill_team(idx, i, coloring.d, rule);
            let layer = if i == 0 {
                self.covers[0].clone()
            } else {
                boolean_cover_combine(&self.layers[i - 1], &self.covers[i])
            };
            self.layers.push(layer);
        }
        self.layers[teams - 1][coloring.full() as usize]
    }

    fn team_set(&self, idx: &DerivedIndex, i: usize, mut mask: ColorMask) -> TaxaSet {
        let k = idx.var_ex();
        let pm = &self.prefix_min[i];
        let cap = &idx.team_capacity[i];
        let mut set = TaxaSet::new();
        let mut p = k - 1;
        while mask != 0 {
            let m = mask as usize * k;
            while p > 0 && pm[m + p] == pm[m + p - 1] {
                p -= 1;
            }
            let target = pm[m + p];
            let x = idx
                .class(p)
                .find(|&x| {
                    let cx = self.colors[x];
                    let rest = pm[(mask & !cx) as usize * k + p];
                    cx & mask != 0 && rest != INF && psi(rest + idx.lengths[x], cap[p]) == target
                })
                .expect("finite entries have a witness");
            set.insert(x);
            mask &= !self.colors[x];
        }
        set
    }

    fn witness(&self, instance: &Instance, full: ColorMask) -> StrictColoredWitness {
        let idx = instance.index();
        let teams = instance.teams().len();
        let mut masks = vec![0; teams];
        let mut rest = full;
        for i in (1..teams).rev() {
            let mut sub = rest;
            loop {
                if self.layers[i - 1][sub as usize] && self.covers[i][(rest & !sub) as usize] {
                    break;
                }
                assert!(sub != 0, "a covered mask splits across teams");
                sub = (sub - 1) & rest;
            }
            masks[i] = rest & !sub;
            rest = sub;
        }
        masks[0] = rest;
        let mut taken = TaxaSet::new();
        let mut parts = Vec::with_capacity(teams);
        for (i, &m) in masks.iter().enumerate() {
            let part: TaxaSet = self.team_set(idx, i, m).iter().filter(|&x| !taken.contains(x)).collect();
            taken = taken.union(&part);
            parts.push(part);
        }
        StrictColoredWitness { saved: taken, parts }
    }
}

/// Colored strict problem: split the colors among teams so that each team
/// covers its share with a set it can run back to back.
pub fn solve_colored_s_time_pd(
    instance: &Instance,
    coloring: &DColoring,
    guards: &Guards,
) -> Result<Option<StrictColoredWitness>> {
    check_width(coloring.d.into(), guards)?;
    let mut tables = StrictTables::default();
    Ok(tables
        .decide(instance, coloring, CapacityRule::NewTaxonClass)
        .then(|| tables.witness(instance, coloring.full())))
}

#[cfg(test)]
pub(crate) fn decide_colored_strict_with_rule(
    instance: &Instance,
    coloring: &DColoring,
    rule: CapacityRule,
) -> bool {
    StrictTables::default().decide(instance, coloring, rule)
}

/// `h(C)` is true iff `C` splits into `C'` and `C \ C'` with `f(C')` and `g(C \ C')`.
pub fn boolean_cover_combine(f: &[bool], g: &[bool]) -> Vec<bool> {
    assert_eq!(f.len(), g.len(), "tables must have equal width");
    if f.len() <= 1 << 9 {
        cover_product_direct(f, g)
    } else {
        cover_product_ranked(f, g)
    }
}

/// Enumerates every submask, `3^D` steps in total.
pub fn cover_product_direct(f: &[bool], g: &[bool]) -> Vec<bool> {
    (0..f.len())
        .map(|c| {
            let mut sub = c;
            loop {
                if f[sub] && g[c & !sub] {
                    return true;
                }
                if sub == 0 {
                    return false;
                }
                sub = (sub - 1) & c;
            }
        })
        .collect()
}

/// Subset convolution through ranked zeta and Möbius transforms.
///
/// Counts wrap modulo 2^64; the true count is below `2^D`, so the residue is
/// exact and nonzero exactly when some split exists.
pub fn cover_product_ranked(f: &[bool], g: &[bool]) -> Vec<bool> {
    let size = f.len();
    assert!(size.is_power_of_two());
    let d = size.trailing_zeros() as usize;
    let ranked = |t: &[bool]| {
        let mut r = vec![vec![0u64; size]; d + 1];
        for (s, &v) in t.iter().enumerate() {
            if v {
                r[s.count_ones() as usize][s] = 1;
            }
        }
        for layer in r.iter_mut() {
            zeta(layer, d);
        }
        r
    };
    let fr = ranked(f);
    let gr = ranked(g);
    let mut out = vec![false; size];
    let mut h = vec![0u64; size];
    for k in 0..=d {
        for (s, v) in h.iter_mut().enumerate() {
            *v = (0..=k).fold(0u64, |acc, i| acc.wrapping_add(fr[i][s].wrapping_mul(gr[k - i][s])));
        }
        mobius(&mut h, d);
        for (s, o) in out.iter_mut().enumerate() {
            if s.count_ones() as usize == k {
                *o = h[s] != 0;
            }
        }
    }
    out
}

fn zeta(a: &mut [u64], d: usize) {
    for bit in 0..d {
        for s in 0..a.len() {
            if s >> bit & 1 == 1 {
                a[s] = a[s].wrapping_add(a[s ^ (1 << bit)]);
            }
        }
    }
}

fn mobius(a: &mut [u64], d: usize) {
    for bit in 0..d {
        for s in 0..a.len() {
            if s >> bit & 1 == 1 {
                a[s] = a[s].wrapping_sub(a[s ^ (1 << bit)]);
            }
        }
    }
}

fn single_taxon_outcome(instance: &Instance, x: TaxonId, mode: Mode, diag: Diagnostics) -> Result<SolveOutcome> {
    let set = TaxaSet::from_iter([x]);
    match mode {
        Mode::Collaborative => SolveOutcome::certified_collaborative(instance, set, diag),
        Mode::Strict => {
            let schedule = strict_feasible_given_ordering(instance, &[x])
                .ok_or_else(|| Error::WitnessRejected("single taxon does not fit any team".into()))?;
            SolveOutcome::certified(instance, set, schedule, diag)
        }
    }
}

enum Found {
    Collaborative(TaxaSet),
    Strict(StrictColoredWitness),
}

fn by_d(instance: &Instance, mode: Mode, delta: f64, seed: u64, guards: &Guards) -> Result<SolveOutcome> {
    let mut diag = Diagnostics::new(Algorithm::FptD, mode);
    diag.seed = Some(seed);
    diag.delta = Some(delta);
    let d = instance.target();
    let empty = Schedule::empty(mode);
    if d == 0 {
        return SolveOutcome::certified(instance, TaxaSet::new(), empty, diag);
    }
    if d > instance.index().total_pd {
        return Ok(SolveOutcome::no(diag));
    }
    let tree = instance.tree();
    let savable: Vec<bool> = (0..instance.n()).map(|x| instance.savable_alone(x, mode)).collect();
    for &e in tree.edges() {
        if tree.weight(e) >= d {
            let best = tree
                .offspring(e)
                .into_iter()
                .filter_map(|v| instance.taxon_at_leaf(v))
                .filter(|&x| savable[x])
                .min();
            if let Some(x) = best {
                return single_taxon_outcome(instance, x, mode, diag);
            }
        }
    }
    check_width(d, guards)?;
    let trials = trial_count(d, delta)?;
    diag.trials_planned = trials;
    let d32 = d as u32;
    let w = tree.total_weight() as usize;
    let found = (0..trials)
        .into_par_iter()
        .map_init(
            || (Vec::new(), CollabTables::default(), StrictTables::default()),
            |(f, collab, strict), t| {
                random_hash(&mut trial_rng(seed, t), w, d32, f);
                let coloring = color_edges_from_hash(tree, d32, f);
                let hit = match mode {
                    Mode::Collaborative => collab.solve(instance, &coloring).map(Found::Collaborative),
                    Mode::Strict => strict
                        .decide(instance, &coloring, CapacityRule::NewTaxonClass)
                        .then(|| Found::Strict(strict.witness(instance, coloring.full()))),
                };
                hit.map(|h| (t, h))
            },
        )
        .find_first(|r| r.is_some())
        .flatten();
    let Some((t, hit)) = found else {
        diag.trials_run = trials;
        return Ok(SolveOutcome::no(diag));
    };
    diag.trials_run = t + 1;
    match hit {
        Found::Collaborative(set) => SolveOutcome::certified_collaborative(instance, set, diag),
        Found::Strict(w) => {
            let schedule = strict_schedule_from_partition(instance, &w.parts)
                .ok_or_else(|| Error::WitnessRejected("team share cannot be run back to back".into()))?;
            SolveOutcome::certified(instance, w.saved, schedule, diag)
        }
    }
}

/// Randomized solver for the collaborative problem; yes answers are certified.
pub fn solve_time_pd_by_d(instance: &Instance, delta: f64, seed: u64, guards: &Guards) -> Result<SolveOutcome> {
    by_d(instance, Mode::Collaborative, delta, seed, guards)
}

/// Randomized solver for the strict problem; yes answers are certified.
pub fn solve_s_time_pd_by_d(instance: &Instance, delta: f64, seed: u64, guards: &Guards) -> Result<SolveOutcome> {
    by_d(instance, Mode::Strict, delta, seed, guards)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feasibility::{collaborative_feasible, strict_feasible, verify_schedule};
    use crate::generators::{gen_random_instance, GenParams, TargetRule, TreeShape};
    use crate::model::{TaxonInfo, TeamWindow};
    use crate::oracle::{brute_force_s_time_pd, brute_force_time_pd};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn two_taxa(teams: &[(u64, u64)], infos: [(u64, u64); 2], mode: Mode) -> Instance {
        Instance::new(
            PhyloTree::star(&[("x1", 1), ("x2", 1)]),
            [("x1", TaxonInfo::new(infos[0].0, infos[0].1)), ("x2", TaxonInfo::new(infos[1].0, infos[1].1))],
            teams.iter().map(|&(s, e)| TeamWindow::new(s, e)).collect(),
            2,
            mode,
        )
        .unwrap()
    }

    #[test]
    fn hash_coloring_blocks() {
        let t = PhyloTree::star(&[("a", 2), ("b", 3)]);
        let c = color_edges_from_hash(&t, 3, &[1, 1, 2, 3, 3]);
        let e = t.edges();
        assert_eq!(c.edge_colors(e[0]), 0b001);
        assert_eq!(c.edge_colors(e[1]), 0b110);
        let constant = color_edges_from_hash(&t, 3, &[2; 5]);
        assert!(e.iter().all(|&x| constant.edge_colors(x) == 0b010));
        let ident = color_edges_from_hash(&t, 5, &[1, 2, 3, 4, 5]);
        assert_eq!(ident.edge_colors(e[0]).count_ones() + ident.edge_colors(e[1]).count_ones(), 5);
    }

    #[test]
    fn colored_collaborative_examples() {
        let g = Guards::default();
        let inst = two_taxa(&[(0, 10)], [(3, 5), (4, 9)], Mode::Collaborative);
        let c = DColoring::from_edge_sets(inst.tree(), 2, &[vec![1], vec![2]]).unwrap();
        let set = solve_colored_time_pd(&inst, &c, &g).unwrap().unwrap();
        assert_eq!(set, inst.all_taxa());
        let mut tables = CollabTables::default();
        tables.solve(&inst, &c);
        let k = inst.index().var_ex();
        assert_eq!(tables.table[0b11 * k + k - 1], 7);

        let missing = DColoring::from_edge_sets(inst.tree(), 2, &[vec![2], vec![2]]).unwrap();
        assert_eq!(solve_colored_time_pd(&inst, &missing, &g).unwrap(), None);
        let zero = DColoring::from_edge_sets(inst.tree(), 0, &[vec![], vec![]]).unwrap();
        assert_eq!(solve_colored_time_pd(&inst, &zero, &g).unwrap(), Some(TaxaSet::new()));
    }

    #[test]
    fn colored_strict_examples() {
        let g = Guards::default();
        // each taxon fits only in its own team's window
        let inst = two_taxa(&[(0, 3), (3, 6)], [(3, 3), (3, 6)], Mode::Strict);
        let c = DColoring::from_edge_sets(inst.tree(), 2, &[vec![1], vec![2]]).unwrap();
        let w = solve_colored_s_time_pd(&inst, &c, &g).unwrap().unwrap();
        assert_eq!(w.parts, vec![TaxaSet::from_iter([0]), TaxaSet::from_iter([1])]);
        let zero = DColoring::from_edge_sets(inst.tree(), 0, &[vec![], vec![]]).unwrap();
        assert!(solve_colored_s_time_pd(&inst, &zero, &g).unwrap().is_some());
    }

    #[test]
    fn cover_product_examples() {
        let mut empty = vec![false; 8];
        empty[0] = true;
        assert_eq!(cover_product_direct(&empty, &empty), empty);
        assert_eq!(cover_product_ranked(&empty, &empty), empty);
        let ones = vec![true; 8];
        let mut g = vec![false; 8];
        g[0b110] = true;
        let h = cover_product_direct(&ones, &g);
        for c in 0..8 {
            assert_eq!(h[c], c & 0b110 == 0b110);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..5 {
            let f: Vec<bool> = (0..1024).map(|_| rng.random_bool(0.05)).collect();
            let g: Vec<bool> = (0..1024).map(|_| rng.random_bool(0.05)).collect();
            assert_eq!(cover_product_direct(&f, &g), cover_product_ranked(&f, &g));
        }
    }

    fn colored_brute(inst: &Instance, c: &DColoring, mode: Mode) -> bool {
        let colors = c.taxon_colors(inst);
        (0u64..1 << inst.n()).any(|m| {
            let set = TaxaSet::from_mask(m);
            let cov = set.iter().fold(0, |a, x| a | colors[x]);
            cov == c.full()
                && match mode {
                    Mode::Collaborative => collaborative_feasible(inst.index(), &set),
                    Mode::Strict => strict_feasible(inst, &set, 10).unwrap().is_some(),
                }
        })
    }

    fn random_setup(seed: u64, mode: Mode) -> (Instance, DColoring) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = GenParams {
            n: rng.random_range(2..=6),
            teams: rng.random_range(1..=3),
            max_ex: 6,
            max_len: 3,
            max_weight: 3,
            shape: TreeShape::ALL[rng.random_range(0..4)],
            mode,
            target: TargetRule::HalfTotal,
            savable_fraction: 0.8,
        };
        let inst = gen_random_instance(&params, seed).unwrap();
        let d = rng.random_range(1..=8);
        let f: Vec<u32> = (0..inst.tree().total_weight()).map(|_| rng.random_range(1..=d)).collect();
        let c = color_edges_from_hash(inst.tree(), d, &f);
        (inst, c)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn colored_collaborative_is_exact(seed in any::<u64>()) {
            let (inst, c) = random_setup(seed, Mode::Collaborative);
            let got = solve_colored_time_pd(&inst, &c, &Guards::default()).unwrap();
            prop_assert_eq!(got.is_some(), colored_brute(&inst, &c, Mode::Collaborative));
            if let Some(set) = got {
                let colors = c.taxon_colors(&inst);
                prop_assert_eq!(set.iter().fold(0, |a, x| a | colors[x]), c.full());
                prop_assert!(collaborative_feasible(inst.index(), &set));
            }
        }

        #[test]
        fn colored_strict_is_exact(seed in any::<u64>()) {
            let (inst, c) = random_setup(seed, Mode::Strict);
            let got = solve_colored_s_time_pd(&inst, &c, &Guards::default()).unwrap();
            prop_assert_eq!(got.is_some(), colored_brute(&inst, &c, Mode::Strict));
            if let Some(w) = got {
                let s = strict_schedule_from_partition(&inst, &w.parts).unwrap();
                prop_assert!(verify_schedule(&inst, &s).unwrap().passed());
            }
        }

        #[test]
        fn one_team_strict_matches_collaborative(seed in any::<u64>()) {
            let (inst, c) = random_setup(seed, Mode::Strict);
            let one = Instance::new(
                inst.tree().clone(),
                inst.taxa().iter().map(|t| (t.name.clone(), t.info)),
                vec![inst.teams()[0]],
                inst.target(),
                Mode::Strict,
            ).unwrap();
            let g = Guards::default();
            prop_assert_eq!(
                solve_colored_s_time_pd(&one, &c, &g).unwrap().is_some(),
                solve_colored_time_pd(&one, &c, &g).unwrap().is_some()
            );
        }
    }

    /// Bounding by the previous class rejects a late taxon that runs after the
    /// first deadline, although the team has time for both.
    #[test]
    fn intermediate_class_bound_misses_feasible_sets() {
        let inst = Instance::new(
            PhyloTree::star(&[("long", 1), ("short", 1)]),
            [("long", TaxonInfo::new(4, 4)), ("short", TaxonInfo::new(2, 8))],
            vec![TeamWindow::new(0, 8)],
            2,
            Mode::Strict,
        )
        .unwrap();
        let c = DColoring::from_edge_sets(inst.tree(), 2, &[vec![1], vec![2]]).unwrap();
        assert!(colored_brute(&inst, &c, Mode::Strict));
        assert!(decide_colored_strict_with_rule(&inst, &c, CapacityRule::NewTaxonClass));
        assert!(!decide_colored_strict_with_rule(&inst, &c, CapacityRule::IntermediateClass));
    }

    #[test]
    fn wrapper_matches_oracle() {
        let g = Guards::default();
        for seed in 0..60 {
            let mode = if seed % 2 == 0 { Mode::Collaborative } else { Mode::Strict };
            let params = GenParams {
                n: 5,
                teams: 2,
                max_ex: 6,
                max_len: 3,
                max_weight: 3,
                shape: TreeShape::RandomMultifurcating,
                mode,
                target: TargetRule::Fixed(1 + seed % 6),
                savable_fraction: 0.8,
            };
            let inst = gen_random_instance(&params, seed).unwrap();
            let (want, got) = match mode {
                Mode::Collaborative => (
                    brute_force_time_pd(&inst, &g).unwrap(),
                    solve_time_pd_by_d(&inst, 0.01, seed, &g).unwrap(),
                ),
                Mode::Strict => (
                    brute_force_s_time_pd(&inst, &g).unwrap(),
                    solve_s_time_pd_by_d(&inst, 0.01, seed, &g).unwrap(),
                ),
            };
            assert_eq!(want.yes, got.yes, "seed {seed}");
            if let Some(w) = got.witness {
                assert!(w.pd >= inst.target());
            }
        }
    }

    #[test]
    fn wrapper_details() {
        let g = Guards::default();
        let inst = two_taxa(&[(0, 10)], [(3, 5), (4, 9)], Mode::Collaborative);
        let one = solve_time_pd_by_d(&inst.with_target(1), 0.01, 3, &g).unwrap();
        assert!(one.yes);
        assert_eq!(one.diagnostics.trials_run, 0);
        let two = solve_time_pd_by_d(&inst, 0.01, 3, &g).unwrap();
        assert!(two.yes);
        assert_eq!(two.diagnostics.trials_planned, trial_count(2, 0.01).unwrap());
        let again = solve_time_pd_by_d(&inst, 0.01, 3, &g).unwrap();
        assert_eq!(two, again);
        let wide = Guards { d_mask_width: 1, ..Guards::default() };
        assert!(matches!(solve_time_pd_by_d(&inst, 0.01, 3, &wide), Err(Error::DTooLarge { .. })));
    }
}
