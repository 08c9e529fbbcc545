//! Color-coding solver parameterized by the acceptable diversity loss
//! D̄ = PD(X) − D.
//!
//! Sacrificed taxa are described by anchored tuples `(x, v, e)`: the path from
//! the anchor `v` down to `x` is lost, while the sibling edge `e` keeps `v`
//! alive. Every edge gets a key color, and edges of weight at most D̄ get
//! `ω(e) − 1` further colors, so the colors seen on lost paths bound the loss.

use rayon::prelude::*;
use rustc_hash::{FxHashMap, FxHashSet};

use crate::color_coding::{random_hash, trial_count, trial_rng};
use crate::error::{Error, Result};
use crate::feasibility::collaborative_feasible;
use crate::model::{Instance, Mode, PhyloTree, TaxaSet, TaxonId, VertexId};
use crate::outcome::{Algorithm, Diagnostics, Guards, SolveOutcome};

/// Color `c` is bit `c - 1`.
pub type ColorMask = u64;

const NEG: i64 = i64::MIN;
const MAX_COLORS: u32 = 64;

fn bit(c: u32) -> ColorMask {
    1 << (c - 1)
}

fn full(colors: u32) -> ColorMask {
    if colors == 0 {
        0
    } else {
        ColorMask::MAX >> (MAX_COLORS - colors)
    }
}

/// Key colors on all edges and extra colors on the edges of weight at most D̄.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DbarColoring {
    dbar: u32,
    key: Vec<u32>,
    /// c(e) for small edges whose `ω(e)` colors are pairwise distinct, else 0.
    colors: Vec<ColorMask>,
    small: Vec<bool>,
}

impl DbarColoring {
    /// Explicit coloring. `keys` and `extras` are given per edge in canonical
    /// order; `extras[j]` must be `Some` exactly for edges of weight at most `dbar`.
    pub fn new(tree: &PhyloTree, dbar: u32, keys: &[u32], extras: &[Option<Vec<u32>>]) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidInstance(m));
        if 2 * dbar > MAX_COLORS {
            return Err(Error::DbarTooLarge { dbar: dbar.into(), limit: (MAX_COLORS / 2).into() });
        }
        let m = tree.edges().len();
        if keys.len() != m || extras.len() != m {
            return bad("one key color and one extra-color entry per edge are required".into());
        }
        let n = tree.vertex_count();
        let mut out = DbarColoring { dbar, key: vec![0; n], colors: vec![0; n], small: vec![false; n] };
        let in_range = |c: u32| (1..=2 * dbar).contains(&c);
        for (j, &e) in tree.edges().iter().enumerate() {
            let w = tree.weight(e);
            if !in_range(keys[j]) {
                return bad(format!("key color {} of edge {} outside 1..={}", keys[j], j + 1, 2 * dbar));
            }
            out.key[e] = keys[j];
            out.small[e] = w <= u64::from(dbar);
            match (&extras[j], out.small[e]) {
                (Some(extra), true) => {
                    let mut mask = bit(keys[j]);
                    for &c in extra {
                        if !in_range(c) || mask & bit(c) != 0 {
                            return bad(format!("extra colors of edge {} repeat or leave the range", j + 1));
                        }
                        mask |= bit(c);
                    }
                    if u64::from(mask.count_ones()) != w {
                        return bad(format!("edge {} needs {} extra colors", j + 1, w - 1));
                    }
                    out.colors[e] = mask;
                }
                (None, false) => {}
                (Some(_), false) => return bad(format!("edge {} is heavier than {dbar} and takes no extras", j + 1)),
                (None, true) => return bad(format!("edge {} needs extra colors", j + 1)),
            }
        }
        Ok(out)
    }

    /// Number of hash positions: one key per edge plus `ω(e) − 1` per small edge.
    pub fn hash_len(tree: &PhyloTree, dbar: u32) -> usize {
        tree.edges()
            .iter()
            .map(|&e| tree.weight(e))
            .filter(|&w| w <= u64::from(dbar))
            .map(|w| w as usize - 1)
            .sum::<usize>()
            + tree.edges().len()
    }

    /// Coloring induced by `f: [hash_len] → [2 D̄]`. Small edges come first in
    /// canonical order, then the heavy ones; edge `j` takes key `f(j)`, and
    /// small edge `j` takes extras `f(W_{j−1}+1..=W_j)` with `W_0 = m`.
    ///
    /// A small edge whose colors collide is kept out of every lost path.
    pub fn from_hash(tree: &PhyloTree, dbar: u32, f: &[u32]) -> Self {
        let n = tree.vertex_count();
        let mut out = DbarColoring { dbar, key: vec![0; n], colors: vec![0; n], small: vec![false; n] };
        let is_small = |e: VertexId| tree.weight(e) <= u64::from(dbar);
        let order = tree.edges().iter().copied().filter(|&e| is_small(e)).chain(tree.edges().iter().copied().filter(|&e| !is_small(e)));
        let mut pos = tree.edges().len();
        for (j, e) in order.enumerate() {
            out.key[e] = f[j];
            if is_small(e) {
                out.small[e] = true;
                let w = tree.weight(e) as usize;
                let mask = f[pos..pos + w - 1].iter().fold(bit(f[j]), |m, &c| m | bit(c));
                pos += w - 1;
                if mask.count_ones() as usize == w {
                    out.colors[e] = mask;
                }
            }
        }
        out
    }

    pub fn dbar(&self) -> u32 {
        self.dbar
    }

    pub fn color_count(&self) -> u32 {
        2 * self.dbar
    }

    pub fn key(&self, e: VertexId) -> u32 {
        self.key[e]
    }

    pub fn is_small(&self, e: VertexId) -> bool {
        self.small[e]
    }

    /// c(e), or `None` for heavy edges and small edges with colliding colors.
    pub fn colors(&self, e: VertexId) -> Option<ColorMask> {
        (self.colors[e] != 0).then_some(self.colors[e])
    }

    fn key_bit(&self, e: VertexId) -> ColorMask {
        bit(self.key[e])
    }

    fn span(&self, e: VertexId) -> ColorMask {
        self.colors(e).unwrap_or_else(|| self.key_bit(e))
    }
}

/// A sacrificed taxon `x`, the highest vertex `v` it takes down with it, and
/// an edge `e` below `v` that stays alive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AnchoredTuple {
    pub taxon: TaxonId,
    pub anchor: VertexId,
    pub edge: VertexId,
}

impl AnchoredTuple {
    pub fn new(taxon: TaxonId, anchor: VertexId, edge: VertexId) -> Self {
        AnchoredTuple { taxon, anchor, edge }
    }

    /// Edges between the anchor and the taxon, lowest first.
    pub fn path(&self, instance: &Instance) -> Vec<VertexId> {
        let tree = instance.tree();
        let mut out = Vec::new();
        let mut u = instance.taxon(self.taxon).leaf;
        loop {
            out.push(u);
            match tree.parent(u) {
                Some(p) if p != self.anchor => u = p,
                _ => return out,
            }
        }
    }

    pub fn is_valid(&self, instance: &Instance) -> bool {
        if self.taxon >= instance.n() {
            return false;
        }
        let tree = instance.tree();
        let leaf = instance.taxon(self.taxon).leaf;
        tree.is_strict_ancestor(self.anchor, leaf)
            && tree.children(self.anchor).contains(&self.edge)
            && self.path(instance).last() != Some(&self.edge)
    }
}

/// Every structurally valid tuple, ordered by taxon.
pub fn enumerate_tuples(instance: &Instance) -> Vec<AnchoredTuple> {
    let tree = instance.tree();
    let mut out = Vec::new();
    for x in 0..instance.n() {
        let mut u = instance.taxon(x).leaf;
        while let Some(v) = tree.parent(u) {
            out.extend(tree.children(v).iter().filter(|&&e| e != u).map(|&e| AnchoredTuple::new(x, v, e)));
            u = v;
        }
    }
    out
}

/// X(𝒜).
pub fn sacrificed(tuples: &[AnchoredTuple]) -> TaxaSet {
    tuples.iter().map(|t| t.taxon).collect()
}

/// E⁺(𝒜), sorted.
pub fn plus_edges(instance: &Instance, tuples: &[AnchoredTuple]) -> Vec<VertexId> {
    let mut out: Vec<VertexId> = tuples.iter().flat_map(|t| t.path(instance)).collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// E_s(𝒜), sorted.
pub fn sibling_edges(tuples: &[AnchoredTuple]) -> Vec<VertexId> {
    let mut out: Vec<VertexId> = tuples.iter().map(|t| t.edge).collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// c(P_{v,x}) when the path avoids heavy edges and its edge color sets are
/// pairwise disjoint.
pub fn path_mask(instance: &Instance, coloring: &DbarColoring, t: &AnchoredTuple) -> Option<ColorMask> {
    let mut mask = 0;
    for e in t.path(instance) {
        let c = coloring.colors(e)?;
        if mask & c != 0 {
            return None;
        }
        mask |= c;
    }
    Some(mask)
}

/// The tuple can be added under color budget `c1` with `c2` holding its key.
pub fn is_good(instance: &Instance, coloring: &DbarColoring, t: &AnchoredTuple, c1: ColorMask, c2: ColorMask) -> bool {
    c2 & coloring.key_bit(t.edge) != 0 && path_mask(instance, coloring, t).is_some_and(|m| m & !c1 == 0)
}

/// No admissible tuple of a taxon in classes `0..=q` is good for `(c1, c2)`.
pub fn is_q_grounding(instance: &Instance, coloring: &DbarColoring, c1: ColorMask, c2: ColorMask, q: usize) -> bool {
    let end = instance.index().class_bounds[q + 1];
    !enumerate_tuples(instance).iter().filter(|t| t.taxon < end).any(|t| {
        let key = coloring.key_bit(t.edge);
        path_mask(instance, coloring, t).is_some_and(|m| m & key == 0 && m & !c1 == 0 && c2 & key != 0)
    })
}

/// Orders the tuples by extinction time so that no key color reappears on
/// the lost paths of its prefix, or returns `None`.
pub fn find_valid_ordering(
    instance: &Instance,
    coloring: &DbarColoring,
    tuples: &[AnchoredTuple],
) -> Option<Vec<AnchoredTuple>> {
    struct Item {
        ex: u64,
        span: ColorMask,
        key: ColorMask,
    }
    fn dfs(items: &[Item], used: &mut [bool], seen: ColorMask, order: &mut Vec<usize>) -> bool {
        let Some(ex) = items.iter().zip(used.iter()).filter(|(_, &u)| !u).map(|(it, _)| it.ex).min() else {
            return true;
        };
        for i in 0..items.len() {
            if used[i] || items[i].ex != ex {
                continue;
            }
            let next = seen | items[i].span;
            if items[i].key & next != 0 {
                continue;
            }
            used[i] = true;
            order.push(i);
            if dfs(items, used, next, order) {
                return true;
            }
            order.pop();
            used[i] = false;
        }
        false
    }
    let items: Vec<Item> = tuples
        .iter()
        .map(|t| Item {
            ex: instance.extinction(t.taxon),
            span: t.path(instance).iter().fold(0, |m, &e| m | coloring.span(e)),
            key: coloring.key_bit(t.edge),
        })
        .collect();
    let mut order = Vec::with_capacity(items.len());
    dfs(&items, &mut vec![false; items.len()], 0, &mut order).then(|| order.into_iter().map(|i| tuples[i]).collect())
}

/// Checks that lost paths use unique colors, stay light and pairwise
/// disjoint, sibling edges have distinct keys, and a valid ordering exists.
pub fn check_color_respectful(instance: &Instance, coloring: &DbarColoring, tuples: &[AnchoredTuple]) -> bool {
    if !tuples.iter().all(|t| t.is_valid(instance)) {
        return false;
    }
    let mut on_path = FxHashSet::default();
    let mut seen: ColorMask = 0;
    for t in tuples {
        for e in t.path(instance) {
            if !on_path.insert(e) {
                return false;
            }
            match coloring.colors(e) {
                Some(c) if c & seen == 0 => seen |= c,
                _ => return false,
            }
        }
    }
    let mut keys: ColorMask = 0;
    for e in sibling_edges(tuples) {
        if keys & coloring.key_bit(e) != 0 {
            return false;
        }
        keys |= coloring.key_bit(e);
    }
    find_valid_ordering(instance, coloring, tuples).is_some()
}

/// A tuple admissible for the DP, with its cached path colors.
#[derive(Clone, Debug)]
struct Cand {
    tuple: AnchoredTuple,
    mask: ColorMask,
    key: ColorMask,
    len: i64,
    class: usize,
}

struct Prepared {
    cands: Vec<Cand>,
    /// `upto[q]`: number of candidates whose taxon lies in classes `0..=q`.
    upto: Vec<usize>,
    hbar: Vec<i64>,
    /// `hmax[p][q]`: largest deficit among classes `p..q`, or `NEG` if empty.
    hmax: Vec<Vec<i64>>,
    base: Vec<i64>,
    reach: ColorMask,
    keys: ColorMask,
    dbar: u32,
    colors: u32,
}

impl Prepared {
    fn new(instance: &Instance, coloring: &DbarColoring) -> Self {
        let idx = instance.index();
        let cands: Vec<Cand> = enumerate_tuples(instance)
            .into_iter()
            .filter_map(|t| {
                let key = coloring.key_bit(t.edge);
                let mask = path_mask(instance, coloring, &t).filter(|m| m & key == 0)?;
                (mask.count_ones() <= coloring.dbar()).then(|| Cand {
                    tuple: t,
                    mask,
                    key,
                    len: idx.lengths[t.taxon] as i64,
                    class: idx.class_of[t.taxon],
                })
            })
            .collect();
        let k = idx.var_ex();
        let upto = (0..k).map(|q| cands.partition_point(|c| c.class <= q)).collect();
        let hbar = idx.deficit.clone();
        let hmax = (0..k)
            .map(|p| {
                (0..k)
                    .map(|q| hbar.get(p..q).and_then(|s| s.iter().copied().max()).unwrap_or(NEG))
                    .collect()
            })
            .collect();
        let base = (0..k).map(|q| if hbar[..q].iter().all(|&h| h <= 0) { 0 } else { NEG }).collect();
        Prepared {
            reach: cands.iter().fold(0, |m, c| m | c.mask),
            keys: cands.iter().fold(0, |m, c| m | c.key),
            cands,
            upto,
            hbar,
            hmax,
            base,
            dbar: coloring.dbar(),
            colors: coloring.color_count(),
        }
    }

    fn last(&self) -> usize {
        self.hbar.len() - 1
    }

    /// One step of the recurrence; returns the value and the chosen candidate.
    fn eval(&self, c1: ColorMask, c2: ColorMask, q: usize, mut sub: impl FnMut(ColorMask, ColorMask, usize) -> i64) -> (i64, Option<usize>) {
        let mut grounding = true;
        let mut best = (NEG, None);
        for (i, c) in self.cands[..self.upto[q]].iter().enumerate() {
            if c.mask & !c1 != 0 || c2 & c.key == 0 {
                continue;
            }
            grounding = false;
            let prev = sub(c1 & !c.mask, (c2 | c.mask) & !c.key, c.class);
            if prev == NEG {
                continue;
            }
            let v = prev + c.len;
            if v >= self.hmax[c.class][q] && v > best.0 {
                best = (v, Some(i));
            }
        }
        if grounding {
            (self.base[q], None)
        } else {
            best
        }
    }
}

/// Memoized evaluation of only the states a query reaches.
struct LazyDp<'a> {
    prep: &'a Prepared,
    memo: FxHashMap<(ColorMask, ColorMask, usize), (i64, Option<usize>)>,
}

impl<'a> LazyDp<'a> {
    fn new(prep: &'a Prepared) -> Self {
        LazyDp { prep, memo: FxHashMap::default() }
    }

    fn get(&mut self, c1: ColorMask, c2: ColorMask, q: usize) -> (i64, Option<usize>) {
        let key = (c1 & self.prep.reach, c2 & self.prep.keys, q);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let prep = self.prep;
        let v = prep.eval(key.0, key.1, q, |a, b, p| self.get(a, b, p).0);
        self.memo.insert(key, v);
        v
    }

    fn value(&mut self, c1: ColorMask, c2: ColorMask, q: usize) -> i64 {
        self.get(c1, c2, q).0
    }

    fn tuples(&mut self, mut c1: ColorMask, mut c2: ColorMask, mut q: usize) -> Vec<AnchoredTuple> {
        let mut out = Vec::new();
        while let (v, Some(i)) = self.get(c1, c2, q) {
            debug_assert!(v != NEG);
            let c = &self.prep.cands[i];
            out.push(c.tuple);
            c1 &= !c.mask;
            c2 = (c2 | c.mask) & !c.key;
            q = c.class;
        }
        out.reverse();
        out
    }

    /// Top-level budgets worth trying: unions of disjoint candidate paths.
    fn budgets(&self) -> Vec<ColorMask> {
        let mut masks: Vec<ColorMask> = self.prep.cands.iter().map(|c| c.mask).collect();
        masks.sort_unstable();
        masks.dedup();
        let mut seen = FxHashSet::default();
        let mut out = Vec::new();
        let mut stack = vec![(0usize, 0 as ColorMask)];
        while let Some((start, u)) = stack.pop() {
            if !seen.insert(u) {
                continue;
            }
            out.push(u);
            for (i, &m) in masks.iter().enumerate().skip(start).rev() {
                if m & u == 0 && (u | m).count_ones() <= self.prep.dbar {
                    stack.push((i + 1, u | m));
                }
            }
        }
        out
    }

    fn solve(&mut self) -> Option<Vec<AnchoredTuple>> {
        let last = self.prep.last();
        let all = full(self.prep.colors);
        for u in self.budgets() {
            let c2 = all & !u;
            if self.value(u, c2, last) >= self.prep.hbar[last] && self.value(u, c2, last) != NEG {
                return Some(self.tuples(u, c2, last));
            }
        }
        None
    }
}

/// Entries of the full table: `Σ_k C(2D̄, k) 2^(2D̄−k)` color pairs with
/// `|C₁| = k ≤ D̄`, times the number of classes.
pub fn dense_entry_count(dbar: u32, classes: usize) -> u64 {
    let colors = u64::from(2 * dbar);
    let mut binom: u64 = 1;
    let mut total: u64 = 0;
    for k in 0..=u64::from(dbar) {
        total += binom << (colors - k);
        binom = binom * (colors - k) / (k + 1);
    }
    total * classes as u64
}

/// Order in which the full table visits color budgets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FillOrder {
    /// Budgets as increasing integers, which visits subsets first.
    Numeric,
    /// Budgets grouped by size.
    BySize,
}

/// The full table over every admissible `(C₁, C₂, q)`.
pub struct DbarTable {
    prep: Prepared,
    values: Vec<i64>,
    lo: Vec<u64>,
    half: u32,
    computed: u64,
}

impl DbarTable {
    pub fn build(instance: &Instance, coloring: &DbarColoring, guards: &Guards) -> Result<Self> {
        Self::build_with_order(instance, coloring, guards, FillOrder::Numeric)
    }

    pub fn build_with_order(
        instance: &Instance,
        coloring: &DbarColoring,
        guards: &Guards,
        order: FillOrder,
    ) -> Result<Self> {
        check_dbar(coloring.dbar().into(), guards)?;
        let colors = coloring.color_count();
        let k = instance.index().var_ex();
        let states = 3f64.powi(colors as i32) * k as f64;
        if states > guards.dense_dbar_entries {
            return Err(Error::StateSpaceTooLarge { states, limit: guards.dense_dbar_entries });
        }
        let half = colors.div_ceil(2);
        let lo: Vec<u64> = (0..1u64 << half)
            .map(|m| (0..half).filter(|b| m >> b & 1 == 1).map(|b| 3u64.pow(b)).sum())
            .collect();
        let mut table = DbarTable {
            prep: Prepared::new(instance, coloring),
            values: vec![NEG; states as usize],
            lo,
            half,
            computed: 0,
        };
        let all = full(colors);
        let mut budgets: Vec<ColorMask> = (0..=all).filter(|c| c.count_ones() <= coloring.dbar()).collect();
        if order == FillOrder::BySize {
            budgets.sort_by_key(|c| c.count_ones());
        }
        for c1 in budgets {
            let rest = all & !c1;
            let mut c2 = rest;
            loop {
                for q in 0..k {
                    let (v, _) = table.prep.eval(c1, c2, q, |a, b, p| table.values[table.slot(a, b, p)]);
                    let s = table.slot(c1, c2, q);
                    table.values[s] = v;
                    table.computed += 1;
                }
                if c2 == 0 {
                    break;
                }
                c2 = (c2 - 1) & rest;
            }
        }
        Ok(table)
    }

    fn ternary(&self, m: ColorMask) -> u64 {
        self.lo[(m & full(self.half)) as usize] + self.lo[(m >> self.half) as usize] * 3u64.pow(self.half)
    }

    fn slot(&self, c1: ColorMask, c2: ColorMask, q: usize) -> usize {
        (self.ternary(c1) + 2 * self.ternary(c2)) as usize * self.prep.hbar.len() + q
    }

    /// Number of entries the build filled in.
    pub fn entry_count(&self) -> u64 {
        self.computed
    }

    /// Stored value, `None` for −∞.
    pub fn get(&self, c1: ColorMask, c2: ColorMask, q: usize) -> Option<i64> {
        assert_eq!(c1 & c2, 0, "color sets must be disjoint");
        assert!(c1.count_ones() <= self.prep.dbar, "budget larger than the loss bound");
        let v = self.values[self.slot(c1, c2, q)];
        (v != NEG).then_some(v)
    }

    pub fn decide(&self) -> bool {
        let last = self.prep.last();
        let h = self.prep.hbar[last];
        self.values.iter().skip(last).step_by(self.prep.hbar.len()).any(|&v| v != NEG && v >= h)
    }
}

fn check_dbar(dbar: u64, guards: &Guards) -> Result<()> {
    let limit = guards.dbar_mask_width.min(u64::from(MAX_COLORS / 2));
    if dbar > limit {
        return Err(Error::DbarTooLarge { dbar, limit });
    }
    Ok(())
}

/// A solution of the colored problem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DbarWitness {
    pub tuples: Vec<AnchoredTuple>,
    pub saved: TaxaSet,
}

fn witness_from(instance: &Instance, tuples: Vec<AnchoredTuple>) -> DbarWitness {
    let lost = sacrificed(&tuples);
    let saved = (0..instance.n()).filter(|&x| !lost.contains(x)).collect();
    DbarWitness { tuples, saved }
}

/// Decides the colored problem on a binary tree and returns the anchored set.
pub fn algorithm_dbar(instance: &Instance, coloring: &DbarColoring, guards: &Guards) -> Result<Option<DbarWitness>> {
    if !instance.tree().is_binary() {
        return Err(Error::NonBinaryTree);
    }
    check_dbar(coloring.dbar().into(), guards)?;
    let prep = Prepared::new(instance, coloring);
    Ok(LazyDp::new(&prep).solve().map(|t| witness_from(instance, t)))
}

/// Randomized solver for the collaborative problem on binary trees; yes
/// answers are certified.
pub fn solve_time_pd_by_dbar(instance: &Instance, delta: f64, seed: u64, guards: &Guards) -> Result<SolveOutcome> {
    let mut diag = Diagnostics::new(Algorithm::FptDbar, Mode::Collaborative);
    diag.seed = Some(seed);
    diag.delta = Some(delta);
    if !instance.tree().is_binary() {
        return Err(Error::NonBinaryTree);
    }
    let loss = instance.index().diversity_loss();
    if loss < 0 {
        return Ok(SolveOutcome::no(diag));
    }
    if instance.target() == 0 {
        return SolveOutcome::certified(instance, TaxaSet::new(), crate::feasibility::Schedule::empty(Mode::Collaborative), diag);
    }
    let all = instance.all_taxa();
    if collaborative_feasible(instance.index(), &all) {
        return SolveOutcome::certified_collaborative(instance, all, diag);
    }
    if loss == 0 {
        return Ok(SolveOutcome::no(diag));
    }
    let dbar = loss as u64;
    check_dbar(dbar, guards)?;
    let trials = trial_count(2 * dbar, delta)?;
    diag.trials_planned = trials;
    let dbar = dbar as u32;
    let tree = instance.tree();
    let len = DbarColoring::hash_len(tree, dbar);
    let found = (0..trials)
        .into_par_iter()
        .map_init(Vec::new, |f, t| {
            random_hash(&mut trial_rng(seed, t), len, 2 * dbar, f);
            let coloring = DbarColoring::from_hash(tree, dbar, f);
            let prep = Prepared::new(instance, &coloring);
            LazyDp::new(&prep).solve().map(|tuples| (t, tuples))
        })
        .find_first(|r| r.is_some())
        .flatten();
    let Some((t, tuples)) = found else {
        diag.trials_run = trials;
        return Ok(SolveOutcome::no(diag));
    };
    diag.trials_run = t + 1;
    SolveOutcome::certified_collaborative(instance, witness_from(instance, tuples).saved, diag)
}

/// Builds the anchored set that sacrifices exactly `X ∖ saved`: taxa are
/// taken by extinction time and each one is anchored at the top of the edges
/// it newly cuts off.
pub fn construct_anchored_set(instance: &Instance, saved: &TaxaSet) -> Result<Vec<AnchoredTuple>> {
    let tree = instance.tree();
    let lost: Vec<TaxonId> = (0..instance.n()).filter(|&x| !saved.contains(x)).collect();
    if lost.is_empty() {
        return Ok(Vec::new());
    }
    if saved.is_empty() {
        return Err(Error::BadParams("at least one taxon must be saved".into()));
    }
    let mut alive = vec![0usize; tree.vertex_count()];
    for t in instance.taxa() {
        for e in tree.path_to_root(t.leaf) {
            alive[e] += 1;
        }
    }
    let mut tops = Vec::with_capacity(lost.len());
    let mut fallback = Vec::with_capacity(lost.len());
    for &x in &lost {
        let mut top = None;
        for e in tree.path_to_root(instance.taxon(x).leaf) {
            alive[e] -= 1;
            if alive[e] == 0 {
                top = Some(e);
            }
        }
        let w = top.expect("a leaf edge loses its only offspring");
        let v = tree.parent(w).expect("edges have a parent");
        tops.push((v, w));
        fallback.push(tree.children(v).iter().copied().find(|&c| alive[c] > 0));
    }
    let mut out = Vec::with_capacity(lost.len());
    for (i, &x) in lost.iter().enumerate() {
        let (v, _) = tops[i];
        let edge = match tops[i + 1..].iter().find(|(u, _)| *u == v) {
            Some(&(_, w)) => w,
            None => fallback[i].ok_or_else(|| Error::BadParams("anchor has no surviving child".into()))?,
        };
        out.push(AnchoredTuple::new(x, v, edge));
    }
    Ok(out)
}

/// Edges all of whose offspring lie in `set`.
pub fn dead_edges(instance: &Instance, set: &TaxaSet) -> Vec<VertexId> {
    let tree = instance.tree();
    let survivors: Vec<VertexId> =
        (0..instance.n()).filter(|&x| !set.contains(x)).map(|x| instance.taxon(x).leaf).collect();
    let mut alive = vec![false; tree.vertex_count()];
    for l in survivors {
        for e in tree.path_to_root(l) {
            alive[e] = true;
        }
    }
    tree.edges().iter().copied().filter(|&e| !alive[e]).collect()
}

/// Checks an anchored set built for `saved`: its lost paths are exactly the
/// dead edges and pairwise disjoint, its order is valid structurally, the lost
/// weight equals the diversity drop, and it is color-respectful under a
/// coloring that is injective on the relevant edges.
pub fn check_anchored_construction(
    instance: &Instance,
    saved: &TaxaSet,
    tuples: &[AnchoredTuple],
) -> std::result::Result<(), String> {
    let tree = instance.tree();
    if let Some(t) = tuples.iter().find(|t| !t.is_valid(instance)) {
        return Err(format!("{t:?} is not a valid tuple"));
    }
    let lost: TaxaSet = (0..instance.n()).filter(|&x| !saved.contains(x)).collect();
    if sacrificed(tuples) != lost || tuples.len() != lost.len() {
        return Err("tuples do not sacrifice exactly the unsaved taxa".into());
    }
    let dead = dead_edges(instance, &lost);
    let plus = plus_edges(instance, tuples);
    let mut sorted_dead = dead.clone();
    sorted_dead.sort_unstable();
    if plus != sorted_dead {
        return Err("lost paths differ from the dead edges".into());
    }
    let path_total: usize = tuples.iter().map(|t| t.path(instance).len()).sum();
    if path_total != plus.len() {
        return Err("lost paths overlap".into());
    }
    let mut prefix = FxHashSet::default();
    for (j, t) in tuples.iter().enumerate() {
        if j > 0 && instance.extinction(tuples[j - 1].taxon) > instance.extinction(t.taxon) {
            return Err("tuples are not sorted by extinction time".into());
        }
        prefix.extend(t.path(instance));
        if prefix.contains(&t.edge) {
            return Err(format!("sibling edge of tuple {} is already lost", j + 1));
        }
    }
    let lost_weight: u64 = dead.iter().map(|&e| tree.weight(e)).sum();
    if lost_weight != instance.index().total_pd - instance.pd(saved) {
        return Err("dead weight differs from the diversity drop".into());
    }
    if tuples.is_empty() {
        return Ok(());
    }
    let coloring = injective_coloring(instance, &dead, &sibling_edges(tuples))?;
    if !check_color_respectful(instance, &coloring, tuples) {
        return Err("not color-respectful under an injective coloring".into());
    }
    Ok(())
}

/// Coloring with `D̄ = ω(dead)` in which dead edges get disjoint color blocks
/// and the remaining sibling edges get fresh keys.
fn injective_coloring(instance: &Instance, dead: &[VertexId], siblings: &[VertexId]) -> std::result::Result<DbarColoring, String> {
    let tree = instance.tree();
    let dbar: u64 = dead.iter().map(|&e| tree.weight(e)).sum();
    if 2 * dbar > u64::from(MAX_COLORS) {
        return Err(format!("{} colors do not fit a mask", 2 * dbar));
    }
    let dbar = dbar as u32;
    let mut next = 1u32;
    let mut keys = Vec::new();
    let mut extras = Vec::new();
    let mut fresh = |k: u32| {
        let out: Vec<u32> = (next..next + k).collect();
        next += k;
        out
    };
    let plan: Vec<(VertexId, u32)> = tree.edges().iter().map(|&e| (e, tree.weight(e) as u32)).collect();
    let mut assigned: FxHashMap<VertexId, (u32, Vec<u32>)> = FxHashMap::default();
    for &e in dead {
        let block = fresh(tree.weight(e) as u32);
        assigned.insert(e, (block[0], block[1..].to_vec()));
    }
    for &e in siblings {
        if !assigned.contains_key(&e) {
            let key = fresh(1)[0];
            let w = tree.weight(e) as u32;
            let extra = (w <= dbar).then(|| (1..=2 * dbar).filter(|&c| c != key).take(w as usize - 1).collect());
            assigned.insert(e, (key, extra.unwrap_or_default()));
        }
    }
    for (e, w) in plan {
        let (key, extra) = assigned
            .remove(&e)
            .unwrap_or_else(|| (1, (2..=2 * dbar).take(w.saturating_sub(1) as usize).collect()));
        keys.push(key);
        extras.push((w <= dbar).then_some(extra));
    }
    DbarColoring::new(tree, dbar, &keys, &extras).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{anchored_coloring, anchored_tree};
    use crate::generators::{gen_random_instance, GenParams, TargetRule, TreeShape};
    use crate::oracle::brute_force_time_pd;
    use proptest::prelude::*;

    fn mask(colors: &[u32]) -> ColorMask {
        colors.iter().fold(0, |m, &c| m | bit(c))
    }

    fn tuple(inst: &Instance, x: &str, anchor: VertexId, edge: VertexId) -> AnchoredTuple {
        AnchoredTuple::new(inst.taxon_id(x).unwrap(), anchor, edge)
    }

    #[test]
    fn anchored_fixture_coloring() {
        let inst = anchored_tree();
        let col = anchored_coloring();
        assert_eq!(col.colors(4), Some(mask(&[9, 10])));
        assert_eq!(col.colors(3), None);
        assert!(!col.is_small(7));
        assert_eq!(col.key(8), 4);
        assert_eq!(inst.index().deficit, vec![10, 22, 35]);
        assert_eq!(inst.index().diversity_loss(), 6);
    }

    #[test]
    fn good_tuples() {
        let inst = anchored_tree();
        let col = anchored_coloring();
        let t = tuple(&inst, "x1", 1, 5);
        assert!(is_good(&inst, &col, &t, mask(&[9, 10]), mask(&[6])));
        assert!(!is_good(&inst, &col, &t, mask(&[9, 10]), 0));
        let heavy = tuple(&inst, "x4", 0, 1);
        assert!(heavy.is_valid(&inst));
        assert!(!is_good(&inst, &col, &heavy, full(12), mask(&[2])));
        for t in enumerate_tuples(&inst) {
            assert!(t.is_valid(&inst));
            assert!(!is_good(&inst, &col, &t, full(12), 0));
        }
    }

    #[test]
    fn grounding() {
        let inst = anchored_tree();
        let col = anchored_coloring();
        let c1 = mask(&[6, 7, 8, 9, 10, 11]);
        let c2 = mask(&[1, 2, 3, 4, 5, 12]);
        assert!(is_q_grounding(&inst, &col, c1, c2, 0));
        assert!(!is_q_grounding(&inst, &col, mask(&[9, 10]), mask(&[6]), 0));
        for q in 0..3 {
            assert!(is_q_grounding(&inst, &col, 0, full(12), q));
            assert!(is_q_grounding(&inst, &col, full(12), 0, q));
        }
        let early: Vec<AnchoredTuple> = enumerate_tuples(&inst)
            .into_iter()
            .filter(|t| inst.index().class_of[t.taxon] == 0)
            .filter(|t| path_mask(&inst, &col, t).is_some_and(|m| m & bit(col.key(t.edge)) == 0))
            .collect();
        assert_eq!(early, vec![tuple(&inst, "x1", 1, 5), tuple(&inst, "x1", 0, 3)]);
    }

    #[test]
    fn respectful_sets() {
        let inst = anchored_tree();
        let col = anchored_coloring();
        let a = [tuple(&inst, "x1", 1, 5), tuple(&inst, "x2", 0, 3), tuple(&inst, "x6", 3, 8)];
        assert!(check_color_respectful(&inst, &col, &a));
        let plus = plus_edges(&inst, &a).iter().fold(0, |m, &e| m | col.colors(e).unwrap());
        assert_eq!(plus, full(11));
        assert_eq!(sibling_edges(&a).iter().fold(0, |m, &e| m | bit(col.key(e))), mask(&[4, 6, 12]));
        let order = find_valid_ordering(&inst, &col, &a).unwrap();
        assert_eq!(order, vec![a[0], a[2], a[1]]);
        let b = [tuple(&inst, "x1", 0, 3), tuple(&inst, "x2", 1, 4), tuple(&inst, "x6", 3, 8)];
        assert_eq!(find_valid_ordering(&inst, &col, &b), None);
        assert!(!check_color_respectful(&inst, &col, &b));
        assert!(check_color_respectful(&inst, &col, &[]));
    }

    #[test]
    fn anchored_set_meets_deficits() {
        let inst = anchored_tree();
        let lost = sacrificed(&[tuple(&inst, "x1", 1, 5), tuple(&inst, "x2", 0, 3), tuple(&inst, "x6", 3, 8)]);
        let idx = inst.index();
        let by_class: Vec<i64> = (0..3)
            .map(|q| idx.prefix(q).filter(|&x| lost.contains(x)).map(|x| idx.lengths[x] as i64).sum())
            .collect();
        assert_eq!(by_class, vec![10, 22, 35]);
        assert_eq!(by_class, idx.deficit);
    }

    #[test]
    fn non_binary_rejected() {
        let inst = anchored_tree();
        let g = Guards::default();
        assert_eq!(algorithm_dbar(&inst, &anchored_coloring(), &g), Err(Error::NonBinaryTree));
        assert_eq!(solve_time_pd_by_dbar(&inst, 0.01, 0, &g).unwrap_err(), Error::NonBinaryTree);
    }

    #[test]
    fn entry_counts() {
        assert_eq!(dense_entry_count(1, 1), 4 + 2 * 2);
        // Σ_{k≤4} C(8,k) 2^(8−k) = 256 + 1024 + 1792 + 1792 + 1120
        assert_eq!(dense_entry_count(4, 1), 5984);
        assert_eq!(dense_entry_count(4, 3), 3 * 5984);
    }

    fn binary_params(n: usize, loss: u64) -> GenParams {
        GenParams {
            n,
            teams: 2,
            max_ex: 8,
            max_len: 4,
            max_weight: 3,
            shape: TreeShape::RandomBinary,
            target: TargetRule::Loss(loss),
            ..GenParams::default()
        }
    }

    fn random_coloring(inst: &Instance, dbar: u32, seed: u64) -> DbarColoring {
        let mut f = Vec::new();
        random_hash(&mut trial_rng(seed, 0), DbarColoring::hash_len(inst.tree(), dbar), 2 * dbar, &mut f);
        DbarColoring::from_hash(inst.tree(), dbar, &f)
    }

    #[test]
    fn dense_and_lazy_agree() {
        let g = Guards::default();
        for seed in 0..80 {
            let loss = 1 + seed % 4;
            let inst = gen_random_instance(&binary_params(5, loss), seed).unwrap();
            let dbar = inst.index().diversity_loss() as u32;
            let col = random_coloring(&inst, dbar, seed);
            let dense = DbarTable::build(&inst, &col, &g).unwrap();
            assert_eq!(dense.entry_count(), dense_entry_count(dbar, inst.index().var_ex()));
            let lazy = algorithm_dbar(&inst, &col, &g).unwrap();
            assert_eq!(dense.decide(), lazy.is_some(), "seed {seed}");
            let prep = Prepared::new(&inst, &col);
            let mut memo = LazyDp::new(&prep);
            let all = full(2 * dbar);
            for c1 in (0..=all).filter(|c: &u64| c.count_ones() <= dbar).step_by(3) {
                for q in 0..inst.index().var_ex() {
                    let c2 = all & !c1;
                    let d = dense.get(c1, c2, q).unwrap_or(NEG);
                    assert_eq!(memo.value(c1, c2, q), d);
                    if c1 == 0 {
                        assert!(d == 0 || d == NEG);
                    }
                }
            }
            if let Some(w) = lazy {
                assert!(check_color_respectful(&inst, &col, &w.tuples));
                assert!(inst.pd(&w.saved) >= inst.target());
                assert!(collaborative_feasible(inst.index(), &w.saved));
            }
        }
    }

    #[test]
    fn fill_order_does_not_matter() {
        let g = Guards::default();
        for seed in 0..20 {
            let inst = gen_random_instance(&binary_params(5, 3), seed).unwrap();
            let dbar = inst.index().diversity_loss() as u32;
            let col = random_coloring(&inst, dbar, seed + 100);
            let a = DbarTable::build_with_order(&inst, &col, &g, FillOrder::Numeric).unwrap();
            let b = DbarTable::build_with_order(&inst, &col, &g, FillOrder::BySize).unwrap();
            assert_eq!(a.values, b.values);
        }
    }

    #[test]
    fn wrapper_matches_oracle() {
        let g = Guards::default();
        let mut yes = 0;
        for seed in 0..60 {
            let inst = gen_random_instance(&binary_params(2 + seed as usize % 5, 1 + seed % 4), seed).unwrap();
            let oracle = brute_force_time_pd(&inst, &g).unwrap();
            let out = solve_time_pd_by_dbar(&inst, 0.01, seed, &g).unwrap();
            assert_eq!(out.yes, oracle.yes, "seed {seed}");
            if let Some(w) = out.witness {
                yes += 1;
                assert!(w.pd >= inst.target());
            }
        }
        assert!(yes > 5);
    }

    #[test]
    fn wrapper_edge_cases() {
        let g = Guards::default();
        let inst = gen_random_instance(&binary_params(4, 0), 3).unwrap();
        let out = solve_time_pd_by_dbar(&inst, 0.01, 0, &g).unwrap();
        assert_eq!(out.yes, collaborative_feasible(inst.index(), &inst.all_taxa()));
        assert_eq!(out.diagnostics.trials_planned, 0);
        let tight = Guards { dbar_mask_width: 2, ..Guards::default() };
        let big = gen_random_instance(&binary_params(6, 5), 1).unwrap();
        if !collaborative_feasible(big.index(), &big.all_taxa()) {
            assert!(matches!(solve_time_pd_by_dbar(&big, 0.01, 0, &tight), Err(Error::DbarTooLarge { .. })));
        }
        let over = inst.with_target(inst.index().total_pd + 1);
        assert!(!solve_time_pd_by_dbar(&over, 0.01, 0, &g).unwrap().yes);
    }

    #[test]
    fn construction_on_fixture() {
        let inst = anchored_tree();
        let saved = inst.set_of(&["x3", "x4", "x5"]).unwrap();
        let tuples = construct_anchored_set(&inst, &saved).unwrap();
        check_anchored_construction(&inst, &saved, &tuples).unwrap();
        assert_eq!(tuples[0], tuple(&inst, "x1", 1, 5));
        assert!(construct_anchored_set(&inst, &TaxaSet::new()).is_err());
        assert!(construct_anchored_set(&inst, &inst.all_taxa()).unwrap().is_empty());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(150))]

        #[test]
        fn construction_holds_for_every_saved_set(seed in 0u64..10_000, n in 2usize..=6) {
            let inst = gen_random_instance(&binary_params(n, 0), seed).unwrap();
            for m in 1u64..(1 << n) {
                let saved = TaxaSet::from_mask(m);
                let tuples = construct_anchored_set(&inst, &saved).unwrap();
                prop_assert_eq!(check_anchored_construction(&inst, &saved, &tuples), Ok(()));
            }
        }

        #[test]
        fn explicit_colorings_validate(seed in 0u64..10_000) {
            let inst = gen_random_instance(&binary_params(5, 3), seed).unwrap();
            let tree = inst.tree();
            let dbar = 3u32;
            let keys: Vec<u32> = (0..tree.edges().len()).map(|j| 1 + (j as u32 % 6)).collect();
            let extras: Vec<Option<Vec<u32>>> = tree.edges().iter().zip(&keys).map(|(&e, &k)| {
                let w = tree.weight(e);
                (w <= 3).then(|| (1..=6).filter(|&c| c != k).take(w as usize - 1).collect())
            }).collect();
            let col = DbarColoring::new(tree, dbar, &keys, &extras).unwrap();
            for &e in tree.edges() {
                prop_assert_eq!(col.colors(e).map(|m| u64::from(m.count_ones())), col.is_small(e).then(|| tree.weight(e)));
            }
        }
    }
}
