//! Solvers for restricted inputs: few distinct (length, deadline) pairs, and
//! star trees via knapsack tables.

use std::collections::BTreeMap;

use crate::dp_hours::{BoxDp, BoxShape, NEG};
use crate::error::{Error, Result};
use crate::model::{Instance, Mode, TaxaSet, TaxonId};
use crate::outcome::{Algorithm, Diagnostics, Guards, SolveOutcome};

/// Budgets count the saved taxa in every (rescue length, extinction time)
/// bucket; a budget is admissible when the hours it implies fit every deadline.
pub fn solve_time_pd_xp(instance: &Instance, guards: &Guards) -> Result<SolveOutcome> {
    let mut diag = Diagnostics::new(Algorithm::XpCounts, Mode::Collaborative);
    let idx = instance.index();
    let mut buckets: BTreeMap<(u64, usize), usize> = BTreeMap::new();
    for x in 0..instance.n() {
        *buckets.entry((instance.length(x), idx.class_of[x])).or_default() += 1;
    }
    let keys: Vec<(u64, usize)> = buckets.keys().copied().collect();
    let bucket_of: Vec<usize> = (0..instance.n())
        .map(|x| keys.binary_search(&(instance.length(x), idx.class_of[x])).expect("bucket exists"))
        .collect();
    let shape = BoxShape::new(buckets.values().map(|&c| c + 1).collect(), guards)?;
    let dp = BoxDp::run(instance, shape, guards, |x, a| a[bucket_of[x]] > 0)?;
    let admissible = |a: &[usize]| {
        (0..idx.var_ex()).all(|q| {
            let hours: u64 = keys.iter().zip(a).filter(|((_, c), _)| *c <= q).map(|((l, _), &k)| l * k as u64).sum();
            hours <= idx.capacity[q]
        })
    };
    let root = dp.root_table(instance);
    let best = (0..dp.shape().size())
        .filter(|&i| root[i] != NEG && admissible(&dp.shape().digits(i)))
        .max_by_key(|&i| (root[i], std::cmp::Reverse(i)));
    diag.optimum = Some(best.map_or(0, |i| root[i] as u64));
    if instance.target() == 0 {
        return SolveOutcome::certified_collaborative(instance, TaxaSet::new(), diag);
    }
    match best {
        Some(i) if root[i] as u64 >= instance.target() => {
            let saved = dp.shares(instance, i).into_iter().map(|(x, _)| x).collect();
            SolveOutcome::certified_collaborative(instance, saved, diag)
        }
        _ => Ok(SolveOutcome::no(diag)),
    }
}

/// How a knapsack table is indexed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KernelMode {
    /// Best profit for each capacity.
    ByCapacity,
    /// Least weight reaching each profit.
    ByProfit,
    /// Largest weight that can be dropped for each tolerated profit loss.
    ByLoss,
}

impl KernelMode {
    pub const ALL: [KernelMode; 3] = [KernelMode::ByCapacity, KernelMode::ByProfit, KernelMode::ByLoss];

    pub fn name(self) -> &'static str {
        match self {
            KernelMode::ByCapacity => "by-capacity",
            KernelMode::ByProfit => "by-profit",
            KernelMode::ByLoss => "by-loss",
        }
    }
}

impl std::str::FromStr for KernelMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        KernelMode::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::BadParams(format!("unknown kernel `{s}`")))
    }
}

/// Unreachable entry of a by-profit table.
pub const UNREACHABLE: u64 = u64::MAX;

/// A 0/1 knapsack table plus the choices needed to rebuild its solutions.
#[derive(Clone, Debug)]
pub struct KnapsackKernelResult {
    mode: KernelMode,
    items: Vec<(u64, u64)>,
    table: Vec<u64>,
    /// `took[i]` has bit `b` set when item `i` is used at index `b` after
    /// items `0..=i` were processed.
    took: Vec<Vec<u64>>,
}

/// Runs the 0/1 knapsack over `(weight, profit)` items with indices `0..=bound`.
pub fn knapsack_kernel(items: &[(u64, u64)], mode: KernelMode, bound: u64, guards: &Guards) -> Result<KnapsackKernelResult> {
    if bound > guards.knapsack_bound {
        return Err(Error::BoundTooLarge { bound, limit: guards.knapsack_bound });
    }
    let size = bound as usize + 1;
    let words = size.div_ceil(64);
    let mut table = match mode {
        KernelMode::ByCapacity | KernelMode::ByLoss => vec![0u64; size],
        KernelMode::ByProfit => {
            let mut t = vec![UNREACHABLE; size];
            t[0] = 0;
            t
        }
    };
    let mut took = Vec::with_capacity(items.len());
    for &(w, p) in items {
        let mut bits = vec![0u64; words];
        for b in (0..size).rev() {
            let candidate = match mode {
                KernelMode::ByCapacity => (b as u64 >= w).then(|| table[b - w as usize] + p).filter(|&v| v > table[b]),
                KernelMode::ByLoss => (b as u64 >= p).then(|| table[b - p as usize] + w).filter(|&v| v > table[b]),
                KernelMode::ByProfit => {
                    let from = (b as u64).saturating_sub(p) as usize;
                    let prev = if from == b { table[b] } else { table[from] };
                    (prev != UNREACHABLE).then(|| prev + w).filter(|&v| v < table[b])
                }
            };
            if let Some(v) = candidate {
                table[b] = v;
                bits[b / 64] |= 1 << (b % 64);
            }
        }
        took.push(bits);
    }
    Ok(KnapsackKernelResult { mode, items: items.to_vec(), table, took })
}

impl KnapsackKernelResult {
    pub fn mode(&self) -> KernelMode {
        self.mode
    }

    pub fn table(&self) -> &[u64] {
        &self.table
    }

    /// Items of the solution stored at index `b`. For by-loss tables these are
    /// the dropped items.
    pub fn select(&self, mut b: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for i in (0..self.items.len()).rev() {
            if self.took[i][b / 64] >> (b % 64) & 1 == 1 {
                out.push(i);
                let (w, p) = self.items[i];
                b = match self.mode {
                    KernelMode::ByCapacity => b - w as usize,
                    KernelMode::ByLoss => b - p as usize,
                    KernelMode::ByProfit => (b as u64).saturating_sub(p) as usize,
                };
            }
        }
        out.reverse();
        out
    }

    /// Best profit for every capacity `0..=cap`, with the table index whose
    /// solution attains it.
    pub fn capacity_profile(&self, cap: u64) -> Vec<(u64, usize)> {
        let size = cap as usize + 1;
        let total_w: u64 = self.items.iter().map(|i| i.0).sum();
        let total_p: u64 = self.items.iter().map(|i| i.1).sum();
        let empty = if self.mode == KernelMode::ByLoss { self.table.len() - 1 } else { 0 };
        let mut prof = vec![(0u64, empty); size];
        match self.mode {
            KernelMode::ByCapacity => {
                for (c, slot) in prof.iter_mut().enumerate() {
                    let b = c.min(self.table.len() - 1);
                    *slot = (self.table[b], b);
                }
            }
            KernelMode::ByProfit => {
                for (p, &w) in self.table.iter().enumerate() {
                    if w != UNREACHABLE && w < size as u64 && (p as u64) > prof[w as usize].0 {
                        prof[w as usize] = (p as u64, p);
                    }
                }
                running_max(&mut prof);
            }
            KernelMode::ByLoss => {
                for (loss, &dropped) in self.table.iter().enumerate() {
                    let w = total_w - dropped;
                    let p = total_p.saturating_sub(loss as u64);
                    if w < size as u64 && p > prof[w as usize].0 {
                        prof[w as usize] = (p, loss);
                    }
                }
                running_max(&mut prof);
            }
        }
        prof
    }

    /// Items of the solution behind a profile entry.
    pub fn chosen(&self, index: usize) -> Vec<usize> {
        let picked = self.select(index);
        match self.mode {
            KernelMode::ByLoss => (0..self.items.len()).filter(|i| !picked.contains(i)).collect(),
            _ => picked,
        }
    }
}

fn running_max(prof: &mut [(u64, usize)]) {
    for c in 1..prof.len() {
        if prof[c - 1].0 > prof[c].0 {
            prof[c] = prof[c - 1];
        }
    }
}

/// Star trees: one knapsack per deadline class, combined class by class
/// with the running hours clamped to each class capacity.
pub fn solve_star(instance: &Instance, mode: KernelMode, guards: &Guards) -> Result<SolveOutcome> {
    let tree = instance.tree();
    if !tree.is_star() {
        return Err(Error::NotAStar);
    }
    let mut diag = Diagnostics::new(Algorithm::Star, Mode::Collaborative);
    let idx = instance.index();
    let caps = &idx.capacity;
    let last_cap = *caps.last().expect("at least one class");
    if last_cap > guards.knapsack_bound {
        return Err(Error::BoundTooLarge { bound: last_cap, limit: guards.knapsack_bound });
    }
    let class_items: Vec<Vec<(u64, u64)>> = (0..idx.var_ex())
        .map(|j| idx.class(j).map(|x| (instance.length(x), tree.weight(instance.taxon(x).leaf))).collect())
        .collect();
    let work: f64 = class_items.iter().map(|it| it.iter().map(|i| i.0).sum::<u64>() as f64 * last_cap as f64).sum();
    if work > guards.dp_work {
        return Err(Error::StateSpaceTooLarge { states: work, limit: guards.dp_work });
    }
    let mut kernels = Vec::with_capacity(class_items.len());
    let mut profiles = Vec::with_capacity(class_items.len());
    for (j, items) in class_items.iter().enumerate() {
        let reach = items.iter().map(|i| i.0).sum::<u64>().min(caps[j]);
        let bound = match mode {
            KernelMode::ByCapacity => reach,
            KernelMode::ByProfit | KernelMode::ByLoss => items.iter().map(|i| i.1).sum(),
        };
        let kernel = knapsack_kernel(items, mode, bound, guards)?;
        profiles.push(kernel.capacity_profile(reach));
        kernels.push(kernel);
    }
    // best[c]: top diversity of earlier classes using at most c hours.
    let mut best: Vec<u64> = vec![0; 1];
    let mut back: Vec<Vec<usize>> = Vec::with_capacity(profiles.len());
    for (j, prof) in profiles.iter().enumerate() {
        let cap = caps[j] as usize;
        let mut next = vec![0u64; cap + 1];
        let mut arg = vec![0usize; cap + 1];
        for (c, slot) in next.iter_mut().enumerate() {
            for (own, &(p, _)) in prof.iter().enumerate().take(c + 1) {
                let before = best[(c - own).min(best.len() - 1)];
                if before + p > *slot || (own == 0 && before + p == *slot) {
                    *slot = before + p;
                    arg[c] = own;
                }
            }
        }
        best = next;
        back.push(arg);
    }
    let top = best[best.len() - 1];
    diag.optimum = Some(top);
    if instance.target() == 0 {
        return SolveOutcome::certified_collaborative(instance, TaxaSet::new(), diag);
    }
    if top < instance.target() {
        return Ok(SolveOutcome::no(diag));
    }
    let mut saved = TaxaSet::new();
    let mut c = best.len() - 1;
    for j in (0..profiles.len()).rev() {
        let own = back[j][c];
        let members: Vec<TaxonId> = idx.class(j).collect();
        for i in kernels[j].chosen(profiles[j][own].1) {
            saved.insert(members[i]);
        }
        if j > 0 {
            c = (c - own).min(caps[j - 1] as usize);
        }
    }
    SolveOutcome::certified_collaborative(instance, saved, diag)
}
