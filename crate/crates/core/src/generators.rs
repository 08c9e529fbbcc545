//! Seeded random instances and subset-sum hard instances.

use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Instance, Mode, PhyloTree, TaxonInfo, TeamWindow, TreeBuilder, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TreeShape {
    Star,
    Caterpillar,
    RandomBinary,
    RandomMultifurcating,
}

impl TreeShape {
    pub const ALL: [TreeShape; 4] =
        [TreeShape::Star, TreeShape::Caterpillar, TreeShape::RandomBinary, TreeShape::RandomMultifurcating];

    pub fn name(self) -> &'static str {
        match self {
            TreeShape::Star => "star",
            TreeShape::Caterpillar => "caterpillar",
            TreeShape::RandomBinary => "random-binary",
            TreeShape::RandomMultifurcating => "random-multifurcating",
        }
    }
}

impl FromStr for TreeShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TreeShape::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::BadParams(format!("unknown tree shape `{s}`")))
    }
}

/// How the diversity target of a generated instance is chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetRule {
    /// Half the total diversity, rounded up.
    #[default]
    HalfTotal,
    Fixed(u64),
    /// Total diversity minus the given loss, floored at 0.
    Loss(u64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenParams {
    pub n: usize,
    pub teams: usize,
    pub max_ex: u64,
    pub max_len: u64,
    pub max_weight: u64,
    pub shape: TreeShape,
    pub mode: Mode,
    pub target: TargetRule,
    /// Probability that a taxon gets an extinction time at least its rescue length.
    pub savable_fraction: f64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            n: 6,
            teams: 2,
            max_ex: 8,
            max_len: 4,
            max_weight: 5,
            shape: TreeShape::RandomBinary,
            mode: Mode::Collaborative,
            target: TargetRule::HalfTotal,
            savable_fraction: 0.8,
        }
    }
}

fn leaf_name(i: usize) -> String {
    format!("x{}", i + 1)
}

fn build_tree(params: &GenParams, rng: &mut ChaCha8Rng) -> PhyloTree {
    let mut b = TreeBuilder::new();
    let root = b.root();
    let mut next_leaf = 0;
    let weight = |rng: &mut ChaCha8Rng| rng.random_range(1..=params.max_weight);
    match params.shape {
        TreeShape::Star => {
            for i in 0..params.n {
                let w = weight(rng);
                b.add_leaf(root, w, &leaf_name(i));
            }
        }
        TreeShape::Caterpillar => {
            let mut v = root;
            for i in 0..params.n {
                let w = weight(rng);
                b.add_leaf(v, w, &leaf_name(i));
                if i + 2 < params.n {
                    let w = weight(rng);
                    v = b.add_internal(v, w);
                }
            }
        }
        TreeShape::RandomBinary | TreeShape::RandomMultifurcating => {
            let binary = params.shape == TreeShape::RandomBinary;
            let mut stack: Vec<(VertexId, usize)> = vec![(root, params.n)];
            while let Some((v, size)) = stack.pop() {
                let max_parts = if binary { 2 } else { size.min(4) };
                let parts = rng.random_range(2..=max_parts);
                let mut sizes = vec![1; parts];
                for _ in parts..size {
                    let k = rng.random_range(0..parts);
                    sizes[k] += 1;
                }
                for s in sizes {
                    let w = weight(rng);
                    if s == 1 {
                        b.add_leaf(v, w, &leaf_name(next_leaf));
                        next_leaf += 1;
                    } else {
                        let u = b.add_internal(v, w);
                        stack.push((u, s));
                    }
                }
            }
        }
    }
    b.build().expect("generated trees satisfy the tree invariants")
}

/// Random instance, reproducible for fixed `(params, seed)`.
pub fn gen_random_instance(params: &GenParams, seed: u64) -> Result<Instance> {
    let bad = |m: &str| Err(Error::BadParams(m.to_owned()));
    if params.n < 2 {
        return bad("n must be at least 2");
    }
    if params.teams == 0 || params.max_ex == 0 || params.max_len == 0 || params.max_weight == 0 {
        return bad("team count, max_ex, max_len and max_weight must be positive");
    }
    if !(0.0..=1.0).contains(&params.savable_fraction) {
        return bad("savable_fraction must lie in [0, 1]");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tree = build_tree(params, &mut rng);
    let mut taxa = Vec::with_capacity(params.n);
    for i in 0..params.n {
        let len = rng.random_range(1..=params.max_len);
        let savable = len <= params.max_ex && rng.random_bool(params.savable_fraction);
        let ex = if savable {
            rng.random_range(len..=params.max_ex)
        } else {
            rng.random_range(1..=params.max_ex)
        };
        taxa.push((leaf_name(i), TaxonInfo::new(len, ex)));
    }
    let teams = (0..params.teams)
        .map(|_| {
            let start = rng.random_range(0..params.max_ex);
            TeamWindow::new(start, rng.random_range(start + 1..=params.max_ex))
        })
        .collect();
    let total = tree.total_weight();
    let target = match params.target {
        TargetRule::HalfTotal => total.div_ceil(2),
        TargetRule::Fixed(d) => d,
        TargetRule::Loss(l) => total.saturating_sub(l),
    };
    Instance::new(tree, taxa, teams, target, params.mode)
}

/// Star instance that is a yes-instance exactly when some `k` of `values` sum to `goal`.
///
/// Each value `z` becomes a leaf whose edge weight and rescue length are both
/// `z + q`, so saving `k` taxa uses `goal + k q` hours of the single team.
pub fn reduce_subset_sum(values: &[u64], k: u64, goal: u64, q: Option<u64>) -> Result<Instance> {
    if values.is_empty() || values.contains(&0) {
        return Err(Error::BadParams("values must be non-empty and positive".into()));
    }
    let sum: u64 = values.iter().sum();
    let q = q.unwrap_or(sum + 1);
    if q <= sum {
        return Err(Error::BadParams(format!("q = {q} must exceed the value sum {sum}")));
    }
    let horizon = k
        .checked_mul(q)
        .and_then(|kq| kq.checked_add(goal))
        .filter(|&h| h > 0)
        .ok_or_else(|| Error::BadParams("goal + k q must be positive and fit in 64 bits".into()))?;
    let names: Vec<String> = (0..values.len()).map(leaf_name).collect();
    let mut b = TreeBuilder::new();
    for (name, &z) in names.iter().zip(values) {
        b.add_leaf(0, z + q, name);
    }
    let taxa = names.iter().zip(values).map(|(n, &z)| (n.as_str(), TaxonInfo::new(z + q, horizon)));
    Instance::new(b.build()?, taxa, vec![TeamWindow::new(0, horizon)], horizon, Mode::Collaborative)
}

/// Random permutation of the leaf labels, keeping everything else.
pub fn relabel(instance: &Instance, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut names: Vec<String> = instance.taxa().iter().map(|t| t.name.clone()).collect();
    names.shuffle(&mut rng);
    let renamed: std::collections::HashMap<&str, &str> =
        instance.taxa().iter().map(|t| t.name.as_str()).zip(names.iter().map(String::as_str)).collect();
    let tree = instance
        .tree()
        .with_leaf_labels(|l| renamed[l].to_owned())
        .expect("a permutation keeps labels unique");
    let taxa = instance.taxa().iter().zip(&names).map(|(t, n)| (n.clone(), t.info));
    Instance::new(tree, taxa, instance.teams().to_vec(), instance.target(), instance.mode())
        .expect("relabeling preserves validity")
}
