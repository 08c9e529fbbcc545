//! Trees, taxa, teams and the quantities every solver derives from them.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type VertexId = usize;
/// Index into the canonical taxa order, sorted by (extinction time, label).
pub type TaxonId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
struct Node {
    parent: Option<VertexId>,
    weight: u64,
    children: Vec<VertexId>,
    label: Option<String>,
}

/// Rooted tree with positive integer edge weights.
///
/// An edge is named by its lower endpoint, so `weight(v)` is the weight of
/// the edge entering `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhyloTree {
    nodes: Vec<Node>,
    root: VertexId,
    edges: Vec<VertexId>,
    edge_rank: Vec<usize>,
    depth: Vec<usize>,
    leaves: Vec<VertexId>,
    leaf_index: HashMap<String, VertexId>,
    total_weight: u64,
}

#[derive(Clone, Debug, Default)]
pub struct TreeBuilder {
    nodes: Vec<Node>,
}

impl TreeBuilder {
    pub fn new() -> Self {
        TreeBuilder {
            nodes: vec![Node { parent: None, weight: 0, children: Vec::new(), label: None }],
        }
    }

    pub fn root(&self) -> VertexId {
        0
    }

    pub fn add_child(&mut self, parent: VertexId, weight: u64, label: Option<&str>) -> VertexId {
        let id = self.nodes.len();
        self.nodes.push(Node {
            parent: Some(parent),
            weight,
            children: Vec::new(),
            label: label.map(str::to_owned),
        });
        self.nodes[parent].children.push(id);
        id
    }

    pub fn add_leaf(&mut self, parent: VertexId, weight: u64, label: &str) -> VertexId {
        self.add_child(parent, weight, Some(label))
    }

    pub fn add_internal(&mut self, parent: VertexId, weight: u64) -> VertexId {
        self.add_child(parent, weight, None)
    }

    pub fn set_label(&mut self, v: VertexId, label: &str) {
        self.nodes[v].label = Some(label.to_owned());
    }

    pub fn set_weight(&mut self, v: VertexId, weight: u64) {
        self.nodes[v].weight = weight;
    }

    pub fn build(self) -> Result<PhyloTree> {
        PhyloTree::from_nodes(self.nodes, 0)
    }
}

impl PhyloTree {
    fn from_nodes(nodes: Vec<Node>, root: VertexId) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidInstance(m));
        let n = nodes.len();
        let mut edges = Vec::with_capacity(n.saturating_sub(1));
        let mut edge_rank = vec![usize::MAX; n];
        let mut depth = vec![0; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(v) = queue.pop_front() {
            for &c in &nodes[v].children {
                if seen[c] || nodes[c].parent != Some(v) {
                    return bad(format!("vertex {c} has more than one parent"));
                }
                seen[c] = true;
                edge_rank[c] = edges.len();
                edges.push(c);
                depth[c] = depth[v] + 1;
                queue.push_back(c);
            }
        }
        if seen.iter().any(|s| !s) {
            return bad("tree is not connected".into());
        }
        let mut leaves = Vec::new();
        let mut leaf_index = HashMap::new();
        let mut total_weight: u64 = 0;
        for (v, node) in nodes.iter().enumerate() {
            if v != root {
                if node.weight == 0 {
                    return bad(format!("edge into vertex {v} has weight 0"));
                }
                total_weight = total_weight
                    .checked_add(node.weight)
                    .ok_or_else(|| Error::InvalidInstance("total edge weight overflows".into()))?;
            }
            if node.children.is_empty() {
                if v == root {
                    return bad("tree has no edges".into());
                }
                let Some(label) = &node.label else {
                    return bad(format!("leaf vertex {v} has no label"));
                };
                if leaf_index.insert(label.clone(), v).is_some() {
                    return Err(Error::DuplicateLeaf(label.clone()));
                }
                leaves.push(v);
            } else if node.children.len() == 1 {
                // A lone edge from root to a single leaf is the only unary vertex allowed.
                let single_taxon = v == root && nodes[node.children[0]].children.is_empty();
                if !single_taxon {
                    return bad(format!("internal vertex {v} has out-degree 1"));
                }
            }
        }
        Ok(PhyloTree { nodes, root, edges, edge_rank, depth, leaves, leaf_index, total_weight })
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn vertex_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.nodes[v].parent
    }

    /// Weight of the edge entering `v`.
    pub fn weight(&self, v: VertexId) -> u64 {
        self.nodes[v].weight
    }

    pub fn children(&self, v: VertexId) -> &[VertexId] {
        &self.nodes[v].children
    }

    pub fn label(&self, v: VertexId) -> Option<&str> {
        self.nodes[v].label.as_deref()
    }

    pub fn is_leaf(&self, v: VertexId) -> bool {
        self.nodes[v].children.is_empty()
    }

    pub fn depth(&self, v: VertexId) -> usize {
        self.depth[v]
    }

    /// Edges in breadth-first order with children in stored order.
    pub fn edges(&self) -> &[VertexId] {
        &self.edges
    }

    pub fn edge_rank(&self, e: VertexId) -> usize {
        self.edge_rank[e]
    }

    pub fn leaves(&self) -> &[VertexId] {
        &self.leaves
    }

    pub fn leaf_by_label(&self, label: &str) -> Option<VertexId> {
        self.leaf_index.get(label).copied()
    }

    pub fn total_weight(&self) -> u64 {
        self.total_weight
    }

    pub fn is_binary(&self) -> bool {
        self.nodes.iter().all(|n| n.children.is_empty() || n.children.len() == 2)
    }

    pub fn is_star(&self) -> bool {
        self.nodes[self.root].children.iter().all(|&c| self.is_leaf(c))
    }

    /// Star whose root has one leaf per `(label, weight)` pair.
    pub fn star(leaves: &[(&str, u64)]) -> PhyloTree {
        let mut b = TreeBuilder::new();
        let r = b.root();
        for &(label, w) in leaves {
            b.add_leaf(r, w, label);
        }
        b.build().expect("star with positive weights and unique labels")
    }

    /// Same shape and weights with every leaf label passed through `f`.
    pub fn with_leaf_labels(&self, f: impl Fn(&str) -> String) -> Result<PhyloTree> {
        let mut nodes = self.nodes.clone();
        for &v in &self.leaves {
            let label = nodes[v].label.as_deref().map(&f);
            nodes[v].label = label;
        }
        PhyloTree::from_nodes(nodes, self.root)
    }

    /// Edges on the path from `v` up to the root, lowest first.
    pub fn path_to_root(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        std::iter::successors(Some(v), |&u| self.nodes[u].parent).take_while(|&u| u != self.root)
    }

    /// True if `a` is a proper ancestor of `v`.
    pub fn is_strict_ancestor(&self, a: VertexId, v: VertexId) -> bool {
        let mut u = v;
        while let Some(p) = self.nodes[u].parent {
            if p == a {
                return true;
            }
            u = p;
        }
        false
    }

    /// Total weight of edges with at least one marked leaf below them.
    pub fn pd_of_leaves(&self, leaves: &[VertexId]) -> u64 {
        let mut hit = vec![false; self.nodes.len()];
        for &l in leaves {
            hit[l] = true;
        }
        let mut total = 0;
        for &e in self.edges.iter().rev() {
            if hit[e] {
                total += self.nodes[e].weight;
                if let Some(p) = self.nodes[e].parent {
                    hit[p] = true;
                }
            }
        }
        total
    }

    /// Leaves below edge `e`.
    pub fn offspring(&self, e: VertexId) -> Vec<VertexId> {
        let mut out = Vec::new();
        let mut stack = vec![e];
        while let Some(v) = stack.pop() {
            if self.is_leaf(v) {
                out.push(v);
            }
            stack.extend(self.nodes[v].children.iter().rev());
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Collaborative,
    Strict,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Collaborative => "collaborative",
            Mode::Strict => "strict",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaxonInfo {
    #[serde(rename = "ell")]
    pub rescue_length: u64,
    #[serde(rename = "ex")]
    pub extinction_time: u64,
}

impl TaxonInfo {
    pub fn new(rescue_length: u64, extinction_time: u64) -> Self {
        TaxonInfo { rescue_length, extinction_time }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TeamWindow {
    pub start: u64,
    pub end: u64,
}

impl TeamWindow {
    pub fn new(start: u64, end: u64) -> Self {
        TeamWindow { start, end }
    }

    /// Hours this team can spend before `deadline`.
    pub fn hours_until(&self, deadline: u64) -> u64 {
        self.end.min(deadline).saturating_sub(self.start)
    }

    pub fn len(&self) -> u64 {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Taxon {
    pub name: String,
    pub leaf: VertexId,
    pub info: TaxonInfo,
}

/// Sorted, duplicate-free list of taxon ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TaxaSet(Vec<TaxonId>);

impl TaxaSet {
    pub fn new() -> Self {
        TaxaSet(Vec::new())
    }

    pub fn from_mask(mask: u64) -> Self {
        TaxaSet((0..64).filter(|i| mask >> i & 1 == 1).collect())
    }

    pub fn ids(&self) -> &[TaxonId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, x: TaxonId) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    pub fn insert(&mut self, x: TaxonId) {
        if let Err(pos) = self.0.binary_search(&x) {
            self.0.insert(pos, x);
        }
    }

    pub fn remove(&mut self, x: TaxonId) {
        if let Ok(pos) = self.0.binary_search(&x) {
            self.0.remove(pos);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = TaxonId> + '_ {
        self.0.iter().copied()
    }

    pub fn is_subset(&self, other: &TaxaSet) -> bool {
        self.iter().all(|x| other.contains(x))
    }

    pub fn union(&self, other: &TaxaSet) -> TaxaSet {
        self.iter().chain(other.iter()).collect()
    }
}

impl FromIterator<TaxonId> for TaxaSet {
    fn from_iter<I: IntoIterator<Item = TaxonId>>(iter: I) -> Self {
        let mut v: Vec<TaxonId> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        TaxaSet(v)
    }
}

/// Everything a solver needs that follows from the instance data.
///
/// Classes are 0-based here: class `j` holds the taxa whose extinction time
/// equals `extinction_times[j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedIndex {
    pub extinction_times: Vec<u64>,
    /// `class_bounds[j]..class_bounds[j + 1]` are the taxa of class `j`;
    /// taxa `0..class_bounds[j + 1]` form the prefix set Z_j.
    pub class_bounds: Vec<usize>,
    pub class_of: Vec<usize>,
    pub lengths: Vec<u64>,
    /// Person-hours available until each class deadline.
    pub capacity: Vec<u64>,
    /// `team_capacity[i][q]`: hours team `i` has until the deadline of class `q`.
    pub team_capacity: Vec<Vec<u64>>,
    pub deficit: Vec<i64>,
    pub total_pd: u64,
    pub target: u64,
    pub distinct_lengths: Vec<u64>,
    pub max_ex: u64,
    pub max_len: u64,
    pub max_weight: u64,
}

impl DerivedIndex {
    pub fn var_ex(&self) -> usize {
        self.extinction_times.len()
    }

    pub fn n(&self) -> usize {
        self.lengths.len()
    }

    pub fn class(&self, j: usize) -> std::ops::Range<TaxonId> {
        self.class_bounds[j]..self.class_bounds[j + 1]
    }

    /// Taxa of the prefix set Z_j.
    pub fn prefix(&self, j: usize) -> std::ops::Range<TaxonId> {
        0..self.class_bounds[j + 1]
    }

    /// PD(X) − D, negative when the target exceeds the whole tree.
    pub fn diversity_loss(&self) -> i64 {
        self.total_pd as i64 - self.target as i64
    }
}

pub fn build_derived_index(instance: &Instance) -> Result<DerivedIndex> {
    derive(&instance.tree, &instance.taxa, &instance.teams, instance.target)
}

fn derive(tree: &PhyloTree, taxa: &[Taxon], teams: &[TeamWindow], target: u64) -> Result<DerivedIndex> {
    let overflow = |what: &str| Error::InvalidInstance(format!("{what} overflows 64 bits"));
    let mut extinction_times: Vec<u64> = Vec::new();
    let mut class_bounds = vec![0];
    let mut class_of = Vec::with_capacity(taxa.len());
    for (id, t) in taxa.iter().enumerate() {
        if extinction_times.last() != Some(&t.info.extinction_time) {
            if id > 0 {
                class_bounds.push(id);
            }
            extinction_times.push(t.info.extinction_time);
        }
        class_of.push(extinction_times.len() - 1);
    }
    class_bounds.push(taxa.len());
    let lengths: Vec<u64> = taxa.iter().map(|t| t.info.rescue_length).collect();
    let team_capacity: Vec<Vec<u64>> = teams
        .iter()
        .map(|t| extinction_times.iter().map(|&d| t.hours_until(d)).collect())
        .collect();
    let mut capacity = vec![0u64; extinction_times.len()];
    for row in &team_capacity {
        for (c, &h) in capacity.iter_mut().zip(row) {
            *c = c.checked_add(h).ok_or_else(|| overflow("capacity"))?;
        }
    }
    let mut deficit = Vec::with_capacity(capacity.len());
    let mut prefix_len: u64 = 0;
    for (j, &h) in capacity.iter().enumerate() {
        for x in class_bounds[j]..class_bounds[j + 1] {
            prefix_len = prefix_len.checked_add(lengths[x]).ok_or_else(|| overflow("rescue length sum"))?;
        }
        let d = i128::from(prefix_len) - i128::from(h);
        deficit.push(i64::try_from(d).map_err(|_| overflow("deficit"))?);
    }
    let mut distinct_lengths = lengths.clone();
    distinct_lengths.sort_unstable();
    distinct_lengths.dedup();
    if i64::try_from(tree.total_weight()).is_err() {
        return Err(overflow("total diversity"));
    }
    Ok(DerivedIndex {
        max_ex: extinction_times.last().copied().unwrap_or(0),
        max_len: lengths.iter().copied().max().unwrap_or(0),
        max_weight: tree.edges().iter().map(|&e| tree.weight(e)).max().unwrap_or(0),
        extinction_times,
        class_bounds,
        class_of,
        lengths,
        capacity,
        team_capacity,
        deficit,
        total_pd: tree.total_weight(),
        target,
        distinct_lengths,
    })
}

/// A Time-PD instance. Immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    tree: PhyloTree,
    taxa: Vec<Taxon>,
    teams: Vec<TeamWindow>,
    target: u64,
    mode: Mode,
    index: DerivedIndex,
    by_leaf: Vec<Option<TaxonId>>,
}

impl Instance {
    pub fn new<S: AsRef<str>>(
        tree: PhyloTree,
        taxa: impl IntoIterator<Item = (S, TaxonInfo)>,
        teams: Vec<TeamWindow>,
        target: u64,
        mode: Mode,
    ) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidInstance(m));
        let mut infos: BTreeMap<String, TaxonInfo> = BTreeMap::new();
        for (name, info) in taxa {
            let name = name.as_ref().to_owned();
            if info.rescue_length == 0 {
                return bad(format!("taxon `{name}` has rescue length 0"));
            }
            if info.extinction_time == 0 {
                return bad(format!("taxon `{name}` has extinction time 0"));
            }
            if tree.leaf_by_label(&name).is_none() {
                return Err(Error::UnknownTaxon(name));
            }
            if infos.insert(name.clone(), info).is_some() {
                return bad(format!("taxon `{name}` listed twice"));
            }
        }
        for &leaf in tree.leaves() {
            let label = tree.label(leaf).unwrap_or_default();
            if !infos.contains_key(label) {
                return bad(format!("leaf `{label}` has no rescue data"));
            }
        }
        if teams.is_empty() {
            return bad("at least one team is required".into());
        }
        for (i, t) in teams.iter().enumerate() {
            if t.start >= t.end {
                return bad(format!("team {i} has start {} not below end {}", t.start, t.end));
            }
        }
        let mut taxa: Vec<Taxon> = infos
            .into_iter()
            .map(|(name, info)| Taxon { leaf: tree.leaf_by_label(&name).unwrap(), name, info })
            .collect();
        taxa.sort_by(|a, b| {
            (a.info.extinction_time, &a.name).cmp(&(b.info.extinction_time, &b.name))
        });
        let mut by_leaf = vec![None; tree.vertex_count()];
        for (id, t) in taxa.iter().enumerate() {
            by_leaf[t.leaf] = Some(id);
        }
        let index = derive(&tree, &taxa, &teams, target)?;
        Ok(Instance { tree, taxa, teams, target, mode, index, by_leaf })
    }

    pub fn tree(&self) -> &PhyloTree {
        &self.tree
    }

    pub fn taxa(&self) -> &[Taxon] {
        &self.taxa
    }

    pub fn taxon(&self, x: TaxonId) -> &Taxon {
        &self.taxa[x]
    }

    pub fn n(&self) -> usize {
        self.taxa.len()
    }

    pub fn teams(&self) -> &[TeamWindow] {
        &self.teams
    }

    pub fn target(&self) -> u64 {
        self.target
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn index(&self) -> &DerivedIndex {
        &self.index
    }

    pub fn length(&self, x: TaxonId) -> u64 {
        self.taxa[x].info.rescue_length
    }

    pub fn extinction(&self, x: TaxonId) -> u64 {
        self.taxa[x].info.extinction_time
    }

    pub fn taxon_id(&self, name: &str) -> Result<TaxonId> {
        self.tree
            .leaf_by_label(name)
            .and_then(|v| self.by_leaf[v])
            .ok_or_else(|| Error::UnknownTaxon(name.to_owned()))
    }

    pub fn taxon_at_leaf(&self, v: VertexId) -> Option<TaxonId> {
        self.by_leaf.get(v).copied().flatten()
    }

    pub fn set_of(&self, names: &[&str]) -> Result<TaxaSet> {
        names.iter().map(|n| self.taxon_id(n)).collect()
    }

    pub fn names(&self, set: &TaxaSet) -> Vec<String> {
        set.iter().map(|x| self.taxa[x].name.clone()).collect()
    }

    pub fn all_taxa(&self) -> TaxaSet {
        (0..self.n()).collect()
    }

    pub fn pd(&self, set: &TaxaSet) -> u64 {
        let leaves: Vec<VertexId> = set.iter().map(|x| self.taxa[x].leaf).collect();
        self.tree.pd_of_leaves(&leaves)
    }

    pub fn with_target(&self, target: u64) -> Instance {
        let mut out = self.clone();
        out.target = target;
        out.index.target = target;
        out
    }

    pub fn with_mode(&self, mode: Mode) -> Instance {
        let mut out = self.clone();
        out.mode = mode;
        out
    }

    /// Total number of (team, timeslot) pairs.
    pub fn total_hours(&self) -> u64 {
        self.teams.iter().map(TeamWindow::len).sum()
    }

    /// Can `x` be saved on its own under `mode`?
    pub fn savable_alone(&self, x: TaxonId, mode: Mode) -> bool {
        let ex = self.extinction(x);
        let len = self.length(x);
        match mode {
            Mode::Collaborative => len <= self.index.capacity[self.index.class_of[x]],
            Mode::Strict => self.teams.iter().any(|t| t.hours_until(ex) >= len),
        }
    }
}

pub fn pd_of_subset(instance: &Instance, set: &TaxaSet) -> Result<u64> {
    if let Some(&x) = set.ids().last() {
        if x >= instance.n() {
            return Err(Error::UnknownTaxon(format!("#{x}")));
        }
    }
    Ok(instance.pd(set))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TrivialKind {
    TrivialYes(TaxaSet),
    TrivialNo,
    NonTrivial,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triviality {
    pub kind: TrivialKind,
    pub unsavable: Vec<TaxonId>,
}

pub fn classify_trivial(instance: &Instance) -> Triviality {
    let idx = instance.index();
    let kind = if instance.target() > idx.total_pd {
        TrivialKind::TrivialNo
    } else if instance.target() == 0 {
        TrivialKind::TrivialYes(TaxaSet::new())
    } else {
        TrivialKind::NonTrivial
    };
    let unsavable =
        (0..instance.n()).filter(|&x| !instance.savable_alone(x, instance.mode())).collect();
    Triviality { kind, unsavable }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn four_team_capacities() {
        let inst = fixtures::four_teams();
        let idx = inst.index();
        assert_eq!(idx.extinction_times, vec![7, 12, 18]);
        assert_eq!(idx.capacity, vec![19, 39, 54]);
        assert_eq!(idx.deficit, vec![0, -5, -2]);
        for q in 0..3 {
            let sum: u64 = idx.team_capacity.iter().map(|r| r[q]).sum();
            assert_eq!(sum, idx.capacity[q]);
        }
    }

    #[test]
    fn single_team_window() {
        let tree = PhyloTree::star(&[("a", 1), ("b", 1)]);
        let inst = Instance::new(
            tree,
            [("a", TaxonInfo::new(1, 2)), ("b", TaxonInfo::new(1, 4))],
            vec![TeamWindow::new(0, 4)],
            1,
            Mode::Collaborative,
        )
        .unwrap();
        assert_eq!(inst.index().extinction_times, vec![2, 4]);
        assert_eq!(inst.index().capacity, vec![2, 4]);
        assert_eq!(inst.index().prefix(0), 0..1);
        assert_eq!(inst.index().prefix(1), 0..2);
    }

    #[test]
    fn pd_examples() {
        let inst = fixtures::anchored_tree();
        assert_eq!(inst.pd(&TaxaSet::new()), 0);
        assert_eq!(inst.pd(&inst.all_taxa()), inst.tree().total_weight());
        assert_eq!(inst.pd(&inst.set_of(&["x3"]).unwrap()), 5);
        assert!(pd_of_subset(&inst, &TaxaSet::from_iter([17])).is_err());
    }

    #[test]
    fn canonical_edge_order_is_level_order() {
        let inst = fixtures::anchored_tree();
        let t = inst.tree();
        let weights: Vec<u64> = t.edges().iter().map(|&e| t.weight(e)).collect();
        assert_eq!(weights, vec![3, 3, 7, 2, 3, 2, 7, 1, 3]);
    }

    #[test]
    fn trivial_classification() {
        let inst = fixtures::three_teams_star();
        assert_eq!(
            classify_trivial(&inst.with_target(0)).kind,
            TrivialKind::TrivialYes(TaxaSet::new())
        );
        let pd = inst.index().total_pd;
        assert_eq!(classify_trivial(&inst.with_target(pd + 1)).kind, TrivialKind::TrivialNo);
        assert_eq!(classify_trivial(&inst).kind, TrivialKind::NonTrivial);

        let tree = PhyloTree::star(&[("a", 1), ("b", 1)]);
        for mode in [Mode::Collaborative, Mode::Strict] {
            let inst = Instance::new(
                tree.clone(),
                [("a", TaxonInfo::new(10, 3)), ("b", TaxonInfo::new(1, 3))],
                vec![TeamWindow::new(0, 20)],
                1,
                mode,
            )
            .unwrap();
            assert_eq!(classify_trivial(&inst).unsavable, vec![inst.taxon_id("a").unwrap()]);
        }
    }

    #[test]
    fn rejects_bad_trees() {
        let mut b = TreeBuilder::new();
        let r = b.root();
        b.add_leaf(r, 0, "a");
        b.add_leaf(r, 1, "b");
        assert!(matches!(b.build(), Err(Error::InvalidInstance(_))));

        let mut b = TreeBuilder::new();
        let r = b.root();
        let u = b.add_internal(r, 1);
        b.add_leaf(u, 1, "a");
        b.add_leaf(r, 1, "b");
        assert!(matches!(b.build(), Err(Error::InvalidInstance(_))));

        let mut b = TreeBuilder::new();
        let r = b.root();
        b.add_leaf(r, 1, "a");
        b.add_leaf(r, 1, "a");
        assert!(matches!(b.build(), Err(Error::DuplicateLeaf(_))));
    }

    #[test]
    fn rejects_bad_instances() {
        let tree = PhyloTree::star(&[("a", 1), ("b", 1)]);
        let ok = TaxonInfo::new(1, 1);
        let mk = |taxa: Vec<(&str, TaxonInfo)>, teams| {
            Instance::new(tree.clone(), taxa, teams, 1, Mode::Collaborative)
        };
        let team = vec![TeamWindow::new(0, 3)];
        assert!(mk(vec![("a", ok)], team.clone()).is_err());
        assert!(matches!(
            mk(vec![("a", ok), ("b", ok), ("c", ok)], team.clone()),
            Err(Error::UnknownTaxon(_))
        ));
        assert!(mk(vec![("a", ok), ("b", TaxonInfo::new(0, 1))], team.clone()).is_err());
        assert!(mk(vec![("a", ok), ("b", ok)], vec![]).is_err());
        assert!(mk(vec![("a", ok), ("b", ok)], vec![TeamWindow::new(3, 3)]).is_err());
        let huge = vec![TeamWindow::new(0, u64::MAX), TeamWindow::new(0, u64::MAX)];
        let big = TaxonInfo::new(1, u64::MAX);
        assert!(matches!(mk(vec![("a", big), ("b", big)], huge), Err(Error::InvalidInstance(_))));
    }
}
