//! Small hand-checked instances used by tests and examples.

use crate::model::{Instance, Mode, PhyloTree, TaxonInfo, TeamWindow, TreeBuilder};

fn unit_star(names: &[&str]) -> PhyloTree {
    let leaves: Vec<(&str, u64)> = names.iter().map(|&n| (n, 1)).collect();
    PhyloTree::star(&leaves)
}

fn taxa<'a>(names: &[&'a str], ell: &[u64], ex: &[u64]) -> Vec<(&'a str, TaxonInfo)> {
    names.iter().zip(ell.iter().zip(ex)).map(|(&n, (&l, &e))| (n, TaxonInfo::new(l, e))).collect()
}

fn teams(windows: &[(u64, u64)]) -> Vec<TeamWindow> {
    windows.iter().map(|&(s, e)| TeamWindow::new(s, e)).collect()
}

const SIX: [&str; 6] = ["x1", "x2", "x3", "x4", "x5", "x6"];

/// Four teams and six taxa on a unit-weight star; all six taxa can be saved.
pub fn four_teams() -> Instance {
    Instance::new(
        unit_star(&SIX),
        taxa(&SIX, &[10, 9, 13, 8, 7, 5], &[7, 7, 18, 12, 12, 18]),
        teams(&[(0, 17), (2, 13), (3, 15), (4, 18)]),
        6,
        Mode::Collaborative,
    )
    .unwrap()
}

/// Three teams and six taxa on a unit-weight star; saving all six uses every hour.
pub fn three_teams_star() -> Instance {
    Instance::new(
        unit_star(&SIX),
        taxa(&SIX, &[8, 4, 7, 8, 6, 6], &[4, 7, 7, 15, 15, 15]),
        teams(&[(2, 15), (0, 15), (0, 11)]),
        6,
        Mode::Collaborative,
    )
    .unwrap()
}

/// Depth-two tree with three cherries under the root.
///
/// Edge weights in level order are 3, 3, 7, 2, 3, 2, 7, 1, 3, the total is
/// 31 and the target 25 leaves a diversity loss of 6. Deficits per class are
/// (10, 22, 35).
pub fn anchored_tree() -> Instance {
    let mut b = TreeBuilder::new();
    let r = b.root();
    let v1 = b.add_internal(r, 3);
    let v2 = b.add_internal(r, 3);
    let v3 = b.add_internal(r, 7);
    b.add_leaf(v1, 2, "x1");
    b.add_leaf(v1, 3, "x2");
    b.add_leaf(v2, 2, "x3");
    b.add_leaf(v2, 7, "x4");
    b.add_leaf(v3, 1, "x5");
    b.add_leaf(v3, 3, "x6");
    Instance::new(
        b.build().unwrap(),
        taxa(&SIX, &[10, 13, 9, 7, 9, 12], &[15, 30, 25, 15, 25, 25]),
        teams(&[(8, 25), (17, 25)]),
        25,
        Mode::Collaborative,
    )
    .unwrap()
}

/// Subset-sum instance for values {1, 2, 3}, two picks summing to 5; a yes-instance.
pub fn subset_sum() -> Instance {
    crate::generators::reduce_subset_sum(&[1, 2, 3], 2, 5, Some(7)).unwrap()
}

/// Subset-sum instance for values {2, 4}, one pick equal to 3; a no-instance.
pub fn subset_sum_no() -> Instance {
    crate::generators::reduce_subset_sum(&[2, 4], 1, 3, None).unwrap()
}

/// Coloring of [`anchored_tree`] for a loss bound of 6, with twelve colors.
///
/// The two edges of weight 7 are heavy and carry only a key color.
pub fn anchored_coloring() -> crate::fpt_dbar::DbarColoring {
    let inst = anchored_tree();
    let keys = [2, 9, 12, 10, 6, 3, 8, 4, 5];
    let extras = [
        Some(vec![1, 7]),
        Some(vec![2, 3]),
        None,
        Some(vec![9]),
        Some(vec![4, 11]),
        Some(vec![7]),
        None,
        Some(vec![]),
        Some(vec![3, 8]),
    ];
    crate::fpt_dbar::DbarColoring::new(inst.tree(), 6, &keys, &extras).unwrap()
}
