//! The randomized solver parameterized by the diversity loss, and the anchored
//! sets that certify which taxa are given up.

use timepd::feasibility::collaborative_feasible;
use timepd::fpt_dbar::{check_anchored_construction, construct_anchored_set, solve_time_pd_by_dbar};
use timepd::generators::{gen_random_instance, GenParams, TargetRule, TreeShape};
use timepd::{Guards, TaxaSet};

fn main() -> timepd::Result<()> {
    let params = GenParams { n: 6, max_weight: 3, shape: TreeShape::RandomBinary, target: TargetRule::Loss(3), ..GenParams::default() };
    let instance = gen_random_instance(&params, 8)?;
    println!("total diversity {}, target {}", instance.index().total_pd, instance.target());
    let out = solve_time_pd_by_dbar(&instance, 1e-3, 5, &Guards::default())?;
    println!("yes = {}, trials {}/{}", out.yes, out.diagnostics.trials_run, out.diagnostics.trials_planned);

    let feasible = (1..1u64 << instance.n())
        .map(TaxaSet::from_mask)
        .filter(|s| collaborative_feasible(instance.index(), s))
        .max_by_key(|s| instance.pd(s))
        .expect("some single taxon is savable");
    let tuples = construct_anchored_set(&instance, &feasible)?;
    println!("saving {:?} gives up:", instance.names(&feasible));
    for t in &tuples {
        println!("  {} anchored at vertex {} beside edge {}", instance.taxon(t.taxon).name, t.anchor, t.edge);
    }
    println!("construction check: {:?}", check_anchored_construction(&instance, &feasible, &tuples));
    Ok(())
}
