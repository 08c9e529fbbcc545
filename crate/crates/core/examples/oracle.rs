//! The exhaustive references: subset enumeration and schedule search.

use timepd::feasibility::collaborative_feasible;
use timepd::fixtures::three_teams_star;
use timepd::generators::{gen_random_instance, GenParams};
use timepd::oracle::{brute_force_s_time_pd, brute_force_time_pd, exhaustive_schedule_search};
use timepd::{Guards, Mode, TaxaSet};

fn main() -> timepd::Result<()> {
    let g = Guards::default();
    let instance = three_teams_star();
    let out = brute_force_time_pd(&instance, &g)?;
    println!("collaborative optimum {:?}", out.diagnostics.optimum);
    let strict = brute_force_s_time_pd(&instance.with_mode(Mode::Strict), &g)?;
    println!("strict optimum {:?}", strict.diagnostics.optimum);

    let small = gen_random_instance(&GenParams { n: 4, teams: 2, max_ex: 4, max_len: 2, ..GenParams::default() }, 3)?;
    for mask in 0..1u64 << small.n() {
        let set = TaxaSet::from_mask(mask);
        let exhaustive = exhaustive_schedule_search(&small, &set, Mode::Collaborative, &g)?;
        let prefix = collaborative_feasible(small.index(), &set);
        println!("{:?}: schedule exists {exhaustive}, prefix test {prefix}", small.names(&set));
    }
    Ok(())
}
