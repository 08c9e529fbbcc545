//! Prefix-capacity feasibility, greedy schedules and schedule verification.

use timepd::feasibility::{build_collaborative_schedule, collaborative_feasible, verify_schedule};
use timepd::fixtures::four_teams;

fn main() -> timepd::Result<()> {
    let instance = four_teams();
    let idx = instance.index();
    println!("deadlines {:?}", idx.extinction_times);
    println!("hours available by each deadline {:?}", idx.capacity);
    println!("deficits {:?}", idx.deficit);

    let all = instance.all_taxa();
    println!("all six feasible: {}", collaborative_feasible(idx, &all));
    let schedule = build_collaborative_schedule(&instance, &all)?;
    for ((team, slot), x) in schedule.assignments.iter().take(8) {
        println!("team {team} slot {slot}: {}", instance.taxon(*x).name);
    }
    let report = verify_schedule(&instance, &schedule)?;
    println!("{} assignments, valid: {}", schedule.assignments.len(), report.passed());
    Ok(())
}
