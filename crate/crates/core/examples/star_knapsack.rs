//! Stars reduce to knapsack: the subset-sum reduction solved with each kernel.

use timepd::dp_structured::{knapsack_kernel, solve_star, KernelMode};
use timepd::generators::reduce_subset_sum;
use timepd::Guards;

fn main() -> timepd::Result<()> {
    let g = Guards::default();
    let items = [(8, 8), (9, 9), (10, 10)];
    let k = knapsack_kernel(&items, KernelMode::ByCapacity, 19, &g)?;
    println!("best profit per capacity: {:?}", k.table());
    println!("items at capacity 19: {:?}", k.select(19));

    let instance = reduce_subset_sum(&[1, 2, 3], 2, 5, Some(7))?;
    for mode in KernelMode::ALL {
        let out = solve_star(&instance, mode, &g)?;
        let saved = out.witness.map(|w| instance.names(&w.saved));
        println!("{}: yes = {}, saved {saved:?}", mode.name(), out.yes);
    }
    let no = reduce_subset_sum(&[2, 4], 1, 3, None)?;
    println!("values {{2, 4}} with goal 3: yes = {}", solve_star(&no, KernelMode::ByProfit, &g)?.yes);
    Ok(())
}
