//! Parses a Newick tree, wraps it in an instance file and reads it back.

use timepd::io::{instance_from_json, instance_to_json, parse_newick, write_newick};
use timepd::{Instance, Mode, TaxonInfo, TeamWindow};

fn main() -> timepd::Result<()> {
    let tree = parse_newick("((x1:3,x2:2):1,x3:5);")?;
    println!("edges: {}, total weight: {}", tree.edges().len(), tree.total_weight());
    println!("written back: {}", write_newick(&tree));

    let taxa = [("x1", TaxonInfo::new(2, 3)), ("x2", TaxonInfo::new(1, 2)), ("x3", TaxonInfo::new(4, 6))];
    let instance = Instance::new(tree, taxa, vec![TeamWindow::new(0, 6)], 8, Mode::Collaborative)?;
    let text = instance_to_json(&instance);
    print!("{text}");
    let again = instance_from_json(&text)?;
    assert_eq!(instance_to_json(&again), text);

    match parse_newick("(a:1.5,b:2);") {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
