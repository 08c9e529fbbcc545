//! Exact solvers for maximizing phylogenetic diversity when rescue teams
//! must finish each taxon before its extinction deadline.

pub mod bench;
pub mod cli;
pub mod color_coding;
pub mod dispatch;
pub mod dp_hours;
pub mod dp_structured;
pub mod error;
pub mod feasibility;
pub mod fixtures;
pub mod fpt_d;
pub mod fpt_dbar;
pub mod generators;
pub mod io;
pub mod model;
pub mod oracle;
pub mod outcome;

pub use error::{Error, Result};
pub use model::{Instance, Mode, PhyloTree, TaxaSet, TaxonId, TaxonInfo, TeamWindow, TreeBuilder};
pub use outcome::{Algorithm, Guards, SolveOutcome};
