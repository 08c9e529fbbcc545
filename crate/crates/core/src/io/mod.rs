//! Newick trees and the JSON instance and schedule files.
//!
//! Timeslots in files are 1-based: a team with window `(start, end)` works
//! in slots `start + 1 ..= end`.

mod files;
mod newick;

pub use files::{
    instance_from_json, instance_to_json, read_instance, read_schedule, schedule_from_json, schedule_to_json,
    write_instance, write_schedule, AssignmentEntry, InstanceFile, ScheduleFile, SCHEMA_VERSION,
};
pub use newick::{parse_newick, write_newick};
