use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feasibility::Schedule;
use crate::model::{Instance, Mode, TaxonInfo, TeamWindow};

use super::newick::{parse_newick, write_newick};

pub const SCHEMA_VERSION: u32 = 1;

fn schema_error(e: serde_json::Error) -> Error {
    Error::ParseError { offset: 0, message: format!("line {} column {}: {e}", e.line(), e.column()) }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub v: u32,
    pub tree: String,
    pub taxa: BTreeMap<String, TaxonInfo>,
    pub teams: Vec<TeamWindow>,
    #[serde(rename = "D")]
    pub target: u64,
    pub mode: Mode,
}

impl InstanceFile {
    pub fn from_instance(instance: &Instance) -> Self {
        InstanceFile {
            v: SCHEMA_VERSION,
            tree: write_newick(instance.tree()),
            taxa: instance.taxa().iter().map(|t| (t.name.clone(), t.info)).collect(),
            teams: instance.teams().to_vec(),
            target: instance.target(),
            mode: instance.mode(),
        }
    }

    pub fn to_instance(&self) -> Result<Instance> {
        if self.v != SCHEMA_VERSION {
            return Err(Error::InvalidInstance(format!("unsupported schema version {}", self.v)));
        }
        let tree = parse_newick(&self.tree)?;
        Instance::new(tree, self.taxa.iter().map(|(k, &v)| (k, v)), self.teams.clone(), self.target, self.mode)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssignmentEntry {
    pub team: usize,
    pub slot: u64,
    pub taxon: String,
}

/// A schedule with taxa referred to by name. Pairs not listed are idle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleFile {
    pub mode: Mode,
    pub assignments: Vec<AssignmentEntry>,
    pub saved: Vec<String>,
    pub pd: u64,
}

impl ScheduleFile {
    pub fn from_schedule(instance: &Instance, schedule: &Schedule) -> Self {
        ScheduleFile {
            mode: schedule.mode,
            assignments: schedule
                .assignments
                .iter()
                .map(|(&(team, slot), &x)| AssignmentEntry { team, slot, taxon: instance.taxon(x).name.clone() })
                .collect(),
            saved: instance.names(&schedule.saved),
            pd: instance.pd(&schedule.saved),
        }
    }

    pub fn to_schedule(&self, instance: &Instance) -> Result<Schedule> {
        let mut schedule = Schedule::empty(self.mode);
        for a in &self.assignments {
            let x = instance.taxon_id(&a.taxon)?;
            if schedule.assignments.insert((a.team, a.slot), x).is_some() {
                return Err(Error::DomainMismatch(format!("team {} slot {} is listed twice", a.team, a.slot)));
            }
        }
        for name in &self.saved {
            schedule.saved.insert(instance.taxon_id(name)?);
        }
        Ok(schedule)
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn instance_to_json(instance: &Instance) -> String {
    to_json(&InstanceFile::from_instance(instance))
}

pub fn instance_from_json(text: &str) -> Result<Instance> {
    serde_json::from_str::<InstanceFile>(text).map_err(schema_error)?.to_instance()
}

pub fn schedule_to_json(instance: &Instance, schedule: &Schedule) -> String {
    to_json(&ScheduleFile::from_schedule(instance, schedule))
}

pub fn schedule_from_json(instance: &Instance, text: &str) -> Result<Schedule> {
    serde_json::from_str::<ScheduleFile>(text).map_err(schema_error)?.to_schedule(instance)
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    instance_from_json(&std::fs::read_to_string(path)?)
}

pub fn write_instance(path: &Path, instance: &Instance) -> Result<()> {
    Ok(std::fs::write(path, instance_to_json(instance))?)
}

pub fn read_schedule(path: &Path, instance: &Instance) -> Result<Schedule> {
    schedule_from_json(instance, &std::fs::read_to_string(path)?)
}

pub fn write_schedule(path: &Path, instance: &Instance, schedule: &Schedule) -> Result<()> {
    Ok(std::fs::write(path, schedule_to_json(instance, schedule))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feasibility::{build_collaborative_schedule, verify_schedule};
    use crate::fixtures::{anchored_tree, four_teams, three_teams_star};
    use crate::generators::{gen_random_instance, GenParams, TreeShape};
    use crate::model::TaxaSet;

    #[test]
    fn instance_text_round_trips() {
        let text = r#"{
  "v": 1,
  "tree": "((x1:3,x2:2):1,x3:5);",
  "taxa": {
    "x1": {
      "ell": 2,
      "ex": 3
    },
    "x2": {
      "ell": 1,
      "ex": 2
    },
    "x3": {
      "ell": 4,
      "ex": 6
    }
  },
  "teams": [
    {
      "start": 0,
      "end": 6
    }
  ],
  "D": 8,
  "mode": "collaborative"
}
"#;
        let inst = instance_from_json(text).unwrap();
        assert_eq!(inst.index().total_pd, 11);
        assert_eq!(instance_to_json(&inst), text);
    }

    #[test]
    fn instances_round_trip() {
        let mut all = vec![four_teams(), three_teams_star(), anchored_tree()];
        for seed in 0..40 {
            let p = GenParams { n: 2 + seed as usize % 6, shape: TreeShape::ALL[seed as usize % 4], ..GenParams::default() };
            all.push(gen_random_instance(&p, seed).unwrap());
        }
        for inst in all {
            let text = instance_to_json(&inst);
            let back = instance_from_json(&text).unwrap();
            assert_eq!(instance_to_json(&back), text);
            assert_eq!(back.index(), inst.index());
            assert_eq!(back.pd(&back.all_taxa()), inst.pd(&inst.all_taxa()));
            let names: Vec<_> = back.taxa().iter().map(|t| (&t.name, t.info)).collect();
            let before: Vec<_> = inst.taxa().iter().map(|t| (&t.name, t.info)).collect();
            assert_eq!(names, before);
        }
    }

    #[test]
    fn schema_errors() {
        let ok = instance_to_json(&three_teams_star());
        assert!(matches!(instance_from_json(&ok.replace("\"v\": 1", "\"v\": 2")), Err(Error::InvalidInstance(_))));
        assert!(matches!(instance_from_json(&ok.replace("\"D\"", "\"d\"")), Err(Error::ParseError { .. })));
        assert!(matches!(instance_from_json("{"), Err(Error::ParseError { .. })));
        let missing = ok.replacen("\"x1\"", "\"zz\"", 1);
        assert!(instance_from_json(&missing).is_err());
    }

    #[test]
    fn schedules_round_trip() {
        let inst = four_teams();
        let schedule = build_collaborative_schedule(&inst, &inst.all_taxa()).unwrap();
        let text = schedule_to_json(&inst, &schedule);
        let back = schedule_from_json(&inst, &text).unwrap();
        assert_eq!(back, schedule);
        assert_eq!(schedule_to_json(&inst, &back), text);
        assert!(verify_schedule(&inst, &back).unwrap().passed());
        let file: ScheduleFile = serde_json::from_str(&text).unwrap();
        assert_eq!(file.pd, inst.pd(&inst.all_taxa()));
        let empty = Schedule::empty(Mode::Strict);
        assert_eq!(schedule_from_json(&inst, &schedule_to_json(&inst, &empty)).unwrap(), empty);
        assert_eq!(empty.saved, TaxaSet::new());
    }

    #[test]
    fn duplicate_pairs_rejected() {
        let inst = three_teams_star();
        let text = r#"{"mode":"collaborative","assignments":[{"team":0,"slot":1,"taxon":"x1"},{"team":0,"slot":1,"taxon":"x2"}],"saved":[],"pd":0}"#;
        assert!(matches!(schedule_from_json(&inst, text), Err(Error::DomainMismatch(_))));
    }

    #[test]
    fn files_on_disk() {
        let dir = tempfile::tempdir().unwrap();
        let inst = four_teams();
        let path = dir.path().join("inst.json");
        write_instance(&path, &inst).unwrap();
        let back = read_instance(&path).unwrap();
        assert_eq!(instance_to_json(&back), instance_to_json(&inst));
        let schedule = build_collaborative_schedule(&back, &back.all_taxa()).unwrap();
        let spath = dir.path().join("s.json");
        write_schedule(&spath, &back, &schedule).unwrap();
        assert_eq!(read_schedule(&spath, &back).unwrap(), schedule);
        assert!(matches!(read_instance(&dir.path().join("nope.json")), Err(Error::Io(_))));
    }
}
