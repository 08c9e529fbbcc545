use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::feasibility::{build_collaborative_schedule, check_witness, Schedule};
use crate::model::{Instance, Mode, TaxaSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Trivial,
    Brute,
    FptD,
    FptDbar,
    HoursTeams,
    HoursBudget,
    HoursSubsets,
    XpCounts,
    Star,
}

impl Algorithm {
    pub const ALL: [Algorithm; 9] = [
        Algorithm::Trivial,
        Algorithm::Brute,
        Algorithm::FptD,
        Algorithm::FptDbar,
        Algorithm::HoursTeams,
        Algorithm::HoursBudget,
        Algorithm::HoursSubsets,
        Algorithm::XpCounts,
        Algorithm::Star,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Trivial => "trivial",
            Algorithm::Brute => "brute",
            Algorithm::FptD => "fpt-d",
            Algorithm::FptDbar => "fpt-dbar",
            Algorithm::HoursTeams => "hours-teams",
            Algorithm::HoursBudget => "hours-budget",
            Algorithm::HoursSubsets => "hours-subsets",
            Algorithm::XpCounts => "xp-counts",
            Algorithm::Star => "star",
        }
    }

    pub fn is_randomized(self) -> bool {
        matches!(self, Algorithm::FptD | Algorithm::FptDbar)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::BadParams(format!("unknown algorithm `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub saved: TaxaSet,
    pub schedule: Schedule,
    pub pd: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics {
    pub algorithm: Algorithm,
    pub mode: Mode,
    pub trials_planned: u64,
    pub trials_run: u64,
    pub seed: Option<u64>,
    pub delta: Option<f64>,
    /// Best diversity over all feasible sets, for solvers that compute it.
    pub optimum: Option<u64>,
}

impl Diagnostics {
    pub fn new(algorithm: Algorithm, mode: Mode) -> Self {
        Diagnostics {
            algorithm,
            mode,
            trials_planned: 0,
            trials_run: 0,
            seed: None,
            delta: None,
            optimum: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOutcome {
    pub yes: bool,
    pub witness: Option<Witness>,
    pub diagnostics: Diagnostics,
}

impl SolveOutcome {
    pub fn no(diagnostics: Diagnostics) -> Self {
        SolveOutcome { yes: false, witness: None, diagnostics }
    }

    /// Builds a yes outcome after checking diversity and the schedule.
    pub fn certified(
        instance: &Instance,
        saved: TaxaSet,
        schedule: Schedule,
        diagnostics: Diagnostics,
    ) -> Result<Self> {
        let pd = instance.pd(&saved);
        if pd < instance.target() {
            return Err(Error::WitnessRejected(format!(
                "diversity {pd} is below the target {}",
                instance.target()
            )));
        }
        check_witness(instance, &saved, &schedule)?;
        if schedule.mode != diagnostics.mode {
            return Err(Error::WitnessRejected("schedule mode differs from the solve mode".into()));
        }
        Ok(SolveOutcome { yes: true, witness: Some(Witness { saved, schedule, pd }), diagnostics })
    }

    /// Yes outcome for a collaboratively saved set, with a greedy schedule.
    pub fn certified_collaborative(
        instance: &Instance,
        saved: TaxaSet,
        diagnostics: Diagnostics,
    ) -> Result<Self> {
        let schedule = build_collaborative_schedule(instance, &saved)
            .map_err(|_| Error::WitnessRejected("witness set is not feasible".into()))?;
        Self::certified(instance, saved, schedule, diagnostics)
    }
}

/// Size limits applied before running an exponential algorithm.
#[derive(Clone, Debug, PartialEq)]
pub struct Guards {
    pub brute_taxa: usize,
    pub brute_strict_taxa: usize,
    pub ordering_set: usize,
    pub exhaustive_space: f64,
    pub d_mask_width: u64,
    pub dbar_mask_width: u64,
    pub dense_dbar_entries: f64,
    pub dp_states: f64,
    /// Bound on the number of (budget, sub-budget) pairs a box DP may visit.
    pub dp_work: f64,
    pub knapsack_bound: u64,
}

impl Default for Guards {
    fn default() -> Self {
        Guards {
            brute_taxa: 20,
            brute_strict_taxa: 8,
            ordering_set: 10,
            exhaustive_space: 1e7,
            d_mask_width: 30,
            dbar_mask_width: 14,
            dense_dbar_entries: 5e7,
            dp_states: 1e7,
            dp_work: 5e9,
            knapsack_bound: 10_000_000,
        }
    }
}
