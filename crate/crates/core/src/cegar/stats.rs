use std::time::Duration;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Sat,
    Unsat,
    Timeout,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct PhaseTimes {
    pub candidate: f64,
    pub counter_example: f64,
    pub refine: f64,
    pub verify: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CegarStats {
    pub counter_examples: u64,
    pub candidate_solves: u64,
    pub ce_solves: u64,
    pub refinements: u64,
    /// Milliseconds per phase.
    pub time_ms: PhaseTimes,
}

impl CegarStats {
    pub(crate) fn add_time(slot: &mut f64, d: Duration) {
        *slot += d.as_secs_f64() * 1e3;
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("stats serialize")
    }
}
