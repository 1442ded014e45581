//! Counter-example guided abstraction refinement for marker reprogramming
//! and synthesis.
//!
//! The candidate formula only asks for one trap space matching the marker.
//! Each candidate is checked by searching for a configuration outside the
//! marker that lies in a minimal trap space; such a configuration refines
//! the candidate formula, removing only invalid candidates.

mod counterexample;
mod reprogram;
mod stats;
mod synthesis;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::Duration;

pub use counterexample::{find_counter_example, violating_vertex};
pub use reprogram::{enumerate_reprogramming, solve_reprogramming, ReprogrammingOutcome, ReprogrammingSolver};
pub use stats::{CegarStats, PhaseTimes, Status};
pub use synthesis::{solve_synthesis, SynthesisOptions, SynthesisOutcome, SynthesisSolver};

use crate::bn::{ComponentId, PartialAssignment};
use crate::error::Error;

pub const DEFAULT_REFINEMENT_CAP: usize = 10_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum RefinementVariant {
    /// Block the rejected candidate only.
    V0,
    /// Require a strictly smaller trap space inside the counter-example's.
    V1,
    /// As `V1`, with that smaller trap space matching the marker.
    #[default]
    V2,
}

impl RefinementVariant {
    pub const ALL: [RefinementVariant; 3] = [RefinementVariant::V0, RefinementVariant::V1, RefinementVariant::V2];
}

impl fmt::Display for RefinementVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = match self {
            RefinementVariant::V0 => 0,
            RefinementVariant::V1 => 1,
            RefinementVariant::V2 => 2,
        };
        write!(f, "{d}")
    }
}

impl FromStr for RefinementVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().trim_start_matches(['v', 'V']) {
            "0" => Ok(RefinementVariant::V0),
            "1" => Ok(RefinementVariant::V1),
            "2" => Ok(RefinementVariant::V2),
            _ => Err(Error::InvalidValue {
                name: "variant".into(),
                message: format!("expected 0, 1 or 2, got `{s}`"),
            }),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ReprogrammingOptions {
    pub variant: RefinementVariant,
    pub uncontrollable: BTreeSet<ComponentId>,
    /// Deny perturbing components the marker mentions.
    pub forbid_marker_nodes: bool,
    pub timeout: Option<Duration>,
    pub refinement_cap: usize,
}

impl Default for ReprogrammingOptions {
    fn default() -> Self {
        Self {
            variant: RefinementVariant::default(),
            uncontrollable: BTreeSet::new(),
            forbid_marker_nodes: false,
            timeout: None,
            refinement_cap: DEFAULT_REFINEMENT_CAP,
        }
    }
}

impl ReprogrammingOptions {
    pub fn with_variant(variant: RefinementVariant) -> Self {
        Self {
            variant,
            ..Self::default()
        }
    }

    pub fn controllable(&self, n: usize, marker: &PartialAssignment) -> Vec<bool> {
        (0..n)
            .map(|i| !self.uncontrollable.contains(&i) && !(self.forbid_marker_nodes && marker.contains(i)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variant_text() {
        for v in RefinementVariant::ALL {
            assert_eq!(v.to_string().parse::<RefinementVariant>().unwrap(), v);
        }
        assert!("3".parse::<RefinementVariant>().is_err());
        assert_eq!(RefinementVariant::default(), RefinementVariant::V2);
    }

    #[test]
    fn controllable_set() {
        let m: PartialAssignment = [(1, true)].into_iter().collect();
        let mut o = ReprogrammingOptions::default();
        o.uncontrollable.insert(0);
        assert_eq!(o.controllable(3, &m), [false, true, true]);
        o.forbid_marker_nodes = true;
        assert_eq!(o.controllable(3, &m), [false, false, true]);
    }
}
