//! Engine-wide configuration. Recorded in the genesis event so a log carries
//! everything needed to replay it.

use serde::{Deserialize, Serialize};

use crate::amount::Amount;
use crate::backing::BurnSource;
use crate::error::{Error, Result};

fn n<A: Amount>(v: u64) -> A {
    A::from(v).unwrap_or_else(A::max_value)
}

/// Reputation earnings and the GOV ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "A: Amount")]
#[serde(default, deny_unknown_fields)]
pub struct RepConfig<A> {
    pub rep_per_creation: A,
    pub rep_per_claim: A,
    /// REP needed per GOV level.
    pub gov_threshold: A,
    pub gov_per_level: A,
}

impl<A: Amount> Default for RepConfig<A> {
    fn default() -> Self {
        Self { rep_per_creation: n(100), rep_per_claim: n(10), gov_threshold: n(100), gov_per_level: n(10) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "A: Amount")]
#[serde(default, deny_unknown_fields)]
pub struct TcrParams<A> {
    /// GOV locked by an applicant and again by a challenger.
    pub min_deposit: A,
    pub apply_stage_ticks: u64,
    pub commit_stage_ticks: u64,
    pub reveal_stage_ticks: u64,
    /// Share of revealed weight the listing side needs, in percent.
    pub vote_quorum_pct: u8,
    /// Share of the losing deposit paid to the winning party, in percent.
    pub dispensation_pct: u8,
}

impl<A: Amount> Default for TcrParams<A> {
    fn default() -> Self {
        Self {
            min_deposit: n(10),
            apply_stage_ticks: 100,
            commit_stage_ticks: 100,
            reveal_stage_ticks: 100,
            vote_quorum_pct: 50,
            dispensation_pct: 50,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "A: Amount")]
#[serde(default, deny_unknown_fields)]
pub struct EngineParams<A> {
    pub rep: RepConfig<A>,
    pub tcr: TcrParams<A>,
    /// Allow plain transfers of GOV (delegation works either way).
    pub gov_transferable: bool,
    pub coupled_burn_source: BurnSource,
}

impl<A: Amount> Default for EngineParams<A> {
    fn default() -> Self {
        Self {
            rep: RepConfig::default(),
            tcr: TcrParams::default(),
            gov_transferable: false,
            coupled_burn_source: BurnSource::default(),
        }
    }
}

impl<A: Amount> EngineParams<A> {
    pub fn validate(&self) -> Result<()> {
        let r = &self.rep;
        if [r.rep_per_creation, r.rep_per_claim, r.gov_threshold, r.gov_per_level]
            .iter()
            .any(|v| v.is_zero())
        {
            return Err(Error::InvalidParams("rep config values must be at least 1".into()));
        }
        let t = &self.tcr;
        if t.apply_stage_ticks == 0 || t.commit_stage_ticks == 0 || t.reveal_stage_ticks == 0 {
            return Err(Error::InvalidParams("stage lengths must be at least 1 tick".into()));
        }
        if t.vote_quorum_pct > 100 || t.dispensation_pct > 100 {
            return Err(Error::InvalidParams("percentages must be at most 100".into()));
        }
        Ok(())
    }
}
