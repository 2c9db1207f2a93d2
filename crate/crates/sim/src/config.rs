//! Scenario files.
//!
//! A scenario is a TOML document:
//!
//! ```toml
//! name = "demo"
//! seed = 7
//! steps = 30
//! metrics_interval = 10      # a metrics frame every 10 ticks, plus the last
//!
//! [rep]                      # optional, see RepConfig
//! rep_per_claim = 10
//! [tcr]                      # optional, see TcrParams
//! min_deposit = 5
//!
//! [[designs]]
//! name = "Litter picked"
//! symbol = "LIT"
//! verifiers = [{ DesignatedApprover = { approver = 1 } }]
//!
//! [[agents]]
//! count = 1
//! policy.HonestClaimant = { action_prob = "1/2" }
//! [[agents]]
//! count = 1
//! policy.Approver = { honesty_prob = "1" }
//! ```
//!
//! Agents are numbered from 0 in file order, groups expanded by `count`.
//! Agent `i` acts as the account whose last eight bytes are `i + 1`
//! big-endian (see [`agent_account`]), so agents act in number order.
//! Designs refer to agents by number: approvers and peer attestors must be
//! `Approver` agents, oracles must be `Oracle` agents.
//!
//! Designs not named by any `Creator` are created by the team account at
//! tick 0, in file order, before any agent acts. Token ids follow creation
//! order: team designs first, then creator designs by tick, agent number
//! and position in the creator's list. Token references inside designs
//! (balance thresholds, backing) use those ids.

use std::collections::BTreeMap;

use pat_core::{
    sha256, validate_design, AccountId, BackingSpec, Comparator, CreationCondition, EngineParams, MintingPolicy,
    OracleSigner, RepConfig, Supply, TcrParams, TokenDesign, TokenId, UnconditionalCreation, VerifierSpec,
};
use serde::{Deserialize, Serialize};

use crate::error::{SimError, SimResult};
use crate::prob::Probability;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub name: String,
    pub seed: u64,
    /// Number of ticks to play.
    pub steps: u64,
    #[serde(default = "one")]
    pub metrics_interval: u64,
    #[serde(default)]
    pub rep: RepConfig,
    #[serde(default)]
    pub tcr: TcrParams,
    #[serde(default)]
    pub designs: Vec<DesignTemplate>,
    #[serde(default)]
    pub agents: Vec<AgentGroup>,
}

fn one() -> u64 {
    1
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentGroup {
    pub count: u32,
    pub policy: AgentPolicy,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub enum AgentPolicy {
    /// Performs the action and claims for it. An empty `targets` list means
    /// every claimable token.
    HonestClaimant {
        action_prob: Probability,
        #[serde(default)]
        targets: Vec<TokenId>,
    },
    /// Claims without performing the action.
    FreeRider {
        claim_prob: Probability,
        #[serde(default)]
        strategy: BadProof,
        #[serde(default)]
        targets: Vec<TokenId>,
    },
    /// Creates the listed designs (indices into `designs`) at `create_tick`.
    /// Afterwards it claims the GOV its REP earns and, if asked, lends it
    /// evenly to the curators.
    Creator {
        designs: Vec<usize>,
        create_tick: u64,
        #[serde(default = "yes")]
        delegate_to_curators: bool,
    },
    /// Decides approval and peer-endorsement slots assigned to it. With
    /// probability `honesty_prob` the decision matches what actually
    /// happened; otherwise it is the opposite.
    Approver { honesty_prob: Probability },
    Curator {
        apply_prob: Probability,
        challenge_prob: Probability,
        vote_rule: VoteRule,
    },
    /// Signs sensor and location readings for slots naming its key. For an
    /// action that happened the reading is uniform in `measurement`; for one
    /// that did not, it is a failing reading.
    Oracle { measurement: ValueRange },
}

impl AgentPolicy {
    pub fn kind(&self) -> &'static str {
        match self {
            AgentPolicy::HonestClaimant { .. } => "HonestClaimant",
            AgentPolicy::FreeRider { .. } => "FreeRider",
            AgentPolicy::Creator { .. } => "Creator",
            AgentPolicy::Approver { .. } => "Approver",
            AgentPolicy::Curator { .. } => "Curator",
            AgentPolicy::Oracle { .. } => "Oracle",
        }
    }
}

/// How a free rider tries to get past the verifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum BadProof {
    /// Submits the claim and nothing else.
    #[default]
    NoProof,
    /// Also fills attachment slots with a made-up digest.
    FakeAttachment,
    /// Also approves its own claim and signs passing readings with its own
    /// key. The engine rejects these; the attempt is still made.
    Forge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VoteRule {
    /// Votes to keep a listing when at least half of the token's closed
    /// claims were approved.
    Truthful,
    Contrarian,
    Abstain,
}

/// Inclusive integer range. For location slots the reading is a distance
/// north of the centre, in metres.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValueRange {
    pub lo: i64,
    pub hi: i64,
}

/// An account named in a design: an agent number or `"team"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AccountRef {
    Agent(usize),
    Team(TeamTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TeamTag {
    Team,
}

/// A token design whose accounts and oracle keys are given as agent numbers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignTemplate {
    pub name: String,
    pub symbol: String,
    #[serde(default = "uncapped")]
    pub supply: Supply,
    #[serde(default = "yes")]
    pub burnable: bool,
    #[serde(default = "yes")]
    pub transferable: bool,
    #[serde(default)]
    pub creation_condition: CreationCondition,
    #[serde(default)]
    pub pre_mint: PreMint,
    #[serde(default = "one_per_claim")]
    pub minting_policy: MintingPolicy,
    #[serde(default)]
    pub verifiers: Vec<VerifierTemplate>,
    #[serde(default)]
    pub sources_of_value: Vec<BackingSpec>,
}

fn uncapped() -> Supply {
    Supply::Uncapped
}

fn one_per_claim() -> MintingPolicy {
    MintingPolicy::FixedPerClaim { n: 1 }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub enum PreMint {
    #[default]
    None,
    Partial { amount: u64, to: AccountRef },
    All { amount: u64, to: AccountRef },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub enum VerifierTemplate {
    DesignatedApprover { approver: usize },
    PeerQuorum { attestors: Vec<usize>, k: u32 },
    SensorOracle { oracle: usize, comparator: Comparator, threshold: i64 },
    Location { center_lat_e7: i64, center_lon_e7: i64, radius_m: u64, oracle: usize },
    TokenBalanceThreshold { token: TokenId, min_balance: u64 },
    ClaimWindow { max_claims: u32, per_ticks: u64 },
    AttachmentHash,
}

/// Account of agent number `index`.
pub fn agent_account(index: usize) -> AccountId {
    let mut bytes = [0u8; 32];
    bytes[24..].copy_from_slice(&(index as u64 + 1).to_be_bytes());
    AccountId(bytes)
}

/// The account that creates the pre-seeded designs.
pub fn team_account() -> AccountId {
    AccountId::derive("team")
}

/// Signing key of oracle agent number `index`.
pub fn oracle_signer(index: usize) -> OracleSigner {
    OracleSigner::from_seed(sha256(format!("oracle:{index}").as_bytes()).0)
}

/// Who creates a design, and when.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlannedCreation {
    pub design: usize,
    pub tick: u64,
    /// `None` for the team.
    pub creator: Option<usize>,
    /// The id the token gets if every earlier creation succeeds.
    pub token: TokenId,
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> SimResult<Self> {
        let config: ScenarioConfig = toml::from_str(text).map_err(|e| SimError::config("<file>", e.message()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario configs serialize")
    }

    pub fn engine_params(&self) -> EngineParams {
        EngineParams { rep: self.rep, tcr: self.tcr, ..EngineParams::default() }
    }

    /// One policy per agent, in agent-number order.
    pub fn agent_policies(&self) -> Vec<&AgentPolicy> {
        self.agents.iter().flat_map(|g| std::iter::repeat_n(&g.policy, g.count as usize)).collect()
    }

    /// Creation order of all designs.
    pub fn creation_plan(&self) -> Vec<PlannedCreation> {
        let mut claimed = vec![false; self.designs.len()];
        let mut by_creator = Vec::new();
        for (agent, policy) in self.agent_policies().into_iter().enumerate() {
            if let AgentPolicy::Creator { designs, create_tick, .. } = policy {
                for &d in designs {
                    if let Some(c) = claimed.get_mut(d) {
                        *c = true;
                    }
                    by_creator.push((*create_tick, agent, d));
                }
            }
        }
        // Stable sort keeps each creator's own list order.
        by_creator.sort_by_key(|(tick, agent, _)| (*tick, *agent));
        let team = (0..self.designs.len()).filter(|d| !claimed[*d]).map(|d| (0, None, d));
        let creators = by_creator.into_iter().map(|(tick, agent, d)| (tick, Some(agent), d));
        team.chain(creators)
            .enumerate()
            .map(|(i, (tick, creator, design))| PlannedCreation { design, tick, creator, token: TokenId(i as u64) })
            .collect()
    }

    /// Checks everything that can be checked before running.
    pub fn validate(&self) -> SimResult<()> {
        if self.steps == 0 {
            return Err(SimError::config("steps", "must be at least 1"));
        }
        if self.metrics_interval == 0 {
            return Err(SimError::config("metrics_interval", "must be at least 1"));
        }
        self.engine_params().validate().map_err(|e| SimError::config("rep/tcr", e))?;
        let policies = self.agent_policies();
        if policies.is_empty() {
            return Err(SimError::config("agents", "at least one agent is required"));
        }
        for (g, group) in self.agents.iter().enumerate() {
            self.check_policy(&format!("agents[{g}].policy"), &group.policy)?;
        }

        let mut creators_of = vec![0usize; self.designs.len()];
        for (agent, policy) in policies.iter().enumerate() {
            if let AgentPolicy::Creator { designs, .. } = policy {
                for &d in designs {
                    let Some(count) = creators_of.get_mut(d) else {
                        return Err(SimError::config(
                            format!("agent {agent}.designs"),
                            format!("no design number {d}"),
                        ));
                    };
                    *count += 1;
                    if *count > 1 {
                        return Err(SimError::config(format!("designs[{d}]"), "named by more than one creator"));
                    }
                }
            }
        }

        for p in self.creation_plan() {
            let path = format!("designs[{}]", p.design);
            let design = self.resolve_design(p.design)?;
            if let Err(violations) = validate_design(&design) {
                let list: Vec<String> = violations.iter().map(|v| format!("{v:?}")).collect();
                return Err(SimError::config(path, list.join(", ")));
            }
            for (i, v) in design.verifiers.iter().enumerate() {
                if let VerifierSpec::TokenBalanceThreshold { token, .. } = v {
                    if !token.is_system() && *token > p.token {
                        return Err(SimError::config(
                            format!("{path}.verifiers[{i}].token"),
                            format!("token {token} does not exist yet; this design becomes token {}", p.token),
                        ));
                    }
                }
            }
            for (i, b) in design.sources_of_value.iter().enumerate() {
                if let Some(token) = b.referenced_token() {
                    if token.is_system() || token >= p.token {
                        return Err(SimError::config(
                            format!("{path}.sources_of_value[{i}]"),
                            format!("token {token} cannot back token {}", p.token),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    fn check_policy(&self, path: &str, policy: &AgentPolicy) -> SimResult<()> {
        match policy {
            AgentPolicy::Creator { create_tick, .. } if *create_tick >= self.steps => {
                Err(SimError::config(format!("{path}.Creator.create_tick"), "must be before the last tick"))
            }
            AgentPolicy::Oracle { measurement } if measurement.lo > measurement.hi => {
                Err(SimError::config(format!("{path}.Oracle.measurement"), "lo is greater than hi"))
            }
            _ => Ok(()),
        }
    }

    fn agent_of_kind(&self, path: String, index: usize, kind: &str) -> SimResult<AccountId> {
        match self.agent_policies().get(index) {
            Some(p) if p.kind() == kind => Ok(agent_account(index)),
            Some(p) => Err(SimError::config(path, format!("agent {index} is a {}, not a {kind}", p.kind()))),
            None => Err(SimError::config(path, format!("there is no agent {index}"))),
        }
    }

    fn account(&self, path: String, r: AccountRef) -> SimResult<AccountId> {
        match r {
            AccountRef::Team(_) => Ok(team_account()),
            AccountRef::Agent(i) if i < self.agent_policies().len() => Ok(agent_account(i)),
            AccountRef::Agent(i) => Err(SimError::config(path, format!("there is no agent {i}"))),
        }
    }

    /// The engine design for `designs[index]`, with agent numbers replaced by
    /// accounts and oracle keys.
    pub fn resolve_design(&self, index: usize) -> SimResult<TokenDesign> {
        let path = format!("designs[{index}]");
        let t = self.designs.get(index).ok_or_else(|| SimError::config(&path, "no such design"))?;
        let unconditional_creation = match t.pre_mint {
            PreMint::None => UnconditionalCreation::None,
            PreMint::Partial { amount, to } => {
                UnconditionalCreation::Partial { amount, to: self.account(format!("{path}.pre_mint.to"), to)? }
            }
            PreMint::All { amount, to } => {
                UnconditionalCreation::All { amount, to: self.account(format!("{path}.pre_mint.to"), to)? }
            }
        };
        let mut verifiers = Vec::with_capacity(t.verifiers.len());
        for (i, v) in t.verifiers.iter().enumerate() {
            let vp = format!("{path}.verifiers[{i}]");
            verifiers.push(match v {
                VerifierTemplate::DesignatedApprover { approver } => VerifierSpec::DesignatedApprover {
                    approver: self.agent_of_kind(format!("{vp}.approver"), *approver, "Approver")?,
                },
                VerifierTemplate::PeerQuorum { attestors, k } => VerifierSpec::PeerQuorum {
                    attestors: attestors
                        .iter()
                        .enumerate()
                        .map(|(j, a)| self.agent_of_kind(format!("{vp}.attestors[{j}]"), *a, "Approver"))
                        .collect::<SimResult<_>>()?,
                    k: *k,
                },
                VerifierTemplate::SensorOracle { oracle, comparator, threshold } => {
                    self.agent_of_kind(format!("{vp}.oracle"), *oracle, "Oracle")?;
                    VerifierSpec::SensorOracle {
                        oracle_key: oracle_signer(*oracle).public_key(),
                        comparator: *comparator,
                        threshold: *threshold,
                    }
                }
                VerifierTemplate::Location { center_lat_e7, center_lon_e7, radius_m, oracle } => {
                    self.agent_of_kind(format!("{vp}.oracle"), *oracle, "Oracle")?;
                    VerifierSpec::Location {
                        center_lat_e7: *center_lat_e7,
                        center_lon_e7: *center_lon_e7,
                        radius_m: *radius_m,
                        oracle_key: oracle_signer(*oracle).public_key(),
                    }
                }
                VerifierTemplate::TokenBalanceThreshold { token, min_balance } => {
                    VerifierSpec::TokenBalanceThreshold { token: *token, min_balance: *min_balance }
                }
                VerifierTemplate::ClaimWindow { max_claims, per_ticks } => {
                    VerifierSpec::ClaimWindow { max_claims: *max_claims, per_ticks: *per_ticks }
                }
                VerifierTemplate::AttachmentHash => VerifierSpec::AttachmentHash,
            });
        }
        Ok(TokenDesign {
            name: t.name.clone(),
            symbol: t.symbol.clone(),
            supply: t.supply,
            burnable: t.burnable,
            transferable: t.transferable,
            creation_condition: t.creation_condition,
            unconditional_creation,
            minting_policy: t.minting_policy,
            verifiers,
            sources_of_value: t.sources_of_value.clone(),
        })
    }

    /// Number of agents per policy kind.
    pub fn census(&self) -> BTreeMap<&'static str, usize> {
        let mut out = BTreeMap::new();
        for p in self.agent_policies() {
            *out.entry(p.kind()).or_default() += 1;
        }
        out
    }
}
