//! Playing a scenario.
//!
//! Each tick, the team creates its designs (tick 0 only), then every agent
//! acts once in agent-number order, then the clock advances by one tick.
//! Agent attempts that the engine refuses (not enough GOV, a closed poll, a
//! forged signature) leave no trace in the log; only accepted operations are
//! recorded.

use std::collections::{BTreeMap, BTreeSet};

use pat_core::{
    commit_hash, sha256, AccountId, Attestation, AttestationPayload, ClaimId, ClaimStatus, Comparator, CuratedStatus,
    Engine, Hash32, ListingStatus, OracleSigner, PollId, PollOutcome, ProposalKind, RunInfo, Salt, SlotStatus,
    TokenFilter, TokenId, VerifierSpec, VoteChoice,
};

use crate::config::{
    agent_account, oracle_signer, team_account, AgentPolicy, BadProof, ScenarioConfig, ValueRange, VoteRule,
};
use crate::error::SimResult;
use crate::prob::Probability;
use crate::metrics::{frame_tick, MetricsFrame};
use crate::rng::SimRng;

/// Metres per degree of latitude on the verifier's sphere, rounded.
const METRES_PER_DEGREE: i64 = 111_195;
const MAX_LAT_E7: i64 = 900_000_000;

/// What the simulator knows about each claim beyond the log.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroundTruth {
    /// Whether the claimed action actually happened.
    pub performed: BTreeMap<ClaimId, bool>,
    /// Claims submitted by free riders.
    pub free_rider_claims: BTreeSet<ClaimId>,
}

#[derive(Debug)]
pub struct RunOutput {
    pub engine: Engine,
    pub frames: Vec<MetricsFrame>,
    pub truth: GroundTruth,
}

/// Headline numbers of a finished run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunSummary {
    pub tokens: u64,
    pub claims_submitted: u64,
    pub claims_approved: u64,
    pub claims_rejected: u64,
    pub claims_open: u64,
    pub free_rider_claims: u64,
    pub free_rider_approved: u64,
    pub listed_tokens: u64,
    pub gov_supply: u64,
    pub log_records: u64,
    pub head_hash: Hash32,
}

impl RunSummary {
    /// Approved claims over submitted claims; zero when nothing was submitted.
    pub fn approval_ratio(&self) -> f64 {
        if self.claims_submitted == 0 {
            0.0
        } else {
            self.claims_approved as f64 / self.claims_submitted as f64
        }
    }
}

impl RunOutput {
    pub fn summary(&self) -> RunSummary {
        let claims = self.engine.claims();
        let count = |s| claims.iter().filter(|c| c.status == s).count() as u64;
        let free_rider_approved = claims
            .iter()
            .filter(|c| c.status == ClaimStatus::Approved && self.truth.free_rider_claims.contains(&c.id))
            .count() as u64;
        let approved = count(ClaimStatus::Approved);
        let rejected = count(ClaimStatus::Rejected);
        RunSummary {
            tokens: self.engine.token_count() as u64,
            claims_submitted: claims.len() as u64,
            claims_approved: approved,
            claims_rejected: rejected,
            claims_open: claims.len() as u64 - approved - rejected,
            free_rider_claims: self.truth.free_rider_claims.len() as u64,
            free_rider_approved,
            listed_tokens: self.engine.list_tokens(TokenFilter::CuratedOnly).len() as u64,
            gov_supply: self.engine.total_supply(TokenId::GOV).unwrap_or(0),
            log_records: self.engine.log().len() as u64,
            head_hash: self.engine.head_hash(),
        }
    }
}

/// Plays `config` to the end.
pub fn run(config: &ScenarioConfig) -> SimResult<RunOutput> {
    config.validate()?;
    let run_info = RunInfo {
        scenario: config.name.clone(),
        seed: config.seed,
        steps: config.steps,
        metrics_interval: config.metrics_interval,
    };
    let engine = Engine::with_run_info(config.engine_params(), Some(run_info))?;
    let policies: Vec<AgentPolicy> = config.agent_policies().into_iter().cloned().collect();
    let curators: Vec<AccountId> = policies
        .iter()
        .enumerate()
        .filter(|(_, p)| matches!(p, AgentPolicy::Curator { .. }))
        .map(|(i, _)| agent_account(i))
        .collect();
    let mut sim = Sim {
        config,
        engine,
        rng: SimRng::new(config.seed),
        truth: GroundTruth::default(),
        votes: BTreeMap::new(),
        curators,
        signers: BTreeMap::new(),
    };
    let mut frames = Vec::new();
    for tick in 0..config.steps {
        if tick == 0 {
            sim.create_team_designs()?;
        }
        for (index, policy) in policies.iter().enumerate() {
            sim.act(index, policy, tick)?;
        }
        sim.engine.advance_time(1)?;
        let record = sim.engine.log().last().expect("the log has a genesis record");
        if let Some(t) = frame_tick(record, sim.engine.run_info()) {
            frames.push(MetricsFrame::capture(&sim.engine, t, record.hash));
        }
    }
    Ok(RunOutput { engine: sim.engine, frames, truth: sim.truth })
}

/// The key a forging free rider signs with. No verifier ever names it.
fn forger_signer(agent: usize) -> OracleSigner {
    OracleSigner::from_seed(sha256(format!("forger:{agent}").as_bytes()).0)
}

struct Sim<'c> {
    config: &'c ScenarioConfig,
    engine: Engine,
    rng: SimRng,
    truth: GroundTruth,
    /// Committed votes awaiting reveal.
    votes: BTreeMap<(AccountId, PollId), (VoteChoice, Salt)>,
    curators: Vec<AccountId>,
    signers: BTreeMap<usize, OracleSigner>,
}

/// A slot an agent can act on.
struct Task {
    claim: ClaimId,
    index: u32,
    spec: VerifierSpec,
    performed: bool,
}

impl Sim<'_> {
    fn create_team_designs(&mut self) -> SimResult<()> {
        for p in self.config.creation_plan().into_iter().filter(|p| p.creator.is_none()) {
            let design = self.config.resolve_design(p.design)?;
            self.engine.create_token(team_account(), design)?;
        }
        Ok(())
    }

    fn act(&mut self, index: usize, policy: &AgentPolicy, tick: u64) -> SimResult<()> {
        let me = agent_account(index);
        match policy {
            AgentPolicy::HonestClaimant { action_prob, targets } => {
                if self.rng.chance(*action_prob) {
                    self.claim(me, targets, None);
                }
            }
            AgentPolicy::FreeRider { claim_prob, strategy, targets } => {
                if self.rng.chance(*claim_prob) {
                    self.claim(me, targets, Some((*strategy, index)));
                }
            }
            AgentPolicy::Creator { create_tick, delegate_to_curators, .. } => {
                if tick == *create_tick {
                    for p in self.config.creation_plan().into_iter().filter(|p| p.creator == Some(index)) {
                        let design = self.config.resolve_design(p.design)?;
                        self.engine.create_token(me, design)?;
                    }
                }
                if tick >= *create_tick {
                    let _ = self.engine.claim_gov(me);
                    if *delegate_to_curators {
                        self.lend_to_curators(me);
                    }
                }
            }
            AgentPolicy::Approver { honesty_prob } => self.approve(me, *honesty_prob),
            AgentPolicy::Oracle { measurement } => self.measure(index, *measurement),
            AgentPolicy::Curator { apply_prob, challenge_prob, vote_rule } => {
                self.curate(me, *apply_prob, *challenge_prob, *vote_rule)
            }
        }
        Ok(())
    }

    fn claimable(&self, targets: &[TokenId]) -> Vec<TokenId> {
        self.engine
            .list_tokens(TokenFilter::All)
            .into_iter()
            .filter(|t| t.design.is_claimable() && (targets.is_empty() || targets.contains(&t.id)))
            .map(|t| t.id)
            .collect()
    }

    /// Submits a claim on a random target and supplies the claimant's own
    /// evidence. `rider` is set for a free rider: its strategy and agent number.
    fn claim(&mut self, me: AccountId, targets: &[TokenId], rider: Option<(BadProof, usize)>) {
        let candidates = self.claimable(targets);
        let Some(&token) = self.rng.pick(&candidates) else { return };
        let Ok(claim) = self.engine.submit_claim(me, token, 1) else { return };
        self.truth.performed.insert(claim, rider.is_none());
        if rider.is_some() {
            self.truth.free_rider_claims.insert(claim);
        }
        let strategy = rider.map(|(s, _)| s);
        let verifiers = self.engine.get_token(token).expect("claimed token exists").design.verifiers.clone();
        for (i, spec) in verifiers.iter().enumerate() {
            let index = i as u32;
            let payload = match (spec, strategy) {
                (VerifierSpec::AttachmentHash, None) => {
                    AttestationPayload::Attachment { digest: sha256(format!("evidence:{claim}:{me}").as_bytes()) }
                }
                (VerifierSpec::AttachmentHash, Some(BadProof::FakeAttachment | BadProof::Forge)) => {
                    AttestationPayload::Attachment { digest: sha256(format!("made-up:{claim}:{me}").as_bytes()) }
                }
                (VerifierSpec::DesignatedApprover { .. }, Some(BadProof::Forge)) => {
                    AttestationPayload::Approval { approver: me, approve: true }
                }
                (VerifierSpec::PeerQuorum { .. }, Some(BadProof::Forge)) => {
                    AttestationPayload::Endorsement { attestor: me, endorse: true }
                }
                (VerifierSpec::SensorOracle { threshold, .. }, Some(BadProof::Forge)) => {
                    let forger = forger_signer(rider.map_or(0, |(_, n)| n));
                    let att = forger.measurement(claim, index, *threshold);
                    let _ = self.engine.submit_attestation(&att);
                    continue;
                }
                (VerifierSpec::Location { center_lat_e7, center_lon_e7, .. }, Some(BadProof::Forge)) => {
                    let forger = forger_signer(rider.map_or(0, |(_, n)| n));
                    let att = forger.coordinate(claim, index, *center_lat_e7, *center_lon_e7);
                    let _ = self.engine.submit_attestation(&att);
                    continue;
                }
                _ => continue,
            };
            let _ = self.engine.submit_attestation(&Attestation { claim, verifier_index: index, payload });
        }
    }


    /// Pending slots on open claims that `wants` selects.
    fn tasks(&self, wants: impl Fn(&VerifierSpec, &pat_core::Claim, usize) -> bool) -> Vec<Task> {
        let mut out = Vec::new();
        for c in self.engine.claims().iter().filter(|c| c.is_open()) {
            let design = &self.engine.get_token(c.token).expect("claimed token exists").design;
            for (i, spec) in design.verifiers.iter().enumerate() {
                if c.slots[i] == SlotStatus::Pending && wants(spec, c, i) {
                    out.push(Task {
                        claim: c.id,
                        index: i as u32,
                        spec: spec.clone(),
                        performed: self.truth.performed.get(&c.id).copied().unwrap_or(false),
                    });
                }
            }
        }
        out
    }

    fn approve(&mut self, me: AccountId, honesty: Probability) {
        let tasks = self.tasks(|spec, claim, i| match spec {
            VerifierSpec::DesignatedApprover { approver } => *approver == me,
            VerifierSpec::PeerQuorum { attestors, .. } => {
                attestors.contains(&me) && !claim.endorsements[i].contains_key(&me)
            }
            _ => false,
        });
        for task in tasks {
            let verdict = if self.rng.chance(honesty) { task.performed } else { !task.performed };
            let payload = match task.spec {
                VerifierSpec::DesignatedApprover { .. } => AttestationPayload::Approval { approver: me, approve: verdict },
                _ => AttestationPayload::Endorsement { attestor: me, endorse: verdict },
            };
            let _ = self.engine.submit_attestation(&Attestation { claim: task.claim, verifier_index: task.index, payload });
        }
    }

    fn measure(&mut self, index: usize, range: ValueRange) {
        let signer = self.signers.entry(index).or_insert_with(|| oracle_signer(index)).clone();
        let key = signer.public_key();
        let tasks = self.tasks(|spec, _, _| match spec {
            VerifierSpec::SensorOracle { oracle_key, .. } | VerifierSpec::Location { oracle_key, .. } => {
                *oracle_key == key
            }
            _ => false,
        });
        for task in tasks {
            let att = match task.spec {
                VerifierSpec::SensorOracle { comparator, threshold, .. } => {
                    let value = if task.performed {
                        self.rng.in_range(range.lo, range.hi)
                    } else {
                        match comparator {
                            Comparator::AtLeast => threshold.saturating_sub(1),
                            Comparator::AtMost => threshold.saturating_add(1),
                        }
                    };
                    signer.measurement(task.claim, task.index, value)
                }
                VerifierSpec::Location { center_lat_e7, center_lon_e7, radius_m, .. } => {
                    let metres = if task.performed {
                        self.rng.in_range(range.lo, range.hi).max(0)
                    } else {
                        i64::try_from(radius_m).unwrap_or(i64::MAX / 4).saturating_mul(2).saturating_add(1000)
                    };
                    let offset = metres.saturating_mul(10_000_000) / METRES_PER_DEGREE;
                    let lat = center_lat_e7.saturating_add(offset).min(MAX_LAT_E7);
                    signer.coordinate(task.claim, task.index, lat, center_lon_e7)
                }
                _ => continue,
            };
            let _ = self.engine.submit_attestation(&att);
        }
    }

    /// Lends all free GOV evenly to the curators; the first curators get one
    /// more unit each when it does not divide.
    fn lend_to_curators(&mut self, me: AccountId) {
        if self.curators.is_empty() {
            return;
        }
        let owned = self.engine.gov_of(&me);
        let free = self.engine.gov().free_owned(&me, owned).unwrap_or(0);
        let n = self.curators.len() as u64;
        let (share, extra) = (free / n, free % n);
        for (i, curator) in self.curators.clone().into_iter().enumerate() {
            let amount = share + u64::from((i as u64) < extra);
            let _ = self.engine.delegate_gov(me, curator, amount);
        }
    }

    /// A token deserves listing when at least half its closed claims were
    /// approved, or none have closed yet.
    fn worthy(&self, token: TokenId) -> bool {
        let (mut approved, mut closed) = (0u64, 0u64);
        for c in self.engine.claims().iter().filter(|c| c.token == token) {
            match c.status {
                ClaimStatus::Approved => {
                    approved += 1;
                    closed += 1;
                }
                ClaimStatus::Rejected => closed += 1,
                ClaimStatus::Open => {}
            }
        }
        2 * approved >= closed
    }

    fn curate(&mut self, me: AccountId, apply_prob: Probability, challenge_prob: Probability, rule: VoteRule) {
        let _ = self.engine.claim_gov(me);
        let now = self.engine.now();

        let expired: Vec<TokenId> = self
            .engine
            .listings()
            .filter(|l| matches!(l.status, ListingStatus::Applied { deadline } if now >= deadline))
            .map(|l| l.token)
            .collect();
        for token in expired {
            let _ = self.engine.touch_listing(token);
        }

        let polls: Vec<(PollId, TokenId, bool, bool, bool)> = self
            .engine
            .polls()
            .iter()
            .filter(|p| p.outcome == PollOutcome::Unresolved)
            .map(|p| {
                (p.id, p.token, now >= p.reveal_deadline, now >= p.commit_deadline, p.commits.contains_key(&me))
            })
            .collect();
        let min_deposit = self.engine.params().tcr.min_deposit;
        for (poll, token, ended, commit_closed, committed) in polls {
            if ended {
                let _ = self.engine.resolve_poll(poll);
                self.votes.remove(&(me, poll));
            } else if commit_closed {
                if let Some((choice, salt)) = self.votes.remove(&(me, poll)) {
                    let _ = self.engine.reveal_vote(me, poll, choice, salt);
                }
            } else if !committed && rule != VoteRule::Abstain {
                let stake = self.engine.effective_gov(&me).min(min_deposit);
                if stake == 0 {
                    continue;
                }
                let keep = self.worthy(token) == (rule == VoteRule::Truthful);
                let choice = if keep { VoteChoice::For } else { VoteChoice::Against };
                let salt = Salt(self.rng.bytes32());
                if self.engine.commit_vote(me, poll, commit_hash(choice, &salt, poll), stake).is_ok() {
                    self.votes.insert((me, poll), (choice, salt));
                }
            }
        }

        if self.rng.chance(apply_prob) {
            let candidates: Vec<TokenId> = self
                .engine
                .list_tokens(TokenFilter::All)
                .into_iter()
                .filter(|t| t.curated_status == CuratedStatus::NotListed)
                .filter(|t| !self.engine.listing(t.id).is_some_and(|l| l.is_active()))
                .map(|t| t.id)
                .collect();
            if let Some(&token) = self.rng.pick(&candidates) {
                let _ = self.engine.apply_listing(me, token, ProposalKind::AddToList);
            }
        }

        if self.rng.chance(challenge_prob) {
            let candidates: Vec<TokenId> = self
                .engine
                .listings()
                .filter(|l| matches!(l.status, ListingStatus::Applied { deadline } if now < deadline))
                .filter(|l| l.applicant != me)
                .map(|l| l.token)
                .filter(|t| match rule {
                    VoteRule::Truthful => !self.worthy(*t),
                    VoteRule::Contrarian => self.worthy(*t),
                    VoteRule::Abstain => true,
                })
                .collect();
            if let Some(&token) = self.rng.pick(&candidates) {
                let _ = self.engine.challenge(me, token);
            }
        }
    }
}
