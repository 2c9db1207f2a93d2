//! Runs are reproducible and their metrics can be rebuilt from the log.

use std::collections::{BTreeMap, BTreeSet};

use pat_core::event::{log_to_string, parse_log};
use pat_core::{
    AccountId, ClaimStatus, Engine, Error, Event, EventRecord, Hash32, PollOutcome, ProposalKind, ListingStatus,
    TokenId,
};
use pat_sim::metrics::frame_tick;
use pat_sim::{csv_string, replay, run, scenarios, MetricsFrame, ScenarioConfig};

fn forum() -> ScenarioConfig {
    ScenarioConfig::from_toml(scenarios::FORUM2019).unwrap()
}

#[test]
fn same_config_same_log_and_metrics() {
    let a = run(&forum()).unwrap();
    let b = run(&forum()).unwrap();
    assert_eq!(a.engine.head_hash(), b.engine.head_hash());
    assert_eq!(log_to_string(a.engine.log()), log_to_string(b.engine.log()));
    assert_eq!(csv_string(&a.frames), csv_string(&b.frames));
}

#[test]
fn different_seeds_diverge() {
    let mut other = forum();
    other.seed += 1;
    assert_ne!(run(&forum()).unwrap().engine.head_hash(), run(&other).unwrap().engine.head_hash());
}

#[test]
fn replay_reproduces_the_frames_byte_for_byte() {
    for scenario in [scenarios::FORUM2019, scenarios::FREE_RIDERS] {
        let out = run(&ScenarioConfig::from_toml(scenario).unwrap()).unwrap();
        let text = log_to_string(out.engine.log());
        let records = parse_log(text.as_bytes()).unwrap();
        let (engine, frames) = replay(&records).unwrap();
        assert_eq!(engine.unwrap().head_hash(), out.engine.head_hash());
        assert_eq!(frames, out.frames);
        assert_eq!(csv_string(&frames), csv_string(&out.frames));
    }
}

#[test]
fn frames_follow_the_interval_and_end_on_the_last_tick() {
    let out = run(&forum()).unwrap();
    let ticks: Vec<u64> = out.frames.iter().map(|f| f.tick).collect();
    assert_eq!(ticks, vec![4, 9, 14, 19, 24, 29, 34, 39]);
    assert_eq!(out.frames.last().unwrap().log_head_hash, out.engine.head_hash());

    let mut odd = forum();
    odd.steps = 12;
    let ticks: Vec<u64> = run(&odd).unwrap().frames.iter().map(|f| f.tick).collect();
    assert_eq!(ticks, vec![4, 9, 11]);
}

#[test]
fn idle_single_tick_run_logs_only_genesis_and_the_tick() {
    let config = ScenarioConfig::from_toml(
        r#"
        seed = 1
        steps = 1
        [[agents]]
        count = 3
        policy.HonestClaimant = { action_prob = "0" }
        "#,
    )
    .unwrap();
    let out = run(&config).unwrap();
    let names: Vec<&str> = out.engine.log().iter().map(|r| r.event.name()).collect();
    assert_eq!(names, ["Genesis", "TimeAdvanced"]);
    assert_eq!(out.frames.len(), 1);
    let f = &out.frames[0];
    assert_eq!(
        (f.claims_submitted, f.claims_approved, f.claims_rejected, f.gov_supply),
        (0, 0, 0, 0)
    );
    assert!(f.units_minted.is_empty() && f.curated_list.is_empty() && f.rep_distribution.is_empty());
    assert!(f.pool_balances.is_empty());
}

#[test]
fn empty_log_replays_to_no_frames() {
    let (engine, frames) = replay(&[]).unwrap();
    assert!(engine.is_none());
    assert!(frames.is_empty());
    assert_eq!(csv_string(&frames).lines().count(), 1);
}

#[test]
fn tampered_log_fails_at_the_altered_record() {
    let out = run(&forum()).unwrap();
    let mut records: Vec<EventRecord> = out.engine.log().to_vec();
    let target = records
        .iter()
        .position(|r| matches!(r.event, Event::Minted { .. }) && r.seq > 50)
        .unwrap();
    if let Event::Minted { amount, .. } = &mut records[target].event {
        *amount += 1;
    }
    match replay(&records) {
        Err(pat_sim::SimError::Engine(Error::CorruptLog { seq, .. })) => assert_eq!(seq, target as u64),
        other => panic!("expected CorruptLog, got {other:?}"),
    }
}

/// Recomputes one frame's worth of numbers by reading events only.
#[derive(Default)]
struct Recount {
    submitted: u64,
    closed: BTreeMap<u64, ClaimStatus>,
    minted: BTreeMap<TokenId, u64>,
    rep: BTreeMap<AccountId, u64>,
    gov: u64,
    pools: BTreeMap<TokenId, u64>,
    listed: BTreeSet<TokenId>,
    pending_kind: BTreeMap<TokenId, ProposalKind>,
    poll_target: BTreeMap<u64, (TokenId, Option<ProposalKind>)>,
}

impl Recount {
    fn apply(&mut self, e: &Event) {
        match e {
            Event::TokenCreated { token, .. } => {
                self.minted.insert(*token, 0);
            }
            Event::ClaimSubmitted { .. } => self.submitted += 1,
            Event::ClaimClosed { claim, status, .. } => {
                self.closed.insert(claim.0, *status);
            }
            Event::Minted { token, amount, .. } => *self.minted.entry(*token).or_default() += amount,
            Event::RepAwarded { account, amount, .. } => *self.rep.entry(*account).or_default() += amount,
            Event::GovClaimed { amount, .. } => self.gov += amount,
            Event::PoolDeposited { token, amount, .. } => *self.pools.entry(*token).or_default() += amount,
            Event::PoolPaid { token, payout, .. } => *self.pools.entry(*token).or_default() -= payout,
            Event::ListingApplied { token, kind, .. } => {
                self.pending_kind.insert(*token, *kind);
            }
            Event::ListingSettled { token, status } => {
                self.pending_kind.remove(token);
                if *status == ListingStatus::Listed {
                    self.listed.insert(*token);
                } else {
                    self.listed.remove(token);
                }
            }
            Event::ChallengeOpened { token, poll, .. } => {
                self.poll_target.insert(poll.0, (*token, self.pending_kind.remove(token)));
            }
            Event::PollResolved { poll, resolution } => {
                let (token, kind) = self.poll_target[&poll.0];
                let listing_side_wins = resolution.outcome == PollOutcome::ListingWins;
                let listed = match kind {
                    Some(ProposalKind::RemoveFromList) => !listing_side_wins,
                    _ => listing_side_wins,
                };
                if listed {
                    self.listed.insert(token);
                } else {
                    self.listed.remove(&token);
                }
            }
            _ => {}
        }
    }

    fn frame(&self, tick: u64, head: Hash32) -> MetricsFrame {
        let count = |s| self.closed.values().filter(|v| **v == s).count() as u64;
        MetricsFrame {
            tick,
            claims_submitted: self.submitted,
            claims_approved: count(ClaimStatus::Approved),
            claims_rejected: count(ClaimStatus::Rejected),
            units_minted: self.minted.iter().filter(|(t, _)| !t.is_system()).map(|(t, v)| (*t, *v)).collect(),
            curated_list: self.listed.iter().copied().collect(),
            rep_distribution: self.rep.iter().filter(|(_, v)| **v > 0).map(|(a, v)| (*a, *v)).collect(),
            gov_supply: self.gov,
            pool_balances: self.pools.clone(),
            log_head_hash: head,
        }
    }
}

#[test]
fn every_frame_matches_an_independent_recount() {
    for scenario in [scenarios::FORUM2019, scenarios::FREE_RIDERS] {
        let out = run(&ScenarioConfig::from_toml(scenario).unwrap()).unwrap();
        let run_info = out.engine.run_info().cloned();
        let mut recount = Recount::default();
        let mut frames = Vec::new();
        for record in out.engine.log() {
            recount.apply(&record.event);
            if let Some(tick) = frame_tick(record, run_info.as_ref()) {
                frames.push(recount.frame(tick, record.hash));
            }
        }
        assert_eq!(frames, out.frames);
    }
}

#[test]
fn forum_run_exercises_curation() {
    let out = run(&forum()).unwrap();
    let names: BTreeSet<&str> = out.engine.log().iter().map(|r| r.event.name()).collect();
    for name in ["ListingApplied", "ChallengeOpened", "VoteCommitted", "VoteRevealed", "PollResolved", "GovDelegated"]
    {
        assert!(names.contains(name), "no {name} in the forum run");
    }
    assert!(!out.frames.last().unwrap().curated_list.is_empty());
    let _ = Engine::replay(out.engine.log()).unwrap();
}
