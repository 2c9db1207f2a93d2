//! The append-only, hash-chained event log.
//!
//! Each record hashes as
//! `SHA-256(prev_hash_hex || event_json || decimal(seq) || "@" || decimal(time))`,
//! where `event_json` is the canonical serialization of the event: compact
//! JSON, fields in declaration order, integers in base 10, byte strings as
//! lowercase hex and enum variants tagged by name. Record 0 chains from 64
//! zero hex digits.
//!
//! On disk a log is one record per line, each line the canonical JSON of
//! `{"seq","prev_hash","time","event","hash"}`. A line that parses but is not
//! in canonical form counts as tampered.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::amount::Amount;
use crate::claim::ClaimStatus;
use crate::error::{Error, Result};
use crate::ids::{AccountId, ClaimId, Hash32, LogicalTime, PollId, Salt, TokenId};
use crate::params::EngineParams;
use crate::reputation::RepReason;
use crate::tcr::{ListingStatus, ProposalKind, Resolution, VoteChoice};
use crate::token::TokenDesign;
use crate::verifier::{AttestationPayload, SlotStatus};

/// Simulation metadata carried by the genesis record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunInfo {
    pub scenario: String,
    pub seed: u64,
    pub steps: u64,
    pub metrics_interval: u64,
}

/// One state change. Applying the events of a log in order, starting from an
/// empty engine, rebuilds the engine exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "A: Amount")]
pub enum Event<A> {
    Genesis { params: EngineParams<A>, run: Option<RunInfo> },
    TimeAdvanced { ticks: u64, now: LogicalTime },

    TokenCreated { token: TokenId, creator: AccountId, design: TokenDesign<A> },
    Transferred { token: TokenId, from: AccountId, to: AccountId, amount: A },
    Minted { token: TokenId, to: AccountId, amount: A },
    Burned { token: TokenId, from: AccountId, amount: A },

    ClaimSubmitted { claim: ClaimId, claimant: AccountId, token: TokenId, quantity: A },
    /// A slot decided from engine state at submission.
    SlotDecided { claim: ClaimId, verifier_index: u32, status: SlotStatus },
    /// An accepted attestation and the slot status it produced.
    AttestationRecorded { claim: ClaimId, verifier_index: u32, payload: AttestationPayload, status: SlotStatus },
    ClaimMintFailed { claim: ClaimId, reason: String },
    ClaimClosed { claim: ClaimId, status: ClaimStatus, minted: A },

    RepAwarded { account: AccountId, reason: RepReason, amount: A },
    GovClaimed { account: AccountId, amount: A },
    GovDelegated { from: AccountId, to: AccountId, amount: A },
    DelegationRevoked { from: AccountId, to: AccountId, amount: A },

    ListingApplied { token: TokenId, applicant: AccountId, kind: ProposalKind, deposit: A, deadline: LogicalTime },
    /// An unchallenged application ran out its stage; the deposit is returned.
    ListingSettled { token: TokenId, status: ListingStatus },
    ChallengeOpened {
        token: TokenId,
        poll: PollId,
        challenger: AccountId,
        deposit: A,
        commit_deadline: LogicalTime,
        reveal_deadline: LogicalTime,
    },
    VoteCommitted { poll: PollId, voter: AccountId, commit_hash: Hash32, stake: A },
    VoteRevealed { poll: PollId, voter: AccountId, choice: VoteChoice, salt: Salt },
    PollResolved { poll: PollId, resolution: Resolution<A> },

    PoolDeposited { token: TokenId, depositor: AccountId, amount: A },
    /// Pays `payout` backing units from the pool to `holder`.
    PoolPaid { token: TokenId, holder: AccountId, payout: A },
}

impl<A: Amount> Event<A> {
    pub fn name(&self) -> &'static str {
        match self {
            Event::Genesis { .. } => "Genesis",
            Event::TimeAdvanced { .. } => "TimeAdvanced",
            Event::TokenCreated { .. } => "TokenCreated",
            Event::Transferred { .. } => "Transferred",
            Event::Minted { .. } => "Minted",
            Event::Burned { .. } => "Burned",
            Event::ClaimSubmitted { .. } => "ClaimSubmitted",
            Event::SlotDecided { .. } => "SlotDecided",
            Event::AttestationRecorded { .. } => "AttestationRecorded",
            Event::ClaimMintFailed { .. } => "ClaimMintFailed",
            Event::ClaimClosed { .. } => "ClaimClosed",
            Event::RepAwarded { .. } => "RepAwarded",
            Event::GovClaimed { .. } => "GovClaimed",
            Event::GovDelegated { .. } => "GovDelegated",
            Event::DelegationRevoked { .. } => "DelegationRevoked",
            Event::ListingApplied { .. } => "ListingApplied",
            Event::ListingSettled { .. } => "ListingSettled",
            Event::ChallengeOpened { .. } => "ChallengeOpened",
            Event::VoteCommitted { .. } => "VoteCommitted",
            Event::VoteRevealed { .. } => "VoteRevealed",
            Event::PollResolved { .. } => "PollResolved",
            Event::PoolDeposited { .. } => "PoolDeposited",
            Event::PoolPaid { .. } => "PoolPaid",
        }
    }

    pub fn canonical_bytes(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("events always serialize")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "A: Amount")]
#[serde(deny_unknown_fields)]
pub struct EventRecord<A> {
    pub seq: u64,
    pub prev_hash: Hash32,
    pub time: LogicalTime,
    pub event: Event<A>,
    pub hash: Hash32,
}

pub fn record_hash(prev_hash: &Hash32, event_bytes: &[u8], seq: u64, time: LogicalTime) -> Hash32 {
    let mut buf = Vec::with_capacity(64 + event_bytes.len() + 24);
    buf.extend_from_slice(prev_hash.to_hex().as_bytes());
    buf.extend_from_slice(event_bytes);
    buf.extend_from_slice(seq.to_string().as_bytes());
    buf.push(b'@');
    buf.extend_from_slice(time.0.to_string().as_bytes());
    crate::ids::sha256(&buf)
}

impl<A: Amount> EventRecord<A> {
    /// Seals `event` as record `seq` after `prev_hash`.
    pub fn seal(seq: u64, prev_hash: Hash32, time: LogicalTime, event: Event<A>) -> Self {
        let hash = record_hash(&prev_hash, &event.canonical_bytes(), seq, time);
        Self { seq, prev_hash, time, event, hash }
    }

    pub fn recompute_hash(&self) -> Hash32 {
        record_hash(&self.prev_hash, &self.event.canonical_bytes(), self.seq, self.time)
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("records always serialize")
    }
}

/// Outcome of checking a log.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verification {
    Intact,
    /// Position of the first record that fails to recompute or chain.
    FirstBad(u64),
}

impl Verification {
    pub fn is_intact(self) -> bool {
        self == Verification::Intact
    }
}

/// Checks that every record's hash recomputes, that seqs run 0, 1, 2, … and
/// that each record chains from its predecessor.
pub fn verify_log<A: Amount>(records: &[EventRecord<A>]) -> Verification {
    let mut prev = Hash32::ZERO;
    for (i, r) in records.iter().enumerate() {
        let i = i as u64;
        if r.seq != i || r.prev_hash != prev || r.recompute_hash() != r.hash {
            return Verification::FirstBad(i);
        }
        prev = r.hash;
    }
    Verification::Intact
}

fn lines(bytes: &[u8]) -> impl Iterator<Item = &[u8]> {
    let body = bytes.strip_suffix(b"\n").unwrap_or(bytes);
    let empty = body.is_empty() && bytes.len() <= 1;
    body.split(|b| *b == b'\n').filter(move |_| !empty)
}

fn parse_line<A: Amount>(line: &[u8]) -> std::result::Result<EventRecord<A>, String> {
    let text = std::str::from_utf8(line).map_err(|e| e.to_string())?;
    let record: EventRecord<A> = serde_json::from_str(text).map_err(|e| e.to_string())?;
    if record.to_line() != text {
        return Err("record is not in canonical form".into());
    }
    Ok(record)
}

/// Checks a log file's bytes. Lines that are not valid UTF-8, do not parse or
/// are not canonical count as bad at their position.
pub fn verify_log_bytes<A: Amount>(bytes: &[u8]) -> Verification {
    let mut records = Vec::new();
    let mut parse_failure = None;
    for (i, line) in lines(bytes).enumerate() {
        match parse_line::<A>(line) {
            Ok(r) => records.push(r),
            Err(_) => {
                parse_failure = Some(i as u64);
                break;
            }
        }
    }
    match (verify_log(&records), parse_failure) {
        (Verification::FirstBad(i), _) => Verification::FirstBad(i),
        (Verification::Intact, Some(i)) => Verification::FirstBad(i),
        (Verification::Intact, None) => Verification::Intact,
    }
}

/// Parses and verifies a log file.
pub fn parse_log<A: Amount>(bytes: &[u8]) -> Result<Vec<EventRecord<A>>> {
    let mut records = Vec::new();
    for (i, line) in lines(bytes).enumerate() {
        let r = parse_line::<A>(line).map_err(|detail| Error::CorruptLog { seq: i as u64, detail })?;
        records.push(r);
    }
    match verify_log(&records) {
        Verification::Intact => Ok(records),
        Verification::FirstBad(seq) => Err(Error::CorruptLog { seq, detail: "hash chain broken".into() }),
    }
}

pub fn write_log<A: Amount, W: Write>(records: &[EventRecord<A>], mut out: W) -> std::io::Result<()> {
    for r in records {
        out.write_all(r.to_line().as_bytes())?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn log_to_string<A: Amount>(records: &[EventRecord<A>]) -> String {
    let mut s = String::new();
    for r in records {
        s.push_str(&r.to_line());
        s.push('\n');
    }
    s
}
