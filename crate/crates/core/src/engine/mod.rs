//! The single-writer state machine.
//!
//! Every mutating operation runs as a transaction: it validates against the
//! current state, emits events, and each event is applied to the state as it
//! is emitted. If any step fails the state is restored from a snapshot and
//! nothing reaches the log. On success the staged events are sealed into the
//! hash chain.

mod backing_ops;
mod claims;
mod curation;
mod factory;
mod governance;
mod ledger_ops;

use std::collections::BTreeMap;

use crate::amount::{self, Amount};
use crate::backing::{custody_account, Pool};
use crate::claim::{Claim, ClaimStatus};
use crate::error::{Error, Result};
use crate::event::{verify_log, Event, EventRecord, RunInfo, Verification};
use crate::ids::{AccountId, Hash32, LogicalTime, TokenId};
use crate::ledger::Ledger;
use crate::params::EngineParams;
use crate::reputation::GovState;
use crate::tcr::{self, Listing, ListingStatus, PollOutcome, ProposalKind, TcrPoll};
use crate::token::{CuratedStatus, TokenDesign, TokenRecord};
use crate::verifier::AttestationPayload;


#[derive(Debug, Clone)]
pub(crate) struct State<A: Amount> {
    params: EngineParams<A>,
    now: LogicalTime,
    ledger: Ledger<A>,
    tokens: Vec<TokenRecord<A>>,
    claims: Vec<Claim<A>>,
    listings: BTreeMap<TokenId, Listing<A>>,
    polls: Vec<TcrPoll<A>>,
    gov: GovState<A>,
    pools: BTreeMap<TokenId, Pool<A>>,
}

fn corrupt(detail: impl Into<String>) -> Error {
    // seq is filled in by the replay loop
    Error::CorruptLog { seq: u64::MAX, detail: detail.into() }
}

impl<A: Amount> State<A> {
    fn empty() -> Self {
        Self {
            params: EngineParams::default(),
            now: LogicalTime(0),
            ledger: Ledger::default(),
            tokens: Vec::new(),
            claims: Vec::new(),
            listings: BTreeMap::new(),
            polls: Vec::new(),
            gov: GovState::default(),
            pools: BTreeMap::new(),
        }
    }

    pub(crate) fn design(&self, token: TokenId) -> Result<&TokenDesign<A>> {
        self.tokens.get(token.0 as usize).map(|r| &r.design).ok_or(Error::UnknownToken(token))
    }

    fn token_mut(&mut self, token: TokenId) -> Result<&mut TokenRecord<A>> {
        self.tokens.get_mut(token.0 as usize).ok_or(Error::UnknownToken(token))
    }

    fn cap(&self, token: TokenId) -> Result<Option<A>> {
        if token.is_system() {
            return Ok(None);
        }
        Ok(self.design(token)?.cap())
    }

    pub(crate) fn balance(&self, token: TokenId, account: &AccountId) -> Result<A> {
        self.ledger.balance(token, account)
    }

    pub(crate) fn effective_gov(&self, account: &AccountId) -> Result<A> {
        self.gov.effective(account, self.balance(TokenId::GOV, account)?)
    }

    fn poll_mut(&mut self, poll: crate::ids::PollId) -> Result<&mut TcrPoll<A>> {
        self.polls.get_mut(poll.0 as usize).ok_or_else(|| corrupt(format!("unknown poll {poll}")))
    }

    fn claim_mut(&mut self, claim: crate::ids::ClaimId) -> Result<&mut Claim<A>> {
        self.claims.get_mut(claim.0 as usize).ok_or_else(|| corrupt(format!("unknown claim {claim}")))
    }

    fn set_curated(&mut self, token: TokenId, status: CuratedStatus) -> Result<()> {
        self.token_mut(token)?.curated_status = status;
        Ok(())
    }

    /// Applies one event. Checks only what keeps the state consistent; the
    /// operation that emitted the event has already validated it.
    fn apply(&mut self, event: &Event<A>) -> Result<()> {
        match event {
            Event::Genesis { params, .. } => {
                params.validate()?;
                self.params = *params;
                self.ledger.open(TokenId::REP);
                self.ledger.open(TokenId::GOV);
            }
            Event::TimeAdvanced { ticks, now } => {
                if *ticks == 0 || self.now.plus(*ticks)? != *now {
                    return Err(corrupt("clock does not add up"));
                }
                self.now = *now;
            }
            Event::TokenCreated { token, creator, design } => {
                if token.0 != self.tokens.len() as u64 {
                    return Err(corrupt("token ids must be sequential"));
                }
                self.tokens.push(TokenRecord {
                    id: *token,
                    design: design.clone(),
                    creator: *creator,
                    created_at: self.now,
                    curated_status: CuratedStatus::NotListed,
                });
                self.ledger.open(*token);
                if let Some(backing_token) = design.swap_backing() {
                    self.pools.insert(
                        *token,
                        Pool {
                            token: *token,
                            backing_token,
                            balance: A::zero(),
                            deposited: A::zero(),
                            paid_out: A::zero(),
                        },
                    );
                }
            }
            Event::Transferred { token, from, to, amount } => {
                self.ledger.transfer(*token, *from, *to, *amount)?;
            }
            Event::Minted { token, to, amount } => {
                if let Some(max) = self.cap(*token)? {
                    let supply = self.ledger.book(*token)?.supply();
                    if amount::add(supply, *amount)? > max {
                        return Err(Error::SupplyCapExceeded(*token));
                    }
                }
                self.ledger.mint(*token, *to, *amount)?;
            }
            Event::Burned { token, from, amount } => {
                self.ledger.burn(*token, *from, *amount)?;
            }
            Event::ClaimSubmitted { claim, claimant, token, quantity } => {
                if claim.0 != self.claims.len() as u64 {
                    return Err(corrupt("claim ids must be sequential"));
                }
                let slots = self.design(*token)?.verifiers.len();
                self.claims.push(Claim::new(*claim, *claimant, *token, *quantity, self.now, slots));
            }
            Event::SlotDecided { claim, verifier_index, status } => {
                let c = self.claim_mut(*claim)?;
                let slot = c.slots.get_mut(*verifier_index as usize).ok_or_else(|| corrupt("slot out of range"))?;
                *slot = *status;
            }
            Event::AttestationRecorded { claim, verifier_index, payload, status } => {
                let c = self.claim_mut(*claim)?;
                let i = *verifier_index as usize;
                if i >= c.slots.len() {
                    return Err(corrupt("slot out of range"));
                }
                if let AttestationPayload::Endorsement { attestor, endorse } = payload {
                    c.endorsements[i].insert(*attestor, *endorse);
                }
                c.slots[i] = *status;
            }
            Event::ClaimMintFailed { claim, reason } => {
                self.claim_mut(*claim)?.mint_failure = Some(reason.clone());
            }
            Event::ClaimClosed { claim, status, minted } => {
                let c = self.claim_mut(*claim)?;
                if !c.is_open() || *status == ClaimStatus::Open {
                    return Err(corrupt("claim closed twice"));
                }
                c.status = *status;
                c.minted = *minted;
            }
            Event::RepAwarded { account, amount, .. } => {
                self.ledger.mint(TokenId::REP, *account, *amount)?;
            }
            Event::GovClaimed { account, amount } => {
                self.ledger.mint(TokenId::GOV, *account, *amount)?;
                self.gov.record_claim(*account, *amount)?;
            }
            Event::GovDelegated { from, to, amount } => self.gov.delegate(*from, *to, *amount)?,
            Event::DelegationRevoked { from, to, amount } => self.gov.revoke(*from, *to, *amount)?,
            Event::ListingApplied { token, applicant, kind, deposit, deadline } => {
                self.gov.lock(*applicant, *deposit)?;
                self.listings.insert(
                    *token,
                    Listing {
                        token: *token,
                        applicant: *applicant,
                        deposit: *deposit,
                        status: ListingStatus::Applied { deadline: *deadline },
                        kind: *kind,
                    },
                );
                self.set_curated(*token, CuratedStatus::Applied)?;
            }
            Event::ListingSettled { token, status } => {
                let listing = self.listings.get_mut(token).ok_or_else(|| corrupt("no listing"))?;
                let (applicant, deposit) = (listing.applicant, listing.deposit);
                listing.status = *status;
                listing.deposit = A::zero();
                listing.kind = ProposalKind::AddToList;
                self.gov.unlock(applicant, deposit)?;
                let curated = match status {
                    ListingStatus::Listed => CuratedStatus::Listed,
                    _ => CuratedStatus::NotListed,
                };
                self.set_curated(*token, curated)?;
            }
            Event::ChallengeOpened { token, poll, challenger, deposit, commit_deadline, reveal_deadline } => {
                if poll.0 != self.polls.len() as u64 {
                    return Err(corrupt("poll ids must be sequential"));
                }
                let listing = self.listings.get_mut(token).ok_or_else(|| corrupt("no listing"))?;
                listing.status = ListingStatus::Challenged { poll: *poll };
                let p = TcrPoll {
                    id: *poll,
                    token: *token,
                    kind: listing.kind,
                    applicant: listing.applicant,
                    listing_deposit: listing.deposit,
                    challenger: *challenger,
                    challenger_deposit: *deposit,
                    commit_deadline: *commit_deadline,
                    reveal_deadline: *reveal_deadline,
                    commits: BTreeMap::new(),
                    reveals: BTreeMap::new(),
                    outcome: PollOutcome::Unresolved,
                    resolution: None,
                };
                self.polls.push(p);
                self.gov.lock(*challenger, *deposit)?;
                self.set_curated(*token, CuratedStatus::Challenged)?;
            }
            Event::VoteCommitted { poll, voter, commit_hash, stake } => {
                let p = self.poll_mut(*poll)?;
                p.commits.insert(*voter, tcr::Commit { hash: *commit_hash, stake: *stake });
                self.gov.lock(*voter, *stake)?;
            }
            Event::VoteRevealed { poll, voter, choice, salt } => {
                let p = self.poll_mut(*poll)?;
                p.reveals.insert(*voter, tcr::Reveal { choice: *choice, salt: *salt });
            }
            Event::PollResolved { poll, resolution } => self.apply_resolution(*poll, resolution)?,
            Event::PoolDeposited { token, depositor, amount } => {
                let pool = self.pools.get_mut(token).ok_or(Error::NoSwapPool(*token))?;
                pool.balance = amount::add(pool.balance, *amount)?;
                pool.deposited = amount::add(pool.deposited, *amount)?;
                let backing = pool.backing_token;
                self.ledger.transfer(backing, *depositor, custody_account(*token), *amount)?;
            }
            Event::PoolPaid { token, holder, payout } => {
                let pool = self.pools.get_mut(token).ok_or(Error::NoSwapPool(*token))?;
                pool.balance = pool.balance.checked_sub(payout).ok_or(Error::EmptyPool(*token))?;
                pool.paid_out = amount::add(pool.paid_out, *payout)?;
                let backing = pool.backing_token;
                self.ledger.transfer(backing, custody_account(*token), *holder, *payout)?;
            }
        }
        Ok(())
    }

    fn apply_resolution(&mut self, poll_id: crate::ids::PollId, resolution: &tcr::Resolution<A>) -> Result<()> {
        let (quorum, dispensation) = (self.params.tcr.vote_quorum_pct, self.params.tcr.dispensation_pct);
        let poll = self.poll_mut(poll_id)?;
        if poll.outcome != PollOutcome::Unresolved {
            return Err(corrupt("poll resolved twice"));
        }
        if tcr::resolve(poll, quorum, dispensation)? != *resolution {
            return Err(corrupt("resolution does not follow the payout rule"));
        }
        poll.outcome = resolution.outcome;
        poll.resolution = Some(resolution.clone());
        let poll = poll.clone();

        for (voter, commit) in &poll.commits {
            self.gov.unlock(*voter, commit.stake)?;
        }
        self.gov.unlock(poll.applicant, poll.listing_deposit)?;
        self.gov.unlock(poll.challenger, poll.challenger_deposit)?;

        // The forfeited deposit comes out of the loser's own undelegated GOV
        // first, then out of delegations it received (lowest delegator first).
        if !resolution.forfeited.is_zero() {
            let loser = resolution.loser;
            let owned = self.balance(TokenId::GOV, &loser)?;
            let own_part = owned.checked_sub(&self.gov.given(&loser)).ok_or_else(|| corrupt("over-delegated"))?;
            let mut rest = resolution.forfeited;
            let mut debits = Vec::new();
            let take = own_part.min(rest);
            if !take.is_zero() {
                debits.push((loser, take));
                rest = rest - take;
            }
            for (delegator, delegated) in self.gov.delegators_of(&loser) {
                if rest.is_zero() {
                    break;
                }
                let take = delegated.min(rest);
                self.gov.revoke(delegator, loser, take)?;
                debits.push((delegator, take));
                rest = rest - take;
            }
            if !rest.is_zero() {
                return Err(corrupt("forfeited deposit exceeds the loser's GOV"));
            }
            let mut credits = vec![(resolution.winner, resolution.winner_award)];
            credits.extend(resolution.voter_awards.iter().copied());
            self.ledger.reassign(TokenId::GOV, &debits, &credits)?;
        }

        let listing = self.listings.get_mut(&poll.token).ok_or_else(|| corrupt("no listing"))?;
        let proposal_wins = resolution.outcome == PollOutcome::ListingWins;
        let listed = match poll.kind {
            ProposalKind::AddToList => proposal_wins,
            ProposalKind::RemoveFromList => !proposal_wins,
        };
        listing.status = if listed { ListingStatus::Listed } else { ListingStatus::Removed };
        listing.deposit = A::zero();
        listing.kind = ProposalKind::AddToList;
        let curated = if listed { CuratedStatus::Listed } else { CuratedStatus::NotListed };
        self.set_curated(poll.token, curated)
    }
}

/// A transaction in progress: a mutable view of the state plus the events
/// emitted so far.
pub(crate) struct Txn<'a, A: Amount> {
    state: &'a mut State<A>,
    staged: Vec<(LogicalTime, Event<A>)>,
    fault_after: Option<usize>,
    /// Set once any event has been applied to `state`.
    dirty: bool,
}

impl<A: Amount> Txn<'_, A> {
    pub(crate) fn emit(&mut self, event: Event<A>) -> Result<()> {
        if self.fault_after == Some(self.staged.len()) {
            return Err(Error::InjectedFault);
        }
        let time = self.state.now;
        self.dirty = true;
        self.state.apply(&event)?;
        self.staged.push((time, event));
        Ok(())
    }
}

/// The engine: state plus its hash-chained log.
///
/// Generic over the balance type; [`crate::Engine`] is the `u64` instance.
#[derive(Debug, Clone)]
pub struct Engine<A: Amount> {
    state: State<A>,
    log: Vec<EventRecord<A>>,
    fault_after: Option<usize>,
}

impl<A: Amount> Engine<A> {
    pub fn new(params: EngineParams<A>) -> Result<Self> {
        Self::with_run_info(params, None)
    }

    /// Starts an engine whose genesis record also carries simulation metadata.
    pub fn with_run_info(params: EngineParams<A>, run: Option<RunInfo>) -> Result<Self> {
        params.validate()?;
        let mut engine = Self { state: State::empty(), log: Vec::new(), fault_after: None };
        engine.transact(|tx| tx.emit(Event::Genesis { params, run }))?;
        Ok(engine)
    }

    /// Runs `op` as one all-or-nothing step. Operations only change state by
    /// emitting events, so a failure before the first emit needs no undo; a
    /// later failure restores the state by re-applying the committed log.
    pub(crate) fn transact<R>(&mut self, op: impl FnOnce(&mut Txn<'_, A>) -> Result<R>) -> Result<R> {
        let fault_after = self.fault_after.take();
        let mut tx = Txn { state: &mut self.state, staged: Vec::new(), fault_after, dirty: false };
        let result = op(&mut tx);
        let (staged, dirty) = (std::mem::take(&mut tx.staged), tx.dirty);
        match result {
            Ok(value) => {
                for (time, event) in staged {
                    self.append(time, event);
                }
                Ok(value)
            }
            Err(e) => {
                if dirty {
                    self.state = self.committed_state();
                }
                Err(e)
            }
        }
    }

    fn committed_state(&self) -> State<A> {
        let mut state = State::empty();
        for record in &self.log {
            state.apply(&record.event).expect("committed events apply cleanly");
        }
        state
    }

    fn append(&mut self, time: LogicalTime, event: Event<A>) {
        let seq = self.log.len() as u64;
        let prev = self.log.last().map(|r| r.hash).unwrap_or(Hash32::ZERO);
        self.log.push(EventRecord::seal(seq, prev, time, event));
    }

    /// Makes the next operation fail with [`Error::InjectedFault`] just before
    /// it would emit its `n`-th event (0-based). Test hook for atomicity.
    #[doc(hidden)]
    pub fn inject_fault_after(&mut self, n: usize) {
        self.fault_after = Some(n);
    }

    /// Rebuilds an engine from a log. The log must verify and start with a
    /// genesis record.
    pub fn replay(records: &[EventRecord<A>]) -> Result<Self> {
        Self::replay_with(records, |_, _| {})
    }

    /// Like [`Engine::replay`], calling `observe` after each record is applied.
    pub fn replay_with(
        records: &[EventRecord<A>],
        mut observe: impl FnMut(&Engine<A>, &EventRecord<A>),
    ) -> Result<Self> {
        if let Verification::FirstBad(seq) = verify_log(records) {
            return Err(Error::CorruptLog { seq, detail: "hash chain broken".into() });
        }
        let Some(first) = records.first() else {
            return Err(Error::CorruptLog { seq: 0, detail: "empty log".into() });
        };
        if !matches!(first.event, Event::Genesis { .. }) {
            return Err(Error::CorruptLog { seq: 0, detail: "log does not start with genesis".into() });
        }
        let mut engine = Self { state: State::empty(), log: Vec::with_capacity(records.len()), fault_after: None };
        for record in records {
            let fail = |e: Error| match e {
                Error::CorruptLog { detail, .. } => Error::CorruptLog { seq: record.seq, detail },
                other => Error::CorruptLog { seq: record.seq, detail: other.to_string() },
            };
            if record.seq > 0 && matches!(record.event, Event::Genesis { .. }) {
                return Err(fail(corrupt("second genesis")));
            }
            if record.time != engine.state.now {
                return Err(fail(corrupt("record time disagrees with the clock")));
            }
            engine.state.apply(&record.event).map_err(fail)?;
            engine.log.push(record.clone());
            observe(&engine, record);
        }
        Ok(engine)
    }

    pub fn log(&self) -> &[EventRecord<A>] {
        &self.log
    }

    /// Hash of the newest record.
    pub fn head_hash(&self) -> Hash32 {
        self.log.last().map(|r| r.hash).unwrap_or(Hash32::ZERO)
    }

    pub fn params(&self) -> &EngineParams<A> {
        &self.state.params
    }

    pub fn run_info(&self) -> Option<&RunInfo> {
        match &self.log.first()?.event {
            Event::Genesis { run, .. } => run.as_ref(),
            _ => None,
        }
    }

    pub fn now(&self) -> LogicalTime {
        self.state.now
    }

    pub fn ledger(&self) -> &Ledger<A> {
        &self.state.ledger
    }
}

#[cfg(test)]
mod tests;
