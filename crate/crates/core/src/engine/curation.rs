use crate::amount::Amount;
use crate::error::{Error, Result};
use crate::event::Event;
use crate::ids::{AccountId, Hash32, PollId, Salt, TokenId};
use crate::tcr::{self, commit_hash, Listing, ListingStatus, PollOutcome, ProposalKind, Resolution, TcrPoll, VoteChoice};
use crate::token::CuratedStatus;

use super::{Engine, State, Txn};

impl<A: Amount> State<A> {
    fn poll(&self, poll: PollId) -> Result<&TcrPoll<A>> {
        self.polls.get(poll.0 as usize).ok_or(Error::UnknownPoll(poll))
    }

    fn require_gov(&self, account: &AccountId, amount: A) -> Result<()> {
        if self.effective_gov(account)? < amount {
            return Err(Error::InsufficientGov);
        }
        Ok(())
    }
}

impl<A: Amount> Txn<'_, A> {
    /// Settles an unchallenged application whose stage has run out.
    pub(crate) fn settle_expired(&mut self, token: TokenId) -> Result<Option<ListingStatus>> {
        let Some(listing) = self.state.listings.get(&token) else { return Ok(None) };
        if let ListingStatus::Applied { deadline } = listing.status {
            if self.state.now >= deadline {
                let status = match listing.kind {
                    ProposalKind::AddToList => ListingStatus::Listed,
                    ProposalKind::RemoveFromList => ListingStatus::Removed,
                };
                self.emit(Event::ListingSettled { token, status })?;
            }
        }
        Ok(self.state.listings.get(&token).map(|l| l.status))
    }
}

impl<A: Amount> Engine<A> {
    /// Proposes adding a token to the curated list, or removing a listed one.
    /// Locks `min_deposit` of the applicant's effective GOV.
    pub fn apply_listing(&mut self, applicant: AccountId, token: TokenId, kind: ProposalKind) -> Result<()> {
        self.transact(|tx| {
            tx.state.design(token)?;
            tx.settle_expired(token)?;
            let s = &*tx.state;
            if s.listings.get(&token).is_some_and(Listing::is_active) {
                return Err(Error::ListingExists(token));
            }
            let status = s.tokens[token.0 as usize].curated_status;
            let fits = match kind {
                ProposalKind::AddToList => status == CuratedStatus::NotListed,
                ProposalKind::RemoveFromList => status == CuratedStatus::Listed,
            };
            if !fits {
                return Err(Error::WrongKind(token));
            }
            let deposit = s.params.tcr.min_deposit;
            s.require_gov(&applicant, deposit)?;
            let deadline = s.now.plus(s.params.tcr.apply_stage_ticks)?;
            tx.emit(Event::ListingApplied { token, applicant, kind, deposit, deadline })
        })
    }

    /// Settles the token's application if its stage has ended and returns the
    /// listing status, if there is a listing.
    pub fn touch_listing(&mut self, token: TokenId) -> Result<Option<ListingStatus>> {
        self.transact(|tx| {
            tx.state.design(token)?;
            tx.settle_expired(token)
        })
    }

    /// Opens a poll against a pending application or a standing listing.
    pub fn challenge(&mut self, challenger: AccountId, token: TokenId) -> Result<PollId> {
        self.transact(|tx| {
            tx.state.design(token)?;
            let status = tx.settle_expired(token)?;
            match status {
                Some(ListingStatus::Applied { .. } | ListingStatus::Listed) => {}
                Some(ListingStatus::Challenged { .. }) => return Err(Error::AlreadyChallenged(token)),
                Some(ListingStatus::Removed) | None => return Err(Error::NoActiveListing(token)),
            }
            let s = &*tx.state;
            let deposit = s.params.tcr.min_deposit;
            s.require_gov(&challenger, deposit)?;
            let commit_deadline = s.now.plus(s.params.tcr.commit_stage_ticks)?;
            let reveal_deadline = commit_deadline.plus(s.params.tcr.reveal_stage_ticks)?;
            let poll = PollId(s.polls.len() as u64);
            tx.emit(Event::ChallengeOpened { token, poll, challenger, deposit, commit_deadline, reveal_deadline })?;
            Ok(poll)
        })
    }

    /// Commits a hidden vote, locking `stake` of the voter's effective GOV.
    /// Build `hash` with [`commit_hash`].
    pub fn commit_vote(&mut self, voter: AccountId, poll: PollId, hash: Hash32, stake: A) -> Result<()> {
        self.transact(|tx| {
            let s = &*tx.state;
            let p = s.poll(poll)?;
            if s.now >= p.commit_deadline {
                return Err(Error::CommitClosed(poll));
            }
            if stake.is_zero() {
                return Err(Error::ZeroStake);
            }
            if p.commits.contains_key(&voter) {
                return Err(Error::DuplicateCommit(poll));
            }
            s.require_gov(&voter, stake)?;
            tx.emit(Event::VoteCommitted { poll, voter, commit_hash: hash, stake })
        })
    }

    pub fn reveal_vote(&mut self, voter: AccountId, poll: PollId, choice: VoteChoice, salt: Salt) -> Result<()> {
        self.transact(|tx| {
            let s = &*tx.state;
            let p = s.poll(poll)?;
            if s.now < p.commit_deadline {
                return Err(Error::RevealTooEarly(poll));
            }
            if s.now >= p.reveal_deadline {
                return Err(Error::RevealClosed(poll));
            }
            let commit = p.commits.get(&voter).ok_or(Error::NoCommit(poll))?;
            if p.reveals.contains_key(&voter) {
                return Err(Error::DuplicateReveal(poll));
            }
            if commit_hash(choice, &salt, poll) != commit.hash {
                return Err(Error::HashMismatch);
            }
            tx.emit(Event::VoteRevealed { poll, voter, choice, salt })
        })
    }

    /// Resolves a poll whose reveal stage is over and pays out.
    pub fn resolve_poll(&mut self, poll: PollId) -> Result<Resolution<A>> {
        self.transact(|tx| {
            let s = &*tx.state;
            let p = s.poll(poll)?;
            if p.outcome != PollOutcome::Unresolved {
                return Err(Error::AlreadyResolved(poll));
            }
            if s.now < p.reveal_deadline {
                return Err(Error::PollNotEnded(poll));
            }
            let resolution = tcr::resolve(p, s.params.tcr.vote_quorum_pct, s.params.tcr.dispensation_pct)?;
            tx.emit(Event::PollResolved { poll, resolution: resolution.clone() })?;
            Ok(resolution)
        })
    }

    pub fn listing(&self, token: TokenId) -> Option<&Listing<A>> {
        self.state.listings.get(&token)
    }

    pub fn listings(&self) -> impl Iterator<Item = &Listing<A>> {
        self.state.listings.values()
    }

    pub fn get_poll(&self, poll: PollId) -> Result<&TcrPoll<A>> {
        self.state.poll(poll)
    }

    pub fn polls(&self) -> &[TcrPoll<A>] {
        &self.state.polls
    }
}
