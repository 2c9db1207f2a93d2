//! Token-curated registry: listings, commit-reveal polls and the payout rule.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::amount::{self, Amount};
use crate::error::{Error, Result};
use crate::ids::{sha256, AccountId, Hash32, LogicalTime, PollId, Salt, TokenId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProposalKind {
    AddToList,
    RemoveFromList,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ListingStatus {
    Applied { deadline: LogicalTime },
    Listed,
    Challenged { poll: PollId },
    Removed,
}

/// The registry entry for one token. For a `Listed` entry, `deposit` is zero:
/// the applicant's deposit is returned once the application stands.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "A: Amount")]
pub struct Listing<A> {
    pub token: TokenId,
    pub applicant: AccountId,
    pub deposit: A,
    pub status: ListingStatus,
    pub kind: ProposalKind,
}

impl<A> Listing<A> {
    /// An application or challenge is in flight.
    pub fn is_active(&self) -> bool {
        matches!(self.status, ListingStatus::Applied { .. } | ListingStatus::Challenged { .. })
    }
}

/// `For` supports the listing side: the pending proposal, or the standing
/// listing when a listed token is challenged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VoteChoice {
    Against,
    For,
}

impl VoteChoice {
    pub fn byte(self) -> u8 {
        match self {
            VoteChoice::Against => 0,
            VoteChoice::For => 1,
        }
    }
}

/// `SHA-256(choice_byte || salt || decimal(poll id))`.
pub fn commit_hash(choice: VoteChoice, salt: &Salt, poll: PollId) -> Hash32 {
    let mut bytes = Vec::with_capacity(1 + 32 + 20);
    bytes.push(choice.byte());
    bytes.extend_from_slice(salt.as_bytes());
    bytes.extend_from_slice(poll.0.to_string().as_bytes());
    sha256(&bytes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "A: Amount")]
pub struct Commit<A> {
    pub hash: Hash32,
    pub stake: A,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reveal {
    pub choice: VoteChoice,
    pub salt: Salt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PollOutcome {
    Unresolved,
    ListingWins,
    ChallengerWins,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "A: Amount")]
pub struct TcrPoll<A> {
    pub id: PollId,
    pub token: TokenId,
    pub kind: ProposalKind,
    pub applicant: AccountId,
    /// Listing-side deposit at stake; zero when a standing listing is challenged.
    pub listing_deposit: A,
    pub challenger: AccountId,
    pub challenger_deposit: A,
    pub commit_deadline: LogicalTime,
    pub reveal_deadline: LogicalTime,
    pub commits: BTreeMap<AccountId, Commit<A>>,
    pub reveals: BTreeMap<AccountId, Reveal>,
    pub outcome: PollOutcome,
    pub resolution: Option<Resolution<A>>,
}

impl<A: Amount> TcrPoll<A> {
    /// Revealed weight per side, or `None` before the reveal deadline.
    pub fn tally(&self, now: LogicalTime) -> Option<(A, A)> {
        (now >= self.reveal_deadline).then(|| {
            tally(&self.commits, &self.reveals).expect("stakes were locked, so their sum fits")
        })
    }
}

fn tally<A: Amount>(
    commits: &BTreeMap<AccountId, Commit<A>>,
    reveals: &BTreeMap<AccountId, Reveal>,
) -> Result<(A, A)> {
    let (mut yes, mut no) = (A::zero(), A::zero());
    for (voter, reveal) in reveals {
        let stake = commits.get(voter).map(|c| c.stake).unwrap_or_else(A::zero);
        match reveal.choice {
            VoteChoice::For => yes = amount::add(yes, stake)?,
            VoteChoice::Against => no = amount::add(no, stake)?,
        }
    }
    Ok((yes, no))
}

/// The settled result of a poll.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "A: Amount")]
pub struct Resolution<A> {
    pub outcome: PollOutcome,
    pub for_weight: A,
    pub against_weight: A,
    /// Whose deposit is forfeited, and how much of it changes hands.
    pub loser: AccountId,
    pub forfeited: A,
    /// The winning party and its dispensation share.
    pub winner: AccountId,
    pub winner_award: A,
    /// Every winning revealed voter, in account order, with its share.
    pub voter_awards: Vec<(AccountId, A)>,
}

/// Applies the payout rule to a poll whose reveal stage has ended.
///
/// With `F` and `A` the revealed weights, the listing side wins iff
/// `F + A > 0` and `100·F ≥ quorum·(F + A)`. The losing deposit `D` splits
/// as `floor(D·dispensation/100)` to the winning party and the rest pro rata
/// over the winning revealed voters' stakes (floors, residue to the largest
/// staker, ties to the lowest account). With no winning revealed voters the
/// voters' share is not forfeited and stays with the loser.
pub fn resolve<A: Amount>(poll: &TcrPoll<A>, quorum_pct: u8, dispensation_pct: u8) -> Result<Resolution<A>> {
    let (for_weight, against_weight) = tally(&poll.commits, &poll.reveals)?;
    let f = amount::to_u128(for_weight);
    let total = f + amount::to_u128(against_weight);
    let listing_wins = total > 0
        && f.checked_mul(100).ok_or(Error::Overflow)?
            >= total.checked_mul(u128::from(quorum_pct)).ok_or(Error::Overflow)?;

    let (outcome, winning_choice, winner, loser, deposit) = if listing_wins {
        (PollOutcome::ListingWins, VoteChoice::For, poll.applicant, poll.challenger, poll.challenger_deposit)
    } else {
        (PollOutcome::ChallengerWins, VoteChoice::Against, poll.challenger, poll.applicant, poll.listing_deposit)
    };

    let winner_award = amount::percent_of(deposit, dispensation_pct)?;
    let voter_pot = deposit - winner_award;
    let mut forfeited = deposit;

    let winners: Vec<(AccountId, A)> = poll
        .reveals
        .iter()
        .filter(|(_, r)| r.choice == winning_choice)
        .map(|(v, _)| (*v, poll.commits.get(v).map(|c| c.stake).unwrap_or_else(A::zero)))
        .collect();
    let winning_stake = winners.iter().try_fold(A::zero(), |acc, (_, s)| amount::add(acc, *s))?;

    let mut voter_awards = Vec::with_capacity(winners.len());
    if winning_stake.is_zero() {
        forfeited = winner_award;
    } else {
        let mut paid = A::zero();
        for (voter, stake) in &winners {
            let share = amount::mul_div_floor(voter_pot, *stake, winning_stake)?;
            paid = amount::add(paid, share)?;
            voter_awards.push((*voter, share));
        }
        let residue = voter_pot - paid;
        // Largest stake takes the residue. `max_by_key` keeps the last
        // maximum, so scan in reverse to prefer the lowest account.
        let (top, _) = winners
            .iter()
            .enumerate()
            .rev()
            .max_by_key(|(_, (_, stake))| *stake)
            .expect("winners is non-empty");
        voter_awards[top].1 = amount::add(voter_awards[top].1, residue)?;
    }

    Ok(Resolution {
        outcome,
        for_weight,
        against_weight,
        loser,
        forfeited,
        winner,
        winner_award,
        voter_awards,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn acct(n: u8) -> AccountId {
        AccountId([n; 32])
    }

    fn poll(votes: &[(u8, u64, Option<VoteChoice>)]) -> TcrPoll<u64> {
        let mut p = TcrPoll {
            id: PollId(0),
            token: TokenId(0),
            kind: ProposalKind::AddToList,
            applicant: acct(100),
            listing_deposit: 100,
            challenger: acct(200),
            challenger_deposit: 100,
            commit_deadline: LogicalTime(10),
            reveal_deadline: LogicalTime(20),
            commits: BTreeMap::new(),
            reveals: BTreeMap::new(),
            outcome: PollOutcome::Unresolved,
            resolution: None,
        };
        for &(who, stake, choice) in votes {
            let salt = Salt([who; 32]);
            let c = choice.unwrap_or(VoteChoice::For);
            p.commits.insert(acct(who), Commit { hash: commit_hash(c, &salt, p.id), stake });
            if let Some(choice) = choice {
                p.reveals.insert(acct(who), Reveal { choice, salt });
            }
        }
        p
    }

    #[test]
    fn zero_reveals_fall_to_challenger() {
        let r = resolve(&poll(&[(1, 3, None)]), 50, 50).unwrap();
        assert_eq!(r.outcome, PollOutcome::ChallengerWins);
        assert_eq!(r.winner, acct(200));
        assert_eq!(r.winner_award, 50);
        assert_eq!(r.forfeited, 50);
        assert!(r.voter_awards.is_empty());
    }

    #[test]
    fn tie_at_quorum_50_goes_to_listing() {
        let r = resolve(&poll(&[(1, 2, Some(VoteChoice::For)), (2, 2, Some(VoteChoice::Against))]), 50, 50)
            .unwrap();
        assert_eq!(r.outcome, PollOutcome::ListingWins);
    }

    #[test]
    fn residue_goes_to_largest_staker() {
        // pot 50 over stakes 30 and 10: floors 37 and 12, residue 1 to the 30-staker
        let p = poll(&[
            (1, 30, Some(VoteChoice::Against)),
            (2, 10, Some(VoteChoice::Against)),
            (3, 5, Some(VoteChoice::For)),
        ]);
        let r = resolve(&p, 50, 50).unwrap();
        assert_eq!(r.outcome, PollOutcome::ChallengerWins);
        assert_eq!(r.winner_award, 50);
        assert_eq!(r.voter_awards, vec![(acct(1), 38), (acct(2), 12)]);
    }

    #[test]
    fn residue_tie_prefers_lowest_account() {
        let p = poll(&[(4, 1, Some(VoteChoice::For)), (2, 1, Some(VoteChoice::For)), (3, 1, Some(VoteChoice::For))]);
        let r = resolve(&p, 50, 0).unwrap();
        // challenger deposit 100 over three equal stakes: 33 each, residue 1 to acct(2)
        assert_eq!(r.voter_awards, vec![(acct(2), 34), (acct(3), 33), (acct(4), 33)]);
    }

    #[test]
    fn commit_hash_binds_every_input() {
        let s = Salt([1; 32]);
        let h = commit_hash(VoteChoice::For, &s, PollId(3));
        assert_ne!(h, commit_hash(VoteChoice::Against, &s, PollId(3)));
        assert_ne!(h, commit_hash(VoteChoice::For, &Salt([2; 32]), PollId(3)));
        assert_ne!(h, commit_hash(VoteChoice::For, &s, PollId(4)));
        let mut manual = vec![1u8];
        manual.extend_from_slice(&[1; 32]);
        manual.extend_from_slice(b"3");
        assert_eq!(h, sha256(&manual));
    }
}
