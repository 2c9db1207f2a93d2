//! A deliberately naive restatement of the poll payout rule, and the
//! enumeration of small polls it is compared on.
//!
//! Nothing here calls into the engine's resolver. Floors are found by
//! counting up instead of dividing, and the residue goes to the first
//! largest stake found by a plain scan.

use std::collections::BTreeMap;

use pat_core::tcr::{Commit, Reveal};
use pat_core::{AccountId, Hash32, LogicalTime, PollId, PollOutcome, Resolution, Salt, TcrPoll, TokenId, VoteChoice};

/// What one voter did in a poll.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ballot {
    /// Committed but never revealed.
    Silent,
    Revealed(VoteChoice),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Voter {
    pub account: AccountId,
    pub stake: u64,
    pub ballot: Ballot,
}

/// Expected result of resolving a poll.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expected {
    pub outcome: PollOutcome,
    pub for_weight: u64,
    pub against_weight: u64,
    /// Deposit taken from the losing party.
    pub forfeited: u64,
    pub winner_award: u64,
    /// Every winning revealed voter, in account order, with its share.
    pub voter_awards: Vec<(AccountId, u64)>,
}

/// Largest `k` with `k * den <= num`, found by counting.
fn floor_div_by_counting(num: u64, den: u64) -> u64 {
    let mut k = 0;
    while (k + 1) * den <= num {
        k += 1;
    }
    k
}

pub fn expected(voters: &[Voter], listing_deposit: u64, challenger_deposit: u64, quorum: u8, disp: u8) -> Expected {
    let weight = |side: VoteChoice| -> u64 {
        voters.iter().filter(|v| v.ballot == Ballot::Revealed(side)).map(|v| v.stake).sum()
    };
    let (f, a) = (weight(VoteChoice::For), weight(VoteChoice::Against));
    let listing_wins = f + a > 0 && 100 * f >= u64::from(quorum) * (f + a);
    let (outcome, side, deposit) = if listing_wins {
        (PollOutcome::ListingWins, VoteChoice::For, challenger_deposit)
    } else {
        (PollOutcome::ChallengerWins, VoteChoice::Against, listing_deposit)
    };
    let winner_award = floor_div_by_counting(deposit * u64::from(disp), 100);
    let pot = deposit - winner_award;

    let mut winners: Vec<&Voter> = voters.iter().filter(|v| v.ballot == Ballot::Revealed(side)).collect();
    winners.sort_by_key(|v| v.account);
    let total: u64 = winners.iter().map(|v| v.stake).sum();
    if total == 0 {
        // Nobody to pay: the voter share stays with the loser.
        return Expected {
            outcome,
            for_weight: f,
            against_weight: a,
            forfeited: winner_award,
            winner_award,
            voter_awards: Vec::new(),
        };
    }
    let mut awards: Vec<(AccountId, u64)> =
        winners.iter().map(|v| (v.account, floor_div_by_counting(pot * v.stake, total))).collect();
    let paid: u64 = awards.iter().map(|(_, x)| x).sum();
    let mut top = 0;
    for (i, v) in winners.iter().enumerate() {
        if v.stake > winners[top].stake {
            top = i;
        }
    }
    awards[top].1 += pot - paid;
    Expected { outcome, for_weight: f, against_weight: a, forfeited: deposit, winner_award, voter_awards: awards }
}

/// Compares an engine resolution against the expectation. `Err` names the
/// first differing field.
pub fn compare(actual: &Resolution, expected: &Expected) -> Result<(), String> {
    let same = actual.outcome == expected.outcome
        && actual.for_weight == expected.for_weight
        && actual.against_weight == expected.against_weight
        && actual.forfeited == expected.forfeited
        && actual.winner_award == expected.winner_award
        && actual.voter_awards == expected.voter_awards;
    if same {
        return Ok(());
    }
    let pairs: [(&str, String, String); 6] = [
        ("outcome", format!("{:?}", actual.outcome), format!("{:?}", expected.outcome)),
        ("for_weight", actual.for_weight.to_string(), expected.for_weight.to_string()),
        ("against_weight", actual.against_weight.to_string(), expected.against_weight.to_string()),
        ("forfeited", actual.forfeited.to_string(), expected.forfeited.to_string()),
        ("winner_award", actual.winner_award.to_string(), expected.winner_award.to_string()),
        ("voter_awards", format!("{:?}", actual.voter_awards), format!("{:?}", expected.voter_awards)),
    ];
    let (field, a, e) = pairs.into_iter().find(|(_, a, e)| a != e).expect("some field differs");
    Err(format!("{field}: engine {a}, oracle {e}"))
}

pub const MAX_VOTERS: usize = 5;
pub const STAKES: std::ops::RangeInclusive<u64> = 1..=4;
pub const PERCENTS: [u8; 3] = [0, 50, 100];

/// Account of the `i`-th voter. Voters sort in index order.
pub fn voter_account(i: usize) -> AccountId {
    AccountId([0x10 + i as u8; 32])
}

/// Every assignment of stake and ballot to up to [`MAX_VOTERS`] voters:
/// `sum over n of 12^n` polls.
pub fn all_polls() -> impl Iterator<Item = Vec<Voter>> {
    const BALLOTS: [Ballot; 3] =
        [Ballot::Silent, Ballot::Revealed(VoteChoice::For), Ballot::Revealed(VoteChoice::Against)];
    let per_voter = (STAKES.count() * BALLOTS.len()) as u64;
    (0..=MAX_VOTERS).flat_map(move |n| {
        (0..per_voter.pow(n as u32)).map(move |mut code| {
            (0..n)
                .map(|i| {
                    let digit = code % per_voter;
                    code /= per_voter;
                    Voter {
                        account: voter_account(i),
                        stake: STAKES.start() + digit / 3,
                        ballot: BALLOTS[(digit % 3) as usize],
                    }
                })
                .collect()
        })
    })
}

pub fn poll_count() -> u64 {
    let per_voter = (STAKES.count() * 3) as u64;
    (0..=MAX_VOTERS as u32).map(|n| per_voter.pow(n)).sum()
}

/// A standalone poll value holding the given votes. Commit hashes are left
/// zero; resolution only reads stakes and revealed choices.
pub fn poll_of(voters: &[Voter], listing_deposit: u64, challenger_deposit: u64) -> TcrPoll {
    let mut commits = BTreeMap::new();
    let mut reveals = BTreeMap::new();
    for v in voters {
        commits.insert(v.account, Commit { hash: Hash32::ZERO, stake: v.stake });
        if let Ballot::Revealed(choice) = v.ballot {
            reveals.insert(v.account, Reveal { choice, salt: Salt([0; 32]) });
        }
    }
    TcrPoll {
        id: PollId(0),
        token: TokenId(0),
        kind: pat_core::ProposalKind::AddToList,
        applicant: AccountId([1; 32]),
        listing_deposit,
        challenger: AccountId([2; 32]),
        challenger_deposit,
        commit_deadline: LogicalTime(1),
        reveal_deadline: LogicalTime(2),
        commits,
        reveals,
        outcome: PollOutcome::Unresolved,
        resolution: None,
    }
}
