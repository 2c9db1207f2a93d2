use super::*;
use crate::backing::BackingSpec;
use crate::ids::{ClaimId, PollId, Salt};
use crate::reputation::RepReason;
use crate::tcr::{commit_hash, VoteChoice};
use crate::token::{DesignViolation, MintingPolicy, Supply, TokenFilter, UnconditionalCreation};
use crate::verifier::{Attestation, Comparator, OracleSigner, RejectReason, SlotStatus, VerifierSpec};

type E = Engine<u64>;

fn acct(n: u8) -> AccountId {
    AccountId([n; 32])
}

fn engine() -> E {
    Engine::new(EngineParams::default()).unwrap()
}

fn design(symbol: &str) -> TokenDesign<u64> {
    TokenDesign::simple(symbol, symbol)
}

fn token(e: &mut E, d: TokenDesign<u64>) -> TokenId {
    e.create_token(acct(0), d).unwrap()
}

fn assert_unchanged(e: &E, f: impl FnOnce(&mut E) -> Result<()>) -> Error {
    let mut copy = e.clone();
    let err = f(&mut copy).unwrap_err();
    assert_eq!(copy.head_hash(), e.head_hash());
    assert_eq!(copy.log().len(), e.log().len());
    assert_eq!(format!("{:?}", copy.state), format!("{:?}", e.state));
    err
}

// ledger

#[test]
fn rep_cannot_be_transferred_or_burned() {
    let mut e = engine();
    token(&mut e, design("A"));
    assert_eq!(e.rep_of(&acct(0)), 100);
    assert_eq!(e.transfer(TokenId::REP, acct(0), acct(1), 1), Err(Error::NonTransferable(TokenId::REP)));
    assert_eq!(e.transfer(TokenId::REP, acct(0), acct(1), 0), Err(Error::NonTransferable(TokenId::REP)));
    assert_eq!(e.burn_units(TokenId::REP, acct(0), 1), Err(Error::NotBurnable(TokenId::REP)));
    assert_eq!(e.mint_units(TokenId::REP, acct(0), 1), Err(Error::RestrictedMint(TokenId::REP)));
}

#[test]
fn transfer_arithmetic_and_self_transfer() {
    let mut e = engine();
    let t = token(&mut e, design("A"));
    e.mint_units(t, acct(1), 10).unwrap();
    e.transfer(t, acct(1), acct(2), 4).unwrap();
    assert_eq!(e.balance_of(t, &acct(1)), Ok(6));
    assert_eq!(e.balance_of(t, &acct(2)), Ok(4));
    assert_eq!(e.total_supply(t), Ok(10));
    e.transfer(t, acct(2), acct(2), 4).unwrap();
    assert_eq!(e.balance_of(t, &acct(2)), Ok(4));
    assert_eq!(e.total_supply(t), Ok(10));
    let err = assert_unchanged(&e, |e| e.transfer(t, acct(2), acct(3), 5));
    assert!(matches!(err, Error::InsufficientBalance { .. }));
    assert_eq!(e.transfer(TokenId(9), acct(1), acct(2), 1), Err(Error::UnknownToken(TokenId(9))));
}

#[test]
fn non_transferable_token() {
    let mut e = engine();
    let mut d = design("A");
    d.transferable = false;
    let t = token(&mut e, d);
    e.mint_units(t, acct(1), 3).unwrap();
    assert_eq!(e.transfer(t, acct(1), acct(2), 1), Err(Error::NonTransferable(t)));
}

#[test]
fn mint_zero_and_cap_boundary() {
    let mut e = engine();
    let mut d = design("A");
    d.supply = Supply::Capped { max: 100 };
    let t = token(&mut e, d);
    let len = e.log().len();
    e.mint_units(t, acct(1), 0).unwrap();
    assert_eq!(e.log().len(), len);
    e.mint_units(t, acct(1), 98).unwrap();
    let err = assert_unchanged(&e, |e| e.mint_units(t, acct(1), 3));
    assert_eq!(err, Error::SupplyCapExceeded(t));
    e.mint_units(t, acct(1), 2).unwrap();
    assert_eq!(e.total_supply(t), Ok(100));
}

#[test]
fn burn_rules() {
    let mut e = engine();
    let t = token(&mut e, design("A"));
    e.mint_units(t, acct(1), 10).unwrap();
    e.burn_units(t, acct(1), 3).unwrap();
    assert_eq!(e.total_supply(t), Ok(7));
    let len = e.log().len();
    e.burn_units(t, acct(1), 0).unwrap();
    assert_eq!(e.log().len(), len);
    e.burn_units(t, acct(1), 7).unwrap();
    assert_eq!(e.balance_of(t, &acct(1)), Ok(0));
    assert_eq!(e.total_supply(t), Ok(0));
    assert_eq!(e.book(t).unwrap().burned(), 10);

    let mut d = design("B");
    d.burnable = false;
    let nb = token(&mut e, d);
    e.mint_units(nb, acct(1), 1).unwrap();
    assert_eq!(assert_unchanged(&e, |e| e.burn_units(nb, acct(1), 1)), Error::NotBurnable(nb));
}

#[test]
fn clock() {
    let mut e = engine();
    assert_eq!(e.advance_time(1), Ok(LogicalTime(1)));
    let mut e = engine();
    e.advance_time(10).unwrap();
    assert_eq!(e.advance_time(10), Ok(LogicalTime(20)));
    assert_eq!(e.advance_time(0), Err(Error::ZeroTicks));
    assert_eq!(e.now(), LogicalTime(20));
}

#[test]
fn fresh_account_reads_zero() {
    let mut e = engine();
    let t = token(&mut e, design("A"));
    assert_eq!(e.balance_of(t, &acct(42)), Ok(0));
    assert_eq!(e.balance_of(TokenId(5), &acct(42)), Err(Error::UnknownToken(TokenId(5))));
}

#[test]
fn log_records_are_stamped_and_chained() {
    let mut e = engine();
    e.advance_time(3).unwrap();
    let t = token(&mut e, design("A"));
    e.mint_units(t, acct(1), 5).unwrap();
    let log = e.log();
    assert!(matches!(log[0].event, Event::Genesis { .. }));
    assert_eq!(log[0].prev_hash, Hash32::ZERO);
    for pair in log.windows(2) {
        assert_eq!(pair[1].prev_hash, pair[0].hash);
        assert_eq!(pair[1].seq, pair[0].seq + 1);
    }
    assert_eq!(log.last().unwrap().time, LogicalTime(3));
    assert!(verify_log(log).is_intact());
    let replayed = E::replay(log).unwrap();
    assert_eq!(replayed.head_hash(), e.head_hash());
    assert_eq!(format!("{:?}", replayed.state), format!("{:?}", e.state));
}

#[test]
fn injected_fault_rolls_back_a_multi_event_operation() {
    let mut e = engine();
    let mut d = design("A");
    d.unconditional_creation = UnconditionalCreation::Partial { amount: 5, to: acct(3) };
    for n in 0..3 {
        let mut copy = e.clone();
        copy.inject_fault_after(n);
        assert_eq!(
            assert_unchanged(&copy, |c| {
                c.inject_fault_after(n);
                c.create_token(acct(1), d.clone()).map(|_| ())
            }),
            Error::InjectedFault
        );
    }
    // the fault arms only one operation
    e.inject_fault_after(5);
    token(&mut e, d.clone());
    token(&mut e, d);
    assert_eq!(e.token_count(), 2);
}

// token factory

#[test]
fn creation_ids_rep_and_listing() {
    let mut e = engine();
    assert!(e.list_tokens(TokenFilter::All).is_empty());
    for (i, s) in ["A", "B", "C"].into_iter().enumerate() {
        assert_eq!(e.create_token(acct(1), design(s)), Ok(TokenId(i as u64)));
    }
    assert_eq!(e.rep_of(&acct(1)), 300);
    let ids: Vec<_> = e.list_tokens(TokenFilter::All).iter().map(|r| r.id).collect();
    assert_eq!(ids, vec![TokenId(0), TokenId(1), TokenId(2)]);
    assert!(e.list_tokens(TokenFilter::CuratedOnly).is_empty());
    assert_eq!(e.get_token(TokenId(1)).unwrap().creator, acct(1));
    assert_eq!(e.get_token(TokenId(3)).unwrap_err(), Error::UnknownToken(TokenId(3)));
}

#[test]
fn invalid_designs_are_rejected_with_every_violation() {
    let mut e = engine();
    let mut d = design("A");
    d.creation_condition = crate::token::CreationCondition::Consensus;
    d.sources_of_value = vec![
        BackingSpec::SwapPool { backing_token: TokenId(0) },
        BackingSpec::CoupledBurn { coupled_token: TokenId::GOV },
        BackingSpec::MintConversion { target_token: TokenId(7), rate_num: 1, rate_den: 1 },
    ];
    let err = assert_unchanged(&e, |e| e.create_token(acct(1), d.clone()).map(|_| ()));
    assert_eq!(
        err,
        Error::InvalidDesign(vec![
            DesignViolation::CreationConditionUnsupported,
            DesignViolation::SelfBacking(0),
            DesignViolation::SystemTokenBacking(1),
            DesignViolation::UnknownReferencedToken(TokenId(7)),
        ])
    );
    assert_eq!(e.token_count(), 0);
    let _ = &mut e;
}

#[test]
fn pre_mint_all_is_not_claimable() {
    let mut e = engine();
    let mut d = design("A");
    d.unconditional_creation = UnconditionalCreation::All { amount: 50, to: acct(4) };
    let t = token(&mut e, d);
    assert_eq!(e.balance_of(t, &acct(4)), Ok(50));
    assert_eq!(e.submit_claim(acct(1), t, 1), Err(Error::TokenNotClaimable(t)));
}

// claims

fn submit_status(e: &mut E, who: AccountId, t: TokenId) -> ClaimStatus {
    let c = e.submit_claim(who, t, 1).unwrap();
    e.get_claim(c).unwrap().status
}

#[test]
fn zero_verifiers_approve_immediately() {
    let mut e = engine();
    let t = token(&mut e, design("A"));
    let c = e.submit_claim(acct(1), t, 1).unwrap();
    let claim = e.get_claim(c).unwrap();
    assert_eq!(claim.status, ClaimStatus::Approved);
    assert_eq!(claim.minted, 1);
    assert_eq!(e.balance_of(t, &acct(1)), Ok(1));
    assert_eq!(e.rep_of(&acct(1)), 10);
}

#[test]
fn claim_window_limits_rate() {
    let mut e = engine();
    let mut d = design("A");
    d.verifiers = vec![VerifierSpec::ClaimWindow { max_claims: 1, per_ticks: 100 }];
    let t = token(&mut e, d);
    assert_eq!(submit_status(&mut e, acct(1), t), ClaimStatus::Approved);
    e.advance_time(50).unwrap();
    let second = e.submit_claim(acct(1), t, 1).unwrap();
    let claim = e.get_claim(second).unwrap();
    assert_eq!(claim.slots, vec![SlotStatus::Rejected(RejectReason::WindowExceeded)]);
    assert_eq!(claim.status, ClaimStatus::Rejected);
    // another claimant has its own window
    assert_eq!(submit_status(&mut e, acct(2), t), ClaimStatus::Approved);
    // the rejected submission still counts until it ages out at tick 150
    e.advance_time(50).unwrap();
    assert_eq!(submit_status(&mut e, acct(1), t), ClaimStatus::Rejected);
    e.advance_time(50).unwrap();
    assert_eq!(submit_status(&mut e, acct(1), t), ClaimStatus::Rejected);
    e.advance_time(100).unwrap();
    assert_eq!(submit_status(&mut e, acct(1), t), ClaimStatus::Approved);
}

#[test]
fn balance_threshold_gate() {
    let mut e = engine();
    let gate = token(&mut e, design("G"));
    let mut d = design("A");
    d.verifiers = vec![VerifierSpec::TokenBalanceThreshold { token: gate, min_balance: 2 }];
    let t = token(&mut e, d);
    e.mint_units(gate, acct(1), 1).unwrap();
    let c = e.submit_claim(acct(1), t, 1).unwrap();
    assert_eq!(
        e.get_claim(c).unwrap().slots,
        vec![SlotStatus::Rejected(RejectReason::BalanceBelowThreshold)]
    );
    e.mint_units(gate, acct(1), 1).unwrap();
    let c = e.submit_claim(acct(1), t, 1).unwrap();
    assert_eq!(e.get_claim(c).unwrap().status, ClaimStatus::Approved);
}

fn approval(claim: ClaimId, index: u32, approver: AccountId, approve: bool) -> Attestation {
    Attestation { claim, verifier_index: index, payload: AttestationPayload::Approval { approver, approve } }
}

#[test]
fn designated_approver_flow_and_rejection_is_free() {
    let mut e = engine();
    let mut d = design("A");
    d.verifiers = vec![VerifierSpec::DesignatedApprover { approver: acct(9) }];
    let t = token(&mut e, d);
    let c = e.submit_claim(acct(1), t, 1).unwrap();
    assert_eq!(e.get_claim(c).unwrap().status, ClaimStatus::Open);
    assert_eq!(e.submit_attestation(&approval(c, 0, acct(8), true)), Err(Error::UnauthorizedAttestor));
    assert!(matches!(
        e.submit_attestation(&approval(c, 1, acct(9), true)),
        Err(Error::IndexOutOfRange { index: 1, .. })
    ));
    assert_eq!(e.submit_attestation(&approval(c, 0, acct(9), true)), Ok(SlotStatus::Approved));
    assert_eq!(e.get_claim(c).unwrap().status, ClaimStatus::Approved);
    assert_eq!(e.submit_attestation(&approval(c, 0, acct(9), true)), Err(Error::ClaimClosed(c)));

    let c2 = e.submit_claim(acct(1), t, 1).unwrap();
    e.submit_attestation(&approval(c2, 0, acct(9), false)).unwrap();
    assert_eq!(e.get_claim(c2).unwrap().status, ClaimStatus::Rejected);
    assert_eq!(e.rep_of(&acct(1)), 10);
    assert_eq!(e.balance_of(t, &acct(1)), Ok(1));
    assert_eq!(e.submit_attestation(&approval(ClaimId(99), 0, acct(9), true)), Err(Error::UnknownClaim(ClaimId(99))));
}

#[test]
fn conjunction_of_sensor_and_quorum() {
    let mut e = engine();
    let oracle = OracleSigner::from_seed([7; 32]);
    let mut d = design("A");
    d.verifiers = vec![
        VerifierSpec::SensorOracle { oracle_key: oracle.public_key(), comparator: Comparator::AtLeast, threshold: 50 },
        VerifierSpec::PeerQuorum { attestors: vec![acct(2), acct(3), acct(4)], k: 2 },
    ];
    let t = token(&mut e, d);
    let c = e.submit_claim(acct(1), t, 1).unwrap();
    assert_eq!(e.submit_attestation(&oracle.measurement(c, 0, 50)), Ok(SlotStatus::Approved));
    let endorse = |who: u8| Attestation {
        claim: c,
        verifier_index: 1,
        payload: AttestationPayload::Endorsement { attestor: acct(who), endorse: true },
    };
    assert_eq!(e.submit_attestation(&endorse(2)), Ok(SlotStatus::Pending));
    assert_eq!(e.get_claim(c).unwrap().status, ClaimStatus::Open);
    assert_eq!(e.submit_attestation(&endorse(3)), Ok(SlotStatus::Approved));
    assert_eq!(e.get_claim(c).unwrap().status, ClaimStatus::Approved);

    let c2 = e.submit_claim(acct(1), t, 1).unwrap();
    assert_eq!(
        e.submit_attestation(&oracle.measurement(c2, 0, 49)),
        Ok(SlotStatus::Rejected(RejectReason::MeasurementFailed))
    );
    assert_eq!(e.get_claim(c2).unwrap().status, ClaimStatus::Rejected);
}

#[test]
fn proportional_minting_and_rep() {
    let mut e = engine();
    let mut d = design("A");
    d.minting_policy = MintingPolicy::ProportionalToQuantity { unit_per_quantity: 3 };
    let t = e.create_token(acct(1), d).unwrap();
    let c = e.submit_claim(acct(1), t, 4).unwrap();
    assert_eq!(e.get_claim(c).unwrap().minted, 12);
    for _ in 0..2 {
        e.submit_claim(acct(1), t, 1).unwrap();
    }
    assert_eq!(e.rep_of(&acct(1)), 100 + 3 * 10);
}

#[test]
fn cap_hit_keeps_claim_open_and_records_failure() {
    let mut e = engine();
    let mut d = design("A");
    d.supply = Supply::Capped { max: 1 };
    d.verifiers = vec![VerifierSpec::DesignatedApprover { approver: acct(9) }];
    let t = token(&mut e, d);
    e.mint_units(t, acct(5), 1).unwrap();
    let c = e.submit_claim(acct(1), t, 1).unwrap();
    assert_eq!(e.finalize_claim(c), Err(Error::NotAllApproved(c)));
    assert_eq!(e.submit_attestation(&approval(c, 0, acct(9), true)), Ok(SlotStatus::Approved));
    let claim = e.get_claim(c).unwrap();
    assert_eq!(claim.status, ClaimStatus::Open);
    assert!(claim.mint_failure.is_some());
    assert_eq!(e.rep_of(&acct(1)), 0);

    let len = e.log().len();
    assert_eq!(e.finalize_claim(c), Err(Error::SupplyCapExceeded(t)));
    assert_eq!(e.log().len(), len + 1);
    e.burn_units(t, acct(5), 1).unwrap();
    assert_eq!(e.finalize_claim(c), Ok(1));
    assert_eq!(e.get_claim(c).unwrap().status, ClaimStatus::Approved);
    assert_eq!(e.finalize_claim(c), Err(Error::ClaimClosed(c)));
    assert!(E::replay(e.log()).is_ok());
}

// reputation and governance

fn with_gov(e: &mut E, who: AccountId, creations: usize) {
    for _ in 0..creations {
        let n = e.token_count();
        e.create_token(who, design(&"ABCDEFGH"[n % 8..n % 8 + 1])).unwrap();
    }
    e.claim_gov(who).unwrap();
}

#[test]
fn gov_claim_formula() {
    let mut e = engine();
    e.create_token(acct(1), design("A")).unwrap();
    e.create_token(acct(1), design("B")).unwrap();
    let t = e.create_token(acct(2), design("C")).unwrap();
    for _ in 0..5 {
        e.submit_claim(acct(1), t, 1).unwrap();
    }
    assert_eq!(e.rep_of(&acct(1)), 250);
    assert_eq!(e.claim_gov(acct(1)), Ok(20));
    assert_eq!(e.claim_gov(acct(1)), Ok(0));
    for _ in 0..6 {
        e.submit_claim(acct(1), t, 1).unwrap();
    }
    assert_eq!(e.rep_of(&acct(1)), 310);
    assert_eq!(e.claim_gov(acct(1)), Ok(10));
    assert_eq!(e.claim_gov(acct(3)), Ok(0));
}

#[test]
fn delegation_moves_voting_power_only() {
    let mut e = engine();
    with_gov(&mut e, acct(1), 1);
    assert_eq!(e.gov_of(&acct(1)), 10);
    e.delegate_gov(acct(1), acct(2), 4).unwrap();
    assert_eq!((e.effective_gov(&acct(1)), e.effective_gov(&acct(2))), (6, 4));
    assert_eq!(e.gov_of(&acct(2)), 0);
    assert_eq!(e.delegate_gov(acct(1), acct(3), 7), Err(Error::InsufficientGov));
    e.revoke_delegation(acct(1), acct(2), 4).unwrap();
    assert_eq!((e.effective_gov(&acct(1)), e.effective_gov(&acct(2))), (10, 0));
    assert_eq!(e.revoke_delegation(acct(1), acct(2), 1), Err(Error::NoSuchDelegation));
}

#[test]
fn gov_transfer_follows_the_flag() {
    let mut e = engine();
    with_gov(&mut e, acct(1), 1);
    assert_eq!(e.transfer(TokenId::GOV, acct(1), acct(2), 1), Err(Error::NonTransferable(TokenId::GOV)));
    let params = EngineParams { gov_transferable: true, ..EngineParams::default() };
    let mut e = Engine::new(params).unwrap();
    with_gov(&mut e, acct(1), 1);
    e.delegate_gov(acct(1), acct(2), 4).unwrap();
    assert_eq!(e.transfer(TokenId::GOV, acct(1), acct(3), 7), Err(Error::InsufficientGov));
    e.transfer(TokenId::GOV, acct(1), acct(3), 6).unwrap();
    assert_eq!(e.gov_of(&acct(3)), 6);
    assert_eq!(e.burn_units(TokenId::GOV, acct(3), 1), Err(Error::NotBurnable(TokenId::GOV)));
}

// curation

fn salt(n: u8) -> Salt {
    Salt([n; 32])
}

fn vote(e: &mut E, voter: AccountId, poll: PollId, choice: VoteChoice, stake: u64) {
    let s = salt(voter.0[0]);
    e.commit_vote(voter, poll, commit_hash(choice, &s, poll), stake).unwrap();
}

fn curation_setup() -> (E, TokenId) {
    let mut e = engine();
    let t = token(&mut e, design("T"));
    for who in 1..=4 {
        with_gov(&mut e, acct(who), 1);
    }
    (e, t)
}

#[test]
fn unchallenged_application_is_listed_and_deposit_returned() {
    let (mut e, t) = curation_setup();
    e.apply_listing(acct(1), t, ProposalKind::AddToList).unwrap();
    assert_eq!(e.effective_gov(&acct(1)), 0);
    assert_eq!(e.get_token(t).unwrap().curated_status, CuratedStatus::Applied);
    assert_eq!(e.apply_listing(acct(2), t, ProposalKind::AddToList), Err(Error::ListingExists(t)));
    e.advance_time(99).unwrap();
    assert_eq!(e.touch_listing(t).unwrap(), Some(ListingStatus::Applied { deadline: LogicalTime(100) }));
    e.advance_time(1).unwrap();
    assert_eq!(e.touch_listing(t).unwrap(), Some(ListingStatus::Listed));
    assert_eq!(e.effective_gov(&acct(1)), 10);
    assert_eq!(e.list_tokens(TokenFilter::CuratedOnly).len(), 1);
    assert_eq!(e.apply_listing(acct(2), t, ProposalKind::AddToList), Err(Error::WrongKind(t)));

    e.apply_listing(acct(2), t, ProposalKind::RemoveFromList).unwrap();
    e.advance_time(100).unwrap();
    assert_eq!(e.touch_listing(t).unwrap(), Some(ListingStatus::Removed));
    assert_eq!(e.get_token(t).unwrap().curated_status, CuratedStatus::NotListed);
    assert_eq!(e.challenge(acct(3), t), Err(Error::NoActiveListing(t)));
    assert!(E::replay(e.log()).is_ok());
}

#[test]
fn apply_needs_gov_and_right_kind() {
    let (mut e, t) = curation_setup();
    assert_eq!(e.apply_listing(acct(9), t, ProposalKind::AddToList), Err(Error::InsufficientGov));
    assert_eq!(e.apply_listing(acct(1), t, ProposalKind::RemoveFromList), Err(Error::WrongKind(t)));
    assert_eq!(e.challenge(acct(1), t), Err(Error::NoActiveListing(t)));
}

#[test]
fn challenge_at_last_valid_tick_and_self_challenge() {
    let (mut e, t) = curation_setup();
    with_gov(&mut e, acct(1), 1);
    e.apply_listing(acct(1), t, ProposalKind::AddToList).unwrap();
    e.advance_time(99).unwrap();
    let p = e.challenge(acct(1), t).unwrap();
    assert_eq!(p, PollId(0));
    assert_eq!(e.listing(t).unwrap().status, ListingStatus::Challenged { poll: p });
    assert_eq!(e.challenge(acct(2), t), Err(Error::AlreadyChallenged(t)));
    let poll = e.get_poll(p).unwrap();
    assert_eq!(poll.commit_deadline, LogicalTime(199));
    assert_eq!(poll.reveal_deadline, LogicalTime(299));
}

#[test]
fn commit_reveal_windows() {
    let (mut e, t) = curation_setup();
    e.apply_listing(acct(1), t, ProposalKind::AddToList).unwrap();
    let p = e.challenge(acct(2), t).unwrap();
    let h = commit_hash(VoteChoice::For, &salt(3), p);
    assert_eq!(e.commit_vote(acct(3), p, h, 0), Err(Error::ZeroStake));
    assert_eq!(e.commit_vote(acct(3), p, h, 11), Err(Error::InsufficientGov));
    e.commit_vote(acct(3), p, h, 10).unwrap();
    assert_eq!(e.effective_gov(&acct(3)), 0);
    assert_eq!(e.commit_vote(acct(3), p, h, 1), Err(Error::DuplicateCommit(p)));
    assert_eq!(e.reveal_vote(acct(3), p, VoteChoice::For, salt(3)), Err(Error::RevealTooEarly(p)));
    assert_eq!(e.resolve_poll(p), Err(Error::PollNotEnded(p)));
    e.advance_time(100).unwrap();
    assert_eq!(e.commit_vote(acct(4), p, h, 1), Err(Error::CommitClosed(p)));
    assert_eq!(e.reveal_vote(acct(3), p, VoteChoice::For, salt(4)), Err(Error::HashMismatch));
    assert_eq!(e.reveal_vote(acct(3), p, VoteChoice::Against, salt(3)), Err(Error::HashMismatch));
    assert_eq!(e.reveal_vote(acct(4), p, VoteChoice::For, salt(4)), Err(Error::NoCommit(p)));
    e.reveal_vote(acct(3), p, VoteChoice::For, salt(3)).unwrap();
    assert_eq!(e.reveal_vote(acct(3), p, VoteChoice::For, salt(3)), Err(Error::DuplicateReveal(p)));
    e.advance_time(100).unwrap();
    assert_eq!(e.reveal_vote(acct(3), p, VoteChoice::For, salt(3)), Err(Error::RevealClosed(p)));
    let r = e.resolve_poll(p).unwrap();
    assert_eq!(r.outcome, PollOutcome::ListingWins);
    assert_eq!(e.resolve_poll(p), Err(Error::AlreadyResolved(p)));
    // challenger lost 10: 5 to the applicant, 5 to the only winning voter
    assert_eq!(e.gov_of(&acct(1)), 15);
    assert_eq!(e.gov_of(&acct(2)), 0);
    assert_eq!(e.gov_of(&acct(3)), 15);
    assert_eq!(e.gov().total_locked(), Ok(0));
    assert_eq!(e.get_token(t).unwrap().curated_status, CuratedStatus::Listed);
    assert!(E::replay(e.log()).is_ok());
}

#[test]
fn zero_reveals_fall_to_challenger() {
    let (mut e, t) = curation_setup();
    e.apply_listing(acct(1), t, ProposalKind::AddToList).unwrap();
    let p = e.challenge(acct(2), t).unwrap();
    vote(&mut e, acct(3), p, VoteChoice::For, 5);
    e.advance_time(200).unwrap();
    let r = e.resolve_poll(p).unwrap();
    assert_eq!(r.outcome, PollOutcome::ChallengerWins);
    assert_eq!(r.winner_award, 5);
    assert_eq!(e.gov_of(&acct(2)), 15);
    assert_eq!(e.gov_of(&acct(1)), 5);
    assert_eq!(e.gov_of(&acct(3)), 10);
    assert_eq!(e.listing(t).unwrap().status, ListingStatus::Removed);
    assert_eq!(e.get_token(t).unwrap().curated_status, CuratedStatus::NotListed);
}

#[test]
fn challenged_listed_token_can_be_removed() {
    let (mut e, t) = curation_setup();
    e.apply_listing(acct(1), t, ProposalKind::AddToList).unwrap();
    e.advance_time(100).unwrap();
    let p = e.challenge(acct(2), t).unwrap();
    assert_eq!(e.get_poll(p).unwrap().listing_deposit, 0);
    vote(&mut e, acct(3), p, VoteChoice::Against, 10);
    e.advance_time(100).unwrap();
    e.reveal_vote(acct(3), p, VoteChoice::Against, salt(3)).unwrap();
    e.advance_time(100).unwrap();
    let r = e.resolve_poll(p).unwrap();
    assert_eq!(r.outcome, PollOutcome::ChallengerWins);
    assert_eq!(r.forfeited, 0);
    assert_eq!(e.get_token(t).unwrap().curated_status, CuratedStatus::NotListed);
    assert_eq!(e.gov_of(&acct(2)), 10);
}

#[test]
fn delegated_stake_is_locked_and_forfeits_from_delegations() {
    let (mut e, t) = curation_setup();
    // acct(5) has no GOV of its own; acct(1) delegates all 10 to it.
    e.delegate_gov(acct(1), acct(5), 10).unwrap();
    assert_eq!(e.effective_gov(&acct(1)), 0);
    assert_eq!(e.apply_listing(acct(1), t, ProposalKind::AddToList), Err(Error::InsufficientGov));
    e.apply_listing(acct(5), t, ProposalKind::AddToList).unwrap();
    assert_eq!(e.revoke_delegation(acct(1), acct(5), 1), Err(Error::DelegationLocked));
    let p = e.challenge(acct(2), t).unwrap();
    e.advance_time(200).unwrap();
    e.resolve_poll(p).unwrap();
    // acct(5)'s deposit was backed by acct(1)'s delegation: half of it is gone
    assert_eq!(e.gov_of(&acct(1)), 5);
    assert_eq!(e.gov().delegated(&acct(1), &acct(5)), 5);
    assert_eq!(e.gov_of(&acct(2)), 15);
    e.revoke_delegation(acct(1), acct(5), 5).unwrap();
    assert_eq!(e.effective_gov(&acct(1)), 5);
    assert_eq!(e.effective_gov(&acct(5)), 0);
    assert!(E::replay(e.log()).is_ok());
}

#[test]
fn owner_cannot_commit_fully_delegated_gov() {
    let (mut e, t) = curation_setup();
    e.delegate_gov(acct(3), acct(4), 10).unwrap();
    e.apply_listing(acct(1), t, ProposalKind::AddToList).unwrap();
    let p = e.challenge(acct(2), t).unwrap();
    let h = commit_hash(VoteChoice::For, &salt(3), p);
    assert_eq!(e.commit_vote(acct(3), p, h, 1), Err(Error::InsufficientGov));
    e.commit_vote(acct(4), p, h, 20).unwrap();
    assert_eq!(e.revoke_delegation(acct(3), acct(4), 1), Err(Error::DelegationLocked));
}

// backing

fn backed(e: &mut E, spec: BackingSpec<u64>) -> (TokenId, TokenId) {
    let base = token(e, design("USD"));
    let mut d = design("TREE");
    d.sources_of_value = vec![spec];
    let t = token(e, d);
    (base, t)
}

#[test]
fn swap_pool_deposit_and_redeem() {
    let mut e = engine();
    let base = token(&mut e, design("USD"));
    let mut d = design("TREE");
    d.sources_of_value = vec![BackingSpec::SwapPool { backing_token: base }];
    let t = token(&mut e, d);
    e.mint_units(base, acct(1), 300).unwrap();
    assert_eq!(e.deposit_to_pool(acct(1), t, 0), Ok(0));
    assert_eq!(e.swap_redeem(acct(2), t, 1), Err(Error::EmptyPool(t)));
    assert_eq!(e.deposit_to_pool(acct(1), t, 100), Ok(100));
    assert_eq!(e.deposit_to_pool(acct(1), t, 100), Ok(200));
    assert_eq!(e.deposit_to_pool(acct(1), base, 1), Err(Error::NoSwapPool(base)));
    assert_eq!(e.balance_of(base, &crate::backing::custody_account(t)), Ok(200));

    e.mint_units(t, acct(2), 30).unwrap();
    e.mint_units(t, acct(3), 10).unwrap();
    assert_eq!(e.swap_redeem(acct(2), t, 3), Ok(15));
    assert_eq!(e.swap_redeem(acct(2), t, 27), Ok(185 * 27 / 37));
    let rest = e.pool(t).unwrap().balance;
    assert_eq!(e.swap_redeem(acct(3), t, 10), Ok(rest));
    assert_eq!(e.pool(t).unwrap().balance, 0);
    assert_eq!(e.total_supply(t), Ok(0));
}

#[test]
fn redeem_can_pay_zero() {
    let mut e = engine();
    let (base, t) = backed(&mut e, BackingSpec::SwapPool { backing_token: TokenId(0) });
    e.mint_units(base, acct(1), 10).unwrap();
    e.deposit_to_pool(acct(1), t, 10).unwrap();
    e.mint_units(t, acct(2), 100).unwrap();
    assert_eq!(e.swap_redeem(acct(2), t, 5), Ok(0));
    assert_eq!(e.total_supply(t), Ok(95));
    assert_eq!(e.pool(t).unwrap().balance, 10);
}

#[test]
fn mint_conversion() {
    let mut e = engine();
    let target = token(&mut e, design("B"));
    let mut d = design("A");
    d.sources_of_value = vec![BackingSpec::MintConversion { target_token: target, rate_num: 2, rate_den: 3 }];
    let t = token(&mut e, d);
    e.mint_units(t, acct(1), 20).unwrap();
    assert_eq!(e.mint_convert(acct(1), t, 0), Ok(0));
    assert_eq!(e.mint_convert(acct(1), t, 10), Ok(6));
    assert_eq!(e.balance_of(target, &acct(1)), Ok(6));
    assert_eq!(e.total_supply(t), Ok(10));
    assert_eq!(e.mint_convert(acct(1), target, 1), Err(Error::NoMintConversion(target)));
}

#[test]
fn mint_conversion_respects_target_cap() {
    let mut e = engine();
    let mut td = design("B");
    td.supply = Supply::Capped { max: 5 };
    let target = token(&mut e, td);
    let mut d = design("A");
    d.sources_of_value = vec![BackingSpec::MintConversion { target_token: target, rate_num: 1, rate_den: 1 }];
    let t = token(&mut e, d);
    e.mint_units(t, acct(1), 7).unwrap();
    assert_eq!(assert_unchanged(&e, |e| e.mint_convert(acct(1), t, 7).map(|_| ())), Error::SupplyCapExceeded(target));
}

#[test]
fn coupled_burn_is_paired_and_atomic() {
    let mut e = engine();
    let (base, t) = backed(&mut e, BackingSpec::CoupledBurn { coupled_token: TokenId(0) });
    let custody = crate::backing::custody_account(t);
    e.mint_units(t, acct(1), 5).unwrap();
    e.mint_units(base, custody, 2).unwrap();
    assert_eq!(
        assert_unchanged(&e, |e| e.coupled_burn(acct(1), t, 3)),
        Error::InsufficientCoupledBalance(base)
    );
    e.mint_units(base, custody, 1).unwrap();
    e.coupled_burn(acct(1), t, 3).unwrap();
    assert_eq!((e.total_supply(t), e.total_supply(base)), (Ok(2), Ok(0)));
    let len = e.log().len();
    e.coupled_burn(acct(1), t, 0).unwrap();
    assert_eq!(e.log().len(), len);

    e.mint_units(base, custody, 5).unwrap();
    for n in 0..2 {
        let err = assert_unchanged(&e, |e| {
            e.inject_fault_after(n);
            e.coupled_burn(acct(1), t, 2)
        });
        assert_eq!(err, Error::InjectedFault);
    }
}

#[test]
fn coupled_burn_from_holder() {
    let params = EngineParams { coupled_burn_source: crate::backing::BurnSource::Holder, ..EngineParams::default() };
    let mut e = Engine::new(params).unwrap();
    let (base, t) = backed(&mut e, BackingSpec::CoupledBurn { coupled_token: TokenId(0) });
    e.mint_units(t, acct(1), 5).unwrap();
    e.mint_units(base, acct(1), 1).unwrap();
    assert_eq!(e.coupled_burn(acct(1), t, 2), Err(Error::InsufficientCoupledBalance(base)));
    e.coupled_burn(acct(1), t, 1).unwrap();
    assert_eq!(e.balance_of(base, &acct(1)), Ok(0));
}

#[test]
fn replay_rejects_a_forged_resolution() {
    let (mut e, t) = curation_setup();
    e.apply_listing(acct(1), t, ProposalKind::AddToList).unwrap();
    let p = e.challenge(acct(2), t).unwrap();
    e.advance_time(200).unwrap();
    e.resolve_poll(p).unwrap();
    let mut records = e.log().to_vec();
    let last = records.len() - 1;
    if let Event::PollResolved { resolution, .. } = &mut records[last].event {
        resolution.winner_award += 1;
    }
    let prev = records[last].prev_hash;
    let time = records[last].time;
    records[last] = crate::event::EventRecord::seal(last as u64, prev, time, records[last].event.clone());
    assert!(matches!(E::replay(&records), Err(Error::CorruptLog { seq, .. }) if seq == last as u64));
}

#[test]
fn rep_reasons_are_logged() {
    let mut e = engine();
    token(&mut e, design("A"));
    assert!(e.log().iter().any(|r| matches!(
        r.event,
        Event::RepAwarded { reason: RepReason::TokenCreated, amount: 100, .. }
    )));
}
