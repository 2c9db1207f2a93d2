//! A six-token economy and random operation sequences over it. Failing
//! operations are part of the mix; they must leave no trace.

use std::collections::BTreeSet;

use pat_core::{
    commit_hash, custody_account, AccountId, BackingSpec, Engine, EngineParams, MintingPolicy, PollId, ProposalKind,
    Salt, Supply, TokenDesign, TokenId, VerifierSpec, VoteChoice,
};
use proptest::prelude::*;

pub const ACCOUNTS: u8 = 6;
pub const TOKENS: u64 = 6;

pub fn acct(n: u8) -> AccountId {
    AccountId([n % ACCOUNTS + 1; 32])
}

#[derive(Debug, Clone)]
pub enum Op {
    Mint(u64, u8, u64),
    Burn(u64, u8, u64),
    Transfer(u64, u8, u8, u64),
    Claim(u64, u8, u64),
    Approve(u64, bool),
    Deposit(u8, u64),
    Redeem(u8, u64),
    Convert(u8, u64),
    Coupled(u8, u64),
    ClaimGov(u8),
    Delegate(u8, u8, u64),
    Revoke(u8, u8, u64),
    Apply(u64, u8, bool),
    Challenge(u64, u8),
    Commit(u8, u8, u64),
    Reveal(u8, u8),
    Resolve(u8),
    Advance(u64),
}

pub fn op() -> impl Strategy<Value = Op> {
    let t = 0..TOKENS;
    let a = any::<u8>();
    let amt = 0u64..40;
    prop_oneof![
        4 => (t.clone(), a.clone(), amt.clone()).prop_map(|(t, a, n)| Op::Mint(t, a, n)),
        2 => (t.clone(), a.clone(), amt.clone()).prop_map(|(t, a, n)| Op::Burn(t, a, n)),
        4 => (t.clone(), a.clone(), a.clone(), amt.clone()).prop_map(|(t, f, to, n)| Op::Transfer(t, f, to, n)),
        3 => (t.clone(), a.clone(), 0u64..4).prop_map(|(t, a, q)| Op::Claim(t, a, q)),
        2 => (0u64..200, any::<bool>()).prop_map(|(c, y)| Op::Approve(c, y)),
        2 => (a.clone(), amt.clone()).prop_map(|(a, n)| Op::Deposit(a, n)),
        2 => (a.clone(), amt.clone()).prop_map(|(a, n)| Op::Redeem(a, n)),
        1 => (a.clone(), amt.clone()).prop_map(|(a, n)| Op::Convert(a, n)),
        1 => (a.clone(), amt.clone()).prop_map(|(a, n)| Op::Coupled(a, n)),
        2 => a.clone().prop_map(Op::ClaimGov),
        2 => (a.clone(), a.clone(), 0u64..15).prop_map(|(f, to, n)| Op::Delegate(f, to, n)),
        1 => (a.clone(), a.clone(), 0u64..15).prop_map(|(f, to, n)| Op::Revoke(f, to, n)),
        2 => (t.clone(), a.clone(), any::<bool>()).prop_map(|(t, a, add)| Op::Apply(t, a, add)),
        2 => (t, a.clone()).prop_map(|(t, a)| Op::Challenge(t, a)),
        4 => (a.clone(), 0u8..4, 1u64..8).prop_map(|(v, p, s)| Op::Commit(v, p, s)),
        8 => (a.clone(), 0u8..4).prop_map(|(v, p)| Op::Reveal(v, p)),
        2 => (0u8..4).prop_map(Op::Resolve),
        3 => (1u64..8).prop_map(Op::Advance),
    ]
}

/// Each voter sides the same way in a given poll, so reveals match commits.
pub fn choice(voter: u8, poll: u8) -> VoteChoice {
    if (voter % ACCOUNTS + poll) % 2 == 0 {
        VoteChoice::For
    } else {
        VoteChoice::Against
    }
}

pub fn salt(voter: u8) -> Salt {
    Salt([voter % ACCOUNTS; 32])
}

pub fn economy() -> Engine {
    let params = EngineParams {
        tcr: pat_core::TcrParams {
            min_deposit: 5,
            apply_stage_ticks: 10,
            commit_stage_ticks: 15,
            reveal_stage_ticks: 15,
            ..Default::default()
        },
        rep: pat_core::RepConfig { rep_per_creation: 100, rep_per_claim: 20, gov_threshold: 50, gov_per_level: 10 },
        ..Default::default()
    };
    let mut e = Engine::new(params).unwrap();
    let plain = |s: &str| TokenDesign::simple(s, s);
    let creator = acct(5);
    // 0: base currency
    e.create_token(creator, plain("BASE")).unwrap();
    // 1: pool-backed by BASE
    let mut d = plain("POOL");
    d.sources_of_value = vec![BackingSpec::SwapPool { backing_token: TokenId(0) }];
    e.create_token(creator, d).unwrap();
    // 2: capped target of a conversion
    let mut d = plain("CAP");
    d.supply = Supply::Capped { max: 400 };
    e.create_token(creator, d).unwrap();
    // 3: converts into CAP at 2/3, proportional minting
    let mut d = plain("CONV");
    d.sources_of_value =
        vec![BackingSpec::MintConversion { target_token: TokenId(2), rate_num: 2, rate_den: 3 }];
    d.minting_policy = MintingPolicy::ProportionalToQuantity { unit_per_quantity: 2 };
    e.create_token(creator, d).unwrap();
    // 4: coupled burn against BASE
    let mut d = plain("PAIR");
    d.sources_of_value = vec![BackingSpec::CoupledBurn { coupled_token: TokenId(0) }];
    e.create_token(creator, d).unwrap();
    // 5: locked-down token behind an approver
    let mut d = plain("GATE");
    d.transferable = false;
    d.burnable = false;
    d.verifiers = vec![VerifierSpec::DesignatedApprover { approver: acct(0) }];
    e.create_token(creator, d).unwrap();
    e
}

pub fn apply(e: &mut Engine, op: &Op) {
    let _ = match *op {
        Op::Mint(t, a, n) => e.mint_units(TokenId(t), acct(a), n),
        Op::Burn(t, a, n) => e.burn_units(TokenId(t), acct(a), n),
        Op::Transfer(t, f, to, n) => {
            let token = if t == 5 { TokenId::GOV } else { TokenId(t) };
            // Also move BASE into custody so coupled burns have something to draw on.
            let to = if to % 7 == 0 { custody_account(TokenId(4)) } else { acct(to) };
            e.transfer(token, acct(f), to, n)
        }
        Op::Claim(t, a, q) => e.submit_claim(acct(a), TokenId(t), q).map(|_| ()),
        Op::Approve(c, yes) => e
            .submit_attestation(&pat_core::Attestation {
                claim: pat_core::ClaimId(c),
                verifier_index: 0,
                payload: pat_core::AttestationPayload::Approval { approver: acct(0), approve: yes },
            })
            .map(|_| ()),
        Op::Deposit(a, n) => e.deposit_to_pool(acct(a), TokenId(1), n).map(|_| ()),
        Op::Redeem(a, n) => e.swap_redeem(acct(a), TokenId(1), n).map(|_| ()),
        Op::Convert(a, n) => e.mint_convert(acct(a), TokenId(3), n).map(|_| ()),
        Op::Coupled(a, n) => e.coupled_burn(acct(a), TokenId(4), n),
        Op::ClaimGov(a) => e.claim_gov(acct(a)).map(|_| ()),
        Op::Delegate(f, to, n) => e.delegate_gov(acct(f), acct(to), n),
        Op::Revoke(f, to, n) => e.revoke_delegation(acct(f), acct(to), n),
        Op::Apply(t, a, add) => {
            let kind = if add { ProposalKind::AddToList } else { ProposalKind::RemoveFromList };
            e.apply_listing(acct(a), TokenId(t), kind)
        }
        Op::Challenge(t, a) => e.challenge(acct(a), TokenId(t)).map(|_| ()),
        Op::Commit(v, p, stake) => {
            let poll = PollId(u64::from(p));
            e.commit_vote(acct(v), poll, commit_hash(choice(v, p), &salt(v), poll), stake)
        }
        Op::Reveal(v, p) => e.reveal_vote(acct(v), PollId(u64::from(p)), choice(v, p), salt(v)),
        Op::Resolve(p) => e.resolve_poll(PollId(u64::from(p))).map(|_| ()),
        Op::Advance(n) => e.advance_time(n).map(|_| ()),
    };
}

pub fn check_conservation(e: &Engine) -> Result<(), String> {
    for (token, book) in e.ledger().books() {
        let sum: u128 = book.holders().map(|(_, b)| u128::from(*b)).sum();
        let net = u128::from(book.minted()) - u128::from(book.burned());
        if net != sum || sum != u128::from(book.supply()) {
            return Err(format!("token {token}: minted-burned {net}, balances {sum}, supply {}", book.supply()));
        }
    }
    let gov = e.gov();
    let mut accounts: BTreeSet<AccountId> = gov.accounts().copied().collect();
    accounts.extend(e.ledger().book(TokenId::GOV).unwrap().holders().map(|(a, _)| *a));
    let effective: u64 = accounts.iter().map(|a| e.effective_gov(a)).sum();
    let locked = gov.total_locked().unwrap();
    if effective + locked != e.total_supply(TokenId::GOV).unwrap() {
        return Err(format!("GOV: effective {effective} + locked {locked} != supply"));
    }
    for pool in e.pools() {
        if pool.deposited - pool.paid_out != pool.balance {
            return Err(format!("pool {}: deposits minus payouts != balance", pool.token));
        }
        if e.balance_of(pool.backing_token, &custody_account(pool.token)).unwrap() < pool.balance {
            return Err(format!("pool {}: custody holds less than the pool", pool.token));
        }
    }
    Ok(())
}

/// Runs `ops` and checks [`check_conservation`] after every logged event by
/// replaying the log. Also checks that the replay reaches the same head.
pub fn check_sequence(ops: &[Op]) -> Result<(), String> {
    let mut e = economy();
    for op in ops {
        apply(&mut e, op);
    }
    let mut failure = None;
    let replayed = Engine::replay_with(e.log(), |prefix, record| {
        if failure.is_none() {
            if let Err(msg) = check_conservation(prefix) {
                failure = Some(format!("after seq {}: {msg}", record.seq));
            }
        }
    })
    .map_err(|e| e.to_string())?;
    if let Some(f) = failure {
        return Err(f);
    }
    if replayed.head_hash() != e.head_hash() {
        return Err("replay reached a different head".into());
    }
    Ok(())
}

pub fn sequences(len: usize) -> impl Strategy<Value = Vec<Op>> {
    prop::collection::vec(op(), len)
}
