//! Reputation (REP) and governance (GOV) accounting.
//!
//! GOV ownership lives in the ledger. This module tracks what sits on top of
//! ownership: delegations, curation locks and how much GOV each account has
//! already claimed against its reputation.
//!
//! `effective(x) = owned(x) + received(x) - given(x) - locked(x)`. Summed over
//! all accounts the delegation terms cancel, so `Σ effective + Σ locked`
//! equals the GOV supply.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::amount::{self, Amount};
use crate::error::{Error, Result};
use crate::ids::AccountId;
use crate::params::RepConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RepReason {
    TokenCreated,
    ClaimApproved,
}

/// A live delegation of GOV voting power.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "A: Amount")]
pub struct GovDelegation<A> {
    pub from: AccountId,
    pub to: AccountId,
    pub amount: A,
    pub active: bool,
}

/// `floor(rep / gov_threshold) * gov_per_level`.
pub fn gov_entitlement<A: Amount>(rep: A, config: &RepConfig<A>) -> Result<A> {
    amount::mul(rep / config.gov_threshold, config.gov_per_level)
}

fn get<A: Amount>(map: &BTreeMap<AccountId, A>, k: &AccountId) -> A {
    map.get(k).copied().unwrap_or_else(A::zero)
}

fn bump<A: Amount>(map: &mut BTreeMap<AccountId, A>, k: AccountId, by: A) -> Result<()> {
    let v = amount::add(get(map, &k), by)?;
    map.insert(k, v);
    Ok(())
}

fn drop_by<A: Amount>(map: &mut BTreeMap<AccountId, A>, k: AccountId, by: A) -> Result<()> {
    let v = get(map, &k).checked_sub(&by).ok_or(Error::Overflow)?;
    if v.is_zero() {
        map.remove(&k);
    } else {
        map.insert(k, v);
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GovState<A> {
    claimed: BTreeMap<AccountId, A>,
    delegations: BTreeMap<(AccountId, AccountId), A>,
    given: BTreeMap<AccountId, A>,
    received: BTreeMap<AccountId, A>,
    locked: BTreeMap<AccountId, A>,
}

impl<A: Amount> Default for GovState<A> {
    fn default() -> Self {
        Self {
            claimed: BTreeMap::new(),
            delegations: BTreeMap::new(),
            given: BTreeMap::new(),
            received: BTreeMap::new(),
            locked: BTreeMap::new(),
        }
    }
}

impl<A: Amount> GovState<A> {
    pub fn claimed(&self, account: &AccountId) -> A {
        get(&self.claimed, account)
    }

    pub fn given(&self, account: &AccountId) -> A {
        get(&self.given, account)
    }

    pub fn received(&self, account: &AccountId) -> A {
        get(&self.received, account)
    }

    pub fn locked(&self, account: &AccountId) -> A {
        get(&self.locked, account)
    }

    pub fn total_locked(&self) -> Result<A> {
        self.locked.values().try_fold(A::zero(), |acc, v| amount::add(acc, *v))
    }

    pub fn delegated(&self, from: &AccountId, to: &AccountId) -> A {
        self.delegations.get(&(*from, *to)).copied().unwrap_or_else(A::zero)
    }

    pub fn delegations(&self) -> impl Iterator<Item = GovDelegation<A>> + '_ {
        self.delegations
            .iter()
            .map(|(&(from, to), &amount)| GovDelegation { from, to, amount, active: !amount.is_zero() })
    }

    /// Accounts that touch governance state at all.
    pub fn accounts(&self) -> impl Iterator<Item = &AccountId> {
        self.claimed.keys().chain(self.given.keys()).chain(self.received.keys()).chain(self.locked.keys())
    }

    /// Voting power given the account's owned GOV. Never negative for a
    /// consistent state; an inconsistent one reports overflow.
    pub fn effective(&self, account: &AccountId, owned: A) -> Result<A> {
        let plus = amount::add(owned, self.received(account))?;
        let minus = amount::add(self.given(account), self.locked(account))?;
        plus.checked_sub(&minus).ok_or(Error::Overflow)
    }

    /// Owned GOV not delegated away and not needed to cover locks.
    pub fn free_owned(&self, account: &AccountId, owned: A) -> Result<A> {
        let undelegated = owned.checked_sub(&self.given(account)).ok_or(Error::Overflow)?;
        Ok(undelegated.min(self.effective(account, owned)?))
    }

    pub(crate) fn record_claim(&mut self, account: AccountId, minted: A) -> Result<()> {
        bump(&mut self.claimed, account, minted)
    }

    pub(crate) fn delegate(&mut self, from: AccountId, to: AccountId, amount: A) -> Result<()> {
        let cur = self.delegated(&from, &to);
        self.delegations.insert((from, to), amount::add(cur, amount)?);
        bump(&mut self.given, from, amount)?;
        bump(&mut self.received, to, amount)
    }

    pub(crate) fn revoke(&mut self, from: AccountId, to: AccountId, amount: A) -> Result<()> {
        let cur = self.delegated(&from, &to);
        let rest = cur.checked_sub(&amount).ok_or(Error::NoSuchDelegation)?;
        if rest.is_zero() {
            self.delegations.remove(&(from, to));
        } else {
            self.delegations.insert((from, to), rest);
        }
        drop_by(&mut self.given, from, amount)?;
        drop_by(&mut self.received, to, amount)
    }

    pub(crate) fn lock(&mut self, account: AccountId, amount: A) -> Result<()> {
        bump(&mut self.locked, account, amount)
    }

    pub(crate) fn unlock(&mut self, account: AccountId, amount: A) -> Result<()> {
        drop_by(&mut self.locked, account, amount)
    }

    /// Delegations into `account`, lowest delegator first.
    pub(crate) fn delegators_of(&self, account: &AccountId) -> Vec<(AccountId, A)> {
        self.delegations
            .iter()
            .filter(|((_, to), _)| to == account)
            .map(|(&(from, _), &amt)| (from, amt))
            .collect()
    }
}
