use crate::amount::Amount;
use crate::error::{Error, Result};
use crate::event::Event;
use crate::ids::{AccountId, TokenId};
use crate::reputation::{gov_entitlement, GovState};

use super::Engine;

impl<A: Amount> Engine<A> {
    /// Mints whatever GOV the account's REP entitles it to beyond what it has
    /// already claimed. Returns the newly minted amount (often zero).
    pub fn claim_gov(&mut self, account: AccountId) -> Result<A> {
        self.transact(|tx| {
            let s = &*tx.state;
            let rep = s.balance(TokenId::REP, &account)?;
            let entitled = gov_entitlement(rep, &s.params.rep)?;
            let amount = entitled.saturating_sub(s.gov.claimed(&account));
            if !amount.is_zero() {
                tx.emit(Event::GovClaimed { account, amount })?;
            }
            Ok(amount)
        })
    }

    /// Lends voting power. Ownership stays with `from`.
    pub fn delegate_gov(&mut self, from: AccountId, to: AccountId, amount: A) -> Result<()> {
        self.transact(|tx| {
            if amount.is_zero() || from == to {
                return Ok(());
            }
            let s = &*tx.state;
            let owned = s.balance(TokenId::GOV, &from)?;
            if s.gov.free_owned(&from, owned)? < amount {
                return Err(Error::InsufficientGov);
            }
            tx.emit(Event::GovDelegated { from, to, amount })
        })
    }

    /// Takes delegated voting power back. Fails while the delegate has it
    /// locked in curation.
    pub fn revoke_delegation(&mut self, from: AccountId, to: AccountId, amount: A) -> Result<()> {
        self.transact(|tx| {
            if amount.is_zero() || from == to {
                return Ok(());
            }
            let s = &*tx.state;
            if s.gov.delegated(&from, &to) < amount {
                return Err(Error::NoSuchDelegation);
            }
            if s.effective_gov(&to)? < amount {
                return Err(Error::DelegationLocked);
            }
            tx.emit(Event::DelegationRevoked { from, to, amount })
        })
    }

    pub fn rep_of(&self, account: &AccountId) -> A {
        self.state.balance(TokenId::REP, account).unwrap_or_else(|_| A::zero())
    }

    pub fn gov_of(&self, account: &AccountId) -> A {
        self.state.balance(TokenId::GOV, account).unwrap_or_else(|_| A::zero())
    }

    /// Owned plus received minus given minus locked GOV.
    pub fn effective_gov(&self, account: &AccountId) -> A {
        self.state.effective_gov(account).expect("governance state is consistent")
    }

    pub fn gov(&self) -> &GovState<A> {
        &self.state.gov
    }
}
