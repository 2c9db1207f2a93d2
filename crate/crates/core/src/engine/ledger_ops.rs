use crate::amount::Amount;
use crate::error::{Error, Result};
use crate::event::Event;
use crate::ids::{AccountId, LogicalTime, TokenId};
use crate::ledger::TokenBook;

use super::{Engine, State};

impl<A: Amount> State<A> {
    pub(crate) fn transferable(&self, token: TokenId) -> Result<bool> {
        Ok(match token {
            TokenId::REP => false,
            TokenId::GOV => self.params.gov_transferable,
            _ => self.design(token)?.transferable,
        })
    }

    pub(crate) fn burnable(&self, token: TokenId) -> Result<bool> {
        if token.is_system() {
            return Ok(false);
        }
        Ok(self.design(token)?.burnable)
    }
}

impl<A: Amount> Engine<A> {
    /// Moves `amount` units of `token` between two accounts.
    ///
    /// GOV can only be transferred when the engine allows it, and then only
    /// out of the sender's undelegated, unlocked holdings.
    pub fn transfer(&mut self, token: TokenId, from: AccountId, to: AccountId, amount: A) -> Result<()> {
        self.transact(|tx| {
            let s = &*tx.state;
            s.ledger.book(token)?;
            if !s.transferable(token)? {
                return Err(Error::NonTransferable(token));
            }
            if amount.is_zero() {
                return Ok(());
            }
            let owned = s.balance(token, &from)?;
            if owned < amount {
                return Err(Error::InsufficientBalance { token, account: from });
            }
            if token == TokenId::GOV && s.gov.free_owned(&from, owned)? < amount {
                return Err(Error::InsufficientGov);
            }
            tx.emit(Event::Transferred { token, from, to, amount })
        })
    }

    /// Creates units out of nothing. Meant for tooling and tests; claims,
    /// conversions and pre-mints go through their own operations. REP and GOV
    /// cannot be minted this way.
    pub fn mint_units(&mut self, token: TokenId, to: AccountId, amount: A) -> Result<()> {
        self.transact(|tx| {
            if token.is_system() {
                return Err(Error::RestrictedMint(token));
            }
            tx.state.design(token)?;
            if amount.is_zero() {
                return Ok(());
            }
            tx.emit(Event::Minted { token, to, amount })
        })
    }

    pub fn burn_units(&mut self, token: TokenId, from: AccountId, amount: A) -> Result<()> {
        self.transact(|tx| {
            let s = &*tx.state;
            s.ledger.book(token)?;
            if !s.burnable(token)? {
                return Err(Error::NotBurnable(token));
            }
            if amount.is_zero() {
                return Ok(());
            }
            if s.balance(token, &from)? < amount {
                return Err(Error::InsufficientBalance { token, account: from });
            }
            tx.emit(Event::Burned { token, from, amount })
        })
    }

    pub fn advance_time(&mut self, ticks: u64) -> Result<LogicalTime> {
        self.transact(|tx| {
            if ticks == 0 {
                return Err(Error::ZeroTicks);
            }
            let now = tx.state.now.plus(ticks)?;
            tx.emit(Event::TimeAdvanced { ticks, now })?;
            Ok(now)
        })
    }

    pub fn balance_of(&self, token: TokenId, account: &AccountId) -> Result<A> {
        self.state.balance(token, account)
    }

    pub fn total_supply(&self, token: TokenId) -> Result<A> {
        Ok(self.state.ledger.book(token)?.supply())
    }

    pub fn book(&self, token: TokenId) -> Result<&TokenBook<A>> {
        self.state.ledger.book(token)
    }
}
