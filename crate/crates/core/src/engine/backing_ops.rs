use crate::amount::Amount;
use crate::backing::{conversion_output, custody_account, redemption_payout, BurnSource, Pool};
use crate::error::{Error, Result};
use crate::event::Event;
use crate::ids::{AccountId, TokenId};

use super::Engine;

impl<A: Amount> Engine<A> {
    /// Moves backing units into the token's swap pool. Returns the new pool
    /// balance.
    pub fn deposit_to_pool(&mut self, depositor: AccountId, token: TokenId, amount: A) -> Result<A> {
        self.transact(|tx| {
            let s = &*tx.state;
            s.design(token)?;
            let pool = s.pools.get(&token).ok_or(Error::NoSwapPool(token))?;
            if amount.is_zero() {
                return Ok(pool.balance);
            }
            let backing = pool.backing_token;
            if !s.transferable(backing)? {
                return Err(Error::NonTransferable(backing));
            }
            if s.balance(backing, &depositor)? < amount {
                return Err(Error::InsufficientBalance { token: backing, account: depositor });
            }
            tx.emit(Event::PoolDeposited { token, depositor, amount })?;
            Ok(tx.state.pools[&token].balance)
        })
    }

    /// Burns `units` of `token` and pays the holder its pro-rata share of the
    /// pool: `floor(pool * units / supply)`, priced before the burn.
    pub fn swap_redeem(&mut self, holder: AccountId, token: TokenId, units: A) -> Result<A> {
        self.transact(|tx| {
            let s = &*tx.state;
            s.design(token)?;
            let pool = s.pools.get(&token).ok_or(Error::NoSwapPool(token))?;
            if units.is_zero() {
                return Ok(A::zero());
            }
            if pool.balance.is_zero() {
                return Err(Error::EmptyPool(token));
            }
            if s.balance(token, &holder)? < units {
                return Err(Error::InsufficientBalance { token, account: holder });
            }
            let supply = s.ledger.book(token)?.supply();
            let payout = redemption_payout(pool.balance, units, supply)?;
            tx.emit(Event::Burned { token, from: holder, amount: units })?;
            if !payout.is_zero() {
                tx.emit(Event::PoolPaid { token, holder, payout })?;
            }
            Ok(payout)
        })
    }

    /// Burns `amount` of `token` and mints the converted amount of the
    /// conversion target to the same holder.
    pub fn mint_convert(&mut self, holder: AccountId, token: TokenId, amount: A) -> Result<A> {
        self.transact(|tx| {
            let s = &*tx.state;
            let design = s.design(token)?;
            let (target, num, den) = design.mint_conversion().ok_or(Error::NoMintConversion(token))?;
            if amount.is_zero() {
                return Ok(A::zero());
            }
            if !design.burnable {
                return Err(Error::NotBurnable(token));
            }
            if s.balance(token, &holder)? < amount {
                return Err(Error::InsufficientBalance { token, account: holder });
            }
            let minted = conversion_output(amount, num, den)?;
            tx.emit(Event::Burned { token, from: holder, amount })?;
            if !minted.is_zero() {
                tx.emit(Event::Minted { token: target, to: holder, amount: minted })?;
            }
            Ok(minted)
        })
    }

    /// Burns `amount` of `token` from the holder together with the same amount
    /// of the coupled token, taken from the token's custody account (or from
    /// the holder, depending on engine parameters).
    pub fn coupled_burn(&mut self, holder: AccountId, token: TokenId, amount: A) -> Result<()> {
        self.transact(|tx| {
            let s = &*tx.state;
            let design = s.design(token)?;
            let coupled = design.coupled_burn().ok_or(Error::NoCoupledBurn(token))?;
            if amount.is_zero() {
                return Ok(());
            }
            for t in [token, coupled] {
                if !s.burnable(t)? {
                    return Err(Error::NotBurnable(t));
                }
            }
            if s.balance(token, &holder)? < amount {
                return Err(Error::InsufficientBalance { token, account: holder });
            }
            let source = match s.params.coupled_burn_source {
                BurnSource::Custody => custody_account(token),
                BurnSource::Holder => holder,
            };
            let mut available = s.balance(coupled, &source)?;
            // Units backing the swap pool are not available for burning.
            if source == custody_account(token) {
                if let Some(pool) = s.pools.get(&token).filter(|p| p.backing_token == coupled) {
                    available = available.saturating_sub(pool.balance);
                }
            }
            if available < amount {
                return Err(Error::InsufficientCoupledBalance(coupled));
            }
            tx.emit(Event::Burned { token, from: holder, amount })?;
            tx.emit(Event::Burned { token: coupled, from: source, amount })
        })
    }

    pub fn pool(&self, token: TokenId) -> Option<&Pool<A>> {
        self.state.pools.get(&token)
    }

    pub fn pools(&self) -> impl Iterator<Item = &Pool<A>> {
        self.state.pools.values()
    }
}
