//! Multi-token balance book.
//!
//! Pure bookkeeping: no policy checks (transferability, caps, burnability)
//! live here. Those belong to the engine, which consults token designs
//! before touching the book.

use std::collections::BTreeMap;

use crate::amount::{self, Amount};
use crate::error::{Error, Result};
use crate::ids::{AccountId, TokenId};

/// Balances and supply counters for one token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenBook<A> {
    balances: BTreeMap<AccountId, A>,
    supply: A,
    minted: A,
    burned: A,
}

impl<A: Amount> Default for TokenBook<A> {
    fn default() -> Self {
        Self { balances: BTreeMap::new(), supply: A::zero(), minted: A::zero(), burned: A::zero() }
    }
}

impl<A: Amount> TokenBook<A> {
    pub fn balance(&self, account: &AccountId) -> A {
        self.balances.get(account).copied().unwrap_or_else(A::zero)
    }

    pub fn supply(&self) -> A {
        self.supply
    }

    /// Units ever minted.
    pub fn minted(&self) -> A {
        self.minted
    }

    /// Units ever burned.
    pub fn burned(&self) -> A {
        self.burned
    }

    /// Non-zero balances in account order.
    pub fn holders(&self) -> impl Iterator<Item = (&AccountId, &A)> {
        self.balances.iter()
    }

    fn credit(&mut self, account: AccountId, amount: A) -> Result<()> {
        if amount.is_zero() {
            return Ok(());
        }
        let slot = self.balances.entry(account).or_insert_with(A::zero);
        *slot = amount::add(*slot, amount)?;
        Ok(())
    }

    fn debit(&mut self, token: TokenId, account: AccountId, amount: A) -> Result<()> {
        if amount.is_zero() {
            return Ok(());
        }
        let held = self.balance(&account);
        let rest = held
            .checked_sub(&amount)
            .ok_or(Error::InsufficientBalance { token, account })?;
        if rest.is_zero() {
            self.balances.remove(&account);
        } else {
            self.balances.insert(account, rest);
        }
        Ok(())
    }
}

/// Balance book for every token the engine knows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ledger<A> {
    books: BTreeMap<TokenId, TokenBook<A>>,
}

impl<A: Amount> Default for Ledger<A> {
    fn default() -> Self {
        Self { books: BTreeMap::new() }
    }
}

impl<A: Amount> Ledger<A> {
    pub fn open(&mut self, token: TokenId) {
        self.books.entry(token).or_default();
    }

    pub fn book(&self, token: TokenId) -> Result<&TokenBook<A>> {
        self.books.get(&token).ok_or(Error::UnknownToken(token))
    }

    pub fn books(&self) -> impl Iterator<Item = (&TokenId, &TokenBook<A>)> {
        self.books.iter()
    }

    fn book_mut(&mut self, token: TokenId) -> Result<&mut TokenBook<A>> {
        self.books.get_mut(&token).ok_or(Error::UnknownToken(token))
    }

    pub fn balance(&self, token: TokenId, account: &AccountId) -> Result<A> {
        Ok(self.book(token)?.balance(account))
    }

    pub fn mint(&mut self, token: TokenId, to: AccountId, amount: A) -> Result<()> {
        let book = self.book_mut(token)?;
        let supply = amount::add(book.supply, amount)?;
        let minted = amount::add(book.minted, amount)?;
        book.credit(to, amount)?;
        book.supply = supply;
        book.minted = minted;
        Ok(())
    }

    pub fn burn(&mut self, token: TokenId, from: AccountId, amount: A) -> Result<()> {
        let book = self.book_mut(token)?;
        let burned = amount::add(book.burned, amount)?;
        book.debit(token, from, amount)?;
        book.supply = book.supply - amount;
        book.burned = burned;
        Ok(())
    }

    /// Moves units from several holders to several recipients at once. The
    /// two sides must sum to the same amount; supply is unchanged.
    pub(crate) fn reassign(&mut self, token: TokenId, debits: &[(AccountId, A)], credits: &[(AccountId, A)]) -> Result<()> {
        let sum = |xs: &[(AccountId, A)]| xs.iter().try_fold(A::zero(), |acc, (_, v)| amount::add(acc, *v));
        if sum(debits)? != sum(credits)? {
            return Err(Error::Overflow);
        }
        let book = self.book_mut(token)?;
        for (account, amount) in debits {
            book.debit(token, *account, *amount)?;
        }
        for (account, amount) in credits {
            book.credit(*account, *amount)?;
        }
        Ok(())
    }

    pub fn transfer(&mut self, token: TokenId, from: AccountId, to: AccountId, amount: A) -> Result<()> {
        let book = self.book_mut(token)?;
        if book.balance(&from) < amount {
            return Err(Error::InsufficientBalance { token, account: from });
        }
        if from == to {
            return Ok(());
        }
        // Credit first can only fail on overflow, which leaves the debit undone.
        book.credit(to, amount)?;
        book.debit(token, from, amount)
    }
}
