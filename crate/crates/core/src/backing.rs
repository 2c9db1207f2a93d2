//! Sources of value behind a token: swap pools, mint conversion, coupled
//! burns and free-text notes.

use serde::{Deserialize, Serialize};

use crate::amount::{self, Amount};
use crate::error::Result;
use crate::ids::{AccountId, TokenId};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "A: Amount")]
#[serde(deny_unknown_fields)]
pub enum BackingSpec<A> {
    /// Holders may redeem units pro rata against a pool of `backing_token`.
    SwapPool { backing_token: TokenId },
    /// Burning a unit mints `rate_num / rate_den` units of `target_token`.
    MintConversion { target_token: TokenId, rate_num: A, rate_den: A },
    /// Every burned unit also burns one unit of `coupled_token`.
    CoupledBurn { coupled_token: TokenId },
    /// Value held outside the engine, described in prose.
    ExternalNote { text: String },
}

impl<A> BackingSpec<A> {
    /// The other token this spec refers to, if any.
    pub fn referenced_token(&self) -> Option<TokenId> {
        match self {
            BackingSpec::SwapPool { backing_token } => Some(*backing_token),
            BackingSpec::MintConversion { target_token, .. } => Some(*target_token),
            BackingSpec::CoupledBurn { coupled_token } => Some(*coupled_token),
            BackingSpec::ExternalNote { .. } => None,
        }
    }
}

/// Where a coupled burn takes the coupled token from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum BurnSource {
    /// The backed token's custody account.
    #[default]
    Custody,
    /// The holder performing the burn.
    Holder,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "A: Amount")]
pub struct Pool<A> {
    pub token: TokenId,
    pub backing_token: TokenId,
    pub balance: A,
    pub deposited: A,
    pub paid_out: A,
}

/// The account holding pooled and coupled units for `token`.
pub fn custody_account(token: TokenId) -> AccountId {
    AccountId::derive(&format!("custody:{}", token.0))
}

/// Pro-rata payout for redeeming `units` of a token with `outstanding`
/// supply against a pool holding `pool_balance`: `floor(pool * units / outstanding)`.
pub fn redemption_payout<A: Amount>(pool_balance: A, units: A, outstanding: A) -> Result<A> {
    if outstanding.is_zero() {
        return Ok(A::zero());
    }
    amount::mul_div_floor(pool_balance, units, outstanding)
}

/// Target units minted when converting `amount` at `rate_num / rate_den`.
pub fn conversion_output<A: Amount>(amount: A, rate_num: A, rate_den: A) -> Result<A> {
    amount::mul_div_floor(amount, rate_num, rate_den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn floor_examples() {
        assert_eq!(redemption_payout::<u64>(10, 5, 100).unwrap(), 0);
        assert_eq!(redemption_payout::<u64>(10, 100, 100).unwrap(), 10);
        assert_eq!(conversion_output::<u64>(10, 2, 3).unwrap(), 6);
        assert_eq!(conversion_output::<u64>(7, 1, 1).unwrap(), 7);
    }

    #[test]
    fn custody_accounts_are_per_token() {
        assert_ne!(custody_account(TokenId(0)), custody_account(TokenId(1)));
    }

    proptest! {
        #[test]
        fn payout_is_monotone_and_bounded(pool in 0u64..1_000_000, supply in 1u64..1_000_000, a in 0u64..1_000_000, b in 0u64..1_000_000) {
            let (j, k) = (a.min(b) % (supply + 1), a.max(b) % (supply + 1));
            let (j, k) = (j.min(k), j.max(k));
            let pj = redemption_payout(pool, j, supply).unwrap();
            let pk = redemption_payout(pool, k, supply).unwrap();
            prop_assert!(pj <= pk);
            prop_assert!(pk <= pool);
            prop_assert_eq!(redemption_payout(pool, supply, supply).unwrap(), pool);
        }
    }
}
