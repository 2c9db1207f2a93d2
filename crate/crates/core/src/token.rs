//! Token designs and their validation.

use serde::{Deserialize, Serialize};

use crate::amount::Amount;
use crate::backing::BackingSpec;
use crate::ids::{AccountId, LogicalTime, TokenId};
use crate::verifier::VerifierSpec;

/// Longest accepted token name, in bytes.
pub const MAX_NAME_LEN: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "A: Amount")]
pub enum Supply<A> {
    Capped { max: A },
    Uncapped,
}

/// What brings new units into existence. Only `Action` can be chosen by a
/// token creator; the other two need protocol-level permissions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CreationCondition {
    #[default]
    Action,
    Consensus,
    Both,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(bound = "A: Amount")]
#[serde(deny_unknown_fields)]
pub enum UnconditionalCreation<A> {
    #[default]
    None,
    /// Pre-mint `amount` at creation; claims mint the rest.
    Partial { amount: A, to: AccountId },
    /// Pre-mint the whole supply; the token cannot be claimed.
    All { amount: A, to: AccountId },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "A: Amount")]
#[serde(deny_unknown_fields)]
pub enum MintingPolicy<A> {
    FixedPerClaim { n: A },
    ProportionalToQuantity { unit_per_quantity: A },
}

/// Everything a creator chooses about a positive-action token.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "A: Amount")]
#[serde(deny_unknown_fields)]
pub struct TokenDesign<A> {
    pub name: String,
    pub symbol: String,
    pub supply: Supply<A>,
    pub burnable: bool,
    pub transferable: bool,
    #[serde(default)]
    pub creation_condition: CreationCondition,
    #[serde(default)]
    pub unconditional_creation: UnconditionalCreation<A>,
    pub minting_policy: MintingPolicy<A>,
    #[serde(default)]
    pub verifiers: Vec<VerifierSpec<A>>,
    #[serde(default)]
    pub sources_of_value: Vec<BackingSpec<A>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum DesignViolation {
    EmptyName,
    NameTooLong,
    BadSymbol,
    CreationConditionUnsupported,
    PreMintExceedsCap,
    VerifiersOnPreMintedToken,
    ZeroMintAmount,
    /// Verifier at this index has inconsistent parameters.
    BadVerifier(usize),
    /// Backing spec at this index refers to the backed token itself.
    SelfBacking(usize),
    /// Backing spec at this index has a zero rate denominator.
    ZeroRateDenominator(usize),
    /// Backing spec at this index refers to REP or GOV.
    SystemTokenBacking(usize),
    /// A backing spec or verifier names a token that does not exist.
    UnknownReferencedToken(TokenId),
}

impl<A: Amount> TokenDesign<A> {
    /// A minimal claimable design: uncapped, transferable, burnable, one unit
    /// per claim, no verifiers.
    pub fn simple(name: &str, symbol: &str) -> Self {
        Self {
            name: name.to_owned(),
            symbol: symbol.to_owned(),
            supply: Supply::Uncapped,
            burnable: true,
            transferable: true,
            creation_condition: CreationCondition::Action,
            unconditional_creation: UnconditionalCreation::None,
            minting_policy: MintingPolicy::FixedPerClaim { n: A::one() },
            verifiers: Vec::new(),
            sources_of_value: Vec::new(),
        }
    }

    pub fn cap(&self) -> Option<A> {
        match self.supply {
            Supply::Capped { max } => Some(max),
            Supply::Uncapped => None,
        }
    }

    pub fn is_claimable(&self) -> bool {
        self.creation_condition == CreationCondition::Action
            && !matches!(self.unconditional_creation, UnconditionalCreation::All { .. })
    }

    pub fn swap_backing(&self) -> Option<TokenId> {
        self.sources_of_value.iter().find_map(|s| match s {
            BackingSpec::SwapPool { backing_token } => Some(*backing_token),
            _ => None,
        })
    }

    pub fn mint_conversion(&self) -> Option<(TokenId, A, A)> {
        self.sources_of_value.iter().find_map(|s| match s {
            BackingSpec::MintConversion { target_token, rate_num, rate_den } => {
                Some((*target_token, *rate_num, *rate_den))
            }
            _ => None,
        })
    }

    pub fn coupled_burn(&self) -> Option<TokenId> {
        self.sources_of_value.iter().find_map(|s| match s {
            BackingSpec::CoupledBurn { coupled_token } => Some(*coupled_token),
            _ => None,
        })
    }
}

/// Checks a design on its own, without reference to existing tokens.
/// Returns every violation, in a fixed order.
pub fn validate_design<A: Amount>(design: &TokenDesign<A>) -> Result<(), Vec<DesignViolation>> {
    let mut out = Vec::new();
    if design.name.is_empty() {
        out.push(DesignViolation::EmptyName);
    }
    if design.name.len() > MAX_NAME_LEN {
        out.push(DesignViolation::NameTooLong);
    }
    let symbol_ok = (1..=8).contains(&design.symbol.len())
        && design.symbol.bytes().all(|b| b.is_ascii_uppercase());
    if !symbol_ok {
        out.push(DesignViolation::BadSymbol);
    }
    if design.creation_condition != CreationCondition::Action {
        out.push(DesignViolation::CreationConditionUnsupported);
    }
    match &design.unconditional_creation {
        UnconditionalCreation::None => {}
        UnconditionalCreation::Partial { amount, .. } | UnconditionalCreation::All { amount, .. } => {
            if design.cap().is_some_and(|max| *amount > max) {
                out.push(DesignViolation::PreMintExceedsCap);
            }
        }
    }
    let pre_mints_all = matches!(design.unconditional_creation, UnconditionalCreation::All { .. });
    if pre_mints_all && !design.verifiers.is_empty() {
        out.push(DesignViolation::VerifiersOnPreMintedToken);
    }
    let per_claim = match design.minting_policy {
        MintingPolicy::FixedPerClaim { n } => n,
        MintingPolicy::ProportionalToQuantity { unit_per_quantity } => unit_per_quantity,
    };
    if !pre_mints_all && per_claim.is_zero() {
        out.push(DesignViolation::ZeroMintAmount);
    }
    for (i, v) in design.verifiers.iter().enumerate() {
        let ok = match v {
            VerifierSpec::PeerQuorum { attestors, k } => {
                let distinct = attestors.iter().collect::<std::collections::BTreeSet<_>>().len();
                *k >= 1 && (*k as usize) <= attestors.len() && distinct == attestors.len()
            }
            VerifierSpec::Location { radius_m, .. } => *radius_m >= 1,
            VerifierSpec::ClaimWindow { per_ticks, .. } => *per_ticks >= 1,
            _ => true,
        };
        if !ok {
            out.push(DesignViolation::BadVerifier(i));
        }
    }
    for (i, s) in design.sources_of_value.iter().enumerate() {
        if let BackingSpec::MintConversion { rate_den, .. } = s {
            if rate_den.is_zero() {
                out.push(DesignViolation::ZeroRateDenominator(i));
            }
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// Where a token stands in the curated registry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CuratedStatus {
    #[default]
    NotListed,
    Applied,
    Listed,
    Challenged,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "A: Amount")]
pub struct TokenRecord<A> {
    pub id: TokenId,
    pub design: TokenDesign<A>,
    pub creator: AccountId,
    pub created_at: LogicalTime,
    pub curated_status: CuratedStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenFilter {
    All,
    CuratedOnly,
}
