use crate::ids::{AccountId, ClaimId, PollId, TokenId};
use crate::token::DesignViolation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure an engine operation can report. A failed operation leaves
/// the engine state and log untouched, with one documented exception: a
/// claim whose finalization hits a supply cap records the failure.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    // ledger
    #[error("unknown token {0}")]
    UnknownToken(TokenId),
    #[error("token {0} is not transferable")]
    NonTransferable(TokenId),
    #[error("token {0} is not burnable")]
    NotBurnable(TokenId),
    #[error("account {account} holds too little of token {token}")]
    InsufficientBalance { token: TokenId, account: AccountId },
    #[error("minting would exceed the supply cap of token {0}")]
    SupplyCapExceeded(TokenId),
    #[error("arithmetic overflow")]
    Overflow,
    #[error("advance_time needs at least one tick")]
    ZeroTicks,
    #[error("token {0} is minted only by its reputation rules")]
    RestrictedMint(TokenId),

    // token factory
    #[error("invalid token design: {0:?}")]
    InvalidDesign(Vec<DesignViolation>),

    // claims
    #[error("token {0} cannot be claimed")]
    TokenNotClaimable(TokenId),
    #[error("unknown claim {0}")]
    UnknownClaim(ClaimId),
    #[error("claim {0} is closed")]
    ClaimClosed(ClaimId),
    #[error("claim {claim} has no verifier at index {index}")]
    IndexOutOfRange { claim: ClaimId, index: u32 },
    #[error("attestation payload does not match the verifier")]
    PayloadMismatch,
    #[error("oracle signature does not verify")]
    BadOracleSignature,
    #[error("attestor is not authorised for this verifier")]
    UnauthorizedAttestor,
    #[error("attestation already recorded")]
    DuplicateAttestation,
    #[error("claim {0} has unapproved verifier slots")]
    NotAllApproved(ClaimId),

    // curation
    #[error("not enough effective GOV")]
    InsufficientGov,
    #[error("token {0} already has an active listing")]
    ListingExists(TokenId),
    #[error("proposal kind does not fit the curated status of token {0}")]
    WrongKind(TokenId),
    #[error("token {0} has no challengeable listing")]
    NoActiveListing(TokenId),
    #[error("token {0} is already challenged")]
    AlreadyChallenged(TokenId),
    #[error("unknown poll {0}")]
    UnknownPoll(PollId),
    #[error("commit stage of poll {0} is over")]
    CommitClosed(PollId),
    #[error("voter already committed on poll {0}")]
    DuplicateCommit(PollId),
    #[error("stake must be at least one unit")]
    ZeroStake,
    #[error("reveal stage of poll {0} is over")]
    RevealClosed(PollId),
    #[error("reveal stage of poll {0} has not started")]
    RevealTooEarly(PollId),
    #[error("revealed vote does not match the commitment")]
    HashMismatch,
    #[error("no commitment from this voter on poll {0}")]
    NoCommit(PollId),
    #[error("vote already revealed on poll {0}")]
    DuplicateReveal(PollId),
    #[error("poll {0} is still running")]
    PollNotEnded(PollId),
    #[error("poll {0} is already resolved")]
    AlreadyResolved(PollId),

    // governance
    #[error("no delegation covers that amount")]
    NoSuchDelegation,
    #[error("delegated GOV is locked in curation")]
    DelegationLocked,

    // backing
    #[error("token {0} has no swap pool")]
    NoSwapPool(TokenId),
    #[error("swap pool of token {0} is empty")]
    EmptyPool(TokenId),
    #[error("token {0} has no mint conversion")]
    NoMintConversion(TokenId),
    #[error("token {0} has no coupled burn")]
    NoCoupledBurn(TokenId),
    #[error("coupled burn source holds too little of token {0}")]
    InsufficientCoupledBalance(TokenId),

    // engine
    #[error("invalid engine parameters: {0}")]
    InvalidParams(String),
    #[error("injected fault")]
    InjectedFault,
    #[error("corrupt log at seq {seq}: {detail}")]
    CorruptLog { seq: u64, detail: String },
}

impl Error {
    /// The variant name, used as the machine-readable error tag.
    pub fn name(&self) -> &'static str {
        match self {
            Error::UnknownToken(_) => "UnknownToken",
            Error::NonTransferable(_) => "NonTransferable",
            Error::NotBurnable(_) => "NotBurnable",
            Error::InsufficientBalance { .. } => "InsufficientBalance",
            Error::SupplyCapExceeded(_) => "SupplyCapExceeded",
            Error::Overflow => "Overflow",
            Error::ZeroTicks => "ZeroTicks",
            Error::RestrictedMint(_) => "RestrictedMint",
            Error::InvalidDesign(_) => "InvalidDesign",
            Error::TokenNotClaimable(_) => "TokenNotClaimable",
            Error::UnknownClaim(_) => "UnknownClaim",
            Error::ClaimClosed(_) => "ClaimClosed",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::PayloadMismatch => "PayloadMismatch",
            Error::BadOracleSignature => "BadOracleSignature",
            Error::UnauthorizedAttestor => "UnauthorizedAttestor",
            Error::DuplicateAttestation => "DuplicateAttestation",
            Error::NotAllApproved(_) => "NotAllApproved",
            Error::InsufficientGov => "InsufficientGov",
            Error::ListingExists(_) => "ListingExists",
            Error::WrongKind(_) => "WrongKind",
            Error::NoActiveListing(_) => "NoActiveListing",
            Error::AlreadyChallenged(_) => "AlreadyChallenged",
            Error::UnknownPoll(_) => "UnknownPoll",
            Error::CommitClosed(_) => "CommitClosed",
            Error::DuplicateCommit(_) => "DuplicateCommit",
            Error::ZeroStake => "ZeroStake",
            Error::RevealClosed(_) => "RevealClosed",
            Error::RevealTooEarly(_) => "RevealTooEarly",
            Error::HashMismatch => "HashMismatch",
            Error::NoCommit(_) => "NoCommit",
            Error::DuplicateReveal(_) => "DuplicateReveal",
            Error::PollNotEnded(_) => "PollNotEnded",
            Error::AlreadyResolved(_) => "AlreadyResolved",
            Error::NoSuchDelegation => "NoSuchDelegation",
            Error::DelegationLocked => "DelegationLocked",
            Error::NoSwapPool(_) => "NoSwapPool",
            Error::EmptyPool(_) => "EmptyPool",
            Error::NoMintConversion(_) => "NoMintConversion",
            Error::NoCoupledBurn(_) => "NoCoupledBurn",
            Error::InsufficientCoupledBalance(_) => "InsufficientCoupledBalance",
            Error::InvalidParams(_) => "InvalidParams",
            Error::InjectedFault => "InjectedFault",
            Error::CorruptLog { .. } => "CorruptLog",
        }
    }
}
