//! Positive action tokens: a deterministic engine for permissionless token
//! creation, proof-verified claiming, token-curated governance, reputation
//! and value backing, with a hash-chained event log.
//!
//! Most items are generic over the balance type. The aliases at the crate
//! root fix it to `u64`, which is what the simulator and CLI use.

pub mod amount;
pub mod backing;
pub mod claim;
pub mod engine;
pub mod error;
pub mod event;
pub mod ids;
pub mod ledger;
pub mod params;
pub mod reputation;
pub mod tcr;
pub mod token;
pub mod verifier;

pub use amount::Amount;
pub use backing::{custody_account, BurnSource};
pub use claim::ClaimStatus;
pub use error::{Error, Result};
pub use event::{verify_log, verify_log_bytes, RunInfo, Verification};
pub use ids::{sha256, AccountId, ClaimId, Hash32, LogicalTime, OracleKey, PollId, Salt, SignatureBytes, TokenId};
pub use reputation::RepReason;
pub use tcr::{commit_hash, ListingStatus, PollOutcome, ProposalKind, VoteChoice};
pub use token::{validate_design, CreationCondition, CuratedStatus, DesignViolation, TokenFilter};
pub use verifier::{
    evaluate_location, haversine_m, Attestation, AttestationPayload, Comparator, OracleSigner, Placement,
    RejectReason, SlotStatus,
};

/// Token balances: whole units, no decimals.
pub type Balance = u64;
pub type Engine = engine::Engine<Balance>;
pub type EngineParams = params::EngineParams<Balance>;
pub type RepConfig = params::RepConfig<Balance>;
pub type TcrParams = params::TcrParams<Balance>;
pub type TokenDesign = token::TokenDesign<Balance>;
pub type TokenRecord = token::TokenRecord<Balance>;
pub type Supply = token::Supply<Balance>;
pub type MintingPolicy = token::MintingPolicy<Balance>;
pub type UnconditionalCreation = token::UnconditionalCreation<Balance>;
pub type VerifierSpec = verifier::VerifierSpec<Balance>;
pub type BackingSpec = backing::BackingSpec<Balance>;
pub type Pool = backing::Pool<Balance>;
pub type Claim = claim::Claim<Balance>;
pub type Listing = tcr::Listing<Balance>;
pub type TcrPoll = tcr::TcrPoll<Balance>;
pub type Resolution = tcr::Resolution<Balance>;
pub type Event = event::Event<Balance>;
pub type EventRecord = event::EventRecord<Balance>;
pub type Ledger = ledger::Ledger<Balance>;
