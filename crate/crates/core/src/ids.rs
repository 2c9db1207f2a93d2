//! Identifiers and fixed-width byte strings.
//!
//! Byte strings render as lowercase hex. Parsing is strict: uppercase digits
//! are rejected so that every value has exactly one textual form, which the
//! hash-chained log relies on.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest as _, Sha256};

/// Error returned when a hex string is not exactly `2 * N` lowercase hex digits.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("expected {expected} lowercase hex characters")]
pub struct HexError {
    pub expected: usize,
}

pub(crate) fn decode_lower_hex<const N: usize>(s: &str) -> Result<[u8; N], HexError> {
    let err = HexError { expected: 2 * N };
    if s.len() != 2 * N || !s.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b)) {
        return Err(err);
    }
    let mut out = [0u8; N];
    hex::decode_to_slice(s, &mut out).map_err(|_| err)?;
    Ok(out)
}

macro_rules! hex_bytes {
    ($(#[$meta:meta])* $name:ident, $len:expr) => {
        $(#[$meta])*
        #[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub [u8; $len]);

        impl $name {
            pub const LEN: usize = $len;

            pub fn as_bytes(&self) -> &[u8; $len] {
                &self.0
            }

            pub fn to_hex(&self) -> String {
                hex::encode(self.0)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.to_hex())
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}({})", stringify!($name), self.to_hex())
            }
        }

        impl FromStr for $name {
            type Err = HexError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                decode_lower_hex::<$len>(s).map($name)
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                serializer.serialize_str(&self.to_hex())
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
                let s = String::deserialize(deserializer)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

hex_bytes!(
    /// A 32-byte pseudonymous account. Every value is a valid account; there is
    /// no registration step.
    AccountId,
    32
);

hex_bytes!(
    /// A SHA-256 output (log hashes, commit hashes, attachment digests).
    Hash32,
    32
);

hex_bytes!(
    /// 32 bytes of caller-chosen randomness blinding a committed vote.
    Salt,
    32
);

hex_bytes!(
    /// An Ed25519 verification key.
    OracleKey,
    32
);

hex_bytes!(
    /// An Ed25519 signature.
    SignatureBytes,
    64
);

impl AccountId {
    pub const ZERO: AccountId = AccountId([0; 32]);

    /// Derives an account from a label, e.g. `AccountId::derive("agent:3")`.
    pub fn derive(label: &str) -> AccountId {
        AccountId(sha256(label.as_bytes()).0)
    }
}

impl Hash32 {
    pub const ZERO: Hash32 = Hash32([0; 32]);
}

pub fn sha256(bytes: &[u8]) -> Hash32 {
    Hash32(Sha256::digest(bytes).into())
}

/// Sequential token identifier. User tokens count up from 0; the two system
/// tokens sit at the top of the range so they never collide.
#[derive(
    Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct TokenId(pub u64);

impl TokenId {
    /// Reputation: non-transferable, non-burnable, uncapped.
    pub const REP: TokenId = TokenId(u64::MAX);
    /// Governance: staked in curation, minted only against reputation.
    pub const GOV: TokenId = TokenId(u64::MAX - 1);

    pub fn is_system(self) -> bool {
        self == Self::REP || self == Self::GOV
    }
}

impl fmt::Display for TokenId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            TokenId::REP => f.write_str("REP"),
            TokenId::GOV => f.write_str("GOV"),
            TokenId(id) => write!(f, "{id}"),
        }
    }
}

#[derive(
    Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct ClaimId(pub u64);

impl fmt::Display for ClaimId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(
    Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct PollId(pub u64);

impl fmt::Display for PollId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Engine clock. Advances only through `advance_time`.
#[derive(
    Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct LogicalTime(pub u64);

impl LogicalTime {
    pub fn tick(self) -> u64 {
        self.0
    }

    pub(crate) fn plus(self, ticks: u64) -> crate::Result<LogicalTime> {
        self.0
            .checked_add(ticks)
            .map(LogicalTime)
            .ok_or(crate::Error::Overflow)
    }
}

impl fmt::Display for LogicalTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hex_roundtrip_is_lowercase() {
        let id = AccountId([0xab; 32]);
        let s = id.to_string();
        assert_eq!(s.len(), 64);
        assert_eq!(s, s.to_lowercase());
        assert_eq!(s.parse::<AccountId>().unwrap(), id);
    }

    #[test]
    fn uppercase_and_wrong_length_are_rejected() {
        let upper = "AB".repeat(32);
        assert!(upper.parse::<AccountId>().is_err());
        assert!("ab".parse::<AccountId>().is_err());
        assert!("zz".repeat(32).parse::<Hash32>().is_err());
        assert_eq!(
            "00".repeat(64).parse::<SignatureBytes>().unwrap(),
            SignatureBytes([0; 64])
        );
    }

    #[test]
    fn system_tokens_display_by_name() {
        assert_eq!(TokenId::REP.to_string(), "REP");
        assert_eq!(TokenId::GOV.to_string(), "GOV");
        assert_eq!(TokenId(4).to_string(), "4");
        assert!(TokenId::GOV.is_system());
        assert!(!TokenId(0).is_system());
    }

    #[test]
    fn known_sha256_vector() {
        assert_eq!(
            sha256(b"abc").to_hex(),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
