//! Action verifiers and the attestations that feed them.
//!
//! A token lists verifiers; a claim on that token is approved only when every
//! verifier approves. Two verifiers ([`VerifierSpec::TokenBalanceThreshold`]
//! and [`VerifierSpec::ClaimWindow`]) decide from engine state at submission
//! time. The rest wait for an [`Attestation`].

use ed25519_dalek::{Signature, Signer, SigningKey, Verifier, VerifyingKey};
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::amount::Amount;
use crate::error::{Error, Result};
use crate::ids::{AccountId, ClaimId, Hash32, OracleKey, SignatureBytes, TokenId};

/// Mean Earth radius used by the location verifier, in metres.
pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparator {
    AtLeast,
    AtMost,
}

impl Comparator {
    pub fn holds(self, value: i64, threshold: i64) -> bool {
        match self {
            Comparator::AtLeast => value >= threshold,
            Comparator::AtMost => value <= threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "A: Amount")]
#[serde(deny_unknown_fields)]
pub enum VerifierSpec<A> {
    /// One named account approves or denies.
    DesignatedApprover { approver: AccountId },
    /// `k` endorsements from the listed attestors.
    PeerQuorum { attestors: Vec<AccountId>, k: u32 },
    /// An oracle-signed measurement compared against a threshold.
    SensorOracle { oracle_key: OracleKey, comparator: Comparator, threshold: i64 },
    /// An oracle-signed coordinate within `radius_m` of a centre.
    Location { center_lat_e7: i64, center_lon_e7: i64, radius_m: u64, oracle_key: OracleKey },
    /// The claimant must hold at least `min_balance` of `token` when submitting.
    TokenBalanceThreshold { token: TokenId, min_balance: A },
    /// At most `max_claims` submissions by one claimant in any `per_ticks` window.
    ClaimWindow { max_claims: u32, per_ticks: u64 },
    /// The claimant supplies a content digest; presence approves.
    AttachmentHash,
}

impl<A> VerifierSpec<A> {
    pub fn kind(&self) -> &'static str {
        match self {
            VerifierSpec::DesignatedApprover { .. } => "DesignatedApprover",
            VerifierSpec::PeerQuorum { .. } => "PeerQuorum",
            VerifierSpec::SensorOracle { .. } => "SensorOracle",
            VerifierSpec::Location { .. } => "Location",
            VerifierSpec::TokenBalanceThreshold { .. } => "TokenBalanceThreshold",
            VerifierSpec::ClaimWindow { .. } => "ClaimWindow",
            VerifierSpec::AttachmentHash => "AttachmentHash",
        }
    }

    /// Verifiers decided from engine state when the claim is submitted.
    pub fn is_immediate(&self) -> bool {
        matches!(
            self,
            VerifierSpec::TokenBalanceThreshold { .. } | VerifierSpec::ClaimWindow { .. }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RejectReason {
    ApproverDenied,
    QuorumUnreachable,
    MeasurementFailed,
    OutsideArea,
    BalanceBelowThreshold,
    WindowExceeded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SlotStatus {
    Pending,
    Approved,
    Rejected(RejectReason),
}

impl SlotStatus {
    pub fn is_pending(self) -> bool {
        self == SlotStatus::Pending
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub enum AttestationPayload {
    Approval { approver: AccountId, approve: bool },
    Endorsement { attestor: AccountId, endorse: bool },
    Measurement { value: i64, signature: SignatureBytes },
    Coordinate { lat_e7: i64, lon_e7: i64, signature: SignatureBytes },
    Attachment { digest: Hash32 },
}

/// Evidence for one verifier slot of one claim.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Attestation {
    pub claim: ClaimId,
    pub verifier_index: u32,
    pub payload: AttestationPayload,
}

#[derive(Serialize)]
struct MeasurementMessage {
    claim: ClaimId,
    verifier_index: u32,
    value: i64,
}

#[derive(Serialize)]
struct CoordinateMessage {
    claim: ClaimId,
    verifier_index: u32,
    lat_e7: i64,
    lon_e7: i64,
}

/// Bytes an oracle signs for a measurement: the compact JSON of
/// `{"claim":..,"verifier_index":..,"value":..}`.
pub fn measurement_message(claim: ClaimId, verifier_index: u32, value: i64) -> Vec<u8> {
    serde_json::to_vec(&MeasurementMessage { claim, verifier_index, value }).expect("plain struct")
}

/// Bytes an oracle signs for a coordinate.
pub fn coordinate_message(claim: ClaimId, verifier_index: u32, lat_e7: i64, lon_e7: i64) -> Vec<u8> {
    serde_json::to_vec(&CoordinateMessage { claim, verifier_index, lat_e7, lon_e7 })
        .expect("plain struct")
}

pub fn verify_signature(key: &OracleKey, message: &[u8], signature: &SignatureBytes) -> Result<()> {
    let key = VerifyingKey::from_bytes(key.as_bytes()).map_err(|_| Error::BadOracleSignature)?;
    key.verify(message, &Signature::from_bytes(signature.as_bytes()))
        .map_err(|_| Error::BadOracleSignature)
}

/// An oracle's signing key. Simulated oracles hold these; the engine only
/// ever sees the public [`OracleKey`].
#[derive(Clone)]
pub struct OracleSigner(SigningKey);

impl OracleSigner {
    pub fn from_seed(seed: [u8; 32]) -> Self {
        Self(SigningKey::from_bytes(&seed))
    }

    pub fn public_key(&self) -> OracleKey {
        OracleKey(self.0.verifying_key().to_bytes())
    }

    pub fn sign(&self, message: &[u8]) -> SignatureBytes {
        SignatureBytes(self.0.sign(message).to_bytes())
    }

    pub fn measurement(&self, claim: ClaimId, verifier_index: u32, value: i64) -> Attestation {
        let signature = self.sign(&measurement_message(claim, verifier_index, value));
        Attestation {
            claim,
            verifier_index,
            payload: AttestationPayload::Measurement { value, signature },
        }
    }

    pub fn coordinate(&self, claim: ClaimId, verifier_index: u32, lat_e7: i64, lon_e7: i64) -> Attestation {
        let signature = self.sign(&coordinate_message(claim, verifier_index, lat_e7, lon_e7));
        Attestation {
            claim,
            verifier_index,
            payload: AttestationPayload::Coordinate { lat_e7, lon_e7, signature },
        }
    }
}

impl std::fmt::Debug for OracleSigner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "OracleSigner({})", self.public_key())
    }
}

/// Great-circle distance in metres between two points given in degrees
/// scaled by 10^7, by the haversine formula.
pub fn haversine_m<F: Float>(lat1_e7: i64, lon1_e7: i64, lat2_e7: i64, lon2_e7: i64) -> F {
    let e7 = F::from(1e7).unwrap();
    let rad = |v: i64| (F::from(v).unwrap() / e7).to_radians();
    let (phi1, phi2) = (rad(lat1_e7), rad(lat2_e7));
    let dphi = rad(lat2_e7 - lat1_e7);
    let dlambda = rad(lon2_e7 - lon1_e7);
    let two = F::from(2.0).unwrap();
    let half_dphi = (dphi / two).sin();
    let half_dlambda = (dlambda / two).sin();
    let h = half_dphi * half_dphi + phi1.cos() * phi2.cos() * half_dlambda * half_dlambda;
    let h = h.min(F::one()).max(F::zero());
    two * F::from(EARTH_RADIUS_M).unwrap() * h.sqrt().asin()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    Inside,
    Outside,
}

/// Checks the oracle signature on a coordinate and places it relative to the
/// verifier's circle. `spec` must be a [`VerifierSpec::Location`].
pub fn evaluate_location<A>(
    spec: &VerifierSpec<A>,
    claim: ClaimId,
    verifier_index: u32,
    lat_e7: i64,
    lon_e7: i64,
    signature: &SignatureBytes,
) -> Result<Placement> {
    let VerifierSpec::Location { center_lat_e7, center_lon_e7, radius_m, oracle_key } = spec else {
        return Err(Error::PayloadMismatch);
    };
    verify_signature(oracle_key, &coordinate_message(claim, verifier_index, lat_e7, lon_e7), signature)?;
    let distance: f64 = haversine_m(*center_lat_e7, *center_lon_e7, lat_e7, lon_e7);
    Ok(if distance <= *radius_m as f64 { Placement::Inside } else { Placement::Outside })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn signer() -> OracleSigner {
        OracleSigner::from_seed([9; 32])
    }

    fn location(radius_m: u64) -> VerifierSpec<u64> {
        VerifierSpec::Location {
            center_lat_e7: 0,
            center_lon_e7: 0,
            radius_m,
            oracle_key: signer().public_key(),
        }
    }

    fn place(spec: &VerifierSpec<u64>, lat: i64, lon: i64) -> Placement {
        let sig = signer().sign(&coordinate_message(ClaimId(1), 0, lat, lon));
        evaluate_location(spec, ClaimId(1), 0, lat, lon, &sig).unwrap()
    }

    #[test]
    fn centre_is_inside_any_radius() {
        assert_eq!(place(&location(1), 0, 0), Placement::Inside);
    }

    #[test]
    fn ten_metres_east_is_outside_nine() {
        // 0.0000899 deg of longitude at the equator: 6371000 * 899e-7 * pi/180 = 9.9962 m
        let d: f64 = haversine_m(0, 0, 0, 899);
        assert!((d - 9.9962).abs() < 1e-3, "{d}");
        assert_eq!(place(&location(9), 0, 899), Placement::Outside);
        assert_eq!(place(&location(10), 0, 899), Placement::Inside);
    }

    #[test]
    fn antipode_is_half_circumference() {
        let d: f64 = haversine_m(0, 0, 0, 1_800_000_000);
        assert!((d - std::f64::consts::PI * EARTH_RADIUS_M).abs() < 1e-3);
        assert_eq!(place(&location(19_999_999), 0, 1_800_000_000), Placement::Outside);
    }

    #[test]
    fn f32_and_f64_agree_roughly() {
        let a: f64 = haversine_m(473_769_000, 85_417_000, 473_779_000, 85_427_000);
        let b: f32 = haversine_m(473_769_000, 85_417_000, 473_779_000, 85_427_000);
        assert!((a - b as f64).abs() < 1.0, "{a} vs {b}");
    }

    #[test]
    fn forged_coordinate_is_rejected() {
        let other = OracleSigner::from_seed([1; 32]);
        let sig = other.sign(&coordinate_message(ClaimId(1), 0, 0, 0));
        assert_eq!(
            evaluate_location(&location(5), ClaimId(1), 0, 0, 0, &sig),
            Err(Error::BadOracleSignature)
        );
        // A valid signature for a different claim does not transfer.
        let sig = signer().sign(&coordinate_message(ClaimId(2), 0, 0, 0));
        assert_eq!(
            evaluate_location(&location(5), ClaimId(1), 0, 0, 0, &sig),
            Err(Error::BadOracleSignature)
        );
    }

    #[test]
    fn comparator_boundaries() {
        assert!(Comparator::AtLeast.holds(50, 50));
        assert!(!Comparator::AtLeast.holds(49, 50));
        assert!(Comparator::AtMost.holds(50, 50));
        assert!(!Comparator::AtMost.holds(51, 50));
    }
}
