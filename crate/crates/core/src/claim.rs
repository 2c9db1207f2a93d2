//! Claims and the per-slot decision rules.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::amount::Amount;
use crate::error::{Error, Result};
use crate::ids::{AccountId, ClaimId, LogicalTime, TokenId};
use crate::verifier::{
    measurement_message, verify_signature, Attestation, AttestationPayload, Placement, RejectReason,
    SlotStatus, VerifierSpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClaimStatus {
    Open,
    Approved,
    Rejected,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "A: Amount")]
pub struct Claim<A> {
    pub id: ClaimId,
    pub claimant: AccountId,
    pub token: TokenId,
    pub quantity: A,
    pub submitted_at: LogicalTime,
    pub slots: Vec<SlotStatus>,
    /// Peer-quorum votes per slot: attestor -> endorse?
    pub endorsements: Vec<BTreeMap<AccountId, bool>>,
    pub status: ClaimStatus,
    /// Units minted when the claim was approved.
    pub minted: A,
    /// Set when finalization could not mint; the claim stays open.
    pub mint_failure: Option<String>,
}

impl<A: Amount> Claim<A> {
    pub fn new(
        id: ClaimId,
        claimant: AccountId,
        token: TokenId,
        quantity: A,
        submitted_at: LogicalTime,
        verifier_count: usize,
    ) -> Self {
        Self {
            id,
            claimant,
            token,
            quantity,
            submitted_at,
            slots: vec![SlotStatus::Pending; verifier_count],
            endorsements: vec![BTreeMap::new(); verifier_count],
            status: ClaimStatus::Open,
            minted: A::zero(),
            mint_failure: None,
        }
    }

    pub fn is_open(&self) -> bool {
        self.status == ClaimStatus::Open
    }

    pub fn all_approved(&self) -> bool {
        self.slots.iter().all(|s| *s == SlotStatus::Approved)
    }

    pub fn any_rejected(&self) -> bool {
        self.slots.iter().any(|s| matches!(s, SlotStatus::Rejected(_)))
    }
}

/// Decides what an attestation does to its slot, without changing anything.
///
/// Returns the slot status after the attestation. Errors mirror the order in
/// which a reviewer would check: closed claim, index, payload shape, already
/// decided, then authority and signatures.
pub fn evaluate_attestation<A: Amount>(
    spec: &VerifierSpec<A>,
    claim: &Claim<A>,
    att: &Attestation,
) -> Result<SlotStatus> {
    if !claim.is_open() {
        return Err(Error::ClaimClosed(claim.id));
    }
    let index = att.verifier_index as usize;
    let slot = *claim
        .slots
        .get(index)
        .ok_or(Error::IndexOutOfRange { claim: claim.id, index: att.verifier_index })?;

    use AttestationPayload as P;
    use VerifierSpec as V;
    let shape_ok = matches!(
        (spec, &att.payload),
        (V::DesignatedApprover { .. }, P::Approval { .. })
            | (V::PeerQuorum { .. }, P::Endorsement { .. })
            | (V::SensorOracle { .. }, P::Measurement { .. })
            | (V::Location { .. }, P::Coordinate { .. })
            | (V::AttachmentHash, P::Attachment { .. })
    );
    if !shape_ok {
        return Err(Error::PayloadMismatch);
    }
    if !slot.is_pending() {
        return Err(Error::DuplicateAttestation);
    }

    match (spec, &att.payload) {
        (V::DesignatedApprover { approver }, P::Approval { approver: from, approve }) => {
            if from != approver {
                return Err(Error::UnauthorizedAttestor);
            }
            Ok(if *approve { SlotStatus::Approved } else { SlotStatus::Rejected(RejectReason::ApproverDenied) })
        }
        (V::PeerQuorum { attestors, k }, P::Endorsement { attestor, endorse }) => {
            if !attestors.contains(attestor) {
                return Err(Error::UnauthorizedAttestor);
            }
            let votes = &claim.endorsements[index];
            if votes.contains_key(attestor) {
                return Err(Error::DuplicateAttestation);
            }
            let yes = votes.values().filter(|v| **v).count() + usize::from(*endorse);
            let no = votes.values().filter(|v| !**v).count() + usize::from(!*endorse);
            let k = *k as usize;
            Ok(if yes >= k {
                SlotStatus::Approved
            } else if no > attestors.len().saturating_sub(k) {
                SlotStatus::Rejected(RejectReason::QuorumUnreachable)
            } else {
                SlotStatus::Pending
            })
        }
        (V::SensorOracle { oracle_key, comparator, threshold }, P::Measurement { value, signature }) => {
            verify_signature(oracle_key, &measurement_message(claim.id, att.verifier_index, *value), signature)?;
            Ok(if comparator.holds(*value, *threshold) {
                SlotStatus::Approved
            } else {
                SlotStatus::Rejected(RejectReason::MeasurementFailed)
            })
        }
        (V::Location { .. }, P::Coordinate { lat_e7, lon_e7, signature }) => {
            let placement = crate::verifier::evaluate_location(
                spec,
                claim.id,
                att.verifier_index,
                *lat_e7,
                *lon_e7,
                signature,
            )?;
            Ok(match placement {
                Placement::Inside => SlotStatus::Approved,
                Placement::Outside => SlotStatus::Rejected(RejectReason::OutsideArea),
            })
        }
        (V::AttachmentHash, P::Attachment { .. }) => Ok(SlotStatus::Approved),
        _ => unreachable!("shape checked above"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verifier::{Comparator, OracleSigner};

    fn acct(n: u8) -> AccountId {
        AccountId([n; 32])
    }

    fn claim(slots: usize) -> Claim<u64> {
        Claim::new(ClaimId(7), acct(1), TokenId(0), 1, LogicalTime(0), slots)
    }

    fn att(payload: AttestationPayload) -> Attestation {
        Attestation { claim: ClaimId(7), verifier_index: 0, payload }
    }

    #[test]
    fn designated_approver_access_rule() {
        let spec = VerifierSpec::<u64>::DesignatedApprover { approver: acct(5) };
        let c = claim(1);
        let ok = att(AttestationPayload::Approval { approver: acct(5), approve: true });
        assert_eq!(evaluate_attestation(&spec, &c, &ok), Ok(SlotStatus::Approved));
        let other = att(AttestationPayload::Approval { approver: acct(6), approve: true });
        assert_eq!(evaluate_attestation(&spec, &c, &other), Err(Error::UnauthorizedAttestor));
        let deny = att(AttestationPayload::Approval { approver: acct(5), approve: false });
        assert_eq!(
            evaluate_attestation(&spec, &c, &deny),
            Ok(SlotStatus::Rejected(RejectReason::ApproverDenied))
        );
    }

    #[test]
    fn sensor_threshold_boundary() {
        let oracle = OracleSigner::from_seed([3; 32]);
        let spec = VerifierSpec::<u64>::SensorOracle {
            oracle_key: oracle.public_key(),
            comparator: Comparator::AtLeast,
            threshold: 50,
        };
        let c = claim(1);
        assert_eq!(evaluate_attestation(&spec, &c, &oracle.measurement(c.id, 0, 50)), Ok(SlotStatus::Approved));
        assert_eq!(
            evaluate_attestation(&spec, &c, &oracle.measurement(c.id, 0, 49)),
            Ok(SlotStatus::Rejected(RejectReason::MeasurementFailed))
        );
        let forged = OracleSigner::from_seed([4; 32]).measurement(c.id, 0, 99);
        assert_eq!(evaluate_attestation(&spec, &c, &forged), Err(Error::BadOracleSignature));
    }

    #[test]
    fn quorum_counts_and_unreachability() {
        let spec = VerifierSpec::<u64>::PeerQuorum { attestors: vec![acct(2), acct(3), acct(4)], k: 2 };
        let mut c = claim(1);
        let e = |who: u8, yes: bool| att(AttestationPayload::Endorsement { attestor: acct(who), endorse: yes });
        assert_eq!(evaluate_attestation(&spec, &c, &e(2, true)), Ok(SlotStatus::Pending));
        c.endorsements[0].insert(acct(2), true);
        assert_eq!(evaluate_attestation(&spec, &c, &e(2, true)), Err(Error::DuplicateAttestation));
        assert_eq!(evaluate_attestation(&spec, &c, &e(9, true)), Err(Error::UnauthorizedAttestor));
        assert_eq!(evaluate_attestation(&spec, &c, &e(3, true)), Ok(SlotStatus::Approved));
        // one yes, then two no: only one attestor left, quorum of 2 unreachable
        c.endorsements[0].insert(acct(3), false);
        assert_eq!(
            evaluate_attestation(&spec, &c, &e(4, false)),
            Ok(SlotStatus::Rejected(RejectReason::QuorumUnreachable))
        );
    }

    #[test]
    fn payload_shape_and_closed_claims() {
        let spec = VerifierSpec::<u64>::AttachmentHash;
        let mut c = claim(1);
        let wrong = att(AttestationPayload::Approval { approver: acct(1), approve: true });
        assert_eq!(evaluate_attestation(&spec, &c, &wrong), Err(Error::PayloadMismatch));
        let mut out_of_range = att(AttestationPayload::Attachment { digest: crate::ids::Hash32::ZERO });
        out_of_range.verifier_index = 1;
        assert!(matches!(
            evaluate_attestation(&spec, &c, &out_of_range),
            Err(Error::IndexOutOfRange { index: 1, .. })
        ));
        c.status = ClaimStatus::Rejected;
        assert_eq!(
            evaluate_attestation(&spec, &c, &att(AttestationPayload::Attachment { digest: crate::ids::Hash32::ZERO })),
            Err(Error::ClaimClosed(ClaimId(7)))
        );
    }
}
