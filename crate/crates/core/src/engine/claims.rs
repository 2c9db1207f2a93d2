use crate::amount::{self, Amount};
use crate::claim::{evaluate_attestation, Claim, ClaimStatus};
use crate::error::{Error, Result};
use crate::event::Event;
use crate::ids::{AccountId, ClaimId, TokenId};
use crate::reputation::RepReason;
use crate::token::MintingPolicy;
use crate::verifier::{Attestation, RejectReason, SlotStatus, VerifierSpec};

use super::{Engine, State, Txn};

/// What finalizing an approved claim did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Finalized<A> {
    Minted(A),
    /// The token's cap left no room; the failure is recorded and the claim
    /// stays open.
    CapHit,
}

impl<A: Amount> State<A> {
    fn claim(&self, claim: ClaimId) -> Result<&Claim<A>> {
        self.claims.get(claim.0 as usize).ok_or(Error::UnknownClaim(claim))
    }

    /// Decides a slot that needs no external proof.
    fn immediate_status(&self, spec: &VerifierSpec<A>, claimant: &AccountId, token: TokenId) -> Result<Option<SlotStatus>> {
        Ok(match spec {
            VerifierSpec::TokenBalanceThreshold { token: gate, min_balance } => {
                let held = self.balance(*gate, claimant).unwrap_or_else(|_| A::zero());
                Some(if held >= *min_balance {
                    SlotStatus::Approved
                } else {
                    SlotStatus::Rejected(RejectReason::BalanceBelowThreshold)
                })
            }
            VerifierSpec::ClaimWindow { max_claims, per_ticks } => {
                let now = self.now.tick();
                let recent = self
                    .claims
                    .iter()
                    .filter(|c| c.claimant == *claimant && c.token == token)
                    .filter(|c| c.submitted_at.tick().saturating_add(*per_ticks) > now)
                    .count();
                Some(if recent < *max_claims as usize {
                    SlotStatus::Approved
                } else {
                    SlotStatus::Rejected(RejectReason::WindowExceeded)
                })
            }
            _ => None,
        })
    }

    fn mint_amount(&self, claim: &Claim<A>) -> Result<A> {
        match self.design(claim.token)?.minting_policy {
            MintingPolicy::FixedPerClaim { n } => Ok(n),
            MintingPolicy::ProportionalToQuantity { unit_per_quantity } => amount::mul(unit_per_quantity, claim.quantity),
        }
    }
}

impl<A: Amount> Txn<'_, A> {
    /// Closes a claim whose slots are all approved: mints per policy and
    /// awards REP.
    fn finalize(&mut self, id: ClaimId) -> Result<Finalized<A>> {
        let claim = self.state.claim(id)?;
        if !claim.is_open() {
            return Err(Error::ClaimClosed(id));
        }
        if !claim.all_approved() {
            return Err(Error::NotAllApproved(id));
        }
        let (token, claimant) = (claim.token, claim.claimant);
        let minted = self.state.mint_amount(claim)?;
        if let Some(max) = self.state.cap(token)? {
            let supply = self.state.ledger.book(token)?.supply();
            if amount::add(supply, minted)? > max {
                let reason = Error::SupplyCapExceeded(token).to_string();
                self.emit(Event::ClaimMintFailed { claim: id, reason })?;
                return Ok(Finalized::CapHit);
            }
        }
        if !minted.is_zero() {
            self.emit(Event::Minted { token, to: claimant, amount: minted })?;
        }
        self.award_rep(claimant, RepReason::ClaimApproved)?;
        self.emit(Event::ClaimClosed { claim: id, status: ClaimStatus::Approved, minted })?;
        Ok(Finalized::Minted(minted))
    }

    /// Closes the claim as rejected if a slot failed, or finalizes it if all
    /// slots passed. Leaves it open otherwise.
    fn settle_claim(&mut self, id: ClaimId) -> Result<()> {
        let claim = self.state.claim(id)?;
        if claim.any_rejected() {
            self.emit(Event::ClaimClosed { claim: id, status: ClaimStatus::Rejected, minted: A::zero() })
        } else if claim.all_approved() {
            self.finalize(id).map(|_| ())
        } else {
            Ok(())
        }
    }
}

impl<A: Amount> Engine<A> {
    /// Opens a claim. Balance-threshold and rate-limit verifiers are decided
    /// on the spot; with no other verifiers the claim closes immediately.
    ///
    /// `quantity` only matters under a proportional minting policy and is
    /// recorded as 1 otherwise.
    pub fn submit_claim(&mut self, claimant: AccountId, token: TokenId, quantity: A) -> Result<ClaimId> {
        self.transact(|tx| {
            let design = tx.state.design(token)?;
            if !design.is_claimable() {
                return Err(Error::TokenNotClaimable(token));
            }
            let quantity = match design.minting_policy {
                MintingPolicy::FixedPerClaim { .. } => A::one(),
                MintingPolicy::ProportionalToQuantity { .. } => quantity,
            };
            let mut immediate = Vec::new();
            for (i, spec) in design.verifiers.iter().enumerate() {
                if let Some(status) = tx.state.immediate_status(spec, &claimant, token)? {
                    immediate.push((i as u32, status));
                }
            }
            let claim = ClaimId(tx.state.claims.len() as u64);
            tx.emit(Event::ClaimSubmitted { claim, claimant, token, quantity })?;
            for (verifier_index, status) in immediate {
                tx.emit(Event::SlotDecided { claim, verifier_index, status })?;
            }
            tx.settle_claim(claim)?;
            Ok(claim)
        })
    }

    /// Records an attestation for one verifier slot. If it completes the
    /// conjunction the claim is finalized in the same step; if it rejects the
    /// slot the claim closes as rejected.
    pub fn submit_attestation(&mut self, att: &Attestation) -> Result<SlotStatus> {
        self.transact(|tx| {
            let claim = tx.state.claim(att.claim)?;
            let spec = tx
                .state
                .design(claim.token)?
                .verifiers
                .get(att.verifier_index as usize);
            let status = match spec {
                Some(spec) => evaluate_attestation(spec, claim, att)?,
                None if !claim.is_open() => return Err(Error::ClaimClosed(claim.id)),
                None => return Err(Error::IndexOutOfRange { claim: claim.id, index: att.verifier_index }),
            };
            tx.emit(Event::AttestationRecorded {
                claim: att.claim,
                verifier_index: att.verifier_index,
                payload: att.payload.clone(),
                status,
            })?;
            tx.settle_claim(att.claim)?;
            Ok(status)
        })
    }

    /// Retries minting for an approved claim, e.g. after a cap problem was
    /// recorded. A cap hit is recorded in the log and reported as
    /// [`Error::SupplyCapExceeded`].
    pub fn finalize_claim(&mut self, claim: ClaimId) -> Result<A> {
        let outcome = self.transact(|tx| tx.finalize(claim))?;
        match outcome {
            Finalized::Minted(amount) => Ok(amount),
            Finalized::CapHit => Err(Error::SupplyCapExceeded(self.state.claims[claim.0 as usize].token)),
        }
    }

    pub fn get_claim(&self, claim: ClaimId) -> Result<&Claim<A>> {
        self.state.claim(claim)
    }

    /// All claims in id order.
    pub fn claims(&self) -> &[Claim<A>] {
        &self.state.claims
    }
}
