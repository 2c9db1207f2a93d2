use crate::amount::Amount;
use crate::error::{Error, Result};
use crate::event::Event;
use crate::ids::{AccountId, TokenId};
use crate::reputation::RepReason;
use crate::token::{validate_design, CuratedStatus, DesignViolation, TokenDesign, TokenFilter, TokenRecord, UnconditionalCreation};
use crate::verifier::VerifierSpec;

use super::{Engine, State, Txn};

impl<A: Amount> State<A> {
    /// Design checks that depend on which tokens exist.
    fn reference_violations(&self, design: &TokenDesign<A>, new_id: TokenId) -> Vec<DesignViolation> {
        let exists = |t: TokenId| t.is_system() || (t.0 as usize) < self.tokens.len();
        let mut out = Vec::new();
        for (i, spec) in design.sources_of_value.iter().enumerate() {
            let Some(t) = spec.referenced_token() else { continue };
            if t.is_system() {
                out.push(DesignViolation::SystemTokenBacking(i));
            } else if t == new_id {
                out.push(DesignViolation::SelfBacking(i));
            } else if !exists(t) {
                out.push(DesignViolation::UnknownReferencedToken(t));
            }
        }
        for v in &design.verifiers {
            if let VerifierSpec::TokenBalanceThreshold { token, .. } = v {
                if !exists(*token) && *token != new_id {
                    out.push(DesignViolation::UnknownReferencedToken(*token));
                }
            }
        }
        out
    }
}

impl<A: Amount> Txn<'_, A> {
    pub(crate) fn award_rep(&mut self, account: AccountId, reason: RepReason) -> Result<()> {
        let amount = match reason {
            RepReason::TokenCreated => self.state.params.rep.rep_per_creation,
            RepReason::ClaimApproved => self.state.params.rep.rep_per_claim,
        };
        self.emit(Event::RepAwarded { account, reason, amount })
    }
}

impl<A: Amount> Engine<A> {
    /// Registers a new token. Any account may create any number of tokens.
    pub fn create_token(&mut self, creator: AccountId, design: TokenDesign<A>) -> Result<TokenId> {
        self.transact(|tx| {
            let token = TokenId(tx.state.tokens.len() as u64);
            let mut violations = validate_design(&design).err().unwrap_or_default();
            violations.extend(tx.state.reference_violations(&design, token));
            if !violations.is_empty() {
                return Err(Error::InvalidDesign(violations));
            }
            let pre_mint = match &design.unconditional_creation {
                UnconditionalCreation::None => None,
                UnconditionalCreation::Partial { amount, to } | UnconditionalCreation::All { amount, to } => {
                    Some((*amount, *to))
                }
            };
            tx.emit(Event::TokenCreated { token, creator, design })?;
            if let Some((amount, to)) = pre_mint.filter(|(a, _)| !a.is_zero()) {
                tx.emit(Event::Minted { token, to, amount })?;
            }
            tx.award_rep(creator, RepReason::TokenCreated)?;
            Ok(token)
        })
    }

    pub fn get_token(&self, token: TokenId) -> Result<&TokenRecord<A>> {
        self.state.tokens.get(token.0 as usize).ok_or(Error::UnknownToken(token))
    }

    /// Tokens in id order.
    pub fn list_tokens(&self, filter: TokenFilter) -> Vec<&TokenRecord<A>> {
        self.state
            .tokens
            .iter()
            .filter(|t| filter == TokenFilter::All || t.curated_status == CuratedStatus::Listed)
            .collect()
    }

    pub fn token_count(&self) -> usize {
        self.state.tokens.len()
    }
}

