//! Plain-text tables describing an event log.

use std::collections::BTreeSet;
use std::fmt;

use pat_core::{AccountId, ClaimStatus, CuratedStatus, Engine, PollOutcome, TokenFilter, TokenId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, clap::ValueEnum)]
pub enum Section {
    Tokens,
    Claims,
    Polls,
    Reputation,
    Pools,
}

impl Section {
    pub const ALL: [Section; 5] =
        [Section::Tokens, Section::Claims, Section::Polls, Section::Reputation, Section::Pools];
}

/// A titled table with left-aligned columns.
pub struct Table {
    pub title: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl fmt::Display for Table {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "== {} ({} rows) ==", self.title, self.rows.len())?;
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.len()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let line = |f: &mut fmt::Formatter<'_>, cells: &mut dyn Iterator<Item = &str>| -> fmt::Result {
            let text: Vec<String> = cells.zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            writeln!(f, "{}", text.join("  ").trim_end())
        };
        line(f, &mut self.header.iter().copied())?;
        for row in &self.rows {
            line(f, &mut row.iter().map(String::as_str))?;
        }
        Ok(())
    }
}

/// First and last eight hex digits, enough to tell accounts apart in a table.
fn short(account: &AccountId) -> String {
    let hex = account.to_hex();
    format!("{}..{}", &hex[..8], &hex[56..])
}

fn token_label(engine: Option<&Engine>, token: TokenId) -> String {
    match (token, engine.and_then(|e| e.get_token(token).ok())) {
        (TokenId::REP, _) => "REP".into(),
        (TokenId::GOV, _) => "GOV".into(),
        (_, Some(t)) => format!("{}:{}", token, t.design.symbol),
        (_, None) => token.to_string(),
    }
}

/// Builds the requested tables. `engine` is the replayed log, or `None` for
/// an empty log, which yields empty tables.
pub fn build(engine: Option<&Engine>, sections: &[Section]) -> Vec<Table> {
    let mut wanted: Vec<Section> = sections.to_vec();
    wanted.sort();
    wanted.dedup();
    wanted.into_iter().map(|s| section(engine, s)).collect()
}

fn section(engine: Option<&Engine>, section: Section) -> Table {
    match section {
        Section::Tokens => tokens(engine),
        Section::Claims => claims(engine),
        Section::Polls => polls(engine),
        Section::Reputation => reputation(engine),
        Section::Pools => pools(engine),
    }
}

fn tokens(engine: Option<&Engine>) -> Table {
    let mut rows = Vec::new();
    if let Some(e) = engine {
        for t in e.list_tokens(TokenFilter::All) {
            let book = e.book(t.id).expect("created tokens have books");
            let verifiers: Vec<&str> = t.design.verifiers.iter().map(|v| v.kind()).collect();
            let status = match t.curated_status {
                CuratedStatus::NotListed => "not listed",
                CuratedStatus::Applied => "applied",
                CuratedStatus::Challenged => "challenged",
                CuratedStatus::Listed => "listed",
            };
            rows.push(vec![
                t.id.to_string(),
                t.design.symbol.clone(),
                t.design.name.clone(),
                short(&t.creator),
                book.supply().to_string(),
                book.minted().to_string(),
                book.burned().to_string(),
                status.into(),
                if verifiers.is_empty() { "-".into() } else { verifiers.join("+") },
            ]);
        }
    }
    Table {
        title: "tokens",
        header: vec!["id", "symbol", "name", "creator", "supply", "minted", "burned", "curated", "verifiers"],
        rows,
    }
}

fn claims(engine: Option<&Engine>) -> Table {
    let mut rows = Vec::new();
    if let Some(e) = engine {
        let claims = e.claims();
        let tokens: BTreeSet<TokenId> = claims.iter().map(|c| c.token).collect();
        let funnel = |token: Option<TokenId>| {
            let of = |s: Option<ClaimStatus>| {
                claims
                    .iter()
                    .filter(|c| token.is_none_or(|t| c.token == t) && s.is_none_or(|s| c.status == s))
                    .count()
                    .to_string()
            };
            vec![
                token.map_or("all".into(), |t| token_label(engine, t)),
                of(None),
                of(Some(ClaimStatus::Approved)),
                of(Some(ClaimStatus::Rejected)),
                of(Some(ClaimStatus::Open)),
            ]
        };
        rows.extend(tokens.into_iter().map(|t| funnel(Some(t))));
        rows.push(funnel(None));
    }
    Table { title: "claims", header: vec!["token", "submitted", "approved", "rejected", "open"], rows }
}

fn polls(engine: Option<&Engine>) -> Table {
    let mut rows = Vec::new();
    if let Some(e) = engine {
        for p in e.polls() {
            let (outcome, res) = match (&p.outcome, &p.resolution) {
                (PollOutcome::Unresolved, _) | (_, None) => ("unresolved", None),
                (PollOutcome::ListingWins, Some(r)) => ("listing wins", Some(r)),
                (PollOutcome::ChallengerWins, Some(r)) => ("challenger wins", Some(r)),
            };
            let cell = |f: &dyn Fn(&pat_core::Resolution) -> String| res.map_or("-".into(), f);
            rows.push(vec![
                p.id.to_string(),
                token_label(engine, p.token),
                short(&p.challenger),
                p.listing_deposit.to_string(),
                p.challenger_deposit.to_string(),
                p.commits.len().to_string(),
                p.reveals.len().to_string(),
                outcome.into(),
                cell(&|r| r.for_weight.to_string()),
                cell(&|r| r.against_weight.to_string()),
                cell(&|r| r.forfeited.to_string()),
                cell(&|r| r.winner_award.to_string()),
                cell(&|r| r.voter_awards.iter().map(|(_, a)| a).sum::<u64>().to_string()),
            ]);
        }
    }
    Table {
        title: "polls",
        header: vec![
            "poll",
            "token",
            "challenger",
            "listing_deposit",
            "challenger_deposit",
            "commits",
            "reveals",
            "outcome",
            "for",
            "against",
            "forfeited",
            "winner_award",
            "voter_awards",
        ],
        rows,
    }
}

fn reputation(engine: Option<&Engine>) -> Table {
    let mut rows = Vec::new();
    if let Some(e) = engine {
        let gov = e.gov();
        let mut accounts: BTreeSet<AccountId> = gov.accounts().copied().collect();
        for token in [TokenId::REP, TokenId::GOV] {
            if let Ok(book) = e.book(token) {
                accounts.extend(book.holders().filter(|(_, v)| **v > 0).map(|(a, _)| *a));
            }
        }
        for a in accounts {
            rows.push(vec![
                short(&a),
                e.rep_of(&a).to_string(),
                e.gov_of(&a).to_string(),
                gov.claimed(&a).to_string(),
                gov.given(&a).to_string(),
                gov.received(&a).to_string(),
                gov.locked(&a).to_string(),
                e.effective_gov(&a).to_string(),
            ]);
        }
    }
    Table {
        title: "reputation",
        header: vec!["account", "rep", "gov_owned", "gov_claimed", "lent", "borrowed", "locked", "voting_power"],
        rows,
    }
}

fn pools(engine: Option<&Engine>) -> Table {
    let mut rows = Vec::new();
    if let Some(e) = engine {
        for p in e.pools() {
            rows.push(vec![
                token_label(engine, p.token),
                token_label(engine, p.backing_token),
                p.balance.to_string(),
                p.deposited.to_string(),
                p.paid_out.to_string(),
                e.total_supply(p.token).map_or("-".into(), |s| s.to_string()),
            ]);
        }
    }
    Table {
        title: "pools",
        header: vec!["token", "backing", "balance", "deposited", "paid_out", "token_supply"],
        rows,
    }
}
