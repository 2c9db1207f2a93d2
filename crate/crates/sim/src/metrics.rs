//! Metrics frames and their CSV form.
//!
//! A frame describes the engine at the end of a tick. Frames are cut at the
//! `TimeAdvanced` record that closes tick `t` when `(t + 1)` is a multiple
//! of the run's metrics interval or `t` is the run's last tick. Because the
//! rule only looks at the log, replaying a log yields the same frames as the
//! live run.

use std::collections::BTreeMap;
use std::io::Write;

use pat_core::{AccountId, ClaimStatus, CuratedStatus, Engine, EventRecord, Hash32, RunInfo, TokenId};
use serde::Serialize;

use crate::error::SimResult;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricsFrame {
    pub tick: u64,
    pub claims_submitted: u64,
    pub claims_approved: u64,
    pub claims_rejected: u64,
    /// Units ever minted, per user token.
    pub units_minted: BTreeMap<TokenId, u64>,
    /// Tokens currently on the curated list.
    pub curated_list: Vec<TokenId>,
    /// REP per account, for accounts holding any.
    pub rep_distribution: BTreeMap<AccountId, u64>,
    pub gov_supply: u64,
    pub pool_balances: BTreeMap<TokenId, u64>,
    /// Log head hash once the tick has closed.
    pub log_head_hash: Hash32,
}

impl MetricsFrame {
    /// The frame for the state after `tick`, whose last record hashes to
    /// `head`.
    pub fn capture(engine: &Engine, tick: u64, head: Hash32) -> Self {
        let claims = engine.claims();
        let count = |status| claims.iter().filter(|c| c.status == status).count() as u64;
        let mut units_minted = BTreeMap::new();
        let mut curated_list = Vec::new();
        for record in engine.list_tokens(pat_core::TokenFilter::All) {
            let book = engine.book(record.id).expect("created tokens have books");
            units_minted.insert(record.id, book.minted());
            if record.curated_status == CuratedStatus::Listed {
                curated_list.push(record.id);
            }
        }
        let rep_distribution = engine
            .book(TokenId::REP)
            .map(|b| b.holders().filter(|(_, v)| **v > 0).map(|(a, v)| (*a, *v)).collect())
            .unwrap_or_default();
        Self {
            tick,
            claims_submitted: claims.len() as u64,
            claims_approved: count(ClaimStatus::Approved),
            claims_rejected: count(ClaimStatus::Rejected),
            units_minted,
            curated_list,
            rep_distribution,
            gov_supply: engine.total_supply(TokenId::GOV).unwrap_or(0),
            pool_balances: engine.pools().map(|p| (p.token, p.balance)).collect(),
            log_head_hash: head,
        }
    }

    pub fn claims_open(&self) -> u64 {
        self.claims_submitted - self.claims_approved - self.claims_rejected
    }
}

/// Whether the record closes a tick that gets a frame. Returns the tick.
pub fn frame_tick(record: &EventRecord, run: Option<&RunInfo>) -> Option<u64> {
    let pat_core::Event::TimeAdvanced { .. } = record.event else { return None };
    let tick = record.time.tick();
    let (interval, steps) = run.map_or((1, u64::MAX), |r| (r.metrics_interval.max(1), r.steps));
    ((tick + 1) % interval == 0 || tick + 1 == steps).then_some(tick)
}

/// Rebuilds the frames of a log. An empty log has no frames.
pub fn replay(records: &[EventRecord]) -> SimResult<(Option<Engine>, Vec<MetricsFrame>)> {
    if records.is_empty() {
        return Ok((None, Vec::new()));
    }
    let mut frames = Vec::new();
    let engine = Engine::replay_with(records, |engine, record| {
        if let Some(tick) = frame_tick(record, engine.run_info()) {
            frames.push(MetricsFrame::capture(engine, tick, record.hash));
        }
    })?;
    Ok((Some(engine), frames))
}

#[derive(Serialize)]
struct Row<'a> {
    tick: u64,
    claims_submitted: u64,
    claims_approved: u64,
    claims_rejected: u64,
    claims_open: u64,
    units_minted: String,
    curated_list: String,
    rep_distribution: String,
    gov_supply: u64,
    pool_balances: String,
    log_head_hash: &'a str,
}

fn pairs<K: std::fmt::Display>(map: &BTreeMap<K, u64>) -> String {
    map.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
}

/// Writes frames as CSV, one row per frame. Map-valued columns are
/// `key=value` pairs joined by `;`, lists are joined by `;`.
pub fn write_csv<W: Write>(frames: &[MetricsFrame], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if frames.is_empty() {
        w.write_record([
            "tick",
            "claims_submitted",
            "claims_approved",
            "claims_rejected",
            "claims_open",
            "units_minted",
            "curated_list",
            "rep_distribution",
            "gov_supply",
            "pool_balances",
            "log_head_hash",
        ])?;
    }
    for f in frames {
        let hash = f.log_head_hash.to_hex();
        w.serialize(Row {
            tick: f.tick,
            claims_submitted: f.claims_submitted,
            claims_approved: f.claims_approved,
            claims_rejected: f.claims_rejected,
            claims_open: f.claims_open(),
            units_minted: pairs(&f.units_minted),
            curated_list: f.curated_list.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(";"),
            rep_distribution: pairs(&f.rep_distribution),
            gov_supply: f.gov_supply,
            pool_balances: pairs(&f.pool_balances),
            log_head_hash: &hash,
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string(frames: &[MetricsFrame]) -> String {
    let mut buf = Vec::new();
    write_csv(frames, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("csv output is UTF-8")
}
