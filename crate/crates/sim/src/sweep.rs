//! Parameter sweeps.
//!
//! A grid file lists axes, each a path into the scenario and the values to
//! put there:
//!
//! ```toml
//! [[axis]]
//! path = "agents[2].policy.FreeRider.claim_prob"
//! values = ["0", "1/2", "1"]
//!
//! [[axis]]
//! path = "tcr.min_deposit"
//! values = [5, 10]
//! ```
//!
//! Grid points are the cartesian product of the axes, numbered from 0 with
//! the first axis varying slowest. Point `i` runs with seed
//! [`derive_seed`]`(base seed, i)`, so its run does not depend on the other
//! points or on how many run in parallel.

use std::io::Write;

use pat_core::sha256;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use toml::Value;

use crate::config::ScenarioConfig;
use crate::error::{SimError, SimResult};
use crate::run::{run, RunSummary};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    #[serde(rename = "axis", default)]
    pub axes: Vec<Axis>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub path: String,
    pub values: Vec<Value>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub index: usize,
    pub seed: u64,
    /// `(path, value)` for each axis.
    pub params: Vec<(String, String)>,
    pub summary: RunSummary,
}

/// First eight bytes, big-endian, of `SHA-256(seed_be || index_be)` with
/// both numbers as 8-byte big-endian integers.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut bytes = [0u8; 16];
    bytes[..8].copy_from_slice(&seed.to_be_bytes());
    bytes[8..].copy_from_slice(&index.to_be_bytes());
    let digest = sha256(&bytes);
    u64::from_be_bytes(digest.0[..8].try_into().expect("8 bytes"))
}

fn display(v: &Value) -> String {
    v.as_str().map_or_else(|| v.to_string(), str::to_owned)
}

impl Grid {
    pub fn from_toml(text: &str) -> SimResult<Self> {
        let grid: Grid = toml::from_str(text).map_err(|e| SimError::config("<grid>", e.message()))?;
        if grid.axes.is_empty() {
            return Err(SimError::config("axis", "the grid has no axes"));
        }
        for (i, a) in grid.axes.iter().enumerate() {
            if a.values.is_empty() {
                return Err(SimError::config(format!("axis[{i}].values"), "an axis needs at least one value"));
            }
            parse_path(&a.path).map_err(|reason| SimError::config(format!("axis[{i}].path"), reason))?;
        }
        Ok(grid)
    }

    pub fn len(&self) -> usize {
        if self.axes.is_empty() {
            0
        } else {
            self.axes.iter().map(|a| a.values.len()).product()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Value index on each axis for grid point `index`.
    pub fn coordinates(&self, mut index: usize) -> Vec<usize> {
        let mut coords = vec![0; self.axes.len()];
        for (slot, axis) in coords.iter_mut().zip(&self.axes).rev() {
            *slot = index % axis.values.len();
            index /= axis.values.len();
        }
        coords
    }

    /// The scenario for grid point `index`, seed included.
    pub fn variant(&self, base: &ScenarioConfig, index: usize) -> SimResult<ScenarioConfig> {
        let mut doc = Value::try_from(base).map_err(|e| SimError::config("<scenario>", e))?;
        for (axis, &c) in self.axes.iter().zip(&self.coordinates(index)) {
            set_path(&mut doc, &axis.path, axis.values[c].clone())?;
        }
        let mut config: ScenarioConfig =
            doc.try_into().map_err(|e: toml::de::Error| SimError::config("<variant>", e.message()))?;
        config.seed = derive_seed(base.seed, index as u64);
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, PartialEq)]
enum Step {
    Key(String),
    Index(usize),
}

/// Splits `a.b[2].c` into keys and indices.
fn parse_path(path: &str) -> Result<Vec<Step>, String> {
    let mut steps = Vec::new();
    for part in path.split('.') {
        let (key, mut rest) = part.split_once('[').map_or((part, ""), |(k, r)| (k, r));
        if key.is_empty() {
            return Err(format!("empty key in {path:?}"));
        }
        steps.push(Step::Key(key.to_owned()));
        while !rest.is_empty() {
            let (num, tail) = rest.split_once(']').ok_or_else(|| format!("unclosed index in {path:?}"))?;
            steps.push(Step::Index(num.parse().map_err(|_| format!("bad index {num:?} in {path:?}"))?));
            rest = match tail.strip_prefix('[') {
                Some(t) => t,
                None if tail.is_empty() => "",
                None => return Err(format!("unexpected {tail:?} in {path:?}")),
            };
        }
    }
    Ok(steps)
}

fn set_path(doc: &mut Value, path: &str, value: Value) -> SimResult<()> {
    let steps = parse_path(path).map_err(|r| SimError::config(path, r))?;
    let mut cur = doc;
    for (i, step) in steps.iter().enumerate() {
        let last = i + 1 == steps.len();
        cur = match (step, cur) {
            (Step::Key(k), Value::Table(t)) => {
                if last {
                    t.insert(k.clone(), value);
                    return Ok(());
                }
                // Missing tables (fields left at their defaults) are created.
                t.entry(k.clone()).or_insert_with(|| Value::Table(Default::default()))
            }
            (Step::Index(n), Value::Array(a)) => {
                let len = a.len();
                let slot = a.get_mut(*n).ok_or_else(|| SimError::config(path, format!("index {n} of {len}")))?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            (step, _) => return Err(SimError::config(path, format!("cannot follow {step:?}"))),
        };
    }
    unreachable!("paths have at least one step")
}

/// Runs every grid point and returns rows in grid order.
pub fn sweep(base: &ScenarioConfig, grid: &Grid) -> SimResult<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(SimError::config("axis", "the grid is empty"));
    }
    base.validate()?;
    (0..grid.len())
        .into_par_iter()
        .map(|index| {
            let config = grid.variant(base, index)?;
            let summary = run(&config)?.summary();
            let params = grid
                .axes
                .iter()
                .zip(grid.coordinates(index))
                .map(|(a, c)| (a.path.clone(), display(&a.values[c])))
                .collect();
            Ok(SweepRow { index, seed: config.seed, params, summary })
        })
        .collect()
}

/// Writes sweep rows as CSV: index, seed, one column per axis, then the
/// run summary.
pub fn write_rows_csv<W: Write>(grid: &Grid, rows: &[SweepRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = vec!["index".into(), "seed".into()];
    header.extend(grid.axes.iter().map(|a| a.path.clone()));
    header.extend(
        [
            "tokens",
            "claims_submitted",
            "claims_approved",
            "claims_rejected",
            "claims_open",
            "approval_ratio",
            "free_rider_claims",
            "free_rider_approved",
            "listed_tokens",
            "gov_supply",
            "log_records",
            "head_hash",
        ]
        .map(String::from),
    );
    w.write_record(&header)?;
    for r in rows {
        let s = &r.summary;
        let mut rec = vec![r.index.to_string(), r.seed.to_string()];
        rec.extend(r.params.iter().map(|(_, v)| v.clone()));
        rec.extend([
            s.tokens.to_string(),
            s.claims_submitted.to_string(),
            s.claims_approved.to_string(),
            s.claims_rejected.to_string(),
            s.claims_open.to_string(),
            format!("{:.6}", s.approval_ratio()),
            s.free_rider_claims.to_string(),
            s.free_rider_approved.to_string(),
            s.listed_tokens.to_string(),
            s.gov_supply.to_string(),
            s.log_records.to_string(),
            s.head_hash.to_hex(),
        ]);
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
