//! Acceptance checks for the token engine and simulator, with the
//! independent reference models they compare against.
//!
//! `cargo test -p pat-acceptance --test acceptance` runs every check and
//! prints one PASS or FAIL line per criterion.

pub mod criteria;
pub mod economy;
pub mod payout;
