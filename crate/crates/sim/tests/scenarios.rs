use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use pat_core::{ClaimStatus, TokenFilter};
use pat_sim::{run, scenarios, team_account, ScenarioConfig};

#[test]
fn forum_scenario_has_the_intended_shape() {
    let config = ScenarioConfig::from_toml(scenarios::FORUM2019).unwrap();
    assert_eq!(config.agent_policies().len(), 50);

    let started = Instant::now();
    let out = run(&config).unwrap();
    assert!(started.elapsed() < Duration::from_secs(10));

    let tokens = out.engine.list_tokens(TokenFilter::All);
    assert_eq!(tokens.len(), 11);
    assert_eq!(tokens.iter().filter(|t| t.creator != team_account()).count(), 7);
    let kinds: BTreeSet<&str> = tokens.iter().flat_map(|t| t.design.verifiers.iter().map(|v| v.kind())).collect();
    assert_eq!(kinds.len(), 7, "{kinds:?}");

    let s = out.summary();
    assert!(s.claims_submitted >= 139, "{s:?}");
    let ratio = s.approval_ratio();
    assert!((0.518 - 0.10..=0.518 + 0.10).contains(&ratio), "approval ratio {ratio}");
}

#[test]
fn forum_claims_partition_into_funnel_states() {
    let out = run(&ScenarioConfig::from_toml(scenarios::FORUM2019).unwrap()).unwrap();
    let s = out.summary();
    assert_eq!(s.claims_submitted, s.claims_approved + s.claims_rejected + s.claims_open);
    let approved_units: u64 = out
        .engine
        .claims()
        .iter()
        .filter(|c| c.status == ClaimStatus::Approved)
        .map(|c| c.minted)
        .sum();
    let minted: u64 = out.frames.last().unwrap().units_minted.values().sum();
    assert_eq!(approved_units, minted);
}

#[test]
fn sound_verification_contains_free_riders() {
    let base = ScenarioConfig::from_toml(scenarios::FREE_RIDERS).unwrap();
    for seed in 0..10 {
        let mut config = base.clone();
        config.seed = seed;
        let s = run(&config).unwrap().summary();
        assert!(s.free_rider_claims > 20, "seed {seed}: {s:?}");
        assert_eq!(s.free_rider_approved, 0, "seed {seed}");
        assert!(s.claims_approved > 0, "seed {seed}");
    }
}
