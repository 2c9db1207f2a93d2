//! The acceptance checks. Each returns a one-line summary on success and a
//! description of the first failure otherwise.

use std::collections::BTreeSet;
use std::fs;
use std::time::{Duration, Instant};

use pat_core::event::{log_to_string, parse_log};
use pat_core::{
    custody_account, AccountId, Attestation, AttestationPayload, BackingSpec, BurnSource, ClaimId, ClaimStatus,
    Comparator, Engine, EngineParams, Error, Hash32, OracleSigner, PollId, ProposalKind, RepConfig, Salt, TcrParams,
    TokenDesign, TokenFilter, TokenId, Verification, VerifierSpec, VoteChoice,
};
use pat_sim::{run, scenarios, team_account, write_csv, AgentPolicy, BadProof, ScenarioConfig, SimRng};
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use sha2::{Digest, Sha256};

use crate::economy;
use crate::payout::{self, Ballot, Voter};

pub type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn engine_err(e: Error) -> String {
    format!("{}: {e}", e.name())
}

fn forum() -> ScenarioConfig {
    ScenarioConfig::from_toml(scenarios::FORUM2019).expect("bundled scenario parses")
}

fn free_riders() -> ScenarioConfig {
    ScenarioConfig::from_toml(scenarios::FREE_RIDERS).expect("bundled scenario parses")
}

// ---------------------------------------------------------------------------
// 1. Forum replication

pub const FORUM_TARGET_RATIO: f64 = 72.0 / 139.0;
pub const FORUM_RATIO_TOLERANCE: f64 = 0.10;
pub const FORUM_MIN_CLAIMS: u64 = 139;

pub fn forum_replication() -> Outcome {
    let config = forum();
    ensure(config.agent_policies().len() == 50, || format!("{} agents", config.agent_policies().len()))?;

    let started = Instant::now();
    let out = run(&config).map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(10), || format!("run took {elapsed:?}"))?;

    let tokens = out.engine.list_tokens(TokenFilter::All);
    let by_agents = tokens.iter().filter(|t| t.creator != team_account()).count();
    let kinds: BTreeSet<&str> = tokens.iter().flat_map(|t| t.design.verifiers.iter().map(|v| v.kind())).collect();
    ensure(tokens.len() == 11 && by_agents == 7, || format!("{} tokens, {by_agents} agent-created", tokens.len()))?;
    ensure(kinds.len() == 7, || format!("verifier kinds {kinds:?}"))?;

    let s = out.summary();
    let ratio = s.approval_ratio();
    ensure(s.claims_submitted >= FORUM_MIN_CLAIMS, || format!("only {} claims", s.claims_submitted))?;
    ensure((ratio - FORUM_TARGET_RATIO).abs() <= FORUM_RATIO_TOLERANCE, || {
        format!("approval ratio {ratio:.3} outside {FORUM_TARGET_RATIO:.3} +/- {FORUM_RATIO_TOLERANCE}")
    })?;

    let again = run(&config).map_err(|e| e.to_string())?;
    ensure(again.engine.head_hash() == out.engine.head_hash(), || "second run diverged".into())?;
    Ok(format!(
        "{} claims, {} approved, ratio {ratio:.3}, {} tokens ({by_agents} agent-created), {} verifier kinds, {:.0} ms",
        s.claims_submitted,
        s.claims_approved,
        tokens.len(),
        kinds.len(),
        elapsed.as_secs_f64() * 1000.0
    ))
}

// ---------------------------------------------------------------------------
// 2. Conservation

pub const CONSERVATION_CASES: u32 = 32;
pub const CONSERVATION_OPS: usize = 1000;

pub fn conservation() -> Outcome {
    let started = Instant::now();
    let mut runner = TestRunner::new_with_rng(
        Config { cases: CONSERVATION_CASES, failure_persistence: None, ..Config::default() },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    );
    let tokens = economy::economy().token_count();
    ensure(tokens >= 5, || format!("economy has {tokens} tokens"))?;
    runner
        .run(&economy::sequences(CONSERVATION_OPS), |ops| {
            economy::check_sequence(&ops).map_err(proptest::test_runner::TestCaseError::fail)
        })
        .map_err(|e| match e {
            proptest::test_runner::TestError::Fail(reason, ops) => {
                format!("{reason} (shrunk to {} ops)", ops.len())
            }
            other => other.to_string(),
        })?;
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(5), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{CONSERVATION_CASES} sequences x {CONSERVATION_OPS} ops over {tokens} tokens, every prefix exact, {:.2} s",
        elapsed.as_secs_f64()
    ))
}

// ---------------------------------------------------------------------------
// 3. Determinism

pub fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut checked = Vec::new();
    for config in [forum(), free_riders()] {
        let mut files = Vec::new();
        let mut heads = Vec::new();
        for attempt in 0..2 {
            let out = run(&config).map_err(|e| e.to_string())?;
            let metrics = dir.path().join(format!("{}-{attempt}.csv", config.name));
            let log = dir.path().join(format!("{}-{attempt}.log", config.name));
            write_csv(&out.frames, fs::File::create(&metrics).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            fs::write(&log, log_to_string(out.engine.log())).map_err(|e| e.to_string())?;
            heads.push(out.engine.head_hash());
            files.push((metrics, log));
        }
        // Replay from the first run's log file.
        let records = parse_log(&fs::read(&files[0].1).map_err(|e| e.to_string())?).map_err(engine_err)?;
        let (engine, frames) = pat_sim::replay(&records).map_err(|e| e.to_string())?;
        heads.push(engine.map(|e| e.head_hash()).unwrap_or(Hash32::ZERO));
        let replay_metrics = dir.path().join(format!("{}-replay.csv", config.name));
        write_csv(&frames, fs::File::create(&replay_metrics).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;

        let read = |p: &std::path::Path| fs::read(p).unwrap_or_default();
        ensure(heads.iter().all(|h| *h == heads[0]), || format!("{}: head hashes differ", config.name))?;
        ensure(read(&files[0].0) == read(&files[1].0), || format!("{}: metrics differ between runs", config.name))?;
        ensure(read(&files[0].1) == read(&files[1].1), || format!("{}: logs differ between runs", config.name))?;
        ensure(read(&files[0].0) == read(&replay_metrics), || format!("{}: replayed metrics differ", config.name))?;
        checked.push(format!("{} ({} frames)", config.name, frames.len()));
    }
    Ok(format!("run, rerun and replay agree byte for byte: {}", checked.join(", ")))
}

// ---------------------------------------------------------------------------
// 4. TCR payouts against the brute-force rule

const APPLICANT: AccountId = AccountId([1; 32]);
const CHALLENGER: AccountId = AccountId([2; 32]);

fn symbol(i: usize) -> String {
    format!("T{}", (b'A' + i as u8) as char)
}

/// An engine with poll 0 open for commits: APPLICANT applied token 0,
/// CHALLENGER challenged it, and every voter holds 10 GOV.
pub fn poll_fixture(quorum: u8, dispensation: u8, deposit: u64) -> Result<Engine, Error> {
    let params = EngineParams {
        tcr: TcrParams {
            min_deposit: deposit,
            apply_stage_ticks: 1,
            commit_stage_ticks: 1,
            reveal_stage_ticks: 1,
            vote_quorum_pct: quorum,
            dispensation_pct: dispensation,
        },
        ..EngineParams::default()
    };
    let mut e = Engine::new(params)?;
    let accounts = [APPLICANT, CHALLENGER].into_iter().chain((0..payout::MAX_VOTERS).map(payout::voter_account));
    for (i, account) in accounts.enumerate() {
        e.create_token(account, TokenDesign::simple(&symbol(i), &symbol(i)))?;
        e.claim_gov(account)?;
    }
    e.apply_listing(APPLICANT, TokenId(0), ProposalKind::AddToList)?;
    e.challenge(CHALLENGER, TokenId(0))?;
    Ok(e)
}

fn salt_for(account: &AccountId) -> Salt {
    Salt(account.0)
}

/// Walks every poll of up to [`payout::MAX_VOTERS`] voters through the
/// engine. Commits are enumerated first and shared between polls with the
/// same prefix; then, once the commit stage is over, each voter who
/// committed `For` either reveals or stays silent and each `Against` voter
/// reveals. That reaches every stake/ballot assignment exactly once.
struct EngineWalk {
    quorum: u8,
    dispensation: u8,
    /// GOV each participant owns before voting, by account.
    owned_before: Vec<(AccountId, u64)>,
    polls: u64,
}

impl EngineWalk {
    fn commits(&mut self, e: &Engine, committed: &mut Vec<(u64, VoteChoice)>) -> Result<(), String> {
        let mut revealing = e.clone();
        revealing.advance_time(1).map_err(engine_err)?;
        self.reveals(revealing, committed, &mut Vec::new())?;
        if committed.len() == payout::MAX_VOTERS {
            return Ok(());
        }
        let voter = payout::voter_account(committed.len());
        for stake in payout::STAKES {
            for choice in [VoteChoice::For, VoteChoice::Against] {
                let mut next = e.clone();
                let hash = pat_core::commit_hash(choice, &salt_for(&voter), PollId(0));
                next.commit_vote(voter, PollId(0), hash, stake).map_err(engine_err)?;
                committed.push((stake, choice));
                self.commits(&next, committed)?;
                committed.pop();
            }
        }
        Ok(())
    }

    fn reveals(&mut self, e: Engine, committed: &[(u64, VoteChoice)], ballots: &mut Vec<Voter>) -> Result<(), String> {
        let i = ballots.len();
        let Some(&(stake, choice)) = committed.get(i) else {
            return self.resolve(e, ballots);
        };
        let account = payout::voter_account(i);
        if choice == VoteChoice::For {
            ballots.push(Voter { account, stake, ballot: Ballot::Silent });
            self.reveals(e.clone(), committed, ballots)?;
            ballots.pop();
        }
        let mut e = e;
        e.reveal_vote(account, PollId(0), choice, salt_for(&account)).map_err(engine_err)?;
        ballots.push(Voter { account, stake, ballot: Ballot::Revealed(choice) });
        self.reveals(e, committed, ballots)?;
        ballots.pop();
        Ok(())
    }

    fn resolve(&mut self, mut e: Engine, voters: &[Voter]) -> Result<(), String> {
        let d = ENGINE_POLL_DEPOSIT;
        let want = payout::expected(voters, d, d, self.quorum, self.dispensation);
        e.advance_time(1).map_err(engine_err)?;
        let resolution = e.resolve_poll(PollId(0)).map_err(engine_err)?;
        let context = || format!("engine, quorum {} disp {} {voters:?}", self.quorum, self.dispensation);
        payout::compare(&resolution, &want).map_err(|m| format!("{}: {m}", context()))?;

        let listing_wins = want.outcome == pat_core::PollOutcome::ListingWins;
        let (applicant, challenger) = if listing_wins {
            (i128::from(want.winner_award), -i128::from(want.forfeited))
        } else {
            (-i128::from(want.forfeited), i128::from(want.winner_award))
        };
        for (account, before) in &self.owned_before {
            let change = if *account == APPLICANT {
                applicant
            } else if *account == CHALLENGER {
                challenger
            } else {
                want.voter_awards.iter().find(|(a, _)| a == account).map_or(0, |(_, x)| i128::from(*x))
            };
            let got = i128::from(e.gov_of(account)) - i128::from(*before);
            if got != change {
                return Err(format!("{}: GOV change of {account}: engine {got}, oracle {change}", context()));
            }
            if e.gov().locked(account) != 0 {
                return Err(format!("{}: {account} still has GOV locked", context()));
            }
        }
        self.polls += 1;
        Ok(())
    }
}

/// Deposits used for the `k`-th enumerated poll in the pure comparison;
/// varied so that every rounding path is reached.
fn deposits(k: u64) -> (u64, u64) {
    (1 + k % 13, 1 + k % 11)
}

pub const ENGINE_POLL_DEPOSIT: u64 = 7;

pub fn tcr_oracle() -> Outcome {
    let started = Instant::now();
    let mut pure = 0u64;
    let mut engine_polls = 0u64;
    for quorum in payout::PERCENTS {
        for disp in payout::PERCENTS {
            for (k, voters) in payout::all_polls().enumerate() {
                let (ld, cd) = deposits(k as u64);
                let want = payout::expected(&voters, ld, cd, quorum, disp);
                let got = pat_core::tcr::resolve(&payout::poll_of(&voters, ld, cd), quorum, disp)
                    .map_err(engine_err)?;
                payout::compare(&got, &want)
                    .map_err(|m| format!("quorum {quorum} disp {disp} deposits {ld}/{cd} {voters:?}: {m}"))?;
                pure += 1;
            }

            let base = poll_fixture(quorum, disp, ENGINE_POLL_DEPOSIT).map_err(engine_err)?;
            let owned_before = [APPLICANT, CHALLENGER]
                .into_iter()
                .chain((0..payout::MAX_VOTERS).map(payout::voter_account))
                .map(|a| (a, base.gov_of(&a)))
                .collect();
            let mut walk = EngineWalk { quorum, dispensation: disp, owned_before, polls: 0 };
            walk.commits(&base, &mut Vec::new())?;
            ensure(walk.polls == payout::poll_count(), || format!("engine walk reached {} polls", walk.polls))?;
            engine_polls += walk.polls;
        }
    }
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{pure} resolver and {engine_polls} engine polls ({} per parameter pair x 9), 0 mismatches, {:.1} s",
        payout::poll_count(),
        elapsed.as_secs_f64()
    ))
}

// ---------------------------------------------------------------------------
// 5. Commit-reveal

pub const COMMIT_REVEAL_CASES: u64 = 10_000;

/// The commitment written out from its definition:
/// SHA-256 over the choice byte (1 for, 0 against), the salt and the poll id
/// in decimal.
pub fn reference_commit(choice: VoteChoice, salt: &[u8; 32], poll: u64) -> Hash32 {
    let mut h = Sha256::new();
    h.update([u8::from(choice == VoteChoice::For)]);
    h.update(salt);
    h.update(poll.to_string().as_bytes());
    Hash32(h.finalize().into())
}

fn random_choice(rng: &mut SimRng) -> VoteChoice {
    if rng.below(2) == 0 {
        VoteChoice::For
    } else {
        VoteChoice::Against
    }
}

pub fn commit_reveal() -> Outcome {
    let base = poll_fixture(50, 50, 5).map_err(engine_err)?;
    let mut rng = SimRng::new(0x5eed_c0de);
    let (mut accepted, mut false_accepts, mut false_rejects, mut outside) = (0, 0, 0, 0);
    for case in 0..COMMIT_REVEAL_CASES {
        let voter = payout::voter_account(rng.below(payout::MAX_VOTERS as u64) as usize);
        let committed_choice = random_choice(&mut rng);
        let committed_salt = rng.bytes32();
        let committed_poll = if rng.below(4) == 0 { 1 + rng.below(20) } else { 0 };
        let hash = reference_commit(committed_choice, &committed_salt, committed_poll);

        let (choice, salt) = match rng.below(6) {
            0 | 1 | 2 => (committed_choice, committed_salt),
            3 => (random_choice(&mut rng), committed_salt),
            4 => {
                let mut s = committed_salt;
                s[rng.below(32) as usize] ^= 1 << rng.below(8);
                (committed_choice, s)
            }
            _ => (random_choice(&mut rng), rng.bytes32()),
        };
        // 0: still in the commit stage, 1: reveal stage, 2: after it.
        let stage = [0, 1, 1, 2][rng.below(4) as usize];

        let mut e = base.clone();
        e.commit_vote(voter, PollId(0), hash, 1 + rng.below(4)).map_err(engine_err)?;
        if stage > 0 {
            e.advance_time(stage).map_err(engine_err)?;
        }
        let head = e.head_hash();
        let result = e.reveal_vote(voter, PollId(0), choice, Salt(salt));
        let should = stage == 1 && reference_commit(choice, &salt, 0) == hash;
        match (result.is_ok(), should) {
            (true, true) => accepted += 1,
            (true, false) => false_accepts += 1,
            (false, true) => false_rejects += 1,
            (false, false) => {
                if stage != 1 {
                    outside += 1;
                }
                if e.head_hash() != head {
                    return Err(format!("case {case}: rejected reveal changed the log"));
                }
            }
        }
    }
    ensure(false_accepts == 0 && false_rejects == 0, || {
        format!("{false_accepts} false accepts, {false_rejects} false rejects")
    })?;
    ensure(accepted > 0 && outside > 0, || "cases did not cover both windows".into())?;
    Ok(format!(
        "{COMMIT_REVEAL_CASES} cases: {accepted} accepted, {} rejected ({outside} outside the reveal window), \
         0 false accepts, 0 false rejects",
        COMMIT_REVEAL_CASES - accepted
    ))
}

// ---------------------------------------------------------------------------
// 6. Tamper detection

pub const TAMPER_RUNS: u64 = 100;

/// Recomputes every record hash from the definition, reading the event
/// bytes straight out of the line text.
fn reference_chain(text: &str) -> Result<(), String> {
    let records = parse_log::<u64>(text.as_bytes()).map_err(engine_err)?;
    let mut prev = "0".repeat(64);
    for (line, record) in text.lines().zip(&records) {
        let start = line.find(",\"event\":").ok_or("no event field")? + ",\"event\":".len();
        let end = line.rfind(",\"hash\":\"").ok_or("no hash field")?;
        let mut h = Sha256::new();
        h.update(prev.as_bytes());
        h.update(&line.as_bytes()[start..end]);
        h.update(format!("{}@{}", record.seq, record.time.0).as_bytes());
        let hash = Hash32(h.finalize().into());
        if hash != record.hash {
            return Err(format!("record {} hash does not recompute", record.seq));
        }
        prev = hash.to_hex();
    }
    Ok(())
}

pub fn tamper_detection() -> Outcome {
    let mut rng = SimRng::new(0x7a3f);
    let mut detected = 0;
    let mut exact = 0;
    for run_index in 0..TAMPER_RUNS {
        let mut config = free_riders();
        config.seed = run_index;
        let out = run(&config).map_err(|e| e.to_string())?;
        let text = log_to_string(out.engine.log());
        reference_chain(&text).map_err(|m| format!("run {run_index}: {m}"))?;
        ensure(pat_core::verify_log_bytes::<u64>(text.as_bytes()).is_intact(), || {
            format!("run {run_index}: untouched log fails verification")
        })?;

        let line_starts: Vec<usize> =
            std::iter::once(0).chain(text.match_indices('\n').map(|(i, _)| i + 1)).filter(|i| *i < text.len()).collect();
        let target = rng.below(line_starts.len() as u64) as usize;
        let line_end = text[line_starts[target]..].find('\n').map_or(text.len(), |i| line_starts[target] + i);
        let offset = line_starts[target] + rng.below((line_end - line_starts[target]) as u64) as usize;
        let mut bytes = text.into_bytes();
        bytes[offset] ^= 1 << rng.below(8);

        match pat_core::verify_log_bytes::<u64>(&bytes) {
            Verification::FirstBad(seq) if seq as usize <= target => {
                detected += 1;
                if seq as usize == target {
                    exact += 1;
                }
            }
            other => return Err(format!("run {run_index}: flipped a bit in record {target}, got {other:?}")),
        }
    }
    Ok(format!("{detected}/{TAMPER_RUNS} flips detected at or before the mutated record ({exact} exactly at it)"))
}

// ---------------------------------------------------------------------------
// 7. REP and the GOV ladder

pub const GOV_THRESHOLDS: [u64; 3] = [1, 7, 100];
pub const GOV_PER_LEVEL: u64 = 3;

pub fn rep_and_gov() -> Outcome {
    // REP never moves by transfer or burn, whatever the amounts.
    let mut e = Engine::new(EngineParams::default()).map_err(engine_err)?;
    let (a, b, c) = (AccountId([1; 32]), AccountId([2; 32]), AccountId([3; 32]));
    e.create_token(a, TokenDesign::simple("A", "A")).map_err(engine_err)?;
    e.create_token(b, TokenDesign::simple("B", "B")).map_err(engine_err)?;
    let rep = e.rep_of(&a);
    let accounts = [a, b, c, custody_account(TokenId(0)), AccountId::derive("anyone")];
    let mut attempts = 0;
    for from in accounts {
        for to in accounts {
            for amount in [0, 1, rep - 1, rep, rep + 1, u64::MAX] {
                let head = e.head_hash();
                let t = e.transfer(TokenId::REP, from, to, amount);
                let burn = e.burn_units(TokenId::REP, from, amount);
                ensure(t.is_err() && burn.is_err(), || format!("REP {amount} from {from}: {t:?} {burn:?}"))?;
                ensure(e.head_hash() == head, || "failed REP operation logged something".into())?;
                attempts += 2;
            }
        }
    }

    // claim_gov pays floor(REP / threshold) * per_level minus what was
    // already claimed, checked before and after earning more REP.
    let holder = AccountId([9; 32]);
    let mut cases = 0;
    for threshold in GOV_THRESHOLDS {
        for rep in 0..=1000u64 {
            let bonus = 1 + rep % 13;
            let params = EngineParams {
                rep: RepConfig {
                    rep_per_creation: rep.max(1),
                    rep_per_claim: bonus,
                    gov_threshold: threshold,
                    gov_per_level: GOV_PER_LEVEL,
                },
                ..EngineParams::default()
            };
            let mut e = Engine::new(params).map_err(engine_err)?;
            e.create_token(AccountId([8; 32]), TokenDesign::simple("CLAIM", "CLAIM")).map_err(engine_err)?;
            if rep > 0 {
                e.create_token(holder, TokenDesign::simple("OWN", "OWN")).map_err(engine_err)?;
            }
            ensure(e.rep_of(&holder) == rep, || format!("holder has {} REP, wanted {rep}", e.rep_of(&holder)))?;

            let first = e.claim_gov(holder).map_err(engine_err)?;
            let want = (rep / threshold) * GOV_PER_LEVEL;
            ensure(first == want, || format!("REP {rep} threshold {threshold}: claimed {first}, formula {want}"))?;
            ensure(e.claim_gov(holder).map_err(engine_err)? == 0, || "second claim paid again".into())?;

            e.submit_claim(holder, TokenId(0), 1).map_err(engine_err)?;
            let total = rep + bonus;
            ensure(e.rep_of(&holder) == total, || "claim did not award REP".into())?;
            let second = e.claim_gov(holder).map_err(engine_err)?;
            let want = (total / threshold) * GOV_PER_LEVEL - first;
            ensure(second == want, || format!("REP {total} threshold {threshold}: claimed {second}, formula {want}"))?;
            ensure(e.gov_of(&holder) == first + second && e.gov().claimed(&holder) == first + second, || {
                "GOV balance and claimed total disagree".into()
            })?;
            cases += 1;
        }
    }
    Ok(format!("{attempts} REP transfer/burn attempts all refused; GOV formula holds in {cases} cases"))
}

// ---------------------------------------------------------------------------
// 8. Anti-fraud

pub const ANTI_FRAUD_PAIRS: u64 = 100;
const STREAM_CLAIMS: u64 = 30;
const CLAIMANTS: [AccountId; 4] = [AccountId([0x21; 32]), AccountId([0x22; 32]), AccountId([0x23; 32]), AccountId([0x24; 32])];
const APPROVER: AccountId = AccountId([0x31; 32]);
const PEERS: [AccountId; 3] = [AccountId([0x41; 32]), AccountId([0x42; 32]), AccountId([0x43; 32])];
const CENTER: (i64, i64) = (475_000_000, 80_000_000);

fn oracle() -> OracleSigner {
    OracleSigner::from_seed([0x51; 32])
}

fn forger() -> OracleSigner {
    OracleSigner::from_seed([0x52; 32])
}

fn random_verifier(rng: &mut SimRng) -> VerifierSpec {
    match rng.below(7) {
        0 => VerifierSpec::DesignatedApprover { approver: APPROVER },
        1 => VerifierSpec::PeerQuorum { attestors: PEERS.to_vec(), k: 1 + rng.below(3) as u32 },
        2 => VerifierSpec::SensorOracle {
            oracle_key: oracle().public_key(),
            comparator: if rng.below(2) == 0 { Comparator::AtLeast } else { Comparator::AtMost },
            threshold: rng.in_range(0, 10_000),
        },
        3 => VerifierSpec::Location {
            center_lat_e7: CENTER.0,
            center_lon_e7: CENTER.1,
            radius_m: 100 + rng.below(3000),
            oracle_key: oracle().public_key(),
        },
        4 => VerifierSpec::TokenBalanceThreshold { token: TokenId(0), min_balance: 1 + rng.below(4) },
        5 => VerifierSpec::ClaimWindow { max_claims: 1 + rng.below(3) as u32, per_ticks: 1 + rng.below(8) },
        _ => VerifierSpec::AttachmentHash,
    }
}

/// Evidence for one claim against one verifier, independent of where that
/// verifier sits in a design.
#[derive(Debug, Clone)]
enum Evidence {
    Nothing,
    Approval(bool),
    Endorsements(Vec<(AccountId, bool)>),
    Measurement { value: i64, honest: bool },
    Coordinate { lat: i64, lon: i64, honest: bool },
    Attachment([u8; 32]),
}

impl Evidence {
    fn draw(spec: &VerifierSpec, rng: &mut SimRng) -> Evidence {
        if rng.below(8) == 0 {
            return Evidence::Nothing;
        }
        let honest = rng.below(4) != 0;
        match spec {
            VerifierSpec::DesignatedApprover { .. } => Evidence::Approval(rng.below(3) != 0),
            VerifierSpec::PeerQuorum { attestors, .. } => {
                let mut list = Vec::new();
                for a in attestors {
                    if rng.below(4) != 0 {
                        list.push((*a, rng.below(3) != 0));
                    }
                }
                Evidence::Endorsements(list)
            }
            VerifierSpec::SensorOracle { .. } => Evidence::Measurement { value: rng.in_range(0, 10_000), honest },
            VerifierSpec::Location { .. } => Evidence::Coordinate {
                lat: CENTER.0 + rng.in_range(-300_000, 300_000),
                lon: CENTER.1 + rng.in_range(-300_000, 300_000),
                honest,
            },
            VerifierSpec::AttachmentHash => Evidence::Attachment(rng.bytes32()),
            VerifierSpec::TokenBalanceThreshold { .. } | VerifierSpec::ClaimWindow { .. } => Evidence::Nothing,
        }
    }

    fn attestations(&self, claim: ClaimId, index: u32) -> Vec<Attestation> {
        let plain = |payload| Attestation { claim, verifier_index: index, payload };
        let signer = |honest: bool| if honest { oracle() } else { forger() };
        match self {
            Evidence::Nothing => Vec::new(),
            Evidence::Approval(approve) => {
                vec![plain(AttestationPayload::Approval { approver: APPROVER, approve: *approve })]
            }
            Evidence::Endorsements(list) => list
                .iter()
                .map(|(attestor, endorse)| plain(AttestationPayload::Endorsement { attestor: *attestor, endorse: *endorse }))
                .collect(),
            Evidence::Measurement { value, honest } => vec![signer(*honest).measurement(claim, index, *value)],
            Evidence::Coordinate { lat, lon, honest } => vec![signer(*honest).coordinate(claim, index, *lat, *lon)],
            Evidence::Attachment(digest) => vec![plain(AttestationPayload::Attachment { digest: Hash32(*digest) })],
        }
    }
}

/// A claim in the fixed stream: who claims, how long after the previous
/// claim, and evidence for every verifier of the larger design.
struct StreamClaim {
    claimant: AccountId,
    wait: u64,
    evidence: Vec<Evidence>,
}

/// Runs the stream against a design made of `pool[i]` for each `i` in
/// `chosen` (in that order) and returns the approved claim ids.
fn approvals(
    pool: &[VerifierSpec],
    chosen: &[usize],
    stream: &[StreamClaim],
    gate_balances: &[u64],
) -> Result<BTreeSet<u64>, String> {
    let mut e = Engine::new(EngineParams::default()).map_err(engine_err)?;
    let owner = AccountId([0x61; 32]);
    e.create_token(owner, TokenDesign::simple("GATE", "GATE")).map_err(engine_err)?;
    for (claimant, amount) in CLAIMANTS.iter().zip(gate_balances) {
        e.mint_units(TokenId(0), *claimant, *amount).map_err(engine_err)?;
    }
    let mut design = TokenDesign::simple("ACT", "ACT");
    design.verifiers = chosen.iter().map(|i| pool[*i].clone()).collect();
    let token = e.create_token(owner, design).map_err(engine_err)?;

    for item in stream {
        if item.wait > 0 {
            e.advance_time(item.wait).map_err(engine_err)?;
        }
        let claim = e.submit_claim(item.claimant, token, 1).map_err(engine_err)?;
        for (index, pool_index) in chosen.iter().enumerate() {
            for att in item.evidence[*pool_index].attestations(claim, index as u32) {
                // Attestations after the claim has closed are refused; that
                // is part of the stream being fixed.
                let _ = e.submit_attestation(&att);
            }
        }
    }
    Ok(e.claims().iter().filter(|c| c.status == ClaimStatus::Approved).map(|c| c.id.0).collect())
}

pub fn anti_fraud() -> Outcome {
    let mut rng = SimRng::new(0xf4a0d);
    let (mut base_total, mut extended_total, mut strictly_fewer) = (0, 0, 0);
    for pair in 0..ANTI_FRAUD_PAIRS {
        let size = rng.below(4) as usize;
        let pool: Vec<VerifierSpec> = (0..=size).map(|_| random_verifier(&mut rng)).collect();
        let extra = rng.below(pool.len() as u64) as usize;
        let base: Vec<usize> = (0..pool.len()).filter(|i| *i != extra).collect();
        let mut extended = base.clone();
        extended.insert(rng.below(base.len() as u64 + 1) as usize, extra);

        let gate_balances: Vec<u64> = CLAIMANTS.iter().map(|_| rng.below(5)).collect();
        let stream: Vec<StreamClaim> = (0..STREAM_CLAIMS)
            .map(|_| StreamClaim {
                claimant: CLAIMANTS[rng.below(CLAIMANTS.len() as u64) as usize],
                wait: rng.below(3),
                evidence: pool.iter().map(|spec| Evidence::draw(spec, &mut rng)).collect(),
            })
            .collect();

        let without = approvals(&pool, &base, &stream, &gate_balances).map_err(|m| format!("pair {pair}: {m}"))?;
        let with = approvals(&pool, &extended, &stream, &gate_balances).map_err(|m| format!("pair {pair}: {m}"))?;
        ensure(with.is_subset(&without), || {
            format!("pair {pair}: adding {:?} approved claims {:?}", pool[extra].kind(), with.difference(&without))
        })?;
        base_total += without.len();
        extended_total += with.len();
        strictly_fewer += usize::from(with.len() < without.len());
    }

    // Free riders against honest approvers and sound oracles.
    let mut runs = 0;
    let mut attempts = 0;
    for strategy in [BadProof::NoProof, BadProof::FakeAttachment, BadProof::Forge] {
        for seed in 0..10 {
            let mut config = free_riders();
            config.seed = seed;
            for group in &mut config.agents {
                if let AgentPolicy::FreeRider { strategy: s, .. } = &mut group.policy {
                    *s = strategy;
                }
            }
            let s = run(&config).map_err(|e| e.to_string())?.summary();
            ensure(s.free_rider_approved == 0, || {
                format!("{strategy:?} seed {seed}: {} free-rider claims approved", s.free_rider_approved)
            })?;
            ensure(s.claims_approved > 0, || format!("{strategy:?} seed {seed}: nothing approved at all"))?;
            attempts += s.free_rider_claims;
            runs += 1;
        }
    }
    Ok(format!(
        "{ANTI_FRAUD_PAIRS} design/stream pairs: approvals {base_total} -> {extended_total} with one more verifier \
         (fewer in {strictly_fewer}, never more); 0 of {attempts} free-rider claims approved over {runs} runs"
    ))
}

// ---------------------------------------------------------------------------
// 9. Backing

pub const DRAIN_CASES: u64 = 100;

fn backed_pair(params: EngineParams, spec: BackingSpec) -> Result<Engine, Error> {
    let mut e = Engine::new(params)?;
    let owner = AccountId([0x71; 32]);
    e.create_token(owner, TokenDesign::simple("BASE", "BASE"))?;
    let mut d = TokenDesign::simple("BACKED", "BACKED");
    d.sources_of_value = vec![spec];
    e.create_token(owner, d)?;
    Ok(e)
}

/// Ledger and log of an engine, for before/after comparisons.
fn snapshot(e: &Engine) -> (pat_core::Ledger, Vec<pat_core::EventRecord>, Option<pat_core::Pool>) {
    (e.ledger().clone(), e.log().to_vec(), e.pool(TokenId(1)).cloned())
}

fn drain_case(rng: &mut SimRng, holders: usize) -> Result<u64, String> {
    let (base, backed) = (TokenId(0), TokenId(1));
    let mut e = backed_pair(EngineParams::default(), BackingSpec::SwapPool { backing_token: base }).map_err(engine_err)?;
    let depositor = AccountId([0x72; 32]);
    let accounts: Vec<AccountId> = (0..holders).map(|i| AccountId([0x80 + i as u8; 32])).collect();
    for a in &accounts {
        e.mint_units(backed, *a, 1 + rng.below(60)).map_err(engine_err)?;
    }
    e.mint_units(base, depositor, 5000).map_err(engine_err)?;
    for _ in 0..1 + rng.below(3) {
        e.deposit_to_pool(depositor, backed, rng.below(1000)).map_err(engine_err)?;
    }
    let deposited = e.pool(backed).map_or(0, |p| p.balance);
    let mut paid = 0;
    while e.total_supply(backed).map_err(engine_err)? > 0 {
        let holding: Vec<&AccountId> =
            accounts.iter().filter(|a| e.balance_of(backed, a).unwrap_or(0) > 0).collect();
        let holder = *holding[rng.below(holding.len() as u64) as usize];
        let owned = e.balance_of(backed, &holder).map_err(engine_err)?;
        let units = if rng.below(3) == 0 { owned } else { 1 + rng.below(owned) };
        let (balance, outstanding) = (e.pool(backed).map_or(0, |p| p.balance), e.total_supply(backed).map_err(engine_err)?);
        let want = (u128::from(balance) * u128::from(units) / u128::from(outstanding)) as u64;
        let got = e.swap_redeem(holder, backed, units).map_err(engine_err)?;
        ensure(got == want, || format!("redeeming {units} of {outstanding} from pool {balance}: paid {got}, expected {want}"))?;
        paid += got;
    }
    let pool = e.pool(backed).cloned().ok_or("pool vanished")?;
    let custody = e.balance_of(base, &custody_account(backed)).map_err(engine_err)?;
    ensure(pool.balance == 0 && custody == 0 && paid == deposited && pool.paid_out == deposited, || {
        format!("after full redemption: pool {}, custody {custody}, paid {paid} of {deposited}", pool.balance)
    })?;
    Ok(deposited)
}

/// Injects a fault before each event `op` would emit and checks that nothing
/// changed; then runs it cleanly. Returns how many fault points were tried.
fn fault_sweep(base: &Engine, op: impl Fn(&mut Engine) -> Result<(), Error>) -> Result<usize, String> {
    let before = snapshot(base);
    let mut clean = base.clone();
    op(&mut clean).map_err(engine_err)?;
    let emitted = clean.log().len() - base.log().len();
    ensure(emitted > 0, || "operation emitted nothing".into())?;
    for n in 0..emitted {
        let mut e = base.clone();
        e.inject_fault_after(n);
        match op(&mut e) {
            Err(Error::InjectedFault) => {}
            other => return Err(format!("fault before event {n}: got {other:?}")),
        }
        ensure(snapshot(&e) == before, || format!("fault before event {n} left a partial change"))?;
    }
    Ok(emitted)
}

pub fn backing() -> Outcome {
    let mut rng = SimRng::new(0xbac4);
    let mut drained = 0;
    for case in 0..DRAIN_CASES {
        let holders = if case < 10 { 1 } else { 1 + rng.below(5) as usize };
        drain_case(&mut rng, holders).map_err(|m| format!("drain case {case}: {m}"))?;
        drained += 1;
    }

    let holder = AccountId([0x90; 32]);
    let mut fault_points = 0;
    for source in [BurnSource::Custody, BurnSource::Holder] {
        let params = EngineParams { coupled_burn_source: source, ..EngineParams::default() };
        let mut e = backed_pair(params, BackingSpec::CoupledBurn { coupled_token: TokenId(0) }).map_err(engine_err)?;
        e.mint_units(TokenId(1), holder, 20).map_err(engine_err)?;
        e.mint_units(TokenId(0), holder, 20).map_err(engine_err)?;
        e.mint_units(TokenId(0), custody_account(TokenId(1)), 20).map_err(engine_err)?;
        fault_points += fault_sweep(&e, |e| e.coupled_burn(holder, TokenId(1), 7))?;

        let from = if source == BurnSource::Custody { custody_account(TokenId(1)) } else { holder };
        let mut done = e.clone();
        done.coupled_burn(holder, TokenId(1), 7).map_err(engine_err)?;
        ensure(
            done.balance_of(TokenId(1), &holder) == Ok(13) && done.balance_of(TokenId(0), &from) == Ok(13),
            || format!("{source:?}: coupled burn moved the wrong amounts"),
        )?;
        // Refused outright: nothing emitted, nothing changed.
        let mut refused = e.clone();
        ensure(refused.coupled_burn(holder, TokenId(1), 21).is_err() && snapshot(&refused) == snapshot(&e), || {
            format!("{source:?}: oversized coupled burn was not refused cleanly")
        })?;
    }

    let mut e = backed_pair(EngineParams::default(), BackingSpec::SwapPool { backing_token: TokenId(0) })
        .map_err(engine_err)?;
    e.mint_units(TokenId(1), holder, 10).map_err(engine_err)?;
    e.mint_units(TokenId(0), holder, 100).map_err(engine_err)?;
    e.deposit_to_pool(holder, TokenId(1), 55).map_err(engine_err)?;
    fault_points += fault_sweep(&e, |e| e.swap_redeem(holder, TokenId(1), 10).map(|_| ()))?;

    Ok(format!(
        "{drained} full redemptions drained their pools to exactly 0; {fault_points} injected faults left state unchanged"
    ))
}

/// Every criterion, numbered as in the acceptance list.
pub fn all() -> Vec<(u32, &'static str, fn() -> Outcome)> {
    vec![
        (1, "forum replication", forum_replication as fn() -> Outcome),
        (2, "conservation", conservation),
        (3, "determinism", determinism),
        (4, "TCR payout oracle", tcr_oracle),
        (5, "commit-reveal soundness", commit_reveal),
        (6, "tamper detection", tamper_detection),
        (7, "REP and GOV ladder", rep_and_gov),
        (8, "anti-fraud", anti_fraud),
        (9, "backing exactness", backing),
    ]
}
