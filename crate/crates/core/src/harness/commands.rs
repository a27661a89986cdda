//! Command implementations. Each returns its exit code and the exact text
//! destined for stdout and stderr, so they can be exercised in-process.

use std::fmt::Write as _;
use std::fs;
use std::ops::RangeInclusive;
use std::path::Path;

use rand::{Rng, RngCore};

use super::generate::{random_honest_scenario, ScenarioBounds};
use super::scenario::parse_scenario;
use crate::actors::ThresholdRule;
use crate::analysis::{
    emit_series, format_probability, wrong_agent_csv, wrong_agent_probability,
    wrong_agent_probability_complement, wrong_agent_table, Series, SeriesTable,
};
use crate::consensus::{run_task, OutcomeStatus, ReputationLedger, RunError};
use crate::crypto::{channel_open, channel_seal, ChannelId, ChannelKey, Endpoint, Ring};
use crate::rng::SeedTree;
use crate::threat::{mc_estimate, AdversaryConfig, Experiment};
use crate::ExactProb;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
/// Protocol rejection, or a check that ran but did not pass.
pub const EXIT_REJECTED: i32 = 2;

pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_PROBE_SEED: u64 = 7;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CommandOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CommandOutput {
    fn error(message: impl Into<String>) -> Self {
        let mut stderr = message.into();
        stderr.push('\n');
        Self {
            code: EXIT_ERROR,
            stdout: String::new(),
            stderr,
        }
    }
}

/// Runs one scenario file and prints the outcome line.
pub fn cmd_run(path: &Path, seed: Option<u64>, transcript_out: Option<&Path>) -> CommandOutput {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return CommandOutput::error(format!("error: {}: {e}", path.display())),
    };
    let scenario = match parse_scenario(&text, seed) {
        Ok(s) => s,
        Err(e) => return CommandOutput::error(format!("error: {}: {e}", path.display())),
    };
    let ledger = ReputationLedger::new(scenario.task.agent_count_p);
    let mut out = CommandOutput::default();
    let run = match run_task(&scenario, &ledger) {
        Ok(run) => run,
        Err(RunError::Config(e)) => {
            return CommandOutput::error(format!("error: {}: {e}", path.display()))
        }
        Err(RunError::Aborted { error, transcript }) => {
            if let Some(t) = transcript_out {
                if let Err(e) = fs::write(t, transcript.render()) {
                    return CommandOutput::error(format!("error: {}: {e}", t.display()));
                }
            }
            return CommandOutput::error(format!("error: task aborted: {error}"));
        }
    };
    for w in &run.warnings {
        let _ = writeln!(out.stderr, "warning: {w}");
    }
    if let Some(t) = transcript_out {
        if let Err(e) = fs::write(t, run.transcript.render()) {
            return CommandOutput::error(format!("error: {}: {e}", t.display()));
        }
    }
    let k = run.selected.len();
    match run.outcome.status {
        OutcomeStatus::Accepted { support, .. } => {
            let value = run.outcome.result().expect("accepted outcome has a result");
            let _ = writeln!(out.stdout, "ACCEPTED value={value} support={support}/{k}");
            out.code = EXIT_OK;
        }
        OutcomeStatus::RejectedAmbiguous => {
            out.stdout.push_str("REJECTED ambiguous\n");
            out.code = EXIT_REJECTED;
        }
        OutcomeStatus::RejectedNoQuorum => {
            out.stdout.push_str("REJECTED no-quorum\n");
            out.code = EXIT_REJECTED;
        }
    }
    out
}

/// Parses `a..b` (inclusive) or a single integer `a`.
pub fn parse_range(s: &str) -> Result<RangeInclusive<u64>, String> {
    let parse = |t: &str| {
        t.trim()
            .parse::<u64>()
            .map_err(|_| format!("invalid range bound '{t}' in '{s}'"))
    };
    let range = match s.split_once("..") {
        Some((a, b)) => parse(a)?..=parse(b.trim_start_matches('='))?,
        None => {
            let v = parse(s)?;
            v..=v
        }
    };
    if range.is_empty() {
        return Err(format!("empty range '{s}'"));
    }
    if *range.start() == 0 {
        return Err(format!("range '{s}' includes 0; parameters must be >= 1"));
    }
    Ok(range)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeEquation {
    /// Fragment capture, swept over `r`.
    Eq1,
    /// Corrupt decision maker, swept over `m`.
    Eq2,
    /// Wrong agent, swept over `m` and `p`.
    Eq3,
}

#[derive(Debug, Clone, Default)]
pub struct ProbeArgs {
    pub r: Option<String>,
    pub m: Option<String>,
    pub p: Option<String>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub csv: Option<std::path::PathBuf>,
}

fn series_report(table: &SeriesTable, trials: u64, seed: u64) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "series={} trials={trials} seed={seed}",
        table.series.label()
    );
    let _ = writeln!(s, "{} p_closed p_mc stderr check", table.series.parameter());
    for p in &table.points {
        let _ = writeln!(
            s,
            "{} {} {} {} {}",
            p.x,
            format_probability(p.p_closed),
            format_probability(p.p_mc),
            format_probability(p.stderr),
            if p.within_band() { "PASS" } else { "FAIL" }
        );
    }
    let failed = table.points.iter().filter(|p| !p.within_band()).count();
    let _ = writeln!(s, "rows={} failed={failed}", table.points.len());
    s
}

/// Closed form vs Monte Carlo for one of the three adversary probabilities.
pub fn cmd_probe(eq: ProbeEquation, args: &ProbeArgs) -> CommandOutput {
    let trials = args.trials.unwrap_or(DEFAULT_TRIALS);
    let seed = args.seed.unwrap_or(DEFAULT_PROBE_SEED);
    if trials == 0 {
        return CommandOutput::error("error: --trials must be >= 1");
    }
    let need = |flag: &str, v: &Option<String>| -> Result<RangeInclusive<u64>, String> {
        match v {
            Some(s) => parse_range(s).map_err(|e| format!("--{flag}: {e}")),
            None => Err(format!("missing --{flag}")),
        }
    };
    let mut out = CommandOutput::default();
    let (report, csv, pass) = match eq {
        ProbeEquation::Eq1 | ProbeEquation::Eq2 => {
            let (series, flag, value) = if eq == ProbeEquation::Eq1 {
                (Series::FragmentCapture, "r", &args.r)
            } else {
                (Series::CorruptDm, "m", &args.m)
            };
            let range = match need(flag, value) {
                Ok(r) => r,
                Err(e) => return CommandOutput::error(format!("error: {e}")),
            };
            let table = match emit_series(series, range, trials, seed) {
                Ok(t) => t,
                Err(e) => return CommandOutput::error(format!("error: {e}")),
            };
            (series_report(&table, trials, seed), table.to_csv(), table.all_within_band())
        }
        ProbeEquation::Eq3 => {
            let (ms, ps) = match (need("m", &args.m), need("p", &args.p)) {
                (Ok(m), Ok(p)) => (m, p),
                (Err(e), _) | (_, Err(e)) => return CommandOutput::error(format!("error: {e}")),
            };
            let rows = match wrong_agent_table(ms, ps, trials, seed) {
                Ok(r) => r,
                Err(e) => return CommandOutput::error(format!("error: {e}")),
            };
            let mut s = String::new();
            let _ = writeln!(s, "series=p_wrong_agent trials={trials} seed={seed}");
            let _ = writeln!(s, "m p p_closed p_mc stderr check");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{} {} {} {} {} {}",
                    r.m,
                    r.p,
                    format_probability(r.p_closed),
                    format_probability(r.p_mc),
                    format_probability(r.stderr),
                    if r.within_band() { "PASS" } else { "FAIL" }
                );
            }
            let failed = rows.iter().filter(|r| !r.within_band()).count();
            let _ = writeln!(s, "rows={} failed={failed}", rows.len());
            (s, wrong_agent_csv(&rows), failed == 0)
        }
    };
    out.stdout = report;
    if let Some(path) = &args.csv {
        if let Err(e) = fs::write(path, csv) {
            return CommandOutput::error(format!("error: {}: {e}", path.display()));
        }
    }
    out.code = if pass { EXIT_OK } else { EXIT_REJECTED };
    out
}

/// Writes both sweep figures: `fig2.csv` over `r = 1..=20` and `fig3.csv`
/// over `m = 1..=20`.
pub fn cmd_figures(out_dir: &Path, trials: Option<u64>, seed: Option<u64>) -> CommandOutput {
    if let Err(e) = fs::create_dir_all(out_dir) {
        return CommandOutput::error(format!("error: {}: {e}", out_dir.display()));
    }
    let mut out = CommandOutput::default();
    for (eq, name) in [(ProbeEquation::Eq1, "fig2.csv"), (ProbeEquation::Eq2, "fig3.csv")] {
        let args = ProbeArgs {
            r: Some("1..20".into()),
            m: Some("1..20".into()),
            trials,
            seed,
            csv: Some(out_dir.join(name)),
            ..ProbeArgs::default()
        };
        let res = cmd_probe(eq, &args);
        out.stdout.push_str(&res.stdout);
        out.stderr.push_str(&res.stderr);
        let _ = writeln!(out.stdout, "wrote {name}");
        out.code = out.code.max(res.code);
    }
    out
}

struct Group {
    name: &'static str,
    cases: usize,
    failures: Vec<String>,
}

fn check_shares() -> Group {
    let mut failures = Vec::new();
    let mut rng = SeedTree::new(0).stream("selfcheck-shares", &[]);
    let rings = [Ring::default(), Ring::small()];
    let mut cases = 0;
    for ring in rings {
        for _ in 0..500 {
            cases += 1;
            let v = ring.random(&mut rng);
            let r = rng.gen_range(1..=8);
            match ring.split_into_shares(v, r, &mut rng) {
                Ok(sv) if sv.len() == r && ring.recombine(&sv) == v => {}
                other => failures.push(format!("M={} v={v} r={r}: {other:?}", ring.modulus())),
            }
        }
    }
    Group {
        name: "share_roundtrip",
        cases,
        failures,
    }
}

fn check_seal() -> Group {
    let mut failures = Vec::new();
    let seeds = SeedTree::new(1);
    let mut rng = seeds.stream("selfcheck-seal", &[]);
    let cases = 200;
    for i in 0..cases {
        let key = ChannelKey::derive(
            &seeds,
            ChannelId::new(Endpoint::party(i % 7), Endpoint::decision_maker(i % 3)),
        );
        let mut msg = vec![0u8; rng.gen_range(1..64)];
        rng.fill_bytes(&mut msg);
        let sealed = channel_seal(&msg, &key, i as u64);
        if channel_open(&sealed, &key).as_deref() != Ok(msg.as_slice()) {
            failures.push(format!("case {i}: round trip failed"));
        }
        let mut tampered = sealed.clone();
        let bit = rng.gen_range(0..tampered.body.len() * 8);
        tampered.body[bit / 8] ^= 1 << (bit % 8);
        if channel_open(&tampered, &key).is_ok() {
            failures.push(format!("case {i}: tamper at bit {bit} not detected"));
        }
    }
    Group {
        name: "seal_roundtrip",
        cases,
        failures,
    }
}

fn check_honest() -> Group {
    let mut failures = Vec::new();
    let mut rng = SeedTree::new(2).stream("selfcheck-honest", &[]);
    let cases = 100;
    for i in 0..cases {
        let s = random_honest_scenario(&mut rng, Ring::default(), ScenarioBounds::default(), i);
        match run_task(&s, &ReputationLedger::new(s.task.agent_count_p)) {
            Ok(run) if run.outcome.result() == Some(s.expected_result()) => {}
            Ok(run) => failures.push(format!("scenario {i}: {}", run.outcome)),
            Err(e) => failures.push(format!("scenario {i}: {e}")),
        }
    }
    Group {
        name: "all_honest_correctness",
        cases: cases as usize,
        failures,
    }
}

fn check_tally() -> Group {
    use crate::actors::AgentResult;
    use crate::consensus::tally_results;
    let ring = Ring::default();
    let results = |vals: &[u64]| -> Vec<AgentResult> {
        vals.iter()
            .enumerate()
            .map(|(i, &v)| AgentResult {
                task_id: 0,
                agent_id: i,
                reported: Some(ring.reduce(v)),
            })
            .collect()
    };
    type Case<'a> = (&'a [u64], ThresholdRule, Option<(u64, usize)>);
    let cases: [Case; 5] = [
        (&[7, 7, 7, 7, 7], ThresholdRule::PaperThird, Some((7, 5))),
        (&[7, 7, 9, 9, 9], ThresholdRule::PaperThird, Some((9, 3))),
        (&[7, 7, 9, 9], ThresholdRule::PaperThird, None),
        (&[1, 2, 3, 4, 5, 6, 7, 7, 7], ThresholdRule::PaperThird, Some((7, 3))),
        (&[1, 2, 3, 4, 5, 6, 7, 7, 7], ThresholdRule::StrictMajority, None),
    ];
    let mut failures = Vec::new();
    for (vals, rule, want) in cases {
        let got = tally_results(&results(vals), rule, vals.len())
            .ok()
            .and_then(|o| match o.status {
                OutcomeStatus::Accepted { value, support } => Some((value.get(), support)),
                _ => None,
            });
        if got != want {
            failures.push(format!("{vals:?} {rule}: got {got:?}, want {want:?}"));
        }
    }
    Group {
        name: "tally_threshold",
        cases: cases.len(),
        failures,
    }
}

fn check_inclusion_exclusion() -> Group {
    let mut failures = Vec::new();
    for m in 1..=20 {
        for p in 1..=20 {
            let a: Result<ExactProb, _> = wrong_agent_probability(m, p);
            let b: Result<ExactProb, _> = wrong_agent_probability_complement(m, p);
            if a.is_err() || a != b {
                failures.push(format!("m={m} p={p}: {a:?} vs {b:?}"));
            }
        }
    }
    Group {
        name: "inclusion_exclusion",
        cases: 400,
        failures,
    }
}

fn check_determinism() -> Group {
    let mut failures = Vec::new();
    let mut rng = SeedTree::new(3).stream("selfcheck-determinism", &[]);
    let cases = 10;
    for i in 0..cases {
        let s = random_honest_scenario(&mut rng, Ring::default(), ScenarioBounds::default(), i);
        let ledger = ReputationLedger::new(s.task.agent_count_p);
        let a = run_task(&s, &ledger).map(|r| r.transcript.render());
        let b = run_task(&s, &ledger).map(|r| r.transcript.render());
        if a != b {
            failures.push(format!("scenario {i}: transcripts differ"));
        }
    }
    let cfg = AdversaryConfig::new(Experiment::WrongAgent { m: 3, p: 7 }, 20_000, 11);
    if mc_estimate(&cfg) != mc_estimate(&cfg) {
        failures.push("monte carlo estimate differs between runs".into());
    }
    Group {
        name: "determinism",
        cases: cases as usize + 1,
        failures,
    }
}

/// Fast subset of the invariant suite.
pub fn cmd_selfcheck() -> CommandOutput {
    let groups = [
        check_shares(),
        check_seal(),
        check_honest(),
        check_tally(),
        check_inclusion_exclusion(),
        check_determinism(),
    ];
    let mut out = CommandOutput::default();
    let mut passed = 0;
    for g in &groups {
        let ok = g.failures.is_empty();
        passed += ok as usize;
        let _ = writeln!(
            out.stdout,
            "{} {} ({} cases)",
            if ok { "PASS" } else { "FAIL" },
            g.name,
            g.cases
        );
        for f in g.failures.iter().take(5) {
            let _ = writeln!(out.stdout, "  {f}");
        }
    }
    let _ = writeln!(out.stdout, "selfcheck: {passed}/{} groups passed", groups.len());
    out.code = if passed == groups.len() {
        EXIT_OK
    } else {
        EXIT_REJECTED
    };
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("1..20"), Ok(1..=20));
        assert_eq!(parse_range("1..=20"), Ok(1..=20));
        assert_eq!(parse_range("10"), Ok(10..=10));
        assert!(parse_range("0..5").is_err());
        assert!(parse_range("5..1").is_err());
        assert!(parse_range("a..b").is_err());
    }

    #[test]
    fn probe_domain_error() {
        let args = ProbeArgs {
            r: Some("0..5".into()),
            ..ProbeArgs::default()
        };
        assert_eq!(cmd_probe(ProbeEquation::Eq1, &args).code, EXIT_ERROR);
        assert_eq!(cmd_probe(ProbeEquation::Eq3, &ProbeArgs::default()).code, EXIT_ERROR);
    }

    #[test]
    fn selfcheck_passes() {
        let out = cmd_selfcheck();
        assert_eq!(out.code, EXIT_OK, "{}", out.stdout);
        assert!(out.stdout.ends_with("selfcheck: 6/6 groups passed\n"));
    }
}
