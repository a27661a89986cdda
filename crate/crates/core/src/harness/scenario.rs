//! Flat `key: value` scenario files.
//!
//! ```text
//! # three parties, five agents, two of them perturbing
//! parties: 3
//! inputs: 10,20,30
//! function: sum
//! fragments_r: 3
//! decision_makers_m: 3
//! agents_p: 5
//! agents_selected_k: 5
//! threshold: third
//! blind_result: false
//! malicious: 1:perturb:1, 3:perturb:2
//! modulus: default
//! seed: 42
//! ```
//!
//! Blank lines and `#` comments are ignored. Keys may appear once; unknown
//! keys are rejected.

use std::collections::BTreeMap;
use std::fmt;

use crate::actors::{AgentBehavior, TaskSpec, ThresholdRule};
use crate::consensus::Scenario;
use crate::crypto::{Ring, RingValue, DEFAULT_MODULUS};

const KEYS: &[&str] = &[
    "parties",
    "inputs",
    "function",
    "weights",
    "fragments_r",
    "decision_makers_m",
    "agents_p",
    "agents_selected_k",
    "threshold",
    "blind_result",
    "malicious",
    "modulus",
    "seed",
];

/// A diagnostic pointing at a scenario line, when one is responsible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioError {
    pub line: Option<usize>,
    pub message: String,
}

impl ScenarioError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            message: message.into(),
        }
    }

    fn whole(message: impl Into<String>) -> Self {
        Self {
            line: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ScenarioError {}

struct Entries {
    map: BTreeMap<&'static str, (usize, String)>,
}

impl Entries {
    fn raw(&self, key: &str) -> Option<(usize, &str)> {
        self.map.get(key).map(|(l, v)| (*l, v.as_str()))
    }

    fn required(&self, key: &str) -> Result<(usize, &str), ScenarioError> {
        self.raw(key)
            .ok_or_else(|| ScenarioError::whole(format!("missing required key '{key}'")))
    }

    fn count(&self, key: &str) -> Result<usize, ScenarioError> {
        let (line, v) = self.required(key)?;
        v.parse()
            .map_err(|_| ScenarioError::at(line, format!("{key}: expected a non-negative integer, got '{v}'")))
    }
}

fn parse_entries(text: &str) -> Result<Entries, ScenarioError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once(':')
            .ok_or_else(|| ScenarioError::at(line, format!("expected 'key: value', got '{content}'")))?;
        let key = key.trim();
        let Some(&known) = KEYS.iter().find(|k| **k == key) else {
            return Err(ScenarioError::at(line, format!("unknown key '{key}'")));
        };
        if let Some((first, _)) = map.get(known) {
            return Err(ScenarioError::at(
                line,
                format!("duplicate key '{key}' (first set on line {first})"),
            ));
        }
        map.insert(known, (line, value.trim().to_string()));
    }
    Ok(Entries { map })
}

fn ring_list(ring: &Ring, key: &str, line: usize, v: &str) -> Result<Vec<RingValue>, ScenarioError> {
    if v.is_empty() {
        return Ok(Vec::new());
    }
    v.split(',')
        .map(|item| {
            let item = item.trim();
            let n: u64 = item
                .parse()
                .map_err(|_| ScenarioError::at(line, format!("{key}: '{item}' is not a non-negative integer")))?;
            ring.elem(n)
                .map_err(|_| ScenarioError::at(line, format!("{key}: {n} is not below modulus {}", ring.modulus())))
        })
        .collect()
}

fn parse_malicious(
    ring: &Ring,
    line: usize,
    v: &str,
) -> Result<Vec<(usize, AgentBehavior)>, ScenarioError> {
    let mut out = Vec::new();
    for item in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let err = |msg: String| ScenarioError::at(line, format!("malicious: '{item}': {msg}"));
        let mut parts = item.split(':');
        let id: usize = parts
            .next()
            .unwrap_or("")
            .trim()
            .parse()
            .map_err(|_| err("agent id must be a non-negative integer".into()))?;
        let kind = parts.next().map(str::trim);
        let arg = parts.next().map(str::trim);
        if parts.next().is_some() {
            return Err(err("too many ':' fields".into()));
        }
        let behavior = match (kind, arg) {
            (Some("crash"), None) => AgentBehavior::Crashed,
            (Some("constant"), Some(a)) => {
                let n: u64 = a.parse().map_err(|_| err("constant must be a non-negative integer".into()))?;
                AgentBehavior::MaliciousConstant(
                    ring.elem(n).map_err(|_| err(format!("constant not below modulus {}", ring.modulus())))?,
                )
            }
            (Some("perturb"), Some(a)) => {
                let d: i128 = a.parse().map_err(|_| err("perturb delta must be an integer".into()))?;
                AgentBehavior::MaliciousPerturb(ring.reduce_signed(d))
            }
            _ => {
                return Err(err(
                    "expected <id>:constant:<v>, <id>:perturb:<d> or <id>:crash".into(),
                ))
            }
        };
        if out.iter().any(|(i, _)| *i == id) {
            return Err(err(format!("agent {id} listed twice")));
        }
        out.push((id, behavior));
    }
    Ok(out)
}

/// Parses a scenario document. `seed_override` replaces the file's seed.
pub fn parse_scenario(text: &str, seed_override: Option<u64>) -> Result<Scenario, ScenarioError> {
    let e = parse_entries(text)?;

    let ring = match e.raw("modulus") {
        None | Some((_, "default")) => Ring::new(DEFAULT_MODULUS).expect("default modulus is prime"),
        Some((line, v)) => {
            let n: u64 = v
                .parse()
                .map_err(|_| ScenarioError::at(line, format!("modulus: expected a prime or 'default', got '{v}'")))?;
            Ring::new(n).map_err(|err| ScenarioError::at(line, format!("modulus: {err}")))?
        }
    };

    let parties = e.count("parties")?;
    let (inputs_line, inputs_raw) = e.required("inputs")?;
    let inputs = ring_list(&ring, "inputs", inputs_line, inputs_raw)?;
    if inputs.len() != parties {
        return Err(ScenarioError::at(
            inputs_line,
            format!("inputs: expected {parties} values (parties), got {}", inputs.len()),
        ));
    }

    let (fline, fval) = e.required("function")?;
    let mut task = match fval {
        "sum" => {
            if let Some((wline, _)) = e.raw("weights") {
                return Err(ScenarioError::at(wline, "weights: only allowed with 'function: wsum'"));
            }
            TaskSpec::sum(parties, ring)
        }
        "wsum" => {
            let (wline, wraw) = e
                .raw("weights")
                .ok_or_else(|| ScenarioError::at(fline, "function wsum requires a 'weights' key"))?;
            let weights = ring_list(&ring, "weights", wline, wraw)?;
            if weights.len() != parties {
                return Err(ScenarioError::at(
                    wline,
                    format!("weights: expected {parties} values (parties), got {}", weights.len()),
                ));
            }
            TaskSpec::weighted_sum(weights, ring)
        }
        other => {
            return Err(ScenarioError::at(
                fline,
                format!("function: expected 'sum' or 'wsum', got '{other}'"),
            ))
        }
    };
    task = task.with_topology(
        e.count("fragments_r")?,
        e.count("decision_makers_m")?,
        e.count("agents_p")?,
        e.count("agents_selected_k")?,
    );

    if let Some((line, v)) = e.raw("threshold") {
        task.threshold = match v {
            "third" => ThresholdRule::PaperThird,
            "majority" => ThresholdRule::StrictMajority,
            _ => match v.strip_prefix("fixed:").map(|t| t.trim().parse::<usize>()) {
                Some(Ok(t)) => ThresholdRule::Fixed(t),
                _ => {
                    return Err(ScenarioError::at(
                        line,
                        format!("threshold: expected third, majority or fixed:<t>, got '{v}'"),
                    ))
                }
            },
        };
    }

    if let Some((line, v)) = e.raw("blind_result") {
        task.blind_result = match v {
            "true" => true,
            "false" => false,
            _ => return Err(ScenarioError::at(line, format!("blind_result: expected true or false, got '{v}'"))),
        };
    }

    task.seed = match (seed_override, e.raw("seed")) {
        (Some(s), _) => s,
        (None, None) => 0,
        (None, Some((line, v))) => v
            .parse()
            .map_err(|_| ScenarioError::at(line, format!("seed: expected an unsigned integer, got '{v}'")))?,
    };

    let mut scenario = Scenario::all_honest(task, inputs);
    if let Some((line, v)) = e.raw("malicious") {
        for (id, behavior) in parse_malicious(&ring, line, v)? {
            let p = scenario.task.agent_count_p;
            let agent = scenario.agents.get_mut(id).ok_or_else(|| {
                ScenarioError::at(line, format!("malicious: agent {id} is outside 0..{p}"))
            })?;
            agent.behavior = behavior;
        }
    }

    scenario
        .validate()
        .map_err(|err| ScenarioError::whole(err.to_string()))?;
    Ok(scenario)
}
