//! Closed-form adversary probabilities, Monte Carlo comparison tables and the
//! CSV series behind the two sweep figures.
//!
//! The closed forms are generic over the probability scalar: `f64`/`f32` for
//! tables, [`crate::ExactProb`] for exact identity checks.
//!
//! The fragment-capture sweep is the curve that is captioned as "packet
//! loss" but described in the surrounding analysis as the chance of hacking a
//! party's data. It is labelled `p_fragment_capture` here, and it decreases
//! in `r`.

use std::fmt::{self, Debug};
use std::ops::RangeInclusive;

use num_traits::{FromPrimitive, Num};

use crate::error::{Error, Result};
use crate::threat::{mc_estimate, AdversaryConfig, Experiment, McEstimate};

/// Scalars the closed forms can be evaluated in.
pub trait Probability: Num + FromPrimitive + PartialOrd + Clone + Debug {}

impl<T: Num + FromPrimitive + PartialOrd + Clone + Debug> Probability for T {}

/// Acceptance band, in standard errors, for Monte Carlo vs closed form.
pub const STDERR_BAND: f64 = 3.0;

fn recip<T: Probability>(n: u64, name: &str) -> Result<T> {
    if n == 0 {
        return Err(Error::Domain(format!("{name} must be >= 1")));
    }
    let n = T::from_u64(n).ok_or_else(|| Error::Domain(format!("{name} not representable")))?;
    Ok(T::one() / n)
}

/// Chance that a single tapped channel carries a party's critical fragment: `1/r`.
pub fn fragment_capture_probability<T: Probability>(r: u64) -> Result<T> {
    recip(r, "r")
}

/// Chance that a task lands on the corrupt decision maker: `1/m`.
pub fn corrupt_dm_probability<T: Probability>(m: u64) -> Result<T> {
    recip(m, "m")
}

/// Chance of a corrupt coordinator or a compromised agent,
/// `1/m + 1/p - 1/(m p)`.
///
/// Evaluated as the single quotient `(m + p - 1) / (m p)` so that floating
/// point scalars hit exactly `1` whenever either count is `1`.
pub fn wrong_agent_probability<T: Probability>(m: u64, p: u64) -> Result<T> {
    if m == 0 || p == 0 {
        return Err(Error::Domain(format!("m and p must be >= 1 (m={m}, p={p})")));
    }
    let num = m
        .checked_add(p - 1)
        .and_then(|n| T::from_u64(n))
        .ok_or_else(|| Error::Domain("m + p overflows".into()))?;
    let den = m
        .checked_mul(p)
        .and_then(|d| T::from_u64(d))
        .ok_or_else(|| Error::Domain("m * p overflows".into()))?;
    Ok(num / den)
}

/// The same quantity via the complement, `1 - (1 - 1/m)(1 - 1/p)`.
pub fn wrong_agent_probability_complement<T: Probability>(m: u64, p: u64) -> Result<T> {
    let im: T = recip(m, "m")?;
    let ip: T = recip(p, "p")?;
    Ok(T::one() - (T::one() - im) * (T::one() - ip))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Series {
    /// Sweep over fragment count `r`.
    FragmentCapture,
    /// Sweep over decision-maker count `m`.
    CorruptDm,
}

impl Series {
    pub fn label(&self) -> &'static str {
        match self {
            Series::FragmentCapture => "p_fragment_capture",
            Series::CorruptDm => "p_corrupt_dm",
        }
    }

    pub fn parameter(&self) -> &'static str {
        match self {
            Series::FragmentCapture => "r",
            Series::CorruptDm => "m",
        }
    }

    fn closed(&self, x: u64) -> Result<f64> {
        match self {
            Series::FragmentCapture => fragment_capture_probability(x),
            Series::CorruptDm => corrupt_dm_probability(x),
        }
    }

    fn experiment(&self, x: u64) -> Experiment {
        match self {
            Series::FragmentCapture => Experiment::FragmentCapture { r: x },
            Series::CorruptDm => Experiment::CorruptDm { m: x },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPoint {
    pub x: u64,
    pub p_closed: f64,
    pub p_mc: f64,
    pub stderr: f64,
}

impl SeriesPoint {
    pub fn within_band(&self) -> bool {
        (self.p_mc - self.p_closed).abs() <= STDERR_BAND * self.stderr
    }
}

pub const SERIES_HEADER: &str = "x,p_closed,p_mc,stderr";
pub const WRONG_AGENT_HEADER: &str = "m,p,p_closed,p_mc,stderr";

/// Formats a probability in plain decimal notation with 17 significant
/// digits, enough for an exact `f64` round trip.
pub fn format_probability(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v:.1}");
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (16 - magnitude).max(1) as usize;
    format!("{v:.decimals$}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesTable {
    pub series: Series,
    pub points: Vec<SeriesPoint>,
}

impl SeriesTable {
    pub fn all_within_band(&self) -> bool {
        self.points.iter().all(SeriesPoint::within_band)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(SERIES_HEADER);
        out.push('\n');
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{}\n",
                p.x,
                format_probability(p.p_closed),
                format_probability(p.p_mc),
                format_probability(p.stderr)
            ));
        }
        out
    }
}

/// Sweeps `range`, pairing each closed-form value with a Monte Carlo
/// estimate of the matching experiment.
pub fn emit_series(
    series: Series,
    range: RangeInclusive<u64>,
    trials: u64,
    seed: u64,
) -> Result<SeriesTable> {
    if range.is_empty() {
        return Err(Error::Domain("empty sweep range".into()));
    }
    let points = range
        .map(|x| {
            let p_closed = series.closed(x)?;
            let est = mc_estimate(&AdversaryConfig::new(series.experiment(x), trials, seed))?;
            Ok(SeriesPoint {
                x,
                p_closed,
                p_mc: est.p_hat,
                stderr: est.stderr,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SeriesTable { series, points })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for CsvError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for CsvError {}

pub fn parse_series_csv(text: &str) -> std::result::Result<Vec<SeriesPoint>, CsvError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == SERIES_HEADER => {}
        _ => {
            return Err(CsvError {
                line: 1,
                message: format!("expected header {SERIES_HEADER}"),
            })
        }
    }
    lines
        .map(|(i, line)| {
            let err = |message: String| CsvError { line: i + 1, message };
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 4 {
                return Err(err(format!("expected 4 columns, got {}", cols.len())));
            }
            let f = |s: &str| s.parse::<f64>().map_err(|e| err(format!("{s:?}: {e}")));
            Ok(SeriesPoint {
                x: cols[0].parse().map_err(|e| err(format!("{:?}: {e}", cols[0])))?,
                p_closed: f(cols[1])?,
                p_mc: f(cols[2])?,
                stderr: f(cols[3])?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WrongAgentRow {
    pub m: u64,
    pub p: u64,
    pub p_closed: f64,
    pub p_mc: f64,
    pub stderr: f64,
}

impl WrongAgentRow {
    pub fn within_band(&self) -> bool {
        (self.p_mc - self.p_closed).abs() <= STDERR_BAND * self.stderr
    }
}

/// Closed form vs Monte Carlo for every `(m, p)` pair, `p` outermost.
pub fn wrong_agent_table(
    ms: RangeInclusive<u64>,
    ps: RangeInclusive<u64>,
    trials: u64,
    seed: u64,
) -> Result<Vec<WrongAgentRow>> {
    if ms.is_empty() || ps.is_empty() {
        return Err(Error::Domain("empty sweep range".into()));
    }
    let mut rows = Vec::new();
    for p in ps {
        for m in ms.clone() {
            let p_closed = wrong_agent_probability(m, p)?;
            let est: McEstimate =
                mc_estimate(&AdversaryConfig::new(Experiment::WrongAgent { m, p }, trials, seed))?;
            rows.push(WrongAgentRow {
                m,
                p,
                p_closed,
                p_mc: est.p_hat,
                stderr: est.stderr,
            });
        }
    }
    Ok(rows)
}

pub fn wrong_agent_csv(rows: &[WrongAgentRow]) -> String {
    let mut out = String::from(WRONG_AGENT_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.m,
            r.p,
            format_probability(r.p_closed),
            format_probability(r.p_mc),
            format_probability(r.stderr)
        ));
    }
    out
}
