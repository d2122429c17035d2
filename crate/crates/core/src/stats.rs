//! Paired significance testing and the score comparisons built on it.
//!
//! Scores for the same evaluation units under two configurations are compared
//! with a two-sided paired Student t-test. The t CDF is evaluated through the
//! regularized incomplete beta function (Lanczos log-gamma plus a Lentz-style
//! continued fraction), so the crate carries no statistics dependency.
//!
//! [`ScoreTable`] holds per-unit scores keyed by configuration and feeds the
//! two table-shaped analyses: adjacent length-window deltas per system, and
//! head-to-head system pairs. [`position_bias_analysis`] runs the same test
//! between neighboring position buckets of long-sequence translations.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// Special functions.
// ---------------------------------------------------------------------------

/// Natural log of the gamma function (Lanczos approximation, g = 7).
/// Accurate to ~1e-13 over the positive axis.
pub fn ln_gamma(x: f64) -> f64 {
    // Published coefficients, kept at full printed precision.
    #[allow(clippy::excessive_precision)]
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // Reflection: Γ(x)Γ(1-x) = π / sin(πx)
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEF[0];
    for (i, c) in COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Continued fraction for the incomplete beta function, evaluated with the
/// modified Lentz algorithm. Converges for x < (a+1)/(a+b+2).
fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 300;
    const EPS: f64 = 1e-15;
    const TINY: f64 = 1e-300;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let mf = m as f64;
        let m2 = 2.0 * mf;
        // Even step.
        let numer = mf * (b - mf) * x / ((qam + m2) * (a + m2));
        d = 1.0 + numer * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + numer / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        // Odd step.
        let numer = -(a + mf) * (qab + mf) * x / ((a + m2) * (qap + m2));
        d = 1.0 + numer * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + numer / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta function I_x(a, b) for a, b > 0 and x in
/// [0, 1].
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64) -> f64 {
    assert!(a > 0.0 && b > 0.0, "shape parameters must be positive");
    assert!((0.0..=1.0).contains(&x), "x must lie in [0, 1], got {x}");
    if x == 0.0 {
        return 0.0;
    }
    if x == 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(a, b, x) / a
    } else {
        1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b
    }
}

/// Two-sided tail probability P(|T| >= |t|) for Student's t with `dof`
/// degrees of freedom: I_{v/(v+t^2)}(v/2, 1/2).
pub fn student_t_two_sided_p(t: f64, dof: usize) -> f64 {
    assert!(dof >= 1, "degrees of freedom must be at least 1");
    if t.is_infinite() {
        return 0.0;
    }
    let v = dof as f64;
    regularized_incomplete_beta(v / 2.0, 0.5, v / (v + t * t))
}

/// CDF of Student's t distribution.
pub fn student_t_cdf(t: f64, dof: usize) -> f64 {
    let half_tail = student_t_two_sided_p(t, dof) / 2.0;
    if t >= 0.0 {
        1.0 - half_tail
    } else {
        half_tail
    }
}

// ---------------------------------------------------------------------------
// Paired t-test.
// ---------------------------------------------------------------------------

/// Report-cell tier: plain value, marked value, or suppressed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SignificanceTier {
    /// p <= 0.01
    Significant,
    /// 0.01 < p <= 0.05
    Marginal,
    /// p > 0.05
    NotSignificant,
}

impl SignificanceTier {
    pub fn from_p(p: f64) -> Self {
        if p <= 0.01 {
            SignificanceTier::Significant
        } else if p <= 0.05 {
            SignificanceTier::Marginal
        } else {
            SignificanceTier::NotSignificant
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PairedTestResult {
    pub mean_diff: f64,
    pub t_stat: f64,
    pub p_value: f64,
    pub n: usize,
    pub tier: SignificanceTier,
    /// True when the differences had zero sample variance, making the t
    /// statistic degenerate: p is 1 for a zero mean and 0 otherwise.
    pub degenerate: bool,
}

/// Two-sided paired Student t-test on per-unit score differences.
pub fn paired_t_test(diffs: &[f64]) -> Result<PairedTestResult> {
    let n = diffs.len();
    if n < 2 {
        return Err(Error::InsufficientSamples { got: n });
    }
    let nf = n as f64;
    let mean = diffs.iter().sum::<f64>() / nf;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (nf - 1.0);
    if var == 0.0 {
        let (t_stat, p_value) = if mean == 0.0 {
            (0.0, 1.0)
        } else {
            (f64::INFINITY.copysign(mean), 0.0)
        };
        return Ok(PairedTestResult {
            mean_diff: mean,
            t_stat,
            p_value,
            n,
            tier: SignificanceTier::from_p(p_value),
            degenerate: true,
        });
    }
    let t_stat = mean / (var / nf).sqrt();
    let p_value = student_t_two_sided_p(t_stat, n - 1);
    Ok(PairedTestResult {
        mean_diff: mean,
        t_stat,
        p_value,
        n,
        tier: SignificanceTier::from_p(p_value),
        degenerate: false,
    })
}

// ---------------------------------------------------------------------------
// Score tables and comparisons.
// ---------------------------------------------------------------------------

/// Per-unit scores for several configurations of one metric. Config ids for
/// windowed runs follow `<system>:<window>`.
#[derive(Clone, Debug, Default)]
pub struct ScoreTable {
    metric: String,
    entries: BTreeMap<String, BTreeMap<String, f64>>,
}

impl ScoreTable {
    pub fn new(metric: impl Into<String>) -> Self {
        ScoreTable {
            metric: metric.into(),
            entries: BTreeMap::new(),
        }
    }

    pub fn metric(&self) -> &str {
        &self.metric
    }

    pub fn insert(&mut self, config_id: impl Into<String>, unit_id: impl Into<String>, score: f64) {
        self.entries
            .entry(config_id.into())
            .or_default()
            .insert(unit_id.into(), score);
    }

    pub fn configs(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn units(&self, config_id: &str) -> Result<&BTreeMap<String, f64>> {
        self.entries.get(config_id).ok_or_else(|| Error::UnknownConfig {
            config_id: config_id.to_string(),
        })
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Per-unit differences `left - right`, ordered by unit id. The two
    /// configs must cover exactly the same units.
    pub fn paired_diffs(&self, left: &str, right: &str) -> Result<Vec<f64>> {
        let lhs = self.units(left)?;
        let rhs = self.units(right)?;
        let lhs_units: BTreeSet<_> = lhs.keys().collect();
        let rhs_units: BTreeSet<_> = rhs.keys().collect();
        if lhs_units != rhs_units {
            return Err(Error::UnitMismatch {
                left: left.to_string(),
                right: right.to_string(),
            });
        }
        Ok(lhs.iter().map(|(unit, score)| score - rhs[unit]).collect())
    }

    pub fn compare(&self, left: &str, right: &str) -> Result<PairedTestResult> {
        paired_t_test(&self.paired_diffs(left, right)?)
    }
}

/// One cell of the adjacent-window grid: shorter window minus longer window
/// for one system, so positive means the shorter segmentation scored higher.
#[derive(Clone, Debug, Serialize)]
pub struct AdjacentComparison {
    pub system: String,
    pub left_window: String,
    pub right_window: String,
    pub result: PairedTestResult,
}

impl AdjacentComparison {
    /// Row label, e.g. "sent-256".
    pub fn label(&self) -> String {
        format!("{}-{}", self.left_window, self.right_window)
    }
}

/// Runs the paired test between each adjacent pair of the window ladder for
/// every system found in the table. Systems are recognized by config ids of
/// the form `<system>:<window>` with the window in the ladder. A step is
/// tested only where the system covers both of its windows, so a table may
/// mix full-ladder systems with ones scored at a single window.
pub fn compare_adjacent_windows(
    table: &ScoreTable,
    ladder: &[String],
) -> Result<Vec<AdjacentComparison>> {
    let mut systems: BTreeSet<String> = BTreeSet::new();
    for config in table.configs() {
        if let Some((system, window)) = config.rsplit_once(':') {
            if ladder.iter().any(|w| w == window) {
                systems.insert(system.to_string());
            }
        }
    }
    let has = |config: &str| table.configs().any(|c| c == config);
    let mut rows = Vec::new();
    for system in &systems {
        for pair in ladder.windows(2) {
            let left = format!("{system}:{}", pair[0]);
            let right = format!("{system}:{}", pair[1]);
            if !has(&left) || !has(&right) {
                continue;
            }
            rows.push(AdjacentComparison {
                system: system.clone(),
                left_window: pair[0].clone(),
                right_window: pair[1].clone(),
                result: table.compare(&left, &right)?,
            });
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug, Serialize)]
pub struct SystemComparison {
    pub left: String,
    pub right: String,
    pub result: PairedTestResult,
}

/// Head-to-head comparisons for explicit config pairs.
pub fn compare_systems(
    table: &ScoreTable,
    pairs: &[(String, String)],
) -> Result<Vec<SystemComparison>> {
    pairs
        .iter()
        .map(|(left, right)| {
            Ok(SystemComparison {
                left: left.clone(),
                right: right.clone(),
                result: table.compare(left, right)?,
            })
        })
        .collect()
}

/// Two metrics disagree on a comparison when exactly one of them finds it
/// significant at the 5% level (used to flag cells in two-metric reports).
pub fn metrics_disagree(a: &PairedTestResult, b: &PairedTestResult) -> bool {
    (a.p_value <= 0.05) != (b.p_value <= 0.05)
}

// ---------------------------------------------------------------------------
// Position-bias analysis.
// ---------------------------------------------------------------------------

pub const POSITION_BUCKETS: usize = 7;

/// Scores of one sentence translated at each of its seven probe positions
/// inside a long sequence. Positions are 1-based and strictly increasing.
#[derive(Clone, Debug, Serialize)]
pub struct PositionSentence {
    pub sentence_id: String,
    pub positions: [usize; POSITION_BUCKETS],
    pub scores: [f64; POSITION_BUCKETS],
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct PositionBucketSet {
    sentences: Vec<PositionSentence>,
}

impl PositionBucketSet {
    pub fn new(sentences: Vec<PositionSentence>) -> Result<Self> {
        for s in &sentences {
            if s.positions.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::NonIncreasingPositions {
                    sentence_id: s.sentence_id.clone(),
                });
            }
        }
        Ok(PositionBucketSet { sentences })
    }

    pub fn sentences(&self) -> &[PositionSentence] {
        &self.sentences
    }

    /// Mean probe position per bucket over all sentences.
    pub fn mean_positions(&self) -> [f64; POSITION_BUCKETS] {
        let mut means = [0.0; POSITION_BUCKETS];
        if self.sentences.is_empty() {
            return means;
        }
        for s in &self.sentences {
            for (m, &p) in means.iter_mut().zip(&s.positions) {
                *m += p as f64;
            }
        }
        for m in &mut means {
            *m /= self.sentences.len() as f64;
        }
        means
    }
}

/// Paired test between neighboring buckets: row `j` compares bucket `j`
/// against bucket `j + 1`, positive mean meaning the earlier position scored
/// higher.
#[derive(Clone, Debug, Serialize)]
pub struct PositionBiasRow {
    pub left_bucket: usize,
    pub right_bucket: usize,
    pub result: PairedTestResult,
}

impl PositionBiasRow {
    /// Row label, e.g. "p0-p1".
    pub fn label(&self) -> String {
        format!("p{}-p{}", self.left_bucket, self.right_bucket)
    }
}

pub fn position_bias_analysis(set: &PositionBucketSet) -> Result<Vec<PositionBiasRow>> {
    let mut rows = Vec::with_capacity(POSITION_BUCKETS - 1);
    for j in 0..POSITION_BUCKETS - 1 {
        let diffs: Vec<f64> = set
            .sentences()
            .iter()
            .map(|s| s.scores[j] - s.scores[j + 1])
            .collect();
        rows.push(PositionBiasRow {
            left_bucket: j,
            right_bucket: j + 1,
            result: paired_t_test(&diffs)?,
        });
    }
    Ok(rows)
}
