//! Student t-tests with exact two-tailed p-values.
//!
//! p-values come from the regularized incomplete beta function,
//! `p = I_x(df/2, 1/2)` with `x = df / (df + t²)`, evaluated by continued
//! fraction. No lookup tables.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("no values")]
    Empty,
    #[error("sample too small: need at least {needed} values, got {got}")]
    SampleSize { needed: usize, got: usize },
    #[error("samples have zero variance")]
    DegenerateVariance,
    #[error("paired samples differ in length ({pre} vs {post})")]
    Pairing { pre: usize, post: usize },
    #[error("degrees of freedom must be at least 1, got {0}")]
    DegreesOfFreedom(f64),
    #[error("non-finite value in sample")]
    NonFinite,
}

impl StatsError {
    pub fn code(&self) -> &'static str {
        match self {
            StatsError::Empty => "empty-sample",
            StatsError::SampleSize { .. } => "sample-size",
            StatsError::DegenerateVariance => "degenerate-variance",
            StatsError::Pairing { .. } => "pairing",
            StatsError::DegreesOfFreedom(_) => "degrees-of-freedom",
            StatsError::NonFinite => "non-finite",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestKind {
    Paired,
    Unpaired,
    /// Unequal-variance two-sample test with Welch-Satterthwaite df.
    Welch,
}

impl TestKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TestKind::Paired => "paired",
            TestKind::Unpaired => "unpaired",
            TestKind::Welch => "welch",
        }
    }
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TestKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paired" => Ok(TestKind::Paired),
            "unpaired" => Ok(TestKind::Unpaired),
            "welch" => Ok(TestKind::Welch),
            other => Err(format!("unknown t-test kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTestResult {
    pub t: f64,
    /// Integral for the Student tests, fractional for Welch.
    pub df: f64,
    /// Two-tailed.
    pub p: f64,
    pub kind: TestKind,
}

/// JSON form of a test result, numbers rounded to 12 significant digits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTestWire {
    pub t: f64,
    pub df: f64,
    pub p: f64,
    pub kind: TestKind,
}

impl From<&TTestResult> for TTestWire {
    fn from(r: &TTestResult) -> Self {
        TTestWire {
            t: round_significant(r.t, 12),
            df: round_significant(r.df, 12),
            p: round_significant(r.p, 12),
            kind: r.kind,
        }
    }
}

pub fn round_significant(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x)
        .parse()
        .expect("formatted float parses")
}

fn check_finite(xs: &[f64]) -> Result<(), StatsError> {
    if xs.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(StatsError::NonFinite)
    }
}

pub fn mean_score(values: &[f64]) -> Result<f64, StatsError> {
    if values.is_empty() {
        return Err(StatsError::Empty);
    }
    check_finite(values)?;
    // shifting by the first value keeps constant samples exact
    let origin = values[0];
    Ok(origin + values.iter().map(|v| v - origin).sum::<f64>() / values.len() as f64)
}

fn sum_sq_dev(values: &[f64], mean: f64) -> f64 {
    values.iter().map(|v| (v - mean) * (v - mean)).sum()
}

fn require_len(xs: &[f64], needed: usize) -> Result<(), StatsError> {
    if xs.len() < needed {
        Err(StatsError::SampleSize {
            needed,
            got: xs.len(),
        })
    } else {
        Ok(())
    }
}

/// Student's two-sample t with pooled variance; `t > 0` when `a` has the
/// larger mean.
pub fn unpaired_t(a: &[f64], b: &[f64]) -> Result<TTestResult, StatsError> {
    require_len(a, 2)?;
    require_len(b, 2)?;
    let (ma, mb) = (mean_score(a)?, mean_score(b)?);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let df = na + nb - 2.0;
    let pooled = (sum_sq_dev(a, ma) + sum_sq_dev(b, mb)) / df;
    if pooled == 0.0 {
        return Err(StatsError::DegenerateVariance);
    }
    let t = (ma - mb) / (pooled * (1.0 / na + 1.0 / nb)).sqrt();
    Ok(TTestResult {
        t,
        df,
        p: two_tailed_p(t, df),
        kind: TestKind::Unpaired,
    })
}

pub fn welch_t(a: &[f64], b: &[f64]) -> Result<TTestResult, StatsError> {
    require_len(a, 2)?;
    require_len(b, 2)?;
    let (ma, mb) = (mean_score(a)?, mean_score(b)?);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let va = sum_sq_dev(a, ma) / (na - 1.0) / na;
    let vb = sum_sq_dev(b, mb) / (nb - 1.0) / nb;
    if va + vb == 0.0 {
        return Err(StatsError::DegenerateVariance);
    }
    let t = (ma - mb) / (va + vb).sqrt();
    let df = (va + vb).powi(2) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    Ok(TTestResult {
        t,
        df,
        p: two_tailed_p(t, df),
        kind: TestKind::Welch,
    })
}

/// Paired t on the differences `post - pre`.
pub fn paired_t(pre: &[f64], post: &[f64]) -> Result<TTestResult, StatsError> {
    if pre.len() != post.len() {
        return Err(StatsError::Pairing {
            pre: pre.len(),
            post: post.len(),
        });
    }
    require_len(pre, 2)?;
    check_finite(pre)?;
    check_finite(post)?;
    let diffs: Vec<f64> = pre.iter().zip(post).map(|(a, b)| b - a).collect();
    let n = diffs.len() as f64;
    let md = mean_score(&diffs)?;
    let var = sum_sq_dev(&diffs, md) / (n - 1.0);
    if var == 0.0 {
        return Err(StatsError::DegenerateVariance);
    }
    let t = md / (var / n).sqrt();
    let df = n - 1.0;
    Ok(TTestResult {
        t,
        df,
        p: two_tailed_p(t, df),
        kind: TestKind::Paired,
    })
}

/// Two-tailed p-value of Student's t distribution with `df` degrees of
/// freedom.
pub fn t_pvalue(t: f64, df: u64) -> Result<f64, StatsError> {
    if df < 1 {
        return Err(StatsError::DegreesOfFreedom(df as f64));
    }
    Ok(two_tailed_p(t, df as f64))
}

pub(crate) fn two_tailed_p(t: f64, df: f64) -> f64 {
    if t == 0.0 {
        return 1.0;
    }
    if t.is_infinite() {
        return 0.0;
    }
    let t2 = t * t;
    let x = df / (df + t2);
    let y = t2 / (df + t2);
    regularized_incomplete_beta(df / 2.0, 0.5, x, y).clamp(0.0, 1.0)
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln Γ(z) for z > 0.
pub fn ln_gamma(z: f64) -> f64 {
    if z < 0.5 {
        // reflection
        return (PI / (PI * z).sin()).ln() - ln_gamma(1.0 - z);
    }
    let z = z - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// I_x(a, b). `y` must equal `1 - x`; passing it separately keeps precision
/// when x is close to 1.
pub fn regularized_incomplete_beta(a: f64, b: f64, x: f64, y: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if y <= 0.0 {
        return 1.0;
    }
    let ln_front = a * x.ln() + b * y.ln() - ln_beta(a, b);
    if x < (a + 1.0) / (a + b + 2.0) {
        ln_front.exp() * beta_continued_fraction(a, b, x) / a
    } else {
        1.0 - ln_front.exp() * beta_continued_fraction(b, a, y) / b
    }
}

/// Modified Lentz evaluation of the incomplete beta continued fraction.
fn beta_continued_fraction(a: f64, b: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    const MAX_ITER: usize = 10_000;

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
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}
