use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::special::student_t_sf;
use super::StatsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestVariant {
    /// Unequal variances, Welch–Satterthwaite degrees of freedom.
    #[default]
    Welch,
    /// Classic equal-variance Student test.
    Pooled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Alternative {
    /// H1: mean(a) > mean(b).
    #[default]
    Greater,
    Less,
    TwoSided,
}

impl FromStr for TestVariant {
    type Err = StatsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "welch" => Ok(TestVariant::Welch),
            "pooled" => Ok(TestVariant::Pooled),
            other => Err(StatsError::Domain(format!("unknown t-test variant {other:?}"))),
        }
    }
}

impl FromStr for Alternative {
    type Err = StatsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "greater" => Ok(Alternative::Greater),
            "less" => Ok(Alternative::Less),
            "two-sided" => Ok(Alternative::TwoSided),
            other => Err(StatsError::Domain(format!("unknown alternative {other:?}"))),
        }
    }
}

impl fmt::Display for TestVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TestVariant::Welch => "welch",
            TestVariant::Pooled => "pooled",
        })
    }
}

impl fmt::Display for Alternative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Alternative::Greater => "greater",
            Alternative::Less => "less",
            Alternative::TwoSided => "two-sided",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    #[serde(rename = "t")]
    pub t_stat: f64,
    pub df: f64,
    #[serde(rename = "p")]
    pub p_value: f64,
    pub variant: TestVariant,
    pub alternative: Alternative,
}

/// Sample mean and unbiased variance (two-pass).
pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    (mean, ss / (n - 1.0))
}

pub fn t_test(a: &[f64], b: &[f64], variant: TestVariant, alternative: Alternative) -> Result<TTestResult, StatsError> {
    if a.len() < 2 || b.len() < 2 {
        return Err(StatsError::DegenerateSample(format!("need ≥ 2 values per sample, got {} and {}", a.len(), b.len())));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (ma, va) = mean_var(a);
    let (mb, vb) = mean_var(b);
    if va == 0.0 && vb == 0.0 {
        return Err(StatsError::DegenerateSample("both samples have zero variance".into()));
    }
    let (t, df) = match variant {
        TestVariant::Welch => {
            let (qa, qb) = (va / na, vb / nb);
            let se2 = qa + qb;
            let df = se2 * se2 / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0));
            ((ma - mb) / se2.sqrt(), df)
        }
        TestVariant::Pooled => {
            let df = na + nb - 2.0;
            let sp2 = ((na - 1.0) * va + (nb - 1.0) * vb) / df;
            ((ma - mb) / (sp2 * (1.0 / na + 1.0 / nb)).sqrt(), df)
        }
    };
    let p = match alternative {
        Alternative::Greater => student_t_sf(t, df)?,
        Alternative::Less => student_t_sf(-t, df)?,
        Alternative::TwoSided => (2.0 * student_t_sf(t.abs(), df)?).min(1.0),
    };
    Ok(TTestResult { t_stat: t, df, p_value: p.clamp(0.0, 1.0), variant, alternative })
}
