//! Kick-one-out statistics and their selection rules.
//!
//! The KOO statistics compare the full model with each single-deletion model
//! and keep the variables whose deletion hurts. With q_j the cached quadratic
//! form, alpha_k = k/n and c_n = p/n:
//!
//! - A~_j = log(1 + q_j) - 2 c_n                    (KOO on the AIC)
//! - B~_j = log(1 + q_j) - c_n log n                (KOO on the BIC)
//! - C~_j = (1 - alpha_k)(p + q_j) - (n - k + 2) c_n  (KOO on Cp)
//!
//! selected by strict positivity. The general KOO statistics drop the
//! penalties entirely,
//!
//! - A°_j = log(1 + q_j)        with null limit log((1-alpha_k)/(1-alpha_k-c_n))
//! - C°_j = p + q_j             with null limit p + c_n/(1-alpha_k-c_n)
//!
//! and are thresholded either at a theoretical offset vartheta above the null
//! limit or at an empirical outlier cut (SD or MAD rule) computed from the k
//! observed statistics.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{FullModelCache, ModelIndex};

/// SD-consistency factor for the median absolute deviation under normality.
const MAD_SCALE: f64 = 1.4826;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum KooFlavor {
    ATilde,
    BTilde,
    CTilde,
    ABreve,
    CBreve,
}

impl KooFlavor {
    pub const ALL: [KooFlavor; 5] = [
        KooFlavor::ATilde,
        KooFlavor::BTilde,
        KooFlavor::CTilde,
        KooFlavor::ABreve,
        KooFlavor::CBreve,
    ];

    /// Penalized flavors selected by positivity.
    pub fn is_tilde(self) -> bool {
        matches!(self, KooFlavor::ATilde | KooFlavor::BTilde | KooFlavor::CTilde)
    }

    /// Penalty-free general KOO flavors.
    pub fn is_breve(self) -> bool {
        !self.is_tilde()
    }

    /// Command-line method name.
    pub fn label(self) -> &'static str {
        match self {
            KooFlavor::ATilde => "koo-aic",
            KooFlavor::BTilde => "koo-bic",
            KooFlavor::CTilde => "koo-cp",
            KooFlavor::ABreve => "gkoo-a",
            KooFlavor::CBreve => "gkoo-c",
        }
    }
}

impl std::fmt::Display for KooFlavor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for KooFlavor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "koo-aic" => Ok(KooFlavor::ATilde),
            "koo-bic" => Ok(KooFlavor::BTilde),
            "koo-cp" => Ok(KooFlavor::CTilde),
            "gkoo-a" => Ok(KooFlavor::ABreve),
            "gkoo-c" => Ok(KooFlavor::CBreve),
            other => Err(Error::InvalidConfig {
                reason: format!(
                    "unknown KOO method `{other}` (expected koo-aic, koo-bic, koo-cp, gkoo-a or gkoo-c)"
                ),
            }),
        }
    }
}

/// Threshold rule for the general KOO selectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "rule", content = "param", rename_all = "lowercase")]
pub enum ThresholdRule {
    /// Fixed offset vartheta above the null limit, per the consistency theory.
    Theory { vartheta: f64 },
    /// Null limit plus `multiplier` sample standard deviations of the k stats.
    Sd { multiplier: f64 },
    /// Null limit plus `multiplier` times 1.4826 * MAD of the k stats.
    Mad { multiplier: f64 },
}

impl ThresholdRule {
    fn param(&self) -> f64 {
        match *self {
            ThresholdRule::Theory { vartheta } => vartheta,
            ThresholdRule::Sd { multiplier } => multiplier,
            ThresholdRule::Mad { multiplier } => multiplier,
        }
    }
}

impl std::fmt::Display for ThresholdRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ThresholdRule::Theory { vartheta } => write!(f, "theory:{vartheta}"),
            ThresholdRule::Sd { multiplier } => write!(f, "sd:{multiplier}"),
            ThresholdRule::Mad { multiplier } => write!(f, "mad:{multiplier}"),
        }
    }
}

impl std::str::FromStr for ThresholdRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, param) = s.split_once(':').ok_or_else(|| Error::InvalidConfig {
            reason: format!("threshold rule `{s}` must look like sd:2, mad:2 or theory:0.5"),
        })?;
        let value: f64 = param.parse().map_err(|_| Error::InvalidConfig {
            reason: format!("threshold rule parameter `{param}` is not a number"),
        })?;
        if !value.is_finite() || value <= 0.0 {
            return Err(Error::InvalidThreshold { value });
        }
        match name {
            "theory" => Ok(ThresholdRule::Theory { vartheta: value }),
            "sd" => Ok(ThresholdRule::Sd { multiplier: value }),
            "mad" => Ok(ThresholdRule::Mad { multiplier: value }),
            other => Err(Error::InvalidConfig {
                reason: format!("unknown threshold rule `{other}` (expected theory, sd or mad)"),
            }),
        }
    }
}

/// The k per-variable statistics of one flavor, plus the threshold and
/// selected set once a selection rule has run.
#[derive(Debug, Clone, Serialize)]
pub struct KooProfile {
    pub flavor: KooFlavor,
    /// stats[j - 1] belongs to variable j.
    pub stats: Vec<f64>,
    pub n: usize,
    pub p: usize,
    pub alpha_k: f64,
    pub c_n: f64,
    pub threshold: Option<f64>,
    pub selected: Option<ModelIndex>,
}

/// Compute the per-variable statistics of one flavor from the cached q_j.
/// Threshold and selection are left unset.
pub fn koo_profile(cache: &FullModelCache, flavor: KooFlavor) -> KooProfile {
    let n = cache.n() as f64;
    let p = cache.p() as f64;
    let k = cache.k() as f64;
    let alpha_k = cache.alpha_k();
    let c_n = cache.c_n();
    let stats = cache
        .qforms()
        .iter()
        .map(|&q| match flavor {
            KooFlavor::ATilde => (1.0 + q).ln() - 2.0 * c_n,
            KooFlavor::BTilde => (1.0 + q).ln() - c_n * n.ln(),
            KooFlavor::CTilde => (1.0 - alpha_k) * (p + q) - (n - k + 2.0) * c_n,
            KooFlavor::ABreve => (1.0 + q).ln(),
            KooFlavor::CBreve => p + q,
        })
        .collect();
    KooProfile {
        flavor,
        stats,
        n: cache.n(),
        p: cache.p(),
        alpha_k,
        c_n,
        threshold: None,
        selected: None,
    }
}

fn select_above(profile: &mut KooProfile, threshold: f64) -> ModelIndex {
    let indices = profile
        .stats
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > threshold)
        .map(|(i, _)| i + 1)
        .collect();
    let selected = ModelIndex::from_sorted_unchecked(indices);
    profile.threshold = Some(threshold);
    profile.selected = Some(selected.clone());
    selected
}

/// Selection for the penalized flavors: keep variables with a strictly
/// positive statistic.
pub fn koo_select(profile: &mut KooProfile) -> Result<ModelIndex> {
    if !profile.flavor.is_tilde() {
        return Err(Error::WrongFlavor {
            expected: "tilde (koo-aic, koo-bic, koo-cp)",
            got: profile.flavor.to_string(),
        });
    }
    Ok(select_above(profile, 0.0))
}

/// Threshold for a breve profile under the given rule.
fn breve_threshold(profile: &KooProfile, rule: &ThresholdRule) -> Result<f64> {
    let param = rule.param();
    if !param.is_finite() || param <= 0.0 {
        return Err(Error::InvalidThreshold { value: param });
    }
    let alpha = profile.alpha_k;
    let c = profile.c_n;
    let p = profile.p as f64;
    let null_limit = match profile.flavor {
        KooFlavor::ABreve => ((1.0 - alpha) / (1.0 - alpha - c)).ln(),
        KooFlavor::CBreve => c / (1.0 - alpha - c) + p,
        _ => unreachable!("caller checked the flavor"),
    };
    let threshold = match *rule {
        ThresholdRule::Theory { vartheta } => match profile.flavor {
            KooFlavor::ABreve => ((1.0 - alpha + vartheta) / (1.0 - alpha - c)).ln(),
            KooFlavor::CBreve => (vartheta + c) / (1.0 - alpha - c) + p,
            _ => unreachable!(),
        },
        ThresholdRule::Sd { multiplier } => {
            let sd = sample_sd(&profile.stats);
            if sd.is_nan() || sd <= 0.0 {
                return Err(Error::DegenerateSpread {
                    stat: profile.flavor.to_string(),
                });
            }
            null_limit + multiplier * sd
        }
        ThresholdRule::Mad { multiplier } => {
            let mad = median_absolute_deviation(&profile.stats);
            if mad.is_nan() || mad <= 0.0 {
                return Err(Error::DegenerateSpread {
                    stat: profile.flavor.to_string(),
                });
            }
            null_limit + multiplier * MAD_SCALE * mad
        }
    };
    Ok(threshold)
}

/// Selection for the general KOO flavors under a threshold rule.
pub fn general_koo_select(profile: &mut KooProfile, rule: &ThresholdRule) -> Result<ModelIndex> {
    if !profile.flavor.is_breve() {
        return Err(Error::WrongFlavor {
            expected: "breve (gkoo-a, gkoo-c)",
            got: profile.flavor.to_string(),
        });
    }
    let threshold = breve_threshold(profile, rule)?;
    Ok(select_above(profile, threshold))
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation with the k - 1 denominator; 0.0 when k < 2.
fn sample_sd(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    (ss / (xs.len() - 1) as f64).sqrt()
}

fn median(xs: &[f64]) -> f64 {
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    }
}

fn median_absolute_deviation(xs: &[f64]) -> f64 {
    let med = median(xs);
    let devs: Vec<f64> = xs.iter().map(|x| (x - med).abs()).collect();
    median(&devs)
}
