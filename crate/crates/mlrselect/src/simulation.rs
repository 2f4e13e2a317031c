//! Seeded data generators and the Monte Carlo selection harness.
//!
//! Setting I draws an n x k design with i.i.d. U(1, 5) entries and gives the
//! first k* variables the common coefficient row theta_* = ((-0.5)^0, ...,
//! (-0.5)^(p-1)), producing bounded noncentrality; Setting II scales the
//! signal by sqrt(n) so the noncentrality diverges. Errors are i.i.d. with
//! zero mean and unit variance from one of three distributions.
//!
//! Every replication derives its own RNG stream from (seed, rep_index) by a
//! splittable counter construction, so a run is a pure function of its
//! config: the same seed gives bit-identical reports regardless of how many
//! worker threads execute the replications.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{ChiSquared, StandardNormal, StudentT, Uniform};
use rayon::prelude::*;
use serde::Serialize;

use crate::consistency::{koo_condition_values, noncentrality, ConditionValues};
use crate::error::{Error, Result};
use crate::koo::{general_koo_select, koo_profile, koo_select, KooFlavor, ThresholdRule};
use crate::model::{Dataset, FullModelCache, ModelIndex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Setting {
    I,
    II,
}

impl std::fmt::Display for Setting {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Setting::I => write!(f, "I"),
            Setting::II => write!(f, "II"),
        }
    }
}

impl std::str::FromStr for Setting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "I" | "1" => Ok(Setting::I),
            "II" | "2" => Ok(Setting::II),
            other => Err(Error::InvalidConfig {
                reason: format!("unknown setting `{other}` (expected I or II)"),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ErrorDist {
    Normal,
    StudentT3,
    ChiSq2,
}

impl std::fmt::Display for ErrorDist {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ErrorDist::Normal => write!(f, "normal"),
            ErrorDist::StudentT3 => write!(f, "t3"),
            ErrorDist::ChiSq2 => write!(f, "chisq2"),
        }
    }
}

impl std::str::FromStr for ErrorDist {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "normal" | "gaussian" => Ok(ErrorDist::Normal),
            "t3" => Ok(ErrorDist::StudentT3),
            "chisq2" | "chi2" => Ok(ErrorDist::ChiSq2),
            other => Err(Error::InvalidConfig {
                reason: format!("unknown error distribution `{other}` (expected normal, t3 or chisq2)"),
            }),
        }
    }
}

/// One selection method to run per replication: a KOO flavor plus, for the
/// general (breve) flavors, the threshold rule.
#[derive(Debug, Clone, Serialize)]
pub struct MethodSpec {
    pub flavor: KooFlavor,
    pub rule: Option<ThresholdRule>,
}

impl MethodSpec {
    pub fn tilde(flavor: KooFlavor) -> Self {
        Self { flavor, rule: None }
    }

    pub fn breve(flavor: KooFlavor, rule: ThresholdRule) -> Self {
        Self {
            flavor,
            rule: Some(rule),
        }
    }

    pub fn rule_label(&self) -> String {
        self.rule.map(|r| r.to_string()).unwrap_or_else(|| "-".to_string())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationConfig {
    pub setting: Setting,
    pub dist: ErrorDist,
    pub n: usize,
    /// Target ratio c = p/n; p = round(c * n).
    pub c_target: f64,
    /// Target ratio alpha = k/n; k = round(alpha * n).
    pub alpha_target: f64,
    pub k_star: usize,
    pub reps: usize,
    pub seed: u64,
    pub methods: Vec<MethodSpec>,
}

impl SimulationConfig {
    pub fn p(&self) -> usize {
        (self.c_target * self.n as f64).round() as usize
    }

    pub fn k(&self) -> usize {
        (self.alpha_target * self.n as f64).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |reason: String| Err(Error::InvalidConfig { reason });
        if !(self.c_target > 0.0 && self.c_target < 1.0) || !self.c_target.is_finite() {
            return fail(format!("c = {} must lie in (0, 1)", self.c_target));
        }
        if !(self.alpha_target > 0.0 && self.alpha_target < 1.0) || !self.alpha_target.is_finite()
        {
            return fail(format!("alpha = {} must lie in (0, 1)", self.alpha_target));
        }
        let (p, k) = (self.p(), self.k());
        if p == 0 || k == 0 {
            return fail(format!(
                "n = {} too small for c = {}, alpha = {}: p and k must be positive",
                self.n, self.c_target, self.alpha_target
            ));
        }
        if p + k >= self.n {
            return fail(format!(
                "regime violated: need k + p < n as in alpha + c < 1, got k = {k}, p = {p}, n = {}",
                self.n
            ));
        }
        if self.k_star == 0 || self.k_star > k {
            return fail(format!(
                "k_star = {} must lie in 1..=k = {k}",
                self.k_star
            ));
        }
        if self.reps == 0 {
            return fail("reps must be positive".to_string());
        }
        if self.methods.is_empty() {
            return fail("at least one method is required".to_string());
        }
        for m in &self.methods {
            match (m.flavor.is_breve(), &m.rule) {
                (true, None) => {
                    return fail(format!("method {} requires a threshold rule", m.flavor))
                }
                (false, Some(_)) => {
                    return fail(format!(
                        "method {} is selected by positivity and takes no threshold rule",
                        m.flavor
                    ))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// The data-generating truth for one replication.
#[derive(Debug, Clone)]
pub struct Truth {
    pub j_star: ModelIndex,
    /// Effective k* x p coefficient block for the true variables.
    pub theta_star: DMatrix<f64>,
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive an independent ChaCha stream for one replication from the run seed
/// and the replication counter.
fn rep_rng(seed: u64, rep: u64) -> ChaCha12Rng {
    let base = mix64(seed) ^ mix64(mix64(rep) ^ 0xA5A5_A5A5_5A5A_5A5A);
    let mut key = [0u8; 32];
    for (i, chunk) in key.chunks_exact_mut(8).enumerate() {
        chunk.copy_from_slice(&mix64(base.wrapping_add(i as u64)).to_le_bytes());
    }
    ChaCha12Rng::from_seed(key)
}

/// Draw an n x p matrix of i.i.d. standardized errors: N(0,1), t_3/sqrt(3),
/// or (chi^2_2 - 2)/2. All three have zero mean and unit variance.
pub fn sample_errors<R: Rng + ?Sized>(
    dist: ErrorDist,
    n: usize,
    p: usize,
    rng: &mut R,
) -> DMatrix<f64> {
    match dist {
        ErrorDist::Normal => {
            DMatrix::from_fn(n, p, |_, _| rng.sample::<f64, _>(StandardNormal))
        }
        ErrorDist::StudentT3 => {
            let t = StudentT::new(3.0).expect("valid dof");
            let scale = 3.0f64.sqrt().recip();
            DMatrix::from_fn(n, p, |_, _| rng.sample::<f64, _>(t) * scale)
        }
        ErrorDist::ChiSq2 => {
            let chi = ChiSquared::new(2.0).expect("valid dof");
            DMatrix::from_fn(n, p, |_, _| (rng.sample::<f64, _>(chi) - 2.0) / 2.0)
        }
    }
}

/// The decaying coefficient row theta_* = ((-0.5)^0, ..., (-0.5)^(p-1)).
fn theta_row(p: usize) -> Vec<f64> {
    let mut v = Vec::with_capacity(p);
    let mut cur = 1.0;
    for _ in 0..p {
        v.push(cur);
        cur *= -0.5;
    }
    v
}

/// Signal scale applied to the common coefficient row. Setting I keeps the
/// noncentrality bounded; Setting II makes it grow like n.
fn signal_scale(setting: Setting, n: usize) -> f64 {
    match setting {
        Setting::I => 1.0,
        Setting::II => (n as f64).sqrt(),
    }
}

/// Generate one replication: X with i.i.d. U(1,5) entries (drawn first), then
/// the errors, then Y = X_star Theta_star + E with j_star = {1, ..., k_star}.
pub fn generate_setting(cfg: &SimulationConfig, rep_index: usize) -> Result<(Dataset, Truth)> {
    cfg.validate()?;
    let (n, p, k) = (cfg.n, cfg.p(), cfg.k());
    let mut rng = rep_rng(cfg.seed, rep_index as u64);

    let uni = Uniform::new(1.0, 5.0).expect("valid bounds");
    let x = DMatrix::from_fn(n, k, |_, _| rng.sample(uni));
    let e = sample_errors(cfg.dist, n, p, &mut rng);

    let scale = signal_scale(cfg.setting, n);
    let theta = theta_row(p);
    let theta_star = DMatrix::from_fn(cfg.k_star, p, |_, c| scale * theta[c]);

    let mut y = e;
    // Y += X_star * Theta_star; all rows of Theta_star are equal, so the
    // signal is (sum of the first k_star columns of X) * theta row.
    let mut w = nalgebra::DVector::zeros(n);
    for j in 0..cfg.k_star {
        w += x.column(j);
    }
    for (c, &t) in theta.iter().enumerate() {
        y.column_mut(c).axpy(scale * t, &w, 1.0);
    }

    let dataset = Dataset::new(y, x)?;
    let j_star = ModelIndex::new((1..=cfg.k_star).collect(), k)?;
    Ok((dataset, Truth { j_star, theta_star }))
}

/// Classification of one selection against the truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SelectionClass {
    Under,
    Exact,
    Over,
}

fn classify(selected: &ModelIndex, j_star: &ModelIndex) -> SelectionClass {
    if selected == j_star {
        SelectionClass::Exact
    } else if j_star.is_subset_of(selected) {
        SelectionClass::Over
    } else {
        SelectionClass::Under
    }
}

/// Aggregated outcome for one method.
#[derive(Debug, Clone, Serialize)]
pub struct MethodReport {
    pub method: String,
    pub rule: String,
    pub count_under: usize,
    pub count_exact: usize,
    pub count_over: usize,
    pub fraction_under: f64,
    pub fraction_exact: f64,
    pub fraction_over: f64,
    /// Mean selected size among overspecified replications, with 0/0 = 0.
    pub mean_over_size: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationReport {
    pub setting: Setting,
    pub dist: ErrorDist,
    pub n: usize,
    pub p: usize,
    pub k: usize,
    pub k_star: usize,
    pub reps: usize,
    pub seed: u64,
    pub methods: Vec<MethodReport>,
}

/// Run the full Monte Carlo experiment. Replications execute in parallel;
/// aggregation counts integers, so the report does not depend on worker
/// count or scheduling order. Any replication that fails numerically aborts
/// the run.
pub fn run_monte_carlo(cfg: &SimulationConfig) -> Result<SimulationReport> {
    cfg.validate()?;
    let n_methods = cfg.methods.len();

    let per_rep: Vec<Vec<(SelectionClass, usize)>> = (0..cfg.reps)
        .into_par_iter()
        .map(|rep| -> Result<Vec<(SelectionClass, usize)>> {
            let (dataset, truth) = generate_setting(cfg, rep)?;
            let cache = FullModelCache::new(&dataset)?;
            cfg.methods
                .iter()
                .map(|m| {
                    let mut profile = koo_profile(&cache, m.flavor);
                    let selected = match &m.rule {
                        None => koo_select(&mut profile)?,
                        Some(rule) => general_koo_select(&mut profile, rule)?,
                    };
                    Ok((classify(&selected, &truth.j_star), selected.len()))
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let mut methods = Vec::with_capacity(n_methods);
    for (mi, m) in cfg.methods.iter().enumerate() {
        let mut count_under = 0usize;
        let mut count_exact = 0usize;
        let mut count_over = 0usize;
        let mut over_size_sum = 0usize;
        for rep in &per_rep {
            let (class, size) = rep[mi];
            match class {
                SelectionClass::Under => count_under += 1,
                SelectionClass::Exact => count_exact += 1,
                SelectionClass::Over => {
                    count_over += 1;
                    over_size_sum += size;
                }
            }
        }
        let reps = cfg.reps as f64;
        let fraction_under = count_under as f64 / reps;
        let fraction_exact = count_exact as f64 / reps;
        // Derived so the three fractions sum to exactly 1.0.
        let fraction_over = 1.0 - fraction_under - fraction_exact;
        let mean_over_size = if count_over > 0 {
            over_size_sum as f64 / count_over as f64
        } else {
            0.0
        };
        methods.push(MethodReport {
            method: m.flavor.label().to_string(),
            rule: m.rule_label(),
            count_under,
            count_exact,
            count_over,
            fraction_under,
            fraction_exact,
            fraction_over,
            mean_over_size,
        });
    }

    Ok(SimulationReport {
        setting: cfg.setting,
        dist: cfg.dist,
        n: cfg.n,
        p: cfg.p(),
        k: cfg.k(),
        k_star: cfg.k_star,
        reps: cfg.reps,
        seed: cfg.seed,
        methods,
    })
}

/// Estimate the simulated condition values V3 and V4 for the Setting-I
/// signal at j = omega \ {1}: draw X once, compute the noncentrality of the
/// deletion, and plug its log tau and kappa into the condition values at the
/// finite-sample ratios.
pub fn estimate_condition_values(n: usize, c: f64, alpha: f64, seed: u64) -> Result<ConditionValues> {
    let k_star = 5;
    let cfg = SimulationConfig {
        setting: Setting::I,
        dist: ErrorDist::Normal,
        n,
        c_target: c,
        alpha_target: alpha,
        k_star,
        reps: 1,
        seed,
        methods: vec![MethodSpec::tilde(KooFlavor::ATilde)],
    };
    cfg.validate()?;
    let (p, k) = (cfg.p(), cfg.k());
    if k <= k_star {
        return Err(Error::InvalidConfig {
            reason: format!("k = {k} must exceed k_star = {k_star}"),
        });
    }

    let mut rng = rep_rng(seed, 0);
    let uni = Uniform::new(1.0, 5.0).expect("valid bounds");
    let x = DMatrix::from_fn(n, k, |_, _| rng.sample(uni));
    let theta = theta_row(p);
    let theta_star = DMatrix::from_fn(k_star, p, |_, col| theta[col]);

    let j_star = ModelIndex::new((1..=k_star).collect(), k)?;
    let j = ModelIndex::full(k).without(1);
    let rep = noncentrality(&x, &theta_star, &j_star, &j)?;

    koo_condition_values(
        k as f64 / n as f64,
        p as f64 / n as f64,
        Some(rep.log_tau),
        Some(rep.kappa),
    )
}
