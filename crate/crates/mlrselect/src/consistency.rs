//! Asymptotic consistency diagnostics.
//!
//! In the limit p/n -> c and k/n -> alpha with alpha + c < 1, the signs of
//! two boundary functions decide whether the penalized criteria over- or
//! under-select:
//!
//! - phi(alpha, c) = 2 c alpha + log[(1-c)^(1-c) (1-alpha)^(1-alpha) /
//!   (1-c-alpha)^(1-c-alpha)]   (AIC boundary)
//! - psi(alpha, c) = c (alpha - 1) / (1 - alpha - c) + 2 c   (Cp boundary)
//!
//! For the KOO methods the conditions reduce to four condition values,
//!
//! - V1 = 2c - log((1-alpha)/(1-alpha-c))
//! - V2 = 2(1-alpha-c) - (1-alpha)
//! - V3 = log(tau) - log(1-alpha-c) - 2c
//! - V4 = kappa - c(1-alpha-2c)/(1-alpha)
//!
//! where tau and kappa are determinant- and trace-type functionals of the
//! noncentrality matrix Phi_j = Theta'X'Q_j X Theta / n of an underspecified
//! model. V1/V2 depend only on (alpha, c); V3/V4 need the unknown truth and
//! are supplied from simulation. [`classify_theorems`] turns these strict
//! inequalities into per-method verdicts, returning `Indeterminate` on
//! boundary equalities.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::ModelIndex;

/// Absolute tolerance for treating a condition value as sitting on its
/// boundary; the theorems only cover strict inequalities.
pub const BOUNDARY_TOL: f64 = 1e-12;

fn check_domain(alpha: f64, c: f64) -> Result<()> {
    if alpha.is_finite() && c.is_finite() && alpha >= 0.0 && c > 0.0 && c < 1.0 && alpha + c < 1.0
    {
        Ok(())
    } else {
        Err(Error::Domain { alpha, c })
    }
}

/// x log x with the continuous extension 0 log 0 = 0.
fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// AIC consistency boundary function. Positive means over-selection is
/// asymptotically impossible. alpha = 0 (the fixed-k limit) is allowed.
pub fn phi(alpha: f64, c: f64) -> Result<f64> {
    check_domain(alpha, c)?;
    Ok(2.0 * c * alpha + xlogx(1.0 - c) + xlogx(1.0 - alpha) - xlogx(1.0 - c - alpha))
}

/// Cp consistency boundary function.
pub fn psi(alpha: f64, c: f64) -> Result<f64> {
    check_domain(alpha, c)?;
    Ok(c * (alpha - 1.0) / (1.0 - alpha - c) + 2.0 * c)
}

/// The fixed-k (alpha -> 0) AIC consistency boundary: the root of
/// log(1 - c) + 2c on (0, 1), about 0.797. Found by bisection to 1e-10.
pub fn aic_fixed_k_boundary() -> f64 {
    let f = |c: f64| (1.0 - c).ln() + 2.0 * c;
    let (mut lo, mut hi) = (0.5, 0.99);
    debug_assert!(f(lo) > 0.0 && f(hi) < 0.0);
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Condition values for the KOO theorems. V3/V4 are only available when the
/// caller supplies the noncentrality functionals.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConditionValues {
    pub v1: f64,
    pub v2: f64,
    pub v3: Option<f64>,
    pub v4: Option<f64>,
}

pub fn koo_condition_values(
    alpha: f64,
    c: f64,
    log_tau: Option<f64>,
    kappa: Option<f64>,
) -> Result<ConditionValues> {
    check_domain(alpha, c)?;
    let v1 = 2.0 * c - ((1.0 - alpha) / (1.0 - alpha - c)).ln();
    let v2 = 2.0 * (1.0 - alpha - c) - (1.0 - alpha);
    let v3 = log_tau.map(|lt| lt - (1.0 - alpha - c).ln() - 2.0 * c);
    let v4 = kappa.map(|ka| ka - c * (1.0 - alpha - 2.0 * c) / (1.0 - alpha));
    Ok(ConditionValues { v1, v2, v3, v4 })
}

/// Limiting ratios (alpha, c), strictly inside the simplex.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AsymptoticParams {
    alpha: f64,
    c: f64,
}

impl AsymptoticParams {
    pub fn new(alpha: f64, c: f64) -> Result<Self> {
        check_domain(alpha, c)?;
        if alpha <= 0.0 {
            return Err(Error::Domain { alpha, c });
        }
        Ok(Self { alpha, c })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn c(&self) -> f64 {
        self.c
    }
}

/// Noncentrality functionals of a candidate model against a known truth.
#[derive(Debug, Clone)]
pub struct NoncentralityReport {
    /// Phi_j = Theta'X'Q_j X Theta / n, positive semidefinite.
    pub phi_j: DMatrix<f64>,
    /// log tau_nj = (s - p) log(1 - alpha_m) + log|(1 - alpha_m) I + Phi_j|.
    pub log_tau: f64,
    /// kappa_nj = tr(Phi_j).
    pub kappa: f64,
    /// Number of non-true variables in j.
    pub m: usize,
    /// Number of true variables missing from j.
    pub s: usize,
    pub alpha_m: f64,
}

/// Compute Phi_j, log tau and kappa for candidate `j` when the truth
/// (`j_star`, `theta_star`) is known, as in a simulation.
///
/// The determinant is evaluated through the k* x k* matrix
/// I + K Theta Theta' / (1 - alpha_m) with K = (Q_j X_star)'(Q_j X_star)/n,
/// so the cost stays low even when p is in the hundreds.
pub fn noncentrality(
    x: &DMatrix<f64>,
    theta_star: &DMatrix<f64>,
    j_star: &ModelIndex,
    j: &ModelIndex,
) -> Result<NoncentralityReport> {
    let n = x.nrows();
    let k = x.ncols();
    if n == 0 || k == 0 {
        return Err(Error::EmptyMatrix { name: "X" });
    }
    for idx in [j_star.max_index(), j.max_index()] {
        if idx > k {
            return Err(Error::IndexOutOfRange { index: idx, k });
        }
    }
    if j_star.is_empty() {
        return Err(Error::InvalidConfig {
            reason: "true model must be non-empty".to_string(),
        });
    }
    if theta_star.nrows() != j_star.len() {
        return Err(Error::InvalidConfig {
            reason: format!(
                "theta_star has {} rows but the true model has {} variables",
                theta_star.nrows(),
                j_star.len()
            ),
        });
    }

    let x_star_cols: Vec<_> = j_star.indices().iter().map(|&i| x.column(i - 1)).collect();
    let x_star = DMatrix::from_columns(&x_star_cols);

    // W = Q_j X_star via a thin QR of X_j.
    let w = if j.is_empty() {
        x_star.clone()
    } else {
        let xj_cols: Vec<_> = j.indices().iter().map(|&i| x.column(i - 1)).collect();
        let xj = DMatrix::from_columns(&xj_cols);
        let q1 = xj.qr().q();
        let coeffs = q1.tr_mul(&x_star);
        &x_star - q1 * coeffs
    };
    let k_small = w.tr_mul(&w) / n as f64; // k* x k*

    let phi_j = theta_star.tr_mul(&k_small) * theta_star;
    let theta_outer = theta_star * theta_star.transpose(); // k* x k*
    let kappa = (&k_small * &theta_outer).trace();

    let m = j.indices().iter().filter(|i| !j_star.contains(**i)).count();
    let s = j_star.indices().iter().filter(|i| !j.contains(**i)).count();
    let alpha_m = m as f64 / n as f64;
    let nu = 1.0 - alpha_m;

    // log tau = s log(nu) + log det(I + K Theta Theta' / nu)
    let dim = j_star.len();
    let small = DMatrix::identity(dim, dim) + (&k_small * &theta_outer) / nu;
    let det = small.determinant();
    if !det.is_finite() || det <= 0.0 {
        return Err(Error::NotPositiveDefinite { dim });
    }
    let log_tau = s as f64 * nu.ln() + det.ln();

    Ok(NoncentralityReport {
        phi_j,
        log_tau,
        kappa,
        m,
        s,
        alpha_m,
    })
}

/// Per-method verdict from the published strict inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Consistent,
    Overspecified,
    Underspecified,
    Indeterminate,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Consistent => "consistent",
            Verdict::Overspecified => "overspecified",
            Verdict::Underspecified => "underspecified",
            Verdict::Indeterminate => "indeterminate",
        };
        f.write_str(s)
    }
}

/// A worst-case noncentrality limit for one underspecified model: its
/// log tau, kappa, and the counts s (missing true variables) and m (extra
/// variables). `log_tau`/`kappa` may be infinite to declare divergence.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NoncentralityLimit {
    pub log_tau: f64,
    pub kappa: f64,
    pub s: usize,
    pub m: usize,
}

impl From<&NoncentralityReport> for NoncentralityLimit {
    fn from(r: &NoncentralityReport) -> Self {
        Self {
            log_tau: r.log_tau,
            kappa: r.kappa,
            s: r.s,
            m: r.m,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MethodVerdicts {
    pub aic: Verdict,
    pub bic: Verdict,
    pub cp: Verdict,
    pub koo_aic: Verdict,
    pub koo_bic: Verdict,
    pub koo_cp: Verdict,
    pub general_koo: Verdict,
}

/// How a family of margin values sits against zero.
enum Margins {
    AllAbove,
    SomeBelow,
    Boundary,
}

fn margins<T>(entries: &[T], margin: impl Fn(&T) -> f64) -> Margins {
    let mut boundary = false;
    for e in entries {
        let m = margin(e);
        if m < -BOUNDARY_TOL {
            return Margins::SomeBelow;
        }
        if m <= BOUNDARY_TOL {
            boundary = true;
        }
    }
    if boundary {
        Margins::Boundary
    } else {
        Margins::AllAbove
    }
}

fn sign(v: f64) -> i8 {
    if v > BOUNDARY_TOL {
        1
    } else if v < -BOUNDARY_TOL {
        -1
    } else {
        0
    }
}

/// Classify each method per the published theorems at the given (alpha, c),
/// optionally refined by worst-case noncentrality limits.
///
/// Supplying finite limits declares the bounded-noncentrality regime, under
/// which the BIC-based methods are almost surely underspecified; without
/// limits (or with declared-infinite ones) the tau/kappa-dependent clauses
/// are unresolvable and yield `Indeterminate`. The KOO clauses use the
/// single-deletion entries (s = 1); the classical clauses use all entries.
pub fn classify_theorems(
    params: &AsymptoticParams,
    limits: Option<&[NoncentralityLimit]>,
) -> MethodVerdicts {
    let alpha = params.alpha();
    let c = params.c();
    let phi_v = phi(alpha, c).expect("validated params");
    let psi_v = psi(alpha, c).expect("validated params");
    let cond = koo_condition_values(alpha, c, None, None).expect("validated params");

    let entries = limits.unwrap_or(&[]);
    let koo_entries: Vec<&NoncentralityLimit> = entries.iter().filter(|l| l.s == 1).collect();
    let all_finite =
        !entries.is_empty() && entries.iter().all(|l| l.log_tau.is_finite() && l.kappa.is_finite());
    let koo_all_finite = !koo_entries.is_empty()
        && koo_entries
            .iter()
            .all(|l| l.log_tau.is_finite() && l.kappa.is_finite());

    // Classical AIC: sign of phi, refined by log tau_j vs (s - m)(log(1-c) + 2c).
    let aic = match sign(phi_v) {
        -1 => Verdict::Overspecified,
        0 => Verdict::Indeterminate,
        _ => {
            if entries.is_empty() {
                Verdict::Consistent
            } else {
                let rate = (1.0 - c).ln() + 2.0 * c;
                match margins(entries, |l| l.log_tau - (l.s as f64 - l.m as f64) * rate) {
                    Margins::AllAbove => Verdict::Consistent,
                    Margins::SomeBelow => Verdict::Underspecified,
                    Margins::Boundary => Verdict::Indeterminate,
                }
            }
        }
    };

    // Classical BIC: almost surely underspecified under bounded noncentrality.
    let bic = if all_finite {
        Verdict::Underspecified
    } else {
        Verdict::Indeterminate
    };

    // Classical Cp: sign of psi, refined by kappa_j vs (s - m) psi (1-alpha-c)/(1-alpha).
    let cp = match sign(psi_v) {
        -1 => Verdict::Overspecified,
        0 => Verdict::Indeterminate,
        _ => {
            if entries.is_empty() {
                Verdict::Consistent
            } else {
                let rate = psi_v * (1.0 - alpha - c) / (1.0 - alpha);
                match margins(entries, |l| l.kappa - (l.s as f64 - l.m as f64) * rate) {
                    Margins::AllAbove => Verdict::Consistent,
                    Margins::SomeBelow => Verdict::Underspecified,
                    Margins::Boundary => Verdict::Indeterminate,
                }
            }
        }
    };

    // KOO on the AIC: the underspecified clause (some log tau below the
    // threshold) dominates; otherwise the V1 sign decides.
    let v3_line = (1.0 - alpha - c).ln() + 2.0 * c;
    let koo_aic = if !koo_entries.is_empty() {
        match margins(&koo_entries, |l| l.log_tau - v3_line) {
            Margins::SomeBelow => Verdict::Underspecified,
            Margins::Boundary => Verdict::Indeterminate,
            Margins::AllAbove => match sign(cond.v1) {
                1 => Verdict::Consistent,
                -1 => Verdict::Overspecified,
                _ => Verdict::Indeterminate,
            },
        }
    } else {
        match sign(cond.v1) {
            1 => Verdict::Consistent,
            -1 => Verdict::Overspecified,
            _ => Verdict::Indeterminate,
        }
    };

    let koo_bic = if koo_all_finite {
        Verdict::Underspecified
    } else {
        Verdict::Indeterminate
    };

    // KOO on Cp: mirror structure with V2 and the kappa threshold.
    let v4_line = c * (1.0 - alpha - 2.0 * c) / (1.0 - alpha);
    let koo_cp = if !koo_entries.is_empty() {
        match margins(&koo_entries, |l| l.kappa - v4_line) {
            Margins::SomeBelow => Verdict::Underspecified,
            Margins::Boundary => Verdict::Indeterminate,
            Margins::AllAbove => match sign(cond.v2) {
                1 => Verdict::Consistent,
                -1 => Verdict::Overspecified,
                _ => Verdict::Indeterminate,
            },
        }
    } else {
        match sign(cond.v2) {
            1 => Verdict::Consistent,
            -1 => Verdict::Overspecified,
            _ => Verdict::Indeterminate,
        }
    };

    // General KOO: consistent whenever every true deletion has kappa > 0.
    let general_koo = if koo_entries.is_empty() {
        Verdict::Indeterminate
    } else {
        match margins(&koo_entries, |l| l.kappa) {
            Margins::AllAbove => Verdict::Consistent,
            _ => Verdict::Indeterminate,
        }
    };

    MethodVerdicts {
        aic,
        bic,
        cp,
        koo_aic,
        koo_bic,
        koo_cp,
        general_koo,
    }
}

/// One interior lattice point of the (alpha, c) simplex.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GridPoint {
    pub alpha: f64,
    pub c: f64,
    pub phi: f64,
    pub psi: f64,
}

/// Uniform grid over the open simplex {alpha > 0, c > 0, alpha + c < 1} with
/// step 1/resolution, emitting phi and psi for external plotting.
pub fn region_grid(resolution: usize) -> Result<Vec<GridPoint>> {
    if resolution < 2 {
        return Err(Error::InvalidConfig {
            reason: format!("grid resolution must be at least 2, got {resolution}"),
        });
    }
    let h = 1.0 / resolution as f64;
    let mut points = Vec::new();
    for i in 1..resolution {
        for jj in 1..resolution.saturating_sub(i) {
            let alpha = i as f64 * h;
            let c = jj as f64 * h;
            points.push(GridPoint {
                alpha,
                c,
                phi: phi(alpha, c)?,
                psi: psi(alpha, c)?,
            });
        }
    }
    Ok(points)
}
