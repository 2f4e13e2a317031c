//! The classical information criteria and exhaustive argmin selection.
//!
//! With n*Sigma_hat_j = Y'Q_j Y and d_j = k_j*p + p(p+1)/2 estimated
//! parameters:
//!
//! - AIC:  A_j = n log|Sigma_hat_j| + 2 d_j + n p (log(2 pi) + 1)
//! - BIC:  B_j = n log|Sigma_hat_j| + log(n) d_j + n p (log(2 pi) + 1)
//! - Cp:   C_j = (n - k) tr(Sigma_hat^-1 Sigma_hat_j) + 2 p k_j
//!
//! The Gaussian constant n p (log(2 pi) + 1) cancels in every comparison but
//! is kept so the values match the textbook definitions. The Cp trace is
//! computed as tr((Y'QY)^-1 (Y'Q_j Y)); the n factors cancel.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{residual_gram, Dataset, FullModelCache, ModelIndex};

/// Largest k accepted by [`select_exhaustive`] without the override: 2^25 - 1
/// subsets is the desk-scale ceiling.
pub const ENUMERATION_GUARD: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CriterionKind {
    Aic,
    Bic,
    Cp,
}

impl std::fmt::Display for CriterionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CriterionKind::Aic => write!(f, "aic"),
            CriterionKind::Bic => write!(f, "bic"),
            CriterionKind::Cp => write!(f, "cp"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CriterionValue {
    pub model: ModelIndex,
    pub kind: CriterionKind,
    pub value: f64,
}

/// Parameter count d_j = k_j*p + p(p+1)/2.
fn param_units(k_j: usize, p: usize) -> f64 {
    (k_j * p) as f64 + 0.5 * (p * (p + 1)) as f64
}

fn gaussian_constant(n: usize, p: usize) -> f64 {
    (n * p) as f64 * ((2.0 * std::f64::consts::PI).ln() + 1.0)
}

fn log_likelihood_term(d: &Dataset, j: &ModelIndex) -> Result<f64> {
    let rg = residual_gram(d, j)?;
    let n = d.n() as f64;
    let p = d.p() as f64;
    // log|Sigma_hat_j| = log|n Sigma_hat_j| - p log n
    let log_sigma = rg.logdet()? - p * n.ln();
    Ok(n * log_sigma)
}

pub fn aic(d: &Dataset, j: &ModelIndex) -> Result<CriterionValue> {
    let value = log_likelihood_term(d, j)?
        + 2.0 * param_units(j.len(), d.p())
        + gaussian_constant(d.n(), d.p());
    Ok(CriterionValue {
        model: j.clone(),
        kind: CriterionKind::Aic,
        value,
    })
}

pub fn bic(d: &Dataset, j: &ModelIndex) -> Result<CriterionValue> {
    let value = log_likelihood_term(d, j)?
        + (d.n() as f64).ln() * param_units(j.len(), d.p())
        + gaussian_constant(d.n(), d.p());
    Ok(CriterionValue {
        model: j.clone(),
        kind: CriterionKind::Bic,
        value,
    })
}

pub fn cp(d: &Dataset, cache: &FullModelCache, j: &ModelIndex) -> Result<CriterionValue> {
    let rg = residual_gram(d, j)?;
    let trace = (cache.gram_full_inverse() * rg.gram()).trace();
    let value =
        (d.n() - d.k()) as f64 * trace + 2.0 * (d.p() * j.len()) as f64;
    Ok(CriterionValue {
        model: j.clone(),
        kind: CriterionKind::Cp,
        value,
    })
}

pub fn evaluate(
    d: &Dataset,
    cache: &FullModelCache,
    kind: CriterionKind,
    j: &ModelIndex,
) -> Result<CriterionValue> {
    match kind {
        CriterionKind::Aic => aic(d, j),
        CriterionKind::Bic => bic(d, j),
        CriterionKind::Cp => cp(d, cache, j),
    }
}

/// One row of the exhaustive score table. Bit b of `mask` set means variable
/// b + 1 is in the subset.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SubsetScore {
    pub mask: u64,
    pub value: f64,
}

impl SubsetScore {
    pub fn model(&self) -> ModelIndex {
        ModelIndex::from_mask(self.mask)
    }
}

#[derive(Debug, Clone)]
pub struct ExhaustiveSelection {
    pub best: CriterionValue,
    /// Scores for every evaluated subset, in mask order.
    pub table: Vec<SubsetScore>,
}

/// True when `a` beats `b` under the tie-break rule: smaller value, then
/// smaller cardinality, then lexicographically smaller index list.
fn better(a: &SubsetScore, b: &SubsetScore) -> bool {
    if a.value != b.value {
        return a.value < b.value;
    }
    let (ca, cb) = (a.mask.count_ones(), b.mask.count_ones());
    if ca != cb {
        return ca < cb;
    }
    a.model() < b.model()
}

/// Argmin of the criterion over all non-empty subsets, optionally restricted
/// to subsets of size at most `max_model_size`. Requires k <= 25 (2^k - 1
/// evaluations) unless `override_guard` is set.
pub fn select_exhaustive(
    d: &Dataset,
    cache: &FullModelCache,
    kind: CriterionKind,
    max_model_size: Option<usize>,
    override_guard: bool,
) -> Result<ExhaustiveSelection> {
    let k = d.k();
    if k > ENUMERATION_GUARD && !override_guard {
        return Err(Error::TooManyPredictors {
            k,
            guard: ENUMERATION_GUARD,
        });
    }
    let size_cap = max_model_size.unwrap_or(k).min(k) as u32;
    let total: u64 = 1u64 << k;

    let table: Vec<SubsetScore> = (1..total)
        .into_par_iter()
        .filter(|mask| mask.count_ones() <= size_cap)
        .map(|mask| {
            let j = ModelIndex::from_mask(mask);
            let cv = evaluate(d, cache, kind, &j)?;
            Ok(SubsetScore {
                mask,
                value: cv.value,
            })
        })
        .collect::<Result<_>>()?;

    let best_score = table
        .iter()
        .copied()
        .reduce(|a, b| if better(&b, &a) { b } else { a })
        .ok_or(Error::InvalidConfig {
            reason: "no subset satisfies the size restriction".to_string(),
        })?;

    Ok(ExhaustiveSelection {
        best: CriterionValue {
            model: best_score.model(),
            kind,
            value: best_score.value,
        },
        table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;
    use rand_distr::StandardNormal;

    fn random_dataset(seed: u64, n: usize, p: usize, k: usize) -> Dataset {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let x = DMatrix::from_fn(n, k, |_, _| rng.sample::<f64, _>(StandardNormal));
        let y = DMatrix::from_fn(n, p, |_, _| rng.sample::<f64, _>(StandardNormal));
        Dataset::new(y, x).unwrap()
    }

    /// Strong-signal dataset with true variables `j_star` and tiny noise.
    fn strong_signal(seed: u64, n: usize, p: usize, k: usize, j_star: &[usize]) -> Dataset {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let x = DMatrix::from_fn(n, k, |_, _| rng.sample::<f64, _>(StandardNormal));
        let mut y = DMatrix::from_fn(n, p, |_, _| rng.sample::<f64, _>(StandardNormal)) * 0.01;
        for (row, &j) in j_star.iter().enumerate() {
            for c in 0..p {
                let coeff = 1.0 + 0.3 * (row + c) as f64;
                let col = x.column(j - 1) * coeff;
                let mut target = y.column_mut(c);
                target += col;
            }
        }
        Dataset::new(y, x).unwrap()
    }

    #[test]
    fn aic_constant_cancels_in_differences() {
        let d = random_dataset(21, 20, 3, 5);
        let j1 = ModelIndex::new(vec![1, 2], 5).unwrap();
        let j2 = ModelIndex::new(vec![1, 2, 4], 5).unwrap();
        let a1 = aic(&d, &j1).unwrap().value;
        let a2 = aic(&d, &j2).unwrap().value;
        // Recompute without the constant; the difference must be unchanged.
        let strip = |j: &ModelIndex| {
            log_likelihood_term(&d, j).unwrap() + 2.0 * param_units(j.len(), d.p())
        };
        assert_relative_eq!(a1 - a2, strip(&j1) - strip(&j2), epsilon = 1e-8);
    }

    #[test]
    fn aic_matches_scalar_hand_computation() {
        // n = 12, p = 1, k = 2: A_j = n log(RSS/n) + 2 (k_j + 1) + n (log 2 pi + 1).
        let x = DMatrix::from_row_slice(
            12,
            2,
            &[
                1.0, 0.2, 1.0, 1.1, 1.0, 2.3, 1.0, 3.1, 1.0, 4.2, 1.0, 5.0, 1.0, 6.1, 1.0, 7.3,
                1.0, 8.0, 1.0, 9.2, 1.0, 10.1, 1.0, 11.3,
            ],
        );
        let y = DMatrix::from_column_slice(
            12,
            1,
            &[0.5, 1.8, 4.1, 6.0, 8.6, 9.9, 12.4, 14.5, 16.1, 18.9, 20.0, 22.8],
        );
        let d = Dataset::new(y.clone(), x.clone()).unwrap();
        let j = ModelIndex::full(2);

        // Hand path: solve the 2x2 normal equations directly.
        let xtx = x.tr_mul(&x);
        let xty = x.tr_mul(&y);
        let det = xtx[(0, 0)] * xtx[(1, 1)] - xtx[(0, 1)] * xtx[(1, 0)];
        let b0 = (xtx[(1, 1)] * xty[(0, 0)] - xtx[(0, 1)] * xty[(1, 0)]) / det;
        let b1 = (-xtx[(1, 0)] * xty[(0, 0)] + xtx[(0, 0)] * xty[(1, 0)]) / det;
        let mut rss = 0.0;
        for i in 0..12 {
            let r = y[(i, 0)] - b0 * x[(i, 0)] - b1 * x[(i, 1)];
            rss += r * r;
        }
        let n = 12.0;
        let hand = n * (rss / n).ln() + 2.0 * (2.0 + 1.0) + n * ((2.0 * std::f64::consts::PI).ln() + 1.0);

        assert_relative_eq!(aic(&d, &j).unwrap().value, hand, max_relative = 1e-10);
    }

    #[test]
    fn bic_minus_aic_is_definitional() {
        let d = random_dataset(22, 25, 2, 6);
        let ln_n = 25f64.ln();
        for j in [
            ModelIndex::empty(),
            ModelIndex::new(vec![3], 6).unwrap(),
            ModelIndex::new(vec![1, 4, 6], 6).unwrap(),
            ModelIndex::full(6),
        ] {
            let a = aic(&d, &j).unwrap().value;
            let b = bic(&d, &j).unwrap().value;
            let expected = (ln_n - 2.0) * param_units(j.len(), d.p());
            assert_relative_eq!(b - a, expected, epsilon = 1e-8 * (1.0 + expected.abs()));
        }
    }

    #[test]
    fn cp_full_model_is_trace_of_identity() {
        let d = random_dataset(23, 30, 4, 6);
        let cache = FullModelCache::new(&d).unwrap();
        let c = cp(&d, &cache, &ModelIndex::full(6)).unwrap().value;
        let expected = (30 - 6) as f64 * 4.0 + 2.0 * 4.0 * 6.0;
        assert_relative_eq!(c, expected, epsilon = 1e-8 * expected);
    }

    #[test]
    fn cp_single_deletion_matches_cached_qform() {
        let d = random_dataset(24, 28, 3, 5);
        let cache = FullModelCache::new(&d).unwrap();
        let (n, p, k) = (28.0, 3.0, 5.0);
        for j in 1..=5 {
            let c = cp(&d, &cache, &ModelIndex::full(5).without(j)).unwrap().value;
            let expected = (n - k) * (p + cache.qforms()[j - 1]) + 2.0 * p * (k - 1.0);
            assert_relative_eq!(c, expected, max_relative = 1e-9);
        }
    }

    #[test]
    fn cp_matches_dense_oracle() {
        let d = random_dataset(25, 18, 2, 4);
        let cache = FullModelCache::new(&d).unwrap();
        let j = ModelIndex::new(vec![2, 4], 4).unwrap();
        // Dense path with explicitly formed inverses.
        let full = residual_gram(&d, &ModelIndex::full(4)).unwrap();
        let inv = full.gram().clone().try_inverse().unwrap();
        let gram_j = residual_gram(&d, &j).unwrap();
        let dense = (18 - 4) as f64 * (inv * gram_j.gram()).trace() + 2.0 * 2.0 * 2.0;
        assert_relative_eq!(cp(&d, &cache, &j).unwrap().value, dense, max_relative = 1e-9);
    }

    #[test]
    fn aic_reports_singular_residual_gram() {
        // An all-zero response column zeroes the leading pivot of Y'Q_j Y
        // exactly, so the Cholesky inside the logdet must fail.
        let mut rng = ChaCha12Rng::seed_from_u64(77);
        let x = DMatrix::from_fn(20, 3, |_, _| rng.sample::<f64, _>(StandardNormal));
        let mut y = DMatrix::zeros(20, 2);
        let second = DMatrix::from_fn(20, 1, |_, _| rng.sample::<f64, _>(StandardNormal));
        y.set_column(1, &second.column(0));
        let d = Dataset::new(y, x).unwrap();
        assert!(matches!(
            aic(&d, &ModelIndex::full(3)),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn exhaustive_single_candidate() {
        let d = random_dataset(26, 12, 2, 1);
        let cache = FullModelCache::new(&d).unwrap();
        let sel = select_exhaustive(&d, &cache, CriterionKind::Aic, None, false).unwrap();
        assert_eq!(sel.best.model, ModelIndex::full(1));
        assert_eq!(sel.table.len(), 1);
    }

    #[test]
    fn exhaustive_recovers_strong_signal() {
        let d = strong_signal(27, 40, 2, 3, &[1, 3]);
        let cache = FullModelCache::new(&d).unwrap();
        let truth = ModelIndex::new(vec![1, 3], 3).unwrap();
        for kind in [CriterionKind::Aic, CriterionKind::Bic, CriterionKind::Cp] {
            let sel = select_exhaustive(&d, &cache, kind, None, false).unwrap();
            assert_eq!(sel.best.model, truth, "criterion {kind}");
        }
    }

    #[test]
    fn exhaustive_larger_instance_recovers_truth() {
        let d = strong_signal(0, 200, 10, 10, &[1, 2, 3]);
        let cache = FullModelCache::new(&d).unwrap();
        let sel = select_exhaustive(&d, &cache, CriterionKind::Aic, None, false).unwrap();
        assert_eq!(sel.best.model, ModelIndex::new(vec![1, 2, 3], 10).unwrap());
        assert_eq!(sel.table.len(), (1 << 10) - 1);
    }

    #[test]
    fn exhaustive_guard_fires_without_override() {
        let d = random_dataset(29, 40, 2, 26);
        let cache = FullModelCache::new(&d).unwrap();
        assert!(matches!(
            select_exhaustive(&d, &cache, CriterionKind::Aic, Some(1), false),
            Err(Error::TooManyPredictors { k: 26, guard: 25 })
        ));
        // With the override and a size cap the search is small and succeeds.
        let sel = select_exhaustive(&d, &cache, CriterionKind::Aic, Some(1), true).unwrap();
        assert_eq!(sel.table.len(), 26);
    }

    #[test]
    fn exhaustive_max_size_restricts_table() {
        let d = random_dataset(30, 16, 2, 4);
        let cache = FullModelCache::new(&d).unwrap();
        let sel = select_exhaustive(&d, &cache, CriterionKind::Bic, Some(2), false).unwrap();
        // C(4,1) + C(4,2) subsets.
        assert_eq!(sel.table.len(), 10);
        assert!(sel.best.model.len() <= 2);
    }

    #[test]
    fn tie_break_prefers_smaller_then_lexicographic() {
        let a = SubsetScore { mask: 0b101, value: 1.0 };
        let b = SubsetScore { mask: 0b010, value: 1.0 };
        assert!(better(&b, &a)); // smaller cardinality wins
        let c = SubsetScore { mask: 0b0110, value: 1.0 }; // {2,3}
        let e = SubsetScore { mask: 0b1001, value: 1.0 }; // {1,4}
        assert!(better(&e, &c)); // lexicographic on index lists
        let f = SubsetScore { mask: 0b1, value: 0.5 };
        assert!(better(&f, &b)); // value dominates
    }
}
