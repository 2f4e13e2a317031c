//! Data containers and the projection/determinant kernel.
//!
//! Everything downstream works off two objects: a validated [`Dataset`]
//! holding the n x p response matrix Y and the n x k design matrix X, and a
//! [`FullModelCache`] that precomputes the full-model residual Gram matrix
//! Y'Q Y together with the k unit residual vectors b_j and quadratic forms
//! q_j = b_j' Y (Y'QY)^-1 Y' b_j. The q_j turn every leave-one-variable-out
//! determinant into a rank-one downdate, log|Y'Q_{-j}Y| = log|Y'QY| +
//! log(1 + q_j), so all per-variable statistics cost O(k) once the cache is
//! built.
//!
//! Projectors are never materialized as n x n matrices: residual Gram
//! matrices come from a thin QR of the selected columns, and the b_j come
//! from the columns of X(X'X)^-1 rescaled to unit norm.

use nalgebra::{Cholesky, DMatrix, Dyn};

use crate::error::{Error, Result};

/// Relative Cholesky pivot tolerance below which X'X counts as singular.
pub const RANK_TOL: f64 = 1e-12;

/// A subset of the predictor indices, stored 1-based and strictly increasing.
///
/// The empty model is allowed; it corresponds to the zero projection.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModelIndex {
    indices: Vec<usize>,
}

impl ModelIndex {
    /// Build a model index from arbitrary-order indices, validating the range
    /// 1..=k and rejecting duplicates.
    pub fn new(mut indices: Vec<usize>, k: usize) -> Result<Self> {
        indices.sort_unstable();
        for w in indices.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateIndex { index: w[0] });
            }
        }
        for &i in &indices {
            if i == 0 || i > k {
                return Err(Error::IndexOutOfRange { index: i, k });
            }
        }
        Ok(Self { indices })
    }

    /// Wrap indices already known to be strictly increasing and in range.
    pub(crate) fn from_sorted_unchecked(indices: Vec<usize>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        Self { indices }
    }

    pub fn empty() -> Self {
        Self {
            indices: Vec::new(),
        }
    }

    /// The full model {1, ..., k}.
    pub fn full(k: usize) -> Self {
        Self {
            indices: (1..=k).collect(),
        }
    }

    /// Decode a bit mask: bit b set means variable b + 1 is in the model.
    pub fn from_mask(mask: u64) -> Self {
        let indices = (0..64).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect();
        Self { indices }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    /// Largest index present, or 0 for the empty model.
    pub fn max_index(&self) -> usize {
        self.indices.last().copied().unwrap_or(0)
    }

    /// This model with one index removed (no-op if absent).
    pub fn without(&self, index: usize) -> Self {
        Self {
            indices: self.indices.iter().copied().filter(|&i| i != index).collect(),
        }
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.indices.iter().all(|&i| other.contains(i))
    }
}

impl serde::Serialize for ModelIndex {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.indices.serialize(serializer)
    }
}

impl std::fmt::Display for ModelIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for i in &self.indices {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
            first = false;
        }
        Ok(())
    }
}

/// Validated response/design pair with n - k > p and full-rank X.
#[derive(Debug, Clone)]
pub struct Dataset {
    y: DMatrix<f64>,
    x: DMatrix<f64>,
}

impl Dataset {
    /// Validate raw matrices: equal row counts, finite entries, the working
    /// regime n - k > p, and numerically positive definite X'X (smallest
    /// Cholesky pivot above `RANK_TOL` times the largest diagonal).
    pub fn new(y: DMatrix<f64>, x: DMatrix<f64>) -> Result<Self> {
        if y.nrows() == 0 || y.ncols() == 0 {
            return Err(Error::EmptyMatrix { name: "Y" });
        }
        if x.nrows() == 0 || x.ncols() == 0 {
            return Err(Error::EmptyMatrix { name: "X" });
        }
        if y.nrows() != x.nrows() {
            return Err(Error::RowMismatch {
                y_rows: y.nrows(),
                x_rows: x.nrows(),
            });
        }
        check_finite(&y, "Y")?;
        check_finite(&x, "X")?;

        let (n, p, k) = (y.nrows(), y.ncols(), x.ncols());
        if n <= k + p {
            return Err(Error::DimensionRegime { n, k, p });
        }

        let xtx = x.tr_mul(&x);
        let max_diag = xtx.diagonal().max();
        let tol = RANK_TOL * max_diag;
        match Cholesky::new(xtx) {
            None => return Err(Error::RankDeficient { pivot: 0.0, tol }),
            Some(chol) => {
                let min_pivot = chol
                    .l_dirty()
                    .diagonal()
                    .iter()
                    .map(|l| l * l)
                    .fold(f64::INFINITY, f64::min);
                if min_pivot <= tol {
                    return Err(Error::RankDeficient {
                        pivot: min_pivot,
                        tol,
                    });
                }
            }
        }

        Ok(Self { y, x })
    }

    pub fn n(&self) -> usize {
        self.y.nrows()
    }

    pub fn p(&self) -> usize {
        self.y.ncols()
    }

    pub fn k(&self) -> usize {
        self.x.ncols()
    }

    pub fn y(&self) -> &DMatrix<f64> {
        &self.y
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    /// The submatrix X_j (columns of `j`, in increasing index order).
    pub fn x_cols(&self, j: &ModelIndex) -> DMatrix<f64> {
        let cols: Vec<_> = j.indices().iter().map(|&i| self.x.column(i - 1)).collect();
        DMatrix::from_columns(&cols)
    }
}

fn check_finite(m: &DMatrix<f64>, name: &'static str) -> Result<()> {
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            if !m[(r, c)].is_finite() {
                return Err(Error::NonFinite {
                    name,
                    row: r + 1,
                    col: c + 1,
                });
            }
        }
    }
    Ok(())
}

/// Log-determinant of a symmetric positive definite matrix via Cholesky.
///
/// Sums the logs of the pivots and never forms the determinant itself, so it
/// stays finite for dimensions where |M| would overflow a double.
pub fn logdet_spd(m: &DMatrix<f64>) -> Result<f64> {
    let dim = m.nrows();
    let chol = Cholesky::new(m.clone()).ok_or(Error::NotPositiveDefinite { dim })?;
    Ok(2.0 * chol.l_dirty().diagonal().iter().map(|l| l.ln()).sum::<f64>())
}

/// The residual Gram matrix n*Sigma_hat_j = Y'Q_j Y for a submodel.
#[derive(Debug, Clone)]
pub struct ResidualGram {
    gram: DMatrix<f64>,
    model: ModelIndex,
    logdet: Option<f64>,
}

impl ResidualGram {
    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn model(&self) -> &ModelIndex {
        &self.model
    }

    /// log|Y'Q_j Y|, or an error if the Gram matrix is numerically singular
    /// (for example under an exact zero-residual fit).
    pub fn logdet(&self) -> Result<f64> {
        self.logdet.ok_or(Error::NotPositiveDefinite {
            dim: self.gram.nrows(),
        })
    }
}

/// Compute Y'Q_j Y through a thin QR of X_j; the projector itself is never
/// formed. The empty model yields Y'Y.
pub fn residual_gram(d: &Dataset, j: &ModelIndex) -> Result<ResidualGram> {
    if j.max_index() > d.k() {
        return Err(Error::IndexOutOfRange {
            index: j.max_index(),
            k: d.k(),
        });
    }
    let gram = if j.is_empty() {
        d.y().tr_mul(d.y())
    } else {
        let xj = d.x_cols(j);
        let qr = xj.qr();
        let q1 = qr.q();
        let coeffs = q1.tr_mul(d.y());
        let resid = d.y() - &q1 * coeffs;
        resid.tr_mul(&resid)
    };
    let gram = symmetrize(gram);
    let logdet = logdet_spd(&gram).ok();
    Ok(ResidualGram {
        gram,
        model: j.clone(),
        logdet,
    })
}

fn symmetrize(mut m: DMatrix<f64>) -> DMatrix<f64> {
    for c in 0..m.ncols() {
        for r in 0..c {
            let avg = 0.5 * (m[(r, c)] + m[(c, r)]);
            m[(r, c)] = avg;
            m[(c, r)] = avg;
        }
    }
    m
}

/// Precomputed full-model quantities backing the O(k) kick-one-out path.
///
/// `unit_residuals` holds the unit vectors b_j = Q_{-j} x_j / ||Q_{-j} x_j||,
/// obtained from the identity Q_{-j} x_j = u_j / [(X'X)^-1]_jj with
/// u_j = X (X'X)^-1 e_j, which costs O(nk^2) for all k of them instead of k
/// separate regressions. `qforms[j]` is q_j = b_j' Y (Y'QY)^-1 Y' b_j.
#[derive(Debug, Clone)]
pub struct FullModelCache {
    n: usize,
    p: usize,
    k: usize,
    gram_full: DMatrix<f64>,
    gram_full_inverse: DMatrix<f64>,
    logdet_full: f64,
    unit_residuals: DMatrix<f64>,
    qforms: Vec<f64>,
}

impl FullModelCache {
    pub fn new(d: &Dataset) -> Result<Self> {
        let (n, p, k) = (d.n(), d.p(), d.k());

        let xtx = d.x().tr_mul(d.x());
        let max_diag = xtx.diagonal().max();
        let chol_xtx = Cholesky::new(xtx).ok_or(Error::RankDeficient {
            pivot: 0.0,
            tol: RANK_TOL * max_diag,
        })?;
        let xtx_inv = chol_xtx.inverse();
        let mut unit_residuals = d.x() * &xtx_inv;
        for j in 0..k {
            let g_jj = xtx_inv[(j, j)];
            if g_jj <= 0.0 {
                return Err(Error::RankDeficient {
                    pivot: g_jj,
                    tol: RANK_TOL * max_diag,
                });
            }
            unit_residuals.column_mut(j).scale_mut(g_jj.sqrt().recip());
        }

        let full = residual_gram(d, &ModelIndex::full(k))?;
        let logdet_full = full.logdet()?;
        let gram_full = full.gram;
        let chol_full =
            Cholesky::new(gram_full.clone()).ok_or(Error::NotPositiveDefinite { dim: p })?;
        let gram_full_inverse = chol_full.inverse();

        let qforms = qforms_from_factor(&chol_full, d.y(), &unit_residuals)?;

        Ok(Self {
            n,
            p,
            k,
            gram_full,
            gram_full_inverse,
            logdet_full,
            unit_residuals,
            qforms,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Finite-sample ratio alpha_k = k/n.
    pub fn alpha_k(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    /// Finite-sample ratio c_n = p/n.
    pub fn c_n(&self) -> f64 {
        self.p as f64 / self.n as f64
    }

    /// n*Sigma_hat for the full model, Y'Q Y.
    pub fn gram_full(&self) -> &DMatrix<f64> {
        &self.gram_full
    }

    pub fn gram_full_inverse(&self) -> &DMatrix<f64> {
        &self.gram_full_inverse
    }

    pub fn logdet_full(&self) -> f64 {
        self.logdet_full
    }

    /// The n x k matrix whose j-th column is b_j.
    pub fn unit_residuals(&self) -> &DMatrix<f64> {
        &self.unit_residuals
    }

    /// Quadratic forms q_j, indexed so `qforms()[j - 1]` belongs to variable j.
    pub fn qforms(&self) -> &[f64] {
        &self.qforms
    }

    /// log|Y'Q_{-j}Y| for variable `index` via the rank-one downdate.
    pub fn logdet_without(&self, index: usize) -> Result<f64> {
        if index == 0 || index > self.k {
            return Err(Error::IndexOutOfRange {
                index,
                k: self.k,
            });
        }
        Ok(self.logdet_full + (1.0 + self.qforms[index - 1]).ln())
    }
}

/// One triangular solve per variable against the Cholesky factor of Y'QY.
fn qforms_from_factor(
    chol_full: &Cholesky<f64, Dyn>,
    y: &DMatrix<f64>,
    unit_residuals: &DMatrix<f64>,
) -> Result<Vec<f64>> {
    let v = y.tr_mul(unit_residuals); // p x k, column j = Y' b_j
    let l = chol_full.l_dirty();
    let z = l
        .solve_lower_triangular(&v)
        .ok_or(Error::NotPositiveDefinite { dim: y.ncols() })?;
    Ok(z.column_iter().map(|col| col.norm_squared()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;
    use rand_distr::StandardNormal;

    fn random_matrix(rng: &mut ChaCha12Rng, rows: usize, cols: usize) -> DMatrix<f64> {
        DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
    }

    fn random_dataset(seed: u64, n: usize, p: usize, k: usize) -> Dataset {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let x = random_matrix(&mut rng, n, k);
        let y = random_matrix(&mut rng, n, p);
        Dataset::new(y, x).unwrap()
    }

    /// Explicit projector Q_j = I - X_j (X_j'X_j)^+ X_j' formed densely.
    fn brute_force_gram(d: &Dataset, j: &ModelIndex) -> DMatrix<f64> {
        let n = d.n();
        let q = if j.is_empty() {
            DMatrix::identity(n, n)
        } else {
            let xj = d.x_cols(j);
            let pinv = (xj.tr_mul(&xj)).pseudo_inverse(1e-12).unwrap();
            DMatrix::identity(n, n) - &xj * pinv * xj.transpose()
        };
        d.y().transpose() * q * d.y()
    }

    #[test]
    fn validate_accepts_working_regime() {
        let d = random_dataset(1, 30, 4, 10);
        assert_eq!((d.n(), d.p(), d.k()), (30, 4, 10));
    }

    #[test]
    fn validate_rejects_dimension_regime() {
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let x = random_matrix(&mut rng, 15, 10);
        let y = random_matrix(&mut rng, 15, 8);
        match Dataset::new(y, x) {
            Err(Error::DimensionRegime { n: 15, k: 10, p: 8 }) => {}
            other => panic!("expected DimensionRegime, got {other:?}"),
        }
    }

    #[test]
    fn validate_rejects_duplicated_column() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let mut x = random_matrix(&mut rng, 30, 5);
        let dup = x.column(0).into_owned();
        x.set_column(3, &dup);
        let y = random_matrix(&mut rng, 30, 2);
        assert!(matches!(Dataset::new(y, x), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn validate_rejects_nonfinite() {
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        let x = random_matrix(&mut rng, 20, 3);
        let mut y = random_matrix(&mut rng, 20, 2);
        y[(5, 1)] = f64::NAN;
        match Dataset::new(y, x) {
            Err(Error::NonFinite { name: "Y", row: 6, col: 2 }) => {}
            other => panic!("expected NonFinite, got {other:?}"),
        }
    }

    #[test]
    fn validate_rejects_row_mismatch() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let x = random_matrix(&mut rng, 21, 3);
        let y = random_matrix(&mut rng, 20, 2);
        assert!(matches!(
            Dataset::new(y, x),
            Err(Error::RowMismatch { y_rows: 20, x_rows: 21 })
        ));
    }

    #[test]
    fn model_index_rejects_out_of_range_and_duplicates() {
        assert!(matches!(
            ModelIndex::new(vec![1, 7], 6),
            Err(Error::IndexOutOfRange { index: 7, k: 6 })
        ));
        assert!(matches!(
            ModelIndex::new(vec![2, 2], 6),
            Err(Error::DuplicateIndex { index: 2 })
        ));
        let j = ModelIndex::new(vec![5, 1, 3], 6).unwrap();
        assert_eq!(j.indices(), &[1, 3, 5]);
    }

    #[test]
    fn residual_gram_empty_model_is_yty() {
        let d = random_dataset(6, 20, 3, 4);
        let rg = residual_gram(&d, &ModelIndex::empty()).unwrap();
        let yty = d.y().tr_mul(d.y());
        assert_relative_eq!(rg.gram(), &yty, epsilon = 1e-12);
    }

    #[test]
    fn residual_gram_exact_fit_is_zero() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let x = random_matrix(&mut rng, 25, 3);
        let theta = random_matrix(&mut rng, 3, 2);
        let y = &x * theta;
        let d = Dataset::new(y, x).unwrap();
        let rg = residual_gram(&d, &ModelIndex::full(3)).unwrap();
        assert!(rg.gram().amax() < 1e-10);
        // The Gram is zero up to roundoff; a logdet, if the tiny pivots
        // happen to stay positive, is enormously negative.
        if let Ok(ld) = rg.logdet() {
            assert!(ld < -50.0);
        }
    }

    #[test]
    fn residual_gram_matches_brute_force_projector() {
        let d = random_dataset(8, 12, 2, 3);
        for j in [
            ModelIndex::empty(),
            ModelIndex::new(vec![2], 3).unwrap(),
            ModelIndex::new(vec![1, 3], 3).unwrap(),
            ModelIndex::full(3),
        ] {
            let fast = residual_gram(&d, &j).unwrap();
            let oracle = brute_force_gram(&d, &j);
            let denom = oracle.norm().max(1.0);
            assert!(
                (fast.gram() - &oracle).norm() / denom < 1e-10,
                "mismatch for {j}"
            );
        }
    }

    #[test]
    fn logdet_spd_identity_and_diagonal() {
        assert_relative_eq!(logdet_spd(&DMatrix::identity(5, 5)).unwrap(), 0.0);
        let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 8.0]));
        assert_relative_eq!(logdet_spd(&diag).unwrap(), 16.0f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn logdet_spd_matches_eigenvalue_oracle() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let a = random_matrix(&mut rng, 4, 4);
        let spd = a.tr_mul(&a) + DMatrix::identity(4, 4);
        let eigen_logdet: f64 = spd
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .map(|v| v.ln())
            .sum();
        assert_relative_eq!(logdet_spd(&spd).unwrap(), eigen_logdet, epsilon = 1e-12);
    }

    #[test]
    fn logdet_spd_rejects_indefinite() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(
            logdet_spd(&m),
            Err(Error::NotPositiveDefinite { dim: 2 })
        ));
    }

    #[test]
    fn cache_orthonormal_design_has_bj_equal_xj() {
        // Build an X with exactly orthonormal columns via QR of a random matrix.
        let mut rng = ChaCha12Rng::seed_from_u64(10);
        let raw = random_matrix(&mut rng, 20, 5);
        let x = raw.qr().q();
        let y = random_matrix(&mut rng, 20, 3);
        let d = Dataset::new(y, x.clone()).unwrap();
        let cache = FullModelCache::new(&d).unwrap();
        assert_relative_eq!(cache.unit_residuals(), &x, epsilon = 1e-10);
    }

    #[test]
    fn cache_unit_residuals_match_direct_residualization() {
        let d = random_dataset(11, 20, 3, 5);
        let cache = FullModelCache::new(&d).unwrap();
        let full = ModelIndex::full(5);
        for j in 1..=5 {
            let others = full.without(j);
            let xo = d.x_cols(&others);
            let qr = xo.qr();
            let q1 = qr.q();
            let xj = d.x().column(j - 1).into_owned();
            let resid = &xj - &q1 * q1.tr_mul(&xj);
            let b = resid.clone() / resid.norm();
            let got = cache.unit_residuals().column(j - 1);
            assert!((got - &b).norm() < 1e-10, "b_{j} mismatch");
            // b_j is orthogonal to every other column and has unit norm.
            for i in 1..=5 {
                if i != j {
                    assert!(got.dot(&d.x().column(i - 1)).abs() < 1e-9);
                }
            }
            assert_relative_eq!(got.norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn cache_sylvester_identity_against_direct_logdet() {
        let d = random_dataset(12, 24, 3, 6);
        let cache = FullModelCache::new(&d).unwrap();
        let full = ModelIndex::full(6);
        for j in 1..=6 {
            let direct = residual_gram(&d, &full.without(j)).unwrap().logdet().unwrap();
            let downdated = cache.logdet_without(j).unwrap();
            assert_relative_eq!(downdated, direct, max_relative = 1e-9);
        }
    }

    #[test]
    fn cache_trace_identity() {
        // tr((Y'QY)^-1 Y'Q_{-j}Y) = p + q_j
        let d = random_dataset(13, 26, 4, 5);
        let cache = FullModelCache::new(&d).unwrap();
        let full = ModelIndex::full(5);
        for j in 1..=5 {
            let gram_j = residual_gram(&d, &full.without(j)).unwrap();
            let trace = (cache.gram_full_inverse() * gram_j.gram()).trace();
            let expected = d.p() as f64 + cache.qforms()[j - 1];
            assert_relative_eq!(trace, expected, epsilon = 1e-9 * expected.abs());
        }
    }

    #[test]
    fn logdet_monotone_in_model_growth() {
        let d = random_dataset(14, 30, 3, 6);
        let chains = [
            vec![ModelIndex::empty(), ModelIndex::new(vec![2], 6).unwrap()],
            vec![
                ModelIndex::new(vec![2], 6).unwrap(),
                ModelIndex::new(vec![2, 5], 6).unwrap(),
                ModelIndex::new(vec![1, 2, 5], 6).unwrap(),
                ModelIndex::full(6),
            ],
        ];
        for chain in chains {
            for w in chain.windows(2) {
                let small = residual_gram(&d, &w[0]).unwrap().logdet().unwrap();
                let big = residual_gram(&d, &w[1]).unwrap().logdet().unwrap();
                assert!(small >= big - 1e-12, "{} -> {}", w[0], w[1]);
            }
        }
    }

    #[test]
    fn cache_rejects_singular_full_gram() {
        // An all-zero response column makes Y'QY exactly singular, so the
        // cache (which must factor it) refuses to build.
        let mut rng = ChaCha12Rng::seed_from_u64(16);
        let x = random_matrix(&mut rng, 18, 3);
        let base = random_matrix(&mut rng, 18, 1);
        let mut y = DMatrix::zeros(18, 2);
        y.set_column(1, &base.column(0));
        let d = Dataset::new(y, x).unwrap();
        assert!(matches!(
            FullModelCache::new(&d),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn qforms_invariant_under_right_multiplication() {
        let d = random_dataset(15, 22, 3, 4);
        let cache = FullModelCache::new(&d).unwrap();
        // Well-conditioned invertible T.
        let t = DMatrix::from_row_slice(3, 3, &[1.2, 0.3, -0.4, 0.0, 0.8, 0.5, 0.1, -0.2, 1.5]);
        let d2 = Dataset::new(d.y() * &t, d.x().clone()).unwrap();
        let cache2 = FullModelCache::new(&d2).unwrap();
        for j in 0..4 {
            assert_relative_eq!(
                cache.qforms()[j],
                cache2.qforms()[j],
                max_relative = 1e-9
            );
        }
        // logdets shift by the constant 2 log|det T|.
        let shift = 2.0 * t.determinant().abs().ln();
        assert_relative_eq!(
            cache2.logdet_full() - cache.logdet_full(),
            shift,
            epsilon = 1e-9
        );
    }
}
