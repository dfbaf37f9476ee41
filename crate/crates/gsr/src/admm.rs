//! Unit-norm constrained Lasso: minimize ||A w||^2 + lambda ||w||_1 subject
//! to ||w||_2 = 1, solved heuristically by scaled ADMM with a normalization
//! step, plus an unregularized refit on the selected support.

use crate::linalg::{self, Cholesky, SymMatrix};
use thiserror::Error;

/// Solver settings. The initial iterates default to the normalized
/// all-halves vector (w), all ones (z), and all zeros (u).
#[derive(Debug, Clone)]
pub struct AdmmConfig {
    pub lambda: f64,
    pub rho: f64,
    /// Convergence threshold on ||w_k - w_{k-1}||_2.
    pub tol: f64,
    pub max_iters: usize,
    pub w0: Option<Vec<f64>>,
    pub z0: Option<Vec<f64>>,
    pub u0: Option<Vec<f64>>,
}

impl Default for AdmmConfig {
    fn default() -> Self {
        AdmmConfig { lambda: 0.4, rho: 0.1, tol: 1e-5, max_iters: 1000, w0: None, z0: None, u0: None }
    }
}

/// Outcome of one ADMM solve. `support` is the index set where the final z
/// iterate is nonzero; it can be empty, since z is produced by soft
/// thresholding and w itself is never exactly sparse.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub w: Vec<f64>,
    pub support: Vec<usize>,
    /// Final z iterate; `support` is exactly its nonzero pattern.
    pub z: Vec<f64>,
    pub residual_rmse: f64,
    pub converged: bool,
    pub iters: usize,
}

#[derive(Debug, Error)]
pub enum AdmmError {
    #[error("design matrix contains non-finite entries")]
    NonFinite,
    #[error("design matrix is empty")]
    Empty,
    #[error("normal-equations matrix could not be factored")]
    Factorization,
}

/// Soft thresholding: sign(a) * max(|a| - kappa, 0).
#[inline]
pub fn soft_threshold(a: f64, kappa: f64) -> f64 {
    debug_assert!(kappa >= 0.0);
    a.signum() * (a.abs() - kappa).max(0.0)
}

fn residual_rmse(columns: &[Vec<f64>], w: &[f64]) -> f64 {
    let n = columns[0].len();
    let mut ss = 0.0;
    for i in 0..n {
        let mut r = 0.0;
        for (col, &wj) in columns.iter().zip(w) {
            r += col[i] * wj;
        }
        ss += r * r;
    }
    (ss / n as f64).sqrt()
}

/// Runs the ADMM iteration on A given as columns:
///   w <- (2 A^T A + rho I)^{-1} rho (z - u), then normalized to the sphere;
///   z <- soft_threshold(w + u, lambda / rho);
///   u <- u + w - z;
/// stopping when ||w_k - w_{k-1}|| < tol or at max_iters. The factorization
/// of the normal-equations matrix is computed once and reused.
pub fn solve_admm(columns: &[Vec<f64>], cfg: &AdmmConfig) -> Result<FitResult, AdmmError> {
    let m = columns.len();
    if m == 0 || columns[0].is_empty() {
        return Err(AdmmError::Empty);
    }
    if columns.iter().any(|c| c.iter().any(|v| !v.is_finite())) {
        return Err(AdmmError::NonFinite);
    }
    let mut gram = linalg::gram(columns);
    for i in 0..m {
        for j in 0..m {
            let v = 2.0 * gram.at(i, j) + if i == j { cfg.rho } else { 0.0 };
            gram.set(i, j, v);
        }
    }
    let factor = Cholesky::factor(&gram).ok_or(AdmmError::Factorization)?;

    let mut w = cfg.w0.clone().unwrap_or_else(|| vec![0.5; m]);
    normalize(&mut w);
    let mut z = cfg.z0.clone().unwrap_or_else(|| vec![1.0; m]);
    let mut u = cfg.u0.clone().unwrap_or_else(|| vec![0.0; m]);
    assert!(w.len() == m && z.len() == m && u.len() == m);

    let kappa = cfg.lambda / cfg.rho;
    let mut converged = false;
    let mut iters = 0;
    for _ in 0..cfg.max_iters {
        iters += 1;
        let w_prev = w.clone();
        let rhs: Vec<f64> = z.iter().zip(&u).map(|(zi, ui)| cfg.rho * (zi - ui)).collect();
        w = factor.solve(&rhs);
        if !normalize(&mut w) {
            // z - u vanished; keep the previous iterate and stop
            w = w_prev;
            break;
        }
        for j in 0..m {
            z[j] = soft_threshold(w[j] + u[j], kappa);
            u[j] += w[j] - z[j];
        }
        let diff: f64 = w
            .iter()
            .zip(&w_prev)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        if diff < cfg.tol {
            converged = true;
            break;
        }
    }

    let support: Vec<usize> = z
        .iter()
        .enumerate()
        .filter(|(_, &zj)| zj != 0.0)
        .map(|(j, _)| j)
        .collect();
    let residual = residual_rmse(columns, &w);
    Ok(FitResult { w, support, z, residual_rmse: residual, converged, iters })
}

/// Normalizes in place; false when the vector has no usable norm.
fn normalize(v: &mut [f64]) -> bool {
    let n = linalg::norm2(v);
    if n <= 0.0 || !n.is_finite() {
        return false;
    }
    for x in v.iter_mut() {
        *x /= n;
    }
    true
}

/// Unit-norm minimizer of ||A_S w|| over the support columns: the smallest
/// right singular vector of A_S, computed from the eigen-decomposition of
/// its Gram matrix. When that smallest eigenvalue is degenerate (exact
/// relations with duplicate bases produce multi-dimensional null spaces),
/// the direction inside the degenerate eigenspace with the largest
/// target-block mass is chosen, so a relation actually expressing y wins
/// over one relating feature bases to each other. The sign is fixed so the
/// largest-magnitude entry in the target block (indices >= m_phi) is
/// positive. Returns the embedded full-length vector and its residual.
/// None when the support is empty.
pub fn refit_support(
    columns: &[Vec<f64>],
    support: &[usize],
    m_phi: usize,
) -> Option<(Vec<f64>, f64)> {
    if support.is_empty() {
        return None;
    }
    let sub: Vec<Vec<f64>> = support.iter().map(|&j| columns[j].clone()).collect();
    let gram = linalg::gram(&sub);
    let eig = linalg::eigen_sym(&gram, 1e-12);
    let k = sub.len();
    let lambda_max = eig.values[k - 1].max(1.0);
    let thresh = eig.values[0] + 1e-9 * lambda_max;
    let null_dim = eig.values.iter().take_while(|&&l| l <= thresh).count().max(1);
    let v = if null_dim == 1 {
        eig.vectors[0].clone()
    } else {
        beta_rich_direction(&eig.vectors[..null_dim], support, m_phi)
    };
    let mut w = vec![0.0; columns.len()];
    for (&j, &vj) in support.iter().zip(&v) {
        w[j] = vj;
    }
    let norm = linalg::norm2(&w);
    if norm > 0.0 {
        for x in w.iter_mut() {
            *x /= norm;
        }
    }
    fix_sign(&mut w, m_phi);
    let residual = residual_rmse(columns, &w);
    Some((w, residual))
}

/// Unit vector in the span of `basis` maximizing the squared mass on
/// support positions >= m_phi; falls back to the first basis vector when
/// the whole span is orthogonal to the target block.
fn beta_rich_direction(basis: &[Vec<f64>], support: &[usize], m_phi: usize) -> Vec<f64> {
    let k = basis.len();
    let beta_rows: Vec<usize> = support
        .iter()
        .enumerate()
        .filter(|(_, &j)| j >= m_phi)
        .map(|(local, _)| local)
        .collect();
    if beta_rows.is_empty() {
        return basis[0].clone();
    }
    // Gram of the target-block parts of the basis vectors; its largest
    // eigenvector gives the maximizing combination.
    let mut g = SymMatrix::zeros(k);
    for a in 0..k {
        for b in 0..k {
            let s: f64 = beta_rows.iter().map(|&r| basis[a][r] * basis[b][r]).sum();
            g.set(a, b, s);
        }
    }
    let eig = linalg::eigen_sym(&g, 1e-12);
    let best = &eig.vectors[k - 1];
    if eig.values[k - 1] <= 0.0 {
        return basis[0].clone();
    }
    let n = basis[0].len();
    let mut v = vec![0.0; n];
    for (c, b) in best.iter().zip(basis) {
        for i in 0..n {
            v[i] += c * b[i];
        }
    }
    v
}

/// True when the largest-|.| entry among indices >= m_phi is negative
/// (falling back to the overall largest when the target block is all zero).
fn leader_is_negative(w: &[f64], m_phi: usize) -> bool {
    let block = if w[m_phi..].iter().any(|&x| x != 0.0) { &w[m_phi..] } else { w };
    let mut lead = 0.0f64;
    for &x in block {
        if x.abs() > lead.abs() {
            lead = x;
        }
    }
    lead < 0.0
}

/// Flips the sign so the leading target-block coefficient is positive;
/// printed relations then read "+g(y) = ...".
pub fn fix_sign(w: &mut [f64], m_phi: usize) {
    if leader_is_negative(w, m_phi) {
        for x in w.iter_mut() {
            *x = -*x;
        }
    }
}

/// Full fit pipeline: ADMM, support selection, refit decision. The refit
/// runs on the z-support when nonempty, otherwise on the significant entries
/// of w (above 1e-4 of its largest magnitude); it is kept only when its
/// residual does not exceed the ADMM residual.
#[derive(Debug, Clone)]
pub struct Fit {
    pub m_phi: usize,
    pub admm: FitResult,
    /// Accepted refit coefficients and their residual, when the refit won.
    pub refit: Option<(Vec<f64>, f64)>,
}

impl Fit {
    /// Coefficients used for prediction and equivalence checking.
    pub fn coefficients(&self) -> &[f64] {
        self.refit.as_ref().map_or(&self.admm.w, |(w, _)| w)
    }

    pub fn residual(&self) -> f64 {
        self.refit.as_ref().map_or(self.admm.residual_rmse, |&(_, r)| r)
    }

    pub fn alpha(&self) -> &[f64] {
        &self.admm.w[..self.m_phi]
    }

    pub fn beta(&self) -> &[f64] {
        &self.admm.w[self.m_phi..]
    }

    /// Largest coefficient magnitude in the target block of the final
    /// coefficient vector.
    pub fn beta_max_abs(&self) -> f64 {
        self.coefficients()[self.m_phi..]
            .iter()
            .fold(0.0f64, |acc, &x| acc.max(x.abs()))
    }
}

pub fn fit(columns: &[Vec<f64>], m_phi: usize, cfg: &AdmmConfig) -> Result<Fit, AdmmError> {
    let mut admm = solve_admm(columns, cfg)?;
    // orient w (and z with it, so the pair stays consistent) before the refit
    if leader_is_negative(&admm.w, m_phi) {
        for x in admm.w.iter_mut() {
            *x = -*x;
        }
        for x in admm.z.iter_mut() {
            *x = -*x;
        }
    }
    let support = if admm.support.is_empty() {
        significant_indices(&admm.w)
    } else {
        admm.support.clone()
    };
    let refit = refit_support(columns, &support, m_phi)
        .filter(|&(_, residual)| residual <= admm.residual_rmse);
    Ok(Fit { m_phi, admm, refit })
}

/// Indices whose magnitude exceeds 1e-4 of the largest.
fn significant_indices(w: &[f64]) -> Vec<usize> {
    let max = w.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()));
    w.iter()
        .enumerate()
        .filter(|(_, &x)| x.abs() > 1e-4 * max)
        .map(|(j, _)| j)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_columns(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
        (0..m)
            .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect()
    }

    #[test]
    fn soft_threshold_identities() {
        assert_eq!(soft_threshold(3.0, 1.0), 2.0);
        assert_eq!(soft_threshold(-3.0, 1.0), -2.0);
        assert_eq!(soft_threshold(0.5, 1.0), 0.0);
        assert_eq!(soft_threshold(-0.5, 1.0), 0.0);
        assert_eq!(soft_threshold(2.5, 0.0), 2.5);
    }

    #[test]
    fn mirrored_columns_reach_zero_residual() {
        // A = (c, -c): any multiple of (1, 1)/sqrt(2) is an exact relation.
        let c: Vec<f64> = (0..20).map(|i| (i as f64 * 0.37).sin() + 1.5).collect();
        let neg: Vec<f64> = c.iter().map(|v| -v).collect();
        let columns = vec![c, neg];
        let r = solve_admm(&columns, &AdmmConfig::default()).unwrap();
        assert!(r.residual_rmse <= 1e-6, "residual {}", r.residual_rmse);
        assert_abs_diff_eq!(linalg::norm2(&r.w), 1.0, epsilon = 1e-9);
        // the refit stage identifies both columns as the active set
        let f = fit(&columns, 1, &AdmmConfig::default()).unwrap();
        let (wr, rr) = f.refit.as_ref().expect("refit accepted");
        assert!(wr.iter().all(|&x| x != 0.0));
        assert!(*rr <= 1e-10);
        assert_abs_diff_eq!(wr[0], std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-9);
        assert_abs_diff_eq!(wr[1], std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-9);
    }

    #[test]
    fn collinear_log_columns_recover_the_ratio() {
        // Columns ln(x), ln(x^4) = 4 ln(x), and -0.5 ln(x) standing in for
        // the target side: every exact relation satisfies
        // (alpha1 + 4 alpha2) / beta = 0.5.
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let x: Vec<f64> = (0..20).map(|_| rng.gen_range(0.01..4.0)).collect();
        let lnx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
        let col2: Vec<f64> = lnx.iter().map(|v| 4.0 * v).collect();
        let col3: Vec<f64> = lnx.iter().map(|v| -0.5 * v).collect();
        let columns = vec![lnx, col2, col3];
        let f = fit(&columns, 2, &AdmmConfig::default()).unwrap();
        // the raw ADMM iterate drifts toward the null space only slowly here
        // (the null space is two-dimensional), but the refit lands on an
        // exact relation that keeps the target column active
        assert!(f.refit.is_some(), "refit should be accepted");
        assert!(f.residual() <= 1e-6, "post-refit residual {}", f.residual());
        let w = f.coefficients();
        assert!(w[2].abs() > 1e-6, "target coefficient vanished: {w:?}");
        let ratio = (w[0] + 4.0 * w[1]) / w[2];
        assert_abs_diff_eq!(ratio, 0.5, epsilon = 1e-3);
    }

    #[test]
    fn unit_norm_postcondition_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..300 {
            let n = rng.gen_range(5..40);
            let m = rng.gen_range(2..=10);
            let columns = random_columns(n, m, &mut rng);
            let r = solve_admm(&columns, &AdmmConfig::default()).unwrap();
            assert!((linalg::norm2(&r.w) - 1.0).abs() <= 1e-9);
            assert!(r.iters <= 1000);
        }
    }

    #[test]
    fn non_finite_input_is_rejected() {
        let columns = vec![vec![1.0, f64::NAN]];
        assert!(matches!(solve_admm(&columns, &AdmmConfig::default()), Err(AdmmError::NonFinite)));
        let columns = vec![vec![1.0, f64::INFINITY]];
        assert!(matches!(solve_admm(&columns, &AdmmConfig::default()), Err(AdmmError::NonFinite)));
        assert!(matches!(solve_admm(&[], &AdmmConfig::default()), Err(AdmmError::Empty)));
    }

    #[test]
    fn single_column_refit() {
        let c: Vec<f64> = (0..10).map(|i| i as f64 + 1.0).collect();
        let norm = linalg::norm2(&c);
        let columns = vec![c];
        let (w, r) = refit_support(&columns, &[0], 0).unwrap();
        assert_eq!(w, vec![1.0]);
        assert_abs_diff_eq!(r, norm / (10.0f64).sqrt(), epsilon = 1e-12);
        assert!(refit_support(&columns, &[], 0).is_none());
    }

    #[test]
    fn planted_null_vector_is_recovered_by_refit() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut columns = random_columns(40, 5, &mut rng);
        // plant col3 = 0.75 * col1 (+ tiny noise): null vector (0, .6, 0, -.8, 0)
        columns[3] = columns[1]
            .iter()
            .map(|v| 0.75 * v + 1e-9 * rng.gen_range(-1.0..1.0))
            .collect();
        let f = fit(&columns, 4, &AdmmConfig::default()).unwrap();
        let w = f.coefficients();
        let planted = [0.0, 0.6, 0.0, -0.8, 0.0];
        // compare up to sign
        let align: f64 = w.iter().zip(&planted).map(|(a, b)| a * b).sum();
        assert!(
            align.abs() > 1.0 - 1e-6,
            "direction error too large: w = {w:?}, alignment {align}"
        );
        assert!(f.residual() < 1e-8);
    }

    #[test]
    fn refit_sign_makes_target_block_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let columns = random_columns(30, 6, &mut rng);
            let f = fit(&columns, 4, &AdmmConfig::default()).unwrap();
            let w = f.coefficients();
            let lead = w[4..]
                .iter()
                .copied()
                .max_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap())
                .unwrap();
            assert!(lead >= 0.0, "target-block leader should be positive, got {lead}");
        }
    }

    #[test]
    fn shrinkage_is_monotone_in_lambda() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..100 {
            let columns = random_columns(40, 5, &mut rng);
            let mut sizes = Vec::new();
            for lambda in [0.01, 0.1, 0.4, 1.0] {
                let cfg = AdmmConfig { lambda, ..AdmmConfig::default() };
                let f = fit(&columns, 4, &cfg).unwrap();
                sizes.push(f.admm.support.len());
            }
            for pair in sizes.windows(2) {
                assert!(pair[0] >= pair[1], "support sizes not monotone: {sizes:?}");
            }
        }
    }

    #[test]
    fn fixed_point_gap_is_small_when_thresholding_is_active() {
        // With lambda small enough for the soft threshold to fire, the
        // stopping rule coincides with a genuine ADMM fixed point, where
        // w and z agree to within an order of magnitude of the tolerance.
        let mut rng = ChaCha8Rng::seed_from_u64(57);
        let cfg = AdmmConfig { lambda: 0.01, ..AdmmConfig::default() };
        for _ in 0..100 {
            let columns = random_columns(40, 5, &mut rng);
            let r = solve_admm(&columns, &cfg).unwrap();
            assert!(r.converged);
            assert!(!r.support.is_empty());
            let gap: f64 = r
                .w
                .iter()
                .zip(&r.z)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            assert!(gap <= 10.0 * cfg.tol, "fixed-point gap {gap}");
        }
    }

    #[test]
    fn deterministic_given_identical_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let columns = random_columns(25, 7, &mut rng);
        let a = solve_admm(&columns, &AdmmConfig::default()).unwrap();
        let b = solve_admm(&columns, &AdmmConfig::default()).unwrap();
        assert_eq!(a.w, b.w);
        assert_eq!(a.support, b.support);
        assert_eq!(a.iters, b.iters);
    }
}
