//! Turning a fitted relation g(y) = f(x) into predictions, checking numeric
//! equivalence against a benchmark's ground truth, and aggregating run
//! results into suite metrics.

use crate::benchmarks::{sample_dataset, BenchmarkSpec, Role};
use crate::encoding::{MappingTable, PhiMatrix, PsiMatrix, Transform};
use crate::eval::{eval_phi, eval_psi, Dataset};
use crate::expr::ParsedRelation;
use crate::gp::Individual;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Fixed seed for the equivalence probe grids, so checks are reproducible.
const PROBE_SEED: u64 = 987_654_321;

/// Relative tolerance under which a relation counts as an exact recovery.
pub const EXACT_TOL: f64 = 1e-6;

/// Penalty standing in for a failed prediction inside an RMSE.
pub const FAILURE_PENALTY: f64 = 1e6;

/// A fitted relation packaged for prediction: bases, coefficient vectors,
/// the tables they decode against, and the training range of the target
/// (used for root bracketing and branch selection).
#[derive(Debug, Clone)]
pub struct RecoveredModel {
    pub benchmark: String,
    pub phis: Vec<PhiMatrix>,
    pub psis: Vec<PsiMatrix>,
    pub table_x: MappingTable,
    pub table_y: MappingTable,
    /// Unit-norm solver coefficients (displayed in written expressions).
    pub w: Vec<f64>,
    /// Sparse re-estimated coefficients, used for prediction when present.
    pub refit: Option<Vec<f64>>,
    pub y_min: f64,
    pub y_max: f64,
    pub y_median: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum PredictError {
    #[error("no root of g(y) = f(x*) on the scan interval; best grid point y={y}, |h|={residual}")]
    NoRoot { y: f64, residual: f64 },
}

/// Result of the numeric equivalence proxy.
#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub exact: bool,
    pub max_rel_error: f64,
    /// Probe points that entered the comparison.
    pub points: usize,
    /// Whether any widened-domain point entered the check.
    pub widened: bool,
    /// In-domain prediction failures; any one of these blocks exactness.
    pub failures: usize,
    /// Widened-domain points where the model itself is undefined. These lie
    /// outside the relation's natural domain (a log-form model of a rational
    /// truth exists only where its arguments stay positive), so they are
    /// skipped like points where the ground truth is non-finite.
    pub widened_undefined: usize,
}

/// Prediction RMSE over a dataset plus the number of failed predictions
/// (each contributing the fixed penalty instead of an error).
#[derive(Debug, Clone, Copy)]
pub struct PredictionScore {
    pub rmse: f64,
    pub failures: usize,
}

/// One completed run, as written to runs.jsonl.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub benchmark: String,
    pub seed: u64,
    pub sgsr: bool,
    pub exact: bool,
    pub train_rmse: f64,
    pub test_rmse: f64,
    pub train_failures: usize,
    pub test_failures: usize,
    pub runtime_seconds: f64,
    pub generations: usize,
    pub converged: bool,
    pub expression: String,
}

/// Suite metrics for one benchmark.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateReport {
    pub benchmark: String,
    pub runs: usize,
    pub recovery_rate: f64,
    pub mean_rmse: f64,
    pub median_rmse: f64,
    pub mean_runtime_s: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum AggregateError {
    #[error("no runs to aggregate")]
    Empty,
    #[error("runs mix benchmarks {0} and {1}")]
    Mixed(String, String),
}

impl RecoveredModel {
    /// Packages a GP individual fitted on `train`. None when the individual
    /// was never fitted or its target block is identically zero.
    pub fn from_individual(
        bench: &BenchmarkSpec,
        ind: &Individual,
        train: &Dataset,
    ) -> Option<RecoveredModel> {
        let fit = ind.fit.as_ref()?;
        let m = ind.phis.len();
        if fit.coefficients()[m..].iter().all(|&b| b == 0.0) {
            return None;
        }
        let mut ys: Vec<f64> =
            train.targets.iter().copied().filter(|v| v.is_finite()).collect();
        if ys.is_empty() {
            return None;
        }
        ys.sort_by(f64::total_cmp);
        Some(RecoveredModel {
            benchmark: bench.name.to_string(),
            phis: ind.phis.clone(),
            psis: ind.psis.clone(),
            table_x: bench.library_x.clone(),
            table_y: bench.library_y.clone(),
            w: fit.admm.w.clone(),
            refit: fit.refit.as_ref().map(|(w, _)| w.clone()),
            y_min: ys[0],
            y_max: *ys.last().unwrap(),
            y_median: median_of_sorted(&ys),
        })
    }

    /// Packages a parsed relation for prediction against a benchmark's
    /// domain. The raw coefficients stay as the display vector; prediction
    /// uses their projection onto the solver's unit-norm constraint set.
    /// None when either side of the relation is identically zero.
    pub fn from_relation(bench: &BenchmarkSpec, rel: ParsedRelation) -> Option<RecoveredModel> {
        let (alphas, betas) = rel.w.split_at(rel.phis.len());
        if alphas.iter().all(|&a| a == 0.0) || betas.iter().all(|&b| b == 0.0) {
            return None;
        }
        let norm = rel.w.iter().map(|v| v * v).sum::<f64>().sqrt();
        let unit: Vec<f64> = rel.w.iter().map(|v| v / norm).collect();
        let train = sample_dataset(bench, Role::Train, 0);
        let mut ys: Vec<f64> =
            train.targets.iter().copied().filter(|v| v.is_finite()).collect();
        if ys.is_empty() {
            return None;
        }
        ys.sort_by(f64::total_cmp);
        Some(RecoveredModel {
            benchmark: bench.name.to_string(),
            phis: rel.phis,
            psis: rel.psis,
            table_x: bench.library_x.clone(),
            table_y: bench.library_y.clone(),
            w: rel.w,
            refit: Some(unit),
            y_min: ys[0],
            y_max: *ys.last().unwrap(),
            y_median: median_of_sorted(&ys),
        })
    }

    /// Coefficients used for prediction: the refit when accepted, otherwise
    /// the solver vector.
    pub fn coefficients(&self) -> &[f64] {
        self.refit.as_deref().unwrap_or(&self.w)
    }

    /// Infix relation text under the solver coefficients (the display
    /// convention; prediction still uses the refit).
    pub fn expression(&self) -> String {
        crate::expr::relation_string(&self.phis, &self.psis, &self.w, &self.table_x, &self.table_y)
    }

    /// f(x) under the prediction coefficients. Zero-coefficient terms are
    /// absent from the model and are never evaluated: a dropped basis may be
    /// non-finite off the training domain, and 0 * NaN would poison the sum.
    pub fn f_value(&self, x: &[f64]) -> f64 {
        let coefs = self.coefficients();
        self.phis
            .iter()
            .zip(coefs)
            .filter(|(_, &c)| c != 0.0)
            .map(|(phi, &c)| c * eval_phi(phi, &self.table_x, x))
            .sum()
    }

    /// g(y) under the prediction coefficients; zero-coefficient terms are
    /// skipped as in `f_value`.
    pub fn g_value(&self, y: f64) -> f64 {
        let coefs = &self.coefficients()[self.phis.len()..];
        self.psis
            .iter()
            .zip(coefs)
            .filter(|(_, &c)| c != 0.0)
            .map(|(psi, &c)| c * eval_psi(psi, &self.table_y, y))
            .sum()
    }
}

fn median_of_sorted(ys: &[f64]) -> f64 {
    let n = ys.len();
    if n % 2 == 1 {
        ys[n / 2]
    } else {
        0.5 * (ys[n / 2 - 1] + ys[n / 2])
    }
}

/// Real solutions of transform(y) = target, or None when the transform has
/// no closed-form inverse here. An empty list means "no real solution".
fn closed_form_candidates(t: Transform, target: f64) -> Option<Vec<f64>> {
    let out = match t {
        Transform::Identity => vec![target],
        Transform::Ln => vec![target.exp()],
        Transform::Exp => {
            if target > 0.0 {
                vec![target.ln()]
            } else {
                vec![]
            }
        }
        Transform::Reciprocal => {
            if target != 0.0 {
                vec![1.0 / target]
            } else {
                vec![]
            }
        }
        Transform::Square => {
            if target > 0.0 {
                vec![target.sqrt(), -target.sqrt()]
            } else if target == 0.0 {
                vec![0.0]
            } else {
                vec![]
            }
        }
        Transform::Cube => vec![target.cbrt()],
        Transform::Sqrt => {
            if target >= 0.0 {
                vec![target * target]
            } else {
                vec![]
            }
        }
        Transform::NegExp => {
            if target > 0.0 {
                vec![-target.ln()]
            } else {
                vec![]
            }
        }
        _ => return None,
    };
    Some(out.into_iter().filter(|v| v.is_finite()).collect())
}

/// Root choice: inside the training range the one nearest the training
/// median wins; otherwise the one nearest the range (ties to the median).
fn select_root(cands: &[f64], model: &RecoveredModel) -> Option<f64> {
    if cands.is_empty() {
        return None;
    }
    let dist_to_range = |y: f64| (model.y_min - y).max(y - model.y_max).max(0.0);
    let inside: Vec<f64> =
        cands.iter().copied().filter(|&y| dist_to_range(y) == 0.0).collect();
    let pool: &[f64] = if inside.is_empty() { cands } else { &inside };
    pool.iter()
        .copied()
        .min_by(|&a, &b| {
            (dist_to_range(a), (a - model.y_median).abs())
                .partial_cmp(&(dist_to_range(b), (b - model.y_median).abs()))
                .unwrap_or(std::cmp::Ordering::Equal)
        })
}

/// Predicts y from x*: closed-form inverse when the target side is a single
/// catalog transform scaled by one coefficient, otherwise a bracketing scan
/// of h(y) = g(y) - f(x*) over the training range widened by 50%, with
/// bisection and a Newton polish.
pub fn predict_y(model: &RecoveredModel, x_star: &[f64]) -> Result<f64, PredictError> {
    let fx = model.f_value(x_star);
    if !fx.is_finite() {
        return Err(PredictError::NoRoot { y: model.y_median, residual: f64::INFINITY });
    }
    let m = model.phis.len();
    let betas = &model.coefficients()[m..];
    let nonzero: Vec<usize> =
        (0..betas.len()).filter(|&j| betas[j] != 0.0).collect();
    if let [j] = nonzero[..] {
        let psi = &model.psis[j];
        if psi.n_b() == 1 {
            let t = model.table_y.transform(psi.rows()[0] as usize).expect("validated psi");
            if let Some(cands) = closed_form_candidates(t, fx / betas[j]) {
                if let Some(y) = select_root(&cands, model) {
                    return Ok(y);
                }
                // no real inverse: fall through so failures carry scan data
            }
        }
    }
    scan_for_root(model, fx)
}

/// The scan path of predict_y, callable directly (it must agree with the
/// closed-form path whenever both apply).
pub fn scan_for_root(model: &RecoveredModel, fx: f64) -> Result<f64, PredictError> {
    const GRID: usize = 1000;
    let range = (model.y_max - model.y_min).max(1e-6);
    let lo = model.y_min - 0.5 * range;
    let hi = model.y_max + 0.5 * range;
    let h = |y: f64| model.g_value(y) - fx;
    let mut roots: Vec<f64> = Vec::new();
    let push_root = |roots: &mut Vec<f64>, r: f64| {
        if roots.iter().all(|&q| (q - r).abs() > 1e-9 * r.abs().max(1.0)) {
            roots.push(r);
        }
    };
    let mut best = (model.y_median, f64::INFINITY);
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..GRID {
        let y = lo + (hi - lo) * i as f64 / (GRID - 1) as f64;
        let v = h(y);
        if !v.is_finite() {
            prev = None;
            continue;
        }
        if v.abs() < best.1 {
            best = (y, v.abs());
        }
        if v == 0.0 {
            push_root(&mut roots, y);
        } else if let Some((py, pv)) = prev {
            if pv * v < 0.0 {
                let r = newton_polish(&h, bisect(&h, py, y));
                push_root(&mut roots, r);
            }
        }
        prev = Some((y, v));
    }
    select_root(&roots, model)
        .ok_or(PredictError::NoRoot { y: best.0, residual: best.1 })
}

fn bisect<F: Fn(f64) -> f64>(h: &F, mut a: f64, mut b: f64) -> f64 {
    let mut ha = h(a);
    for _ in 0..200 {
        if b - a <= 1e-12 {
            break;
        }
        let mid = 0.5 * (a + b);
        let hm = h(mid);
        if hm == 0.0 {
            return mid;
        }
        if ha * hm < 0.0 {
            b = mid;
        } else {
            a = mid;
            ha = hm;
        }
    }
    0.5 * (a + b)
}

fn newton_polish<F: Fn(f64) -> f64>(h: &F, mut y: f64) -> f64 {
    for _ in 0..3 {
        let eps = 1e-7 * y.abs().max(1.0);
        let d = (h(y + eps) - h(y - eps)) / (2.0 * eps);
        if !d.is_finite() || d == 0.0 {
            break;
        }
        let next = y - h(y) / d;
        if next.is_finite() && h(next).abs() <= h(y).abs() {
            y = next;
        } else {
            break;
        }
    }
    y
}

/// Numeric equivalence proxy: predictions are compared with the ground truth
/// on 1000 fresh in-domain points and 1000 points from the domain widened by
/// 50% about its center, skipping points where the truth is non-finite and
/// widened points where the model is undefined (both lie outside the
/// relation's natural domain; in-domain failures still count). Exact means
/// no in-domain failures and max relative error below 1e-6.
pub fn equivalence_check(model: &RecoveredModel, bench: &BenchmarkSpec) -> EquivalenceReport {
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    let (a, b) = (bench.train.a, bench.train.b);
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a) * 1.5;
    let mut max_rel = 0.0f64;
    let mut failures = 0;
    let mut points = 0;
    let mut widened_any = false;
    let mut widened_undefined = 0;
    for (lo, hi, widened) in
        [(a, b, false), (center - half, center + half, true)]
    {
        // the harmonic-number problem is defined on integers >= 1 only
        let (lo, hi) = if bench.integer_domain {
            (lo.max(1.0), hi.max(2.0))
        } else {
            (lo, hi)
        };
        for _ in 0..1000 {
            let x: Vec<f64> = (0..bench.d)
                .map(|_| {
                    let v = rng.gen_range(lo..hi);
                    if bench.integer_domain {
                        v.round()
                    } else {
                        v
                    }
                })
                .collect();
            let y_true = bench.ground_truth(&x);
            if !y_true.is_finite() {
                continue;
            }
            match predict_y(model, &x) {
                Ok(p) => {
                    points += 1;
                    widened_any |= widened;
                    max_rel = max_rel.max((p - y_true).abs() / y_true.abs().max(1.0));
                }
                Err(_) if widened => widened_undefined += 1,
                Err(_) => {
                    points += 1;
                    failures += 1;
                }
            }
        }
    }
    EquivalenceReport {
        exact: failures == 0 && points > 0 && max_rel < EXACT_TOL,
        max_rel_error: max_rel,
        points,
        widened: widened_any,
        failures,
        widened_undefined,
    }
}

/// Root-mean-square prediction error over a dataset; failed predictions
/// contribute the fixed penalty.
pub fn prediction_rmse(model: &RecoveredModel, ds: &Dataset) -> PredictionScore {
    assert!(ds.len() > 0);
    let mut se = 0.0;
    let mut failures = 0;
    for (x, &y) in ds.features.iter().zip(&ds.targets) {
        let diff = match predict_y(model, x) {
            Ok(p) => p - y,
            Err(_) => {
                failures += 1;
                FAILURE_PENALTY
            }
        };
        se += diff * diff;
    }
    PredictionScore { rmse: (se / ds.len() as f64).sqrt(), failures }
}

/// Collapses per-run records for one benchmark into its suite row.
pub fn aggregate(records: &[RunRecord]) -> Result<AggregateReport, AggregateError> {
    let first = records.first().ok_or(AggregateError::Empty)?;
    if let Some(other) = records.iter().find(|r| r.benchmark != first.benchmark) {
        return Err(AggregateError::Mixed(first.benchmark.clone(), other.benchmark.clone()));
    }
    let n = records.len();
    let exact = records.iter().filter(|r| r.exact).count();
    let mut rmses: Vec<f64> = records.iter().map(|r| r.test_rmse).collect();
    rmses.sort_by(f64::total_cmp);
    Ok(AggregateReport {
        benchmark: first.benchmark.clone(),
        runs: n,
        recovery_rate: 100.0 * exact as f64 / n as f64,
        mean_rmse: rmses.iter().sum::<f64>() / n as f64,
        median_rmse: median_of_sorted(&rmses),
        mean_runtime_s: records.iter().map(|r| r.runtime_seconds).sum::<f64>() / n as f64,
    })
}

/// Suite table in CSV form.
pub fn summary_csv(rows: &[AggregateReport]) -> String {
    let mut out = String::from("benchmark,recovery_rate,mean_rmse,median_rmse,mean_runtime_s\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.benchmark, r.recovery_rate, r.mean_rmse, r.median_rmse, r.mean_runtime_s
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::find;
    use crate::encoding::DONT_CARE;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn l0_table(d: usize) -> MappingTable {
        MappingTable::new(
            vec![
                Transform::One,
                Transform::Identity,
                Transform::Cos,
                Transform::Sin,
                Transform::Exp,
                Transform::Ln,
            ],
            d,
        )
        .unwrap()
    }

    fn y_table(extra: &[Transform]) -> MappingTable {
        let mut t = vec![Transform::One, Transform::Identity, Transform::Exp, Transform::Ln];
        t.extend_from_slice(extra);
        MappingTable::new(t, 1).unwrap()
    }

    /// Model with f(x) = alpha (a constant basis) and g = beta * psi.
    fn scalar_model(psis: Vec<PsiMatrix>, table_y: MappingTable, coefs: Vec<f64>, range: (f64, f64)) -> RecoveredModel {
        RecoveredModel {
            benchmark: "probe".into(),
            phis: vec![PhiMatrix::from_rows(vec![vec![0, DONT_CARE, DONT_CARE, DONT_CARE]])],
            psis,
            table_x: l0_table(1),
            table_y,
            w: coefs.clone(),
            refit: Some(coefs),
            y_min: range.0,
            y_max: range.1,
            y_median: 0.5 * (range.0 + range.1),
        }
    }

    #[test]
    fn closed_form_examples() {
        // g(y) = e^y with f(x*) = 1 inverts to 0
        let m = scalar_model(
            vec![PsiMatrix::from_rows(vec![2])],
            y_table(&[]),
            vec![1.0, 1.0],
            (-1.0, 1.0),
        );
        assert_abs_diff_eq!(predict_y(&m, &[0.3]).unwrap(), 0.0, epsilon = 1e-12);

        // g(y) = y^2 with f(x*) = 4 and training range [1,3] picks +2
        let m = scalar_model(
            vec![PsiMatrix::from_rows(vec![4])],
            y_table(&[Transform::Square]),
            vec![4.0, 1.0],
            (1.0, 3.0),
        );
        assert_abs_diff_eq!(predict_y(&m, &[0.0]).unwrap(), 2.0, epsilon = 1e-12);

        // negative branch chosen when the training range lies below zero
        let m = scalar_model(
            vec![PsiMatrix::from_rows(vec![4])],
            y_table(&[Transform::Square]),
            vec![4.0, 1.0],
            (-3.0, -1.0),
        );
        assert_abs_diff_eq!(predict_y(&m, &[0.0]).unwrap(), -2.0, epsilon = 1e-12);
    }

    #[test]
    fn composite_target_side_is_root_found() {
        // g(y) = y^3 + 0.1 y, f(x*) = 1.1: the root is exactly 1
        let psis =
            vec![PsiMatrix::from_rows(vec![4]), PsiMatrix::from_rows(vec![1])];
        let m = scalar_model(
            psis,
            y_table(&[Transform::Cube]),
            vec![1.1, 1.0, 0.1],
            (0.0, 2.0),
        );
        let y = predict_y(&m, &[0.0]).unwrap();
        assert!((m.g_value(y) - 1.1).abs() <= 1e-10, "g(y*) = {}", m.g_value(y));
        // independent check: solve the cubic by plain interval halving
        let (mut a, mut b) = (0.0f64, 2.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid * mid * mid + 0.1 * mid < 1.1 {
                a = mid;
            } else {
                b = mid;
            }
        }
        assert_abs_diff_eq!(y, 0.5 * (a + b), epsilon = 1e-8);
        assert_abs_diff_eq!(y, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn inversion_consistency_across_the_catalog() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let catalog = [
            (Transform::Identity, 1, -5.0, 5.0),
            (Transform::Exp, 2, -3.0, 3.0),
            (Transform::Ln, 3, 0.1, 5.0),
            (Transform::Reciprocal, 4, 0.1, 5.0),
            (Transform::Square, 5, 0.1, 5.0),
            (Transform::Cube, 6, -5.0, 5.0),
            (Transform::Sqrt, 7, 0.1, 5.0),
            (Transform::NegExp, 8, -3.0, 3.0),
        ];
        let table = MappingTable::new(
            vec![
                Transform::One,
                Transform::Identity,
                Transform::Exp,
                Transform::Ln,
                Transform::Reciprocal,
                Transform::Square,
                Transform::Cube,
                Transform::Sqrt,
                Transform::NegExp,
            ],
            1,
        )
        .unwrap();
        for (t, code, lo, hi) in catalog {
            for _ in 0..1000 {
                let y0: f64 = rng.gen_range(lo..hi);
                let beta: f64 = if rng.gen_bool(0.5) { rng.gen_range(0.2..2.0) } else { -rng.gen_range(0.2..2.0) };
                let psi = PsiMatrix::from_rows(vec![code]);
                let target = beta * eval_psi(&psi, &table, y0);
                if !target.is_finite() {
                    continue;
                }
                let m = scalar_model(
                    vec![psi],
                    table.clone(),
                    vec![target, beta],
                    (y0 - 0.5, y0 + 0.5),
                );
                let y = predict_y(&m, &[0.0])
                    .unwrap_or_else(|e| panic!("{t:?} at y0={y0}: {e}"));
                assert!(
                    (m.g_value(y) - target).abs() <= 1e-10,
                    "{t:?}: y0={y0} beta={beta} y={y}"
                );
            }
        }
    }

    #[test]
    fn scan_path_agrees_with_closed_form() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let table = y_table(&[Transform::Square, Transform::Cube]);
        for _ in 0..200 {
            let y0: f64 = rng.gen_range(0.3..2.0);
            let code = [1usize, 2, 3, 4, 5][rng.gen_range(0..5)];
            let t = table.transform(code).unwrap();
            let psi = PsiMatrix::from_rows(vec![code as i32]);
            let target = eval_psi(&psi, &table, y0);
            let m = scalar_model(
                vec![psi],
                table.clone(),
                vec![target, 1.0],
                (y0 - 0.4, y0 + 0.4),
            );
            let closed = predict_y(&m, &[0.0]).unwrap();
            let scanned = scan_for_root(&m, target).unwrap();
            assert!(
                (closed - scanned).abs() <= 1e-8,
                "{t:?}: closed {closed} vs scanned {scanned}"
            );
        }
    }

    #[test]
    fn no_root_failure_carries_the_best_grid_point() {
        // g(y) = y^2 can never equal -4
        let m = scalar_model(
            vec![PsiMatrix::from_rows(vec![4])],
            y_table(&[Transform::Square]),
            vec![-4.0, 1.0],
            (1.0, 3.0),
        );
        match predict_y(&m, &[0.0]) {
            Err(PredictError::NoRoot { y, residual }) => {
                // best |y^2 + 4| on [0,4] is at the left edge
                assert!(residual >= 4.0 && y <= 0.1, "y={y} residual={residual}");
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    /// phi = sin(x1)*cos(x2) as a two-row product matrix.
    fn sincos_phi() -> PhiMatrix {
        PhiMatrix::from_rows(vec![vec![3, 0, 1, DONT_CARE], vec![2, 0, 2, DONT_CARE]])
    }

    fn nguyen10_paper_model() -> RecoveredModel {
        let bench = find("Nguyen-10").unwrap();
        let w = vec![0.89442, 0.44721];
        RecoveredModel {
            benchmark: bench.name.to_string(),
            phis: vec![sincos_phi()],
            psis: vec![PsiMatrix::from_rows(vec![1])],
            table_x: bench.library_x.clone(),
            table_y: bench.library_y.clone(),
            w: w.clone(),
            refit: Some(w),
            y_min: 0.0,
            y_max: 1.7,
            y_median: 0.8,
        }
    }

    #[test]
    fn printed_nguyen10_relation_is_exact() {
        let bench = find("Nguyen-10").unwrap();
        let report = equivalence_check(&nguyen10_paper_model(), &bench);
        assert!(report.exact, "report: {report:?}");
        assert!(report.widened && report.failures == 0);
        assert!(report.points >= 1500);
    }

    #[test]
    fn printed_symset9_relation_is_exact() {
        // 0.83205 ln(y) = -0.5547 ln(x1 + x2 + x1)
        let bench = find("SymSet-9").unwrap();
        let phi = PhiMatrix::from_rows(vec![vec![5, 1, 1, 2, 1]]);
        let w = vec![-0.5547, 0.83205];
        let ds = crate::benchmarks::sample_dataset(&bench, crate::benchmarks::Role::Train, 0);
        let mut ys = ds.targets.clone();
        ys.sort_by(f64::total_cmp);
        let model = RecoveredModel {
            benchmark: bench.name.to_string(),
            phis: vec![phi],
            psis: vec![PsiMatrix::from_rows(vec![3])],
            table_x: bench.library_x.clone(),
            table_y: bench.library_y.clone(),
            w: w.clone(),
            refit: Some(w),
            y_min: ys[0],
            y_max: *ys.last().unwrap(),
            y_median: median_of_sorted(&ys),
        };
        let report = equivalence_check(&model, &bench);
        assert!(report.exact, "report: {report:?}");
    }

    #[test]
    fn taylor_fit_is_rejected_on_the_widened_domain() {
        // x + x^3/6 + x^5/120 approximates sinh on [-1,1] to ~2e-4
        let bench = find("Livermore-7").unwrap();
        let x1 = PhiMatrix::from_rows(vec![vec![1, 0, 1, DONT_CARE, DONT_CARE, DONT_CARE]]);
        let x3 = PhiMatrix::from_rows(vec![vec![1, 2, 1, 1, 1, 0]]);
        let x5 = PhiMatrix::from_rows(vec![vec![1, 2, 1, 1, 1, 0], vec![1, 2, 1, 1, 0, 0]]);
        let w = vec![1.0, 1.0 / 6.0, 1.0 / 120.0, 1.0];
        let model = RecoveredModel {
            benchmark: bench.name.to_string(),
            phis: vec![x1, x3, x5],
            psis: vec![PsiMatrix::from_rows(vec![1])],
            table_x: bench.library_x.clone(),
            table_y: bench.library_y.clone(),
            w: w.clone(),
            refit: Some(w),
            y_min: -1.2,
            y_max: 1.2,
            y_median: 0.0,
        };
        let report = equivalence_check(&model, &bench);
        assert!(!report.exact);
        assert!(report.max_rel_error > EXACT_TOL);
        assert_eq!(report.failures, 0);
    }

    #[test]
    fn exact_model_has_zero_rmse_and_constant_model_has_stddev() {
        let bench = find("Nguyen-10").unwrap();
        let ds = crate::benchmarks::sample_dataset(&bench, crate::benchmarks::Role::Test, 3);
        let model = nguyen10_paper_model();
        let score = prediction_rmse(&model, &ds);
        assert!(score.rmse <= 1e-10, "rmse {}", score.rmse);
        assert_eq!(score.failures, 0);

        let mean = ds.targets.iter().sum::<f64>() / ds.len() as f64;
        let constant = scalar_model(
            vec![PsiMatrix::from_rows(vec![1])],
            y_table(&[]),
            vec![mean, 1.0],
            (-2.0, 2.0),
        );
        let want = (ds.targets.iter().map(|y| (y - mean) * (y - mean)).sum::<f64>()
            / ds.len() as f64)
            .sqrt();
        assert_relative_eq!(prediction_rmse(&constant, &ds).rmse, want, max_relative = 1e-9);
    }

    #[test]
    fn failures_are_penalized_in_the_rmse() {
        let bench = find("Nguyen-10").unwrap();
        let ds = crate::benchmarks::sample_dataset(&bench, crate::benchmarks::Role::Test, 3);
        // g(y) = y^2 while f(x*) = -1: no prediction anywhere
        let broken = scalar_model(
            vec![PsiMatrix::from_rows(vec![4])],
            y_table(&[Transform::Square]),
            vec![-1.0, 1.0],
            (0.5, 1.5),
        );
        let score = prediction_rmse(&broken, &ds);
        assert_eq!(score.failures, ds.len());
        assert!(score.rmse >= 0.9 * FAILURE_PENALTY);
    }

    #[test]
    fn aggregate_reproduces_the_published_average_pattern() {
        let rec = |rmse: f64, exact: bool| RunRecord {
            benchmark: "Jin-1".into(),
            seed: 0,
            sgsr: false,
            exact,
            train_rmse: 0.0,
            test_rmse: rmse,
            train_failures: 0,
            test_failures: 0,
            runtime_seconds: 10.0,
            generations: 100,
            converged: true,
            expression: String::new(),
        };
        let records: Vec<RunRecord> = (0..5)
            .map(|_| rec(0.0, true))
            .chain(std::iter::once(rec(0.018, false)))
            .collect();
        let report = aggregate(&records).unwrap();
        assert_relative_eq!(report.mean_rmse, 0.0030, max_relative = 1e-12);
        assert_relative_eq!(report.median_rmse, 0.0);
        assert_relative_eq!(report.recovery_rate, 500.0 / 6.0, max_relative = 1e-12);
        assert_relative_eq!(report.mean_runtime_s, 10.0);

        assert_eq!(aggregate(&[]), Err(AggregateError::Empty));
        let mut mixed = records.clone();
        mixed[1].benchmark = "Jin-2".into();
        assert!(matches!(aggregate(&mixed), Err(AggregateError::Mixed(_, _))));
    }

    #[test]
    fn csv_layout_is_stable() {
        let rows = vec![AggregateReport {
            benchmark: "Nguyen-1".into(),
            runs: 5,
            recovery_rate: 100.0,
            mean_rmse: 0.0,
            median_rmse: 0.0,
            mean_runtime_s: 1.5,
        }];
        let text = summary_csv(&rows);
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "benchmark,recovery_rate,mean_rmse,median_rmse,mean_runtime_s"
        );
        assert_eq!(lines.next().unwrap(), "Nguyen-1,100,0,0,1.5");
    }
}
