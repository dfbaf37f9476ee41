//! Prediction inverts the target side: g(y) = f(x*) is solved in closed
//! form when g is a single catalogued transform, otherwise by a bracketing
//! root search over the training range of y. Ambiguous roots resolve toward
//! the training data; an empty bracket reports the best grid point.
//!
//! Run with `cargo run --example predict`.

use gsr::benchmarks::find;
use gsr::encoding::{MappingTable, PhiMatrix, PsiMatrix, Transform, DONT_CARE};
use gsr::expr::parse_relation;
use gsr::recovery::{predict_y, PredictError, RecoveredModel};

fn main() {
    // An exact relation for the power law y = x1^x2. The target side
    // c*ln(y) inverts in closed form.
    let spec = find("Nguyen-11").unwrap();
    let rel = parse_relation(
        "0.70711*ln(y) = 0.70711*x2*ln(x1)",
        &spec.library_x,
        &spec.library_y,
    )
    .unwrap();
    let model = RecoveredModel::from_relation(&spec, rel).unwrap();
    println!("relation {}", model.expression());
    for x in [[1.5, 2.0], [2.0, 3.0], [0.5, 2.0]] {
        let y = predict_y(&model, &x).unwrap();
        println!("  x = {x:?}  predicted {y:.6}  truth {:.6}", spec.ground_truth(&x));
    }

    // A composite target side y^3 + 0.1*y has no catalogued inverse, so the
    // solve brackets g(y) = f(x*) on the training range of y (widened by
    // half its span on each end) and bisects.
    let model = RecoveredModel {
        benchmark: "demo".into(),
        phis: vec![PhiMatrix::from_rows(vec![vec![1, 0, 1, DONT_CARE]])],
        psis: vec![PsiMatrix::from_rows(vec![2]), PsiMatrix::from_rows(vec![1])],
        table_x: MappingTable::new(vec![Transform::One, Transform::Identity], 2).unwrap(),
        table_y: MappingTable::new(
            vec![Transform::One, Transform::Identity, Transform::Cube],
            1,
        )
        .unwrap(),
        w: vec![1.1, 1.0, 0.1],
        refit: None,
        y_min: 0.0,
        y_max: 2.0,
        y_median: 1.0,
    };
    // g(1) = 1.1 = f(1, _), so x1 = 1 must predict y = 1.
    let y = predict_y(&model, &[1.0, 0.0]).unwrap();
    println!("g(y) = y^3 + 0.1*y, f(x) = 1.1*x1, x1 = 1  ->  y = {y:.9}");

    // g(y) = y*y is written as two rows, which also takes the scan path; a
    // negative target has no root, and the error carries the closest miss.
    let model = RecoveredModel {
        psis: vec![PsiMatrix::from_rows(vec![1, 1])],
        w: vec![1.0, 1.0],
        ..model
    };
    match predict_y(&model, &[4.0, 0.0]) {
        Ok(y) => println!("g(y) = y^2, f = 4    ->  y = {y:.9} (root nearest the data)"),
        Err(e) => println!("unexpected: {e}"),
    }
    match predict_y(&model, &[-4.0, 0.0]) {
        Err(PredictError::NoRoot { y, residual }) => {
            println!("g(y) = y^2, f = -4   ->  no root; best grid point y = {y:.3}, |g-f| = {residual:.3}")
        }
        Ok(y) => println!("unexpected root {y}"),
    }
}
