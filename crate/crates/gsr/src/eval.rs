//! Numeric evaluation of basis functions and assembly of the design
//! matrices X, Y and the stacked A = [X | -Y].

use crate::encoding::{MappingTable, PhiMatrix, PsiMatrix, Transform, DONT_CARE};

/// Training or test data: N feature rows of width d plus N targets.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub features: Vec<Vec<f64>>,
    pub targets: Vec<f64>,
}

impl Dataset {
    pub fn new(features: Vec<Vec<f64>>, targets: Vec<f64>) -> Self {
        assert!(!features.is_empty());
        assert_eq!(features.len(), targets.len());
        let d = features[0].len();
        assert!(features.iter().all(|r| r.len() == d));
        Dataset { features, targets }
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features[0].len()
    }
}

/// Evaluated design matrices. Columns are stored contiguously
/// (column-major) since the solver works column-wise.
#[derive(Debug, Clone)]
pub struct DesignBundle {
    pub n: usize,
    pub m_phi: usize,
    pub m_psi: usize,
    /// Columns of A = [X | -Y], each of length n.
    pub columns: Vec<Vec<f64>>,
    /// Per-column flag: true when the column contains a NaN or infinity.
    pub non_finite: Vec<bool>,
}

impl DesignBundle {
    pub fn m(&self) -> usize {
        self.m_phi + self.m_psi
    }

    /// X entry (row i, basis j).
    pub fn x(&self, i: usize, j: usize) -> f64 {
        self.columns[j][i]
    }

    /// Y entry (row i, basis j); A stores -Y, so negate back.
    pub fn y(&self, i: usize, j: usize) -> f64 {
        -self.columns[self.m_phi + j][i]
    }

    pub fn any_non_finite(&self) -> bool {
        self.non_finite.iter().any(|&f| f)
    }
}

/// Applies one unary transform. Out-of-domain arguments produce non-finite
/// values (ln of a non-positive number, square root of a negative number,
/// division by zero); nothing panics.
pub fn apply_transform(t: Transform, a: f64) -> f64 {
    match t {
        Transform::One => 1.0,
        Transform::Identity => a,
        Transform::Reciprocal => 1.0 / a,
        Transform::Square => a * a,
        Transform::Cube => a * a * a,
        Transform::Cos => a.cos(),
        Transform::Sin => a.sin(),
        Transform::Exp => a.exp(),
        Transform::Ln => a.ln(),
        Transform::Sqrt => a.sqrt(),
        Transform::NegExp => (-a).exp(),
        Transform::Neg => -a,
        Transform::Tan => a.tan(),
        Transform::Tanh => a.tanh(),
    }
}

/// Evaluates a feature-side basis at one point: the product over rows of the
/// transform applied to its argument. Sum arguments treat skip as 0, product
/// arguments treat skip as 1. The matrix must be valid for `table`.
pub fn eval_phi(m: &PhiMatrix, table: &MappingTable, x: &[f64]) -> f64 {
    let mut value = 1.0;
    for row in m.rows() {
        let t = table.transform(row[0] as usize).expect("valid matrix");
        if t == Transform::One {
            continue; // factor 1
        }
        let arg = match row[1] {
            0 => x[row[2] as usize - 1],
            1 => row[2..]
                .iter()
                .filter(|&&v| v > 0)
                .map(|&v| x[v as usize - 1])
                .sum(),
            _ => row[2..]
                .iter()
                .filter(|&&v| v > 0)
                .map(|&v| x[v as usize - 1])
                .product(),
        };
        value *= apply_transform(t, arg);
    }
    value
}

/// Evaluates a target-side basis at one target value: the product over rows
/// of the transform applied to y.
pub fn eval_psi(m: &PsiMatrix, table: &MappingTable, y: f64) -> f64 {
    m.rows()
        .iter()
        .map(|&code| apply_transform(table.transform(code as usize).expect("valid matrix"), y))
        .product()
}

/// Evaluates every basis on the dataset and assembles A = [X | -Y].
/// Non-finite columns are flagged, never rejected; the caller decides how to
/// respond.
pub fn build_design(
    ds: &Dataset,
    phis: &[PhiMatrix],
    psis: &[PsiMatrix],
    table_x: &MappingTable,
    table_y: &MappingTable,
) -> DesignBundle {
    let n = ds.len();
    let mut columns = Vec::with_capacity(phis.len() + psis.len());
    let mut non_finite = Vec::with_capacity(phis.len() + psis.len());
    for phi in phis {
        let col: Vec<f64> = ds.features.iter().map(|x| eval_phi(phi, table_x, x)).collect();
        non_finite.push(col.iter().any(|v| !v.is_finite()));
        columns.push(col);
    }
    for psi in psis {
        let col: Vec<f64> = ds.targets.iter().map(|&y| -eval_psi(psi, table_y, y)).collect();
        non_finite.push(col.iter().any(|v| !v.is_finite()));
        columns.push(col);
    }
    DesignBundle { n, m_phi: phis.len(), m_psi: psis.len(), columns, non_finite }
}

/// Replaces one column of an existing bundle (used when a flagged basis is
/// regenerated). `j` indexes A's columns; feature-side bases occupy the first
/// m_phi slots.
pub fn replace_column(
    bundle: &mut DesignBundle,
    ds: &Dataset,
    j: usize,
    phi: Option<&PhiMatrix>,
    psi: Option<&PsiMatrix>,
    table_x: &MappingTable,
    table_y: &MappingTable,
) {
    let col: Vec<f64> = if let Some(m) = phi {
        debug_assert!(j < bundle.m_phi);
        ds.features.iter().map(|x| eval_phi(m, table_x, x)).collect()
    } else {
        let m = psi.expect("either a phi or a psi replacement");
        debug_assert!(j >= bundle.m_phi);
        ds.targets.iter().map(|&y| -eval_psi(m, table_y, y)).collect()
    };
    bundle.non_finite[j] = col.iter().any(|v| !v.is_finite());
    bundle.columns[j] = col;
}

#[allow(dead_code)]
fn _dont_care_is_skip_note() {
    // eval treats -1 in sum/product slots exactly like the skip code 0;
    // both are filtered by the `v > 0` guards above.
    let _ = DONT_CARE;
}
