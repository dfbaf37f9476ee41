//! Integer-matrix encoding of basis functions.
//!
//! A basis function on the feature side is a product of factors, one per
//! matrix row: column 1 holds a transform code, column 2 an argument-type
//! code (0 = single variable, 1 = sum, 2 = product), and the remaining n_v
//! columns hold variable codes (0 = skip, 1..=d = feature index). Target-side
//! bases are column vectors of transform codes applied to y and multiplied
//! together. Codes 0 and 1 are pinned to the constant-one and identity
//! transforms in every mapping table.

use rand::Rng;
use std::fmt;
use thiserror::Error;

/// Unary transform applied to a scalar argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Transform {
    /// Constant 1 regardless of the argument.
    One,
    Identity,
    Reciprocal,
    Square,
    Cube,
    Cos,
    Sin,
    Exp,
    Ln,
    Sqrt,
    /// a -> e^(-a)
    NegExp,
    /// a -> -a
    Neg,
    Tan,
    Tanh,
}

impl Transform {
    /// Short name used in library listings and the registry export.
    pub fn name(self) -> &'static str {
        match self {
            Transform::One => "1",
            Transform::Identity => "id",
            Transform::Reciprocal => "inv",
            Transform::Square => "sq",
            Transform::Cube => "cube",
            Transform::Cos => "cos",
            Transform::Sin => "sin",
            Transform::Exp => "exp",
            Transform::Ln => "ln",
            Transform::Sqrt => "sqrt",
            Transform::NegExp => "negexp",
            Transform::Neg => "neg",
            Transform::Tan => "tan",
            Transform::Tanh => "tanh",
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum EncodingError {
    #[error("mapping table must start with the One and Identity transforms")]
    BadTablePrefix,
    #[error("duplicate transform in mapping table")]
    DuplicateTransform,
    #[error("table dimension d must be at least 1")]
    BadDimension,
    #[error("matrix is empty")]
    EmptyMatrix,
    #[error("row {row} has {got} columns, expected {want}")]
    RowWidth { row: usize, got: usize, want: usize },
    #[error("row {row}: transform code {code} outside table")]
    BadTransform { row: usize, code: i32 },
    #[error("row {row}: argument type {code} not one of 0/1/2")]
    BadArgType { row: usize, code: i32 },
    #[error("row {row}: single-variable argument must name a variable in 1..={d}, got {code}")]
    BadSingleVariable { row: usize, code: i32, d: usize },
    #[error("row {row}: variable code {code} outside 0..={d}")]
    BadVariable { row: usize, code: i32, d: usize },
    #[error("row {row}: sum/product argument has no variables")]
    AllSkip { row: usize },
    #[error("matrix parse error: {0}")]
    Parse(String),
}

/// Per-benchmark catalog of transforms and the dimensions used when
/// generating random bases. The integer code of a transform is its position.
#[derive(Debug, Clone)]
pub struct MappingTable {
    transforms: Vec<Transform>,
    d: usize,
    n_v_min: usize,
    n_v_max: usize,
}

/// Codes drawn uniformly for the row count of a random feature-side basis.
pub const N_B_CHOICES: std::ops::RangeInclusive<usize> = 1..=3;

impl MappingTable {
    /// Builds a table. `transforms` must begin with One then Identity and
    /// contain no duplicates. Random bases draw their variable multiplicity
    /// from 2..=5.
    pub fn new(transforms: Vec<Transform>, d: usize) -> Result<Self, EncodingError> {
        if transforms.len() < 2
            || transforms[0] != Transform::One
            || transforms[1] != Transform::Identity
        {
            return Err(EncodingError::BadTablePrefix);
        }
        for (i, t) in transforms.iter().enumerate() {
            if transforms[..i].contains(t) {
                return Err(EncodingError::DuplicateTransform);
            }
        }
        if d == 0 {
            return Err(EncodingError::BadDimension);
        }
        Ok(MappingTable { transforms, d, n_v_min: 2, n_v_max: 5 })
    }

    pub fn with_n_v_range(mut self, min: usize, max: usize) -> Self {
        assert!(1 <= min && min <= max);
        self.n_v_min = min;
        self.n_v_max = max;
        self
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.transforms.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction guarantees One and Identity
    }

    pub fn transform(&self, code: usize) -> Option<Transform> {
        self.transforms.get(code).copied()
    }

    pub fn transforms(&self) -> &[Transform] {
        &self.transforms
    }

    pub fn code_of(&self, t: Transform) -> Option<usize> {
        self.transforms.iter().position(|&x| x == t)
    }

    /// All codes of the table.
    pub fn full_codes(&self) -> Vec<usize> {
        (0..self.transforms.len()).collect()
    }

    /// One, Identity, plus whichever power transforms the table carries.
    pub fn poly_codes(&self) -> Vec<usize> {
        let powers = [
            Transform::Reciprocal,
            Transform::Square,
            Transform::Cube,
            Transform::Sqrt,
        ];
        let mut codes = vec![0, 1];
        for (i, t) in self.transforms.iter().enumerate().skip(2) {
            if powers.contains(t) {
                codes.push(i);
            }
        }
        codes
    }

    /// The polynomial subset plus Cos/Sin when the table carries them.
    pub fn trig_codes(&self) -> Vec<usize> {
        let mut codes = self.poly_codes();
        for (i, t) in self.transforms.iter().enumerate().skip(2) {
            if matches!(t, Transform::Cos | Transform::Sin) {
                codes.push(i);
            }
        }
        codes.sort_unstable();
        codes
    }
}

/// Don't-care placeholder written by the canonical serialization.
pub const DONT_CARE: i32 = -1;

const ARG_SINGLE: i32 = 0;
const ARG_SUM: i32 = 1;
const ARG_PRODUCT: i32 = 2;

/// Feature-side basis matrix, n_B rows by (n_v + 2) columns.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PhiMatrix {
    rows: Vec<Vec<i32>>,
}

/// Target-side basis matrix, a column of transform codes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PsiMatrix {
    rows: Vec<i32>,
}

/// Argument of one decoded factor. Skip entries are dropped; repeated
/// variables are kept (a product argument [1, 1, 2] means x1*x1*x2).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Arg {
    Single(usize),
    Sum(Vec<usize>),
    Product(Vec<usize>),
}

/// One decoded row: either the constant factor 1 or a transform of an
/// argument built from variables.
#[derive(Debug, Clone, PartialEq)]
pub enum Factor {
    One,
    Term { transform: Transform, arg: Arg },
}

impl PhiMatrix {
    /// Takes rows verbatim; entries at don't-care positions may hold anything.
    pub fn from_rows(rows: Vec<Vec<i32>>) -> Self {
        PhiMatrix { rows }
    }

    pub fn rows(&self) -> &[Vec<i32>] {
        &self.rows
    }

    pub fn n_b(&self) -> usize {
        self.rows.len()
    }

    /// Variable-slot count, i.e. columns minus the transform and arg columns.
    pub fn n_v(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len().saturating_sub(2))
    }
}

impl PsiMatrix {
    pub fn from_rows(rows: Vec<i32>) -> Self {
        PsiMatrix { rows }
    }

    pub fn rows(&self) -> &[i32] {
        &self.rows
    }

    pub fn n_b(&self) -> usize {
        self.rows.len()
    }
}

/// Checks every structural invariant of a feature-side matrix against a
/// table. Don't-care positions (variable slots past the first for a
/// single-variable argument, and everything after a One transform) are never
/// read. In sum/product variable slots, -1 is accepted as skip.
pub fn validate_phi(m: &PhiMatrix, table: &MappingTable) -> Result<(), EncodingError> {
    if m.rows.is_empty() {
        return Err(EncodingError::EmptyMatrix);
    }
    let width = m.rows[0].len();
    if width < 3 {
        return Err(EncodingError::RowWidth { row: 0, got: width, want: 3 });
    }
    let d = table.d;
    for (i, row) in m.rows.iter().enumerate() {
        if row.len() != width {
            return Err(EncodingError::RowWidth { row: i, got: row.len(), want: width });
        }
        let t_code = row[0];
        if t_code < 0 || t_code as usize >= table.len() {
            return Err(EncodingError::BadTransform { row: i, code: t_code });
        }
        if table.transform(t_code as usize) == Some(Transform::One) {
            continue; // everything after a One transform is don't-care
        }
        match row[1] {
            ARG_SINGLE => {
                let v = row[2];
                if v < 1 || v as usize > d {
                    return Err(EncodingError::BadSingleVariable { row: i, code: v, d });
                }
            }
            ARG_SUM | ARG_PRODUCT => {
                let mut any = false;
                for &v in &row[2..] {
                    if v == DONT_CARE {
                        continue; // treated as skip
                    }
                    if v < 0 || v as usize > d {
                        return Err(EncodingError::BadVariable { row: i, code: v, d });
                    }
                    any |= v != 0;
                }
                if !any {
                    return Err(EncodingError::AllSkip { row: i });
                }
            }
            other => return Err(EncodingError::BadArgType { row: i, code: other }),
        }
    }
    Ok(())
}

/// Checks a target-side matrix: every row must be a transform code.
pub fn validate_psi(m: &PsiMatrix, table: &MappingTable) -> Result<(), EncodingError> {
    if m.rows.is_empty() {
        return Err(EncodingError::EmptyMatrix);
    }
    for (i, &code) in m.rows.iter().enumerate() {
        if code < 0 || code as usize >= table.len() {
            return Err(EncodingError::BadTransform { row: i, code });
        }
    }
    Ok(())
}

/// Decodes a valid matrix into its ordered factor list; factor r corresponds
/// to row r, and the basis function is the product of all factors.
pub fn decode_phi(m: &PhiMatrix, table: &MappingTable) -> Vec<Factor> {
    m.rows
        .iter()
        .map(|row| {
            let t = table.transform(row[0] as usize).expect("validated");
            if t == Transform::One {
                return Factor::One;
            }
            let arg = match row[1] {
                ARG_SINGLE => Arg::Single(row[2] as usize),
                kind => {
                    let vars: Vec<usize> = row[2..]
                        .iter()
                        .filter(|&&v| v > 0)
                        .map(|&v| v as usize)
                        .collect();
                    if kind == ARG_SUM {
                        Arg::Sum(vars)
                    } else {
                        Arg::Product(vars)
                    }
                }
            };
            Factor::Term { transform: t, arg }
        })
        .collect()
}

/// Decodes a valid target-side matrix into the ordered transform list.
pub fn decode_psi(m: &PsiMatrix, table: &MappingTable) -> Vec<Transform> {
    m.rows
        .iter()
        .map(|&code| table.transform(code as usize).expect("validated"))
        .collect()
}

/// Draws a random feature-side matrix. Transform codes come uniformly from
/// `allowed` (code indices into `table`); row count from {1,2,3}; variable
/// multiplicity from the table's range, independently per call. The result
/// always validates.
pub fn random_phi<R: Rng>(table: &MappingTable, allowed: &[usize], rng: &mut R) -> PhiMatrix {
    assert!(!allowed.is_empty());
    let n_b = rng.gen_range(N_B_CHOICES);
    let n_v = rng.gen_range(table.n_v_min..=table.n_v_max);
    let d = table.d;
    let mut rows = Vec::with_capacity(n_b);
    for _ in 0..n_b {
        let mut row = vec![DONT_CARE; n_v + 2];
        let code = allowed[rng.gen_range(0..allowed.len())];
        row[0] = code as i32;
        if table.transform(code) == Some(Transform::One) {
            rows.push(row);
            continue;
        }
        let arg = rng.gen_range(0..=2);
        row[1] = arg;
        if arg == ARG_SINGLE {
            row[2] = rng.gen_range(1..=d) as i32;
        } else {
            // resample until at least one variable slot is non-skip
            loop {
                let mut any = false;
                for slot in row[2..].iter_mut() {
                    let v = rng.gen_range(0..=d) as i32;
                    *slot = v;
                    any |= v != 0;
                }
                if any {
                    break;
                }
            }
        }
        rows.push(row);
    }
    PhiMatrix { rows }
}

/// Draws a single-row target-side matrix uniformly from `allowed`.
/// `exclude_one` removes the constant transform from the draw (used when the
/// individual has only one target basis, which must not be constant).
pub fn random_psi<R: Rng>(
    table: &MappingTable,
    allowed: &[usize],
    exclude_one: bool,
    rng: &mut R,
) -> PsiMatrix {
    let pool: Vec<usize> = allowed
        .iter()
        .copied()
        .filter(|&c| !(exclude_one && table.transform(c) == Some(Transform::One)))
        .collect();
    let code = if pool.is_empty() { 1 } else { pool[rng.gen_range(0..pool.len())] };
    PsiMatrix { rows: vec![code as i32] }
}

// ---------------------------------------------------------------------------
// Infix rendering

fn var_name(v: usize) -> String {
    format!("x{v}")
}

fn arg_string(arg: &Arg) -> (String, bool) {
    // second component: argument is composite (needs parentheses under ^)
    match arg {
        Arg::Single(v) => (var_name(*v), false),
        Arg::Sum(vs) => {
            let s = vs.iter().map(|&v| var_name(v)).collect::<Vec<_>>().join("+");
            (s, vs.len() > 1)
        }
        Arg::Product(vs) => {
            let s = vs.iter().map(|&v| var_name(v)).collect::<Vec<_>>().join("*");
            (s, vs.len() > 1)
        }
    }
}

fn transform_string(t: Transform, arg: &str, composite: bool) -> String {
    let wrapped = if composite { format!("({arg})") } else { arg.to_string() };
    match t {
        Transform::One => "1".to_string(),
        Transform::Identity => wrapped,
        Transform::Reciprocal => format!("{wrapped}^-1"),
        Transform::Square => format!("{wrapped}^2"),
        Transform::Cube => format!("{wrapped}^3"),
        Transform::Cos => format!("cos({arg})"),
        Transform::Sin => format!("sin({arg})"),
        Transform::Exp => format!("exp({arg})"),
        Transform::Ln => format!("ln({arg})"),
        Transform::Sqrt => format!("sqrt({arg})"),
        Transform::NegExp => format!("exp(-{wrapped})"),
        Transform::Neg => format!("(-{wrapped})"),
        Transform::Tan => format!("tan({arg})"),
        Transform::Tanh => format!("tanh({arg})"),
    }
}

/// Infix text of a decoded feature-side basis, e.g. "x2*cos(x1*x1*x2)*ln(x1+x3)".
/// Constant factors are dropped unless the whole basis is constant.
pub fn phi_to_string(factors: &[Factor]) -> String {
    let parts: Vec<String> = factors
        .iter()
        .filter_map(|f| match f {
            Factor::One => None,
            Factor::Term { transform, arg } => {
                let (a, composite) = arg_string(arg);
                Some(transform_string(*transform, &a, composite))
            }
        })
        .collect();
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

/// Infix text of a target-side basis, e.g. "ln(y)" or "y^3*sqrt(y)".
pub fn psi_to_string(transforms: &[Transform]) -> String {
    let parts: Vec<String> = transforms
        .iter()
        .filter(|&&t| t != Transform::One)
        .map(|&t| transform_string(t, "y", false))
        .collect();
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

/// One weighted term, e.g. "0.89442*sin(x1)*cos(x2)" or "-0.26970*x1".
pub fn term_to_string(coefficient: f64, basis: &str) -> String {
    format!("{coefficient:.5}*{basis}")
}

// ---------------------------------------------------------------------------
// Text serialization
//
// Format: header "phi n_B n_v d" or "psi n_B", then one row per line with
// space-separated integers; don't-care entries are written as -1.

/// Canonical text form of a feature-side matrix (don't-care positions forced
/// to -1 so equal functions serialize equally regardless of junk entries).
pub fn write_phi(m: &PhiMatrix, table: &MappingTable) -> String {
    let mut out = format!("phi {} {} {}\n", m.n_b(), m.n_v(), table.d);
    for row in &m.rows {
        let mut canon = vec![DONT_CARE; row.len()];
        canon[0] = row[0];
        let is_one = table.transform(row[0] as usize) == Some(Transform::One);
        if !is_one {
            canon[1] = row[1];
            if row[1] == ARG_SINGLE {
                canon[2] = row[2];
            } else {
                for (slot, &v) in canon[2..].iter_mut().zip(&row[2..]) {
                    *slot = if v == DONT_CARE { 0 } else { v };
                }
            }
        }
        let line: Vec<String> = canon.iter().map(|v| v.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn write_psi(m: &PsiMatrix) -> String {
    let mut out = format!("psi {}\n", m.n_b());
    for &code in &m.rows {
        out.push_str(&code.to_string());
        out.push('\n');
    }
    out
}

/// Parses the feature-side text form; returns the matrix and the declared d.
pub fn parse_phi(text: &str) -> Result<(PhiMatrix, usize), EncodingError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| EncodingError::Parse("empty input".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 || fields[0] != "phi" {
        return Err(EncodingError::Parse(format!("bad header {header:?}")));
    }
    let n_b: usize = fields[1].parse().map_err(|_| EncodingError::Parse("bad n_B".into()))?;
    let n_v: usize = fields[2].parse().map_err(|_| EncodingError::Parse("bad n_v".into()))?;
    let d: usize = fields[3].parse().map_err(|_| EncodingError::Parse("bad d".into()))?;
    let mut rows = Vec::with_capacity(n_b);
    for _ in 0..n_b {
        let line = lines.next().ok_or_else(|| EncodingError::Parse("missing row".into()))?;
        let row: Result<Vec<i32>, _> = line.split_whitespace().map(str::parse).collect();
        let row = row.map_err(|_| EncodingError::Parse(format!("bad row {line:?}")))?;
        if row.len() != n_v + 2 {
            return Err(EncodingError::Parse(format!(
                "row width {} != n_v + 2 = {}",
                row.len(),
                n_v + 2
            )));
        }
        rows.push(row);
    }
    Ok((PhiMatrix { rows }, d))
}

pub fn parse_psi(text: &str) -> Result<PsiMatrix, EncodingError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| EncodingError::Parse("empty input".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 2 || fields[0] != "psi" {
        return Err(EncodingError::Parse(format!("bad header {header:?}")));
    }
    let n_b: usize = fields[1].parse().map_err(|_| EncodingError::Parse("bad n_B".into()))?;
    let mut rows = Vec::with_capacity(n_b);
    for _ in 0..n_b {
        let line = lines.next().ok_or_else(|| EncodingError::Parse("missing row".into()))?;
        let code: i32 =
            line.trim().parse().map_err(|_| EncodingError::Parse(format!("bad row {line:?}")))?;
        rows.push(code);
    }
    Ok(PsiMatrix { rows })
}

impl fmt::Display for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
