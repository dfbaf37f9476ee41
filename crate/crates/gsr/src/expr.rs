//! Relation-level expression text: writing a fitted relation as
//! "g-side = f-side" infix, parsing such text back into basis matrices for
//! verification, and checking that printed coefficient vectors are unit-norm
//! up to their printed precision.

use crate::encoding::{
    decode_phi, decode_psi, phi_to_string, psi_to_string, term_to_string, validate_phi,
    validate_psi, EncodingError, MappingTable, PhiMatrix, PsiMatrix, Transform, DONT_CARE,
};
use thiserror::Error;

/// Terms with |coefficient| below this are dropped from printed relations
/// (each side keeps at least its largest term).
pub const DISPLAY_EPS: f64 = 1e-5;

#[derive(Debug, Error, PartialEq)]
pub enum ExprError {
    #[error("unexpected end of expression")]
    UnexpectedEnd,
    #[error("unexpected {0:?} at byte {1}")]
    Unexpected(String, usize),
    #[error("unknown symbol {0:?}")]
    UnknownSymbol(String),
    #[error("a relation must contain exactly one '='")]
    EqualsCount,
    #[error("{0:?} is not allowed on the {1} side")]
    SideSymbol(String, &'static str),
    #[error("power {0} is not supported (only ^2, ^3, ^-1)")]
    Power(i64),
    #[error("transform {0:?} required by the expression is not in the library")]
    MissingTransform(&'static str),
    #[error("an argument must be a single variable, a pure sum, or a pure product")]
    MixedArg,
    #[error(transparent)]
    Encoding(#[from] EncodingError),
}

// ---------------------------------------------------------------------------
// Writing

/// Renders a fitted relation, target side left, e.g.
/// "0.44721*y = 0.89442*sin(x1)*cos(x2)". `w` holds the feature-side
/// coefficients followed by the target-side ones.
pub fn relation_string(
    phis: &[PhiMatrix],
    psis: &[PsiMatrix],
    w: &[f64],
    table_x: &MappingTable,
    table_y: &MappingTable,
) -> String {
    assert_eq!(w.len(), phis.len() + psis.len());
    let (alphas, betas) = w.split_at(phis.len());
    let left = join_terms(
        kept_indices(betas)
            .into_iter()
            .map(|j| (betas[j], psi_to_string(&decode_psi(&psis[j], table_y)))),
    );
    let right = join_terms(
        kept_indices(alphas)
            .into_iter()
            .map(|i| (alphas[i], phi_to_string(&decode_phi(&phis[i], table_x)))),
    );
    format!("{left} = {right}")
}

fn kept_indices(coefs: &[f64]) -> Vec<usize> {
    let kept: Vec<usize> =
        (0..coefs.len()).filter(|&i| coefs[i].abs() >= DISPLAY_EPS).collect();
    if !kept.is_empty() {
        return kept;
    }
    // every coefficient is negligible: keep the largest so the side reads back
    (0..coefs.len())
        .max_by(|&a, &b| coefs[a].abs().total_cmp(&coefs[b].abs()))
        .into_iter()
        .collect()
}

fn join_terms(terms: impl Iterator<Item = (f64, String)>) -> String {
    let mut out = String::new();
    for (c, basis) in terms {
        if out.is_empty() {
            out = term_to_string(c, &basis);
        } else if c < 0.0 {
            out.push_str(" - ");
            out.push_str(&term_to_string(-c, &basis));
        } else {
            out.push_str(" + ");
            out.push_str(&term_to_string(c, &basis));
        }
    }
    if out.is_empty() {
        "0".to_string()
    } else {
        out
    }
}

// ---------------------------------------------------------------------------
// Parsing

/// A relation parsed from text, in the same layout the solver produces.
#[derive(Debug, Clone)]
pub struct ParsedRelation {
    pub phis: Vec<PhiMatrix>,
    pub psis: Vec<PsiMatrix>,
    /// Feature-side coefficients then target-side ones.
    pub w: Vec<f64>,
    /// Printed decimal places per coefficient, aligned with `w`.
    pub decimals: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64, usize), // value, printed decimals
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    Eq,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let tok = match c {
            ' ' | '\t' | '\r' | '\n' => {
                i += 1;
                continue;
            }
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '=' => Tok::Eq,
            '0'..='9' | '.' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let mut decimals = 0;
                if i < chars.len() && chars[i] == '.' {
                    i += 1;
                    let frac_start = i;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    decimals = i - frac_start;
                }
                let text: String = chars[start..i].iter().collect();
                let value: f64 = text
                    .parse()
                    .map_err(|_| ExprError::Unexpected(text.clone(), start))?;
                out.push((Tok::Num(value, decimals), start));
                continue;
            }
            'a'..='z' | 'A'..='Z' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), start));
                continue;
            }
            other => return Err(ExprError::Unexpected(other.to_string(), i)),
        };
        out.push((tok, i));
        i += 1;
    }
    Ok(out)
}

/// Argument of one parsed factor (variable indices, 1-based).
#[derive(Debug, Clone)]
enum ArgIr {
    Single(usize),
    Sum(Vec<usize>),
    Product(Vec<usize>),
}

impl ArgIr {
    fn width(&self) -> usize {
        match self {
            ArgIr::Single(_) => 1,
            ArgIr::Sum(v) | ArgIr::Product(v) => v.len(),
        }
    }
}

struct Parser<'a> {
    toks: &'a [(Tok, usize)],
    k: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Tok> {
        self.toks.get(self.k).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.k).map_or(usize::MAX, |&(_, p)| p)
    }

    fn bump(&mut self) -> Option<&'a Tok> {
        let t = self.peek();
        self.k += 1;
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.k += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok) -> Result<(), ExprError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.unexpected())
        }
    }

    fn unexpected(&self) -> ExprError {
        match self.peek() {
            Some(t) => ExprError::Unexpected(format!("{t:?}"), self.pos()),
            None => ExprError::UnexpectedEnd,
        }
    }
}

fn func_transform(name: &str) -> Option<Transform> {
    Some(match name {
        "sin" => Transform::Sin,
        "cos" => Transform::Cos,
        "exp" => Transform::Exp,
        "ln" => Transform::Ln,
        "sqrt" => Transform::Sqrt,
        "tan" => Transform::Tan,
        "tanh" => Transform::Tanh,
        _ => return None,
    })
}

/// "x" (alias of x1) or "x<digits>" → variable index.
fn var_index(name: &str) -> Option<usize> {
    let rest = name.strip_prefix('x')?;
    if rest.is_empty() {
        return Some(1);
    }
    rest.parse().ok().filter(|&v| v >= 1)
}

/// One term of a side: a signed coefficient (with its printed decimals) and
/// the factor rows it multiplies, in row form shared by both sides.
struct RawTerm {
    coef: f64,
    decimals: usize,
    factors: Vec<(Transform, Option<ArgIr>)>, // None argument = target side y
}

fn parse_side(
    toks: &[(Tok, usize)],
    y_side: bool,
    table: &MappingTable,
) -> Result<Vec<RawTerm>, ExprError> {
    let mut p = Parser { toks, k: 0 };
    let mut terms = Vec::new();
    let mut sign = 1.0;
    if p.eat(&Tok::Minus) {
        sign = -1.0;
    } else {
        p.eat(&Tok::Plus);
    }
    loop {
        terms.push(parse_term(&mut p, y_side, sign, table)?);
        match p.bump() {
            Some(Tok::Plus) => sign = 1.0,
            Some(Tok::Minus) => sign = -1.0,
            None => break,
            Some(_) => {
                p.k -= 1;
                return Err(p.unexpected());
            }
        }
    }
    // a side written as the single term "0" stands for no terms at all
    if terms.len() == 1 && terms[0].factors.is_empty() && terms[0].coef == 0.0 {
        terms.clear();
    }
    Ok(terms)
}

fn parse_term(
    p: &mut Parser,
    y_side: bool,
    sign: f64,
    table: &MappingTable,
) -> Result<RawTerm, ExprError> {
    let mut coef = sign;
    let mut decimals = None;
    let mut factors: Vec<(Transform, Option<ArgIr>)> = Vec::new();
    loop {
        match p.peek() {
            Some(Tok::Num(v, d)) => {
                coef *= v;
                decimals.get_or_insert(*d);
                p.k += 1;
            }
            _ => factors.extend(parse_factor(p, y_side, table)?),
        }
        if !p.eat(&Tok::Star) {
            break;
        }
    }
    Ok(RawTerm { coef, decimals: decimals.unwrap_or(0), factors })
}

/// One multiplicative factor, expanded to the rows that realize it (powers
/// become row repetition unless a dedicated transform exists).
fn parse_factor(
    p: &mut Parser,
    y_side: bool,
    table: &MappingTable,
) -> Result<Vec<(Transform, Option<ArgIr>)>, ExprError> {
    let side_name = if y_side { "target" } else { "feature" };
    let base: (Transform, Option<ArgIr>) = match p.bump() {
        Some(Tok::Ident(name)) => {
            if let Some(func) = func_transform(name) {
                p.expect(&Tok::LParen)?;
                let negated = p.eat(&Tok::Minus);
                let func = match (negated, func) {
                    (false, f) => f,
                    (true, Transform::Exp) => Transform::NegExp,
                    (true, _) => return Err(p.unexpected()),
                };
                let arg = if negated && p.eat(&Tok::LParen) {
                    let inner = parse_arg(p, y_side)?;
                    p.expect(&Tok::RParen)?;
                    inner
                } else {
                    parse_arg(p, y_side)?
                };
                p.expect(&Tok::RParen)?;
                (func, arg)
            } else if name == "y" {
                if !y_side {
                    return Err(ExprError::SideSymbol(name.clone(), side_name));
                }
                (Transform::Identity, None)
            } else if let Some(v) = var_index(name) {
                if y_side {
                    return Err(ExprError::SideSymbol(name.clone(), side_name));
                }
                (Transform::Identity, Some(ArgIr::Single(v)))
            } else {
                return Err(ExprError::UnknownSymbol(name.clone()));
            }
        }
        Some(Tok::LParen) => {
            let negated = p.eat(&Tok::Minus);
            let arg = if negated && p.eat(&Tok::LParen) {
                let inner = parse_arg(p, y_side)?;
                p.expect(&Tok::RParen)?;
                inner
            } else {
                parse_arg(p, y_side)?
            };
            p.expect(&Tok::RParen)?;
            let t = if negated { Transform::Neg } else { Transform::Identity };
            if negated && table.code_of(Transform::Neg).is_none() {
                return Err(ExprError::MissingTransform(Transform::Neg.name()));
            }
            (t, arg)
        }
        _ => {
            p.k -= 1;
            return Err(p.unexpected());
        }
    };
    if p.eat(&Tok::Caret) {
        let negative = p.eat(&Tok::Minus);
        let power = match p.bump() {
            Some(Tok::Num(v, 0)) if v.fract() == 0.0 => {
                let k = *v as i64;
                if negative {
                    -k
                } else {
                    k
                }
            }
            _ => {
                p.k -= 1;
                return Err(p.unexpected());
            }
        };
        return apply_power(base, power, table);
    }
    Ok(vec![base])
}

fn apply_power(
    base: (Transform, Option<ArgIr>),
    power: i64,
    table: &MappingTable,
) -> Result<Vec<(Transform, Option<ArgIr>)>, ExprError> {
    match power {
        2 | 3 => {
            if base.0 == Transform::Identity {
                let t = if power == 2 { Transform::Square } else { Transform::Cube };
                if table.code_of(t).is_some() {
                    return Ok(vec![(t, base.1)]);
                }
            }
            // fall back to row repetition: the rows of a basis multiply
            Ok(std::iter::repeat(base).take(power as usize).collect())
        }
        -1 => {
            if base.0 == Transform::Identity && table.code_of(Transform::Reciprocal).is_some()
            {
                Ok(vec![(Transform::Reciprocal, base.1)])
            } else {
                Err(ExprError::MissingTransform(Transform::Reciprocal.name()))
            }
        }
        other => Err(ExprError::Power(other)),
    }
}

/// Function/parenthesis argument: "y" on the target side; a variable, pure
/// sum, or pure product of variables on the feature side.
fn parse_arg(p: &mut Parser, y_side: bool) -> Result<Option<ArgIr>, ExprError> {
    if y_side {
        match p.bump() {
            Some(Tok::Ident(name)) if name == "y" => return Ok(None),
            _ => {
                p.k -= 1;
                return Err(p.unexpected());
            }
        }
    }
    let first = parse_var(p)?;
    let mut vars = vec![first];
    let op = match p.peek() {
        Some(Tok::Plus) => Some(Tok::Plus),
        Some(Tok::Star) => Some(Tok::Star),
        _ => return Ok(Some(ArgIr::Single(first))),
    };
    let op = op.unwrap();
    while p.eat(&op) {
        vars.push(parse_var(p)?);
    }
    // a mixed chain would leave the other operator pending before ')'
    if matches!(p.peek(), Some(Tok::Plus) | Some(Tok::Star)) {
        return Err(ExprError::MixedArg);
    }
    Ok(Some(if op == Tok::Plus { ArgIr::Sum(vars) } else { ArgIr::Product(vars) }))
}

fn parse_var(p: &mut Parser) -> Result<usize, ExprError> {
    match p.bump() {
        Some(Tok::Ident(name)) => {
            var_index(name).ok_or_else(|| ExprError::UnknownSymbol(name.clone()))
        }
        _ => {
            p.k -= 1;
            Err(p.unexpected())
        }
    }
}

fn pack_phi(term: &RawTerm, table: &MappingTable) -> Result<PhiMatrix, ExprError> {
    if term.factors.is_empty() {
        // a bare constant is the One basis
        let one = PhiMatrix::from_rows(vec![vec![0, DONT_CARE, DONT_CARE]]);
        return Ok(one);
    }
    let n_v = term.factors.iter().map(|(_, a)| a.as_ref().unwrap().width()).max().unwrap();
    let mut rows = Vec::with_capacity(term.factors.len());
    for (t, arg) in &term.factors {
        let code = table
            .code_of(*t)
            .ok_or(ExprError::MissingTransform(t.name()))? as i32;
        let mut row = vec![DONT_CARE; n_v + 2];
        row[0] = code;
        match arg.as_ref().unwrap() {
            ArgIr::Single(v) => {
                row[1] = 0;
                row[2] = *v as i32;
            }
            ArgIr::Sum(vs) | ArgIr::Product(vs) => {
                row[1] = if matches!(arg, Some(ArgIr::Sum(_))) { 1 } else { 2 };
                for (slot, &v) in row[2..].iter_mut().zip(vs) {
                    *slot = v as i32;
                }
                for slot in row[2 + vs.len()..].iter_mut() {
                    *slot = 0; // skip
                }
            }
        }
        rows.push(row);
    }
    let m = PhiMatrix::from_rows(rows);
    validate_phi(&m, table)?;
    Ok(m)
}

fn pack_psi(term: &RawTerm, table: &MappingTable) -> Result<PsiMatrix, ExprError> {
    let codes: Result<Vec<i32>, ExprError> = if term.factors.is_empty() {
        Ok(vec![0]) // bare constant: the One transform
    } else {
        term.factors
            .iter()
            .map(|(t, _)| {
                table
                    .code_of(*t)
                    .map(|c| c as i32)
                    .ok_or(ExprError::MissingTransform(t.name()))
            })
            .collect()
    };
    let m = PsiMatrix::from_rows(codes?);
    validate_psi(&m, table)?;
    Ok(m)
}

/// Parses "g-side = f-side" into basis matrices and a coefficient vector in
/// design layout. A side written as "0" yields no bases for that side.
pub fn parse_relation(
    text: &str,
    table_x: &MappingTable,
    table_y: &MappingTable,
) -> Result<ParsedRelation, ExprError> {
    let toks = tokenize(text)?;
    let eq_count = toks.iter().filter(|(t, _)| *t == Tok::Eq).count();
    if eq_count != 1 {
        return Err(ExprError::EqualsCount);
    }
    let split = toks.iter().position(|(t, _)| *t == Tok::Eq).unwrap();
    let y_terms = parse_side(&toks[..split], true, table_y)?;
    let x_terms = parse_side(&toks[split + 1..], false, table_x)?;

    let mut phis = Vec::new();
    let mut psis = Vec::new();
    let mut w = Vec::new();
    let mut decimals = Vec::new();
    for term in &x_terms {
        phis.push(pack_phi(term, table_x)?);
        w.push(term.coef);
        decimals.push(term.decimals);
    }
    for term in &y_terms {
        psis.push(pack_psi(term, table_y)?);
        w.push(term.coef);
        decimals.push(term.decimals);
    }
    Ok(ParsedRelation { phis, psis, w, decimals })
}

// ---------------------------------------------------------------------------
// Unit-norm checking

/// Whether a printed coefficient vector is a unit vector up to its printed
/// precision. Printed values are rounded (or truncated) decimals, so the raw
/// norm deviates from 1 by up to an ulp of the coarsest coefficient; the
/// check therefore normalizes and asks whether normalization moves any
/// coefficient by more than 1.5 ulp at its own printed precision.
#[derive(Debug, Clone, serde::Serialize)]
pub struct UnitNormReport {
    pub norm: f64,
    /// |norm - 1| of the vector exactly as printed.
    pub raw_deviation: f64,
    /// |norm - 1| after normalization (numerically zero for any valid input).
    pub normalized_deviation: f64,
    /// True when the printed values are the normalized vector to print
    /// precision, i.e. the author printed a unit vector.
    pub print_consistent: bool,
}

pub fn unit_norm_check(w: &[f64], decimals: &[usize]) -> UnitNormReport {
    assert_eq!(w.len(), decimals.len());
    let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return UnitNormReport {
            norm,
            raw_deviation: 1.0,
            normalized_deviation: f64::INFINITY,
            print_consistent: false,
        };
    }
    let unit: Vec<f64> = w.iter().map(|v| v / norm).collect();
    let normalized_deviation =
        (unit.iter().map(|v| v * v).sum::<f64>().sqrt() - 1.0).abs();
    let print_consistent = w
        .iter()
        .zip(&unit)
        .zip(decimals)
        .all(|((&printed, &exact), &d)| {
            (printed - exact).abs() <= 1.5 * 10f64.powi(-(d as i32))
        });
    UnitNormReport {
        norm,
        raw_deviation: (norm - 1.0).abs(),
        normalized_deviation,
        print_consistent,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{random_phi, random_psi};
    use crate::eval::{eval_phi, eval_psi};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn table_x(d: usize) -> MappingTable {
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

    fn table_y() -> MappingTable {
        MappingTable::new(
            vec![Transform::One, Transform::Identity, Transform::Exp, Transform::Ln],
            1,
        )
        .unwrap()
    }

    fn rich_table(d: usize) -> MappingTable {
        MappingTable::new(
            vec![
                Transform::One,
                Transform::Identity,
                Transform::Reciprocal,
                Transform::Square,
                Transform::Cube,
                Transform::Sqrt,
                Transform::Cos,
                Transform::Sin,
                Transform::Exp,
                Transform::Ln,
                Transform::NegExp,
                Transform::Neg,
                Transform::Tan,
                Transform::Tanh,
            ],
            d,
        )
        .unwrap()
    }

    #[test]
    fn writer_matches_the_published_style() {
        let tx = table_x(2);
        let ty = table_y();
        let phis = vec![PhiMatrix::from_rows(vec![vec![3, 0, 1, -1], vec![2, 0, 2, -1]])];
        let psis = vec![PsiMatrix::from_rows(vec![1])];
        let text = relation_string(&phis, &psis, &[0.89442, 0.44721], &tx, &ty);
        assert_eq!(text, "0.44721*y = 0.89442*sin(x1)*cos(x2)");
    }

    #[test]
    fn constant_basis_prints_as_coefficient_times_one() {
        let tx = table_x(1);
        let ty = table_y();
        let phis = vec![PhiMatrix::from_rows(vec![vec![0, -1, -1]])];
        let psis = vec![PsiMatrix::from_rows(vec![1])];
        let text = relation_string(&phis, &psis, &[0.5, -1.0], &tx, &ty);
        assert_eq!(text, "-1.00000*y = 0.50000*1");
    }

    #[test]
    fn small_terms_are_dropped_but_each_side_keeps_one() {
        let tx = table_x(2);
        let ty = table_y();
        let phis = vec![
            PhiMatrix::from_rows(vec![vec![1, 0, 1, -1]]),
            PhiMatrix::from_rows(vec![vec![1, 0, 2, -1]]),
        ];
        let psis = vec![PsiMatrix::from_rows(vec![1])];
        let text = relation_string(&phis, &psis, &[0.7, 1e-9, -0.7], &tx, &ty);
        assert_eq!(text, "-0.70000*y = 0.70000*x1");
        // all-negligible side: the largest survives so the text stays a relation
        let text = relation_string(&phis, &psis, &[1e-9, 3e-9, 1.0], &tx, &ty);
        assert_eq!(text, "1.00000*y = 0.00000*x2");
    }

    #[test]
    fn negative_follow_up_terms_use_minus_joins() {
        let tx = table_x(2);
        let ty = table_y();
        let phis = vec![
            PhiMatrix::from_rows(vec![vec![3, 0, 1, -1]]),
            PhiMatrix::from_rows(vec![vec![3, 0, 2, -1]]),
        ];
        let psis = vec![PsiMatrix::from_rows(vec![1])];
        let text = relation_string(&phis, &psis, &[-0.57735, -0.57735, -0.57735], &tx, &ty);
        assert_eq!(text, "-0.57735*y = -0.57735*sin(x1) - 0.57735*sin(x2)");
    }

    /// The four published relations the verifier must accept, evaluated
    /// against their simplified forms on random points.
    #[test]
    fn published_relations_parse_and_evaluate() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        struct Case {
            text: &'static str,
            d: usize,
            // (f(x), g(y)) closed forms of the printed sides
            f: fn(&[f64]) -> f64,
            g: fn(f64) -> f64,
        }
        let cases = [
            Case {
                text: "0.83654*ln(y) = -0.032175*ln(x*x*x*x) + 0.54697*ln(x)",
                d: 1,
                f: |x| -0.032175 * (x[0] * x[0] * x[0] * x[0]).ln() + 0.54697 * x[0].ln(),
                g: |y| 0.83654 * y.ln(),
            },
            Case {
                text: "0.44721*y = 0.89442*sin(x1)*cos(x2)",
                d: 2,
                f: |x| 0.89442 * x[0].sin() * x[1].cos(),
                g: |y| 0.44721 * y,
            },
            Case {
                text: "0.70711*ln(y) = 0.70711*x2*ln(x1)",
                d: 2,
                f: |x| 0.70711 * x[1] * x[0].ln(),
                g: |y| 0.70711 * y.ln(),
            },
            Case {
                text: "0.83205*ln(y) = -0.5547*ln(x1+x2+x1)",
                d: 2,
                f: |x| -0.5547 * (x[0] + x[1] + x[0]).ln(),
                g: |y| 0.83205 * y.ln(),
            },
        ];
        for case in cases {
            let tx = table_x(case.d);
            let ty = table_y();
            let rel = parse_relation(case.text, &tx, &ty).unwrap();
            assert_eq!(rel.w.len(), rel.phis.len() + rel.psis.len());
            for _ in 0..100 {
                let x: Vec<f64> = (0..case.d).map(|_| rng.gen_range(0.1..2.0)).collect();
                let y: f64 = rng.gen_range(0.1..2.0);
                let f_parsed: f64 = rel
                    .phis
                    .iter()
                    .zip(&rel.w)
                    .map(|(m, c)| c * eval_phi(m, &tx, &x))
                    .sum();
                let g_parsed: f64 = rel
                    .psis
                    .iter()
                    .zip(&rel.w[rel.phis.len()..])
                    .map(|(m, c)| c * eval_psi(m, &ty, y))
                    .sum();
                assert!(((case.f)(&x) - f_parsed).abs() <= 1e-12, "{}", case.text);
                assert!(((case.g)(y) - g_parsed).abs() <= 1e-12, "{}", case.text);
            }
        }
    }

    #[test]
    fn printed_vectors_are_unit_norm_at_print_precision_only() {
        let tx = table_x(2);
        let ty = table_y();
        let rel =
            parse_relation("0.44721*y = 0.89442*sin(x1)*cos(x2)", &tx, &ty).unwrap();
        let report = unit_norm_check(&rel.w, &rel.decimals);
        // five printed decimals cannot carry 1e-6: the raw deviation is ~8e-6
        assert!(report.raw_deviation > 1e-6 && report.raw_deviation < 2e-5);
        assert!(report.normalized_deviation <= 1e-6);
        assert!(report.print_consistent);

        // a scaled (non-unit) vector is flagged even though it parses fine
        let rel = parse_relation("2.0*y = 4.0*sin(x1)*cos(x2)", &tx, &ty).unwrap();
        let report = unit_norm_check(&rel.w, &rel.decimals);
        assert!(!report.print_consistent);
        assert!(report.raw_deviation > 1.0);
    }

    #[test]
    fn zero_side_parses_to_no_bases() {
        let tx = table_x(1);
        let ty = table_y();
        let rel = parse_relation("0.5*y = 0", &tx, &ty).unwrap();
        assert!(rel.phis.is_empty());
        assert_eq!(rel.psis.len(), 1);
        assert_eq!(rel.w, vec![0.5]);
    }

    #[test]
    fn powers_lower_to_transforms_or_row_repetition() {
        let rich = rich_table(2);
        let plain = table_x(2);
        let ty = table_y();
        let mut rng = ChaCha8Rng::seed_from_u64(3);

        // with Square/Cube/Reciprocal in the table the power becomes one row
        let rel = parse_relation("0.1*y = 0.2*x1^2 + 0.3*(x1+x2)^3 + 0.4*x2^-1", &rich, &ty)
            .unwrap();
        assert_eq!(rel.phis[0].n_b(), 1);
        assert_eq!(rel.phis[1].n_b(), 1);
        assert_eq!(rel.phis[2].n_b(), 1);

        // without them the rows repeat; values must agree between the two
        let lowered =
            parse_relation("0.1*y = 0.2*x1^2 + 0.3*(x1+x2)^3", &plain, &ty).unwrap();
        assert_eq!(lowered.phis[0].n_b(), 2);
        assert_eq!(lowered.phis[1].n_b(), 3);
        for _ in 0..100 {
            let x = [rng.gen_range(0.1..2.0), rng.gen_range(0.1..2.0)];
            for j in 0..2 {
                let a = eval_phi(&rel.phis[j], &rich, &x);
                let b = eval_phi(&lowered.phis[j], &plain, &x);
                assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
            }
        }

        // a reciprocal power with no Reciprocal transform cannot be lowered
        assert!(matches!(
            parse_relation("0.1*y = 0.4*x2^-1", &plain, &ty),
            Err(ExprError::MissingTransform(_))
        ));

        // powers of function factors repeat the row
        let rel = parse_relation("0.1*y = 0.2*sin(x1)^2", &plain, &ty).unwrap();
        assert_eq!(rel.phis[0].n_b(), 2);
        let x = [0.7, 0.0];
        let v = eval_phi(&rel.phis[0], &plain, &x);
        assert!((v - 0.7f64.sin().powi(2)).abs() <= 1e-15);
    }

    #[test]
    fn malformed_relations_are_rejected() {
        let tx = table_x(2);
        let ty = table_y();
        let bad = [
            "0.5*y = sin(",                  // unbalanced
            "0.5*y = 0.3*sinh(x1)",          // unknown function
            "0.5*y = 0.3*z1",                // unknown symbol
            "0.5*y = 0.3*x3",                // variable out of range for d = 2
            "0.5*y = 0.3*x1 = 0.2*x2",       // two equals signs
            "0.5*x1 = 0.3*x1",               // variable on the target side
            "0.5*y = 0.3*y",                 // target on the feature side
            "0.5*y = 0.3*ln(x1*x2+x1)",      // mixed argument
            "0.5*y = 0.3*x1^5",              // unsupported power
            "0.5*y = 0.3*exp(-x1)",          // NegExp not in this library
            "",                              // no relation at all
        ];
        for text in bad {
            assert!(
                parse_relation(text, &tx, &ty).is_err(),
                "{text:?} unexpectedly parsed"
            );
        }
    }

    /// Writer output parses back to the same values (coefficients at print
    /// precision, structure exactly).
    #[test]
    fn written_relations_round_trip_through_the_parser() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for case in 0..200 {
            let d = rng.gen_range(1..=3);
            let tx = rich_table(d);
            let ty = MappingTable::new(
                vec![
                    Transform::One,
                    Transform::Identity,
                    Transform::Exp,
                    Transform::Ln,
                    Transform::Reciprocal,
                    Transform::Square,
                    Transform::NegExp,
                ],
                1,
            )
            .unwrap();
            let m_phi = rng.gen_range(1..=3);
            let phis: Vec<PhiMatrix> = (0..m_phi)
                .map(|_| random_phi(&tx, &tx.full_codes(), &mut rng))
                .collect();
            let psis = vec![random_psi(&ty, &ty.full_codes(), true, &mut rng)];
            // keep every coefficient printable (above the display threshold)
            let w: Vec<f64> = (0..=m_phi)
                .map(|_| {
                    let mag = rng.gen_range(0.01..1.0);
                    if rng.gen_bool(0.5) {
                        mag
                    } else {
                        -mag
                    }
                })
                .collect();
            let text = relation_string(&phis, &psis, &w, &tx, &ty);
            let rel = parse_relation(&text, &tx, &ty)
                .unwrap_or_else(|e| panic!("case {case}: {e} in {text:?}"));
            // quantize the original coefficients exactly as the writer prints
            let printed: Vec<f64> =
                w.iter().map(|c| format!("{c:.5}").parse().unwrap()).collect();
            for probe in 0..20 {
                let x: Vec<f64> = (0..d).map(|_| rng.gen_range(0.1..1.5)).collect();
                let y: f64 = rng.gen_range(0.1..1.5);
                let f_orig: f64 = phis
                    .iter()
                    .zip(&printed)
                    .map(|(m, c)| c * eval_phi(m, &tx, &x))
                    .sum();
                let g_orig = printed[m_phi] * eval_psi(&psis[0], &ty, y);
                let f_new: f64 = rel
                    .phis
                    .iter()
                    .zip(&rel.w)
                    .map(|(m, c)| c * eval_phi(m, &tx, &x))
                    .sum();
                let g_new: f64 = rel
                    .psis
                    .iter()
                    .zip(&rel.w[rel.phis.len()..])
                    .map(|(m, c)| c * eval_psi(m, &ty, y))
                    .sum();
                let close = |a: f64, b: f64| {
                    (a.is_finite(), b.is_finite()) == (false, false)
                        || (a - b).abs() <= 1e-10 * a.abs().max(1.0)
                };
                assert!(
                    close(f_orig, f_new) && close(g_orig, g_new),
                    "case {case} probe {probe}: {text:?}\n f {f_orig} vs {f_new}, g {g_orig} vs {g_new}"
                );
            }
        }
    }
}
