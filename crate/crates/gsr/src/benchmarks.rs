//! Declarative registry of the benchmark problems: ground-truth evaluators,
//! samplers, and per-problem transform libraries.
//!
//! Library listings keep the arithmetic symbols {+,-,*,/} for display only;
//! sums and products are structural in the encoding and division is not an
//! engine operation, so the tables below hold the unary transforms.

use crate::encoding::{MappingTable, Transform};
use crate::eval::Dataset;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Benchmark family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Suite {
    Nguyen,
    Jin,
    Neat,
    Livermore,
    SymSet,
}

impl Suite {
    pub const ALL: [Suite; 5] =
        [Suite::Nguyen, Suite::Jin, Suite::Neat, Suite::Livermore, Suite::SymSet];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Nguyen => "Nguyen",
            Suite::Jin => "Jin",
            Suite::Neat => "Neat",
            Suite::Livermore => "Livermore",
            Suite::SymSet => "SymSet",
        }
    }

    pub fn parse(s: &str) -> Option<Suite> {
        Suite::ALL.iter().copied().find(|x| x.name().eq_ignore_ascii_case(s))
    }
}

/// Point generator for one role: `Uniform` draws `c` i.i.d. points with every
/// coordinate uniform in [a,b); `Even` produces `c` points whose coordinates
/// all equal the same evenly spaced grid over [a,b], endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplerSpec {
    pub kind: SamplerKind,
    pub a: f64,
    pub b: f64,
    pub c: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SamplerKind {
    Uniform,
    Even,
}

/// Which dataset of a benchmark to draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Train,
    Test,
}

type Truth = fn(&[f64]) -> f64;

/// One benchmark problem. `library` is the display string of the allowed
/// operations; `library_x`/`library_y` are the executable transform tables
/// (the y side keeps One/Identity, the {exp, ln} pair when allowed, and the
/// problem's power transforms).
#[derive(Debug, Clone)]
pub struct BenchmarkSpec {
    pub name: &'static str,
    pub suite: Suite,
    pub d: usize,
    pub expression: &'static str,
    pub library: &'static str,
    pub train: SamplerSpec,
    pub test: SamplerSpec,
    pub library_x: MappingTable,
    pub library_y: MappingTable,
    /// Target bases per candidate (2 only for SymSet-11).
    pub m_psi: usize,
    /// Inputs are integers (harmonic-number problem).
    pub integer_domain: bool,
    pub notes: &'static str,
    truth: Truth,
}

impl BenchmarkSpec {
    pub fn ground_truth(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.d);
        (self.truth)(x)
    }
}

// ---------------------------------------------------------------------------
// Library construction

use Transform::{
    Cos, Cube, Exp, Identity, Ln, Neg, NegExp, One, Reciprocal, Sin, Sqrt, Square, Tan, Tanh,
};

fn lx_l0() -> Vec<Transform> {
    vec![One, Identity, Cos, Sin, Exp, Ln]
}

fn ly_default() -> Vec<Transform> {
    vec![One, Identity, Exp, Ln]
}

const L0: &str = "{+,-,*,/,cos,sin,exp,ln}";
const L0C: &str = "{+,-,*,/,cos,sin,exp,ln,const}";

#[allow(clippy::too_many_arguments)]
fn spec(
    name: &'static str,
    suite: Suite,
    d: usize,
    expression: &'static str,
    library: &'static str,
    train: SamplerSpec,
    test: SamplerSpec,
    lx: Vec<Transform>,
    ly: Vec<Transform>,
    truth: Truth,
) -> BenchmarkSpec {
    BenchmarkSpec {
        name,
        suite,
        d,
        expression,
        library,
        train,
        test,
        library_x: MappingTable::new(lx, d).expect("feature library"),
        library_y: MappingTable::new(ly, 1).expect("target library"),
        m_psi: 1,
        integer_domain: false,
        notes: "",
        truth,
    }
}

fn harmonic(x: f64) -> f64 {
    let n = x.round() as i64;
    (1..=n).map(|k| 1.0 / k as f64).sum()
}

/// Every registered benchmark, in suite order.
pub fn all_benchmarks() -> Vec<BenchmarkSpec> {
    let u = |a: f64, b: f64, c: usize| SamplerSpec { kind: SamplerKind::Uniform, a, b, c };
    let e = |a: f64, b: f64, c: usize| SamplerSpec { kind: SamplerKind::Even, a, b, c };
    let mut v: Vec<BenchmarkSpec> = Vec::with_capacity(67);

    // --- Nguyen ---------------------------------------------------------
    let ng = |name, d, expr, dom: SamplerSpec, truth| {
        spec(name, Suite::Nguyen, d, expr, L0, dom, dom, lx_l0(), ly_default(), truth)
    };
    v.push(ng("Nguyen-1", 1, "x^3 + x^2 + x", u(-1.0, 1.0, 20), |x| {
        x[0].powi(3) + x[0].powi(2) + x[0]
    }));
    v.push(ng("Nguyen-2", 1, "x^4 + x^3 + x^2 + x", u(-1.0, 1.0, 20), |x| {
        x[0].powi(4) + x[0].powi(3) + x[0].powi(2) + x[0]
    }));
    v.push(ng("Nguyen-3", 1, "x^5 + x^4 + x^3 + x^2 + x", u(-1.0, 1.0, 20), |x| {
        x[0].powi(5) + x[0].powi(4) + x[0].powi(3) + x[0].powi(2) + x[0]
    }));
    v.push(ng("Nguyen-4", 1, "x^6 + x^5 + x^4 + x^3 + x^2 + x", u(-1.0, 1.0, 20), |x| {
        x[0].powi(6) + x[0].powi(5) + x[0].powi(4) + x[0].powi(3) + x[0].powi(2) + x[0]
    }));
    v.push(ng("Nguyen-5", 1, "sin(x^2)*cos(x) - 1", u(-1.0, 1.0, 20), |x| {
        (x[0] * x[0]).sin() * x[0].cos() - 1.0
    }));
    v.push(ng("Nguyen-6", 1, "sin(x) + sin(x + x^2)", u(-1.0, 1.0, 20), |x| {
        x[0].sin() + (x[0] + x[0] * x[0]).sin()
    }));
    v.push(ng("Nguyen-7", 1, "ln(x+1) + ln(x^2+1)", u(0.0, 2.0, 20), |x| {
        (x[0] + 1.0).ln() + (x[0] * x[0] + 1.0).ln()
    }));
    v.push(ng("Nguyen-8", 1, "sqrt(x)", u(0.0, 4.0, 20), |x| x[0].sqrt()));
    v.push(ng("Nguyen-9", 2, "sin(x1) + sin(x2^2)", u(0.0, 1.0, 20), |x| {
        x[0].sin() + (x[1] * x[1]).sin()
    }));
    v.push(ng("Nguyen-10", 2, "2*sin(x1)*cos(x2)", u(0.0, 1.0, 20), |x| {
        2.0 * x[0].sin() * x[1].cos()
    }));
    v.push(ng("Nguyen-11", 2, "x1^x2", u(0.0, 1.0, 20), |x| x[0].powf(x[1])));
    v.push(ng("Nguyen-12", 2, "x1^4 - x1^3 + 0.5*x2^2 - x2", u(0.0, 1.0, 20), |x| {
        x[0].powi(4) - x[0].powi(3) + 0.5 * x[1] * x[1] - x[1]
    }));
    v.push(ng("Nguyen-12star", 2, "x1^4 - x1^3 + 0.5*x2^2 - x2", u(0.0, 10.0, 20), |x| {
        x[0].powi(4) - x[0].powi(3) + 0.5 * x[1] * x[1] - x[1]
    }));

    // --- Jin --------------------------------------------------------------
    let jin = |name, expr, truth| {
        spec(
            name,
            Suite::Jin,
            2,
            expr,
            "{+,-,*,/,cos,sin,exp,^2,^3,const}",
            u(-3.0, 3.0, 100),
            u(-3.0, 3.0, 30),
            vec![One, Identity, Cos, Sin, Exp, Square, Cube],
            vec![One, Identity, Exp, Square, Cube],
            truth,
        )
    };
    v.push(jin("Jin-1", "2.5*x1^4 - 1.3*x1^3 + 0.5*x2^2 - 1.7*x2", |x| {
        2.5 * x[0].powi(4) - 1.3 * x[0].powi(3) + 0.5 * x[1] * x[1] - 1.7 * x[1]
    }));
    v.push(jin("Jin-2", "8*x1^2 + 8*x2^3 - 15", |x| {
        8.0 * x[0] * x[0] + 8.0 * x[1].powi(3) - 15.0
    }));
    v.push(jin("Jin-3", "0.2*x1^3 + 0.5*x2^3 - 1.2*x2 - 0.5*x1", |x| {
        0.2 * x[0].powi(3) + 0.5 * x[1].powi(3) - 1.2 * x[1] - 0.5 * x[0]
    }));
    v.push(jin("Jin-4", "1.5*exp(x1) + 5*cos(x2)", |x| 1.5 * x[0].exp() + 5.0 * x[1].cos()));
    v.push(jin("Jin-5", "6*sin(x1)*cos(x2)", |x| 6.0 * x[0].sin() * x[1].cos()));
    v.push(jin("Jin-6", "1.35*x1*x2 + 5.5*sin((x1-1)*(x2-1))", |x| {
        1.35 * x[0] * x[1] + 5.5 * ((x[0] - 1.0) * (x[1] - 1.0)).sin()
    }));

    // --- Neat -------------------------------------------------------------
    let neat14 = |name, expr, dom: SamplerSpec, truth| {
        spec(
            name,
            Suite::Neat,
            1,
            expr,
            "{+,-,*,/,cos,sin,exp,ln,1}",
            dom,
            dom,
            lx_l0(),
            ly_default(),
            truth,
        )
    };
    v.push(neat14("Neat-1", "x^4 + x^3 + x^2 + x", u(-1.0, 1.0, 20), |x| {
        x[0].powi(4) + x[0].powi(3) + x[0].powi(2) + x[0]
    }));
    v.push(neat14("Neat-2", "x^5 + x^4 + x^3 + x^2 + x", u(-1.0, 1.0, 20), |x| {
        x[0].powi(5) + x[0].powi(4) + x[0].powi(3) + x[0].powi(2) + x[0]
    }));
    v.push(neat14("Neat-3", "sin(x^2)*cos(x) - 1", u(-1.0, 1.0, 20), |x| {
        (x[0] * x[0]).sin() * x[0].cos() - 1.0
    }));
    v.push(neat14("Neat-4", "ln(x+1) + ln(x^2+1)", u(0.0, 2.0, 20), |x| {
        (x[0] + 1.0).ln() + (x[0] * x[0] + 1.0).ln()
    }));
    v.push(spec(
        "Neat-5",
        Suite::Neat,
        2,
        "2*sin(x1)*cos(x2)",
        L0,
        u(-1.0, 1.0, 100),
        u(-1.0, 1.0, 100),
        lx_l0(),
        ly_default(),
        |x| 2.0 * x[0].sin() * x[1].cos(),
    ));
    let mut neat6 = spec(
        "Neat-6",
        Suite::Neat,
        1,
        "sum_{k=1..x} 1/k",
        "{+,*,/,^-1,neg,sqrt}",
        e(1.0, 50.0, 50),
        e(1.0, 120.0, 120),
        vec![One, Identity, Reciprocal, Neg, Sqrt],
        vec![One, Identity, Reciprocal, Sqrt],
        |x| harmonic(x[0]),
    );
    neat6.integer_domain = true;
    neat6.notes = "harmonic numbers; inputs are the integers of the grid";
    v.push(neat6);
    v.push(spec(
        "Neat-7",
        Suite::Neat,
        2,
        "2 - 2.1*cos(9.8*x1)*sin(1.3*x2)",
        "{+,-,*,/,cos,sin,exp,ln,tan,tanh,^2,^3,sqrt}",
        e(-50.0, 50.0, 100_000),
        e(-50.0, 50.0, 100_000),
        vec![One, Identity, Cos, Sin, Exp, Ln, Tan, Tanh, Square, Cube, Sqrt],
        vec![One, Identity, Exp, Ln, Square, Cube, Sqrt],
        |x| 2.0 - 2.1 * (9.8 * x[0]).cos() * (1.3 * x[1]).sin(),
    ));
    v.push(spec(
        "Neat-8",
        Suite::Neat,
        2,
        "exp(-(x1-1)^2) / (1.2 + (x2-2.5)^2)",
        "{+,-,*,/,exp,e^-,^2}",
        u(0.3, 4.0, 100),
        u(0.3, 4.0, 100),
        vec![One, Identity, Exp, NegExp, Square],
        vec![One, Identity, Exp, Square],
        |x| (-(x[0] - 1.0) * (x[0] - 1.0)).exp() / (1.2 + (x[1] - 2.5) * (x[1] - 2.5)),
    ));
    v.push(spec(
        "Neat-9",
        Suite::Neat,
        2,
        "1/(1 + x1^-4) + 1/(1 + x2^-4)",
        L0,
        e(-5.0, 5.0, 21),
        e(-5.0, 5.0, 21),
        lx_l0(),
        ly_default(),
        |x| 1.0 / (1.0 + x[0].powi(-4)) + 1.0 / (1.0 + x[1].powi(-4)),
    ));

    // --- Livermore --------------------------------------------------------
    let liv = |name, d, expr, dom: SamplerSpec, truth| {
        spec(name, Suite::Livermore, d, expr, L0, dom, dom, lx_l0(), ly_default(), truth)
    };
    let mut liv1 = spec(
        "Livermore-1",
        Suite::Livermore,
        1,
        "1/3 + x + sin(x^2)",
        L0,
        u(-10.0, 10.0, 1000),
        u(-10.0, 10.0, 1000),
        vec![One, Identity, Cos, Sin, Ln],
        ly_default(),
        |x| 1.0 / 3.0 + x[0] + (x[0] * x[0]).sin(),
    );
    liv1.notes = "exp dropped from the feature library: the wide domain overflows";
    v.push(liv1);
    v.push(liv("Livermore-2", 1, "sin(x^2)*cos(x) - 2", u(-1.0, 1.0, 20), |x| {
        (x[0] * x[0]).sin() * x[0].cos() - 2.0
    }));
    v.push(liv("Livermore-3", 1, "sin(x^3)*cos(x^2) - 1", u(-1.0, 1.0, 20), |x| {
        (x[0].powi(3)).sin() * (x[0] * x[0]).cos() - 1.0
    }));
    v.push(liv("Livermore-4", 1, "ln(x+1) + ln(x^2+1) + ln(x)", u(0.0, 2.0, 20), |x| {
        (x[0] + 1.0).ln() + (x[0] * x[0] + 1.0).ln() + x[0].ln()
    }));
    v.push(liv("Livermore-5", 2, "x1^4 - x1^3 + x1^2 - x2", u(0.0, 1.0, 20), |x| {
        x[0].powi(4) - x[0].powi(3) + x[0] * x[0] - x[1]
    }));
    v.push(liv("Livermore-6", 1, "4*x^4 + 3*x^3 + 2*x^2 + x", u(-1.0, 1.0, 20), |x| {
        4.0 * x[0].powi(4) + 3.0 * x[0].powi(3) + 2.0 * x[0] * x[0] + x[0]
    }));
    v.push(liv("Livermore-7", 1, "sinh(x)", u(-1.0, 1.0, 20), |x| x[0].sinh()));
    v.push(liv("Livermore-8", 1, "cosh(x)", u(-1.0, 1.0, 20), |x| x[0].cosh()));
    v.push(liv(
        "Livermore-9",
        1,
        "x^9 + x^8 + x^7 + x^6 + x^5 + x^4 + x^3 + x^2 + x",
        u(-1.0, 1.0, 20),
        |x| (1..=9).map(|p| x[0].powi(p)).sum(),
    ));
    v.push(liv("Livermore-10", 2, "6*sin(x1)*cos(x2)", u(0.0, 1.0, 20), |x| {
        6.0 * x[0].sin() * x[1].cos()
    }));
    v.push(liv("Livermore-11", 2, "(x1^2*x1^2) / (x1 + x2)", u(-1.0, 1.0, 50), |x| {
        (x[0] * x[0] * x[0] * x[0]) / (x[0] + x[1])
    }));
    v.push(liv("Livermore-12", 2, "x1^5 / x2^3", u(-1.0, 1.0, 50), |x| {
        x[0].powi(5) / x[1].powi(3)
    }));
    v.push(liv("Livermore-13", 1, "x^(1/3)", u(0.0, 4.0, 20), |x| x[0].powf(1.0 / 3.0)));
    v.push(liv("Livermore-14", 1, "x^3 + x^2 + x + sin(x) + sin(x^2)", u(-1.0, 1.0, 20), |x| {
        x[0].powi(3) + x[0] * x[0] + x[0] + x[0].sin() + (x[0] * x[0]).sin()
    }));
    v.push(liv("Livermore-15", 1, "x^(1/5)", u(0.0, 4.0, 20), |x| x[0].powf(0.2)));
    v.push(liv("Livermore-16", 1, "x^(2/5)", u(0.0, 4.0, 20), |x| x[0].powf(0.4)));
    v.push(liv("Livermore-17", 2, "4*sin(x1)*cos(x2)", u(0.0, 1.0, 20), |x| {
        4.0 * x[0].sin() * x[1].cos()
    }));
    v.push(liv("Livermore-18", 1, "sin(x^2)*cos(x) - 5", u(-1.0, 1.0, 20), |x| {
        (x[0] * x[0]).sin() * x[0].cos() - 5.0
    }));
    v.push(liv("Livermore-19", 1, "x^5 + x^4 + x^2 + x", u(-1.0, 1.0, 20), |x| {
        x[0].powi(5) + x[0].powi(4) + x[0] * x[0] + x[0]
    }));
    v.push(liv("Livermore-20", 1, "exp(-x^2)", u(-1.0, 1.0, 20), |x| (-x[0] * x[0]).exp()));
    v.push(liv(
        "Livermore-21",
        1,
        "x^8 + x^7 + x^6 + x^5 + x^4 + x^3 + x^2 + x",
        u(-1.0, 1.0, 20),
        |x| (1..=8).map(|p| x[0].powi(p)).sum(),
    ));
    v.push(liv("Livermore-22", 1, "exp(-0.5*x^2)", u(-1.0, 1.0, 20), |x| {
        (-0.5 * x[0] * x[0]).exp()
    }));

    // --- SymSet -----------------------------------------------------------
    let sym = |name, d, expr, dom: SamplerSpec, truth| {
        spec(name, Suite::SymSet, d, expr, L0C, dom, dom, lx_l0(), ly_default(), truth)
    };
    v.push(spec(
        "SymSet-1",
        Suite::SymSet,
        1,
        "x*sinh(x) - 4/5",
        "{+,-,*,/,cos,sin,exp,const,e^-}",
        u(-1.0, 1.0, 20),
        u(-1.0, 1.0, 20),
        vec![One, Identity, Cos, Sin, Exp, NegExp],
        vec![One, Identity, Exp],
        |x| x[0] * x[0].sinh() - 0.8,
    ));
    v.push(spec(
        "SymSet-2",
        Suite::SymSet,
        1,
        "(x^5 - 3*x^4 - 2.8*x + 5)^-1",
        "{+,-,*,/,cos,sin,exp,ln,const,^-1}",
        u(-1.0, 1.0, 20),
        u(-1.0, 1.0, 20),
        vec![One, Identity, Cos, Sin, Exp, Ln, Reciprocal],
        vec![One, Identity, Exp, Ln, Reciprocal],
        |x| 1.0 / (x[0].powi(5) - 3.0 * x[0].powi(4) - 2.8 * x[0] + 5.0),
    ));
    v.push(spec(
        "SymSet-3",
        Suite::SymSet,
        1,
        "(x^4 - 1.2*x^2 + 11.5)^(1/3)",
        "{+,-,*,/,cos,sin,exp,ln,const,^2,^3}",
        u(-1.0, 1.0, 20),
        u(-1.0, 1.0, 20),
        vec![One, Identity, Cos, Sin, Exp, Ln, Square, Cube],
        vec![One, Identity, Exp, Ln, Square, Cube],
        |x| (x[0].powi(4) - 1.2 * x[0] * x[0] + 11.5).powf(1.0 / 3.0),
    ));
    v.push(sym("SymSet-4", 1, "0.8 - cos(x) + 4.2*exp(x)*sin(x^2)", u(-3.0, 3.0, 20), |x| {
        0.8 - x[0].cos() + 4.2 * x[0].exp() * (x[0] * x[0]).sin()
    }));
    v.push(sym("SymSet-5", 2, "4.5*x1^2 + x1*x2^3 - 1.7*x2 - 3.1", u(-1.0, 1.0, 20), |x| {
        4.5 * x[0] * x[0] + x[0] * x[1].powi(3) - 1.7 * x[1] - 3.1
    }));
    v.push(spec(
        "SymSet-6",
        Suite::SymSet,
        2,
        "5 / (3*x1 - x2^3)",
        "{+,-,*,/,cos,sin,exp,ln,const,^-1}",
        u(-1.0, 1.0, 20),
        u(-1.0, 1.0, 20),
        vec![One, Identity, Cos, Sin, Exp, Ln, Reciprocal],
        vec![One, Identity, Exp, Ln, Reciprocal],
        |x| 5.0 / (3.0 * x[0] - x[1].powi(3)),
    ));
    v.push(sym("SymSet-7", 2, "ln(x1^3 + 4*x1*x2)", u(0.0, 2.0, 20), |x| {
        (x[0].powi(3) + 4.0 * x[0] * x[1]).ln()
    }));
    let mut s8 = spec(
        "SymSet-8",
        Suite::SymSet,
        2,
        "sqrt(5*x1^5 + 14*x1^3*x2^4 - 2*x2 + 7)",
        "{+,-,*,/,cos,sin,exp,ln,const,^2,^3}",
        u(-1.0, 1.0, 20),
        u(-1.0, 1.0, 20),
        vec![One, Identity, Cos, Sin, Exp, Ln, Square, Cube],
        vec![One, Identity, Exp, Ln, Square, Cube],
        |x| (5.0 * x[0].powi(5) + 14.0 * x[0].powi(3) * x[1].powi(4) - 2.0 * x[1] + 7.0).sqrt(),
    );
    s8.notes = "radicand is negative on part of the square; such points are redrawn";
    v.push(s8);
    v.push(sym("SymSet-9", 2, "(2*x1 + x2)^(-2/3)", u(0.0, 2.0, 20), |x| {
        (2.0 * x[0] + x[1]).powf(-2.0 / 3.0)
    }));
    v.push(sym("SymSet-10", 2, "1.5*cos(x1)*ln(x1*x2) - 2.5", u(0.0, 1.0, 20), |x| {
        1.5 * x[0].cos() * (x[0] * x[1]).ln() - 2.5
    }));
    let mut s11 = spec(
        "SymSet-11",
        Suite::SymSet,
        2,
        "sqrt(2*cos(x1) + 30*exp(x2)) + 4",
        "{+,-,*,/,cos,sin,exp,ln,const,^2}",
        u(-1.0, 1.0, 20),
        u(-1.0, 1.0, 20),
        vec![One, Identity, Cos, Sin, Exp, Ln, Square],
        vec![One, Identity, Exp, Ln, Square],
        |x| (2.0 * x[0].cos() + 30.0 * x[1].exp()).sqrt() + 4.0,
    );
    s11.m_psi = 2;
    s11.notes = "uses two target bases";
    v.push(s11);
    v.push(sym("SymSet-12", 3, "0.4*x1^4 + 6.2*x2 - 3.5*x1*x3 - 4.5", u(-1.0, 1.0, 20), |x| {
        0.4 * x[0].powi(4) + 6.2 * x[1] - 3.5 * x[0] * x[2] - 4.5
    }));
    v.push(sym("SymSet-13", 3, "2*x2 / (x1 + x3)", u(0.0, 1.0, 20), |x| {
        2.0 * x[1] / (x[0] + x[2])
    }));
    v.push(sym("SymSet-14", 3, "x1*x2*x3 / (x1 + x2 + x3)", u(0.0, 2.0, 20), |x| {
        x[0] * x[1] * x[2] / (x[0] + x[1] + x[2])
    }));
    v.push(sym("SymSet-15", 3, "(x1 + x2)^x3", u(0.0, 1.0, 20), |x| (x[0] + x[1]).powf(x[2])));
    v.push(sym("SymSet-16", 3, "exp(2.6*x1 - ln(x2) + 9.8*cos(x3))", u(0.0, 1.0, 20), |x| {
        (2.6 * x[0] - x[1].ln() + 9.8 * x[2].cos()).exp()
    }));
    v.push(sym("SymSet-17", 3, "ln(0.2*exp(x1+x2) + 0.5*cos(x3^2))", u(0.0, 1.0, 20), |x| {
        (0.2 * (x[0] + x[1]).exp() + 0.5 * (x[2] * x[2]).cos()).ln()
    }));

    v
}

/// Case-insensitive lookup; `*`/`★` spellings of the starred problem accepted.
pub fn find(name: &str) -> Option<BenchmarkSpec> {
    let wanted = name.to_ascii_lowercase().replace('*', "star").replace('★', "star");
    all_benchmarks().into_iter().find(|b| b.name.to_ascii_lowercase() == wanted)
}

pub fn suite_benchmarks(suite: Suite) -> Vec<BenchmarkSpec> {
    all_benchmarks().into_iter().filter(|b| b.suite == suite).collect()
}

pub fn list_benchmarks() -> Vec<&'static str> {
    all_benchmarks().iter().map(|b| b.name).collect()
}

/// Draws the dataset for one role. Uniform roles mix the seed with the role
/// so train and test never share points; even grids ignore the seed. Points
/// where the ground truth is non-finite (possible on documented benchmarks)
/// are redrawn, up to 100 attempts each.
pub fn sample_dataset(spec: &BenchmarkSpec, role: Role, seed: u64) -> Dataset {
    let s = match role {
        Role::Train => &spec.train,
        Role::Test => &spec.test,
    };
    let mut features: Vec<Vec<f64>> = Vec::with_capacity(s.c);
    let mut targets: Vec<f64> = Vec::with_capacity(s.c);
    match s.kind {
        SamplerKind::Uniform => {
            let salt = match role {
                Role::Train => 0,
                Role::Test => 1,
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(2).wrapping_add(salt));
            for _ in 0..s.c {
                let mut point: Vec<f64> = (0..spec.d).map(|_| rng.gen_range(s.a..s.b)).collect();
                let mut y = spec.ground_truth(&point);
                let mut tries = 0;
                while !y.is_finite() && tries < 100 {
                    point = (0..spec.d).map(|_| rng.gen_range(s.a..s.b)).collect();
                    y = spec.ground_truth(&point);
                    tries += 1;
                }
                features.push(point);
                targets.push(y);
            }
        }
        SamplerKind::Even => {
            for i in 0..s.c {
                let t = if s.c == 1 {
                    s.a
                } else {
                    s.a + (s.b - s.a) * i as f64 / (s.c - 1) as f64
                };
                let point = vec![t; spec.d];
                targets.push(spec.ground_truth(&point));
                features.push(point);
            }
        }
    }
    Dataset::new(features, targets)
}

/// Whole registry as a JSON document for external audits.
pub fn registry_json() -> String {
    #[derive(Serialize)]
    struct Record<'a> {
        name: &'a str,
        suite: &'a str,
        dimension: usize,
        expression: &'a str,
        library: &'a str,
        train: SamplerSpec,
        test: SamplerSpec,
        transforms_x: Vec<&'a str>,
        transforms_y: Vec<&'a str>,
        target_bases: usize,
        integer_domain: bool,
        notes: &'a str,
    }
    let all = all_benchmarks();
    let records: Vec<Record> = all
        .iter()
        .map(|b| Record {
            name: b.name,
            suite: b.suite.name(),
            dimension: b.d,
            expression: b.expression,
            library: b.library,
            train: b.train,
            test: b.test,
            transforms_x: b.library_x.transforms().iter().map(|t| t.name()).collect(),
            transforms_y: b.library_y.transforms().iter().map(|t| t.name()).collect(),
            target_bases: b.m_psi,
            integer_domain: b.integer_domain,
            notes: b.notes,
        })
        .collect();
    serde_json::to_string_pretty(&records).expect("registry serialization")
}
