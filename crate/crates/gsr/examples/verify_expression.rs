//! The relation verifier: parse a written relation against a benchmark's
//! transform tables, check the coefficient norm at print precision, and
//! probe numeric equivalence on fresh points plus a widened domain that
//! separates true forms from local approximations.
//!
//! Run with `cargo run --example verify_expression`.

use gsr::benchmarks::find;
use gsr::cli::{verify_text, VerifyOutput};

fn report(out: &VerifyOutput) {
    println!("{}  |  {}", out.benchmark, out.expression);
    println!(
        "  equivalent {}  max relative error {:.2e} over {} probes (widened domain {})",
        out.equivalence.exact,
        out.equivalence.max_rel_error,
        out.equivalence.points,
        out.equivalence.widened,
    );
    println!(
        "  coefficient norm {:.7}  deviation after normalization {:.1e}  print-consistent {}",
        out.unit_norm.norm, out.unit_norm.normalized_deviation, out.unit_norm.print_consistent,
    );
}

fn main() {
    // An exact recovery: the relation holds everywhere the truth is finite.
    let spec = find("Nguyen-10").unwrap();
    report(&verify_text(&spec, "0.44721*y = 0.89442*sin(x1)*cos(x2)").unwrap());

    // A fifth-order series of sinh(x): indistinguishable at training scale,
    // rejected by the widened probes.
    let spec = find("Livermore-7").unwrap();
    report(&verify_text(&spec, "1.0*y = 1.0*x + 0.16667*x*x*x + 0.00833*x*x*x*x*x").unwrap());

    // Degenerate and malformed relations are errors, not reports.
    for bad in ["0.5*y = 0", "0.5*y = sin(", "0.5*y = 0.5*tanh(x1)"] {
        println!("{bad:32}  ->  {}", verify_text(&spec, bad).unwrap_err());
    }
}
