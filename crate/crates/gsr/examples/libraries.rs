//! The benchmark registry: every problem with its dimension, sampling
//! plans, and allowed operations. `--json` prints the machine-readable
//! form instead.
//!
//! Run with `cargo run --example libraries [-- --json]`.

use gsr::benchmarks::{all_benchmarks, registry_json, SamplerKind, SamplerSpec};

fn sampler(sp: &SamplerSpec) -> String {
    // U draws c points per variable iid from [a, b); E lays an inclusive
    // c-point grid on the diagonal.
    let kind = match sp.kind {
        SamplerKind::Uniform => 'U',
        SamplerKind::Even => 'E',
    };
    format!("{kind}({}, {}, {})", sp.a, sp.b, sp.c)
}

fn main() {
    if std::env::args().any(|a| a == "--json") {
        println!("{}", registry_json());
        return;
    }
    let all = all_benchmarks();
    for b in &all {
        println!(
            "{:14} d={}  train {:14} test {:14} {}",
            b.name,
            b.d,
            sampler(&b.train),
            sampler(&b.test),
            b.expression,
        );
        println!("{:14} ops {}{}", "", b.library, if b.notes.is_empty() { "" } else { "  *" });
        if !b.notes.is_empty() {
            println!("{:14} * {}", "", b.notes);
        }
    }
    println!("{} benchmarks", all.len());
}
