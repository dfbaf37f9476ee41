//! A small sweep: several benchmarks times several seeds in one call, with
//! per-run records, per-benchmark aggregates, and the artifact files
//! (runs.jsonl, summary.csv, expressions/*.txt) under an output directory.
//!
//! Run with `cargo run --release --example suite -- [out_dir]`.

use gsr::benchmarks::find;
use gsr::cli::{cmd_suite, RunConfig};
use gsr::gp::GpConfig;
use gsr::recovery::summary_csv;
use std::path::PathBuf;

fn main() {
    let out: PathBuf =
        std::env::args().nth(1).unwrap_or_else(|| "target/suite-demo".into()).into();
    let cfg = RunConfig {
        benchmarks: ["Nguyen-1", "Nguyen-5", "Jin-2"]
            .iter()
            .map(|n| find(n).expect("known benchmark"))
            .collect(),
        seeds: vec![0, 1],
        sgsr: false,
        ablation: false,
        out: out.clone(),
        workers: 2,
        gp: GpConfig { max_generations: 3000, budget_seconds: 45.0, ..GpConfig::default() },
    };

    let result = cmd_suite(&cfg).expect("suite run");
    for r in &result.records {
        println!(
            "{:10} seed {}  exact {:5}  test rmse {:9.3e}  {}",
            r.benchmark, r.seed, r.exact, r.test_rmse, r.expression
        );
    }
    println!("\n{}", summary_csv(&result.reports));
    println!("artifacts under {}", out.display());
}
