//! One end-to-end benchmark run: evolve candidate bases, fit each one, and
//! report the best relation with its equivalence verdict and test error.
//!
//! Run with `cargo run --release --example run_benchmark -- [name] [seed]`,
//! e.g. `cargo run --release --example run_benchmark -- Nguyen-5 0`.

use gsr::benchmarks::{find, sample_dataset, Role};
use gsr::cli::VALIDATION_SEED_FLIP;
use gsr::gp::{self, GpConfig};
use gsr::recovery::{equivalence_check, prediction_rmse, RecoveredModel};

fn main() {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "Nguyen-5".into());
    let seed: u64 = args.next().map(|s| s.parse().expect("seed must be an integer")).unwrap_or(0);

    let spec = find(&name).expect("unknown benchmark (see the libraries example for the list)");
    println!("{}  d={}  truth {}", spec.name, spec.d, spec.expression);

    let train = sample_dataset(&spec, Role::Train, seed);
    let validation = sample_dataset(&spec, Role::Train, seed ^ VALIDATION_SEED_FLIP);
    let test = sample_dataset(&spec, Role::Test, seed);

    let cfg = GpConfig {
        seed,
        m_psi: spec.m_psi,
        max_generations: 6000,
        budget_seconds: 120.0,
        ..GpConfig::default()
    };
    let result = gp::run(&train, Some(&validation), &spec.library_x, &spec.library_y, &cfg);

    for t in result.trace.iter().filter(|t| t.generation % 200 == 0 || t.generation == 1) {
        println!(
            "gen {:>5}  best {:.3e}  threshold {:.1e}  libraries {}/{}",
            t.generation, t.best_fitness, t.threshold, t.sublibrary_x, t.sublibrary_y
        );
    }
    println!(
        "stopped after {} generations in {:.1}s  converged={}",
        result.generations, result.wall_seconds, result.converged
    );

    let Some(model) = RecoveredModel::from_individual(&spec, &result.best, &train) else {
        println!("best individual has no usable relation");
        return;
    };
    println!("relation   {}", model.expression());
    let eq = equivalence_check(&model, &spec);
    println!(
        "equivalent to the truth: {}  (max relative error {:.2e} over {} probes, {} failed)",
        eq.exact, eq.max_rel_error, eq.points, eq.failures
    );
    let score = prediction_rmse(&model, &test);
    println!("test rmse  {:.3e}  ({} failed predictions)", score.rmse, score.failures);
}
