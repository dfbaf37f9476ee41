//! Probe: timing and outcomes for every (benchmark, seed) pair the
//! acceptance checks will run.

use gsr::cli::execute_one;
use gsr::benchmarks::find;
use gsr::gp::GpConfig;

fn main() {
    let base = GpConfig { budget_seconds: 600.0, ..GpConfig::default() };
    println!("== exact-recovery groups (gsr mode) ==");
    for name in ["Nguyen-1", "Nguyen-2", "Nguyen-8", "Nguyen-9", "Nguyen-10", "Nguyen-11",
                 "SymSet-9", "SymSet-13", "Jin-5"] {
        let spec = find(name).unwrap();
        for seed in 0..5u64 {
            let r = execute_one(&spec, seed, false, &base);
            println!(
                "{name} seed {seed}: exact={} conv={} gens={} t={:.2}s rmse={:.2e} expr={}",
                r.exact, r.converged, r.generations, r.runtime_seconds, r.test_rmse,
                &r.expression.chars().take(70).collect::<String>()
            );
        }
    }
    println!("== ablation pair (25 s budget, both modes) ==");
    let quick = GpConfig { budget_seconds: 25.0, ..GpConfig::default() };
    for name in ["SymSet-2", "SymSet-6"] {
        let spec = find(name).unwrap();
        for sgsr in [false, true] {
            for seed in 0..5u64 {
                let r = execute_one(&spec, seed, sgsr, &quick);
                println!(
                    "{name} sgsr={sgsr} seed {seed}: exact={} conv={} gens={} t={:.2}s rmse={:.2e}",
                    r.exact, r.converged, r.generations, r.runtime_seconds, r.test_rmse
                );
            }
        }
    }
    println!("== determinism benchmark ==");
    let spec = find("Nguyen-5").unwrap();
    for seed in [3u64] {
        let r = execute_one(&spec, seed, false, &base);
        println!(
            "Nguyen-5 seed {seed}: exact={} conv={} gens={} t={:.2}s rmse={:.2e} expr={}",
            r.exact, r.converged, r.generations, r.runtime_seconds, r.test_rmse, r.expression
        );
    }
    println!("== approximation benchmark ==");
    let spec = find("Livermore-7").unwrap();
    for seed in 0..2u64 {
        let r = execute_one(&spec, seed, false, &base);
        println!(
            "Livermore-7 seed {seed}: exact={} conv={} gens={} t={:.2}s rmse={:.2e} expr={}",
            r.exact, r.converged, r.generations, r.runtime_seconds, r.test_rmse,
            &r.expression.chars().take(70).collect::<String>()
        );
    }
}
