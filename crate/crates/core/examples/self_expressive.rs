//! Solves the convex L1 self-expressive program on one trial and shows how
//! the irregularity ranking separates outlier windows.
//!
//! Usage: `cargo run --release --example self_expressive [p_out] [seed]`

use std::time::Instant;

use flowscape::self_expressive::{irregularity, solve_coefficients, split_regular, SolverConfig};
use flowscape::sim::{default_scene, generate_experiment, ExperimentSpec, SimParams};

fn main() -> flowscape::Result<()> {
    let mut args = std::env::args().skip(1);
    let p_out: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.3);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(7);
    let spec = ExperimentSpec { p_out, ..ExperimentSpec::default() };
    let exp = generate_experiment(&default_scene(seed), &SimParams::default(), &spec, seed)?;
    let x = exp.data.matrix();

    let started = Instant::now();
    let c = solve_coefficients(x, &SolverConfig::default())?;
    println!("solved {} columns in {:.1?}", c.len(), started.elapsed());
    println!("worst constraint violation: {:.2e}", c.feasibility().worst());
    let nnz = c.entries().iter().filter(|&&v| v > 0.0).count();
    println!("nonzero coefficients per column: {:.1}", nnz as f64 / c.len() as f64);

    let irr = irregularity(x, &c)?;
    let mean = |outlier: bool| {
        let v: Vec<f64> = (0..irr.len()).filter(|&i| exp.truth.is_outlier(i) == outlier).map(|i| irr.values[i]).collect();
        v.iter().sum::<f64>() / v.len().max(1) as f64
    };
    println!("mean irregularity: regular {:.3}, outlier {:.3}", mean(false), mean(true));

    for p in [0.2, 0.3, 0.5] {
        let split = split_regular(&irr, p)?;
        let caught = split.irregular_idx.iter().filter(|&&i| exp.truth.is_outlier(i)).count();
        let n_out = (0..irr.len()).filter(|&i| exp.truth.is_outlier(i)).count();
        println!(
            "p = {p}: {} flagged, {caught} of {n_out} outliers among them, threshold {:.3}",
            split.irregular_idx.len(),
            split.implied_threshold
        );
    }
    Ok(())
}
