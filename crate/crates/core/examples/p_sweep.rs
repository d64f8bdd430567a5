//! Sweeps the split fraction p on one trial, reusing a single coefficient
//! solve, to show how sensitive the clustering is to the outlier quantile.
//!
//! Usage: `cargo run --release --example p_sweep [p_out] [seed]`

use flowscape::baselines::clustering_error;
use flowscape::self_expressive::{irregularity, solve_coefficients, SolverConfig};
use flowscape::sim::{default_scene, generate_experiment, ExperimentSpec, SimParams};
use flowscape::subspace::{cluster_with_coefficients, PipelineConfig};

fn main() -> flowscape::Result<()> {
    let mut args = std::env::args().skip(1);
    let p_out: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.3);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(7);
    let spec = ExperimentSpec { p_out, ..ExperimentSpec::default() };
    let exp = generate_experiment(&default_scene(seed), &SimParams::default(), &spec, seed)?;
    let x = exp.data.matrix();
    let c = solve_coefficients(x, &SolverConfig::default())?;
    let irr = irregularity(x, &c)?;
    println!("{:>5} {:>7} {:>10} {:>9}", "p", "classes", "irregular", "error");
    for step in 1..=14 {
        let p = step as f64 * 0.05;
        let cfg = PipelineConfig {
            p,
            gamma: Some(17),
            seed,
            ..PipelineConfig::default()
        };
        let out = cluster_with_coefficients(x, c.clone(), irr.clone(), &cfg)?;
        let err = clustering_error(&out.labeling.labels, &exp.truth)?;
        println!(
            "{p:>5.2} {:>7} {:>10.3} {:>9.4}",
            out.labeling.k,
            out.labeling.irregular_fraction(),
            err
        );
    }
    Ok(())
}
