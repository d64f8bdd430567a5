//! A day of five-minute windows drawn from three flow configurations with
//! 15% outlier windows, clustered without a preset segment count.
//!
//! Usage: `cargo run --release --example synthetic_day [seed]`

use flowscape::baselines::clustering_error;
use flowscape::sim::{default_scene, generate_experiment, ExperimentSpec, SimParams};
use flowscape::subspace::{run_pipeline, PipelineConfig};

fn main() -> flowscape::Result<()> {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let scene = default_scene(seed);
    let spec = ExperimentSpec {
        n_maps: 288,
        p_out: 0.15,
        n_classes: 3,
        ..ExperimentSpec::default()
    };
    let exp = generate_experiment(&scene, &SimParams::default(), &spec, seed)?;
    let cfg = PipelineConfig { p: 0.5, seed, ..PipelineConfig::default() };
    let out = run_pipeline(exp.data.matrix(), &cfg)?;
    let labeling = &out.labeling;
    println!("maps:                {}", exp.data.len());
    println!("estimated clusters:  {}", out.k_est);
    println!("segments:            {}", out.gamma);
    println!("classes after merge: {}", labeling.k);
    println!("irregular fraction:  {:.3}", labeling.irregular_fraction());
    println!("clustering error:    {:.4}", clustering_error(&labeling.labels, &exp.truth)?);
    Ok(())
}
