//! Runs the full clustering pipeline at the operating point p = 0.5,
//! NSI threshold 0.93 and 17 segments, and compares with ground truth.
//!
//! Usage: `cargo run --release --example subspace_clustering [p_out] [seed]`

use flowscape::baselines::clustering_error;
use flowscape::sim::{default_scene, generate_experiment, ExperimentSpec, SimParams};
use flowscape::subspace::{run_pipeline, PipelineConfig, Provenance};

fn main() -> flowscape::Result<()> {
    let mut args = std::env::args().skip(1);
    let p_out: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.3);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(7);
    let spec = ExperimentSpec { p_out, ..ExperimentSpec::default() };
    let exp = generate_experiment(&default_scene(seed), &SimParams::default(), &spec, seed)?;
    let cfg = PipelineConfig {
        p: 0.5,
        th_nsi: 0.93,
        gamma: Some(17),
        seed,
        ..PipelineConfig::default()
    };
    let out = run_pipeline(exp.data.matrix(), &cfg)?;
    println!("estimated clusters on the regular maps: {}", out.k_est);
    println!("segments: {}, classes after merging: {}", out.gamma, out.labeling.k);
    let dims: Vec<usize> = out.merged.bases.iter().map(|b| b.dim()).collect();
    println!("class subspace dimensions: {dims:?}");
    let count = |p: Provenance| out.labeling.provenance.iter().filter(|&&q| q == p).count();
    println!(
        "maps: {} clustered directly, {} reclassified, {} left irregular",
        count(Provenance::RegularFromSplit),
        count(Provenance::Reclassified),
        count(Provenance::Irregular)
    );
    println!("clustering error: {:.4}", clustering_error(&out.labeling.labels, &exp.truth)?);
    Ok(())
}
