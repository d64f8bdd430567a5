//! Scores k-means, k-medoids and DBSCAN under cosine dissimilarity on
//! simulated trials at several outlier levels.
//!
//! Usage: `cargo run --release --example baselines [seed]`

use flowscape::baselines::{clustering_error, Baseline, BaselineConfig};
use flowscape::sim::{default_scene, generate_experiment, ExperimentSpec, SimParams};

fn main() -> flowscape::Result<()> {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let scene = default_scene(seed);
    let cfg = BaselineConfig::default();
    println!("{:>6} {:>9} {:>9} {:>9}", "p_out", "kmeans", "kmedoids", "dbscan");
    for p_out in [0.2, 0.4, 0.6] {
        let spec = ExperimentSpec { p_out, ..ExperimentSpec::default() };
        let exp = generate_experiment(&scene, &SimParams::default(), &spec, seed)?;
        let errors = Baseline::ALL
            .iter()
            .map(|b| {
                let labels = b.run(exp.data.matrix(), spec.n_classes, &cfg, seed)?;
                clustering_error(&labels, &exp.truth)
            })
            .collect::<flowscape::Result<Vec<f64>>>()?;
        println!("{p_out:>6} {:>9.3} {:>9.3} {:>9.3}", errors[0], errors[1], errors[2]);
    }
    Ok(())
}
