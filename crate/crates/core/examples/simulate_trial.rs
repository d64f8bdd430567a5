//! Simulates one trial and reports window composition and detection statistics.
//!
//! Usage: `cargo run --release --example simulate_trial [p_out] [seed]`

use flowscape::sim::{default_scene, generate_experiment, simulate_window, ExperimentSpec, SimParams};

fn main() -> flowscape::Result<()> {
    let mut args = std::env::args().skip(1);
    let p_out: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.3);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(7);
    let scene = default_scene(seed);
    let params = SimParams::default();
    println!("floor {0} m x {0} m, {1} doors, {2} paths", scene.side, scene.doors.len(), scene.paths.len());
    for (i, c) in scene.configs.iter().enumerate() {
        println!("  config {i} ({}): paths {:?}", c.name, c.paths);
    }

    let window = simulate_window(&scene, 0, &params, 300, false, seed)?;
    let rate = window.records.len() as f64 / window.opportunities as f64;
    println!(
        "one regular window: {} passengers, {} detections, detection rate {rate:.3}",
        window.passengers.len(),
        window.records.len()
    );

    let spec = ExperimentSpec { p_out, ..ExperimentSpec::default() };
    let exp = generate_experiment(&scene, &params, &spec, seed)?;
    let outliers = exp.windows.iter().filter(|w| w.outlier).count();
    println!(
        "trial: {} windows, {outliers} outliers, data matrix {}x{}",
        exp.windows.len(),
        exp.data.dim(),
        exp.data.len()
    );
    let mut per_class = vec![0usize; spec.n_classes];
    for w in exp.windows.iter().filter(|w| !w.outlier) {
        per_class[w.config] += 1;
    }
    println!("regular windows per class: {per_class:?}");
    Ok(())
}
