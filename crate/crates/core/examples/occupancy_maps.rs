//! Builds occupancy maps from a centroid stream and writes two of them as
//! PGM images together with the maps CSV.
//!
//! Usage: `cargo run --release --example occupancy_maps [out_dir]`

use std::path::PathBuf;

use flowscape::grid::{occupancy_maps, DataMatrix, GridSpec, Windowing};
use flowscape::io::{self, Pgm};
use flowscape::sim::{default_scene, simulate_trial_records, ExperimentSpec, SimParams};

fn main() -> flowscape::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "target/occupancy_maps".into()));
    let scene = default_scene(3);
    let spec = ExperimentSpec {
        n_maps: 12,
        p_out: 0.25,
        n_classes: 3,
        ..ExperimentSpec::default()
    };
    let (windows, records) = simulate_trial_records(&scene, &SimParams::default(), &spec, 3)?;
    println!("{} centroid records over {} windows", records.len(), windows.len());

    let grid = GridSpec::square(scene.side, 1.0)?;
    let windowing = Windowing {
        start: 0.0,
        window_len: spec.window,
        n_windows: Some(spec.n_maps),
    };
    let maps = occupancy_maps(&records, &grid, &windowing)?;
    let data = DataMatrix::from_maps(&maps)?;
    println!("data matrix: {} cells x {} maps", data.dim(), data.len());
    for (i, (m, w)) in maps.iter().zip(&windows).enumerate() {
        let busy = m.values.iter().filter(|&&v| v > 0.0).count();
        let kind = if w.outlier { "outlier" } else { "regular" };
        println!("  map {i:2} ({kind}, config {}): {busy:3} visited cells, mass {:.2}", w.config, m.l1());
    }

    io::write_maps(&out.join("maps.csv"), &maps)?;
    let regular = windows.iter().position(|w| !w.outlier).unwrap_or(0);
    let outlier = windows.iter().position(|w| w.outlier).unwrap_or(0);
    io::write_pgm(&out.join("regular.pgm"), &Pgm::from_map(&maps[regular])?)?;
    io::write_pgm(&out.join("outlier.pgm"), &Pgm::from_map(&maps[outlier])?)?;
    println!("wrote {}", out.display());
    Ok(())
}
