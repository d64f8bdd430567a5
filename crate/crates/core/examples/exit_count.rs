//! Counts passengers crossing a box at a door, with and without track ids,
//! against the number of passengers that actually walked through it.
//!
//! Usage: `cargo run --release --example exit_count [seed]`

use flowscape::grid::{count_exit_box, CentroidRecord, CountingBox};
use flowscape::sim::{default_scene, simulate_window, SimParams};

fn main() -> flowscape::Result<()> {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let scene = default_scene(seed);
    let params = SimParams::default();
    let window = simulate_window(&scene, 0, &params, 3600, false, seed)?;

    let path = &scene.paths[scene.configs[0].paths[0]];
    let exit = scene.doors[path.to];
    let half = 2.5;
    let region = CountingBox::new(exit[0] - half, exit[1] - half, exit[0] + half, exit[1] + half)?;
    println!("counting box around door {} at ({:.1}, {:.1})", path.to, exit[0], exit[1]);

    let tracked = count_exit_box(&window.records, &region, 600.0, Some((0.0, 3599.0)))?;
    let anonymous: Vec<CentroidRecord> =
        window.records.iter().map(|r| CentroidRecord::new(r.t, r.x, r.y)).collect();
    let untracked = count_exit_box(&anonymous, &region, 600.0, Some((0.0, 3599.0)))?;
    println!("{:>8} {:>8} {:>10}", "start", "tracked", "untracked");
    for (a, b) in tracked.iter().zip(&untracked) {
        println!("{:>8} {:>8} {:>10}", a.start, a.count, b.count);
    }
    let total = |c: &[flowscape::grid::BucketCount]| c.iter().map(|b| b.count).sum::<u64>();
    let walkers = window.passengers.iter().filter(|p| scene.paths[p.path].to == path.to).count();
    println!(
        "totals: tracked {}, untracked {}, passengers heading to the door {walkers}",
        total(&tracked),
        total(&untracked)
    );
    Ok(())
}
