use flowscape::grid::{count_exit_box, CentroidRecord, CountingBox};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SPEED: f64 = 1.4;

/// `n` passengers walk left to right along `y = 1` through the box
/// `[4, 6.8) x [0, 2)`, two sampling steps deep,, one starting every 20 s, sampled once per second with
/// detection dropout `drop`.
fn crossings(n: usize, drop: f64, rng: &mut ChaCha8Rng, tracked: bool) -> Vec<CentroidRecord> {
    let mut out = Vec::new();
    for p in 0..n {
        let t0 = 20.0 * p as f64;
        let phase: f64 = rng.gen_range(0.0..1.0);
        for k in 0..10 {
            let t = t0 + k as f64;
            let x = (k as f64 + phase) * SPEED;
            if rng.gen_bool(1.0 - drop) {
                out.push(if tracked {
                    CentroidRecord::with_track(t, x, 1.0, p as u64)
                } else {
                    CentroidRecord::new(t, x, 1.0)
                });
            }
        }
    }
    out
}

/// Runs of in-box seconds separated by at least one empty second, counted
/// directly from the record times.
fn oracle_passages(recs: &[CentroidRecord], b: &CountingBox) -> u64 {
    let mut secs: Vec<i64> = recs.iter().filter(|r| b.contains(r.x, r.y)).map(|r| r.t as i64).collect();
    secs.sort_unstable();
    secs.dedup();
    secs.iter().enumerate().filter(|&(i, &s)| i == 0 || s - secs[i - 1] > 1).count() as u64
}

fn exit_box() -> CountingBox {
    CountingBox::new(4.0, 0.0, 4.0 + 2.0 * SPEED, 2.0).unwrap()
}

#[test]
fn dropout_keeps_counts_near_the_true_crossings() {
    let mut lo = u64::MAX;
    let mut hi = 0;
    for seed in 0..50 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let recs = crossings(100, 0.04, &mut rng, false);
        let total: u64 = count_exit_box(&recs, &exit_box(), 60.0, Some((0.0, 2000.0)))
            .unwrap()
            .iter()
            .map(|b| b.count)
            .sum();
        assert_eq!(total, oracle_passages(&recs, &exit_box()), "seed {seed}");
        lo = lo.min(total);
        hi = hi.max(total);
    }
    assert!(lo >= 92 && hi <= 100, "counts ranged over [{lo}, {hi}]");
}

#[test]
fn tracked_counts_equal_seen_passengers() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let recs = crossings(100, 0.04, &mut rng, true);
    let seen: std::collections::BTreeSet<_> = recs
        .iter()
        .filter(|r| exit_box().contains(r.x, r.y))
        .map(|r| r.track_id)
        .collect();
    let total: u64 = count_exit_box(&recs, &exit_box(), 60.0, None).unwrap().iter().map(|b| b.count).sum();
    assert_eq!(total, seen.len() as u64);
}

#[test]
fn single_crossing_counts_once() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let recs = crossings(1, 0.0, &mut rng, true);
    let counts = count_exit_box(&recs, &exit_box(), 5.0, None).unwrap();
    assert_eq!(counts.iter().map(|b| b.count).sum::<u64>(), 1);
}

#[test]
fn empty_stream_and_degenerate_box() {
    assert!(count_exit_box(&[], &exit_box(), 60.0, Some((0.0, 300.0)))
        .unwrap()
        .iter()
        .all(|b| b.count == 0));
    assert!(CountingBox::new(1.0, 1.0, 1.0, 2.0).is_err());
    assert!(count_exit_box(&[], &exit_box(), 0.0, None).is_err());
}
