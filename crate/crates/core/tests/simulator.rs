use flowscape::grid::{occupancy_maps, GridSpec, Windowing};
use flowscape::sim::{
    default_scene, draw_speed, generate_experiment, simulate_window, ExperimentSpec, SimParams,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn detection_rate_matches_the_detector() {
    let scene = default_scene(1);
    let w = simulate_window(&scene, 2, &SimParams::default(), 300, false, 17).unwrap();
    assert!(w.opportunities >= 1000, "{}", w.opportunities);
    let rate = w.records.len() as f64 / w.opportunities as f64;
    assert!((0.94..=0.98).contains(&rate), "{rate}");
}

#[test]
fn speed_mean_over_500_passengers() {
    let params = SimParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let speeds: Vec<f64> = (0..500).map(|_| draw_speed(&params, &mut rng)).collect();
    let mean = speeds.iter().sum::<f64>() / 500.0;
    let band = 3.0 * (0.05f64 / 500.0).sqrt();
    assert!((mean - 1.4).abs() <= band, "{mean}");
    assert!(speeds.iter().all(|&s| s > 0.0));
}

#[test]
fn passengers_in_a_window_walk_at_their_drawn_speeds() {
    let scene = default_scene(4);
    let w = simulate_window(&scene, 0, &SimParams::default(), 600, false, 2).unwrap();
    let n = w.passengers.len() as f64;
    let mean = w.passengers.iter().map(|p| p.speed).sum::<f64>() / n;
    assert!((mean - 1.4).abs() <= 4.0 * (0.05 / n).sqrt(), "{mean} over {n}");
}

#[test]
fn centroids_stay_on_the_floor() {
    let scene = default_scene(6);
    for outlier in [false, true] {
        let w = simulate_window(&scene, 5, &SimParams::default(), 300, outlier, 3).unwrap();
        assert!(w
            .records
            .iter()
            .all(|r| (0.0..=scene.side).contains(&r.x) && (0.0..=scene.side).contains(&r.y) && (0.0..300.0).contains(&r.t)));
    }
}

#[test]
fn experiments_replay_bit_exactly() {
    let scene = default_scene(5);
    let spec = ExperimentSpec { n_maps: 40, p_out: 0.3, ..ExperimentSpec::default() };
    let a = generate_experiment(&scene, &SimParams::default(), &spec, 99).unwrap();
    let b = generate_experiment(&scene, &SimParams::default(), &spec, 99).unwrap();
    assert_eq!(a.windows, b.windows);
    let bits = |m: &nalgebra::DMatrix<f64>| m.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(a.data.matrix()), bits(b.data.matrix()));
    let c = generate_experiment(&scene, &SimParams::default(), &spec, 100).unwrap();
    assert_ne!(bits(a.data.matrix()), bits(c.data.matrix()));
    assert_eq!(a.data.matrix().shape(), c.data.matrix().shape());
}

#[test]
fn outlier_maps_stand_out_from_every_class_mean() {
    let scene = default_scene(2);
    let spec = ExperimentSpec { n_maps: 120, p_out: 0.2, ..ExperimentSpec::default() };
    let exp = generate_experiment(&scene, &SimParams::default(), &spec, 12).unwrap();
    let x = exp.data.matrix();
    let d = x.nrows();
    let mut means = vec![vec![0.0; d]; spec.n_classes];
    let mut counts = vec![0usize; spec.n_classes];
    for (i, l) in exp.truth.labels.iter().enumerate() {
        if let Some(c) = *l {
            counts[c] += 1;
            for r in 0..d {
                means[c][r] += x[(r, i)];
            }
        }
    }
    for (m, &n) in means.iter_mut().zip(&counts) {
        m.iter_mut().for_each(|v| *v /= n as f64);
    }
    let nearest = |i: usize| {
        means
            .iter()
            .map(|m| (0..d).map(|r| (x[(r, i)] - m[r]).abs()).sum::<f64>())
            .fold(f64::INFINITY, f64::min)
    };
    let noise = (0..x.ncols()).filter(|&i| !exp.truth.is_outlier(i)).map(nearest).fold(0.0, f64::max);
    for i in (0..x.ncols()).filter(|&i| exp.truth.is_outlier(i)) {
        assert!(nearest(i) > noise, "outlier {i}: {} vs noise floor {noise}", nearest(i));
    }
}

#[test]
fn window_maps_are_multiples_of_one_over_slices() {
    let scene = default_scene(0);
    let w = simulate_window(&scene, 1, &SimParams::default(), 120, true, 5).unwrap();
    let grid = GridSpec::square(scene.side, 1.0).unwrap();
    let windowing = Windowing { start: 0.0, window_len: 120, n_windows: Some(1) };
    let map = &occupancy_maps(&w.records, &grid, &windowing).unwrap()[0];
    for v in &map.values {
        let k = v * map.n_slices as f64;
        assert!((k - k.round()).abs() < 1e-9);
    }
}
