use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use flowscape::baselines::UNASSIGNED;
use flowscape::grid::{GridSpec, OccupancyMap};
use flowscape::io::{self, LabelingReport};
use flowscape::sim::{default_scene, generate_experiment, scene_seed, trial_seed, Manifest, SimParams};
use flowscape::subspace::{Labeling, PipelineConfig, Provenance};
use tempfile::TempDir;

fn flowscape(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flowscape"))
        .args(args)
        .env_remove("FLOWSCAPE_JOBS")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = flowscape(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

const SMALL: [&str; 8] = ["--n-maps", "30", "--window", "60", "--n-classes", "3", "--p-out", "0.2"];

fn simulate(dir: &Path, seed: &str, trials: &str) {
    let mut args = vec!["simulate", "--out", p(dir), "--seed", seed, "--trials", trials];
    args.extend(SMALL);
    ok(&args);
}

#[test]
fn simulate_is_byte_reproducible_and_maps_match_the_library() {
    let tmp = TempDir::new().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    simulate(&a, "7", "1");
    simulate(&b, "7", "1");
    for f in ["manifest.json", "trial_000.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }

    let maps_path = tmp.path().join("maps.csv");
    ok(&["maps", "--manifest", p(&a.join("manifest.json")), "--out", p(&maps_path)]);
    let maps = io::read_maps(&maps_path).unwrap();
    let manifest: Manifest = io::read_json(&a.join("manifest.json")).unwrap();
    let scene = default_scene(scene_seed(7));
    assert_eq!(manifest.scene, scene);
    let exp = generate_experiment(&scene, &SimParams::default(), &manifest.experiment, trial_seed(7, 0)).unwrap();
    assert_eq!(maps, exp.maps);
}

#[test]
fn validation_failures_exit_with_two() {
    let tmp = TempDir::new().unwrap();
    let out = flowscape(&["simulate", "--out", p(tmp.path()), "--p-out", "1.0", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(2));

    let out = flowscape(&["cluster", "--maps", "nowhere.csv", "--out", p(tmp.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--seed"));

    let out = flowscape(&["cluster", "--maps", "nowhere.csv", "--out", p(tmp.path()), "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));

    let out = flowscape(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_maps_report_the_line() {
    let tmp = TempDir::new().unwrap();
    let grid = GridSpec::square(2.0, 1.0).unwrap();
    let path = tmp.path().join("bad.csv");
    io::write_json(&io::grid_sidecar(&path), &grid).unwrap();
    fs::write(&path, "window_start,window_len,n_slices,c0,c1,c2,c3\n0.0,1.0,1,1.0,0.0,0.0,0.0\n1.0,1.0,1,0.5,oops,0.0,0.0\n").unwrap();
    let out = flowscape(&["cluster", "--maps", p(&path), "--out", p(tmp.path()), "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.csv:3:"), "{err}");
    assert!(err.contains("oops"), "{err}");
}

/// Three disjoint floor patterns, each repeated four times.
fn toy_maps() -> Vec<OccupancyMap> {
    let grid = GridSpec::square(4.0, 1.0).unwrap();
    let patterns = [[0usize, 1, 2, 3], [4, 5, 8, 9], [10, 11, 14, 15]];
    (0..12)
        .map(|i| {
            let mut values = vec![0.0; 16];
            for (j, &c) in patterns[i % 3].iter().enumerate() {
                values[c] = 0.25 * (j + 1) as f64;
            }
            OccupancyMap {
                spec: grid.clone(),
                values,
                window_start: 300.0 * i as f64,
                window_len: 300.0,
                n_slices: 300,
            }
        })
        .collect()
}

#[test]
fn cluster_toy_classes_and_round_trip_artifacts() {
    let tmp = TempDir::new().unwrap();
    let maps = tmp.path().join("toy.csv");
    io::write_maps(&maps, &toy_maps()).unwrap();
    let out_dir = tmp.path().join("out");
    let stdout = ok(&["cluster", "--maps", p(&maps), "--out", p(&out_dir), "--seed", "3"]);
    assert!(stdout.contains("3 classes"), "{stdout}");

    let report: LabelingReport = io::read_json(&out_dir.join("labeling.json")).unwrap();
    assert_eq!(report.labeling.k, 3);
    for i in 0..12 {
        assert_eq!(report.labeling.labels[i], report.labeling.labels[i % 3]);
    }
    for c in 0..3 {
        assert!(out_dir.join(format!("class_{c:02}.pgm")).is_file());
    }

    let again = tmp.path().join("again");
    let (irr, flags) = io::read_irregularity(&out_dir.join("irregularity.csv")).unwrap();
    let split = flowscape::self_expressive::RegularSplit {
        regular_idx: (0..12).filter(|&i| !flags[i]).collect(),
        irregular_idx: (0..12).filter(|&i| flags[i]).collect(),
        p: 0.5,
        implied_threshold: f64::INFINITY,
    };
    io::write_irregularity(&again.join("irregularity.csv"), &irr, &split).unwrap();
    io::write_json(&again.join("labeling.json"), &report).unwrap();
    io::write_matrix(&again.join("coefficients.csv"), &io::read_matrix(&out_dir.join("coefficients.csv")).unwrap()).unwrap();
    io::write_matrix(&again.join("nsi.csv"), &io::read_matrix(&out_dir.join("nsi.csv")).unwrap()).unwrap();
    io::write_pgm(&again.join("class_00.pgm"), &io::read_pgm(&out_dir.join("class_00.pgm")).unwrap()).unwrap();
    for f in ["irregularity.csv", "labeling.json", "coefficients.csv", "nsi.csv", "class_00.pgm"] {
        assert_eq!(fs::read(out_dir.join(f)).unwrap(), fs::read(again.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn operating_point_flags_are_accepted() {
    let tmp = TempDir::new().unwrap();
    let maps = tmp.path().join("toy.csv");
    io::write_maps(&maps, &toy_maps()).unwrap();
    let out = tmp.path().join("out");
    ok(&["cluster", "--maps", p(&maps), "--out", p(&out), "--seed", "1", "--p", "0.5", "--th-nsi", "0.93", "--gamma", "6"]);
    let report: LabelingReport = io::read_json(&out.join("labeling.json")).unwrap();
    assert_eq!(report.gamma, 6);
    assert_eq!(report.config.th_nsi, 0.93);
}

#[test]
fn evaluate_perfect_labels_scores_zero() {
    let tmp = TempDir::new().unwrap();
    simulate(tmp.path(), "5", "1");
    let manifest: Manifest = io::read_json(&tmp.path().join("manifest.json")).unwrap();
    let windows = &manifest.trials[0].windows;
    let labels: Vec<i64> = windows.iter().map(|w| if w.outlier { UNASSIGNED } else { w.config as i64 }).collect();
    let report = LabelingReport {
        labeling: Labeling {
            k: 3,
            provenance: vec![Provenance::RegularFromSplit; labels.len()],
            labels,
        },
        map_indices: (0..windows.len()).collect(),
        window_starts: windows.iter().map(|w| w.window_start).collect(),
        k_est: 3,
        gamma: 3,
        config: PipelineConfig::default(),
    };
    let labels_path = tmp.path().join("perfect.json");
    io::write_json(&labels_path, &report).unwrap();
    let out = tmp.path().join("eval");
    ok(&[
        "evaluate", "--manifest", p(&tmp.path().join("manifest.json")), "--out", p(&out), "--seed", "1",
        "--labels", p(&labels_path), "--trial", "0",
    ]);
    let rows = io::read_results(&out.join("results.csv")).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].error, 0.0);
}

#[test]
fn evaluate_aggregates_trials_and_sweeps_p() {
    let tmp = TempDir::new().unwrap();
    simulate(tmp.path(), "9", "2");
    let manifest = tmp.path().join("manifest.json");
    let run = |jobs: &str, out: &Path| {
        ok(&[
            "--jobs", jobs, "evaluate", "--manifest", p(&manifest), "--out", p(out), "--seed", "4",
            "--methods", "proposed,kmeans,kmedoids", "--p-sweep", "0.1:0.05:0.7",
        ])
    };
    let one = tmp.path().join("one");
    let two = tmp.path().join("two");
    let table = run("1", &one);
    run("2", &two);
    for f in ["results.csv", "table.csv", "sweep.csv"] {
        assert_eq!(fs::read(one.join(f)).unwrap(), fs::read(two.join(f)).unwrap(), "{f}");
    }
    assert!(table.contains("proposed"));

    let rows = io::read_results(&one.join("results.csv")).unwrap();
    assert_eq!(rows.len(), 6);
    let agg = io::read_aggregate(&one.join("table.csv")).unwrap();
    assert_eq!(agg.len(), 3);
    assert!(agg.iter().all(|r| r.n == 2));
    let sweep = io::read_sweep(&one.join("sweep.csv")).unwrap();
    assert_eq!(sweep.len(), 2 * 13);

    for f in ["results.csv", "table.csv", "sweep.csv"] {
        let path = one.join(f);
        let copy = tmp.path().join(format!("copy_{f}"));
        match f {
            "results.csv" => io::write_results(&copy, &io::read_results(&path).unwrap()).unwrap(),
            "table.csv" => io::write_aggregate(&copy, &io::read_aggregate(&path).unwrap()).unwrap(),
            _ => io::write_sweep(&copy, &io::read_sweep(&path).unwrap()).unwrap(),
        }
        assert_eq!(fs::read(&path).unwrap(), fs::read(&copy).unwrap(), "{f}");
    }
}

#[test]
fn count_and_render_write_their_artifacts() {
    let tmp = TempDir::new().unwrap();
    simulate(tmp.path(), "2", "1");
    let counts = tmp.path().join("counts.csv");
    ok(&[
        "count", "--centroids", p(&tmp.path().join("trial_000.csv")), "--box", "0,0,20,20", "--bucket", "600",
        "--out", p(&counts),
    ]);
    let rows = io::read_counts(&counts).unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.count > 0));

    let maps = tmp.path().join("maps.csv");
    ok(&["maps", "--manifest", p(&tmp.path().join("manifest.json")), "--out", p(&maps)]);
    let img = tmp.path().join("map.pgm");
    ok(&["render", "--maps", p(&maps), "--index", "4", "--out", p(&img)]);
    let pgm = io::read_pgm(&img).unwrap();
    assert_eq!((pgm.width, pgm.height), (20, 20));
    assert_eq!(pgm.pixels.iter().max(), Some(&255));

    let out = flowscape(&["render", "--maps", p(&maps), "--index", "99", "--out", p(&img)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_supplies_seed_and_flags_override() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("run.json");
    fs::write(&cfg, r#"{"seed": 11, "experiment": {"n_maps": 20, "window": 30, "n_classes": 2, "p_out": 0.1}}"#).unwrap();
    let out = tmp.path().join("sim");
    ok(&["--config", p(&cfg), "simulate", "--out", p(&out), "--trials", "1", "--n-maps", "24"]);
    let manifest: Manifest = io::read_json(&out.join("manifest.json")).unwrap();
    assert_eq!(manifest.seed, 11);
    assert_eq!(manifest.experiment.n_maps, 24);
    assert_eq!(manifest.experiment.window, 30);

    fs::write(&cfg, r#"{"seed": 11, "unknown": 1}"#).unwrap();
    let bad = flowscape(&["--config", p(&cfg), "simulate", "--out", p(&out)]);
    assert_eq!(bad.status.code(), Some(2));
}
