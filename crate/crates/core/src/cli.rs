//! Command-line front end: `simulate`, `maps`, `cluster`, `evaluate`, `count`
//! and `render`.
//!
//! Settings come from an optional JSON run configuration and are overridden
//! by flags. Exit status is 0 on success, 2 on invalid input and 3 when a run
//! fails.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::baselines::{clustering_error, Baseline, BaselineConfig, GroundTruth};
use crate::error::{Error, Result};
use crate::grid::{count_exit_box, occupancy_maps, CountingBox, DataMatrix, GridSpec, OccupancyMap, Windowing};
use crate::io::{self, LabelingReport, Pgm, ResultRow, SweepRow};
use crate::self_expressive::{irregularity, solve_coefficients};
use crate::sim::{
    default_scene, derive_seed, scene_seed, simulate_trial_records, trial_seed, ExperimentSpec, Manifest, Ordering,
    SimParams, TrialManifest,
};
use crate::subspace::{cluster_with_coefficients, run_pipeline, PipelineConfig};

/// Exit status for invalid input.
pub const EXIT_VALIDATION: i32 = 2;
/// Exit status for a run that failed on valid input.
pub const EXIT_RUNTIME: i32 = 3;

/// Contents of a `--config` file. Every section is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub pipeline: PipelineConfig,
    pub sim: SimParams,
    pub experiment: ExperimentSpec,
    pub baselines: BaselineConfig,
}

#[derive(Debug, Parser)]
#[command(name = "flowscape", version, about = "Flow-pattern discovery from overhead occupancy maps")]
pub struct Cli {
    /// Worker threads; results do not depend on this value.
    #[arg(long, global = true, env = "FLOWSCAPE_JOBS")]
    pub jobs: Option<usize>,
    /// JSON run configuration; flags take precedence over its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate trials and write centroid streams plus a manifest.
    Simulate(SimulateArgs),
    /// Turn a centroid stream into windowed occupancy maps.
    Maps(MapsArgs),
    /// Cluster occupancy maps and write the labeling with its intermediates.
    Cluster(ClusterArgs),
    /// Score the pipeline and the reference clusterers against ground truth.
    Evaluate(EvaluateArgs),
    /// Count people passing through a box in fixed time buckets.
    Count(CountArgs),
    /// Render a map or a matrix as a grayscale PGM image.
    Render(RenderArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Fraction of outlier windows, in [0, 1).
    #[arg(long)]
    pub p_out: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Windows per trial.
    #[arg(long)]
    pub n_maps: Option<usize>,
    /// Window length in seconds.
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub n_classes: Option<usize>,
    /// Grid cell side in meters.
    #[arg(long)]
    pub cell_size: Option<f64>,
    /// Put regular windows in random order instead of contiguous runs.
    #[arg(long)]
    pub shuffled: bool,
    #[arg(long)]
    pub detect_prob: Option<f64>,
    #[arg(long)]
    pub spawn_rate: Option<f64>,
    #[arg(long)]
    pub lateral_sigma: Option<f64>,
}

#[derive(Debug, Args)]
pub struct MapsArgs {
    /// Output maps CSV; the grid is written next to it.
    #[arg(long)]
    pub out: PathBuf,
    /// Centroid CSV; defaults to the trial's stream when `--manifest` is given.
    #[arg(long)]
    pub centroids: Option<PathBuf>,
    /// Simulation manifest supplying the grid and windowing.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub trial: usize,
    /// Grid JSON, used when no manifest is given.
    #[arg(long)]
    pub grid: Option<PathBuf>,
    /// Side of a square floor anchored at the origin, used without a grid file.
    #[arg(long)]
    pub side: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub cell_size: f64,
    /// Window length in seconds.
    #[arg(long)]
    pub window: Option<usize>,
    /// Time of the first slice.
    #[arg(long)]
    pub start: Option<f64>,
    #[arg(long)]
    pub n_windows: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    /// Fraction of maps flagged irregular.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub th_nsi: Option<f64>,
    #[arg(long)]
    pub th_reclass: Option<f64>,
    /// Number of spectral segments; estimated when omitted.
    #[arg(long)]
    pub gamma: Option<usize>,
    #[arg(long)]
    pub eps_eig: Option<f64>,
    #[arg(long)]
    pub energy: Option<f64>,
    #[arg(long)]
    pub restarts: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    /// Maps CSV with its grid sidecar.
    #[arg(long)]
    pub maps: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Simulation manifests; repeat for several outlier levels.
    #[arg(long, required = true)]
    pub manifest: Vec<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated methods among proposed, kmeans, kmedoids, dbscan.
    #[arg(long, value_delimiter = ',', default_value = "proposed,kmeans,kmedoids,dbscan")]
    pub methods: Vec<String>,
    /// Score an existing labeling of `--trial` instead of running methods.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long)]
    pub trial: Option<usize>,
    /// Sweep of the split fraction as `start:step:end`.
    #[arg(long)]
    pub p_sweep: Option<String>,
    #[command(flatten)]
    pub pipeline: PipelineArgs,
    #[arg(long)]
    pub replicates: Option<usize>,
    #[arg(long)]
    pub min_pts: Option<usize>,
    #[arg(long)]
    pub dbscan_eps: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[arg(long)]
    pub centroids: PathBuf,
    /// Counting box as `x_min,y_min,x_max,y_max`.
    #[arg(long = "box", value_delimiter = ',', required = true, allow_negative_numbers = true)]
    pub region: Vec<f64>,
    /// Bucket length in seconds.
    #[arg(long, default_value_t = 60.0)]
    pub bucket: f64,
    /// Time span as `start,end`; the span of the records when omitted.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub span: Option<Vec<f64>>,
    /// Output CSV.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Maps CSV to draw one map from.
    #[arg(long, conflicts_with = "matrix")]
    pub maps: Option<PathBuf>,
    /// Row of the maps file.
    #[arg(long, default_value_t = 0)]
    pub index: usize,
    /// Numeric CSV matrix, drawn with entry (0, 0) at the top left.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// Output PGM.
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses `args` (program name first), runs the command and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                EXIT_VALIDATION
            } else {
                EXIT_RUNTIME
            }
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let config = match &cli.config {
        Some(path) => {
            require_file(path)?;
            io::read_json::<RunConfig>(path)?
        }
        None => RunConfig::default(),
    };
    let jobs = cli.jobs.or(config.jobs);
    if jobs == Some(0) {
        return Err(Error::InvalidArgument("--jobs must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::Internal(format!("cannot start worker threads: {e}")))?;
    pool.install(|| match cli.command {
        Command::Simulate(a) => cmd_simulate(&a, config),
        Command::Maps(a) => cmd_maps(&a),
        Command::Cluster(a) => cmd_cluster(&a, config),
        Command::Evaluate(a) => cmd_evaluate(&a, config),
        Command::Count(a) => cmd_count(&a),
        Command::Render(a) => cmd_render(&a),
    })
}

fn require_file(path: &Path) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("input file {} does not exist", path.display())))
    }
}

fn require_seed(flag: Option<u64>, config: &RunConfig) -> Result<u64> {
    flag.or(config.seed).ok_or_else(|| {
        Error::InvalidArgument("an explicit --seed (or `seed` in the config file) is required".into())
    })
}

fn apply_pipeline(args: &PipelineArgs, cfg: &mut PipelineConfig) {
    if let Some(v) = args.p {
        cfg.p = v;
    }
    if let Some(v) = args.th_nsi {
        cfg.th_nsi = v;
    }
    if let Some(v) = args.th_reclass {
        cfg.th_reclass = Some(v);
    }
    if let Some(v) = args.gamma {
        cfg.gamma = Some(v);
    }
    if let Some(v) = args.eps_eig {
        cfg.eps_eig = v;
    }
    if let Some(v) = args.energy {
        cfg.energy = v;
    }
    if let Some(v) = args.restarts {
        cfg.kmeans_restarts = v;
    }
}

fn trial_file(trial: usize) -> String {
    format!("trial_{trial:03}.csv")
}

pub fn cmd_simulate(args: &SimulateArgs, config: RunConfig) -> Result<()> {
    let seed = require_seed(args.seed, &config)?;
    let mut params = config.sim;
    let mut spec = config.experiment;
    if let Some(v) = args.p_out {
        spec.p_out = v;
    }
    if let Some(v) = args.trials {
        spec.n_trials = v;
    }
    if let Some(v) = args.n_maps {
        spec.n_maps = v;
    }
    if let Some(v) = args.window {
        spec.window = v;
    }
    if let Some(v) = args.n_classes {
        spec.n_classes = v;
    }
    if let Some(v) = args.cell_size {
        spec.cell_size = v;
    }
    if args.shuffled {
        spec.ordering = Ordering::Shuffled;
    }
    if let Some(v) = args.detect_prob {
        params.detect_prob = v;
    }
    if let Some(v) = args.spawn_rate {
        params.spawn_rate = v;
    }
    if let Some(v) = args.lateral_sigma {
        params.lateral_sigma = v;
    }
    spec.validate()?;
    params.validate()?;
    if spec.n_trials == 0 {
        return Err(Error::InvalidSpec("at least one trial is required".into()));
    }
    let scene = default_scene(scene_seed(seed));
    if spec.n_classes > scene.configs.len() {
        return Err(Error::InvalidSpec(format!(
            "{} classes requested, the scene has {}",
            spec.n_classes,
            scene.configs.len()
        )));
    }
    let grid = GridSpec::square(scene.side, spec.cell_size)?;
    let mut trials = Vec::with_capacity(spec.n_trials);
    for t in 0..spec.n_trials {
        let tseed = trial_seed(seed, t);
        let (windows, records) = simulate_trial_records(&scene, &params, &spec, tseed)?;
        let name = trial_file(t);
        io::write_centroids(&args.out.join(&name), &records)?;
        println!("trial {t}: {} windows, {} detections -> {}", windows.len(), records.len(), name);
        trials.push(TrialManifest {
            trial: t,
            seed: tseed,
            centroids: name,
            windows,
        });
    }
    let manifest = Manifest {
        seed,
        scene,
        params,
        experiment: spec,
        grid,
        trials,
    };
    io::write_json(&args.out.join("manifest.json"), &manifest)
}

fn load_manifest(path: &Path) -> Result<Manifest> {
    require_file(path)?;
    let m: Manifest = io::read_json(path)?;
    m.experiment.validate()?;
    Ok(m)
}

fn trial_entry(manifest: &Manifest, trial: usize) -> Result<&TrialManifest> {
    manifest
        .trials
        .iter()
        .find(|t| t.trial == trial)
        .ok_or_else(|| Error::InvalidArgument(format!("manifest has no trial {trial}")))
}

fn manifest_dir(path: &Path) -> &Path {
    path.parent().unwrap_or(Path::new("."))
}

/// Occupancy maps of one trial of a manifest.
pub fn trial_maps(manifest_path: &Path, manifest: &Manifest, trial: usize) -> Result<Vec<OccupancyMap>> {
    let entry = trial_entry(manifest, trial)?;
    let path = manifest_dir(manifest_path).join(&entry.centroids);
    require_file(&path)?;
    let records = io::read_centroids(&path)?;
    occupancy_maps(&records, &manifest.grid, &manifest.windowing())
}

pub fn cmd_maps(args: &MapsArgs) -> Result<()> {
    let maps = match &args.manifest {
        Some(mpath) => {
            let manifest = load_manifest(mpath)?;
            let mut windowing = manifest.windowing();
            if let Some(w) = args.window {
                windowing.window_len = w;
            }
            let records = match &args.centroids {
                Some(c) => {
                    require_file(c)?;
                    io::read_centroids(c)?
                }
                None => {
                    let entry = trial_entry(&manifest, args.trial)?;
                    let path = manifest_dir(mpath).join(&entry.centroids);
                    require_file(&path)?;
                    io::read_centroids(&path)?
                }
            };
            occupancy_maps(&records, &manifest.grid, &windowing)?
        }
        None => {
            let centroids = args
                .centroids
                .as_ref()
                .ok_or_else(|| Error::InvalidArgument("--centroids or --manifest is required".into()))?;
            require_file(centroids)?;
            let grid = match (&args.grid, args.side) {
                (Some(g), _) => {
                    require_file(g)?;
                    io::read_json::<GridSpec>(g)?
                }
                (None, Some(side)) => GridSpec::square(side, args.cell_size)?,
                (None, None) => return Err(Error::InvalidArgument("--grid or --side is required".into())),
            };
            let defaults = Windowing::default();
            let windowing = Windowing {
                start: args.start.unwrap_or(defaults.start),
                window_len: args.window.unwrap_or(defaults.window_len),
                n_windows: args.n_windows,
            };
            occupancy_maps(&io::read_centroids(centroids)?, &grid, &windowing)?
        }
    };
    io::write_maps(&args.out, &maps)?;
    let empty = maps.iter().filter(|m| m.is_empty()).count();
    println!("{} maps ({} empty) -> {}", maps.len(), empty, args.out.display());
    Ok(())
}

fn class_means(x: &DMatrix<f64>, labels: &[i64], k: usize) -> Vec<Vec<f64>> {
    (0..k)
        .map(|c| {
            let members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == c as i64).collect();
            let mut mean = vec![0.0; x.nrows()];
            for &i in &members {
                for (r, m) in mean.iter_mut().enumerate() {
                    *m += x[(r, i)];
                }
            }
            mean.iter().map(|v| v / members.len().max(1) as f64).collect()
        })
        .collect()
}

pub fn cmd_cluster(args: &ClusterArgs, config: RunConfig) -> Result<()> {
    let seed = require_seed(args.seed, &config)?;
    require_file(&args.maps)?;
    let mut cfg = config.pipeline;
    apply_pipeline(&args.pipeline, &mut cfg);
    cfg.seed = seed;
    cfg.validate()?;
    let maps = io::read_maps(&args.maps)?;
    let data = DataMatrix::from_maps(&maps)?;
    let out = run_pipeline(data.matrix(), &cfg)?;
    let report = LabelingReport {
        labeling: out.labeling.clone(),
        map_indices: data.kept_indices().to_vec(),
        window_starts: data.window_starts().to_vec(),
        k_est: out.k_est,
        gamma: out.gamma,
        config: cfg,
    };
    io::write_json(&args.out.join("labeling.json"), &report)?;
    io::write_irregularity(&args.out.join("irregularity.csv"), &out.irregularity, &out.split)?;
    io::write_matrix(&args.out.join("coefficients.csv"), out.coefficients.entries())?;
    io::write_matrix(&args.out.join("nsi.csv"), &out.nsi)?;
    let spec = data.spec();
    for (c, mean) in class_means(data.matrix(), &out.labeling.labels, out.labeling.k).iter().enumerate() {
        let img = Pgm::from_grid(mean, spec.rows(), spec.cols())?;
        io::write_pgm(&args.out.join(format!("class_{c:02}.pgm")), &img)?;
    }
    println!(
        "{} maps: {} classes (estimated {}, gamma {}), {} irregular ({:.1}%)",
        data.len(),
        out.labeling.k,
        out.k_est,
        out.gamma,
        out.labeling.n_irregular(),
        100.0 * out.labeling.irregular_fraction()
    );
    Ok(())
}

/// `start:step:end` inclusive, values rounded to twelve decimals.
pub fn parse_sweep(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Error::InvalidArgument(format!("sweep `{spec}` is not start:step:end"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    let (start, step, end) = (nums[0], nums[1], nums[2]);
    if !(step > 0.0) || !(end >= start) || !start.is_finite() || !end.is_finite() {
        return Err(bad());
    }
    let n = ((end - start) / step + 1e-9).floor() as usize;
    Ok((0..=n)
        .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

enum Method {
    Proposed,
    Baseline(Baseline),
}

fn parse_methods(names: &[String]) -> Result<Vec<Method>> {
    names
        .iter()
        .map(|n| match n.trim() {
            "proposed" => Ok(Method::Proposed),
            other => Baseline::from_name(other)
                .map(Method::Baseline)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown method `{other}`"))),
        })
        .collect()
}

pub fn cmd_evaluate(args: &EvaluateArgs, config: RunConfig) -> Result<()> {
    let seed = require_seed(args.seed, &config)?;
    let mut cfg = config.pipeline;
    apply_pipeline(&args.pipeline, &mut cfg);
    cfg.validate()?;
    let mut bcfg = config.baselines;
    if let Some(v) = args.replicates {
        bcfg.replicates = v;
    }
    if let Some(v) = args.min_pts {
        bcfg.min_pts = v;
    }
    if let Some(v) = args.dbscan_eps {
        bcfg.dbscan_eps = Some(v);
    }
    let methods = parse_methods(&args.methods)?;
    let sweep = args.p_sweep.as_deref().map(parse_sweep).transpose()?;
    if let Some(ps) = &sweep {
        for &p in ps {
            PipelineConfig { p, ..cfg.clone() }.validate()?;
        }
    }
    let manifests = args
        .manifest
        .iter()
        .map(|p| load_manifest(p).map(|m| (p.as_path(), m)))
        .collect::<Result<Vec<_>>>()?;

    let mut results = Vec::new();
    let mut sweep_rows = Vec::new();
    if let Some(labels) = &args.labels {
        let [(_, manifest)] = manifests.as_slice() else {
            return Err(Error::InvalidArgument("--labels needs exactly one --manifest".into()));
        };
        let trial = args
            .trial
            .ok_or_else(|| Error::InvalidArgument("--labels needs --trial".into()))?;
        require_file(labels)?;
        let report: LabelingReport = io::read_json(labels)?;
        let entry = trial_entry(manifest, trial)?;
        if report.map_indices.len() != report.labeling.labels.len() {
            return Err(Error::ShapeMismatch("labeling and map indices differ in length".into()));
        }
        let truth = GroundTruth::from_windows(&entry.windows, &report.map_indices)?;
        results.push(ResultRow {
            method: "labels".into(),
            p_out: manifest.experiment.p_out,
            trial,
            error: clustering_error(&report.labeling.labels, &truth)?,
        });
    } else {
        for (mpath, manifest) in &manifests {
            let k = manifest.experiment.n_classes;
            let trials: Vec<usize> = match args.trial {
                Some(t) => vec![t],
                None => manifest.trials.iter().map(|t| t.trial).collect(),
            };
            for t in trials {
                let entry = trial_entry(manifest, t)?;
                let maps = trial_maps(mpath, manifest, t)?;
                let data = DataMatrix::from_maps(&maps)?;
                let truth = GroundTruth::from_windows(&entry.windows, data.kept_indices())?;
                let x = data.matrix();
                let run_seed = derive_seed(seed, t as u64);
                let p_out = manifest.experiment.p_out;
                let needs_solve = sweep.is_some() || methods.iter().any(|m| matches!(m, Method::Proposed));
                let solved = if needs_solve {
                    let c = solve_coefficients(x, &cfg.solver)?;
                    let irr = irregularity(x, &c)?;
                    Some((c, irr))
                } else {
                    None
                };
                for m in &methods {
                    let (name, labels) = match m {
                        Method::Proposed => {
                            let (c, irr) = solved.clone().expect("solved above");
                            let run_cfg = PipelineConfig { seed: run_seed, ..cfg.clone() };
                            let out = cluster_with_coefficients(x, c, irr, &run_cfg)?;
                            ("proposed", out.labeling.labels)
                        }
                        Method::Baseline(b) => (b.name(), b.run(x, k, &bcfg, run_seed)?),
                    };
                    let error = clustering_error(&labels, &truth)?;
                    println!("p_out {p_out} trial {t} {name}: {error:.4}");
                    results.push(ResultRow {
                        method: name.into(),
                        p_out,
                        trial: t,
                        error,
                    });
                }
                if let (Some(ps), Some((c, irr))) = (&sweep, &solved) {
                    for &p in ps {
                        let run_cfg = PipelineConfig { p, seed: run_seed, ..cfg.clone() };
                        let out = cluster_with_coefficients(x, c.clone(), irr.clone(), &run_cfg)?;
                        sweep_rows.push(SweepRow {
                            p_out,
                            p,
                            trial: t,
                            error: clustering_error(&out.labeling.labels, &truth)?,
                        });
                    }
                }
            }
        }
    }
    io::write_results(&args.out.join("results.csv"), &results)?;
    let table = io::aggregate(&results);
    io::write_aggregate(&args.out.join("table.csv"), &table)?;
    print!("{}", io::format_table(&table));
    if sweep.is_some() {
        io::write_sweep(&args.out.join("sweep.csv"), &sweep_rows)?;
    }
    Ok(())
}

pub fn cmd_count(args: &CountArgs) -> Result<()> {
    require_file(&args.centroids)?;
    let [x_min, y_min, x_max, y_max] = args.region[..] else {
        return Err(Error::InvalidArgument("--box takes x_min,y_min,x_max,y_max".into()));
    };
    let region = CountingBox::new(x_min, y_min, x_max, y_max)?;
    let span = match args.span.as_deref() {
        Some([a, b]) if b >= a => Some((*a, *b)),
        Some(s) => return Err(Error::InvalidArgument(format!("span {s:?} is not start,end with start <= end"))),
        None => None,
    };
    let records = io::read_centroids(&args.centroids)?;
    let counts = count_exit_box(&records, &region, args.bucket, span)?;
    io::write_counts(&args.out, &counts)?;
    let total: u64 = counts.iter().map(|c| c.count).sum();
    println!("{total} passages in {} buckets -> {}", counts.len(), args.out.display());
    Ok(())
}

pub fn cmd_render(args: &RenderArgs) -> Result<()> {
    let img = match (&args.maps, &args.matrix) {
        (Some(maps), None) => {
            require_file(maps)?;
            let maps = io::read_maps(maps)?;
            let map = maps.get(args.index).ok_or_else(|| {
                Error::InvalidArgument(format!("map {} out of range ({} maps)", args.index, maps.len()))
            })?;
            Pgm::from_map(map)?
        }
        (None, Some(matrix)) => {
            require_file(matrix)?;
            Pgm::from_matrix(&io::read_matrix(matrix)?)?
        }
        _ => return Err(Error::InvalidArgument("exactly one of --maps or --matrix is required".into())),
    };
    io::write_pgm(&args.out, &img)?;
    println!("{}x{} image -> {}", img.width, img.height, args.out.display());
    Ok(())
}
