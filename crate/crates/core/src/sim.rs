//! Synthetic crowd flows on a square floor with eight doors.
//!
//! Each ground-truth class is a configuration: a small set of door-to-door
//! paths that are active during a window. Passengers appear at the entry door
//! of every active path, walk it at a fixed personal speed with a fixed
//! lateral offset, and are detected once per second with a given probability.
//! Outlier windows add deviants that leave their path, walk through random
//! interior waypoints and rejoin it further on.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::GroundTruth;
use crate::error::{Error, Result};
use crate::grid::{occupancy_maps, CentroidRecord, DataMatrix, GridSpec, OccupancyMap, Windowing};

pub type Point = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSpec {
    pub from: usize,
    pub to: usize,
    pub points: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigSpec {
    pub name: String,
    pub paths: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub side: f64,
    pub doors: Vec<Point>,
    pub paths: Vec<PathSpec>,
    pub configs: Vec<ConfigSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimParams {
    pub speed_mean: f64,
    /// Variance of the walking speed.
    pub speed_var: f64,
    pub detect_prob: f64,
    /// Probability that a passenger enters in a given second; the passenger
    /// takes one of the configuration's paths uniformly at random.
    pub spawn_rate: f64,
    /// Standard deviation of the per-passenger lateral offset, meters.
    pub lateral_sigma: f64,
    /// Fraction of passengers that take one of the detours of an outlier window.
    pub detour_share: f64,
    /// Seconds simulated before the window opens so it starts in steady state.
    pub warmup: f64,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            speed_mean: 1.4,
            speed_var: 0.05,
            detect_prob: 0.96,
            spawn_rate: 1.0,
            lateral_sigma: 0.5,
            detour_share: 1.0,
            warmup: 60.0,
        }
    }
}

impl SimParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.speed_mean > 0.0
            && self.speed_var >= 0.0
            && self.detect_prob > 0.0
            && self.detect_prob <= 1.0
            && self.spawn_rate > 0.0
            && self.spawn_rate <= 1.0
            && self.lateral_sigma >= 0.0
            && (0.0..=1.0).contains(&self.detour_share)
            && self.warmup >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSpec(format!("invalid simulation parameters {self:?}")))
        }
    }
}

/// Temporal arrangement of the regular windows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ordering {
    /// Each class occupies a few contiguous runs of windows.
    Contiguous,
    /// Classes in random order.
    Shuffled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentSpec {
    pub n_maps: usize,
    /// Window length in seconds.
    pub window: usize,
    pub p_out: f64,
    pub n_trials: usize,
    /// Number of configurations of the scene used as classes.
    pub n_classes: usize,
    pub ordering: Ordering,
    pub runs_per_class: usize,
    pub cell_size: f64,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            n_maps: 576,
            window: 300,
            p_out: 0.0,
            n_trials: 20,
            n_classes: 10,
            ordering: Ordering::Contiguous,
            runs_per_class: 2,
            cell_size: 1.0,
        }
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.p_out) {
            return Err(Error::InvalidSpec(format!("outlier fraction {} outside [0, 1)", self.p_out)));
        }
        if self.n_maps == 0 || self.window == 0 || self.n_classes == 0 || self.runs_per_class == 0 {
            return Err(Error::InvalidSpec("experiment sizes must be positive".into()));
        }
        if !(self.cell_size > 0.0) {
            return Err(Error::InvalidSpec("cell size must be positive".into()));
        }
        Ok(())
    }

    pub fn n_outliers(&self) -> usize {
        (self.p_out * self.n_maps as f64).round() as usize
    }
}

/// SplitMix64 finalizer of `(master, index)`; seeds independent per-item streams.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone)]
struct Polyline {
    pts: Vec<Point>,
    cum: Vec<f64>,
}

impl Polyline {
    fn new(pts: Vec<Point>) -> Self {
        let mut cum = vec![0.0];
        for w in pts.windows(2) {
            let l = ((w[1][0] - w[0][0]).powi(2) + (w[1][1] - w[0][1]).powi(2)).sqrt();
            cum.push(cum.last().unwrap() + l);
        }
        Polyline { pts, cum }
    }

    fn len(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    /// Position and unit left normal at arc length `s`.
    fn at(&self, s: f64) -> (Point, Point) {
        let s = s.clamp(0.0, self.len());
        let seg = match self.cum.iter().position(|&c| c >= s) {
            Some(0) | None => 0,
            Some(k) => k - 1,
        }
        .min(self.pts.len().saturating_sub(2));
        let (a, b) = (self.pts[seg], self.pts[seg + 1]);
        let l = self.cum[seg + 1] - self.cum[seg];
        if l == 0.0 {
            return (a, [0.0, 0.0]);
        }
        let f = (s - self.cum[seg]) / l;
        let dir = [(b[0] - a[0]) / l, (b[1] - a[1]) / l];
        ([a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1])], [-dir[1], dir[0]])
    }

    fn prefix(&self, s: f64) -> Vec<Point> {
        let mut out: Vec<Point> = self.pts.iter().zip(&self.cum).filter(|(_, &c)| c < s).map(|(p, _)| *p).collect();
        out.push(self.at(s).0);
        out
    }

    fn suffix(&self, s: f64) -> Vec<Point> {
        let mut out = vec![self.at(s).0];
        out.extend(self.pts.iter().zip(&self.cum).filter(|(_, &c)| c > s).map(|(p, _)| *p));
        out
    }

    /// Points every `step` meters, including both ends.
    fn sample(&self, step: f64) -> Vec<Point> {
        let n = (self.len() / step).ceil() as usize;
        (0..=n).map(|k| self.at(k as f64 * step).0).collect()
    }
}

fn side_of(p: Point, side: f64) -> u8 {
    if p[1] == 0.0 {
        0
    } else if p[0] == side {
        1
    } else if p[1] == side {
        2
    } else {
        3
    }
}

/// Candidate door-to-door routes: straight lines across the floor, one-bend
/// routes between adjacent walls, and one-bend loops between doors on the
/// same wall.
fn candidate_paths(doors: &[Point], side: f64) -> Vec<PathSpec> {
    let mut out = Vec::new();
    for a in 0..doors.len() {
        for b in a + 1..doors.len() {
            let (pa, pb) = (doors[a], doors[b]);
            let (sa, sb) = (side_of(pa, side), side_of(pb, side));
            let mut push = |points: Vec<Point>| out.push(PathSpec { from: a, to: b, points });
            if sa == sb {
                let mid = [(pa[0] + pb[0]) / 2.0, (pa[1] + pb[1]) / 2.0];
                let inward = [side / 2.0 - mid[0], side / 2.0 - mid[1]];
                let n = (inward[0].powi(2) + inward[1].powi(2)).sqrt();
                let depth = 0.4 * side;
                push(vec![pa, [mid[0] + depth * inward[0] / n, mid[1] + depth * inward[1] / n], pb]);
            } else if (sa + sb) % 2 == 0 {
                push(vec![pa, pb]);
            } else {
                push(vec![pa, pb]);
                let corner = if sa % 2 == 0 { [pa[0], pb[1]] } else { [pb[0], pa[1]] };
                push(vec![pa, corner, pb]);
            }
        }
    }
    out
}

/// Cells crossed by the noiseless paths of a configuration.
pub fn ideal_cells(scene: &SceneSpec, config: usize, spec: &GridSpec) -> BTreeSet<usize> {
    let mut cells = BTreeSet::new();
    for &p in &scene.configs[config].paths {
        for q in Polyline::new(scene.paths[p].points.clone()).sample(0.05) {
            let (x, y) = clamp_point(q, scene.side);
            if let Some(c) = spec.cell_of(x, y) {
                cells.insert(c);
            }
        }
    }
    cells
}

fn overlap(a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> f64 {
    let shared = a.intersection(b).count();
    shared as f64 / a.len().min(b.len()).max(1) as f64
}

/// Eight doors, two per wall at thirds, and ten configurations of 1 to 3
/// paths whose ideal footprints overlap by less than half.
///
/// Every footprint covers between `2.1 side` and `2.5 side` square meters and
/// the mean route length lies between `0.85 side` and `side`, so all
/// configurations carry a comparable amount of traffic.
pub fn default_scene(seed: u64) -> SceneSpec {
    scene_with(20.0, 10, seed).expect("default scene is constructible")
}

pub fn scene_with(side: f64, n_configs: usize, seed: u64) -> Result<SceneSpec> {
    let (a, b) = (side / 3.0, 2.0 * side / 3.0);
    let doors = vec![[a, 0.0], [b, 0.0], [side, a], [side, b], [b, side], [a, side], [0.0, b], [0.0, a]];
    let paths = candidate_paths(&doors, side);
    let grid = GridSpec::square(side, 1.0)?;
    let mut scene = SceneSpec {
        side,
        doors,
        paths,
        configs: Vec::new(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut footprints: Vec<BTreeSet<usize>> = Vec::new();
    for _ in 0..20_000 {
        if scene.configs.len() == n_configs {
            break;
        }
        let size = rng.gen_range(1..=3);
        let mut chosen: Vec<usize> = (0..scene.paths.len()).collect::<Vec<_>>().choose_multiple(&mut rng, size).copied().collect();
        chosen.sort_unstable();
        let name = format!("config-{}", scene.configs.len());
        scene.configs.push(ConfigSpec { name, paths: chosen });
        let cells = ideal_cells(&scene, scene.configs.len() - 1, &grid);
        let area = cells.len() as f64 * grid.cell_size().powi(2);
        let mean_len = scene.configs[scene.configs.len() - 1].paths.iter().map(|&p| Polyline::new(scene.paths[p].points.clone()).len()).sum::<f64>() / size as f64;
        let comparable = (2.1 * side..=2.5 * side).contains(&area) && (0.85 * side..=side).contains(&mean_len);
        if !comparable || footprints.iter().any(|f| overlap(f, &cells) >= 0.5) {
            scene.configs.pop();
        } else {
            footprints.push(cells);
        }
    }
    if scene.configs.len() < n_configs {
        return Err(Error::InvalidSpec(format!("could not place {n_configs} separated configurations")));
    }
    Ok(scene)
}

fn clamp_point(p: Point, side: f64) -> (f64, f64) {
    let hi = side * (1.0 - f64::EPSILON);
    (p[0].clamp(0.0, hi), p[1].clamp(0.0, hi))
}

/// Per-passenger draw.
#[derive(Debug, Clone, PartialEq)]
pub struct PassengerInfo {
    pub id: u64,
    pub path: usize,
    pub spawn: f64,
    pub speed: f64,
    pub offset: f64,
    pub deviant: bool,
}

/// Output of one simulated window.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedWindow {
    /// Detections with `0 <= t < window`, sorted by time then track id.
    pub records: Vec<CentroidRecord>,
    /// Passenger-seconds inside the floor during the window.
    pub opportunities: usize,
    pub passengers: Vec<PassengerInfo>,
}

struct Detour {
    waypoints: Vec<Point>,
    leave_at: f64,
    rejoin_at: f64,
}

pub fn draw_speed<R: Rng>(params: &SimParams, rng: &mut R) -> f64 {
    let normal = Normal::new(params.speed_mean, params.speed_var.sqrt()).expect("valid speed distribution");
    loop {
        let v = normal.sample(rng);
        if v > 0.0 {
            return v;
        }
    }
}

/// Simulates one window of `window` seconds of configuration `config`.
pub fn simulate_window(
    scene: &SceneSpec,
    config: usize,
    params: &SimParams,
    window: usize,
    outlier: bool,
    seed: u64,
) -> Result<SimulatedWindow> {
    params.validate()?;
    let cfg = scene
        .configs
        .get(config)
        .ok_or_else(|| Error::InvalidSpec(format!("scene has no configuration {config}")))?;
    if cfg.paths.is_empty() {
        return Err(Error::InvalidSpec(format!("configuration {config} has no paths")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lateral = Normal::new(0.0, params.lateral_sigma.max(1e-300)).expect("valid offset distribution");
    let margin = 1.0f64.min(scene.side / 4.0);

    let detours: Vec<Detour> = if outlier {
        let n = rng.gen_range(1..=3);
        (0..n)
            .map(|_| {
                let k = rng.gen_range(2..=4);
                let waypoints = (0..k)
                    .map(|_| [rng.gen_range(margin..scene.side - margin), rng.gen_range(margin..scene.side - margin)])
                    .collect();
                Detour {
                    waypoints,
                    leave_at: rng.gen_range(0.15..0.45),
                    rejoin_at: rng.gen_range(0.55..0.85),
                }
            })
            .collect()
    } else {
        Vec::new()
    };

    let routes: Vec<Polyline> = cfg.paths.iter().map(|&p| Polyline::new(scene.paths[p].points.clone())).collect();
    let mut records = Vec::new();
    let mut passengers = Vec::new();
    let mut opportunities = 0usize;
    let first = -(params.warmup.ceil() as i64);
    let mut next_id = 0u64;
    for t0 in first..window as i64 {
        if rng.gen_bool(params.spawn_rate) {
            let slot = rng.gen_range(0..cfg.paths.len());
            let path = cfg.paths[slot];
            let speed = draw_speed(params, &mut rng);
            let offset = if params.lateral_sigma > 0.0 { lateral.sample(&mut rng) } else { 0.0 };
            let deviant = !detours.is_empty() && rng.gen_bool(params.detour_share);
            let route = if deviant {
                let d = &detours[rng.gen_range(0..detours.len())];
                let base = &routes[slot];
                let mut pts = base.prefix(d.leave_at * base.len());
                pts.extend(d.waypoints.iter().copied());
                pts.extend(base.suffix(d.rejoin_at * base.len()));
                Polyline::new(pts)
            } else {
                routes[slot].clone()
            };
            let id = next_id;
            next_id += 1;
            let mut k = 0i64;
            loop {
                let s = speed * k as f64;
                if s > route.len() {
                    break;
                }
                let t = t0 + k;
                k += 1;
                if t < 0 {
                    continue;
                }
                if t >= window as i64 {
                    break;
                }
                opportunities += 1;
                if rng.gen_bool(params.detect_prob) {
                    let (p, n) = route.at(s);
                    let (x, y) = clamp_point([p[0] + offset * n[0], p[1] + offset * n[1]], scene.side);
                    records.push(CentroidRecord::with_track(t as f64, x, y, id));
                }
            }
            passengers.push(PassengerInfo {
                id,
                path,
                spawn: t0 as f64,
                speed,
                offset,
                deviant,
            });
        }
    }
    records.sort_by(|a, b| a.t.total_cmp(&b.t).then(a.track_id.cmp(&b.track_id)));
    Ok(SimulatedWindow {
        records,
        opportunities,
        passengers,
    })
}

/// Ground truth of one window of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowTruth {
    pub index: usize,
    pub window_start: f64,
    /// Configuration whose traffic fills the window (outliers included).
    pub config: usize,
    pub outlier: bool,
    pub seed: u64,
}

/// Window layout of one trial: class runs with interleaved outliers.
pub fn plan_windows(spec: &ExperimentSpec, seed: u64) -> Result<Vec<WindowTruth>> {
    spec.validate()?;
    let n_out = spec.n_outliers();
    let n_reg = spec.n_maps - n_out;
    if n_reg < spec.n_classes {
        return Err(Error::InvalidSpec(format!(
            "{n_reg} regular windows cannot cover {} classes",
            spec.n_classes
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, u64::MAX));
    let k = spec.n_classes;
    let totals: Vec<usize> = (0..k).map(|c| n_reg / k + usize::from(c < n_reg % k)).collect();

    let mut sequence: Vec<usize> = match spec.ordering {
        Ordering::Contiguous => {
            let mut runs: Vec<(usize, usize)> = Vec::new();
            for (c, &total) in totals.iter().enumerate() {
                let r = spec.runs_per_class.min(total);
                for j in 0..r {
                    runs.push((c, total / r + usize::from(j < total % r)));
                }
            }
            runs.shuffle(&mut rng);
            runs.into_iter().flat_map(|(c, n)| std::iter::repeat(c).take(n)).collect()
        }
        Ordering::Shuffled => {
            let mut s: Vec<usize> = totals.iter().enumerate().flat_map(|(c, &n)| std::iter::repeat(c).take(n)).collect();
            s.shuffle(&mut rng);
            s
        }
    };

    let mut outlier_at = vec![false; spec.n_maps];
    for i in rand::seq::index::sample(&mut rng, spec.n_maps, n_out) {
        outlier_at[i] = true;
    }
    let mut plan = Vec::with_capacity(spec.n_maps);
    let mut reg = sequence.drain(..);
    let mut last: Option<usize> = None;
    let mut pending = Vec::new();
    for (i, &is_out) in outlier_at.iter().enumerate() {
        let config = if is_out {
            pending.push(i);
            usize::MAX
        } else {
            let c = reg.next().expect("regular windows fill the remaining slots");
            last = Some(c);
            c
        };
        plan.push(WindowTruth {
            index: i,
            window_start: (i * spec.window) as f64,
            config,
            outlier: is_out,
            seed: derive_seed(seed, i as u64),
        });
        if !is_out {
            for j in pending.drain(..) {
                plan[j].config = config;
            }
        }
    }
    // Outliers carry the traffic of the next regular window, trailing ones of the last.
    let tail = last.unwrap_or(0);
    for j in pending {
        plan[j].config = tail;
    }
    Ok(plan)
}

/// A simulated trial: occupancy maps plus ground truth aligned with the data matrix.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub windows: Vec<WindowTruth>,
    pub maps: Vec<OccupancyMap>,
    pub data: DataMatrix,
    pub truth: GroundTruth,
}

/// Simulates, rasterizes and aggregates every window of one trial.
pub fn generate_experiment(
    scene: &SceneSpec,
    params: &SimParams,
    spec: &ExperimentSpec,
    seed: u64,
) -> Result<Experiment> {
    params.validate()?;
    if spec.n_classes > scene.configs.len() {
        return Err(Error::InvalidSpec(format!(
            "{} classes requested, scene has {} configurations",
            spec.n_classes,
            scene.configs.len()
        )));
    }
    let plan = plan_windows(spec, seed)?;
    let grid = GridSpec::square(scene.side, spec.cell_size)?;
    let maps: Vec<OccupancyMap> = plan
        .par_iter()
        .map(|w| {
            let sim = simulate_window(scene, w.config, params, spec.window, w.outlier, w.seed)?;
            let windowing = Windowing {
                start: 0.0,
                window_len: spec.window,
                n_windows: Some(1),
            };
            let mut map = occupancy_maps(&sim.records, &grid, &windowing)?.remove(0);
            map.window_start = w.window_start;
            Ok(map)
        })
        .collect::<Result<_>>()?;
    let data = DataMatrix::from_maps(&maps)?;
    let truth = GroundTruth::from_windows(&plan, data.kept_indices())?;
    Ok(Experiment {
        windows: plan,
        maps,
        data,
        truth,
    })
}

/// Seed of the scene shared by every trial of a seeded batch.
pub fn scene_seed(master: u64) -> u64 {
    derive_seed(master, u64::MAX - 1)
}

/// Seed of trial `trial` of a seeded batch.
pub fn trial_seed(master: u64, trial: usize) -> u64 {
    derive_seed(master, trial as u64)
}

/// Detections of a whole trial on one clock: window `i` covers
/// `[i * window, (i + 1) * window)` and track ids are made unique by putting
/// the window index in the upper 32 bits.
pub fn simulate_trial_records(
    scene: &SceneSpec,
    params: &SimParams,
    spec: &ExperimentSpec,
    seed: u64,
) -> Result<(Vec<WindowTruth>, Vec<CentroidRecord>)> {
    params.validate()?;
    let plan = plan_windows(spec, seed)?;
    let per_window: Vec<Vec<CentroidRecord>> = plan
        .par_iter()
        .map(|w| {
            let sim = simulate_window(scene, w.config, params, spec.window, w.outlier, w.seed)?;
            Ok(sim
                .records
                .into_iter()
                .map(|r| CentroidRecord {
                    t: r.t + w.window_start,
                    track_id: r.track_id.map(|id| ((w.index as u64) << 32) | id),
                    ..r
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok((plan, per_window.concat()))
}

/// Everything needed to reproduce or evaluate a simulated batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub seed: u64,
    pub scene: SceneSpec,
    pub params: SimParams,
    pub experiment: ExperimentSpec,
    pub grid: GridSpec,
    pub trials: Vec<TrialManifest>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialManifest {
    pub trial: usize,
    pub seed: u64,
    /// Centroid file of the trial, relative to the manifest.
    pub centroids: String,
    pub windows: Vec<WindowTruth>,
}

impl Manifest {
    /// Windowing that turns a trial's centroid stream back into its maps.
    pub fn windowing(&self) -> Windowing {
        Windowing {
            start: 0.0,
            window_len: self.experiment.window,
            n_windows: Some(self.experiment.n_maps),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scene_is_deterministic_and_bounded() {
        let a = default_scene(3);
        assert_eq!(a, default_scene(3));
        assert_eq!(a.doors.len(), 8);
        assert_eq!(a.configs.len(), 10);
        for d in &a.doors {
            let on_edge = d[0] == 0.0 || d[0] == a.side || d[1] == 0.0 || d[1] == a.side;
            assert!(on_edge, "{d:?}");
        }
        for c in &a.configs {
            assert!((1..=3).contains(&c.paths.len()));
        }
    }

    #[test]
    fn ideal_maps_are_distinct_and_separated() {
        let scene = default_scene(0);
        let grid = GridSpec::square(20.0, 1.0).unwrap();
        let cells: Vec<_> = (0..10).map(|c| ideal_cells(&scene, c, &grid)).collect();
        for i in 0..10 {
            for j in i + 1..10 {
                assert_ne!(cells[i], cells[j]);
                assert!(overlap(&cells[i], &cells[j]) < 0.5);
            }
        }
    }

    #[test]
    fn straight_walk_kinematics() {
        let scene = SceneSpec {
            side: 20.0,
            doors: vec![[0.0, 10.0], [20.0, 10.0]],
            paths: vec![PathSpec { from: 0, to: 1, points: vec![[0.0, 10.0], [20.0, 10.0]] }],
            configs: vec![ConfigSpec { name: "line".into(), paths: vec![0] }],
        };
        let params = SimParams {
            speed_var: 0.0,
            detect_prob: 1.0,
            spawn_rate: 1.0,
            lateral_sigma: 0.0,
            warmup: 0.0,
            ..SimParams::default()
        };
        let w = simulate_window(&scene, 0, &params, 1, false, 1).unwrap();
        assert_eq!(w.passengers.len(), 1);
        let w = simulate_window(&scene, 0, &params, 40, false, 1).unwrap();
        let first: Vec<_> = w.records.iter().filter(|r| r.track_id == Some(0)).collect();
        assert!((14..=15).contains(&first.len()), "{}", first.len());
        for pair in first.windows(2) {
            assert!((pair[1].x - pair[0].x - 1.4).abs() < 1e-9);
        }
    }

    #[test]
    fn window_plan_counts() {
        let spec = ExperimentSpec::default();
        let plan = plan_windows(&spec, 1).unwrap();
        assert_eq!(plan.len(), 576);
        let mut per_class = [0usize; 10];
        for w in plan.iter().filter(|w| !w.outlier) {
            per_class[w.config] += 1;
        }
        assert!(per_class.iter().all(|&n| n == 57 || n == 58), "{per_class:?}");

        let half = ExperimentSpec { p_out: 0.5, ..ExperimentSpec::default() };
        let plan = plan_windows(&half, 1).unwrap();
        assert_eq!(plan.iter().filter(|w| w.outlier).count(), 288);
        assert!(plan.iter().all(|w| w.config < 10));
    }

    #[test]
    fn plan_rejects_starved_classes() {
        let spec = ExperimentSpec { n_maps: 12, p_out: 0.5, ..ExperimentSpec::default() };
        assert!(matches!(plan_windows(&spec, 0), Err(Error::InvalidSpec(_))));
        let bad = ExperimentSpec { p_out: 1.0, ..ExperimentSpec::default() };
        assert!(plan_windows(&bad, 0).is_err());
    }

    #[test]
    fn trial_stream_rebuilds_the_experiment_maps() {
        let scene = default_scene(2);
        let spec = ExperimentSpec { n_maps: 24, window: 60, p_out: 0.25, ..ExperimentSpec::default() };
        let params = SimParams::default();
        let exp = generate_experiment(&scene, &params, &spec, 5).unwrap();
        let (plan, records) = simulate_trial_records(&scene, &params, &spec, 5).unwrap();
        assert_eq!(plan, exp.windows);
        let windowing = Windowing { start: 0.0, window_len: 60, n_windows: Some(24) };
        let maps = occupancy_maps(&records, &exp.data.spec().clone(), &windowing).unwrap();
        assert_eq!(maps, exp.maps);
        let ids: BTreeSet<_> = records.iter().map(|r| r.track_id).collect();
        assert!(ids.len() > 24);
    }

    #[test]
    fn derived_seeds_differ() {
        let s: BTreeSet<u64> = (0..1000).map(|i| derive_seed(7, i)).collect();
        assert_eq!(s.len(), 1000);
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
    }
}
