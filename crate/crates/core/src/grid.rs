//! Occupancy descriptors: floor grids, one-second binary slices, windowed
//! occupancy maps and the data matrix assembled from them.
//!
//! A centroid at `(x, y)` falls in row `floor((y - origin_y) / cell_size)` and
//! column `floor((x - origin_x) / cell_size)`. Cells are half-open, so a point on
//! a cell's max edge belongs to the next cell; points outside
//! `[origin, origin + extent)` are dropped and tallied.

use std::collections::{BTreeMap, HashSet};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Floor discretization shared by every map of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridSpecRepr", into = "GridSpecRepr")]
pub struct GridSpec {
    origin_x: f64,
    origin_y: f64,
    width: f64,
    height: f64,
    cell_size: f64,
    rows: usize,
    cols: usize,
}

#[derive(Serialize, Deserialize)]
struct GridSpecRepr {
    origin_x: f64,
    origin_y: f64,
    width: f64,
    height: f64,
    cell_size: f64,
    #[serde(default)]
    rows: Option<usize>,
    #[serde(default)]
    cols: Option<usize>,
}

impl TryFrom<GridSpecRepr> for GridSpec {
    type Error = Error;

    fn try_from(r: GridSpecRepr) -> Result<Self> {
        let spec = GridSpec::new((r.origin_x, r.origin_y), r.width, r.height, r.cell_size)?;
        if r.rows.is_some_and(|v| v != spec.rows) || r.cols.is_some_and(|v| v != spec.cols) {
            return Err(Error::InvalidArgument(format!(
                "declared grid shape {:?}x{:?} disagrees with derived {}x{}",
                r.rows, r.cols, spec.rows, spec.cols
            )));
        }
        Ok(spec)
    }
}

impl From<GridSpec> for GridSpecRepr {
    fn from(s: GridSpec) -> Self {
        GridSpecRepr {
            origin_x: s.origin_x,
            origin_y: s.origin_y,
            width: s.width,
            height: s.height,
            cell_size: s.cell_size,
            rows: Some(s.rows),
            cols: Some(s.cols),
        }
    }
}

impl GridSpec {
    pub fn new(origin: (f64, f64), width: f64, height: f64, cell_size: f64) -> Result<Self> {
        let finite = [origin.0, origin.1, width, height, cell_size]
            .iter()
            .all(|v| v.is_finite());
        if !finite || cell_size <= 0.0 || width <= 0.0 || height <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "grid needs positive finite extent and cell size (width {width}, height {height}, cell {cell_size})"
            )));
        }
        let rows = (height / cell_size).ceil() as usize;
        let cols = (width / cell_size).ceil() as usize;
        Ok(GridSpec {
            origin_x: origin.0,
            origin_y: origin.1,
            width,
            height,
            cell_size,
            rows: rows.max(1),
            cols: cols.max(1),
        })
    }

    /// Square floor `[0, side)^2`.
    pub fn square(side: f64, cell_size: f64) -> Result<Self> {
        Self::new((0.0, 0.0), side, side, cell_size)
    }

    pub fn origin(&self) -> (f64, f64) {
        (self.origin_x, self.origin_y)
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Data dimension `rows * cols`.
    pub fn dim(&self) -> usize {
        self.rows * self.cols
    }

    /// Row-major cell index of a planar point, `None` when outside the floor.
    pub fn cell_of(&self, x: f64, y: f64) -> Option<usize> {
        let dx = x - self.origin_x;
        let dy = y - self.origin_y;
        if !(dx >= 0.0 && dy >= 0.0 && dx < self.width && dy < self.height) {
            return None;
        }
        let r = ((dy / self.cell_size).floor() as usize).min(self.rows - 1);
        let c = ((dx / self.cell_size).floor() as usize).min(self.cols - 1);
        Some(r * self.cols + c)
    }

    /// Center of cell `(row, col)`.
    pub fn cell_center(&self, row: usize, col: usize) -> (f64, f64) {
        (
            self.origin_x + (col as f64 + 0.5) * self.cell_size,
            self.origin_y + (row as f64 + 0.5) * self.cell_size,
        )
    }
}

/// One detected person on the floor at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CentroidRecord {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub track_id: Option<u64>,
}

impl CentroidRecord {
    pub fn new(t: f64, x: f64, y: f64) -> Self {
        CentroidRecord { t, x, y, track_id: None }
    }

    pub fn with_track(t: f64, x: f64, y: f64, id: u64) -> Self {
        CentroidRecord { t, x, y, track_id: Some(id) }
    }
}

/// Occupancy of the floor during a single one-second slice.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryGrid {
    pub spec: GridSpec,
    pub cells: Vec<bool>,
    pub t: f64,
    /// Records of the slice that fell outside the floor.
    pub out_of_bounds: usize,
}

impl BinaryGrid {
    pub fn empty(spec: &GridSpec, t: f64) -> Self {
        BinaryGrid {
            cells: vec![false; spec.dim()],
            spec: spec.clone(),
            t,
            out_of_bounds: 0,
        }
    }

    pub fn occupied(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }
}

/// Marks every cell containing at least one centroid.
///
/// `t` stamps the slice; the records' own timestamps are not inspected.
pub fn rasterize_centroids(records: &[CentroidRecord], spec: &GridSpec, t: f64) -> BinaryGrid {
    let mut grid = BinaryGrid::empty(spec, t);
    for rec in records {
        match spec.cell_of(rec.x, rec.y) {
            Some(idx) => grid.cells[idx] = true,
            None => grid.out_of_bounds += 1,
        }
    }
    grid
}

/// Spatio-temporal average of binary slices over one window.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyMap {
    pub spec: GridSpec,
    pub values: Vec<f64>,
    pub window_start: f64,
    pub window_len: f64,
    pub n_slices: usize,
}

impl OccupancyMap {
    pub fn is_empty(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn l1(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// Averages the binary slices of one window cell by cell.
pub fn aggregate_window(grids: &[BinaryGrid], window_len: f64) -> Result<OccupancyMap> {
    let first = grids
        .first()
        .ok_or_else(|| Error::InvalidArgument("window has no binary slices".into()))?;
    if grids.len() as f64 > window_len {
        return Err(Error::InvalidArgument(format!(
            "{} slices exceed a {window_len} s window at 1 Hz",
            grids.len()
        )));
    }
    let spec = &first.spec;
    let mut counts = vec![0u32; spec.dim()];
    let mut start = f64::INFINITY;
    for g in grids {
        if g.spec != *spec {
            return Err(Error::SpecMismatch(format!(
                "slice at t={} uses a different grid than slice at t={}",
                g.t, first.t
            )));
        }
        start = start.min(g.t);
        for (n, &c) in counts.iter_mut().zip(&g.cells) {
            *n += c as u32;
        }
    }
    let n = grids.len();
    Ok(OccupancyMap {
        spec: spec.clone(),
        values: counts.iter().map(|&k| k as f64 / n as f64).collect(),
        window_start: start,
        window_len,
        n_slices: n,
    })
}

/// Windowing of a centroid stream into 1 Hz slices and fixed-length windows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Windowing {
    /// Time of the first slice of the first window.
    pub start: f64,
    /// Window length in seconds (number of one-second slices).
    pub window_len: usize,
    /// Number of windows; derived from the last record when `None`.
    pub n_windows: Option<usize>,
}

impl Default for Windowing {
    fn default() -> Self {
        Windowing {
            start: 0.0,
            window_len: 300,
            n_windows: None,
        }
    }
}

/// Builds one occupancy map per window from a time-sorted centroid stream.
///
/// Seconds without any record contribute an all-zero slice; records before
/// `start` or after the last window are ignored.
pub fn occupancy_maps(
    records: &[CentroidRecord],
    spec: &GridSpec,
    windowing: &Windowing,
) -> Result<Vec<OccupancyMap>> {
    if windowing.window_len == 0 {
        return Err(Error::InvalidArgument("window length must be at least 1 s".into()));
    }
    let len = windowing.window_len;
    let n_windows = match windowing.n_windows {
        Some(n) => n,
        None => {
            let last = records
                .iter()
                .map(|r| r.t)
                .fold(f64::NEG_INFINITY, f64::max);
            if last < windowing.start {
                0
            } else {
                ((last - windowing.start).floor() as usize) / len + 1
            }
        }
    };
    let total_slices = n_windows * len;
    let mut per_slice: BTreeMap<usize, Vec<CentroidRecord>> = BTreeMap::new();
    for rec in records {
        let dt = rec.t - windowing.start;
        if dt < 0.0 || !dt.is_finite() {
            continue;
        }
        let s = dt.floor() as usize;
        if s < total_slices {
            per_slice.entry(s).or_default().push(*rec);
        }
    }
    (0..n_windows)
        .map(|w| {
            let grids: Vec<BinaryGrid> = (w * len..(w + 1) * len)
                .map(|s| {
                    let t = windowing.start + s as f64;
                    match per_slice.get(&s) {
                        Some(recs) => rasterize_centroids(recs, spec, t),
                        None => BinaryGrid::empty(spec, t),
                    }
                })
                .collect();
            aggregate_window(&grids, len as f64)
        })
        .collect()
}

/// Column matrix of non-empty occupancy maps.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    spec: GridSpec,
    matrix: DMatrix<f64>,
    kept_indices: Vec<usize>,
    window_starts: Vec<f64>,
}

impl DataMatrix {
    /// Stacks the non-empty maps as columns, preserving order.
    pub fn from_maps(maps: &[OccupancyMap]) -> Result<Self> {
        let spec = match maps.first() {
            Some(m) => m.spec.clone(),
            None => return Err(Error::InsufficientData("no occupancy maps".into())),
        };
        let mut kept = Vec::new();
        for (i, m) in maps.iter().enumerate() {
            if m.spec != spec {
                return Err(Error::SpecMismatch(format!("map {i} uses a different grid")));
            }
            if !m.is_empty() {
                kept.push(i);
            }
        }
        if kept.len() < 2 {
            return Err(Error::InsufficientData(format!(
                "{} non-empty maps, at least 2 required",
                kept.len()
            )));
        }
        let d = spec.dim();
        let matrix = DMatrix::from_fn(d, kept.len(), |r, c| maps[kept[c]].values[r]);
        let window_starts = kept.iter().map(|&i| maps[i].window_start).collect();
        Ok(DataMatrix {
            spec,
            matrix,
            kept_indices: kept,
            window_starts,
        })
    }

    /// Wraps raw columns; empty columns are rejected rather than dropped.
    pub fn from_columns(spec: GridSpec, matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != spec.dim() {
            return Err(Error::ShapeMismatch(format!(
                "matrix has {} rows, grid has {} cells",
                matrix.nrows(),
                spec.dim()
            )));
        }
        if matrix.ncols() < 2 {
            return Err(Error::InsufficientData("at least 2 columns required".into()));
        }
        if let Some(c) = (0..matrix.ncols()).find(|&c| matrix.column(c).iter().all(|&v| v == 0.0)) {
            return Err(Error::InvalidArgument(format!("column {c} is all zero")));
        }
        let m = matrix.ncols();
        Ok(DataMatrix {
            spec,
            matrix,
            kept_indices: (0..m).collect(),
            window_starts: (0..m).map(|i| i as f64).collect(),
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Positions of the retained columns in the original map sequence.
    pub fn kept_indices(&self) -> &[usize] {
        &self.kept_indices
    }

    pub fn window_starts(&self) -> &[f64] {
        &self.window_starts
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn len(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.ncols() == 0
    }

    /// Keeps the listed columns, in the listed order.
    pub fn select(&self, columns: &[usize]) -> Result<Self> {
        if columns.len() < 2 {
            return Err(Error::InsufficientData("selection keeps fewer than 2 columns".into()));
        }
        if let Some(&bad) = columns.iter().find(|&&c| c >= self.len()) {
            return Err(Error::InvalidArgument(format!("column {bad} out of range")));
        }
        Ok(DataMatrix {
            spec: self.spec.clone(),
            matrix: self.matrix.select_columns(columns),
            kept_indices: columns.iter().map(|&c| self.kept_indices[c]).collect(),
            window_starts: columns.iter().map(|&c| self.window_starts[c]).collect(),
        })
    }
}

/// Axis-aligned counting region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountingBox {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl CountingBox {
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Result<Self> {
        let b = CountingBox { x_min, y_min, x_max, y_max };
        if !(x_max > x_min && y_max > y_min) || ![x_min, y_min, x_max, y_max].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidArgument(format!("counting box {b:?} has no area")));
        }
        Ok(b)
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x_min && x < self.x_max && y >= self.y_min && y < self.y_max
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BucketCount {
    pub start: f64,
    pub count: u64,
}

/// Counts passages through a box, bucketed in time.
///
/// Anonymous streams count one passage each time the box becomes occupied
/// after at least one empty second. When every record carries a track id,
/// each distinct id is counted once, in the bucket of its first appearance
/// inside the box. `span` fixes the covered time range; otherwise it is taken
/// from the records.
pub fn count_exit_box(
    records: &[CentroidRecord],
    region: &CountingBox,
    bucket: f64,
    span: Option<(f64, f64)>,
) -> Result<Vec<BucketCount>> {
    if !(bucket > 0.0) || !bucket.is_finite() {
        return Err(Error::InvalidArgument(format!("bucket length {bucket} must be positive")));
    }
    CountingBox::new(region.x_min, region.y_min, region.x_max, region.y_max)?;
    let (t0, t1) = match span {
        Some(s) => s,
        None if records.is_empty() => return Ok(Vec::new()),
        None => records.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), r| {
            (a.min(r.t), b.max(r.t))
        }),
    };
    let first = (t0 / bucket).floor();
    let n_buckets = (((t1 / bucket).floor() - first) as usize) + 1;
    let mut counts: Vec<BucketCount> = (0..n_buckets)
        .map(|k| BucketCount {
            start: (first + k as f64) * bucket,
            count: 0,
        })
        .collect();
    let mut tally = |t: f64| {
        let k = (t / bucket).floor() - first;
        if k >= 0.0 && (k as usize) < n_buckets {
            counts[k as usize].count += 1;
        }
    };

    let tracked = !records.is_empty() && records.iter().all(|r| r.track_id.is_some());
    let mut inside: Vec<&CentroidRecord> =
        records.iter().filter(|r| region.contains(r.x, r.y)).collect();
    inside.sort_by(|a, b| a.t.total_cmp(&b.t));
    if tracked {
        let mut seen = HashSet::new();
        for r in inside {
            if seen.insert(r.track_id) {
                tally(r.t);
            }
        }
    } else {
        let mut last_second: Option<i64> = None;
        for r in inside {
            let s = r.t.floor() as i64;
            match last_second {
                Some(prev) if s <= prev + 1 => {}
                _ => tally(r.t),
            }
            last_second = Some(last_second.map_or(s, |p| p.max(s)));
        }
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> GridSpec {
        GridSpec::square(4.0, 1.0).unwrap()
    }

    #[test]
    fn grid_shape_rounds_up() {
        let g = GridSpec::new((0.0, 0.0), 4.5, 2.0, 1.0).unwrap();
        assert_eq!((g.rows(), g.cols(), g.dim()), (2, 5, 10));
        assert!(GridSpec::new((0.0, 0.0), 4.0, 4.0, 0.0).is_err());
        assert!(GridSpec::new((0.0, 0.0), 4.0, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn empty_slice_is_all_zero() {
        let g = rasterize_centroids(&[], &spec(), 0.0);
        assert_eq!(g.occupied(), 0);
    }

    #[test]
    fn center_of_first_cell() {
        let g = rasterize_centroids(&[CentroidRecord::new(0.0, 0.5, 0.5)], &spec(), 0.0);
        assert!(g.cells[0]);
        assert_eq!(g.occupied(), 1);
    }

    #[test]
    fn duplicate_records_are_idempotent() {
        let one = rasterize_centroids(&[CentroidRecord::new(0.0, 2.2, 1.3)], &spec(), 0.0);
        let two = rasterize_centroids(
            &[CentroidRecord::new(0.0, 2.2, 1.3), CentroidRecord::new(0.0, 2.7, 1.9)],
            &spec(),
            0.0,
        );
        assert_eq!(one, two);
    }

    #[test]
    fn half_open_cell_edges() {
        let s = spec();
        assert_eq!(s.cell_of(1.0, 0.0), Some(1));
        assert_eq!(s.cell_of(0.0, 1.0), Some(4));
        assert_eq!(s.cell_of(4.0, 0.5), None);
        assert_eq!(s.cell_of(0.5, 4.0), None);
        assert_eq!(s.cell_of(-1e-12, 0.5), None);
        let g = rasterize_centroids(
            &[CentroidRecord::new(0.0, 4.0, 0.5), CentroidRecord::new(0.0, 3.999, 3.999)],
            &s,
            0.0,
        );
        assert_eq!(g.out_of_bounds, 1);
        assert!(g.cells[15]);
    }

    #[test]
    fn singleton_window_equals_grid() {
        let g = rasterize_centroids(&[CentroidRecord::new(3.0, 1.5, 2.5)], &spec(), 3.0);
        let m = aggregate_window(std::slice::from_ref(&g), 300.0).unwrap();
        let expect: Vec<f64> = g.cells.iter().map(|&c| c as u8 as f64).collect();
        assert_eq!(m.values, expect);
        assert_eq!(m.n_slices, 1);
        assert_eq!(m.window_start, 3.0);
    }

    #[test]
    fn half_occupied_cell_averages_to_half() {
        let s = spec();
        let grids: Vec<BinaryGrid> = (0..300)
            .map(|t| {
                let recs = if t % 2 == 0 { vec![CentroidRecord::new(t as f64, 0.5, 0.5)] } else { vec![] };
                rasterize_centroids(&recs, &s, t as f64)
            })
            .collect();
        let m = aggregate_window(&grids, 300.0).unwrap();
        assert_eq!(m.values[0], 0.5);
        assert!(m.values[1..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn zero_slices_give_zero_map() {
        let s = spec();
        let grids: Vec<BinaryGrid> = (0..10).map(|t| BinaryGrid::empty(&s, t as f64)).collect();
        assert!(aggregate_window(&grids, 300.0).unwrap().is_empty());
    }

    #[test]
    fn mixed_grids_are_rejected() {
        let a = BinaryGrid::empty(&spec(), 0.0);
        let b = BinaryGrid::empty(&GridSpec::square(4.0, 0.5).unwrap(), 1.0);
        assert!(matches!(aggregate_window(&[a, b], 300.0), Err(Error::SpecMismatch(_))));
    }

    #[test]
    fn too_many_slices_rejected() {
        let s = spec();
        let grids: Vec<BinaryGrid> = (0..4).map(|t| BinaryGrid::empty(&s, t as f64)).collect();
        assert!(aggregate_window(&grids, 3.0).is_err());
        assert!(aggregate_window(&[], 3.0).is_err());
    }

    fn map_with(values: Vec<f64>, start: f64) -> OccupancyMap {
        OccupancyMap {
            spec: GridSpec::new((0.0, 0.0), 2.0, 1.0, 1.0).unwrap(),
            values,
            window_start: start,
            window_len: 300.0,
            n_slices: 300,
        }
    }

    #[test]
    fn data_matrix_drops_empty_maps() {
        let maps = vec![
            map_with(vec![0.5, 0.0], 0.0),
            map_with(vec![0.0, 0.0], 300.0),
            map_with(vec![0.1, 0.2], 600.0),
            map_with(vec![0.0, 0.0], 900.0),
            map_with(vec![0.0, 1.0], 1200.0),
        ];
        let x = DataMatrix::from_maps(&maps).unwrap();
        assert_eq!(x.len(), 3);
        assert_eq!(x.kept_indices(), &[0, 2, 4]);
        assert_eq!(x.window_starts(), &[0.0, 600.0, 1200.0]);
        assert_eq!(x.matrix()[(1, 1)], 0.2);
    }

    #[test]
    fn data_matrix_identity_filter() {
        let maps = vec![map_with(vec![0.5, 0.0], 0.0), map_with(vec![0.1, 0.2], 300.0)];
        assert_eq!(DataMatrix::from_maps(&maps).unwrap().kept_indices(), &[0, 1]);
    }

    #[test]
    fn data_matrix_needs_two_maps() {
        let maps = vec![map_with(vec![0.0, 0.0], 0.0), map_with(vec![0.0, 0.0], 300.0)];
        assert!(matches!(DataMatrix::from_maps(&maps), Err(Error::InsufficientData(_))));
        let one = vec![map_with(vec![0.0, 0.0], 0.0), map_with(vec![0.3, 0.0], 300.0)];
        assert!(matches!(DataMatrix::from_maps(&one), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn stream_windows_include_empty_seconds() {
        let s = spec();
        let recs = vec![CentroidRecord::new(0.2, 0.5, 0.5), CentroidRecord::new(5.7, 0.5, 0.5)];
        let w = Windowing { start: 0.0, window_len: 4, n_windows: None };
        let maps = occupancy_maps(&recs, &s, &w).unwrap();
        assert_eq!(maps.len(), 2);
        assert_eq!(maps[0].values[0], 0.25);
        assert_eq!(maps[1].values[0], 0.25);
        assert_eq!(maps[1].window_start, 4.0);
        assert!(maps.iter().all(|m| m.n_slices == 4));
    }

    #[test]
    fn exit_box_empty_stream() {
        let b = CountingBox::new(0.0, 0.0, 1.0, 1.0).unwrap();
        let c = count_exit_box(&[], &b, 60.0, Some((0.0, 299.0))).unwrap();
        assert_eq!(c.len(), 5);
        assert!(c.iter().all(|b| b.count == 0));
        assert!(count_exit_box(&[], &b, 60.0, None).unwrap().is_empty());
    }

    #[test]
    fn exit_box_single_crossing() {
        let b = CountingBox::new(9.0, 0.0, 11.0, 20.0).unwrap();
        let recs: Vec<_> = (0..15)
            .map(|t| CentroidRecord::with_track(t as f64, 1.4 * t as f64, 10.0, 42))
            .collect();
        let c = count_exit_box(&recs, &b, 60.0, None).unwrap();
        assert_eq!(c.iter().map(|b| b.count).sum::<u64>(), 1);
    }

    #[test]
    fn exit_box_debounce_without_ids() {
        let b = CountingBox::new(0.0, 0.0, 1.0, 1.0).unwrap();
        let at = |t: f64| CentroidRecord::new(t, 0.5, 0.5);
        // occupied at 0,1 then empty at 2, occupied again at 3
        let recs = vec![at(0.0), at(1.0), at(3.0), at(3.5)];
        let c = count_exit_box(&recs, &b, 10.0, None).unwrap();
        assert_eq!(c[0].count, 2);
    }

    #[test]
    fn exit_box_rejects_degenerate() {
        assert!(CountingBox::new(1.0, 0.0, 1.0, 2.0).is_err());
        let b = CountingBox { x_min: 0.0, y_min: 0.0, x_max: 0.0, y_max: 1.0 };
        assert!(count_exit_box(&[], &b, 1.0, None).is_err());
        let ok = CountingBox::new(0.0, 0.0, 1.0, 1.0).unwrap();
        assert!(count_exit_box(&[], &ok, 0.0, None).is_err());
    }
}
