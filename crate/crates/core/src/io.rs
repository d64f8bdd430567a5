//! On-disk formats: centroid streams, occupancy maps with their grid sidecar,
//! numeric matrices, labelings, grayscale images and evaluation tables.
//!
//! Reals are written in their shortest round-trip decimal form, so reading a
//! file and writing it back reproduces it byte for byte.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{BucketCount, CentroidRecord, GridSpec, OccupancyMap};
use crate::self_expressive::{IrregularityVector, RegularSplit};
use crate::subspace::{Labeling, PipelineConfig};

/// Shortest decimal that parses back to the same value.
pub fn fmt_real(v: f64) -> String {
    format!("{v:?}")
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Writes `contents`, creating parent directories.
pub fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    let mut f = fs::File::create(path).map_err(|e| io_err(path, e))?;
    f.write_all(contents).map_err(|e| io_err(path, e))
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| io_err(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    text.push('\n');
    write_file(path, text.as_bytes())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let bytes = read_bytes(path)?;
    serde_json::from_slice(&bytes).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Streams the rows of a CSV file with their 1-based line numbers to `on_row`
/// after passing the header, if any, to `on_header`.
fn read_csv(
    path: &Path,
    has_header: bool,
    on_header: impl FnOnce(&[String]) -> Result<()>,
    mut on_row: impl FnMut(usize, &csv::StringRecord) -> Result<()>,
) -> Result<()> {
    let file = fs::File::open(path).map_err(|e| io_err(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .trim(csv::Trim::All)
        .from_reader(std::io::BufReader::new(file));
    let csv_err = |e: csv::Error| {
        let line = e.position().map_or(0, |p| p.line() as usize);
        match e.into_kind() {
            csv::ErrorKind::Io(source) => io_err(path, source),
            kind => parse_err(path, line, csv_message(kind)),
        }
    };
    if has_header {
        let h = reader.headers().map_err(csv_err)?;
        on_header(&h.iter().map(str::to_string).collect::<Vec<_>>())?;
    }
    let mut rec = csv::StringRecord::new();
    while reader.read_record(&mut rec).map_err(csv_err)? {
        let line = rec.position().map_or(0, |p| p.line() as usize);
        on_row(line, &rec)?;
    }
    Ok(())
}

fn csv_message(kind: csv::ErrorKind) -> String {
    match kind {
        csv::ErrorKind::UnequalLengths { expected_len, len, .. } => {
            format!("expected {expected_len} fields, found {len}")
        }
        csv::ErrorKind::Utf8 { .. } => "invalid UTF-8".into(),
        other => format!("{other:?}"),
    }
}

fn expect_header(path: &Path, found: &[String], expected: &[&str]) -> Result<()> {
    if found.len() != expected.len() || found.iter().zip(expected).any(|(a, b)| a != b) {
        return Err(parse_err(
            path,
            1,
            format!("expected header `{}`, found `{}`", expected.join(","), found.join(",")),
        ));
    }
    Ok(())
}

fn field<T: FromStr>(path: &Path, line: usize, rec: &csv::StringRecord, idx: usize, name: &str) -> Result<T> {
    let raw = rec
        .get(idx)
        .ok_or_else(|| parse_err(path, line, format!("missing field `{name}`")))?;
    raw.parse()
        .map_err(|_| parse_err(path, line, format!("cannot parse `{raw}` as {name}")))
}

fn real(path: &Path, line: usize, rec: &csv::StringRecord, idx: usize, name: &str) -> Result<f64> {
    let v: f64 = field(path, line, rec, idx, name)?;
    if !v.is_finite() {
        return Err(parse_err(path, line, format!("{name} must be finite")));
    }
    Ok(v)
}

fn read_table<T>(
    path: &Path,
    header: &[&str],
    mut parse: impl FnMut(usize, &csv::StringRecord) -> Result<T>,
) -> Result<Vec<T>> {
    let mut out = Vec::new();
    read_csv(
        path,
        true,
        |h| expect_header(path, h, header),
        |line, rec| {
            out.push(parse(line, rec)?);
            Ok(())
        },
    )?;
    Ok(out)
}

const CENTROID_HEADER: [&str; 3] = ["t", "x", "y"];
const TRACKED_HEADER: [&str; 4] = ["t", "x", "y", "track_id"];

/// Writes `t,x,y` rows, or `t,x,y,track_id` when every record carries a track.
pub fn write_centroids(path: &Path, records: &[CentroidRecord]) -> Result<()> {
    let tracked = !records.is_empty() && records.iter().all(|r| r.track_id.is_some());
    let mut out = String::with_capacity(records.len() * 32);
    out.push_str(if tracked { "t,x,y,track_id\n" } else { "t,x,y\n" });
    for r in records {
        write!(out, "{},{},{}", fmt_real(r.t), fmt_real(r.x), fmt_real(r.y)).expect("string write");
        if tracked {
            write!(out, ",{}", r.track_id.expect("checked above")).expect("string write");
        }
        out.push('\n');
    }
    write_file(path, out.as_bytes())
}

pub fn read_centroids(path: &Path) -> Result<Vec<CentroidRecord>> {
    let tracked = std::cell::Cell::new(false);
    let mut out = Vec::new();
    read_csv(
        path,
        true,
        |h| {
            tracked.set(h.len() == 4);
            expect_header(path, h, if tracked.get() { &TRACKED_HEADER } else { &CENTROID_HEADER })
        },
        |line, rec| {
            let t = real(path, line, rec, 0, "t")?;
            let x = real(path, line, rec, 1, "x")?;
            let y = real(path, line, rec, 2, "y")?;
            out.push(if tracked.get() {
                CentroidRecord::with_track(t, x, y, field(path, line, rec, 3, "track_id")?)
            } else {
                CentroidRecord::new(t, x, y)
            });
            Ok(())
        },
    )?;
    Ok(out)
}

/// Grid file stored next to a maps file: `maps.csv` pairs with `maps.grid.json`.
pub fn grid_sidecar(maps_path: &Path) -> PathBuf {
    maps_path.with_extension("grid.json")
}

/// One map per row: `window_start,window_len,n_slices,c0,...`, cells in
/// row-major grid order. The grid goes to the sidecar file.
pub fn write_maps(path: &Path, maps: &[OccupancyMap]) -> Result<()> {
    let spec = &maps
        .first()
        .ok_or_else(|| Error::InsufficientData("no maps to write".into()))?
        .spec;
    if let Some(i) = maps.iter().position(|m| m.spec != *spec) {
        return Err(Error::SpecMismatch(format!("map {i} uses a different grid")));
    }
    let mut out = String::new();
    out.push_str("window_start,window_len,n_slices");
    for c in 0..spec.dim() {
        write!(out, ",c{c}").expect("string write");
    }
    out.push('\n');
    for m in maps {
        write!(out, "{},{},{}", fmt_real(m.window_start), fmt_real(m.window_len), m.n_slices).expect("string write");
        for &v in &m.values {
            out.push(',');
            out.push_str(&fmt_real(v));
        }
        out.push('\n');
    }
    write_file(path, out.as_bytes())?;
    write_json(&grid_sidecar(path), spec)
}

pub fn read_maps(path: &Path) -> Result<Vec<OccupancyMap>> {
    let spec: GridSpec = read_json(&grid_sidecar(path))?;
    let d = spec.dim();
    let mut expected = vec!["window_start".to_string(), "window_len".into(), "n_slices".into()];
    expected.extend((0..d).map(|c| format!("c{c}")));
    let names: Vec<&str> = expected.iter().map(String::as_str).collect();
    read_table(path, &names, |line, rec| {
        let values = (0..d)
            .map(|c| {
                let v = real(path, line, rec, 3 + c, "occupancy")?;
                if !(0.0..=1.0).contains(&v) {
                    return Err(parse_err(path, line, format!("occupancy {v} outside [0, 1]")));
                }
                Ok(v)
            })
            .collect::<Result<_>>()?;
        Ok(OccupancyMap {
            spec: spec.clone(),
            values,
            window_start: real(path, line, rec, 0, "window_start")?,
            window_len: real(path, line, rec, 1, "window_len")?,
            n_slices: field(path, line, rec, 2, "n_slices")?,
        })
    })
}

/// Header-less numeric CSV, one matrix row per line.
pub fn write_matrix(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    let mut out = String::new();
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            if c > 0 {
                out.push(',');
            }
            out.push_str(&fmt_real(m[(r, c)]));
        }
        out.push('\n');
    }
    write_file(path, out.as_bytes())
}

pub fn read_matrix(path: &Path) -> Result<DMatrix<f64>> {
    let mut values = Vec::new();
    let mut nrows = 0;
    let mut ncols = 0;
    read_csv(
        path,
        false,
        |_| Ok(()),
        |line, rec| {
            ncols = rec.len();
            for c in 0..ncols {
                values.push(real(path, line, rec, c, "matrix entry")?);
            }
            nrows += 1;
            Ok(())
        },
    )?;
    Ok(DMatrix::from_row_slice(nrows, ncols, &values))
}

/// `map,irregularity,irregular` rows, one per data-matrix column.
pub fn write_irregularity(path: &Path, irr: &IrregularityVector, split: &RegularSplit) -> Result<()> {
    let mut flagged = vec![false; irr.len()];
    for &i in &split.irregular_idx {
        flagged[i] = true;
    }
    let mut out = String::from("map,irregularity,irregular\n");
    for (i, &v) in irr.values.iter().enumerate() {
        writeln!(out, "{i},{},{}", fmt_real(v), u8::from(flagged[i])).expect("string write");
    }
    write_file(path, out.as_bytes())
}

/// Irregularities and the flags of a file written by [`write_irregularity`].
pub fn read_irregularity(path: &Path) -> Result<(IrregularityVector, Vec<bool>)> {
    let mut next = 0usize;
    let rows = read_table(path, &["map", "irregularity", "irregular"], |line, rec| {
        let idx: usize = field(path, line, rec, 0, "map")?;
        if idx != next {
            return Err(parse_err(path, line, format!("expected map {next}, found {idx}")));
        }
        next += 1;
        let v = real(path, line, rec, 1, "irregularity")?;
        if v < 0.0 {
            return Err(parse_err(path, line, "irregularity must be nonnegative"));
        }
        let flag: u8 = field(path, line, rec, 2, "irregular flag")?;
        if flag > 1 {
            return Err(parse_err(path, line, "irregular flag must be 0 or 1"));
        }
        Ok((v, flag == 1))
    })?;
    let (values, flags) = rows.into_iter().unzip();
    Ok((IrregularityVector::new(values)?, flags))
}

/// Labeling of a clustering run with enough context to interpret it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelingReport {
    pub labeling: Labeling,
    /// Index of each labeled map in the maps file it came from.
    pub map_indices: Vec<usize>,
    pub window_starts: Vec<f64>,
    pub k_est: usize,
    pub gamma: usize,
    pub config: PipelineConfig,
}

/// 8-bit binary PGM image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pgm {
    pub width: usize,
    pub height: usize,
    pub maxval: u8,
    /// Row-major, top row first.
    pub pixels: Vec<u8>,
}

impl Pgm {
    /// Linear gray levels with the largest value white. `values` is row-major
    /// with row 0 at the bottom of the image, as on a floor plan.
    pub fn from_grid(values: &[f64], rows: usize, cols: usize) -> Result<Self> {
        if values.len() != rows * cols || rows == 0 || cols == 0 {
            return Err(Error::ShapeMismatch(format!(
                "{} values cannot fill a {rows}x{cols} image",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("image values must be finite".into()));
        }
        let hi = values.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        let mut pixels = Vec::with_capacity(rows * cols);
        for r in (0..rows).rev() {
            for c in 0..cols {
                let v = values[r * cols + c].abs();
                let level = if hi > 0.0 { (v / hi * 255.0).round() } else { 0.0 };
                pixels.push(level as u8);
            }
        }
        Ok(Pgm {
            width: cols,
            height: rows,
            maxval: 255,
            pixels,
        })
    }

    pub fn from_map(map: &OccupancyMap) -> Result<Self> {
        Pgm::from_grid(&map.values, map.spec.rows(), map.spec.cols())
    }

    /// Image of a matrix with entry `(0, 0)` at the top left.
    pub fn from_matrix(m: &DMatrix<f64>) -> Result<Self> {
        let (rows, cols) = m.shape();
        let flipped: Vec<f64> = (0..rows)
            .rev()
            .flat_map(|r| (0..cols).map(move |c| m[(r, c)]))
            .collect();
        Pgm::from_grid(&flipped, rows, cols)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n{}\n", self.width, self.height, self.maxval).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }

    pub fn parse(path: &Path, bytes: &[u8]) -> Result<Self> {
        let mut pos = 0;
        let mut line = 1;
        let mut tokens = Vec::new();
        while tokens.len() < 4 {
            while pos < bytes.len() && (bytes[pos].is_ascii_whitespace() || bytes[pos] == b'#') {
                if bytes[pos] == b'#' {
                    while pos < bytes.len() && bytes[pos] != b'\n' {
                        pos += 1;
                    }
                    continue;
                }
                if bytes[pos] == b'\n' {
                    line += 1;
                }
                pos += 1;
            }
            let start = pos;
            while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if start == pos {
                return Err(parse_err(path, line, "truncated PGM header"));
            }
            tokens.push((String::from_utf8_lossy(&bytes[start..pos]).into_owned(), line));
        }
        if tokens[0].0 != "P5" {
            return Err(parse_err(path, tokens[0].1, format!("expected magic P5, found {}", tokens[0].0)));
        }
        let num = |(tok, line): &(String, usize), name: &str| -> Result<usize> {
            tok.parse()
                .map_err(|_| parse_err(path, *line, format!("cannot parse `{tok}` as {name}")))
        };
        let width = num(&tokens[1], "width")?;
        let height = num(&tokens[2], "height")?;
        let maxval = num(&tokens[3], "maxval")?;
        if maxval == 0 || maxval > 255 {
            return Err(parse_err(path, tokens[3].1, format!("maxval {maxval} outside 1..=255")));
        }
        // Exactly one whitespace byte separates the header from the raster.
        pos += 1;
        let pixels = bytes.get(pos..).unwrap_or_default().to_vec();
        if pixels.len() != width * height {
            return Err(parse_err(
                path,
                tokens[3].1,
                format!("raster has {} bytes, expected {}", pixels.len(), width * height),
            ));
        }
        if let Some(p) = pixels.iter().find(|&&p| p as usize > maxval) {
            return Err(parse_err(path, tokens[3].1, format!("pixel {p} exceeds maxval {maxval}")));
        }
        Ok(Pgm {
            width,
            height,
            maxval: maxval as u8,
            pixels,
        })
    }
}

pub fn write_pgm(path: &Path, img: &Pgm) -> Result<()> {
    write_file(path, &img.to_bytes())
}

pub fn read_pgm(path: &Path) -> Result<Pgm> {
    Pgm::parse(path, &read_bytes(path)?)
}

/// Clustering error of one method on one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub method: String,
    pub p_out: f64,
    pub trial: usize,
    pub error: f64,
}

/// Mean and sample standard deviation over the trials of one method and outlier level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub method: String,
    pub p_out: f64,
    pub n: usize,
    pub mean: f64,
    pub std: f64,
}

/// Clustering error at one split fraction `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub p_out: f64,
    pub p: f64,
    pub trial: usize,
    pub error: f64,
}

/// One row per `(method, p_out)`, in order of first appearance.
pub fn aggregate(rows: &[ResultRow]) -> Vec<AggregateRow> {
    let mut groups: Vec<(String, f64, Vec<f64>)> = Vec::new();
    for r in rows {
        match groups.iter_mut().find(|g| g.0 == r.method && g.1 == r.p_out) {
            Some(g) => g.2.push(r.error),
            None => groups.push((r.method.clone(), r.p_out, vec![r.error])),
        }
    }
    groups
        .into_iter()
        .map(|(method, p_out, errs)| {
            let n = errs.len();
            let mean = errs.iter().sum::<f64>() / n as f64;
            let std = if n > 1 {
                (errs.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
            } else {
                0.0
            };
            AggregateRow { method, p_out, n, mean, std }
        })
        .collect()
}

pub fn write_results(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let mut out = String::from("method,p_out,trial,error\n");
    for r in rows {
        check_method(&r.method)?;
        writeln!(out, "{},{},{},{}", r.method, fmt_real(r.p_out), r.trial, fmt_real(r.error)).expect("string write");
    }
    write_file(path, out.as_bytes())
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>> {
    read_table(path, &["method", "p_out", "trial", "error"], |line, rec| {
        Ok(ResultRow {
            method: field(path, line, rec, 0, "method")?,
            p_out: real(path, line, rec, 1, "p_out")?,
            trial: field(path, line, rec, 2, "trial")?,
            error: real(path, line, rec, 3, "error")?,
        })
    })
}

pub fn write_aggregate(path: &Path, rows: &[AggregateRow]) -> Result<()> {
    let mut out = String::from("method,p_out,n,mean,std\n");
    for r in rows {
        check_method(&r.method)?;
        writeln!(out, "{},{},{},{},{}", r.method, fmt_real(r.p_out), r.n, fmt_real(r.mean), fmt_real(r.std))
            .expect("string write");
    }
    write_file(path, out.as_bytes())
}

pub fn read_aggregate(path: &Path) -> Result<Vec<AggregateRow>> {
    read_table(path, &["method", "p_out", "n", "mean", "std"], |line, rec| {
        Ok(AggregateRow {
            method: field(path, line, rec, 0, "method")?,
            p_out: real(path, line, rec, 1, "p_out")?,
            n: field(path, line, rec, 2, "n")?,
            mean: real(path, line, rec, 3, "mean")?,
            std: real(path, line, rec, 4, "std")?,
        })
    })
}

/// Plain-text table with one row per method and one column per outlier level.
pub fn format_table(rows: &[AggregateRow]) -> String {
    let mut levels: Vec<f64> = rows.iter().map(|r| r.p_out).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let mut methods: Vec<&str> = Vec::new();
    for r in rows {
        if !methods.contains(&r.method.as_str()) {
            methods.push(&r.method);
        }
    }
    let width = methods.iter().map(|m| m.len()).max().unwrap_or(6).max(6);
    let mut out = format!("{:width$}", "method");
    for l in &levels {
        write!(out, "  {:>7}", format!("{:.0}%", l * 100.0)).expect("string write");
    }
    out.push('\n');
    for m in methods {
        write!(out, "{m:width$}").expect("string write");
        for l in &levels {
            match rows.iter().find(|r| r.method == m && r.p_out == *l) {
                Some(r) => write!(out, "  {:>7.3}", r.mean),
                None => write!(out, "  {:>7}", "-"),
            }
            .expect("string write");
        }
        out.push('\n');
    }
    out
}

pub fn write_sweep(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut out = String::from("p_out,p,trial,error\n");
    for r in rows {
        writeln!(out, "{},{},{},{}", fmt_real(r.p_out), fmt_real(r.p), r.trial, fmt_real(r.error)).expect("string write");
    }
    write_file(path, out.as_bytes())
}

pub fn read_sweep(path: &Path) -> Result<Vec<SweepRow>> {
    read_table(path, &["p_out", "p", "trial", "error"], |line, rec| {
        Ok(SweepRow {
            p_out: real(path, line, rec, 0, "p_out")?,
            p: real(path, line, rec, 1, "p")?,
            trial: field(path, line, rec, 2, "trial")?,
            error: real(path, line, rec, 3, "error")?,
        })
    })
}

/// `start,count` rows of an exit-box tally.
pub fn write_counts(path: &Path, counts: &[BucketCount]) -> Result<()> {
    let mut out = String::from("start,count\n");
    for c in counts {
        writeln!(out, "{},{}", fmt_real(c.start), c.count).expect("string write");
    }
    write_file(path, out.as_bytes())
}

pub fn read_counts(path: &Path) -> Result<Vec<BucketCount>> {
    read_table(path, &["start", "count"], |line, rec| {
        Ok(BucketCount {
            start: real(path, line, rec, 0, "start")?,
            count: field(path, line, rec, 1, "count")?,
        })
    })
}

fn check_method(name: &str) -> Result<()> {
    if name.is_empty() || name.contains([',', '"', '\n', '\r']) || name.trim() != name {
        return Err(Error::InvalidArgument(format!("method name {name:?} cannot be stored in CSV")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_round_trip_in_shortest_form() {
        for v in [0.0, -0.0, 1.0, 0.1, 1.0 / 3.0, 1e-300, 6.02e23, f64::MIN_POSITIVE] {
            let s = fmt_real(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
        assert_eq!(fmt_real(0.5), "0.5");
    }

    #[test]
    fn pgm_header_and_orientation() {
        let img = Pgm::from_grid(&[0.0, 1.0, 0.5, 0.25], 2, 2).unwrap();
        assert_eq!(img.pixels, vec![128, 64, 0, 255]);
        let bytes = img.to_bytes();
        assert!(bytes.starts_with(b"P5\n2 2\n255\n"));
        assert_eq!(Pgm::parse(Path::new("x.pgm"), &bytes).unwrap(), img);
    }

    #[test]
    fn pgm_rejects_short_raster() {
        let err = Pgm::parse(Path::new("x.pgm"), b"P5\n2 2\n255\n\x00").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
    }

    #[test]
    fn aggregate_means_per_group() {
        let rows: Vec<ResultRow> = [("a", 0.1, 0.2), ("a", 0.1, 0.4), ("b", 0.1, 0.0), ("a", 0.2, 1.0)]
            .iter()
            .enumerate()
            .map(|(i, &(m, p, e))| ResultRow {
                method: m.into(),
                p_out: p,
                trial: i,
                error: e,
            })
            .collect();
        let agg = aggregate(&rows);
        assert_eq!(agg.len(), 3);
        assert!((agg[0].mean - 0.3).abs() < 1e-15);
        assert_eq!(agg[0].n, 2);
        assert_eq!(agg[2].std, 0.0);
        let table = format_table(&agg);
        assert!(table.starts_with("method"));
        assert_eq!(table.lines().count(), 3);
    }

    #[test]
    fn method_names_are_checked() {
        assert!(check_method("k-means").is_ok());
        assert!(check_method("a,b").is_err());
        assert!(check_method("").is_err());
    }
}
