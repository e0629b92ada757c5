//! CSV dialect and number formatting shared by all commands.
//!
//! Output is comma-separated UTF-8 with `\n` line endings and a mandatory
//! header. Floats carry 9 significant digits, written without locale.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::path::Path;

use freesnake::analysis::CurvatureProfile;
use freesnake::compare::DurationRecord;
use freesnake::Point;

use crate::error::{CliError, CliResult};

pub const TRACE_HEADER: [&str; 4] = ["trial_id", "point_index", "x", "y"];
pub const RECTIFY_HEADER: [&str; 5] = ["trial_id", "src_x", "src_y", "dst_x", "dst_y"];
pub const PROFILE_HEADER: [&str; 4] = ["trial_id", "arc_fraction", "curvature", "valid"];
pub const STATS_HEADER: [&str; 6] = ["group", "arc_fraction", "mean", "std", "n", "valid"];
pub const DURATION_HEADER: [&str; 3] = ["trial_id", "frame_count", "fps"];
pub const DURATION_SUMMARY_HEADER: [&str; 6] = ["group", "n", "mean_s", "std_s", "min_s", "max_s"];
pub const COVERAGE_HEADER: [&str; 6] = ["subject", "reference", "region", "coverage", "inside", "total"];

/// `%.9g`-style formatting: fixed notation for exponents in [-4, 9),
/// scientific otherwise, trailing zeros trimmed.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{}{:02}", trim_zeros(mantissa.to_string()), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

pub fn writer(path: &Path) -> CliResult<csv::Writer<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(CliError::io(format!("creating {}", dir.display())))?;
    }
    let file = File::create(path).map_err(CliError::io(format!("creating {}", path.display())))?;
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file))
}

pub fn write_err(path: &Path) -> impl Fn(csv::Error) -> CliError {
    let path = path.to_path_buf();
    move |e| CliError::Input(format!("writing {}: {e}", path.display()))
}

fn reader(path: &Path, header: &[&str]) -> CliResult<csv::Reader<File>> {
    let file = File::open(path).map_err(CliError::io(format!("opening {}", path.display())))?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let found = rdr.headers().map_err(|e| row_error(path, 1, e.to_string()))?;
    if found.iter().collect::<Vec<_>>() != header {
        return Err(row_error(
            path,
            1,
            format!("expected header `{}`, found `{}`", header.join(","), found.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    Ok(rdr)
}

fn row_error(path: &Path, line: u64, message: String) -> CliError {
    CliError::Row {
        path: path.to_path_buf(),
        line,
        message,
    }
}

/// Iterates records with their 1-based file line numbers.
fn records(path: &Path, header: &[&str]) -> CliResult<Vec<(u64, csv::StringRecord)>> {
    let mut rdr = reader(path, header)?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            row_error(path, line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != header.len() {
            return Err(row_error(path, line, format!("expected {} fields, found {}", header.len(), rec.len())));
        }
        out.push((line, rec));
    }
    Ok(out)
}

fn field<T: std::str::FromStr>(path: &Path, line: u64, rec: &csv::StringRecord, i: usize, name: &str) -> CliResult<T> {
    rec[i]
        .parse()
        .map_err(|_| row_error(path, line, format!("`{}` is not a valid {name}", &rec[i])))
}

fn finite(path: &Path, line: u64, rec: &csv::StringRecord, i: usize, name: &str) -> CliResult<f64> {
    let v: f64 = field(path, line, rec, i, name)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(row_error(path, line, format!("{name} must be finite")))
    }
}

/// Trace points grouped by trial, each ordered by point index.
pub fn read_traces(path: &Path) -> CliResult<BTreeMap<String, Vec<Point>>> {
    let mut trials: BTreeMap<String, Vec<(u64, u64, Point)>> = BTreeMap::new();
    for (line, rec) in records(path, &TRACE_HEADER)? {
        let index: u64 = field(path, line, &rec, 1, "point_index")?;
        let x = finite(path, line, &rec, 2, "x")?;
        let y = finite(path, line, &rec, 3, "y")?;
        trials.entry(rec[0].to_string()).or_default().push((index, line, Point::new(x, y)));
    }
    trials
        .into_iter()
        .map(|(id, mut pts)| {
            pts.sort_by_key(|&(index, _, _)| index);
            if let Some(w) = pts.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(row_error(path, w[1].1, format!("duplicate point_index {} in trial `{id}`", w[1].0)));
            }
            Ok((id, pts.into_iter().map(|(_, _, p)| p).collect()))
        })
        .collect()
}

pub type Correspondences = (Vec<Point>, Vec<Point>);

pub fn read_rectification(path: &Path) -> CliResult<BTreeMap<String, Correspondences>> {
    let mut out: BTreeMap<String, Correspondences> = BTreeMap::new();
    for (line, rec) in records(path, &RECTIFY_HEADER)? {
        let v = |i, name| finite(path, line, &rec, i, name);
        let src = Point::new(v(1, "src_x")?, v(2, "src_y")?);
        let dst = Point::new(v(3, "dst_x")?, v(4, "dst_y")?);
        let entry = out.entry(rec[0].to_string()).or_default();
        entry.0.push(src);
        entry.1.push(dst);
    }
    Ok(out)
}

/// Profiles grouped by trial; the end mask width is inferred from the
/// leading invalid rows.
pub fn read_profiles(path: &Path) -> CliResult<BTreeMap<String, CurvatureProfile>> {
    let mut rows: BTreeMap<String, Vec<(u64, Option<f64>)>> = BTreeMap::new();
    for (line, rec) in records(path, &PROFILE_HEADER)? {
        let _: f64 = finite(path, line, &rec, 1, "arc_fraction")?;
        let valid: u8 = field(path, line, &rec, 3, "valid flag")?;
        let value = match valid {
            1 => Some(finite(path, line, &rec, 2, "curvature")?),
            0 => None,
            _ => return Err(row_error(path, line, "valid must be 0 or 1".into())),
        };
        rows.entry(rec[0].to_string()).or_default().push((line, value));
    }
    rows.into_iter()
        .map(|(id, values)| {
            let first_line = values.first().map_or(0, |v| v.0);
            let values: Vec<Option<f64>> = values.into_iter().map(|v| v.1).collect();
            let offset = values.iter().take_while(|v| v.is_none()).count();
            let profile = CurvatureProfile::from_values(values, offset)
                .map_err(|e| row_error(path, first_line, format!("trial `{id}`: {e}")))?;
            Ok((id, profile))
        })
        .collect()
}

pub fn read_durations(path: &Path) -> CliResult<Vec<DurationRecord>> {
    records(path, &DURATION_HEADER)?
        .into_iter()
        .map(|(line, rec)| {
            let frames: u64 = field(path, line, &rec, 1, "frame_count")?;
            let fps = finite(path, line, &rec, 2, "fps")?;
            DurationRecord::new(&rec[0], frames, fps).map_err(|e| row_error(path, line, e.to_string()))
        })
        .collect()
}

pub fn write_profiles<'a>(path: &Path, profiles: impl IntoIterator<Item = (&'a str, &'a CurvatureProfile)>) -> CliResult<()> {
    let mut w = writer(path)?;
    let err = write_err(path);
    w.write_record(PROFILE_HEADER).map_err(&err)?;
    for (id, profile) in profiles {
        for (frac, value) in profile.arc_fraction().iter().zip(profile.values()) {
            let (curv, valid) = match value {
                Some(v) => (format_float(*v), "1"),
                None => (String::new(), "0"),
            };
            w.write_record([id, &format_float(*frac), &curv, valid]).map_err(&err)?;
        }
    }
    w.flush().map_err(CliError::io(format!("writing {}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(-0.0), "0");
        assert_eq!(format_float(1.0), "1");
        assert_eq!(format_float(0.2), "0.2");
        assert_eq!(format_float(1.0 / 3.0), "0.333333333");
        assert_eq!(format_float(2.0 / 3.0 * 100.0), "66.6666667");
        assert_eq!(format_float(123456789.4), "123456789");
        assert_eq!(format_float(1234567890.0), "1.23456789e+09");
        assert_eq!(format_float(0.000012345678912), "1.23456789e-05");
        assert_eq!(format_float(0.00012345678912), "0.000123456789");
        assert_eq!(format_float(-250.008806452), "-250.008806");
        assert_eq!(format_float(9.9999999999), "10");
    }

    #[test]
    fn formatting_round_trips_to_nine_digits() {
        for &x in &[std::f64::consts::PI, 1e-7 * std::f64::consts::E, 6.02214076e23, -0.1 / 7.0] {
            let back: f64 = format_float(x).parse().unwrap();
            assert!((back - x).abs() <= 5e-9 * x.abs());
        }
    }
}
