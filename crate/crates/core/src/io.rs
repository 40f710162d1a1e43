//! CSV schemas shared between the library, the CLI, and recorded logs.
//!
//! All floating-point output is printed to 12 significant digits so that
//! artifacts re-parse to the values that produced them and repeated runs
//! are byte-identical.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::CsvError;
use crate::pipeline::AngleRecord;
use crate::speed::SpeedSample;

pub const PULSE_HEADER: &str = "t_seconds";
pub const WHEEL_HEADER: &str = "sector,alpha_true_rad,theta_rad";
pub const SPEED_HEADER: &str = "t_seconds,sector,omega_basic,omega_rev,omega_filtered";
pub const ANGLES_HEADER: &str = "revolution,sector,alpha_hat_rad";
pub const SPECTRUM_HEADER: &str = "freq_hz,amplitude";
pub const TRUTH_HEADER: &str = "t_seconds,omega_rad_s";
pub const COMPARE_HEADER: &str =
    "t_seconds,omega_true,omega_basic,omega_cls,omega_notch,omega_lp,omega_zplp";

/// Format a float with 12 significant digits in plain decimal notation.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

fn open_lines(path: &Path) -> Result<impl Iterator<Item = std::io::Result<String>>, CsvError> {
    Ok(BufReader::new(File::open(path)?).lines())
}

fn expect_header(
    lines: &mut impl Iterator<Item = std::io::Result<String>>,
    expected: &str,
) -> Result<(), CsvError> {
    let got = lines
        .next()
        .ok_or_else(|| CsvError::Parse {
            line: 1,
            message: "empty file".to_string(),
        })??;
    if got.trim_end() != expected {
        return Err(CsvError::BadHeader {
            expected: expected.to_string(),
            got,
        });
    }
    Ok(())
}

fn parse_f64(field: &str, line: usize) -> Result<f64, CsvError> {
    field.trim().parse().map_err(|_| CsvError::Parse {
        line,
        message: format!("not a number: '{field}'"),
    })
}

fn parse_opt_f64(field: &str, line: usize) -> Result<Option<f64>, CsvError> {
    let field = field.trim();
    if field.is_empty() {
        Ok(None)
    } else {
        parse_f64(field, line).map(Some)
    }
}

pub fn write_pulse_csv(path: &Path, timestamps: &[f64]) -> Result<(), CsvError> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{PULSE_HEADER}")?;
    for t in timestamps {
        writeln!(w, "{}", format_sig(*t))?;
    }
    Ok(w.flush()?)
}

pub fn read_pulse_csv(path: &Path) -> Result<Vec<f64>, CsvError> {
    let mut lines = open_lines(path)?;
    expect_header(&mut lines, PULSE_HEADER)?;
    let mut out = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse_f64(&line, idx + 2)?);
    }
    Ok(out)
}

/// Ground-truth sidecar: per-sector true angle and error.
pub fn write_wheel_csv(path: &Path, angles: &[f64], theta: &[f64]) -> Result<(), CsvError> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{WHEEL_HEADER}")?;
    for (i, (a, t)) in angles.iter().zip(theta).enumerate() {
        writeln!(w, "{i},{},{}", format_sig(*a), format_sig(*t))?;
    }
    Ok(w.flush()?)
}

pub fn read_wheel_csv(path: &Path) -> Result<Vec<(usize, f64, f64)>, CsvError> {
    let mut lines = open_lines(path)?;
    expect_header(&mut lines, WHEEL_HEADER)?;
    let mut out = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let n = idx + 2;
        let mut fields = line.split(',');
        let mut next = || {
            fields.next().ok_or(CsvError::Parse {
                line: n,
                message: "expected 3 fields".to_string(),
            })
        };
        let sector = next()?.trim().parse().map_err(|_| CsvError::Parse {
            line: n,
            message: "bad sector index".to_string(),
        })?;
        let alpha = parse_f64(next()?, n)?;
        let theta = parse_f64(next()?, n)?;
        out.push((sector, alpha, theta));
    }
    Ok(out)
}

pub fn write_speed_csv(path: &Path, samples: &[SpeedSample]) -> Result<(), CsvError> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{SPEED_HEADER}")?;
    for s in samples {
        let rev = s.omega_rev.map(format_sig).unwrap_or_default();
        let filt = s.omega_filtered.map(format_sig).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{rev},{filt}",
            format_sig(s.t),
            s.sector,
            format_sig(s.omega_basic)
        )?;
    }
    Ok(w.flush()?)
}

pub fn read_speed_csv(path: &Path) -> Result<Vec<SpeedSample>, CsvError> {
    let mut lines = open_lines(path)?;
    expect_header(&mut lines, SPEED_HEADER)?;
    let mut out = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let n = idx + 2;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(CsvError::Parse {
                line: n,
                message: format!("expected 5 fields, got {}", fields.len()),
            });
        }
        out.push(SpeedSample {
            t: parse_f64(fields[0], n)?,
            sector: fields[1].trim().parse().map_err(|_| CsvError::Parse {
                line: n,
                message: "bad sector index".to_string(),
            })?,
            omega_basic: parse_f64(fields[2], n)?,
            omega_rev: parse_opt_f64(fields[3], n)?,
            omega_filtered: parse_opt_f64(fields[4], n)?,
        });
    }
    Ok(out)
}

/// Estimate trajectory: one row per (update, sector).
pub fn write_angles_csv(path: &Path, records: &[AngleRecord]) -> Result<(), CsvError> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{ANGLES_HEADER}")?;
    for rec in records {
        for (sector, alpha) in rec.alpha_hat.iter().enumerate() {
            writeln!(w, "{},{sector},{}", rec.revolution, format_sig(*alpha))?;
        }
    }
    Ok(w.flush()?)
}

pub fn read_angles_csv(path: &Path) -> Result<Vec<(u64, usize, f64)>, CsvError> {
    let mut lines = open_lines(path)?;
    expect_header(&mut lines, ANGLES_HEADER)?;
    let mut out = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let n = idx + 2;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(CsvError::Parse {
                line: n,
                message: format!("expected 3 fields, got {}", fields.len()),
            });
        }
        let revolution = fields[0].trim().parse().map_err(|_| CsvError::Parse {
            line: n,
            message: "bad revolution".to_string(),
        })?;
        let sector = fields[1].trim().parse().map_err(|_| CsvError::Parse {
            line: n,
            message: "bad sector index".to_string(),
        })?;
        out.push((revolution, sector, parse_f64(fields[2], n)?));
    }
    Ok(out)
}

pub fn write_spectrum_csv(path: &Path, freqs: &[f64], amps: &[f64]) -> Result<(), CsvError> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{SPECTRUM_HEADER}")?;
    for (f, a) in freqs.iter().zip(amps) {
        writeln!(w, "{},{}", format_sig(*f), format_sig(*a))?;
    }
    Ok(w.flush()?)
}

/// True instantaneous speed at the pulse times, for offline comparisons.
pub fn write_truth_csv(path: &Path, points: &[(f64, f64)]) -> Result<(), CsvError> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{TRUTH_HEADER}")?;
    for (t, omega) in points {
        writeln!(w, "{},{}", format_sig(*t), format_sig(*omega))?;
    }
    Ok(w.flush()?)
}

pub fn read_truth_csv(path: &Path) -> Result<Vec<(f64, f64)>, CsvError> {
    let mut lines = open_lines(path)?;
    expect_header(&mut lines, TRUTH_HEADER)?;
    let mut out = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let n = idx + 2;
        let (t, omega) = line.split_once(',').ok_or(CsvError::Parse {
            line: n,
            message: "expected 2 fields".to_string(),
        })?;
        out.push((parse_f64(t, n)?, parse_f64(omega, n)?));
    }
    Ok(out)
}

/// One aligned row of the filter comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareRow {
    pub t: f64,
    pub omega_true: Option<f64>,
    pub omega_basic: f64,
    pub omega_cls: f64,
    pub omega_notch: f64,
    pub omega_lp: f64,
    pub omega_zplp: f64,
}

pub fn write_compare_csv(path: &Path, rows: &[CompareRow]) -> Result<(), CsvError> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{COMPARE_HEADER}")?;
    for r in rows {
        let truth = r.omega_true.map(format_sig).unwrap_or_default();
        writeln!(
            w,
            "{},{truth},{},{},{},{},{}",
            format_sig(r.t),
            format_sig(r.omega_basic),
            format_sig(r.omega_cls),
            format_sig(r.omega_notch),
            format_sig(r.omega_lp),
            format_sig(r.omega_zplp)
        )?;
    }
    Ok(w.flush()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_sig_keeps_twelve_digits() {
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(1.0), "1.00000000000");
        assert_eq!(format_sig(17.64), "17.6400000000");
        assert_eq!(format_sig(-0.009894), "-0.00989400000000");
        assert_eq!(format_sig(123456.789012), "123456.789012");
    }

    #[test]
    fn format_sig_round_trips() {
        for &x in &[
            9.894e-3,
            17.64,
            0.174532925199,
            601.2345,
            -2.808,
            1.0e-9,
            123456.789,
        ] {
            let parsed: f64 = format_sig(x).parse().unwrap();
            assert!(
                (parsed - x).abs() <= 1e-11 * x.abs().max(1.0),
                "{x} -> {parsed}"
            );
        }
    }

    #[test]
    fn pulse_csv_round_trip() {
        let dir = std::env::temp_dir().join(format!("wheelspeed-io-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("pulses.csv");
        let ts = vec![0.009894, 0.019788, 0.029682];
        write_pulse_csv(&path, &ts).unwrap();
        let back = read_pulse_csv(&path).unwrap();
        assert_eq!(back.len(), 3);
        for (a, b) in ts.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn speed_csv_round_trip_preserves_empty_cells() {
        let dir = std::env::temp_dir().join(format!("wheelspeed-io2-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("speed.csv");
        let samples = vec![
            SpeedSample {
                t: 0.01,
                sector: 0,
                omega_basic: 17.6,
                omega_rev: None,
                omega_filtered: None,
            },
            SpeedSample {
                t: 0.02,
                sector: 1,
                omega_basic: 17.7,
                omega_rev: Some(17.65),
                omega_filtered: Some(17.64),
            },
        ];
        write_speed_csv(&path, &samples).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), SPEED_HEADER);
        assert!(lines.next().unwrap().ends_with(",,"));
        let back = read_speed_csv(&path).unwrap();
        assert_eq!(back.len(), 2);
        assert!(back[0].omega_rev.is_none());
        assert!((back[1].omega_filtered.unwrap() - 17.64).abs() < 1e-9);
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn bad_header_is_rejected() {
        let dir = std::env::temp_dir().join(format!("wheelspeed-io3-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("pulses.csv");
        std::fs::write(&path, "time\n1.0\n").unwrap();
        assert!(matches!(
            read_pulse_csv(&path),
            Err(CsvError::BadHeader { .. })
        ));
        std::fs::write(&path, "t_seconds\nnot-a-number\n").unwrap();
        assert!(matches!(
            read_pulse_csv(&path),
            Err(CsvError::Parse { line: 2, .. })
        ));
        std::fs::remove_dir_all(&dir).ok();
    }
}
