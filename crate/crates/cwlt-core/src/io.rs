//! CSV and JSON serialization.
//!
//! Floats are printed with 17 significant digits so that re-running a
//! configuration reproduces byte-identical outputs and values round-trip
//! through parsing. Files use UTF-8 and LF line endings.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::engine::{FrequencyGrid, SourceMeta, TfRepresentation};
use crate::error::{CwltError, Result};
use crate::recover::RecoveredComponent;
use crate::ridge::RidgeSet;
use crate::signal::{SampledSignal, SignalKind};
use crate::sigma::SigmaProfile;
use crate::window::WindowSpec;

/// 17-significant-digit float formatting (round-trips f64 exactly).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// JSON sidecar written next to a signal CSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SignalSidecar {
    pub n: usize,
    pub sample_rate: f64,
    pub t_start: f64,
    pub kind: SignalKind,
    pub spec_name: Option<String>,
    pub snr_db: Option<f64>,
    pub seed: Option<u64>,
}

/// Writes `<stem>.csv` (t, value_re[, value_im]) and `<stem>.json`.
pub fn write_signal(stem: &Path, sig: &SampledSignal, sidecar: &SignalSidecar) -> Result<()> {
    let mut csv = String::new();
    match sig.kind {
        SignalKind::Real => csv.push_str("t,value_re\n"),
        SignalKind::Complex => csv.push_str("t,value_re,value_im\n"),
    }
    for (m, z) in sig.samples.iter().enumerate() {
        let t = sig.t_start + m as f64 / sig.sample_rate;
        match sig.kind {
            SignalKind::Real => {
                csv.push_str(&format!("{},{}\n", fmt_f64(t), fmt_f64(z.re)));
            }
            SignalKind::Complex => {
                csv.push_str(&format!(
                    "{},{},{}\n",
                    fmt_f64(t),
                    fmt_f64(z.re),
                    fmt_f64(z.im)
                ));
            }
        }
    }
    fs::write(stem.with_extension("csv"), csv)?;
    let json = serde_json::to_string_pretty(sidecar)?;
    fs::write(stem.with_extension("json"), json)?;
    Ok(())
}

/// Reads a signal written by [`write_signal`].
pub fn read_signal(stem: &Path) -> Result<(SampledSignal, SignalSidecar)> {
    let sidecar: SignalSidecar =
        serde_json::from_str(&fs::read_to_string(stem.with_extension("json"))?)?;
    let text = fs::read_to_string(stem.with_extension("csv"))?;
    let mut samples = Vec::with_capacity(sidecar.n);
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        let parse = |s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|e| CwltError::Io(format!("bad float '{s}': {e}")))
        };
        match sidecar.kind {
            SignalKind::Real => {
                if parts.len() < 2 {
                    return Err(CwltError::Io(format!("short row {i}")));
                }
                samples.push(Complex64::new(parse(parts[1])?, 0.0));
            }
            SignalKind::Complex => {
                if parts.len() < 3 {
                    return Err(CwltError::Io(format!("short row {i}")));
                }
                samples.push(Complex64::new(parse(parts[1])?, parse(parts[2])?));
            }
        }
    }
    if samples.len() != sidecar.n {
        return Err(CwltError::Io(format!(
            "sidecar says {} samples, csv has {}",
            sidecar.n,
            samples.len()
        )));
    }
    Ok((
        SampledSignal {
            samples,
            sample_rate: sidecar.sample_rate,
            t_start: sidecar.t_start,
            kind: sidecar.kind,
        },
        sidecar,
    ))
}

/// Writes a sigma profile as `t,sigma` rows.
pub fn write_sigma(path: &Path, times: &[f64], sigma: &SigmaProfile) -> Result<()> {
    let mut csv = String::from("t,sigma\n");
    for (t, s) in times.iter().zip(&sigma.values) {
        csv.push_str(&format!("{},{}\n", fmt_f64(*t), fmt_f64(*s)));
    }
    fs::write(path, csv)?;
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TfHeader {
    pub n_freq: usize,
    pub n_time: usize,
    pub freqs: Vec<f64>,
    pub sigma: Vec<f64>,
    pub mu: f64,
    pub tau0: f64,
    pub t_start: f64,
    pub fs: f64,
    pub kind: SignalKind,
}

/// Writes `tf_header.json`, raw column-major complex values
/// (`tf_values.bin`, little-endian f64 re/im pairs) and `tf_magnitude.csv`
/// (one row per frequency bin: xi, then per-column magnitudes).
pub fn write_tf(dir: &Path, tf: &TfRepresentation) -> Result<()> {
    fs::create_dir_all(dir)?;
    let header = TfHeader {
        n_freq: tf.n_freq(),
        n_time: tf.n_time(),
        freqs: tf.grid.freqs.clone(),
        sigma: tf.sigma.values.clone(),
        mu: tf.window.mu,
        tau0: tf.window.tau0,
        t_start: tf.meta.t_start,
        fs: tf.meta.sample_rate,
        kind: tf.meta.kind,
    };
    fs::write(
        dir.join("tf_header.json"),
        serde_json::to_string_pretty(&header)?,
    )?;

    let mut bin = Vec::with_capacity(tf.values.len() * 16);
    for z in &tf.values {
        bin.extend_from_slice(&z.re.to_le_bytes());
        bin.extend_from_slice(&z.im.to_le_bytes());
    }
    fs::write(dir.join("tf_values.bin"), bin)?;

    let mut file = fs::File::create(dir.join("tf_magnitude.csv"))?;
    let mut head = String::from("xi");
    for m in 0..tf.n_time() {
        let t = tf.meta.t_start + m as f64 / tf.meta.sample_rate;
        head.push_str(&format!(",{}", fmt_f64(t)));
    }
    head.push('\n');
    file.write_all(head.as_bytes())?;
    for i in 0..tf.n_freq() {
        let mut row = fmt_f64(tf.grid.freqs[i]);
        for m in 0..tf.n_time() {
            row.push_str(&format!(",{}", fmt_f64(tf.at(i, m).norm())));
        }
        row.push('\n');
        file.write_all(row.as_bytes())?;
    }
    Ok(())
}

/// Reads back a transform written by [`write_tf`].
pub fn read_tf(dir: &Path) -> Result<TfRepresentation> {
    let header: TfHeader =
        serde_json::from_str(&fs::read_to_string(dir.join("tf_header.json"))?)?;
    let bin = fs::read(dir.join("tf_values.bin"))?;
    let expect = header.n_freq * header.n_time * 16;
    if bin.len() != expect {
        return Err(CwltError::Io(format!(
            "tf_values.bin has {} bytes, expected {expect}",
            bin.len()
        )));
    }
    let mut values = Vec::with_capacity(header.n_freq * header.n_time);
    for chunk in bin.chunks_exact(16) {
        let re = f64::from_le_bytes(chunk[0..8].try_into().unwrap());
        let im = f64::from_le_bytes(chunk[8..16].try_into().unwrap());
        values.push(Complex64::new(re, im));
    }
    Ok(TfRepresentation {
        values,
        grid: FrequencyGrid {
            freqs: header.freqs.clone(),
        },
        sigma: SigmaProfile {
            values: header.sigma.clone(),
        },
        window: WindowSpec::new(header.mu, header.tau0)?,
        meta: SourceMeta {
            n: header.n_time,
            sample_rate: header.fs,
            t_start: header.t_start,
            kind: header.kind,
        },
    })
}

/// Writes ridge tracks: `t, if_1..K, chirp_1..K, a_1..K`.
pub fn write_ridges(path: &Path, ridge: &RidgeSet, times: &[f64]) -> Result<()> {
    let mut head = String::from("t");
    for k in 1..=ridge.k {
        head.push_str(&format!(",if_{k}"));
    }
    for k in 1..=ridge.k {
        head.push_str(&format!(",chirp_{k}"));
    }
    for k in 1..=ridge.k {
        head.push_str(&format!(",a_{k}"));
    }
    head.push('\n');
    let mut csv = head;
    for (m, &t) in times.iter().enumerate() {
        let mut row = fmt_f64(t);
        for k in 0..ridge.k {
            row.push_str(&format!(",{}", fmt_f64(ridge.if_at(k, m))));
        }
        for k in 0..ridge.k {
            let c = ridge
                .chirp_row(k)
                .map(|r| r[m])
                .unwrap_or(f64::NAN);
            row.push_str(&format!(",{}", fmt_f64(c)));
        }
        for k in 0..ridge.k {
            row.push_str(&format!(",{}", fmt_f64(ridge.a_at(k, m))));
        }
        row.push('\n');
        csv.push_str(&row);
    }
    fs::write(path, csv)?;
    Ok(())
}

/// Writes one recovered component with truth and absolute error columns.
pub fn write_recovered(
    path: &Path,
    rec: &RecoveredComponent,
    truth: Option<&[Complex64]>,
    times: &[f64],
) -> Result<()> {
    let complex = rec.kind == SignalKind::Complex;
    let mut head = String::from("t,recovered_re");
    if complex {
        head.push_str(",recovered_im");
    }
    if truth.is_some() {
        head.push_str(",truth,abs_error");
    }
    head.push('\n');
    let mut csv = head;
    for (m, &t) in times.iter().enumerate() {
        let mut row = format!("{},{}", fmt_f64(t), fmt_f64(rec.values[m].re));
        if complex {
            row.push_str(&format!(",{}", fmt_f64(rec.values[m].im)));
        }
        if let Some(tr) = truth {
            let err = (rec.values[m] - tr[m]).norm();
            row.push_str(&format!(",{},{}", fmt_f64(tr[m].re), fmt_f64(err)));
        }
        row.push('\n');
        csv.push_str(&row);
    }
    fs::write(path, csv)?;
    Ok(())
}

/// Serializes any value as pretty JSON into a file.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(())
}

/// Writes a generic numeric table with a header row.
pub fn write_table(path: &Path, header: &[String], rows: &[Vec<f64>]) -> Result<()> {
    let mut csv = header.join(",");
    csv.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&x| fmt_f64(x)).collect();
        csv.push_str(&cells.join(","));
        csv.push('\n');
    }
    fs::write(path, csv)?;
    Ok(())
}
