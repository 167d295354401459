//! Plot-ready CSV and the dense binary 2D dump.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::Array2;

use super::spectrum::Spectrum1D;
use crate::{Error, Result, C64};

/// "SPF2" in ASCII, little-endian.
pub const BINARY_MAGIC: i64 = 0x3246_5053;
pub const BINARY_VERSION: i64 = 1;

/// Shortest decimal that parses back to the same f64 (exponent form for
/// very large or small magnitudes).
pub fn fmt_float(v: f64) -> String {
    format!("{v:?}")
}

fn writer(path: &Path) -> Result<csv::Writer<File>> {
    csv::Writer::from_path(path).map_err(Into::into)
}

/// Columns: k, omega_k, re, im, abs.
pub fn write_spectrum_csv(path: &Path, spectrum: &Spectrum1D) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["k", "omega_k", "re", "im", "abs"])?;
    for (k, z) in spectrum.values.iter().enumerate() {
        w.write_record([k.to_string(), fmt_float(spectrum.omega(k)), fmt_float(z.re), fmt_float(z.im), fmt_float(z.norm())])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Reads the format written by [`write_spectrum_csv`].
pub fn read_spectrum_csv(path: &Path) -> Result<Spectrum1D> {
    let mut r = csv::Reader::from_path(path)?;
    let mut values = Vec::new();
    let mut omega1 = None;
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let field = |c: usize| -> Result<f64> {
            rec.get(c)
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| Error::invalid(format!("{}: bad value in row {}", path.display(), i + 1)))
        };
        if i == 1 {
            omega1 = Some(field(1)?);
        }
        values.push(C64::new(field(2)?, field(3)?));
    }
    let period = match omega1 {
        Some(w) if w > 0.0 => 2.0 * std::f64::consts::PI / w,
        _ => 1.0,
    };
    Ok(Spectrum1D::new(values, period))
}

/// Columns: k, m, value.
pub fn write_grid_csv(path: &Path, values: &Array2<f64>) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["k", "m", "value"])?;
    for ((k, m), v) in values.indexed_iter() {
        w.write_record([k.to_string(), m.to_string(), fmt_float(*v)])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Columns: iter, residual (1-based iterations).
pub fn write_residual_csv(path: &Path, history: &[f64]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["iter", "residual"])?;
    for (i, r) in history.iter().enumerate() {
        w.write_record([(i + 1).to_string(), fmt_float(*r)])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Header of eight little-endian i64 (magic, version, N, M, 0, 0, 0, 0)
/// followed by N*M row-major little-endian f64.
pub fn write_grid_binary(path: &Path, values: &Array2<f64>) -> Result<()> {
    let (n, m) = values.dim();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let header = [BINARY_MAGIC, BINARY_VERSION, n as i64, m as i64, 0, 0, 0, 0];
    let mut put = |bytes: &[u8]| w.write_all(bytes).map_err(|e| Error::io(path, e));
    for h in header {
        put(&h.to_le_bytes())?;
    }
    for v in values.iter() {
        put(&v.to_le_bytes())?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_grid_binary(path: &Path) -> Result<Array2<f64>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut bytes = Vec::new();
    BufReader::new(file).read_to_end(&mut bytes).map_err(|e| Error::io(path, e))?;
    let word = |i: usize| -> Option<[u8; 8]> { bytes.get(i * 8..i * 8 + 8).map(|s| s.try_into().unwrap()) };
    let bad = || Error::invalid(format!("{}: not a grid dump", path.display()));
    let header: Vec<i64> = (0..8).map(|i| word(i).map(i64::from_le_bytes).ok_or_else(bad)).collect::<Result<_>>()?;
    if header[0] != BINARY_MAGIC || header[1] != BINARY_VERSION || header[2] < 0 || header[3] < 0 {
        return Err(bad());
    }
    let (n, m) = (header[2] as usize, header[3] as usize);
    if bytes.len() != 64 + 8 * n * m {
        return Err(bad());
    }
    let data = (0..n * m).map(|i| f64::from_le_bytes(word(8 + i).unwrap())).collect();
    Array2::from_shape_vec((n, m), data).map_err(|_| bad())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectrum_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        let s = Spectrum1D::new(vec![C64::new(1.5, -0.25), C64::new(0.1, 0.2), C64::new(-3.0, 0.0)], 2.5);
        write_spectrum_csv(&p, &s).unwrap();
        let back = read_spectrum_csv(&p).unwrap();
        assert_eq!(back.values, s.values);
        assert!((back.period - 2.5).abs() < 1e-12);
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("k,omega_k,re,im,abs\n0,0.0,1.5,-0.25,"));
    }

    #[test]
    fn binary_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.bin");
        let g = Array2::from_shape_fn((3, 4), |(i, j)| i as f64 * 10.0 + j as f64 + 0.5);
        write_grid_binary(&p, &g).unwrap();
        assert_eq!(std::fs::metadata(&p).unwrap().len(), 64 + 8 * 12);
        assert_eq!(read_grid_binary(&p).unwrap(), g);
    }
}
