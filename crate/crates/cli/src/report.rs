//! Deterministic report writing. CSV files use RFC 4180 quoting with CRLF
//! row endings; every float is printed as `{:.12e}` so identical runs are
//! identical files. Reports carry no clocks and no environment echoes; the
//! only identity a file needs is the config hash in its name and sidecar.

use nilspec::projector::SpectralSlice;
use serde::Serialize;
use std::fs::File;
use std::io;
use std::path::Path;

pub fn float_field(x: f64) -> String {
    format!("{x:.12e}")
}

pub fn csv_writer(path: &Path) -> io::Result<csv::Writer<File>> {
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_path(path)?)
}

/// Serialize as pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> io::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)
}

/// One row per evaluation point: the slice values of P_mu f.
pub fn write_slice_csv(path: &Path, slice: &SpectralSlice) -> io::Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record([
        "mu", "index", "x1", "x2", "x3", "z1", "z2", "z3", "re", "im",
    ])?;
    for (i, (p, v)) in slice.points.iter().zip(&slice.values).enumerate() {
        w.write_record([
            float_field(slice.mu),
            i.to_string(),
            float_field(p.x[0]),
            float_field(p.x[1]),
            float_field(p.x[2]),
            float_field(p.z[0]),
            float_field(p.z[1]),
            float_field(p.z[2]),
            float_field(v.re),
            float_field(v.im),
        ])?;
    }
    w.flush()?;
    Ok(())
}
