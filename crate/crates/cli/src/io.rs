//! File output conventions and particle CSV files.

use std::path::Path;

use anyhow::{bail, Context, Result};
use ccshape_core::MassConfiguration;
use serde::Serialize;

/// 17 significant digits: exact round trip for `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write `text`, adding a final newline if missing, creating parent directories.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_text(path, &serde_json::to_string_pretty(value)?)
}

/// CSV with a fixed header; every row is already formatted.
pub fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(&row)?;
    }
    let bytes = writer.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?;
    write_text(path, &String::from_utf8(bytes)?)
}

/// Header of a particle file: coordinates then mass.
pub fn particle_header(dim: usize) -> Vec<&'static str> {
    let mut h = vec!["x", "y", "z"][..dim].to_vec();
    h.push("mass");
    h
}

pub fn write_particles(path: &Path, config: &MassConfiguration) -> Result<()> {
    let rows = config
        .points()
        .zip(config.masses())
        .map(|(p, m)| p.iter().chain(std::iter::once(m)).map(|v| num(*v)).collect());
    write_csv(path, &particle_header(config.dim()), rows)
}

/// Read one particle per row. A header row is recognised by non-numeric
/// fields; named columns `x, y, z, mass` fix the layout. Without a header, two
/// columns mean 2D, and three or four columns mean 3D unless `dim` says
/// otherwise; a trailing column beyond `dim` is the mass.
pub fn read_particles(path: &Path, dim: Option<usize>) -> Result<MassConfiguration> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let mut rows: Vec<csv::StringRecord> = Vec::new();
    for r in reader.records() {
        let r = r.with_context(|| format!("malformed CSV in {}", path.display()))?;
        if r.iter().all(|f| f.is_empty()) {
            continue;
        }
        rows.push(r);
    }
    if rows.is_empty() {
        bail!("{} contains no particles", path.display());
    }
    let header = if rows[0].iter().any(|f| f.parse::<f64>().is_err()) {
        Some(rows.remove(0))
    } else {
        None
    };
    let width = rows[0].len();
    let (coords, has_mass) = match &header {
        Some(h) => {
            let names: Vec<String> = h.iter().map(|f| f.to_ascii_lowercase()).collect();
            let coords = names.iter().filter(|n| matches!(n.as_str(), "x" | "y" | "z")).count();
            let has_mass = names.iter().any(|n| n == "mass" || n == "m");
            if coords + usize::from(has_mass) != names.len() {
                bail!("unrecognised header {:?}; expected columns x, y, [z], [mass]", names);
            }
            (coords, has_mass)
        }
        None => match (dim, width) {
            (Some(d), w) if w == d => (d, false),
            (Some(d), w) if w == d + 1 => (d, true),
            (Some(d), w) => bail!("{w} columns do not fit dimension {d}"),
            (None, 2) => (2, false),
            (None, 3) => (3, false),
            (None, 4) => (3, true),
            (None, w) => bail!("cannot infer dimension from {w} columns; pass --dim"),
        },
    };
    if let Some(d) = dim {
        if d != coords {
            bail!("file has {coords} coordinate columns but --dim is {d}");
        }
    }
    let mut positions = Vec::with_capacity(rows.len() * coords);
    let mut masses = Vec::with_capacity(rows.len());
    for (line, row) in rows.iter().enumerate() {
        if row.len() != coords + usize::from(has_mass) {
            bail!("row {}: expected {} fields, found {}", line + 1, coords + usize::from(has_mass), row.len());
        }
        let values: Vec<f64> = row
            .iter()
            .map(|f| f.parse::<f64>().with_context(|| format!("row {}: `{f}` is not a number", line + 1)))
            .collect::<Result<_>>()?;
        positions.extend_from_slice(&values[..coords]);
        masses.push(if has_mass { values[coords] } else { 1.0 });
    }
    Ok(MassConfiguration::new(coords, masses, positions)?)
}
