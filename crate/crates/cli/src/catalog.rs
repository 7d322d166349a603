//! On-disk catalog of critical points.
//!
//! Layout under the catalog directory:
//! `records/<id>.json` holds one record each, `index.json` lists all records
//! ascending by `C` within each `(N, d, masses)` namespace, and `catalog.lock`
//! exists while a writer holds the catalog.

use std::fs::OpenOptions;
use std::io::ErrorKind;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use ccshape_core::analysis::{fingerprint, ShapeFingerprint};
use ccshape_core::solver::{CriticalPoint, Origin, PointKind, SearchMode, SolverConfig};
use ccshape_core::MassConfiguration;
use serde::{Deserialize, Serialize};

use crate::io::write_json;

pub const RECORD_SCHEMA: u32 = 1;
const LOCK_TIMEOUT: Duration = Duration::from_secs(60);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    pub n: usize,
    pub dim: usize,
    pub mass_label: String,
    pub masses: Vec<f64>,
    pub seed: u64,
    pub mode: SearchMode,
    pub solver: SolverConfig,
    pub complexity: f64,
    pub residual: f64,
    pub index: usize,
    pub zero_modes: usize,
    pub degenerate: bool,
    pub kind: PointKind,
    pub fingerprint_hash: String,
    pub start_index: u64,
    pub origin: Origin,
    pub iterations: usize,
    pub created: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Record {
    pub schema_version: u32,
    pub id: String,
    pub metadata: Metadata,
    pub positions: Vec<Vec<f64>>,
}

impl Record {
    pub fn from_point(point: &CriticalPoint, solver: &SolverConfig, mode: SearchMode) -> Self {
        let config = point.config();
        let mass_label = solver.masses.label();
        let hash = point.fingerprint.hash();
        Self {
            schema_version: RECORD_SCHEMA,
            id: format!("{}-{hash}", namespace(config.len(), config.dim(), &mass_label)),
            metadata: Metadata {
                n: config.len(),
                dim: config.dim(),
                mass_label,
                masses: config.masses().to_vec(),
                seed: solver.seed,
                mode,
                solver: solver.clone(),
                complexity: point.complexity,
                residual: point.residual,
                index: point.index,
                zero_modes: point.zero_modes,
                degenerate: point.degenerate,
                kind: point.kind,
                fingerprint_hash: hash,
                start_index: point.provenance.start_index,
                origin: point.provenance.origin.clone(),
                iterations: point.provenance.iterations,
                created: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            },
            positions: config.points().map(|p| p.to_vec()).collect(),
        }
    }

    pub fn namespace(&self) -> String {
        namespace(self.metadata.n, self.metadata.dim, &self.metadata.mass_label)
    }

    pub fn configuration(&self) -> Result<MassConfiguration> {
        Ok(MassConfiguration::from_points(
            self.metadata.dim,
            self.metadata.masses.clone(),
            &self.positions,
        )?)
    }

    pub fn fingerprint(&self) -> Result<ShapeFingerprint> {
        Ok(fingerprint(&self.configuration()?)?)
    }
}

pub fn namespace(n: usize, dim: usize, mass_label: &str) -> String {
    format!("n{n}-d{dim}-{mass_label}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub id: String,
    pub namespace: String,
    pub complexity: f64,
    pub index: usize,
    pub kind: PointKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Index {
    pub schema_version: u32,
    pub records: Vec<IndexEntry>,
}

pub struct Catalog {
    root: PathBuf,
}

/// Held while writing; removes the lock file on drop.
pub struct WriteLock {
    path: PathBuf,
}

impl Drop for WriteLock {
    fn drop(&mut self) {
        let _ = std::fs::remove_file(&self.path);
    }
}

impl Catalog {
    pub fn at(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn records_dir(&self) -> PathBuf {
        self.root.join("records")
    }

    pub fn index_path(&self) -> PathBuf {
        self.root.join("index.json")
    }

    fn record_path(&self, id: &str) -> PathBuf {
        self.records_dir().join(format!("{id}.json"))
    }

    /// Take the advisory writer lock, waiting for another writer to finish.
    pub fn lock(&self) -> Result<WriteLock> {
        std::fs::create_dir_all(&self.root).with_context(|| format!("cannot create {}", self.root.display()))?;
        let path = self.root.join("catalog.lock");
        let started = Instant::now();
        loop {
            match OpenOptions::new().write(true).create_new(true).open(&path) {
                Ok(_) => return Ok(WriteLock { path }),
                Err(e) if e.kind() == ErrorKind::AlreadyExists => {
                    if started.elapsed() > LOCK_TIMEOUT {
                        bail!("catalog is locked by another writer ({} exists)", path.display());
                    }
                    std::thread::sleep(Duration::from_millis(50));
                }
                Err(e) => return Err(e).with_context(|| format!("cannot create {}", path.display())),
            }
        }
    }

    /// All records, ordered by namespace, then `C`, then id.
    pub fn records(&self) -> Result<Vec<Record>> {
        let dir = self.records_dir();
        if !dir.exists() {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        for entry in std::fs::read_dir(&dir).with_context(|| format!("cannot list {}", dir.display()))? {
            let path = entry?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("json") {
                continue;
            }
            out.push(read_record(&path)?);
        }
        out.sort_by(|a, b| {
            a.namespace()
                .cmp(&b.namespace())
                .then(a.metadata.complexity.total_cmp(&b.metadata.complexity))
                .then(a.id.cmp(&b.id))
        });
        Ok(out)
    }

    pub fn get(&self, id: &str) -> Result<Record> {
        let path = self.record_path(id);
        if !path.exists() {
            bail!("no record `{id}` in {}", self.root.display());
        }
        read_record(&path)
    }

    /// Add records whose fingerprints match nothing already in their
    /// namespace. Returns the ids added and the ids of existing matches.
    pub fn insert(&self, _lock: &WriteLock, candidates: Vec<Record>) -> Result<(Vec<String>, Vec<String>)> {
        let mut existing: Vec<(String, String, ShapeFingerprint)> = self
            .records()?
            .into_iter()
            .map(|r| Ok((r.namespace(), r.id.clone(), r.fingerprint()?)))
            .collect::<Result<_>>()?;
        let mut added = Vec::new();
        let mut present = Vec::new();
        for mut record in candidates {
            let ns = record.namespace();
            let print = record.fingerprint()?;
            if let Some((_, id, _)) = existing.iter().find(|(n, _, f)| *n == ns && f.matches(&print)) {
                present.push(id.clone());
                continue;
            }
            // Distinct shapes with colliding hashes get a numeric suffix.
            let base = record.id.clone();
            let mut k = 1;
            while self.record_path(&record.id).exists() {
                k += 1;
                record.id = format!("{base}-{k}");
            }
            write_json(&self.record_path(&record.id), &record)?;
            existing.push((ns, record.id.clone(), print));
            added.push(record.id);
        }
        self.write_index()?;
        Ok((added, present))
    }

    /// Rebuild the index from the records directory.
    pub fn write_index(&self) -> Result<()> {
        let records = self
            .records()?
            .into_iter()
            .map(|r| IndexEntry {
                namespace: r.namespace(),
                id: r.id,
                complexity: r.metadata.complexity,
                index: r.metadata.index,
                kind: r.metadata.kind,
            })
            .collect();
        write_json(
            &self.index_path(),
            &Index {
                schema_version: RECORD_SCHEMA,
                records,
            },
        )
    }
}

fn read_record(path: &Path) -> Result<Record> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let record: Record = serde_json::from_str(&text).with_context(|| format!("malformed record {}", path.display()))?;
    if record.schema_version != RECORD_SCHEMA {
        bail!("{}: unsupported record schema {}", path.display(), record.schema_version);
    }
    Ok(record)
}

/// Lowest `C` per namespace, for `C / C_min` ratios.
pub fn namespace_minimum(records: &[Record], ns: &str) -> Option<f64> {
    records
        .iter()
        .filter(|r| r.namespace() == ns)
        .map(|r| r.metadata.complexity)
        .min_by(f64::total_cmp)
}
