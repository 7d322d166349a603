use serde::{Deserialize, Serialize};

use crate::complexity::{complexity, rms_length};
use crate::config::MassConfiguration;
use crate::error::Result;
use crate::hashing::short_hash;

/// Spectrum tolerance per separation (scaled by `sqrt(N(N-1)/2)`).
pub const SPECTRUM_TOLERANCE: f64 = 1e-6;
/// Absolute tolerance on `C`.
pub const COMPLEXITY_TOLERANCE: f64 = 1e-9;

/// Similarity-invariant identity of a shape: the sorted separation spectrum in
/// units of `l_rms`, plus `C`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeFingerprint {
    pub spectrum: Vec<f64>,
    pub complexity: f64,
}

impl ShapeFingerprint {
    pub fn matches(&self, other: &Self) -> bool {
        if self.spectrum.len() != other.spectrum.len() {
            return false;
        }
        let dist2: f64 = self
            .spectrum
            .iter()
            .zip(&other.spectrum)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        let pairs = self.spectrum.len() as f64;
        dist2.sqrt() <= SPECTRUM_TOLERANCE * pairs.sqrt()
            && (self.complexity - other.complexity).abs() <= COMPLEXITY_TOLERANCE
    }

    /// Stable short identifier: hash of the spectrum rounded to 6 decimals.
    ///
    /// Two matching fingerprints usually, but not always, share a hash; equality
    /// decisions always go through [`ShapeFingerprint::matches`].
    pub fn hash(&self) -> String {
        let text = self
            .spectrum
            .iter()
            .map(|s| format!("{s:.6}"))
            .collect::<Vec<_>>()
            .join(",");
        short_hash(text.as_bytes())
    }

    /// Lexicographic order on spectra, for deterministic sorting.
    pub fn cmp_spectrum(&self, other: &Self) -> std::cmp::Ordering {
        for (a, b) in self.spectrum.iter().zip(&other.spectrum) {
            match a.total_cmp(b) {
                std::cmp::Ordering::Equal => continue,
                ord => return ord,
            }
        }
        self.spectrum.len().cmp(&other.spectrum.len())
    }
}

pub fn fingerprint(config: &MassConfiguration) -> Result<ShapeFingerprint> {
    let c = complexity(config)?.complexity;
    let rms = rms_length(config);
    let mut spectrum: Vec<f64> = config.separations().into_iter().map(|r| r / rms).collect();
    spectrum.sort_by(f64::total_cmp);
    Ok(ShapeFingerprint {
        spectrum,
        complexity: c,
    })
}

/// Disjoint-set forest used to close fingerprint matching under transitivity.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merge, keeping the smaller index as root.
    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Group fingerprints into match classes; returns the class root of each input.
pub fn match_classes(prints: &[ShapeFingerprint]) -> Vec<usize> {
    let mut uf = UnionFind::new(prints.len());
    for i in 0..prints.len() {
        for j in i + 1..prints.len() {
            if prints[i].matches(&prints[j]) {
                uf.union(i, j);
            }
        }
    }
    (0..prints.len()).map(|i| uf.find(i)).collect()
}
