use serde::{Deserialize, Serialize};

/// Pair count versus the number of coordinates that fix all separations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountingReport {
    pub n: usize,
    pub dim: usize,
    /// `N(N-1)/2`.
    pub pairs: usize,
    /// `dN - d - d(d-1)/2`: positions modulo translations and rotations.
    pub coordinates: usize,
    /// `pairs - coordinates`, the number of constraints among the separations.
    pub excess: i64,
}

pub fn counting_report(n: usize, dim: usize) -> CountingReport {
    assert!(n >= 2, "need at least two particles");
    assert!(dim == 2 || dim == 3, "dimension must be 2 or 3");
    let pairs = n * (n - 1) / 2;
    let coordinates = dim * n - dim - dim * (dim - 1) / 2;
    CountingReport {
        n,
        dim,
        pairs,
        coordinates,
        excess: pairs as i64 - coordinates as i64,
    }
}
