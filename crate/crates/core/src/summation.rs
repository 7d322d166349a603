/// Compensated (Kahan-Babuska) accumulator.
///
/// All pairwise sums in this crate run in a fixed `i < j` order through this
/// type, so results are bit-reproducible independent of scheduling.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub const fn new() -> Self {
        Self {
            sum: 0.0,
            compensation: 0.0,
        }
    }

    /// Branch-free TwoSum update.
    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        let v = t - self.sum;
        self.compensation += (self.sum - (t - v)) + (value - v);
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Compensated sum of a slice, in order.
pub fn compensated_sum(values: &[f64]) -> f64 {
    values.iter().copied().collect::<CompensatedSum>().value()
}

/// Compensated dot product of two equal-length slices.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| x * y)
        .collect::<CompensatedSum>()
        .value()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
