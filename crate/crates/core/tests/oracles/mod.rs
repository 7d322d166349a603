//! Slow, direct reference computations that the library is checked against.
//!
//! Nothing here reuses library numerics beyond reading positions and masses.
#![allow(dead_code)]

use ccshape_core::{MassConfiguration, ShapeError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    BruteForce,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub quantity: &'static str,
    pub value: f64,
    pub method: Method,
    pub tolerance: f64,
}

impl OracleResult {
    fn new(quantity: &'static str, value: f64, method: Method, tolerance: f64) -> Self {
        assert!(tolerance > 0.0);
        Self { quantity, value, method, tolerance }
    }

    /// Relative agreement with `actual`.
    pub fn agrees(&self, actual: f64) -> bool {
        (actual - self.value).abs() <= self.tolerance * self.value.abs()
    }
}

pub fn analytic_c_two_body(m1: f64, m2: f64) -> OracleResult {
    assert!(m1 > 0.0 && m2 > 0.0 && (m1 + m2 - 1.0).abs() < 1e-12);
    OracleResult::new("C two body", (m1 * m2).powf(1.5), Method::ClosedForm, 1e-12)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThreeBodyShape {
    Equilateral,
    CollinearEquispaced,
}

pub fn analytic_c_three_equal(shape: ThreeBodyShape) -> OracleResult {
    let value = match shape {
        ThreeBodyShape::Equilateral => 3f64.powf(-1.5),
        ThreeBodyShape::CollinearEquispaced => 5.0 / 18.0 * (2.0f64 / 3.0).sqrt(),
    };
    OracleResult::new("C three equal", value, Method::ClosedForm, 1e-12)
}

/// Unit square, four equal masses.
pub fn analytic_c_square() -> OracleResult {
    OracleResult::new("C square", (1.0 + 2f64.sqrt() * 2.0) / 16.0, Method::ClosedForm, 1e-12)
}

/// Unit-side equilateral triangle with arbitrary masses: both sums equal
/// `s = m1 m2 + m1 m3 + m2 m3`, so `C = s^{3/2}`.
pub fn analytic_c_equilateral(m: [f64; 3]) -> OracleResult {
    let total: f64 = m.iter().sum();
    let m = m.map(|x| x / total);
    let s = m[0] * m[1] + m[0] * m[2] + m[1] * m[2];
    OracleResult::new("C equilateral", s.powf(1.5), Method::ClosedForm, 1e-12)
}

/// Plain double loop over pairs.
pub fn naive_complexity(config: &MassConfiguration) -> f64 {
    let m = config.masses();
    let n = config.len();
    let (mut i2, mut v) = (0.0, 0.0);
    for i in 0..n {
        for j in i + 1..n {
            let r2: f64 = config
                .position(i)
                .iter()
                .zip(config.position(j))
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            i2 += m[i] * m[j] * r2;
            v += m[i] * m[j] / r2.sqrt();
        }
    }
    i2.sqrt() * v
}

/// Central differences of `naive_complexity` per coordinate.
pub fn fd_gradient(config: &MassConfiguration, step: f64) -> Result<Vec<f64>, ShapeError> {
    assert!(step > 0.0);
    ccshape_core::complexity(config)?;
    let x = config.positions();
    let mut g = vec![0.0; x.len()];
    for k in 0..x.len() {
        let mut plus = x.to_vec();
        let mut minus = x.to_vec();
        plus[k] += step;
        minus[k] -= step;
        let cp = naive_complexity(&config.with_positions(plus)?);
        let cm = naive_complexity(&config.with_positions(minus)?);
        g[k] = (cp - cm) / (2.0 * step);
    }
    Ok(g)
}

/// Dense Hessian of `naive_complexity` by second central differences.
pub fn fd_hessian(config: &MassConfiguration, step: f64) -> Vec<Vec<f64>> {
    let x = config.positions();
    let n = x.len();
    let eval = |dx: &[(usize, f64)]| {
        let mut y = x.to_vec();
        for &(k, h) in dx {
            y[k] += h;
        }
        naive_complexity(&config.with_positions(y).unwrap())
    };
    let mut h = vec![vec![0.0; n]; n];
    for a in 0..n {
        for b in a..n {
            let v = (eval(&[(a, step), (b, step)]) - eval(&[(a, step), (b, -step)]) - eval(&[(a, -step), (b, step)])
                + eval(&[(a, -step), (b, -step)]))
                / (4.0 * step * step);
            h[a][b] = v;
            h[b][a] = v;
        }
    }
    h
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Negative and near-zero eigenvalue counts of the finite-difference Hessian.
/// Gauge directions are zero modes of `C` itself, so no projection is needed.
pub fn fd_index_and_zero_modes(config: &MassConfiguration, relative_zero: f64) -> (usize, usize) {
    let ev = jacobi_eigenvalues(fd_hessian(config, 1e-4));
    let scale = ev.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let negative = ev.iter().filter(|v| **v < -relative_zero * scale).count();
    let zero = ev.iter().filter(|v| v.abs() <= relative_zero * scale).count();
    (negative, zero)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TooLarge(pub usize);

/// Globally minimal spanning tree by enumerating every labelled tree through
/// its Pruefer sequence. Returns the weight and the edges of the first
/// minimal tree found.
pub fn brute_force_mst(points: &[Vec<f64>]) -> Result<(f64, Vec<(usize, usize)>), TooLarge> {
    let n = points.len();
    if n > 8 {
        return Err(TooLarge(n));
    }
    let dist = |i: usize, j: usize| -> f64 {
        points[i].iter().zip(&points[j]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    };
    if n < 2 {
        return Ok((0.0, Vec::new()));
    }
    if n == 2 {
        return Ok((dist(0, 1), vec![(0, 1)]));
    }
    let mut best = (f64::INFINITY, Vec::new());
    let mut seq = vec![0usize; n - 2];
    loop {
        let edges = pruefer_decode(&seq, n);
        let w: f64 = edges.iter().map(|&(i, j)| dist(i, j)).sum();
        if w < best.0 {
            best = (w, edges);
        }
        let mut k = 0;
        while k < seq.len() {
            seq[k] += 1;
            if seq[k] < n {
                break;
            }
            seq[k] = 0;
            k += 1;
        }
        if k == seq.len() {
            break;
        }
    }
    Ok(best)
}

fn pruefer_decode(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &s in seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
        edges.push((leaf.min(s), leaf.max(s)));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// Residual of the defining equation of a central configuration,
/// `sum_j m_j (r_i - r_j) / r_ij^3 = lambda (r_i - r_cm)`, with `lambda`
/// fitted by least squares. Scaled by the mean acceleration magnitude.
pub fn central_configuration_defect(config: &MassConfiguration) -> f64 {
    let n = config.len();
    let d = config.dim();
    let m = config.masses();
    let mut cm = vec![0.0; d];
    for i in 0..n {
        for k in 0..d {
            cm[k] += m[i] * config.position(i)[k];
        }
    }
    let mut acc = vec![vec![0.0; d]; n];
    let mut q = vec![vec![0.0; d]; n];
    for i in 0..n {
        for k in 0..d {
            q[i][k] = config.position(i)[k] - cm[k];
        }
        for j in 0..n {
            if i == j {
                continue;
            }
            let diff: Vec<f64> = (0..d).map(|k| config.position(j)[k] - config.position(i)[k]).collect();
            let r = diff.iter().map(|v| v * v).sum::<f64>().sqrt();
            for k in 0..d {
                acc[i][k] += m[j] * diff[k] / (r * r * r);
            }
        }
    }
    let num: f64 = (0..n).map(|i| (0..d).map(|k| acc[i][k] * q[i][k]).sum::<f64>()).sum();
    let den: f64 = (0..n).map(|i| (0..d).map(|k| q[i][k] * q[i][k]).sum::<f64>()).sum();
    let lambda = num / den;
    let mut defect = 0.0;
    let mut scale = 0.0;
    for i in 0..n {
        for k in 0..d {
            defect += (acc[i][k] - lambda * q[i][k]).powi(2);
            scale += acc[i][k].powi(2);
        }
    }
    (defect / scale).sqrt()
}

/// Fixed configurations with known closed-form complexity.
pub mod shapes {
    use ccshape_core::MassConfiguration;

    pub fn two_body(m1: f64, m2: f64, separation: f64) -> MassConfiguration {
        MassConfiguration::new(2, vec![m1, m2], vec![0.0, 0.0, separation, 0.0]).unwrap()
    }

    pub fn equilateral(side: f64) -> MassConfiguration {
        let h = side * 3f64.sqrt() / 2.0;
        MassConfiguration::equal_masses(2, vec![0.0, 0.0, side, 0.0, 0.5 * side, h]).unwrap()
    }

    pub fn collinear(spacing: f64) -> MassConfiguration {
        MassConfiguration::equal_masses(2, vec![0.0, 0.0, spacing, 0.0, 2.0 * spacing, 0.0]).unwrap()
    }

    pub fn square(side: f64) -> MassConfiguration {
        MassConfiguration::equal_masses(2, vec![0.0, 0.0, side, 0.0, side, side, 0.0, side]).unwrap()
    }

    /// Equilateral triangle with a fourth particle at its centroid.
    pub fn centered_triangle(side: f64) -> MassConfiguration {
        let h = side * 3f64.sqrt() / 2.0;
        MassConfiguration::equal_masses(2, vec![0.0, 0.0, side, 0.0, 0.5 * side, h, 0.5 * side, h / 3.0]).unwrap()
    }
}

/// Small deterministic generator (SplitMix64) so oracles need no RNG crate.
pub struct SplitMix(pub u64);

impl SplitMix {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn normal(&mut self) -> f64 {
        let u = self.uniform().max(f64::MIN_POSITIVE);
        let v = self.uniform();
        (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
    }

    /// Uniform point in the unit disk or ball.
    pub fn in_ball(&mut self, d: usize) -> Vec<f64> {
        loop {
            let p: Vec<f64> = (0..d).map(|_| 2.0 * self.uniform() - 1.0).collect();
            if p.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
                return p;
            }
        }
    }

    /// Random equal-mass configuration in the unit ball.
    pub fn configuration(&mut self, n: usize, d: usize) -> MassConfiguration {
        loop {
            let positions: Vec<f64> = (0..n).flat_map(|_| self.in_ball(d)).collect();
            if let Ok(c) = MassConfiguration::equal_masses(d, positions) {
                if c.min_separation() > 1e-3 {
                    return c;
                }
            }
        }
    }

    /// Random rotation via Gram-Schmidt on Gaussian columns, row-major.
    pub fn rotation(&mut self, d: usize) -> Vec<f64> {
        let mut cols: Vec<Vec<f64>> = Vec::new();
        while cols.len() < d {
            let mut v: Vec<f64> = (0..d).map(|_| self.normal()).collect();
            for c in &cols {
                let p: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(c).for_each(|(a, b)| *a -= p * b);
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-6 {
                cols.push(v.into_iter().map(|x| x / norm).collect());
            }
        }
        (0..d).flat_map(|r| cols.iter().map(move |c| c[r]).collect::<Vec<_>>()).collect()
    }
}
