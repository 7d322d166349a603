//! Incremental (Bowyer-Watson) Delaunay triangulation in 2D and 3D with exact
//! orientation and in-sphere predicates.

use std::collections::HashMap;

use robust::{Coord, Coord3D};

use crate::error::{Result, ShapeError};

#[derive(Debug, Clone)]
pub struct Triangulation {
    pub dim: usize,
    /// Input points, padded to three coordinates.
    points: Vec<[f64; 3]>,
    /// Vertex indices of each simplex (`dim + 1` used).
    pub simplices: Vec<[usize; 4]>,
}

fn c2(p: &[f64; 3]) -> Coord<f64> {
    Coord { x: p[0], y: p[1] }
}

fn c3(p: &[f64; 3]) -> Coord3D<f64> {
    Coord3D {
        x: p[0],
        y: p[1],
        z: p[2],
    }
}

/// Sign of the orientation of `dim + 1` points.
fn orient(dim: usize, p: &[[f64; 3]], v: &[usize]) -> f64 {
    match dim {
        2 => robust::orient2d(c2(&p[v[0]]), c2(&p[v[1]]), c2(&p[v[2]])),
        _ => robust::orient3d(c3(&p[v[0]]), c3(&p[v[1]]), c3(&p[v[2]]), c3(&p[v[3]])),
    }
}

fn orient_with(dim: usize, p: &[[f64; 3]], v: &[usize], q: &[f64; 3]) -> f64 {
    match dim {
        2 => robust::orient2d(c2(&p[v[0]]), c2(&p[v[1]]), c2(q)),
        _ => robust::orient3d(c3(&p[v[0]]), c3(&p[v[1]]), c3(&p[v[2]]), c3(q)),
    }
}

/// Strictly inside the circumsphere of simplex `s`.
fn in_circumsphere(dim: usize, p: &[[f64; 3]], s: &[usize; 4], q: &[f64; 3]) -> bool {
    let o = orient(dim, p, &s[..=dim]);
    let t = match dim {
        2 => robust::incircle(c2(&p[s[0]]), c2(&p[s[1]]), c2(&p[s[2]]), c2(q)),
        _ => robust::insphere(c3(&p[s[0]]), c3(&p[s[1]]), c3(&p[s[2]]), c3(&p[s[3]]), c3(q)),
    };
    t * o.signum() > 0.0
}

/// Check that the points span `dim` dimensions, exactly.
pub fn check_full_dimensional(dim: usize, points: &[Vec<f64>]) -> Result<()> {
    let degenerate = || {
        Err(ShapeError::DegenerateGeometry(format!(
            "points are affinely dependent in {dim}D"
        )))
    };
    if points.len() < dim + 1 {
        return degenerate();
    }
    let pad = |v: &Vec<f64>| [v[0], v[1], if dim == 3 { v[2] } else { 0.0 }];
    let p: Vec<[f64; 3]> = points.iter().map(pad).collect();
    let Some(b) = (1..p.len()).find(|&k| p[k] != p[0]) else {
        return degenerate();
    };
    let Some(c) = (1..p.len()).find(|&k| {
        let cross = |u: [f64; 3], w: [f64; 3]| {
            robust::orient2d(Coord { x: u[0], y: u[1] }, Coord { x: w[0], y: w[1] }, Coord { x: p[k][0], y: p[k][1] }) != 0.0
                || robust::orient2d(Coord { x: u[1], y: u[2] }, Coord { x: w[1], y: w[2] }, Coord { x: p[k][1], y: p[k][2] }) != 0.0
                || robust::orient2d(Coord { x: u[0], y: u[2] }, Coord { x: w[0], y: w[2] }, Coord { x: p[k][0], y: p[k][2] }) != 0.0
        };
        cross(p[0], p[b])
    }) else {
        return degenerate();
    };
    if dim == 3 && !(1..p.len()).any(|k| orient(3, &p, &[0, b, c, k]) != 0.0) {
        return degenerate();
    }
    Ok(())
}

impl Triangulation {
    pub fn new(dim: usize, input: &[Vec<f64>]) -> Result<Self> {
        check_full_dimensional(dim, input)?;
        let n = input.len();
        let mut points: Vec<[f64; 3]> = input
            .iter()
            .map(|v| [v[0], v[1], if dim == 3 { v[2] } else { 0.0 }])
            .collect();
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in &points {
            for k in 0..dim {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let center: Vec<f64> = (0..dim).map(|k| 0.5 * (lo[k] + hi[k])).collect();
        let extent = (0..dim).map(|k| hi[k] - lo[k]).fold(0.0f64, f64::max).max(1e-300);
        let big = 1e5 * extent;
        let super_vertices: Vec<[f64; 3]> = if dim == 2 {
            vec![
                [center[0] - 2.0 * big, center[1] - big, 0.0],
                [center[0] + 2.0 * big, center[1] - big, 0.0],
                [center[0], center[1] + 2.0 * big, 0.0],
            ]
        } else {
            vec![
                [center[0] + big, center[1] + big, center[2] + big],
                [center[0] + big, center[1] - big, center[2] - big],
                [center[0] - big, center[1] + big, center[2] - big],
                [center[0] - big, center[1] - big, center[2] + big],
            ]
        };
        points.extend(super_vertices);
        let mut first = [0usize; 4];
        for (k, f) in first.iter_mut().take(dim + 1).enumerate() {
            *f = n + k;
        }
        let mut simplices = vec![first];
        let mut alive = vec![true];

        for q in 0..n {
            let qp = points[q];
            let bad: Vec<usize> = (0..simplices.len())
                .filter(|&s| alive[s] && in_circumsphere(dim, &points, &simplices[s], &qp))
                .collect();
            let mut facets: HashMap<Vec<usize>, usize> = HashMap::new();
            for &s in &bad {
                alive[s] = false;
                for skip in 0..=dim {
                    let mut f: Vec<usize> = (0..=dim).filter(|&k| k != skip).map(|k| simplices[s][k]).collect();
                    f.sort_unstable();
                    *facets.entry(f).or_insert(0) += 1;
                }
            }
            let mut boundary: Vec<Vec<usize>> = facets.into_iter().filter(|(_, c)| *c == 1).map(|(f, _)| f).collect();
            boundary.sort();
            for f in boundary {
                let mut s = [0usize; 4];
                s[..dim].copy_from_slice(&f);
                s[dim] = q;
                simplices.push(s);
                alive.push(true);
            }
        }
        let simplices = simplices
            .into_iter()
            .zip(alive)
            .filter(|(s, a)| *a && s[..=dim].iter().all(|&v| v < n))
            .map(|(s, _)| s)
            .collect();
        points.truncate(n);
        Ok(Self {
            dim,
            points,
            simplices,
        })
    }

    /// Circumcenter of a simplex.
    pub fn circumcenter(&self, s: &[usize; 4]) -> Vec<f64> {
        let p0 = self.points[s[0]];
        let d = self.dim;
        // Solve 2 (p_k - p0) . c' = |p_k - p0|^2 for c' = c - p0.
        let rows: Vec<[f64; 3]> = (1..=d)
            .map(|k| {
                let p = self.points[s[k]];
                [p[0] - p0[0], p[1] - p0[1], p[2] - p0[2]]
            })
            .collect();
        let rhs: Vec<f64> = rows.iter().map(|r| 0.5 * r[..d].iter().map(|x| x * x).sum::<f64>()).collect();
        let m = nalgebra::DMatrix::from_fn(d, d, |r, c| rows[r][c]);
        let b = nalgebra::DVector::from_vec(rhs);
        let sol = m.lu().solve(&b).unwrap_or_else(|| nalgebra::DVector::from_element(d, f64::NAN));
        (0..d).map(|k| p0[k] + sol[k]).collect()
    }

    /// Whether `q` lies in the closed simplex `s`.
    pub fn simplex_contains(&self, s: &[usize; 4], q: &[f64]) -> bool {
        let d = self.dim;
        let qp = [q[0], q[1], if d == 3 { q[2] } else { 0.0 }];
        for skip in 0..=d {
            let facet: Vec<usize> = (0..=d).filter(|&k| k != skip).map(|k| s[k]).collect();
            let opposite = self.points[s[skip]];
            let a = orient_with(d, &self.points, &facet, &qp);
            let b = orient_with(d, &self.points, &facet, &opposite);
            if a != 0.0 && a.signum() != b.signum() {
                return false;
            }
        }
        true
    }

    /// Whether `q` lies in the union of the simplices (the convex hull).
    pub fn hull_contains(&self, q: &[f64]) -> bool {
        self.simplices.iter().any(|s| self.simplex_contains(s, q))
    }
}
