use serde::{Deserialize, Serialize};

use crate::complexity::rms_length;
use crate::config::{distance, MassConfiguration};
use crate::error::Result;

use super::delaunay::Triangulation;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoidBall {
    /// Center in input coordinates.
    pub center: Vec<f64>,
    /// Radius in input units.
    pub radius: f64,
    /// Radius in units of `l_rms`.
    pub radius_rms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoidReport {
    pub rms_length: f64,
    /// Largest empty balls centered inside the convex hull, radius descending.
    pub voids: Vec<VoidBall>,
}

/// Largest empty circles (spheres) with centers at Voronoi vertices inside the
/// convex hull. Candidates whose center falls inside an already reported ball
/// are suppressed.
pub fn void_census(config: &MassConfiguration, k: usize) -> Result<VoidReport> {
    let points: Vec<Vec<f64>> = config.points().map(|p| p.to_vec()).collect();
    let tri = Triangulation::new(config.dim(), &points)?;
    let mut candidates: Vec<(f64, Vec<f64>)> = tri
        .simplices
        .iter()
        .map(|s| tri.circumcenter(s))
        .filter(|c| c.iter().all(|x| x.is_finite()) && tri.hull_contains(c))
        .map(|c| {
            let r = points.iter().map(|p| distance(p, &c)).fold(f64::INFINITY, f64::min);
            (r, c)
        })
        .collect();
    candidates.sort_by(|a, b| {
        b.0.total_cmp(&a.0).then_with(|| {
            a.1.iter()
                .zip(&b.1)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    let scale = rms_length(config);
    let mut voids: Vec<VoidBall> = Vec::new();
    for (radius, center) in candidates {
        if voids.len() == k {
            break;
        }
        let covered = voids.iter().any(|v| distance(&v.center, &center) < v.radius * (1.0 - 1e-12));
        if !covered {
            voids.push(VoidBall {
                center,
                radius,
                radius_rms: radius / scale,
            });
        }
    }
    Ok(VoidReport {
        rms_length: scale,
        voids,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::ShapeError;

    #[test]
    fn collinear_points_rejected() {
        let c = MassConfiguration::equal_masses(2, vec![0.0, 0.0, 1.0, 0.0, 2.0, 0.0]).unwrap();
        assert!(matches!(void_census(&c, 3), Err(ShapeError::DegenerateGeometry(_))));
    }

    #[test]
    fn grid_void_is_half_diagonal() {
        let h = 0.3;
        let pos: Vec<f64> = (0..5).flat_map(|i| (0..5).flat_map(move |j| [i as f64 * h, j as f64 * h])).collect();
        let c = MassConfiguration::equal_masses(2, pos).unwrap();
        let report = void_census(&c, 4).unwrap();
        assert_eq!(report.voids.len(), 4);
        for v in &report.voids {
            assert!((v.radius - h / 2f64.sqrt()).abs() < 1e-12);
        }
    }
}
