use nalgebra::Vector3;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::mesh::{build_mesh, Mesh};
use super::GeometryError;
use crate::sequence::CadModel;

pub const DEFAULT_SAMPLE_COUNT: usize = 2000;

/// Surface samples together with the seed that produced them.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointCloud {
    pub points: Vec<[f64; 3]>,
    pub seed: u64,
}

impl PointCloud {
    pub fn new(points: Vec<[f64; 3]>, seed: u64) -> Self {
        Self { points, seed }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Area-uniform samples on a mesh, deterministic for a given seed.
pub fn sample_mesh(mesh: &Mesh, n: usize, seed: u64) -> Result<PointCloud, GeometryError> {
    let mut cumulative = Vec::with_capacity(mesh.triangles.len());
    let mut total = 0.0;
    for i in 0..mesh.triangles.len() {
        total += mesh.triangle_area(i);
        cumulative.push(total);
    }
    if total <= 0.0 {
        return Err(GeometryError::EmptySolid);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..n)
        .map(|_| {
            let r = rng.random::<f64>() * total;
            let i = cumulative
                .partition_point(|&c| c <= r)
                .min(cumulative.len() - 1);
            let [a, b, c] = mesh.triangle(i);
            let (mut u, mut v) = (rng.random::<f64>(), rng.random::<f64>());
            if u + v > 1.0 {
                u = 1.0 - u;
                v = 1.0 - v;
            }
            let p: Vector3<f64> = a + (b - a) * u + (c - a) * v;
            [p.x, p.y, p.z]
        })
        .collect();
    Ok(PointCloud::new(points, seed))
}

/// Samples `n` points on the model's reconstructed surface.
pub fn sample_surface(m: &CadModel, n: usize, seed: u64) -> Result<PointCloud, GeometryError> {
    sample_mesh(&build_mesh(m)?, n, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::unit_cube;

    #[test]
    fn cube_samples_lie_on_boundary() {
        let cloud = sample_surface(&unit_cube(), 2000, 7).unwrap();
        assert_eq!(cloud.len(), 2000);
        assert_eq!(cloud.seed, 7);
        for p in &cloud.points {
            let to_face = p
                .iter()
                .map(|&c| c.abs().min((c - 1.0).abs()))
                .fold(f64::INFINITY, f64::min);
            assert!(to_face <= 1e-9);
            assert!(p.iter().all(|&c| (-1e-9..=1.0 + 1e-9).contains(&c)));
        }
    }

    #[test]
    fn same_seed_same_cloud() {
        let a = sample_surface(&unit_cube(), 500, 11).unwrap();
        let b = sample_surface(&unit_cube(), 500, 11).unwrap();
        let c = sample_surface(&unit_cube(), 500, 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.points, c.points);
    }

    #[test]
    fn faces_receive_balanced_counts() {
        let n = 2000;
        let cloud = sample_surface(&unit_cube(), n, 3).unwrap();
        let mut counts = [0usize; 6];
        for p in &cloud.points {
            let (axis, side) = (0..3)
                .flat_map(|k| [(k, 0), (k, 1)])
                .min_by(|&(k1, s1), &(k2, s2)| {
                    let d = |k: usize, s: usize| (p[k] - s as f64).abs();
                    d(k1, s1).total_cmp(&d(k2, s2))
                })
                .unwrap();
            counts[axis * 2 + side] += 1;
        }
        // Binomial(n, 1/6): mean n/6, sigma sqrt(n p (1-p)).
        let mean = n as f64 / 6.0;
        let sigma = (n as f64 * (1.0 / 6.0) * (5.0 / 6.0)).sqrt();
        for c in counts {
            assert!((c as f64 - mean).abs() <= 5.0 * sigma, "{counts:?}");
        }
    }
}
