use rayon::prelude::*;

use super::kdtree::{squared_distance, KdTree};

/// Chamfer values are reported multiplied by this factor.
pub const CD_SCALE: f64 = 1000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("point cloud is empty")]
pub struct EmptyCloud;

fn mean_nearest(from: &[[f64; 3]], to: &KdTree) -> f64 {
    // Fixed-size chunks keep the summation order independent of the thread count.
    let partial: Vec<f64> = from
        .par_chunks(256)
        .map(|c| c.iter().map(|p| to.nearest_squared(p)).sum::<f64>())
        .collect();
    partial.iter().sum::<f64>() / from.len() as f64
}

/// Symmetric mean squared nearest-neighbor distance, times [`CD_SCALE`].
pub fn chamfer(p: &[[f64; 3]], q: &[[f64; 3]]) -> Result<f64, EmptyCloud> {
    if p.is_empty() || q.is_empty() {
        return Err(EmptyCloud);
    }
    let (tp, tq) = rayon::join(|| KdTree::new(p), || KdTree::new(q));
    let (a, b) = rayon::join(|| mean_nearest(p, &tq), || mean_nearest(q, &tp));
    Ok((a + b) * CD_SCALE)
}

/// Quadratic reference implementation with the same summation order as [`chamfer`].
pub fn chamfer_brute_force(p: &[[f64; 3]], q: &[[f64; 3]]) -> Result<f64, EmptyCloud> {
    if p.is_empty() || q.is_empty() {
        return Err(EmptyCloud);
    }
    let one_way = |from: &[[f64; 3]], to: &[[f64; 3]]| {
        let partial: Vec<f64> = from
            .chunks(256)
            .map(|c| {
                c.iter()
                    .map(|a| {
                        to.iter()
                            .map(|b| squared_distance(a, b))
                            .fold(f64::INFINITY, f64::min)
                    })
                    .sum::<f64>()
            })
            .collect();
        partial.iter().sum::<f64>() / from.len() as f64
    };
    Ok((one_way(p, q) + one_way(q, p)) * CD_SCALE)
}
