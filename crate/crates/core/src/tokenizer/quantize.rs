//! Scalar quantizers for the three spatial token families.
//!
//! All quantizers use `floor` binning with the top edge clamped into the last bin,
//! and dequantize to bin centers, so the round-trip error is at most half a bin.

use std::f64::consts::{PI, TAU};

use crate::sequence::{Point2, SketchProfile};

pub const ORIENTATION_BINS: usize = 9;
pub const ORIENTATION_COUNT: usize = ORIENTATION_BINS * ORIENTATION_BINS * ORIENTATION_BINS;
/// Grid resolution per axis for sketch-plane origins.
pub const POSITION_GRID: usize = 36;
pub const POSITION_COUNT: usize = POSITION_GRID * POSITION_GRID * POSITION_GRID;
pub const SKETCH_LEVELS: usize = 128;
/// How far outside the unit interval an input may stray before it is an error.
pub const RANGE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum QuantizeError {
    #[error("non-finite value")]
    NonFinite,
    #[error("coordinate {value} on axis {axis} lies outside the unit cube")]
    OutOfCube { axis: usize, value: f64 },
    #[error("{family} index {index} out of range")]
    IndexOutOfRange { family: &'static str, index: usize },
}

/// Composite orientation bin `n = iθ·81 + iφ·9 + iγ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrientationIndex(u16);

impl OrientationIndex {
    pub fn new(n: usize) -> Result<Self, QuantizeError> {
        if n < ORIENTATION_COUNT {
            Ok(Self(n as u16))
        } else {
            Err(QuantizeError::IndexOutOfRange {
                family: "orientation",
                index: n,
            })
        }
    }

    pub fn get(self) -> usize {
        self.0 as usize
    }

    /// Per-angle bins `(iθ, iφ, iγ)`.
    pub fn bins(self) -> [usize; 3] {
        let n = self.get();
        [n / 81, (n / 9) % 9, n % 9]
    }
}

/// Composite grid cell `k = iz·1296 + iy·36 + ix`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PositionIndex(u32);

impl PositionIndex {
    pub fn new(k: usize) -> Result<Self, QuantizeError> {
        if k < POSITION_COUNT {
            Ok(Self(k as u32))
        } else {
            Err(QuantizeError::IndexOutOfRange {
                family: "position",
                index: k,
            })
        }
    }

    pub fn get(self) -> usize {
        self.0 as usize
    }

    /// Per-axis cells `[ix, iy, iz]`.
    pub fn cells(self) -> [usize; 3] {
        let k = self.get();
        let g = POSITION_GRID;
        [k % g, (k / g) % g, k / (g * g)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SketchAxis {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SketchLevel {
    pub axis: SketchAxis,
    level: u8,
}

impl SketchLevel {
    pub fn new(axis: SketchAxis, level: usize) -> Result<Self, QuantizeError> {
        if level < SKETCH_LEVELS {
            Ok(Self {
                axis,
                level: level as u8,
            })
        } else {
            Err(QuantizeError::IndexOutOfRange {
                family: "sketch",
                index: level,
            })
        }
    }

    pub fn level(self) -> usize {
        self.level as usize
    }
}

/// `clamp(floor(t·bins), 0, bins-1)` for `t` already scaled to the unit interval.
pub fn bin_of(t: f64, bins: usize) -> usize {
    let i = (t * bins as f64).floor();
    if i <= 0.0 {
        0
    } else {
        (i as usize).min(bins - 1)
    }
}

pub fn bin_center(i: usize, bins: usize) -> f64 {
    (i as f64 + 0.5) / bins as f64
}

fn finite(vals: &[f64]) -> Result<(), QuantizeError> {
    if vals.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(QuantizeError::NonFinite)
    }
}

pub fn theta_bin(theta: f64) -> usize {
    bin_of(theta.clamp(0.0, PI) / PI, ORIENTATION_BINS)
}

/// Bin of an angle in `[-π, π]` (used for both φ and γ).
pub fn signed_angle_bin(a: f64) -> usize {
    bin_of((a.clamp(-PI, PI) + PI) / TAU, ORIENTATION_BINS)
}

/// θ ∈ [0, π], φ and γ ∈ [-π, π]; out-of-range angles are clamped.
pub fn quantize_orientation(
    theta: f64,
    phi: f64,
    gamma: f64,
) -> Result<OrientationIndex, QuantizeError> {
    finite(&[theta, phi, gamma])?;
    let n = theta_bin(theta) * 81 + signed_angle_bin(phi) * 9 + signed_angle_bin(gamma);
    OrientationIndex::new(n)
}

pub fn dequantize_orientation(n: OrientationIndex) -> (f64, f64, f64) {
    let [t, p, g] = n.bins();
    let b = ORIENTATION_BINS;
    (
        bin_center(t, b) * PI,
        -PI + bin_center(p, b) * TAU,
        -PI + bin_center(g, b) * TAU,
    )
}

/// Grid cell of a point in the unit cube, z most significant.
pub fn quantize_position(p: [f64; 3]) -> Result<PositionIndex, QuantizeError> {
    finite(&p)?;
    let mut cells = [0usize; 3];
    for (axis, &v) in p.iter().enumerate() {
        if !(-RANGE_SLACK..=1.0 + RANGE_SLACK).contains(&v) {
            return Err(QuantizeError::OutOfCube { axis, value: v });
        }
        cells[axis] = bin_of(v.clamp(0.0, 1.0), POSITION_GRID);
    }
    let g = POSITION_GRID;
    PositionIndex::new(cells[2] * g * g + cells[1] * g + cells[0])
}

pub fn dequantize_position(k: PositionIndex) -> [f64; 3] {
    k.cells().map(|i| bin_center(i, POSITION_GRID))
}

/// Level of a normalized sketch coordinate; values outside `[0,1]` are clamped.
pub fn quantize_sketch(v: f64, axis: SketchAxis) -> Result<SketchLevel, QuantizeError> {
    finite(&[v])?;
    SketchLevel::new(axis, bin_of(v.clamp(0.0, 1.0), SKETCH_LEVELS))
}

pub fn dequantize_sketch(level: SketchLevel) -> f64 {
    bin_center(level.level(), SKETCH_LEVELS)
}

/// Per-axis affine map of a profile onto its bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileNormalization {
    pub bbox_min: Point2,
    pub bbox_extent: Point2,
}

impl ProfileNormalization {
    pub fn from_bounds(min: Point2, max: Point2) -> Self {
        Self {
            bbox_min: min,
            bbox_extent: Point2::new(max.x - min.x, max.y - min.y),
        }
    }

    pub fn bbox_max(&self) -> Point2 {
        Point2::new(
            self.bbox_min.x + self.bbox_extent.x,
            self.bbox_min.y + self.bbox_extent.y,
        )
    }

    /// An axis with zero extent cannot be normalized; its coordinates map to 0.
    pub fn degenerate(&self) -> [bool; 2] {
        [self.bbox_extent.x <= 0.0, self.bbox_extent.y <= 0.0]
    }

    pub fn normalize(&self, p: Point2) -> Point2 {
        let f = |v: f64, min: f64, ext: f64| if ext > 0.0 { (v - min) / ext } else { 0.0 };
        Point2::new(
            f(p.x, self.bbox_min.x, self.bbox_extent.x),
            f(p.y, self.bbox_min.y, self.bbox_extent.y),
        )
    }

    pub fn denormalize(&self, p: Point2) -> Point2 {
        Point2::new(
            self.bbox_min.x + self.bbox_extent.x * p.x,
            self.bbox_min.y + self.bbox_extent.y * p.y,
        )
    }
}

/// Bounding box of a profile's parameter points.
pub fn profile_bounds(profile: &SketchProfile) -> Option<(Point2, Point2)> {
    let mut pts = profile.points();
    let first = pts.next()?;
    Some(pts.fold((first, first), |(lo, hi), p| {
        (
            Point2::new(lo.x.min(p.x), lo.y.min(p.y)),
            Point2::new(hi.x.max(p.x), hi.y.max(p.y)),
        )
    }))
}

/// Maps every profile coordinate into `[0,1]²` using the profile's own bounding box.
pub fn normalize_profile(profile: &SketchProfile) -> (SketchProfile, ProfileNormalization) {
    let (lo, hi) = profile_bounds(profile).unwrap_or_default();
    let norm = ProfileNormalization::from_bounds(lo, hi);
    (profile.map_points(|p| norm.normalize(p)), norm)
}
