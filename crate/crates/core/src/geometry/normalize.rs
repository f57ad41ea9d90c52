use nalgebra::Vector3;

use super::csg::StepSolid;
use super::GeometryError;
use crate::sequence::{CadModel, Point2, Step};

const MIN_EXTENT: f64 = 1e-12;
const CUBE_SLACK: f64 = 1e-9;

/// Axis-aligned bounds of every extrusion prism in the model (tool bodies included).
pub fn model_bounds(m: &CadModel) -> Result<([f64; 3], [f64; 3]), GeometryError> {
    let mut lo = Vector3::repeat(f64::INFINITY);
    let mut hi = Vector3::repeat(f64::NEG_INFINITY);
    for step in &m.steps {
        let solid = StepSolid::from_step(step)?;
        for p in solid.region.vertices() {
            for z in [solid.e1, -solid.e2] {
                let w = solid.to_world(p, z);
                lo = lo.inf(&w);
                hi = hi.sup(&w);
            }
        }
    }
    if m.steps.is_empty() {
        return Err(GeometryError::DegenerateBounds);
    }
    Ok((lo.into(), hi.into()))
}

/// Uniformly scales and translates the model into `[0,1]³`: the longest bounding-box
/// axis spans `[0,1]`, the other axes are centered.
pub fn normalize_model(m: &CadModel) -> Result<CadModel, GeometryError> {
    let (lo, hi) = model_bounds(m)?;
    let ext = [hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]];
    let longest = ext.iter().copied().fold(0.0, f64::max);
    if !longest.is_finite() || longest <= MIN_EXTENT {
        return Err(GeometryError::DegenerateBounds);
    }
    let k = 1.0 / longest;
    let offset: [f64; 3] = std::array::from_fn(|i| (1.0 - ext[i] * k) / 2.0);
    let steps = m
        .steps
        .iter()
        .map(|s| {
            let mut e = s.extrude;
            e.origin = std::array::from_fn(|i| (e.origin[i] - lo[i]) * k + offset[i]);
            e.scale *= k;
            e.e1 *= k;
            e.e2 *= k;
            Step {
                profile: s.profile.clone(),
                extrude: e,
            }
        })
        .collect();
    Ok(CadModel::new(steps))
}

fn in_unit_cube(p: [f64; 3]) -> bool {
    p.iter()
        .all(|c| (-CUBE_SLACK..=1.0 + CUBE_SLACK).contains(c))
}

/// Moves each sketch origin lying outside `[0,1]³` onto the first point of its outer
/// loop, shifting the profile to compensate. The described geometry is unchanged.
pub fn anchor_sketch_origins(m: &CadModel) -> Result<CadModel, GeometryError> {
    let mut out = m.clone();
    for step in &mut out.steps {
        if in_unit_cube(step.extrude.origin) {
            continue;
        }
        let Some(first) = step.profile.loops.first().and_then(|l| l.curves.first()) else {
            continue;
        };
        let p0 = first.start();
        let solid = StepSolid::from_step(step)?;
        let w = solid.to_world([p0.x, p0.y], 0.0);
        step.extrude.origin = [w.x, w.y, w.z];
        step.profile = step
            .profile
            .map_points(|p| Point2::new(p.x - p0.x, p.y - p0.y));
    }
    Ok(out)
}

/// Normalizes into the unit cube and anchors sketch origins so the model can be
/// tokenized.
pub fn prepare_for_tokenization(m: &CadModel) -> Result<CadModel, GeometryError> {
    anchor_sketch_origins(&normalize_model(m)?)
}
