//! Point-membership classification of sketch-extrude solids.

use nalgebra::Vector3;

use super::frame::Frame;
use super::tessellate::{tessellate_profile, PlanarRegion, DEFAULT_SEGMENTS_PER_TURN};
use super::GeometryError;
use crate::sequence::{validate_model, BoolOp, CadModel, Step};

/// One extrusion prism, ready for containment queries.
#[derive(Debug, Clone)]
pub struct StepSolid {
    pub frame: Frame,
    pub scale: f64,
    pub e1: f64,
    pub e2: f64,
    pub op: BoolOp,
    pub region: PlanarRegion,
    bounds: ([f64; 2], [f64; 2]),
}

impl StepSolid {
    pub fn from_step(step: &Step) -> Result<Self, GeometryError> {
        let e = &step.extrude;
        let frame = Frame::new(e.theta, e.phi, e.gamma, e.origin)
            .map_err(|err| GeometryError::InvalidModel(err.to_string()))?;
        let region = tessellate_profile(&step.profile, DEFAULT_SEGMENTS_PER_TURN)
            .map_err(|err| GeometryError::InvalidModel(err.to_string()))?;
        let bounds = region.bounds();
        Ok(Self {
            frame,
            scale: e.scale,
            e1: e.e1,
            e2: e.e2,
            op: e.bool_op,
            region,
            bounds,
        })
    }

    pub fn contains(&self, q: Vector3<f64>) -> bool {
        let local = self.frame.to_local(q);
        if local.z < -self.e2 || local.z > self.e1 {
            return false;
        }
        let p = [local.x / self.scale, local.y / self.scale];
        let (lo, hi) = self.bounds;
        if p[0] < lo[0] || p[0] > hi[0] || p[1] < lo[1] || p[1] > hi[1] {
            return false;
        }
        self.region.contains(p)
    }

    /// Maps a profile-plane point at height `z` to world coordinates.
    pub fn to_world(&self, p: [f64; 2], z: f64) -> Vector3<f64> {
        self.frame
            .to_world(Vector3::new(self.scale * p[0], self.scale * p[1], z))
    }
}

/// A whole model prepared for membership queries.
#[derive(Debug, Clone)]
pub struct Solid {
    pub steps: Vec<StepSolid>,
}

impl Solid {
    pub fn from_model(m: &CadModel) -> Result<Self, GeometryError> {
        let report = validate_model(m);
        if let Some(v) = report.violations.first() {
            return Err(GeometryError::InvalidModel(v.to_string()));
        }
        let steps = m
            .steps
            .iter()
            .map(StepSolid::from_step)
            .collect::<Result<_, _>>()?;
        Ok(Self { steps })
    }

    /// Left-to-right boolean fold. `NewBody` finalizes the body built so far and starts
    /// a new one; the result is the union of all bodies.
    pub fn contains(&self, q: Vector3<f64>) -> bool {
        let mut finished = false;
        let mut current = false;
        for step in &self.steps {
            match step.op {
                BoolOp::NewBody => {
                    finished |= current;
                    current = step.contains(q);
                }
                BoolOp::Join => current = current || step.contains(q),
                BoolOp::Cut => current = current && !step.contains(q),
                BoolOp::Intersect => current = current && step.contains(q),
            }
        }
        finished || current
    }
}

/// Membership of a single point. Prefer [`Solid`] for repeated queries.
pub fn solid_contains(m: &CadModel, q: [f64; 3]) -> Result<bool, GeometryError> {
    Ok(Solid::from_model(m)?.contains(Vector3::from(q)))
}
