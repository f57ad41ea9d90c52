//! Fixture models and a seeded generator of random valid models, used by tests,
//! benchmarks and smoke runs.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::build_mesh;
use crate::sequence::{
    validate_model, BoolOp, CadModel, CurveCommand, ExtentType, ExtrudeCommand, Loop, Point2,
    SketchProfile, Step,
};

pub fn rectangle(x0: f64, y0: f64, w: f64, h: f64) -> Loop {
    Loop::polygon(&[
        Point2::new(x0, y0),
        Point2::new(x0 + w, y0),
        Point2::new(x0 + w, y0 + h),
        Point2::new(x0, y0 + h),
    ])
}

/// Axis-aligned box with minimum corner `min`, sketched on the XY plane.
pub fn box_step(min: [f64; 3], size: [f64; 3], op: BoolOp) -> Step {
    Step {
        profile: SketchProfile::new(vec![rectangle(0.0, 0.0, size[0], size[1])]),
        extrude: ExtrudeCommand {
            origin: min,
            e1: size[2],
            bool_op: op,
            ..ExtrudeCommand::default()
        },
    }
}

/// Z-aligned cylinder between heights `z0` and `z1`.
pub fn cylinder_step(center: [f64; 2], radius: f64, z0: f64, z1: f64, op: BoolOp) -> Step {
    Step {
        profile: SketchProfile::new(vec![Loop::circle(center.into(), radius)]),
        extrude: ExtrudeCommand {
            origin: [0.0, 0.0, z0],
            e1: z1 - z0,
            bool_op: op,
            ..ExtrudeCommand::default()
        },
    }
}

/// The unit cube `[0,1]³` as a single square extrusion.
pub fn unit_cube() -> CadModel {
    CadModel::new(vec![box_step([0.0; 3], [1.0; 3], BoolOp::NewBody)])
}

/// Stadium shape: two straight sides joined by half-circle arcs.
pub fn slot(cx: f64, cy: f64, half_len: f64, radius: f64) -> Loop {
    let (l, r) = (cx - half_len, cx + half_len);
    Loop::new(vec![
        CurveCommand::Line {
            start: Point2::new(l, cy - radius),
            end: Point2::new(r, cy - radius),
        },
        CurveCommand::Arc {
            start: Point2::new(r, cy - radius),
            mid: Point2::new(r + radius, cy),
            end: Point2::new(r, cy + radius),
        },
        CurveCommand::Line {
            start: Point2::new(r, cy + radius),
            end: Point2::new(l, cy + radius),
        },
        CurveCommand::Arc {
            start: Point2::new(l, cy + radius),
            mid: Point2::new(l - radius, cy),
            end: Point2::new(l, cy - radius),
        },
    ])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    pub max_steps: usize,
    /// Probability that a plane orientation is drawn uniformly rather than axis-aligned.
    pub free_orientation: f64,
    pub allow_intersect: bool,
    pub allow_holes: bool,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            max_steps: 3,
            free_orientation: 0.5,
            allow_intersect: true,
            allow_holes: true,
        }
    }
}

fn random_profile<R: Rng>(rng: &mut R, cfg: &SynthConfig) -> SketchProfile {
    let mut loops = Vec::new();
    let shape = rng.random_range(0..4);
    // Hole candidate that fits inside the chosen outer loop.
    let mut hole: Option<(Point2, f64)> = None;
    match shape {
        0 => {
            let w = rng.random_range(0.4..1.0);
            let h = rng.random_range(0.4..1.0);
            let x0 = rng.random_range(-w..0.0);
            let y0 = rng.random_range(-h..0.0);
            loops.push(rectangle(x0, y0, w, h));
            hole = Some((Point2::new(x0 + w / 2.0, y0 + h / 2.0), 0.3 * w.min(h)));
        }
        1 => {
            let r = rng.random_range(0.25..0.6);
            let c = Point2::new(rng.random_range(-0.2..0.2), rng.random_range(-0.2..0.2));
            loops.push(Loop::circle(c, r));
            hole = Some((c, 0.4 * r));
        }
        2 => {
            let r = rng.random_range(0.15..0.35);
            let half = rng.random_range(0.1..0.4);
            loops.push(slot(0.0, 0.0, half, r));
            hole = Some((Point2::new(0.0, 0.0), 0.5 * r));
        }
        _ => {
            let a = Point2::new(rng.random_range(-0.6..-0.2), rng.random_range(-0.6..-0.2));
            let b = Point2::new(rng.random_range(0.2..0.6), rng.random_range(-0.6..-0.2));
            let c = Point2::new(rng.random_range(-0.3..0.3), rng.random_range(0.3..0.6));
            loops.push(Loop::polygon(&[a, b, c]));
        }
    }
    if cfg.allow_holes && rng.random_bool(0.3) {
        if let Some((c, r)) = hole {
            loops.push(Loop::circle(c, r));
        }
    }
    SketchProfile::new(loops)
}

const AXIS_ORIENTATIONS: [(f64, f64, f64); 4] = [
    (0.0, 0.0, 0.0),
    (FRAC_PI_2, 0.0, 0.0),
    (FRAC_PI_2, FRAC_PI_2, 0.0),
    (PI, 0.0, 0.0),
];

fn random_step<R: Rng>(rng: &mut R, cfg: &SynthConfig, index: usize) -> Step {
    let (theta, phi, gamma) = if rng.random_bool(cfg.free_orientation) {
        (
            rng.random_range(0.0..PI),
            rng.random_range(-PI..PI),
            rng.random_range(-PI..PI),
        )
    } else {
        AXIS_ORIENTATIONS[rng.random_range(0..AXIS_ORIENTATIONS.len())]
    };
    let bool_op = if index == 0 {
        BoolOp::NewBody
    } else {
        let r: f64 = rng.random();
        match r {
            r if r < 0.5 => BoolOp::Join,
            r if r < 0.8 => BoolOp::Cut,
            r if r < 0.9 || !cfg.allow_intersect => BoolOp::NewBody,
            _ => BoolOp::Intersect,
        }
    };
    let e2 = if rng.random_bool(0.5) {
        0.0
    } else {
        rng.random_range(0.05..0.2)
    };
    Step {
        profile: random_profile(rng, cfg),
        extrude: ExtrudeCommand {
            theta,
            phi,
            gamma,
            origin: std::array::from_fn(|_| rng.random_range(0.25..0.75)),
            scale: rng.random_range(0.15..0.35),
            e1: rng.random_range(0.05..0.3),
            e2,
            bool_op,
            extent_type: if e2 == 0.0 {
                ExtentType::OneSide
            } else {
                ExtentType::TwoSides
            },
        },
    }
}

/// Draws a model that validates and reconstructs to a non-empty solid. Numbers are in
/// canonical precision and every sketch origin lies inside the unit cube.
pub fn random_model<R: Rng>(rng: &mut R, cfg: &SynthConfig) -> CadModel {
    loop {
        let n = rng.random_range(1..=cfg.max_steps.max(1));
        let m = CadModel::new((0..n).map(|i| random_step(rng, cfg, i)).collect()).canonicalized();
        if validate_model(&m).is_valid() && build_mesh(&m).is_ok() {
            return m;
        }
    }
}

/// `count` random models from a fixed seed.
pub fn random_corpus(count: usize, seed: u64, cfg: &SynthConfig) -> Vec<CadModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_model(&mut rng, cfg)).collect()
}
