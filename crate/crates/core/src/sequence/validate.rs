use std::f64::consts::PI;
use std::fmt;

use super::model::{BoolOp, CadModel, CurveCommand, Location, Step};
use crate::geometry::tessellate::{
    tessellate_profile, TessellationError, DEFAULT_SEGMENTS_PER_TURN,
};

/// Consecutive curve endpoints closer than this are considered joined.
pub const LOOP_CLOSURE_TOLERANCE: f64 = 1e-6;
/// Twice the triangle area spanned by an arc's three points must exceed this.
pub const ARC_COLLINEAR_TOLERANCE: f64 = 1e-9;
pub const MIN_PROFILE_AREA: f64 = 1e-12;
const ANGLE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum ViolationKind {
    EmptyModel,
    FirstOpNotNewBody,
    EmptyProfile,
    EmptyLoop,
    OpenLoop,
    /// A circle shares its loop with other curves.
    CircleNotAlone,
    DegenerateArc,
    ZeroRadius,
    ZeroExtrusion,
    NonPositiveScale,
    NonFinite(&'static str),
    ParameterOutOfRange(&'static str),
    ZeroAreaProfile,
    SelfIntersectingLoop,
    HoleOutsideOuter,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ViolationKind::EmptyModel => f.write_str("model has no steps"),
            ViolationKind::FirstOpNotNewBody => f.write_str("first step is not a new body"),
            ViolationKind::EmptyProfile => f.write_str("profile has no loops"),
            ViolationKind::EmptyLoop => f.write_str("loop has no curves"),
            ViolationKind::OpenLoop => f.write_str("loop is not closed"),
            ViolationKind::CircleNotAlone => f.write_str("circle must form a loop on its own"),
            ViolationKind::DegenerateArc => f.write_str("arc points are collinear"),
            ViolationKind::ZeroRadius => f.write_str("circle has zero radius"),
            ViolationKind::ZeroExtrusion => f.write_str("both extrusion distances are zero"),
            ViolationKind::NonPositiveScale => f.write_str("profile scale is not positive"),
            ViolationKind::NonFinite(p) => write!(f, "parameter `{p}` is not finite"),
            ViolationKind::ParameterOutOfRange(p) => write!(f, "parameter `{p}` is out of range"),
            ViolationKind::ZeroAreaProfile => f.write_str("profile encloses zero area"),
            ViolationKind::SelfIntersectingLoop => f.write_str("loop intersects itself"),
            ViolationKind::HoleOutsideOuter => {
                f.write_str("hole loop is not inside the outer loop")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub location: Location,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.kind)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, location: Location, kind: ViolationKind) {
        self.violations.push(Violation { location, kind });
    }
}

fn cross(a: super::Point2, b: super::Point2, c: super::Point2) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

/// Checks every model invariant. Never fails: violations are returned as data.
pub fn validate_model(m: &CadModel) -> ValidationReport {
    let mut report = ValidationReport::default();
    if m.steps.is_empty() {
        report.push(Location::model(), ViolationKind::EmptyModel);
        return report;
    }
    if m.steps[0].extrude.bool_op != BoolOp::NewBody {
        report.push(Location::step(0), ViolationKind::FirstOpNotNewBody);
    }
    for (si, step) in m.steps.iter().enumerate() {
        validate_step(si, step, &mut report);
    }
    report
}

fn validate_step(si: usize, step: &Step, report: &mut ValidationReport) {
    let before = report.violations.len();
    let e = &step.extrude;
    let scalars = [
        ("theta", e.theta),
        ("phi", e.phi),
        ("gamma", e.gamma),
        ("origin.x", e.origin[0]),
        ("origin.y", e.origin[1]),
        ("origin.z", e.origin[2]),
        ("scale", e.scale),
        ("e1", e.e1),
        ("e2", e.e2),
    ];
    let mut finite = true;
    for (name, v) in scalars {
        if !v.is_finite() {
            report.push(Location::step(si), ViolationKind::NonFinite(name));
            finite = false;
        }
    }
    if finite {
        if !(-ANGLE_SLACK..=PI + ANGLE_SLACK).contains(&e.theta) {
            report.push(
                Location::step(si),
                ViolationKind::ParameterOutOfRange("theta"),
            );
        }
        for (name, v) in [("phi", e.phi), ("gamma", e.gamma)] {
            if !(-PI - ANGLE_SLACK..=PI + ANGLE_SLACK).contains(&v) {
                report.push(Location::step(si), ViolationKind::ParameterOutOfRange(name));
            }
        }
        if e.scale <= 0.0 {
            report.push(Location::step(si), ViolationKind::NonPositiveScale);
        }
        if e.e1 == 0.0 && e.e2 == 0.0 {
            report.push(Location::step(si), ViolationKind::ZeroExtrusion);
        }
        for (name, v) in [("e1", e.e1), ("e2", e.e2)] {
            if v < 0.0 {
                report.push(Location::step(si), ViolationKind::ParameterOutOfRange(name));
            }
        }
    }

    let loops = &step.profile.loops;
    if loops.is_empty() {
        report.push(Location::step(si), ViolationKind::EmptyProfile);
        return;
    }
    let mut curves_ok = true;
    for (li, l) in loops.iter().enumerate() {
        if l.curves.is_empty() {
            report.push(Location::loop_at(si, li), ViolationKind::EmptyLoop);
            curves_ok = false;
            continue;
        }
        for (ci, c) in l.curves.iter().enumerate() {
            let at = Location::curve_at(si, li, ci);
            if c.points()
                .iter()
                .any(|p| !p.x.is_finite() || !p.y.is_finite())
            {
                report.push(at, ViolationKind::NonFinite("curve point"));
                curves_ok = false;
                continue;
            }
            match *c {
                CurveCommand::Arc { start, mid, end } => {
                    if cross(start, mid, end).abs() <= ARC_COLLINEAR_TOLERANCE {
                        report.push(at, ViolationKind::DegenerateArc);
                        curves_ok = false;
                    }
                }
                CurveCommand::Circle { start, center } => {
                    if start.distance(center) <= 0.0 {
                        report.push(at, ViolationKind::ZeroRadius);
                        curves_ok = false;
                    }
                    if l.curves.len() > 1 {
                        report.push(at, ViolationKind::CircleNotAlone);
                        curves_ok = false;
                    }
                }
                CurveCommand::Line { .. } => {}
            }
        }
        let n = l.curves.len();
        for ci in 0..n {
            let next = (ci + 1) % n;
            if l.curves[ci].end().distance(l.curves[next].start()) > LOOP_CLOSURE_TOLERANCE {
                report.push(Location::curve_at(si, li, ci), ViolationKind::OpenLoop);
                curves_ok = false;
                break;
            }
        }
    }
    // Region checks only make sense once the curves themselves are sound.
    if !curves_ok || report.violations.len() > before {
        return;
    }
    match tessellate_profile(&step.profile, DEFAULT_SEGMENTS_PER_TURN) {
        Ok(region) => {
            if region.outer_area().abs() <= MIN_PROFILE_AREA {
                report.push(Location::loop_at(si, 0), ViolationKind::ZeroAreaProfile);
            }
        }
        Err(TessellationError::SelfIntersectingLoop { loop_index }) => {
            report.push(
                Location::loop_at(si, loop_index),
                ViolationKind::SelfIntersectingLoop,
            );
        }
        Err(TessellationError::HoleOutsideOuter { loop_index }) => {
            report.push(
                Location::loop_at(si, loop_index),
                ViolationKind::HoleOutsideOuter,
            );
        }
        Err(TessellationError::DegenerateLoop { loop_index }) => {
            report.push(
                Location::loop_at(si, loop_index),
                ViolationKind::ZeroAreaProfile,
            );
        }
    }
}
