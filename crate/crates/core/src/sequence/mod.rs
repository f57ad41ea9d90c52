//! Sketch-extrude command sequences: domain types, the canonical JSON format and
//! validation.

mod json;
mod model;
mod validate;

pub use json::{parse_model, parse_model_lenient, serialize_model, ModelError};
pub use model::{
    canonical_f64, format_canonical, BoolOp, CadModel, CurveCommand, CurveKind, ExtentType,
    ExtrudeCommand, Location, Loop, Point2, SketchProfile, Step, CANONICAL_DIGITS,
};
pub use validate::{
    validate_model, ValidationReport, Violation, ViolationKind, ARC_COLLINEAR_TOLERANCE,
    LOOP_CLOSURE_TOLERANCE, MIN_PROFILE_AREA,
};
