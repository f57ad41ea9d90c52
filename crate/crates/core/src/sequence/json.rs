//! Canonical JSON model format.
//!
//! Documents are objects with a single `steps` array; see `docs/model-schema.md`.
//! Serialization is deterministic: keys in declaration order, every number rounded
//! to six significant digits.

use serde::{Deserialize, Serialize, Serializer};

use super::model::{
    canonical_f64, BoolOp, CadModel, CurveCommand, ExtentType, ExtrudeCommand, Location, Loop,
    Point2, SketchProfile, Step,
};
use super::validate::{validate_model, Violation};

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("malformed document: {0}")]
    MalformedDocument(String),
    #[error("schema violation at `{path}`: {message}")]
    SchemaViolation {
        path: String,
        location: Location,
        message: String,
    },
    #[error("invariant violation at {}: {}", .0.location, .0.kind)]
    InvariantViolation(Violation),
}

impl ModelError {
    pub fn location(&self) -> Option<Location> {
        match self {
            ModelError::MalformedDocument(_) => None,
            ModelError::SchemaViolation { location, .. } => Some(*location),
            ModelError::InvariantViolation(v) => Some(v.location),
        }
    }
}

fn canonical<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(canonical_f64(*v))
}

fn canonical_arr<S: Serializer, const N: usize>(v: &[f64; N], s: S) -> Result<S::Ok, S::Error> {
    v.map(canonical_f64).serialize(s)
}

fn canonical_opt_arr<S: Serializer>(v: &Option<[f64; 2]>, s: S) -> Result<S::Ok, S::Error> {
    v.map(|a| a.map(canonical_f64)).serialize(s)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDoc {
    steps: Vec<StepDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepDoc {
    profile: ProfileDoc,
    extrude: ExtrudeDoc,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileDoc {
    loops: Vec<LoopDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LoopDoc {
    curves: Vec<CurveDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveDoc {
    #[serde(rename = "type")]
    kind: String,
    #[serde(serialize_with = "canonical_arr")]
    start: [f64; 2],
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        serialize_with = "canonical_opt_arr"
    )]
    mid: Option<[f64; 2]>,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        serialize_with = "canonical_opt_arr"
    )]
    end: Option<[f64; 2]>,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        serialize_with = "canonical_opt_arr"
    )]
    center: Option<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExtrudeDoc {
    #[serde(serialize_with = "canonical")]
    theta: f64,
    #[serde(serialize_with = "canonical")]
    phi: f64,
    #[serde(serialize_with = "canonical")]
    gamma: f64,
    #[serde(serialize_with = "canonical_arr")]
    origin: [f64; 3],
    #[serde(serialize_with = "canonical")]
    scale: f64,
    #[serde(serialize_with = "canonical")]
    e1: f64,
    #[serde(serialize_with = "canonical")]
    e2: f64,
    boolean: String,
    extent_type: String,
}

/// Extracts `(step, loop, curve)` indices from a serde path such as
/// `steps[1].profile.loops[0].curves[3].end`.
fn location_from_path(path: &str) -> Location {
    let index_after = |key: &str| -> Option<usize> {
        let at = path.find(&format!("{key}["))? + key.len() + 1;
        let rest = &path[at..];
        rest[..rest.find(']')?].parse().ok()
    };
    Location {
        step: index_after("steps"),
        loop_index: index_after("loops"),
        curve: index_after("curves"),
    }
}

fn schema_error(path: String, message: impl Into<String>) -> ModelError {
    ModelError::SchemaViolation {
        location: location_from_path(&path),
        path,
        message: message.into(),
    }
}

fn curve_from_doc(doc: &CurveDoc, path: &str) -> Result<CurveCommand, ModelError> {
    let start = Point2::from(doc.start);
    let (need_mid, need_end, need_center) = match doc.kind.as_str() {
        "line" => (false, true, false),
        "arc" => (true, true, false),
        "circle" => (false, false, true),
        other => {
            return Err(schema_error(
                format!("{path}.type"),
                format!("unknown curve type `{other}`"),
            ))
        }
    };
    for (name, need, present) in [
        ("mid", need_mid, doc.mid.is_some()),
        ("end", need_end, doc.end.is_some()),
        ("center", need_center, doc.center.is_some()),
    ] {
        if need && !present {
            return Err(schema_error(
                format!("{path}.{name}"),
                format!("missing field `{name}` for {}", doc.kind),
            ));
        }
        if !need && present {
            return Err(schema_error(
                format!("{path}.{name}"),
                format!("field `{name}` is not allowed for {}", doc.kind),
            ));
        }
    }
    Ok(match doc.kind.as_str() {
        "line" => CurveCommand::Line {
            start,
            end: doc.end.unwrap().into(),
        },
        "arc" => CurveCommand::Arc {
            start,
            mid: doc.mid.unwrap().into(),
            end: doc.end.unwrap().into(),
        },
        _ => CurveCommand::Circle {
            start,
            center: doc.center.unwrap().into(),
        },
    })
}

fn model_from_doc(doc: ModelDoc) -> Result<CadModel, ModelError> {
    let mut steps = Vec::with_capacity(doc.steps.len());
    for (si, step) in doc.steps.iter().enumerate() {
        let mut loops = Vec::with_capacity(step.profile.loops.len());
        for (li, l) in step.profile.loops.iter().enumerate() {
            let curves = l
                .curves
                .iter()
                .enumerate()
                .map(|(ci, c)| {
                    curve_from_doc(c, &format!("steps[{si}].profile.loops[{li}].curves[{ci}]"))
                })
                .collect::<Result<Vec<_>, _>>()?;
            loops.push(Loop::new(curves));
        }
        let e = &step.extrude;
        let bool_op = BoolOp::from_str_opt(&e.boolean).ok_or_else(|| {
            schema_error(
                format!("steps[{si}].extrude.boolean"),
                format!("unknown boolean `{}`", e.boolean),
            )
        })?;
        let extent_type = ExtentType::from_str_opt(&e.extent_type).ok_or_else(|| {
            schema_error(
                format!("steps[{si}].extrude.extent_type"),
                format!("unknown extent type `{}`", e.extent_type),
            )
        })?;
        steps.push(Step {
            profile: SketchProfile::new(loops),
            extrude: ExtrudeCommand {
                theta: e.theta,
                phi: e.phi,
                gamma: e.gamma,
                origin: e.origin,
                scale: e.scale,
                e1: e.e1,
                e2: e.e2,
                bool_op,
                extent_type,
            },
        });
    }
    Ok(CadModel::new(steps))
}

fn doc_from_model(m: &CadModel) -> ModelDoc {
    ModelDoc {
        steps: m
            .steps
            .iter()
            .map(|s| StepDoc {
                profile: ProfileDoc {
                    loops: s
                        .profile
                        .loops
                        .iter()
                        .map(|l| LoopDoc {
                            curves: l.curves.iter().map(curve_doc).collect(),
                        })
                        .collect(),
                },
                extrude: ExtrudeDoc {
                    theta: s.extrude.theta,
                    phi: s.extrude.phi,
                    gamma: s.extrude.gamma,
                    origin: s.extrude.origin,
                    scale: s.extrude.scale,
                    e1: s.extrude.e1,
                    e2: s.extrude.e2,
                    boolean: s.extrude.bool_op.as_str().to_string(),
                    extent_type: s.extrude.extent_type.as_str().to_string(),
                },
            })
            .collect(),
    }
}

fn curve_doc(c: &CurveCommand) -> CurveDoc {
    let mut doc = CurveDoc {
        kind: c.kind().as_str().to_string(),
        start: c.start().into(),
        mid: None,
        end: None,
        center: None,
    };
    match *c {
        CurveCommand::Line { end, .. } => doc.end = Some(end.into()),
        CurveCommand::Arc { mid, end, .. } => {
            doc.mid = Some(mid.into());
            doc.end = Some(end.into());
        }
        CurveCommand::Circle { center, .. } => doc.center = Some(center.into()),
    }
    doc
}

/// Parses a model without checking geometric invariants.
///
/// Syntax and schema errors are still reported; the result may be invalid and
/// should be passed to [`validate_model`].
pub fn parse_model_lenient(text: &str) -> Result<CadModel, ModelError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| ModelError::MalformedDocument(e.to_string()))?;
    let doc: ModelDoc = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        schema_error(path, e.into_inner().to_string())
    })?;
    model_from_doc(doc)
}

/// Parses a model and enforces every invariant; the first violation is returned.
pub fn parse_model(text: &str) -> Result<CadModel, ModelError> {
    let model = parse_model_lenient(text)?;
    let report = validate_model(&model);
    match report.violations.into_iter().next() {
        Some(v) => Err(ModelError::InvariantViolation(v)),
        None => Ok(model),
    }
}

/// Serializes to the canonical pretty-printed document (trailing newline included).
pub fn serialize_model(m: &CadModel) -> String {
    let mut out = serde_json::to_string_pretty(&doc_from_model(m)).expect("model serializes");
    out.push('\n');
    out
}
